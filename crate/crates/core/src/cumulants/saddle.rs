//! Saddle-point constants governing the large-`n` growth of `f₃⁽⁰⁾` and
//! `f₃⁽¹⁾`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Newton iteration cap for [`solve_saddle_constants`].
pub const SADDLE_MAX_ITERATIONS: usize = 200;

const START: [f64; 2] = [0.1, 0.1];
const RESIDUAL_TOLERANCE: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    /// Growth exponent of `f₂` and `f₃⁽¹⁾`: `log₂3 − 1`.
    pub alpha: f64,
    /// Decay exponent of `κ₃`.
    pub gamma: f64,
    /// Prefactor of `f₃⁽⁰⁾ ∼ c N^{5−γ}`.
    pub c: f64,
    pub sigma0_star: f64,
    pub sigma_star: f64,
    /// Symmetric saddle of the `f₃⁽¹⁾` sum; exactly `1/12`.
    pub sigma_star_f31: f64,
    /// Saddle value `S₀* = log(3/2)` of the `f₃⁽¹⁾` sum.
    pub s0_star_f31: f64,
    /// Prefactor `64c` of `κ₃ ∼ 64c N^{−γ}`.
    pub kappa3_prefactor: f64,
    pub iterations: usize,
}

/// Residuals of the symmetric saddle equations at `(σ₀, σ)`.
pub fn saddle_residuals(x: [f64; 2]) -> [f64; 2] {
    let [s0, s] = x;
    let common = 1.0 - s0 - 3.0 * s;
    let pair = 1.0 - s0 - 2.0 * s;
    [
        common * (1.0 - 2.0 * s0).powi(3) - 8.0 * s0 * pair.powi(3),
        common * (1.0 - 4.0 * s).powi(2) - 4.0 * s * pair.powi(2),
    ]
}

fn jacobian(x: [f64; 2]) -> [[f64; 2]; 2] {
    let [s0, s] = x;
    let common = 1.0 - s0 - 3.0 * s;
    let pair = 1.0 - s0 - 2.0 * s;
    let u = 1.0 - 2.0 * s0;
    let v = 1.0 - 4.0 * s;
    [
        [
            -u.powi(3) - 6.0 * common * u.powi(2) - 8.0 * pair.powi(3)
                + 24.0 * s0 * pair.powi(2),
            -3.0 * u.powi(3) + 48.0 * s0 * pair.powi(2),
        ],
        [
            -v.powi(2) + 8.0 * s * pair,
            -3.0 * v.powi(2) - 8.0 * common * v - 4.0 * pair.powi(2) + 16.0 * s * pair,
        ],
    ]
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

fn solve_symmetric_system() -> Result<([f64; 2], usize)> {
    let mut x = START;
    let mut r = saddle_residuals(x);
    for iter in 1..=SADDLE_MAX_ITERATIONS {
        if norm(r) < RESIDUAL_TOLERANCE {
            return Ok((x, iter - 1));
        }
        let [[a, b], [c, d]] = jacobian(x);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [(d * r[0] - b * r[1]) / det, (a * r[1] - c * r[0]) / det];
        let mut lambda = 1.0;
        loop {
            let trial = [x[0] - lambda * step[0], x[1] - lambda * step[1]];
            let tr = saddle_residuals(trial);
            if norm(tr) < norm(r) || lambda < 1e-10 {
                let stalled = trial == x;
                x = trial;
                r = tr;
                if stalled {
                    return if norm(r) < 1e-13 {
                        Ok((x, iter))
                    } else {
                        Err(Error::NumericFailure {
                            iterations: iter,
                            residuals: r.to_vec(),
                        })
                    };
                }
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm(r) < RESIDUAL_TOLERANCE {
        return Ok((x, SADDLE_MAX_ITERATIONS));
    }
    Err(Error::NumericFailure {
        iterations: SADDLE_MAX_ITERATIONS,
        residuals: r.to_vec(),
    })
}

/// `c` from the symmetric saddle `(σ₀, σ)`.
fn prefactor(s0: f64, s: f64) -> f64 {
    let num = (1.0 - s0 - 2.0 * s).powi(3) / (1.0 - 2.0 * s0);
    let lin = 1.0 - s0 - 5.0 * s + 2.0 * s * (4.0 * s + s0);
    let root = 1.0 - 2.0 * s - s0 * s0 - 4.0 * s * s + 4.0 * s * s0 * (8.0 * s + 2.0 * s0 - 3.0);
    num / (lin * root.sqrt())
}

/// `γ = 5 − ½ log₂[(1−2σ₀)³ / (64 σ₀² (1−4σ)³)]`.
fn decay_exponent(s0: f64, s: f64) -> f64 {
    5.0 - 0.5 * ((1.0 - 2.0 * s0).powi(3) / (64.0 * s0 * s0 * (1.0 - 4.0 * s).powi(3))).log2()
}

/// Solves the symmetric saddle equations by damped Newton from `(0.1, 0.1)`
/// and derives `α`, `γ`, `c`.
pub fn solve_saddle_constants() -> Result<AsymptoticConstants> {
    let ([s0, s], iterations) = solve_symmetric_system()?;
    // Symmetric f₃⁽¹⁾ saddle: (1−4σ)³ = 8σ(1−4σ)² reduces to 1−4σ = 8σ.
    let sigma_star_f31 = 1.0 / 12.0;
    let c = prefactor(s0, s);
    Ok(AsymptoticConstants {
        alpha: 3f64.log2() - 1.0,
        gamma: decay_exponent(s0, s),
        c,
        sigma0_star: s0,
        sigma_star: s,
        sigma_star_f31,
        s0_star_f31: -(1.0 - 4.0 * sigma_star_f31).ln(),
        kappa3_prefactor: 64.0 * c,
        iterations,
    })
}

/// Process-wide cached [`solve_saddle_constants`].
pub fn saddle_constants() -> Result<AsymptoticConstants> {
    static CACHE: OnceLock<Result<AsymptoticConstants>> = OnceLock::new();
    CACHE.get_or_init(solve_saddle_constants).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_known_saddle() {
        let k = solve_saddle_constants().unwrap();
        assert!((k.sigma0_star - 0.108955).abs() < 1e-5, "{k:?}");
        assert!((k.sigma_star - 0.104767).abs() < 1e-5, "{k:?}");
        assert!((k.c - 1.05385).abs() < 1e-4, "{k:?}");
        assert!((k.gamma - 4.1583).abs() < 1e-4, "{k:?}");
        assert!(norm(saddle_residuals([k.sigma0_star, k.sigma_star])) < 1e-13);
        assert!(k.iterations <= SADDLE_MAX_ITERATIONS);
    }

    #[test]
    fn f31_saddle_is_one_twelfth() {
        let k = solve_saddle_constants().unwrap();
        assert_eq!(k.sigma_star_f31, 1.0 / 12.0);
        assert!((k.s0_star_f31 - 1.5f64.ln()).abs() < 1e-15);
        assert!((k.s0_star_f31 * std::f64::consts::LOG2_E - k.alpha).abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let x = [0.12, 0.09];
        let j = jacobian(x);
        let h = 1e-7;
        for col in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[col] += h;
            xm[col] -= h;
            let (rp, rm) = (saddle_residuals(xp), saddle_residuals(xm));
            for row in 0..2 {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                assert!((fd - j[row][col]).abs() < 1e-6, "J[{row}][{col}]");
            }
        }
    }
}
