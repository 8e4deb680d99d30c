use anyhow::{bail, Result};
use serde::Serialize;

use mmes_core::coupling::{check_symmetries, CouplingTable};
use mmes_core::cumulants::{
    asymptotic_cumulants, asymptotic_f2, exact_cumulants_with, saddle_constants, StructureForm,
};
use mmes_core::ensemble::{histogram_from_samples, sample_energies, HistogramBin, HistogramMetadata, MIN_SAMPLES};
use mmes_core::mmes::{anneal, binary_search_mmes, AnnealSchedule, Ramp};
use mmes_core::selftest::{run_selftest, SelftestOptions};
use mmes_core::{AsymptoticConstants, ExactValue, RngSeed, StateRecord, SystemSize};

use crate::output::{emit, ensure_writable, sidecar_path, to_json, write_file};
use crate::{
    Cli, Command, CouplingArgs, CumulantsArgs, Form, RampArg, SaddleArgs, SampleArgs, SampleFormat,
    SearchArgs, SelftestArgs,
};

/// Runs the selected command. `Ok(false)` means the command ran but its
/// checks failed.
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Cumulants(a) => cumulants(a, cli.force),
        Command::Sample(a) => sample(a, cli.force),
        Command::Search(a) => search(a, cli.force),
        Command::Coupling(a) => coupling(a, cli.force),
        Command::Saddle(a) => saddle(a, cli.force),
        Command::Selftest(a) => selftest(a, cli.force),
    }
}

#[derive(Serialize)]
struct ExactBlock {
    form: StructureForm,
    mu: ExactValue,
    sigma_bar_sq: ExactValue,
    kappa3: ExactValue,
    sigma_single_sq: ExactValue,
    sigma_ind_sq: ExactValue,
    f2: ExactValue,
    f3_0: ExactValue,
    f3_1: ExactValue,
}

#[derive(Serialize)]
struct AsymptoticBlock {
    mu: f64,
    sigma_bar_sq: f64,
    kappa3: f64,
    f2: f64,
    constants: AsymptoticConstants,
}

#[derive(Serialize)]
struct CumulantsPayload {
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotic: Option<AsymptoticBlock>,
}

fn cumulants(a: &CumulantsArgs, force: bool) -> Result<bool> {
    let size = SystemSize::new(a.n)?;
    let (want_exact, want_asym) = match (a.exact, a.asymptotic) {
        (true, _) => (true, false),
        (_, true) => (false, true),
        _ => (true, true),
    };
    if let Some(p) = &a.out {
        ensure_writable(&[p], force)?;
    }
    let exact = if want_exact {
        let form = match a.form {
            Form::Reduced => StructureForm::Reduced,
            Form::Bitsum => StructureForm::BitSum,
        };
        let r = exact_cumulants_with(size, form)?;
        Some(ExactBlock {
            form,
            mu: (&r.mu).into(),
            sigma_bar_sq: (&r.sigma_bar_sq).into(),
            kappa3: (&r.kappa3).into(),
            sigma_single_sq: (&r.sigma_single_sq).into(),
            sigma_ind_sq: (&r.sigma_ind_sq).into(),
            f2: (&r.structure.f2).into(),
            f3_0: (&r.structure.f3_0).into(),
            f3_1: (&r.structure.f3_1).into(),
        })
    } else {
        None
    };
    let asymptotic = if want_asym {
        let c = asymptotic_cumulants(size)?;
        Some(AsymptoticBlock {
            mu: c.mu,
            sigma_bar_sq: c.sigma_bar_sq,
            kappa3: c.kappa3,
            f2: asymptotic_f2(size),
            constants: saddle_constants()?,
        })
    } else {
        None
    };
    let payload = CumulantsPayload {
        n: a.n,
        exact,
        asymptotic,
    };
    emit(a.out.as_deref(), &to_json("cumulants", payload)?, force)?;
    Ok(true)
}

#[derive(Serialize)]
struct HistogramPayload<'a> {
    metadata: HistogramMetadata,
    bins: &'a [HistogramBin],
}

fn sample(a: &SampleArgs, force: bool) -> Result<bool> {
    let size = SystemSize::new(a.n)?;
    if a.samples < MIN_SAMPLES {
        bail!("need at least {MIN_SAMPLES} samples, got {}", a.samples);
    }
    if !(a.bin_width.is_finite() && a.bin_width > 0.0) {
        bail!("bin width must be positive and finite");
    }
    if !a.beta.is_finite() {
        bail!("beta must be finite");
    }
    size.check_dense()?;
    let sidecar = sidecar_path(&a.out);
    match a.format {
        SampleFormat::Csv => ensure_writable(&[&a.out, &sidecar], force)?,
        SampleFormat::Json => ensure_writable(&[&a.out], force)?,
    }
    let samples = sample_energies(size, a.samples, RngSeed(a.seed))?;
    let hist = histogram_from_samples(&samples, a.beta, a.bin_width)?;
    if hist.low_ess_warning {
        eprintln!(
            "warning: effective sample size {:.1} at beta = {} is too small for a reliable histogram",
            hist.ess, a.beta
        );
    }
    match a.format {
        SampleFormat::Csv => {
            write_file(&a.out, &hist.to_csv(), force)?;
            write_file(&sidecar, &to_json("sample", hist.metadata())?, force)?;
        }
        SampleFormat::Json => {
            let payload = HistogramPayload {
                metadata: hist.metadata(),
                bins: &hist.bins,
            };
            write_file(&a.out, &to_json("sample", payload)?, force)?;
        }
    }
    Ok(true)
}

fn search(a: &SearchArgs, force: bool) -> Result<bool> {
    let size = SystemSize::new(a.n)?;
    if let Some(p) = &a.out {
        ensure_writable(&[p], force)?;
    }
    let seed = RngSeed(a.seed);
    let result = if a.binary {
        binary_search_mmes(size, seed, a.budget)?
    } else {
        let schedule = AnnealSchedule {
            beta_start: a.beta_start,
            beta_end: a.beta_end,
            steps: a.steps,
            ramp: match a.ramp {
                RampArg::Geometric => Ramp::Geometric,
                RampArg::Linear => Ramp::Linear,
            },
            moves_per_beta: a.moves_per_beta,
            restarts: a.restarts,
            polish_iterations: a.polish_iterations,
        };
        anneal(size, &schedule, seed)?
    };
    if result.budget_exhausted && a.binary {
        eprintln!("warning: budget exhausted before a perfect state was found");
    }
    let mut json = serde_json::to_string_pretty(&StateRecord::from_result(&result))?;
    json.push('\n');
    emit(a.out.as_deref(), &json, force)?;
    Ok(true)
}

#[derive(Serialize)]
struct GhatEntry {
    s: u32,
    t: u32,
    ghat: ExactValue,
}

#[derive(Serialize)]
struct CouplingPayload {
    n: u32,
    entries: Vec<GhatEntry>,
}

fn coupling(a: &CouplingArgs, force: bool) -> Result<bool> {
    let size = SystemSize::new(a.n)?;
    if let Some(p) = &a.out {
        ensure_writable(&[p], force)?;
    }
    if a.check_symmetries {
        let report = check_symmetries(size, a.trials, RngSeed(a.seed))?;
        let passed = report.passed;
        emit(a.out.as_deref(), &to_json("coupling", report)?, force)?;
        return Ok(passed);
    }
    let table = CouplingTable::new(size)?;
    let entries = (0..=a.n)
        .flat_map(|s| (0..=a.n - s).map(move |t| (s, t)))
        .map(|(s, t)| GhatEntry {
            s,
            t,
            ghat: table.ghat(s, t).into(),
        })
        .collect();
    let payload = CouplingPayload { n: a.n, entries };
    emit(a.out.as_deref(), &to_json("coupling", payload)?, force)?;
    Ok(true)
}

fn saddle(a: &SaddleArgs, force: bool) -> Result<bool> {
    if let Some(p) = &a.out {
        ensure_writable(&[p], force)?;
    }
    emit(a.out.as_deref(), &to_json("saddle", saddle_constants()?)?, force)?;
    Ok(true)
}

fn selftest(a: &SelftestArgs, force: bool) -> Result<bool> {
    if let Some(p) = &a.out {
        ensure_writable(&[p], force)?;
    }
    let opts = SelftestOptions {
        seed: RngSeed(a.seed),
        max_n: a.max_n,
        corrupt_ghat: a.corrupt_ghat,
        ..Default::default()
    };
    if opts.max_n < opts.min_n {
        bail!("--max-n must be at least {}", opts.min_n);
    }
    let report = run_selftest(&opts)?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {} (n={}): {}", c.name, c.n, c.detail);
    }
    let passed = report.passed;
    emit(a.out.as_deref(), &to_json("selftest", report)?, force)?;
    Ok(passed)
}
