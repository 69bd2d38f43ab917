use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kossak_core::io::matrix_to_pairs;
use kossak_core::linalg::{count_zero_singular_values, ZERO_SV_REL};
use kossak_core::sweep::log_grid;
use kossak_core::{
    build_tensor, coherence_form, cp_verdict, frobenius_distance, generate_basis,
    kossakowski_pinv, kossakowski_trace, read_dissipator, run_selftest, run_sweep,
    structure_constants, sweep_csv, validate_dissipator, Dissipator, Error, KossakowskiMatrix,
    Model, ModelSet, PsbrParams, SweepSpec,
};

#[derive(Parser)]
#[command(name = "kossak", version, about = "Kossakowski matrices and complete-positivity checks for Markovian dissipators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the generalized Gell-Mann basis and structure-constant summary.
    Basis {
        #[arg(long)]
        n: usize,
    },
    /// Extract the Kossakowski matrix of a model or a Liouvillian file.
    Kossakowski(KossakowskiArgs),
    /// Kossakowski spectra of the three-level models over a parameter grid (CSV).
    Sweep(SweepArgs),
    /// Singular values of the coherence-to-Kossakowski tensor.
    SvdTensor {
        #[arg(long)]
        n: usize,
    },
    /// Run the built-in invariant suite.
    Selftest {
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Trace,
    Pinv,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    V,
    Lambda,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::V => Model::V,
            ModelArg::Lambda => Model::Lambda,
        }
    }
}

#[derive(Args)]
struct ModelParams {
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma2: f64,
    #[arg(long, default_value_t = 0.0)]
    nbar: f64,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Pumping rate of transition 1, overrides nbar * gamma1.
    #[arg(long)]
    r1: Option<f64>,
    /// Pumping rate of transition 2, overrides nbar * gamma2.
    #[arg(long)]
    r2: Option<f64>,
}

#[derive(Args)]
struct KossakowskiArgs {
    #[arg(long, value_enum, conflicts_with = "input", required_unless_present = "input")]
    model: Option<ModelArg>,
    /// Liouvillian JSON document.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    params: ModelParams,
    #[arg(long, value_enum, default_value = "both")]
    method: Method,
    /// CP tolerance; default 1e-12 * max(1, lambda_max).
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep one model only; default both.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, default_value_t = 1.0)]
    gamma2: f64,
    /// Comma-separated nbar values.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 1.0, 100.0])]
    nbar: Vec<f64>,
    /// Comma-separated p values.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0])]
    p: Vec<f64>,
    /// Explicit comma-separated gamma1/gamma2 values, replacing the log grid.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    ratio_min: f64,
    #[arg(long, default_value_t = 10.0)]
    ratio_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    tol: Option<f64>,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) | Error::Io(_) | Error::Json(_) | Error::InconsistentBasis { .. } => 2,
            Error::InvalidDissipator { .. } | Error::NotHermiticityPreserving { .. } | Error::NotHermitian { .. } => 3,
            Error::NotGklsRepresentable { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn require_n(n: usize) -> Result<(), Failure> {
    if n < 2 {
        return Err(usage(format!("--n must be at least 2, got {n}")));
    }
    Ok(())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn fmt_row(values: impl Iterator<Item = String>) -> String {
    values.collect::<Vec<_>>().join("  ")
}

fn cmd_basis(n: usize) -> Result<(), Failure> {
    require_n(n)?;
    let basis = generate_basis(n)?;
    let sc = structure_constants(&basis)?;
    let mut text = String::new();
    for (i, f) in basis.matrices().iter().enumerate() {
        text.push_str(&format!("F_{i}\n"));
        for row in f.outer_iter() {
            let cells = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im));
            text.push_str(&format!("  {}\n", fmt_row(cells)));
        }
    }
    let count = |a: &ndarray::Array3<f64>| a.iter().filter(|x| x.abs() > 1e-12).count();
    text.push_str(&format!(
        "n = {n}, {} matrices, orthonormality residual {:.3e}\n",
        basis.matrices().len(),
        basis.orthonormality_residual()
    ));
    text.push_str(&format!(
        "structure constants: {} nonzero f_ijk, {} nonzero d_ijk\n",
        count(&sc.f),
        count(&sc.d)
    ));
    emit(None, &text)
}

#[derive(Serialize)]
struct ExtractionReport {
    kossakowski: Vec<Vec<[f64; 2]>>,
    hermitization_residual: f64,
}

impl From<&KossakowskiMatrix> for ExtractionReport {
    fn from(a: &KossakowskiMatrix) -> Self {
        Self {
            kossakowski: matrix_to_pairs(a.matrix()),
            hermitization_residual: a.hermiticity_residual(),
        }
    }
}

#[derive(Serialize)]
struct KossakowskiReport {
    source: serde_json::Value,
    n: usize,
    method: &'static str,
    validation: kossak_core::ValidationReport,
    /// The reported matrix: trace result unless only pinv ran.
    kossakowski: Vec<Vec<[f64; 2]>>,
    hermitization_residual: f64,
    spectrum: Vec<f64>,
    is_cp: bool,
    min_eigenvalue: f64,
    tolerance_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<ExtractionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pinv: Option<ExtractionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method_discrepancy: Option<f64>,
}

fn load(args: &KossakowskiArgs) -> Result<(Dissipator, serde_json::Value), Failure> {
    if let Some(path) = &args.input {
        let l = read_dissipator(path)?;
        return Ok((l, serde_json::json!({ "input": path.display().to_string() })));
    }
    let model: Model = args.model.expect("clap requires model or input").into();
    let p = &args.params;
    let params = PsbrParams::new(p.gamma1, p.gamma2, p.nbar, p.p).with_pumping(p.r1, p.r2);
    let l = ModelSet::default().build(model, &params)?;
    let source = serde_json::json!({
        "model": model,
        "gamma1": params.gamma1,
        "gamma2": params.gamma2,
        "nbar": params.nbar,
        "p": params.p,
        "r1": params.r1(),
        "r2": params.r2(),
    });
    Ok((l, source))
}

fn cmd_kossakowski(args: &KossakowskiArgs) -> Result<(), Failure> {
    let (l, source) = load(args)?;
    let n = l.n();
    let validation = validate_dissipator(&l);
    if !validation.passed {
        return Err(Error::InvalidDissipator {
            trace_residual: validation.trace_residual,
            hermiticity_residual: validation.hermiticity_residual,
        }
        .into());
    }
    let basis = generate_basis(n)?;
    let trace = match args.method {
        Method::Trace | Method::Both => Some(kossakowski_trace(&l, &basis)?),
        Method::Pinv => None,
    };
    let pinv = match args.method {
        Method::Pinv | Method::Both => {
            let sc = structure_constants(&basis)?;
            let t = build_tensor(&sc, n)?;
            Some(kossakowski_pinv(&coherence_form(&l, &basis)?, &t)?)
        }
        Method::Trace => None,
    };
    let primary = trace.as_ref().or(pinv.as_ref()).expect("at least one method ran");
    let verdict = cp_verdict(primary, args.tol)?;
    let method_discrepancy = match (&trace, &pinv) {
        (Some(a), Some(b)) => Some(frobenius_distance(a, b)),
        _ => None,
    };
    let both = args.method == Method::Both;
    let report = KossakowskiReport {
        source,
        n,
        method: match args.method {
            Method::Trace => "trace",
            Method::Pinv => "pinv",
            Method::Both => "both",
        },
        validation,
        kossakowski: matrix_to_pairs(primary.matrix()),
        hermitization_residual: primary.hermiticity_residual(),
        spectrum: verdict.spectrum,
        is_cp: verdict.is_cp,
        min_eigenvalue: verdict.min_eigenvalue,
        tolerance_used: verdict.tolerance_used,
        trace: trace.as_ref().filter(|_| both).map(ExtractionReport::from),
        pinv: pinv.as_ref().filter(|_| both).map(ExtractionReport::from),
        method_discrepancy,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    text.push('\n');
    emit(args.out.as_ref(), &text)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let ratios = match &args.ratios {
        Some(r) => r.clone(),
        None => {
            if !(args.ratio_min > 0.0 && args.ratio_max >= args.ratio_min) {
                return Err(usage("need 0 < --ratio-min <= --ratio-max"));
            }
            log_grid(args.ratio_min, args.ratio_max, args.points)
        }
    };
    let spec = SweepSpec {
        models: match args.model {
            Some(m) => vec![m.into()],
            None => vec![Model::V, Model::Lambda],
        },
        ratios,
        nbars: args.nbar.clone(),
        ps: args.p.clone(),
        gamma2: args.gamma2,
        tol: args.tol,
    };
    let rows = run_sweep(&spec, &ModelSet::default())?;
    emit(args.out.as_ref(), &sweep_csv(&rows))
}

fn cmd_svd_tensor(n: usize) -> Result<(), Failure> {
    require_n(n)?;
    let sc = structure_constants(&generate_basis(n)?)?;
    let t = build_tensor(&sc, n)?;
    let values = t.square_singular_values();
    let mut text = String::new();
    for v in values {
        text.push_str(&format!("{v:.16e}\n"));
    }
    text.push_str(&format!(
        "# n = {n}: {} singular values, {} below {ZERO_SV_REL:.0e} * sigma_max\n",
        values.len(),
        count_zero_singular_values(values)
    ));
    emit(None, &text)
}

fn cmd_selftest(json: bool) -> Result<(), Failure> {
    let report = run_selftest(&ModelSet::default());
    let text = if json {
        serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n"
    } else {
        format!("{report}\n")
    };
    emit(None, &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: "selftest failed".into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Basis { n } => cmd_basis(*n),
        Command::Kossakowski(args) => cmd_kossakowski(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::SvdTensor { n } => cmd_svd_tensor(*n),
        Command::Selftest { json } => cmd_selftest(*json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kossak: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
