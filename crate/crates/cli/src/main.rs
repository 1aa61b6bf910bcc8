#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anharmonic::exec::Execution;
use anharmonic::fock::FockState;
use anharmonic::measures::{
    measure_many, measure_model, model_wigner, scatter_params, MeasureOptions, MeasureRecord, ModelParams,
};
use anharmonic::oscillators::{MhoParams, MorseParams, PtParams};
use anharmonic::perturb::{fidelity_map, linspace, PolyParams};
use anharmonic::quad::QuadOptions;
use anharmonic::wigner::fock_wigner;
use anharmonic::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod table;

use table::{fmt_num, Cell, Table};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "anharmonic",
    version,
    about = "Nonlinearity and nonclassicality of anharmonic oscillator ground states"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Absolute tolerance of the negativity-volume cubature; also caps the
    /// relative tolerance.
    #[arg(long = "tol-2d", global = true)]
    tol_2d: Option<f64>,
    /// Starting Fock dimension for the entanglement potential.
    #[arg(long, global = true)]
    dim_fock: Option<usize>,
    /// Levels for exact diagonalization of the polynomial model.
    #[arg(long, global = true)]
    dim_diag: Option<usize>,
    /// Evaluate points one at a time.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All measures for one parameter point.
    Measure(ModelArgs),
    /// All measures along one parameter axis.
    Sweep(SweepArgs),
    /// All measures at random points of the polynomial model.
    Scatter(ScatterArgs),
    /// Ground-state Wigner function on a lattice.
    WignerGrid(GridArgs),
    /// Fidelity of the perturbative ground state against diagonalization.
    FidelityMap(FidelityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Mho,
    Morse,
    Pt,
    Poly,
    /// Number state `|n⟩`; wigner-grid only.
    Fock,
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// MHO `β²/α`, replaces `--beta`.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Morse well depth.
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// Pöschl-Teller well depth.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Pöschl-Teller `s`, replaces `--a`.
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps4: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps6: Option<f64>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(value_enum)]
    model: ModelKind,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Parameter to vary.
    #[arg(long)]
    axis: String,
    #[arg(long, allow_negative_numbers = true)]
    start: f64,
    #[arg(long, allow_negative_numbers = true)]
    stop: f64,
    #[arg(long, default_value_t = 20)]
    count: usize,
}

#[derive(Args, Debug)]
struct ScatterArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    eps4_max: f64,
    #[arg(long, default_value_t = 0.03)]
    eps6_max: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Fock level for `fock`.
    #[arg(long = "n", default_value_t = 0)]
    level: usize,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 101)]
    nx: usize,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    p_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    p_max: f64,
    #[arg(long, default_value_t = 101)]
    ny: usize,
}

#[derive(Args, Debug)]
struct FidelityArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.1)]
    eps4_max: f64,
    #[arg(long, default_value_t = 0.03)]
    eps6_max: f64,
    /// Points along `ε₄`.
    #[arg(long, default_value_t = 5)]
    n4: usize,
    /// Points along `ε₆`.
    #[arg(long, default_value_t = 5)]
    n6: usize,
}

/// A failed command and its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let opts = measure_options(cli)?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let (text, status) = match &cli.command {
        Command::Measure(args) => cmd_measure(args, &opts, cli.format)?,
        Command::Sweep(args) => cmd_sweep(args, &opts, exec, cli.format)?,
        Command::Scatter(args) => cmd_scatter(args, &opts, exec, cli.format)?,
        Command::WignerGrid(args) => (cmd_wigner_grid(args, exec, cli.format)?, Ok(())),
        Command::FidelityMap(args) => cmd_fidelity_map(args, &opts, exec, cli.format)?,
    };
    emit(cli.out.as_ref(), &text)?;
    status
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let written = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}

fn measure_options(cli: &Cli) -> Result<MeasureOptions, Failure> {
    let mut opts = MeasureOptions::default();
    if let Some(tol) = cli.tol_2d {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Failure::usage(format!("--tol-2d must be positive, got {tol}")));
        }
        opts.quad_2d = QuadOptions {
            abs_tol: tol,
            rel_tol: opts.quad_2d.rel_tol.min(tol),
            ..opts.quad_2d
        };
    }
    if let Some(dim) = cli.dim_fock {
        if dim < 2 {
            return Err(Failure::usage(format!("--dim-fock must be at least 2, got {dim}")));
        }
        opts.dim_fock = dim;
        opts.max_dim_fock = opts.max_dim_fock.max(dim);
    }
    if let Some(dim) = cli.dim_diag {
        if dim < 31 {
            return Err(Failure::usage(format!("--dim-diag must be at least 31, got {dim}")));
        }
        opts.dim_diag = dim;
    }
    Ok(opts)
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn raw_names(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::Mho => &["alpha", "beta"],
        ModelKind::Morse => &["d", "alpha"],
        ModelKind::Pt => &["a", "alpha"],
        ModelKind::Poly => &["omega", "eps4", "eps6"],
        ModelKind::Fock => &[],
    }
}

fn axis_names(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::Mho => &["alpha", "beta", "tau"],
        ModelKind::Morse => &["d", "alpha"],
        ModelKind::Pt => &["a", "alpha", "s"],
        ModelKind::Poly => &["omega", "eps4", "eps6"],
        ModelKind::Fock => &[],
    }
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Mho => "mho",
        ModelKind::Morse => "morse",
        ModelKind::Pt => "pt",
        ModelKind::Poly => "poly",
        ModelKind::Fock => "fock",
    }
}

impl ParamArgs {
    fn get(&self, name: &str) -> Option<f64> {
        match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "tau" => self.tau,
            "d" => self.d,
            "a" => self.a,
            "s" => self.s,
            "omega" => self.omega,
            "eps4" => self.eps4,
            "eps6" => self.eps6,
            _ => None,
        }
    }

    fn set(&mut self, name: &str, v: f64) {
        let slot = match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "tau" => &mut self.tau,
            "d" => &mut self.d,
            "a" => &mut self.a,
            "s" => &mut self.s,
            "omega" => &mut self.omega,
            "eps4" => &mut self.eps4,
            "eps6" => &mut self.eps6,
            _ => return,
        };
        *slot = Some(v);
    }

    /// Leaves only the alternative the sweep axis chose.
    fn prefer(&mut self, axis: &str) {
        match axis {
            "tau" => self.beta = None,
            "beta" => self.tau = None,
            "s" => self.a = None,
            "a" => self.s = None,
            _ => {}
        }
    }
}

fn required(kind: ModelKind, p: &ParamArgs, name: &str) -> anharmonic::Result<f64> {
    p.get(name)
        .ok_or_else(|| Error::InvalidParams(format!("{} requires --{name}", model_name(kind))))
}

fn build_model(kind: ModelKind, p: &ParamArgs) -> anharmonic::Result<ModelParams> {
    let req = |name| required(kind, p, name);
    match kind {
        ModelKind::Mho => {
            let alpha = req("alpha")?;
            match (p.beta, p.tau) {
                (Some(_), Some(_)) => Err(Error::InvalidParams("mho takes --beta or --tau, not both".into())),
                (Some(beta), None) => Ok(ModelParams::Mho(MhoParams::new(alpha, beta)?)),
                (None, Some(tau)) => Ok(ModelParams::Mho(MhoParams::with_tau(alpha, tau)?)),
                (None, None) => Err(Error::InvalidParams("mho requires --beta or --tau".into())),
            }
        }
        ModelKind::Morse => Ok(ModelParams::Morse(MorseParams::new(req("d")?, req("alpha")?)?)),
        ModelKind::Pt => {
            let alpha = req("alpha")?;
            match (p.a, p.s) {
                (Some(_), Some(_)) => Err(Error::InvalidParams("pt takes --a or --s, not both".into())),
                (Some(a), None) => Ok(ModelParams::Pt(PtParams::new(a, alpha)?)),
                (None, Some(s)) => Ok(ModelParams::Pt(PtParams::with_s(alpha, s)?)),
                (None, None) => Err(Error::InvalidParams("pt requires --a or --s".into())),
            }
        }
        ModelKind::Poly => Ok(ModelParams::Poly(PolyParams::new(
            p.omega.unwrap_or(1.0),
            p.eps4.unwrap_or(0.0),
            p.eps6.unwrap_or(0.0),
        )?)),
        ModelKind::Fock => Err(Error::InvalidParams(
            "the fock model is only available for wigner-grid".into(),
        )),
    }
}

fn measure_columns(kind: ModelKind) -> Vec<&'static str> {
    let mut cols = vec!["model"];
    cols.extend_from_slice(raw_names(kind));
    cols.extend_from_slice(&[
        "tau_or_N_or_s",
        "eta_ng",
        "nu",
        "ent_potential",
        "r_x",
        "r_p",
        "energy",
        "fidelity",
        "error",
    ]);
    cols
}

fn record_row(kind: ModelKind, params: &ParamArgs, rec: &Result<MeasureRecord, Error>) -> Vec<Cell> {
    let mut row = vec![Cell::Text(model_name(kind).into())];
    match rec {
        Ok(r) => {
            row.extend(r.model.raw().into_iter().map(|(_, v)| Cell::Num(v)));
            row.push(r.effective().into());
            row.extend([
                Cell::Num(r.eta_ng),
                r.nu.into(),
                r.ent_potential.into(),
                Cell::Num(r.r_x),
                Cell::Num(r.r_p),
                Cell::Num(r.energy),
                r.fidelity.into(),
                r.error_message().map_or(Cell::Empty, Cell::Text),
            ]);
        }
        Err(e) => {
            row.extend(raw_names(kind).iter().map(|n| params.get(n).into()));
            row.extend(std::iter::repeat_n(Cell::Empty, 8));
            row.push(Cell::Text(e.to_string()));
        }
    }
    row
}

/// Worst numerical failure inside a record.
fn record_status(rec: &MeasureRecord) -> Result<(), Failure> {
    match rec
        .failures
        .iter()
        .find(|f| f.error.is_numerical())
        .or(rec.failures.first())
    {
        None => Ok(()),
        Some(f) => Err(Failure {
            code: exit_code(&f.error),
            message: rec.error_message().unwrap_or_default(),
        }),
    }
}

type Output = (String, Result<(), Failure>);

fn cmd_measure(args: &ModelArgs, opts: &MeasureOptions, format: Format) -> Result<Output, Failure> {
    let model = build_model(args.model, &args.params)?;
    let rec = measure_model(&model, opts)?;
    let status = record_status(&rec);
    let mut table = Table::new(measure_columns(args.model));
    table.push(record_row(args.model, &args.params, &Ok(rec)));
    Ok((render(&table, format), status))
}

/// Exit status of a table of independent rows: fine if any row worked.
fn rows_status(results: &[Result<MeasureRecord, Error>]) -> Result<(), Failure> {
    if results.iter().any(Result::is_ok) {
        return Ok(());
    }
    match results.iter().find_map(|r| r.as_ref().err()) {
        Some(e) => Err(Failure {
            code: exit_code(e),
            message: format!("every row failed; first: {e}"),
        }),
        None => Ok(()),
    }
}

fn cmd_sweep(args: &SweepArgs, opts: &MeasureOptions, exec: Execution, format: Format) -> Result<Output, Failure> {
    let kind = args.model.model;
    let axis = args.axis.as_str();
    let allowed = axis_names(kind);
    if !allowed.contains(&axis) {
        return Err(Failure::usage(format!(
            "{} sweeps along one of {:?}, got {axis:?}",
            model_name(kind),
            allowed
        )));
    }
    if args.count < 1 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    if !(args.start < args.stop) || !args.start.is_finite() || !args.stop.is_finite() {
        return Err(Failure::usage(format!(
            "sweep range needs start < stop, got {} .. {}",
            args.start, args.stop
        )));
    }
    let points: Vec<ParamArgs> = linspace(args.start, args.stop, args.count)
        .into_iter()
        .map(|v| {
            let mut p = args.model.params.clone();
            p.prefer(axis);
            p.set(axis, v);
            p
        })
        .collect();
    let built: Vec<_> = points.iter().map(|p| build_model(kind, p)).collect();
    let valid: Vec<ModelParams> = built.iter().filter_map(|b| b.as_ref().ok().copied()).collect();
    let mut measured = measure_many(&valid, opts, exec).into_iter();
    let results: Vec<Result<MeasureRecord, Error>> = built
        .into_iter()
        .map(|b| match b {
            Ok(_) => measured.next().expect("one result per valid point"),
            Err(e) => Err(e),
        })
        .collect();
    let mut table = Table::new(measure_columns(kind));
    for (p, r) in points.iter().zip(&results) {
        table.push(record_row(kind, p, r));
    }
    Ok((render(&table, format), rows_status(&results)))
}

fn cmd_scatter(args: &ScatterArgs, opts: &MeasureOptions, exec: Execution, format: Format) -> Result<Output, Failure> {
    if args.n < 1 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    for (name, v) in [("--eps4-max", args.eps4_max), ("--eps6-max", args.eps6_max)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Failure::usage(format!("{name} must be >= 0, got {v}")));
        }
    }
    let params = scatter_params(args.n, args.eps4_max, args.eps6_max, args.omega, args.seed)?;
    let models: Vec<ModelParams> = params.into_iter().map(ModelParams::Poly).collect();
    let results = measure_many(&models, opts, exec);
    let mut table = Table::new(measure_columns(ModelKind::Poly));
    for r in &results {
        table.push(record_row(ModelKind::Poly, &ParamArgs::default(), r));
    }
    Ok((render(&table, format), rows_status(&results)))
}

fn cmd_wigner_grid(args: &GridArgs, exec: Execution, format: Format) -> Result<String, Failure> {
    if args.nx < 1 || args.ny < 1 {
        return Err(Failure::usage("grid needs --nx >= 1 and --ny >= 1"));
    }
    let bounds = [args.x_min, args.x_max, args.p_min, args.p_max];
    if bounds.iter().any(|b| !b.is_finite()) || !(args.x_min < args.x_max) || !(args.p_min < args.p_max) {
        return Err(Failure::usage(format!(
            "grid needs finite ranges with min < max, got x {} .. {}, p {} .. {}",
            args.x_min, args.x_max, args.p_min, args.p_max
        )));
    }
    let field = match args.model.model {
        ModelKind::Fock => fock_wigner(&FockState::number(args.level, args.level + 1))?,
        kind => model_wigner(&build_model(kind, &args.model.params)?)?,
    };
    let x = (args.x_min, args.x_max);
    let p = (args.p_min, args.p_max);
    let grid = field.sample_grid(x, args.nx, p, args.ny, exec)?;
    if grid.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Failure {
            code: EXIT_NUMERICAL,
            message: "Wigner function evaluation failed on the grid".into(),
        });
    }
    Ok(match format {
        Format::Csv => {
            let mut out = format!(
                "# {} {} {} {} {} {}\n",
                fmt_num(args.x_min),
                fmt_num(args.x_max),
                args.nx,
                fmt_num(args.p_min),
                fmt_num(args.p_max),
                args.ny
            );
            for row in &grid {
                out.push_str(&row.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" "));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let node = |(lo, hi): (f64, f64), n: usize, i: usize| {
                if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            };
            let mut table = Table::new(["x", "p", "w"]);
            for (j, row) in grid.iter().enumerate() {
                for (i, w) in row.iter().enumerate() {
                    table.push(vec![
                        Cell::Num(node(x, args.nx, i)),
                        Cell::Num(node(p, args.ny, j)),
                        Cell::Num(*w),
                    ]);
                }
            }
            table.to_json()
        }
    })
}

fn cmd_fidelity_map(
    args: &FidelityArgs,
    opts: &MeasureOptions,
    exec: Execution,
    format: Format,
) -> Result<Output, Failure> {
    if args.n4 < 1 || args.n6 < 1 {
        return Err(Failure::usage("--n4 and --n6 must be at least 1"));
    }
    // Validates ω and the corner of the box.
    PolyParams::new(args.omega, args.eps4_max, args.eps6_max)?;
    let cells = fidelity_map(
        &linspace(0.0, args.eps4_max, args.n4),
        &linspace(0.0, args.eps6_max, args.n6),
        args.omega,
        opts.dim_diag,
        exec,
    );
    let mut table = Table::new(["omega", "eps4", "eps6", "fidelity", "error"]);
    for c in &cells {
        table.push(vec![
            Cell::Num(args.omega),
            Cell::Num(c.eps4),
            Cell::Num(c.eps6),
            c.fidelity.into(),
            c.error.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    let status = if cells.iter().any(|c| c.fidelity.is_some()) {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_NUMERICAL,
            message: "every fidelity cell failed".into(),
        })
    };
    Ok((render(&table, format), status))
}
