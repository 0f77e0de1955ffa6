//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error,
//! 3 a verification check outside tolerance.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::dynamics::{path_integral_center, propagator_exact, propagator_trotter, CatMapSpec};
use crate::error::Error;
use crate::io::{
    cat_map_from_json, grid_to_csv, grid_to_json, hamiltonian_from_json, operator_from_json,
    operator_to_json, state_from_json, symbol_from_text, symbol_to_csv, symbol_to_json, to_pgm,
    AnySymbol, EvolutionJob, EvolveMode, PgmSidecar, SymbolKind,
};
use crate::lattice::TorusSpace;
use crate::operators::TorusOperator;
use crate::products::{center_product_multi, chord_product_multi, qps_product_multi};
use crate::projection::quantize_hamiltonian;
use crate::symbols::{
    center_symbol, chord_symbol, operator_from_center, operator_from_chord, operator_from_qps,
    qps_symbol, wigner, CenterSymbol,
};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "torus-weyl", version, about = "Chord and center symbols on the quantum torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    /// Hilbert space dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Boundary phase χ_p, in turns.
    #[arg(long)]
    chi_p: Option<f64>,
    /// Boundary phase χ_q, in turns.
    #[arg(long)]
    chi_q: Option<f64>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pgm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Cocycle,
    Traces,
    Symbols,
    Products,
    Feline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Trotter,
    Path,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Chord,
    Center,
    #[value(name = "center_qps")]
    CenterQps,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wigner function of a state on the extended 2N x 2N grid.
    Wigner {
        #[command(flatten)]
        space: SpaceArgs,
        /// State JSON: {"re": [...], "im": [...]}.
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite and print one line per check.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Cat map JSON for the feline suite; B = I when omitted.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = crate::products::DEFAULT_TERM_BUDGET)]
        budget: f64,
        /// Replace every check's tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagator of a quantized Hamiltonian.
    Evolve {
        #[command(flatten)]
        space: SpaceArgs,
        /// Evolution job or Hamiltonian JSON.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = crate::products::DEFAULT_TERM_BUDGET)]
        budget: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Symbol of the operator product of two or more symbols.
    Product {
        #[command(flatten)]
        space: SpaceArgs,
        /// Symbol files, leftmost factor first; repeat the flag.
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = crate::products::DEFAULT_TERM_BUDGET)]
        budget: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Symbol of an operator, or the operator of a symbol.
    Symbol {
        #[command(flatten)]
        space: SpaceArgs,
        /// Operator JSON, or a symbol in JSON or CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Symbol to compute from an operator.
        #[arg(long, value_enum, default_value_t = Kind::Center)]
        kind: Kind,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Why a command failed, with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
    Tolerance(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(e) if e.is_parse() || matches!(e, Error::RequiresOddN(_)) => 1,
            Failure::Lib(_) => 2,
            Failure::Tolerance(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Tolerance(m) => f.write_str(m),
            Failure::Lib(e) => e.fmt(f),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn main() -> ExitCode {
    match run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(Failure::Usage(e.render().to_string().trim_end().to_owned())),
    };
    match cli.command {
        Command::Wigner { space, input, out } => cmd_wigner(&space, &input, &out),
        Command::Verify { space, suite, input, seed, budget, tol, out } => {
            cmd_verify(&space, suite, input.as_deref(), seed, budget, tol, out.as_deref())
        }
        Command::Evolve { space, input, t, steps, mode, budget, out } => {
            cmd_evolve(&space, &input, t, steps, mode, budget, &out)
        }
        Command::Product { space, inputs, budget, out } => cmd_product(&space, &inputs, budget, &out),
        Command::Symbol { space, input, kind, out } => cmd_symbol(&space, &input, kind, &out),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(e).into()),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io(e).into()),
    }
}

impl SpaceArgs {
    /// Space from the flags alone; `--n` is required.
    fn space(&self) -> std::result::Result<TorusSpace, Failure> {
        let n = self.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
        Ok(TorusSpace::new(n, self.chi_p.unwrap_or(0.0), self.chi_q.unwrap_or(0.0))?)
    }

    /// Flags that were given must agree with the space read from a file.
    fn check(&self, space: &TorusSpace) -> Outcome {
        let given = [
            self.n.map(|n| n != space.n()),
            self.chi_p.map(|c| c != space.chi_p()),
            self.chi_q.map(|c| c != space.chi_q()),
        ];
        if given.contains(&Some(true)) {
            return Err(Error::SpaceMismatch(format!(
                "input has N = {}, chi = ({}, {})",
                space.n(),
                space.chi_p(),
                space.chi_q()
            ))
            .into());
        }
        Ok(())
    }
}

fn cmd_wigner(args: &SpaceArgs, input: &Path, out: &OutArgs) -> Outcome {
    let text = read(input)?;
    let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let file_n = v.get("n").and_then(Value::as_u64).map(|n| n as usize);
    let len = v.get("re").and_then(Value::as_array).map(Vec::len);
    let n = args.n.or(file_n).or(len).ok_or_else(|| Failure::Usage("cannot tell N".into()))?;
    let chi = |flag: Option<f64>, k: usize| {
        flag.or_else(|| v.get("chi").and_then(|c| c.get(k)).and_then(Value::as_f64)).unwrap_or(0.0)
    };
    let space = TorusSpace::new(n, chi(args.chi_p, 0), chi(args.chi_q, 1))?;
    let w = wigner(&state_from_json(&text, &space)?)?;
    let grid = w.extended_grid();
    match out.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(out.out.as_deref(), grid_to_csv(SymbolKind::Center, &space, &grid).as_bytes()),
        Format::Json => emit(out.out.as_deref(), grid_to_json(SymbolKind::Center, &space, &grid)?.as_bytes()),
        Format::Pgm => {
            let path = out.out.as_deref().ok_or_else(|| Failure::Usage("--format pgm needs --out".into()))?;
            let (bytes, min, max) = to_pgm(&grid.map(|z| z.re));
            emit(Some(path), &bytes)?;
            let sidecar = PgmSidecar {
                width: grid.ncols(),
                height: grid.nrows(),
                component: "re".into(),
                min,
                max,
                normalization: w.trace().re,
            };
            let json = serde_json::to_string_pretty(&sidecar).map_err(Error::from)?;
            emit(Some(&sidecar_path(path)), json.as_bytes())
        }
    }
}

/// `image.pgm` gets `image.pgm.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn cmd_verify(
    args: &SpaceArgs,
    suite: Suite,
    input: Option<&Path>,
    seed: u64,
    budget: f64,
    tol: Option<f64>,
    out: Option<&Path>,
) -> Outcome {
    let space = args.space()?;
    let opts = verify::Options { seed, budget, ..verify::Options::default() };
    let mut report = match suite {
        Suite::Cocycle => verify::cocycle(&space),
        Suite::Traces => verify::traces(&space),
        Suite::Symbols => verify::symbols(&space, &opts)?,
        Suite::Products => verify::products(&space, &opts)?,
        Suite::Feline => {
            let spec = match input {
                Some(p) => cat_map_from_json(&read(p)?)?,
                None => CatMapSpec::from_cayley([[1, 0], [0, 1]])?,
            };
            verify::feline(&space, &spec, &opts)?
        }
    };
    if let Some(tol) = tol {
        report.set_tolerance(tol);
    }
    emit(out, report.to_string().as_bytes())?;
    match report.failures().count() {
        0 => Ok(()),
        k => Err(Failure::Tolerance(format!("{k} check(s) outside tolerance"))),
    }
}

fn cmd_evolve(
    args: &SpaceArgs,
    input: &Path,
    t: Option<f64>,
    steps: Option<usize>,
    mode: Option<Mode>,
    budget: f64,
    out: &OutArgs,
) -> Outcome {
    let text = read(input)?;
    let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let (h, job_t, job_steps, job_mode) = if v.get("terms").is_some() {
        (hamiltonian_from_json(&text)?, None, None, None)
    } else {
        let job = EvolutionJob::from_json(&text, input.parent())?;
        let h = hamiltonian_from_json(&read(&job.hamiltonian)?)?;
        (h, Some(job.t), Some(job.m_steps), Some(job.mode))
    };
    let t = t.or(job_t).ok_or_else(|| Failure::Usage("--t is required".into()))?;
    let steps = steps.or(job_steps).unwrap_or(1);
    let mode = match mode {
        Some(Mode::Exact) => EvolveMode::Exact,
        Some(Mode::Trotter) => EvolveMode::Trotter,
        Some(Mode::Path) => EvolveMode::Path,
        None => job_mode.unwrap_or(EvolveMode::Exact),
    };
    let space = args.space()?;
    let hop = quantize_hamiltonian(&space, &h);
    let result = match mode {
        EvolveMode::Exact => Evolved::Operator(propagator_exact(&hop, t)?),
        EvolveMode::Trotter => Evolved::Operator(propagator_trotter(&hop, t, steps)?),
        EvolveMode::Path => Evolved::Symbol(path_integral_center(&center_symbol(&hop), t, steps, budget)?),
    };
    match (out.format.unwrap_or(Format::Json), result) {
        (Format::Json, Evolved::Operator(u)) => emit(out.out.as_deref(), operator_to_json(&u)?.as_bytes()),
        (Format::Csv, Evolved::Operator(u)) => {
            emit(out.out.as_deref(), symbol_to_csv(&AnySymbol::Center(center_symbol(&u))).as_bytes())
        }
        (_, Evolved::Symbol(s)) => write_symbol(&AnySymbol::Center(s), out),
        (Format::Pgm, _) => Err(Failure::Usage("pgm output is only available for wigner".into())),
    }
}

enum Evolved {
    Operator(TorusOperator),
    Symbol(CenterSymbol),
}

fn write_symbol(sym: &AnySymbol, out: &OutArgs) -> Outcome {
    match out.format.unwrap_or(Format::Json) {
        Format::Json => emit(out.out.as_deref(), symbol_to_json(sym)?.as_bytes()),
        Format::Csv => emit(out.out.as_deref(), symbol_to_csv(sym).as_bytes()),
        Format::Pgm => Err(Failure::Usage("pgm output is only available for wigner".into())),
    }
}

fn cmd_product(args: &SpaceArgs, inputs: &[PathBuf], budget: f64, out: &OutArgs) -> Outcome {
    if inputs.len() < 2 {
        return Err(Failure::Usage("product needs at least two --in files".into()));
    }
    let syms = inputs
        .iter()
        .map(|p| Ok(symbol_from_text(&read(p)?)?))
        .collect::<std::result::Result<Vec<_>, Failure>>()?;
    args.check(syms[0].space())?;
    let kind = syms[0].kind();
    if syms.iter().any(|s| s.kind() != kind) {
        return Err(Error::Domain("all factors must be the same kind of symbol".into()).into());
    }
    let product = match kind {
        SymbolKind::Chord => {
            let v: Vec<_> = syms.into_iter().filter_map(|s| match s { AnySymbol::Chord(c) => Some(c), _ => None }).collect();
            AnySymbol::Chord(chord_product_multi(&v, budget)?)
        }
        SymbolKind::Center => {
            let v: Vec<_> = syms.into_iter().filter_map(|s| match s { AnySymbol::Center(c) => Some(c), _ => None }).collect();
            AnySymbol::Center(center_product_multi(&v, budget)?)
        }
        SymbolKind::CenterQps => {
            let v: Vec<_> = syms.into_iter().filter_map(|s| match s { AnySymbol::CenterQps(c) => Some(c), _ => None }).collect();
            AnySymbol::CenterQps(qps_product_multi(&v, budget)?)
        }
    };
    write_symbol(&product, out)
}

fn cmd_symbol(args: &SpaceArgs, input: &Path, kind: Kind, out: &OutArgs) -> Outcome {
    let text = read(input)?;
    let is_operator = serde_json::from_str::<Value>(&text)
        .map(|v| v.get("kind").is_none())
        .unwrap_or(false);
    if is_operator {
        let op = operator_from_json(&text)?;
        args.check(op.space())?;
        let sym = match kind {
            Kind::Chord => AnySymbol::Chord(chord_symbol(&op)),
            Kind::Center => AnySymbol::Center(center_symbol(&op)),
            Kind::CenterQps => AnySymbol::CenterQps(qps_symbol(&op)?),
        };
        return write_symbol(&sym, out);
    }
    let sym = symbol_from_text(&text)?;
    args.check(sym.space())?;
    let op: TorusOperator = match &sym {
        AnySymbol::Chord(s) => operator_from_chord(s),
        AnySymbol::Center(s) => operator_from_center(s),
        AnySymbol::CenterQps(s) => operator_from_qps(s),
    };
    match out.format.unwrap_or(Format::Json) {
        Format::Json => emit(out.out.as_deref(), operator_to_json(&op)?.as_bytes()),
        _ => Err(Failure::Usage("operators are written as JSON only".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> u8 {
        let mut full = vec!["torus-weyl"];
        full.extend_from_slice(args);
        run(full).err().map_or(0, |f| f.exit_code())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(code(&["verify", "--suite", "traces", "--n", "3"]), 0);
        assert_eq!(code(&["verify", "--suite", "feline", "--n", "4"]), 1);
        assert_eq!(code(&["verify", "--suite", "nope", "--n", "3"]), 1);
        assert_eq!(code(&["verify", "--suite", "traces"]), 1);
        assert_eq!(code(&["verify", "--suite", "traces", "--n", "0"]), 2);
        assert_eq!(code(&["bogus"]), 1);
        assert_eq!(code(&["verify", "--suite", "traces", "--n", "3", "--tol=-1"]), 3);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/w.pgm")), PathBuf::from("out/w.pgm.json"));
    }
}
