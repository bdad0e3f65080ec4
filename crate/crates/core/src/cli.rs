//! Command-line driver behind the `sdqc` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::curves::{two_matrix_hull, TwoMatrixHull};
use crate::error::SdqcError;
use crate::hull::{
    circle_point_hull, grid_for, hsdqc, hsdqc_on, slope_report, two_point_hull, CirclePointClass,
    Envelope, HullResult, DEFAULT_GRID, DEFAULT_REL_TOL,
};
use crate::invariants::{phi, SQRT3};
use crate::lamination::{lamination_closure_on, DEFAULT_MAX_ITER};
use crate::membership::{membership_with, MembershipVerdict};
use crate::planar::PlanarSet;
use crate::tensor::SymMatrix;
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sdqc", version, about = "Hulls of isotropic stress sets in the (p, q) plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the hull of a planar set and write CSV/SVG/JSON.
    Hull(HullArgs),
    /// Classify a symmetric matrix against the hull of a planar set.
    Membership(MembershipArgs),
    /// Compare the separation hull with the lamination fixpoint.
    OracleCompare(HullArgs),
    /// Run a periodic-field verification suite.
    Verify(VerifyArgs),
    /// Regenerate one of the built-in constructions.
    Examples(ExampleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Outputs {
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Number of grid nodes across the p-projection.
    #[arg(long, default_value_t = DEFAULT_GRID, value_parser = parse_resolution)]
    pub resolution: usize,
    /// Tolerance relative to the hull diameter.
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub tol: f64,
}

fn parse_resolution(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 16 {
        return Err(format!("resolution must be at least 16, got {n}"));
    }
    Ok(n)
}

#[derive(Args, Debug)]
pub struct HullArgs {
    /// PlanarSet JSON file.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Args, Debug)]
pub struct MembershipArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Matrix literal, rows separated by ';', e.g. "1,0,0;0,0.25,0;0,0,0.25".
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// tartar | det-counterexample | potentials | cone
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// two-point | circle-point-I | circle-point-II | non-cylindrical | two-matrix
    #[arg(long)]
    pub case: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub out: Outputs,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<SdqcError> for CliError {
    fn from(e: SdqcError) -> Self {
        let code = match e {
            SdqcError::EmptySet
            | SdqcError::DegenerateBase(_)
            | SdqcError::DegenerateTangency(_)
            | SdqcError::DomainError(_) => EXIT_DEGENERATE,
            SdqcError::NotConverged { .. } => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError { code: EXIT_USAGE, message: format!("{}: {e}", path.display()) }
}

/// Result of a command: JSON printed on stdout and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

fn write(path: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, contents).map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

fn read_set(path: &Path) -> Result<PlanarSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(PlanarSet::from_json(&text)?)
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn emit(out: &Outputs, hull: &HullResult, title: &str, report: &Value) -> Result<(), CliError> {
    write(&out.out_csv, &hull.region.to_csv())?;
    write(&out.out_svg, &crate::svg::render(hull, title))?;
    write(&out.out_json, &to_json(report))
}

fn hull_report(set: &PlanarSet, hull: &HullResult) -> Result<Value, CliError> {
    let (pmin, pmax) = set.p_range()?;
    let slope = slope_report(&hull.region, &hull.hhat, hull.tol.max(1e-9));
    let mut v = json!({
        "connected": hull.connected,
        "slope_condition": slope.held,
        "worst_slope": slope.worst_slope,
        "pmin": pmin,
        "pmax": pmax,
        "resolution": hull.region.grid.len(),
        "psi_max": hull.region.q_max(),
    });
    if let Some(label) = hull.label() {
        v["label"] = json!(label);
    }
    if let Some(w) = hull.warning() {
        v["warning"] = json!(w);
    }
    Ok(v)
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Hull(a) => cmd_hull(a),
        Command::Membership(a) => cmd_membership(a),
        Command::OracleCompare(a) => cmd_oracle_compare(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Examples(a) => cmd_examples(a),
    }
}

fn cmd_hull(a: HullArgs) -> Result<Outcome, CliError> {
    let set = read_set(&a.input)?;
    let hull = hsdqc(&set, a.grid.resolution, a.grid.tol)?;
    if let Some(w) = hull.warning() {
        eprintln!("warning: {w}");
    }
    let report = hull_report(&set, &hull)?;
    emit(&a.out, &hull, "hull", &report)?;
    Ok(Outcome { report, code: EXIT_OK })
}

fn verdict_json(v: &MembershipVerdict) -> Value {
    serde_json::to_value(v).expect("verdict serializes")
}

fn cmd_membership(a: MembershipArgs) -> Result<Outcome, CliError> {
    let set = read_set(&a.input)?;
    let sigma: SymMatrix = a.matrix.parse()?;
    let hull = hsdqc(&set, a.grid.resolution, a.grid.tol)?;
    let v = membership_with(&sigma, &set, &hull, a.grid.tol)?;
    let report = verdict_json(&v);
    write(&a.out_json, &to_json(&report))?;
    Ok(Outcome { report, code: EXIT_OK })
}

/// Both bounds on one grid; `max_deviation` is compared with two steps of the
/// coarser of the p and q spacings.
pub fn oracle_compare(set: &PlanarSet, n: usize, rel_tol: f64) -> Result<(Value, bool, HullResult), SdqcError> {
    let grid = grid_for(set, n)?;
    let outer = hsdqc_on(set, grid, rel_tol)?;
    let inner = lamination_closure_on(set, grid, DEFAULT_MAX_ITER)?;
    let step = grid.step().max(inner.q_step);
    let dev = outer.region.max_column_deviation(&inner.region);
    let excess = inner.region.excess_over(&outer.region);
    // column deviation blows up on steep boundaries, so agreement is judged
    // by set distance
    let haus = outer.region.hausdorff(&inner.region);
    let ok = !outer.connected || haus <= 2.0 * step;
    let report = json!({
        "connected": outer.connected,
        "hausdorff": haus,
        "max_column_deviation": dev,
        "inner_excess": excess,
        "grid_step": grid.step(),
        "q_step": inner.q_step,
        "distance_in_steps": if step > 0.0 { haus / step } else { 0.0 },
        "sweeps": inner.sweeps,
        "within_tolerance": ok,
    });
    Ok((report, ok, outer))
}

fn cmd_oracle_compare(a: HullArgs) -> Result<Outcome, CliError> {
    let set = read_set(&a.input)?;
    let (report, ok, hull) = oracle_compare(&set, a.grid.resolution, a.grid.tol)?;
    emit(&a.out, &hull, "oracle-compare", &report)?;
    Ok(Outcome { report, code: if ok { EXIT_OK } else { EXIT_FAILED } })
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome, CliError> {
    let suite: Suite = a.suite.parse()?;
    let r = run_suite(suite, a.seed, a.trials)?;
    let report = serde_json::to_value(&r).expect("report serializes");
    write(&a.out_json, &to_json(&report))?;
    Ok(Outcome { report, code: if r.passed { EXIT_OK } else { EXIT_FAILED } })
}

pub const EXAMPLES: [&str; 5] =
    ["two-point", "circle-point-I", "circle-point-II", "non-cylindrical", "two-matrix"];

/// Closed-form vs computed summary of a built-in construction.
pub fn example(case: &str, n: usize, rel_tol: f64) -> Result<(Value, HullResult), CliError> {
    let compare = |closed: &dyn Envelope, hull: &HullResult| {
        let exact = closed.sample(hull.region.grid);
        json!({
            "hausdorff_to_closed_form": hull.region.hausdorff(&exact),
            "max_column_deviation": hull.region.max_column_deviation(&exact),
            "grid_step": hull.region.step(),
        })
    };
    match case {
        "two-point" => {
            let tp = two_point_hull(0.5, 1.0)?;
            let set = tp.set();
            let hull = hsdqc(&set, n, rel_tol)?;
            let mut v = compare(&tp, &hull);
            v["psi_at_zero"] = json!(crate::hull::HullModel::new(&set, rel_tol)?.top(0.0));
            v["closed_form_at_zero"] = json!(tp.top(0.0));
            v["hull"] = hull_report(&set, &hull)?;
            Ok((v, hull))
        }
        "circle-point-I" | "circle-point-II" => {
            let cp = if case == "circle-point-I" {
                circle_point_hull(0.0, 1.0, -3.0, 2.0)?
            } else {
                circle_point_hull(0.0, 1.0, 0.0, 3.0)?
            };
            let set = cp.set();
            let hull = hsdqc(&set, n, rel_tol)?;
            let mut v = compare(&cp, &hull);
            v["class"] = serde_json::to_value(cp.class).expect("class serializes");
            let conv_dev = hull.region.max_column_deviation(&hull.conv);
            v["equals_convex_hull"] = json!(conv_dev <= hull.tol.max(1e-12));
            v["deviation_from_convex_hull"] = json!(conv_dev);
            if let CirclePointClass::RegionI { q0, p_t, .. } = cp.class {
                v["q0_squared"] = json!(q0 * q0);
                v["p_t_on_arc"] = json!(p_t >= cp.pc - cp.r && p_t <= cp.pc + cp.r);
            }
            v["hull"] = hull_report(&set, &hull)?;
            Ok((v, hull))
        }
        "non-cylindrical" => {
            let set = PlanarSet::from_points(&[(0.0, 0.0), (1.0, 0.5 * SQRT3)])?;
            let hull = hsdqc(&set, n, rel_tol)?;
            let sigma = SymMatrix::diag(&[1.0, 0.25, 0.25])?;
            let m = membership_with(&sigma, &set, &hull, rel_tol)?;
            let v = json!({
                "membership": verdict_json(&m),
                "hull": hull_report(&set, &hull)?,
            });
            Ok((v, hull))
        }
        "two-matrix" => {
            let id = SymMatrix::identity(3)?;
            let a = id;
            let b = id.scale(-1.0);
            let TwoMatrixHull::Pair { witness, .. } = two_matrix_hull(&a, &b)? else {
                unreachable!("A - B = 2 Id is invertible")
            };
            let samples: Vec<Value> = [-0.9, -0.5, 0.0, 0.5, 0.9]
                .iter()
                .map(|&t: &f64| {
                    json!({ "t": t, "witness": witness.value(&id.scale(t)), "expected": 3.0 * (1.0 - t * t) })
                })
                .collect();
            let seg = two_matrix_hull(&SymMatrix::diag(&[1.0, 0.0, 0.0])?, &SymMatrix::zeros(3)?)?;
            let seg_rank = match seg {
                TwoMatrixHull::Segment { rank, .. } => Some(rank),
                TwoMatrixHull::Pair { .. } => None,
            };
            let pa = phi(&a);
            let pb = phi(&b);
            let set = PlanarSet::from_points(&[(pa.p, pa.q), (pb.p, pb.q)])?;
            let hull = hsdqc(&set, n, rel_tol)?;
            let v = json!({
                "pair": { "witness_samples": samples, "at_endpoints": [witness.value(&a), witness.value(&b)] },
                "rank_deficient_segment_rank": seg_rank,
            });
            Ok((v, hull))
        }
        _ => Err(CliError {
            code: EXIT_USAGE,
            message: format!("unknown case {case:?}; expected one of {}", EXAMPLES.join(", ")),
        }),
    }
}

fn cmd_examples(a: ExampleArgs) -> Result<Outcome, CliError> {
    let (mut report, hull) = example(&a.case, a.grid.resolution, a.grid.tol)?;
    report["case"] = json!(a.case);
    emit(&a.out, &hull, &a.case, &report)?;
    Ok(Outcome { report, code: EXIT_OK })
}

/// Parses `args`, runs the command and prints the report; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(o) => {
            print!("{}", to_json(&o.report));
            o.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
