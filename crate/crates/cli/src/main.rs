//! `centroaffine`: generate polygons, run the c-relation and recutting
//! dynamics, report integrals and centers, and run the verification suites.
//!
//! Polygon-consuming commands read JSON from `--input` or stdin. Output goes
//! to stdout, or to `--out`; commands producing several files treat `--out`
//! as a directory.

use centroaffine::integrals::{flow_observed, integral_count, integrals_f};
use centroaffine::io::{
    form_to_json, integrals_to_json, parse, polygon_from_json, polygon_to_json, scalar_from_json, scalar_to_json,
    sv_from_json, sv_to_json,
};
use centroaffine::lax::{iterate_c_dynamics, solve_c_related, CSolution};
use centroaffine::polygon::{canonical_frame, closure_defect_norm, reconstruct, sv_coords};
use centroaffine::random::{random_closed, random_twisted, regular_polygon, rng};
use centroaffine::recut::{braid_check, recut, recut_sequence};
use centroaffine::smallgons::{level_curve_samples, pentagon_chart, pentagon_k, pentagon_k_sv};
use centroaffine::symplectic::{casimir, center, ijk};
use centroaffine::verify::{self, grid_csv, pentagon_grid, Fault, VerifyConfig, GRID_C, GRID_K, GRID_SIDES};
use centroaffine::{Error, PolygonData, Rational, Result, SVCoords, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "centroaffine", version, about = "c-relation dynamics on centroaffine polygons")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Scalar backend.
    #[arg(long, value_enum, default_value_t = Backend::Float, global = true)]
    scalar: Backend,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    /// Trials per randomized property.
    #[arg(long, default_value_t = 100, global = true)]
    trials: usize,
    /// Overrides the default tolerance of float checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file, or directory for commands that write several files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Input JSON; stdin when absent or `-`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Backend {
    Rational,
    Float,
}

#[derive(ValueEnum, Clone, Copy)]
enum GenKind {
    Regular,
    RandomClosed,
    RandomTwisted,
    FromSv,
}

#[derive(ValueEnum, Clone, Copy)]
enum FaultArg {
    RecutSign,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a polygon.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Vertex count; ignored by from-sv.
        n: Option<usize>,
    },
    /// All polygons c-related to the input.
    Relate {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Branch-consistent c-orbit with its integrals.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Print the CSV instead of the JSON when writing to stdout.
        #[arg(long)]
        csv: bool,
    },
    /// Full recut, or a sequence of elementary recuts.
    Recut {
        /// Comma-separated vertex indices, applied left to right.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        /// Report the involution, braid and commutation checks instead.
        #[arg(long)]
        check: bool,
    },
    /// Spectral integrals, closure and, for pentagons, K.
    Integrals,
    /// RK4 integration of the odd-n flow, with a drift report.
    Flow {
        #[arg(long = "T", default_value_t = 5.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// CSV row every this many steps.
        #[arg(long, default_value_t = 100)]
        every: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Center, (I, J, K) and the Casimir.
    Center,
    /// Pentagon existence grid and level curves.
    Pentagon {
        #[command(subcommand)]
        what: PentagonCmd,
    },
    /// Run a verification suite; exit status 0 iff every property passes.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Inject a defect to check that the suite catches it.
        #[arg(long, value_enum)]
        fault: Option<FaultArg>,
    },
}

#[derive(Subcommand)]
enum PentagonCmd {
    /// CSV of (c, K) cells: discriminant prediction against the solver.
    Grid {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Option<Vec<f64>>,
        #[arg(long, default_value_t = 50)]
        nc: usize,
        #[arg(long, default_value_t = 50)]
        nk: usize,
    },
    /// CSV of chart points on the level curves of K around a center.
    Level {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        level: Vec<f64>,
        /// Sides; the default is the unit pentagon.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Option<Vec<f64>>,
        /// Chart center `x,y`; the default is the pentagram point of the unit pentagon.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

// ---------------------------------------------------------------- io

fn read_input(g: &Global) -> Result<Value> {
    let mut text = String::new();
    match &g.input {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
    }
    parse(&text)
}

/// A polygon from polygon JSON, or from `(s, v)` JSON in the canonical frame.
fn polygon_of<S: Scalar>(v: &Value) -> Result<PolygonData<S>> {
    if v.get("vertices").is_some() {
        polygon_from_json(v)
    } else if v.get("s").is_some() {
        let sv = sv_from_json::<S>(v)?;
        reconstruct(&sv, canonical_frame(&sv))
    } else {
        Err(Error::Parse("expected a polygon or an (s, v) object".into()))
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn out_dir(path: &Path) -> Result<&Path> {
    std::fs::create_dir_all(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Writes one document to `--out` or stdout.
fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.out {
        Some(p) => write_file(p, text),
        None => stdout(text),
    }
}

/// Prints to stdout; a closed pipe is not an error.
fn stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::InvalidInput(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn f64_text(x: f64) -> String {
    x.to_text()
}

// ---------------------------------------------------------------- commands

fn gen<S: Scalar>(g: &Global, kind: GenKind, n: Option<usize>) -> Result<Value> {
    let need_n = || n.ok_or_else(|| Error::InvalidInput("gen needs a vertex count".into()));
    let p: PolygonData<S> = match kind {
        GenKind::Regular => {
            if S::EXACT {
                return Err(Error::InvalidInput("regular polygons have irrational vertices; use --scalar float".into()));
            }
            let reg = regular_polygon(need_n()?)?;
            polygon_from_json(&polygon_to_json(&reg))?
        }
        GenKind::RandomClosed => random_closed(&mut rng(g.seed), need_n()?)?,
        GenKind::RandomTwisted => random_twisted(&mut rng(g.seed), need_n()?)?,
        GenKind::FromSv => {
            let sv = sv_from_json::<S>(&read_input(g)?)?;
            reconstruct(&sv, canonical_frame(&sv))?
        }
    };
    Ok(polygon_to_json(&p))
}

fn relate<S: Scalar>(g: &Global, c: &str) -> Result<Value> {
    let p: PolygonData<S> = polygon_of(&read_input(g)?)?;
    let c: S = scalar_from_json(&Value::String(c.into()))?;
    Ok(match solve_c_related(&p, &c)? {
        CSolution::AllRelated => json!({"c": scalar_to_json(&c), "all_related": true, "partners": []}),
        CSolution::Pairs(pairs) => json!({
            "c": scalar_to_json(&c),
            "all_related": false,
            "partners": pairs.iter().map(|pr| json!({
                "t": scalar_to_json(&pr.t_root),
                "residual": pr.residual,
                "polygon": polygon_to_json(&pr.q),
            })).collect::<Vec<_>>(),
        }),
    })
}

/// CSV of `step, F_0..F_q` (and `K` for pentagons) along an orbit.
fn integrals_csv<S: Scalar>(rows: &[(String, SVCoords<S>)], head: &str) -> String {
    let n = rows.first().map_or(0, |r| r.1.n());
    let mut out = String::from(head);
    for k in 0..integral_count(n) {
        let _ = write!(out, ",F_{k}");
    }
    if n == 5 {
        out.push_str(",K");
    }
    out.push('\n');
    for (key, sv) in rows {
        out.push_str(key);
        for f in integrals_f(sv).f {
            let _ = write!(out, ",{}", f.to_text());
        }
        if n == 5 {
            let _ = write!(out, ",{}", pentagon_k_sv(sv).to_text());
        }
        out.push('\n');
    }
    out
}

fn orbit<S: Scalar>(g: &Global, c: &str, steps: usize, csv: bool) -> Result<()> {
    let p: PolygonData<S> = polygon_of(&read_input(g)?)?;
    let c: S = scalar_from_json(&Value::String(c.into()))?;
    let orbit = iterate_c_dynamics(&p, &c, steps)?;
    let rows = orbit
        .iter()
        .enumerate()
        .map(|(k, q)| Ok((k.to_string(), sv_coords(q)?)))
        .collect::<Result<Vec<_>>>()?;
    let table = integrals_csv(&rows, "step");
    let doc = pretty(&json!({
        "c": scalar_to_json(&c),
        "steps": steps,
        "orbit": orbit.iter().map(polygon_to_json).collect::<Vec<_>>(),
        "integrals": rows.iter().map(|(_, sv)| integrals_to_json(&integrals_f(sv))).collect::<Vec<_>>(),
    }));
    match &g.out {
        Some(dir) => {
            let dir = out_dir(dir)?;
            write_file(&dir.join("orbit.json"), &doc)?;
            write_file(&dir.join("orbit.csv"), &table)
        }
        None => emit(g, if csv { &table } else { &doc }),
    }
}

fn recut_cmd<S: Scalar>(g: &Global, order: Option<Vec<usize>>, check: bool) -> Result<Value> {
    let p: PolygonData<S> = polygon_of(&read_input(g)?)?;
    if check {
        let report = braid_check(&p, g.tol.unwrap_or(1e-9));
        let mut v = serde_json::to_value(&report).expect("serializable");
        v["all_pass"] = json!(report.all_pass());
        return Ok(v);
    }
    let q = match order {
        Some(order) => {
            if let Some(&j) = order.iter().find(|&&j| j >= p.n()) {
                return Err(Error::InvalidInput(format!("recut index {j} out of range for n={}", p.n())));
            }
            recut_sequence(&p, &order)?
        }
        None => recut(&p)?,
    };
    Ok(polygon_to_json(&q))
}

fn integrals_cmd<S: Scalar>(g: &Global) -> Result<Value> {
    let p: PolygonData<S> = polygon_of(&read_input(g)?)?;
    let sv = sv_coords(&p)?;
    let mut v = json!({
        "n": p.n(),
        "closed": p.closed,
        "sv": sv_to_json(&sv),
        "F": integrals_to_json(&integrals_f(&sv))["F"],
        "monodromy_trace": scalar_to_json(&p.monodromy.trace()),
        "closure_defect": closure_defect_norm(&sv),
    });
    if p.n() == 5 {
        v["K"] = scalar_to_json(&pentagon_k_sv(&sv));
    }
    Ok(v)
}

fn flow_cmd(g: &Global, t_end: f64, dt: f64, every: usize, csv: bool) -> Result<()> {
    let p: PolygonData<f64> = polygon_of(&read_input(g)?)?;
    let sv = sv_coords(&p)?;
    let f0 = integrals_f(&sv);
    let every = every.max(1);
    let mut rows = Vec::new();
    let (mut drift, mut closure, mut count) = (0.0f64, 0.0f64, 0usize);
    let end = flow_observed(&sv, t_end, dt, |t, state| {
        drift = drift.max(integrals_f(state).max_rel_diff(&f0));
        closure = closure.max(closure_defect_norm(state));
        if count % every == 0 {
            rows.push((f64_text(t), state.clone()));
        }
        count += 1;
    })?;
    let table = integrals_csv(&rows, "t");
    let doc = pretty(&json!({
        "T": t_end,
        "dt": dt,
        "steps": count - 1,
        "max_integral_drift": drift,
        "max_closure_defect": closure,
        "initial": integrals_to_json(&f0)["F"],
        "final": sv_to_json(&end),
    }));
    match &g.out {
        Some(dir) => {
            let dir = out_dir(dir)?;
            write_file(&dir.join("flow.json"), &doc)?;
            write_file(&dir.join("flow.csv"), &table)
        }
        None => emit(g, if csv { &table } else { &doc }),
    }
}

fn center_cmd<S: Scalar>(g: &Global) -> Result<Value> {
    let p: PolygonData<S> = polygon_of(&read_input(g)?)?;
    let (i, j, k) = ijk(&p);
    Ok(json!({
        "center": form_to_json(&center(&p)),
        "I": scalar_to_json(&i),
        "J": scalar_to_json(&j),
        "K": scalar_to_json(&k),
        "casimir": scalar_to_json(&casimir(&p)),
    }))
}

fn five(v: Option<Vec<f64>>, default: [f64; 5]) -> Result<[f64; 5]> {
    match v {
        None => Ok(default),
        Some(v) => v.try_into().map_err(|_| Error::InvalidInput("--s takes five sides".into())),
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

fn pentagon_cmd(g: &Global, what: PentagonCmd) -> Result<()> {
    match what {
        PentagonCmd::Grid { s, nc, nk } => {
            let s = five(s, GRID_SIDES)?;
            let cells = pentagon_grid(&s, &linspace(GRID_C.0, GRID_C.1, nc), &linspace(GRID_K.0, GRID_K.1, nk));
            emit(g, &grid_csv(&cells))
        }
        PentagonCmd::Level { level, s, center, samples } => {
            let s = five(s, [1.0; 5])?;
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            let center = match center.as_deref() {
                None => (-phi, -phi),
                Some([x, y]) => (*x, *y),
                Some(_) => return Err(Error::InvalidInput("--center takes x,y".into())),
            };
            let mut out = String::from("level,x,y,K,closure_defect\n");
            for lv in level {
                for ch in level_curve_samples(&s, center, lv, samples) {
                    let defect = closure_defect_norm(&pentagon_chart(&ch)?);
                    let _ = writeln!(out, "{},{},{},{},{:e}", f64_text(lv), f64_text(ch.x), f64_text(ch.y), f64_text(pentagon_k(&ch)), defect);
                }
            }
            emit(g, &out)
        }
    }
}

/// Runs the suite; `Ok(false)` when some property fails.
fn verify_cmd(g: &Global, suite: &str, fault: Option<FaultArg>) -> Result<bool> {
    let artifact_dir = match &g.out {
        Some(dir) => Some(out_dir(dir)?.to_path_buf()),
        None => None,
    };
    let cfg = VerifyConfig {
        seed: g.seed,
        trials: g.trials,
        tol: g.tol,
        artifact_dir: artifact_dir.clone(),
        fault: fault.map(|FaultArg::RecutSign| Fault::RecutSign),
    };
    let report = verify::run_suite(suite, &cfg)?;
    let doc = pretty(&serde_json::to_value(&report).expect("serializable"));
    if let Some(dir) = artifact_dir {
        write_file(&dir.join("report.json"), &doc)?;
    }
    stdout(&doc)?;
    for p in report.properties.iter().filter(|p| !p.passed) {
        eprintln!("FAIL {} (worst residual {:e}, tolerance {:e})", p.name, p.worst_residual, p.tolerance);
    }
    Ok(report.passed)
}

fn json_out(g: &Global, v: Result<Value>) -> Result<()> {
    emit(g, &pretty(&v?))
}

macro_rules! by_backend {
    ($g:expr, $f:ident ( $($arg:expr),* )) => {
        match $g.scalar {
            Backend::Float => $f::<f64>($($arg),*),
            Backend::Rational => $f::<Rational>($($arg),*),
        }
    };
}

fn float_only(g: &Global, what: &str) -> Result<()> {
    if g.scalar == Backend::Rational {
        return Err(Error::InvalidInput(format!("{what} runs on the float backend only")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Gen { kind, n } => json_out(g, by_backend!(g, gen(g, kind, n)))?,
        Cmd::Relate { c } => json_out(g, by_backend!(g, relate(g, &c)))?,
        Cmd::Orbit { c, steps, csv } => by_backend!(g, orbit(g, &c, steps, csv))?,
        Cmd::Recut { order, check } => json_out(g, by_backend!(g, recut_cmd(g, order, check)))?,
        Cmd::Integrals => json_out(g, by_backend!(g, integrals_cmd(g)))?,
        Cmd::Flow { t_end, dt, every, csv } => {
            float_only(g, "flow")?;
            flow_cmd(g, t_end, dt, every, csv)?
        }
        Cmd::Center => json_out(g, by_backend!(g, center_cmd(g)))?,
        Cmd::Pentagon { what } => {
            float_only(g, "pentagon")?;
            pentagon_cmd(g, what)?
        }
        Cmd::Verify { suite, fault } => return verify_cmd(g, &suite, fault),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}
