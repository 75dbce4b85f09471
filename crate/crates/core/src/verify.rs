//! Seeded property suites.
//!
//! Each property draws its own per-trial generator from the suite seed, so
//! trials run in parallel and the report is fixed by `(seed, trials)`.
//! Properties carry the number of the acceptance criterion they serve.
//! Exact properties compare rationals with `==`. Float properties use
//! their default tolerance unless [`VerifyConfig::tol`] overrides it.

use crate::error::{Error, Result};
use crate::geom::{bracket, Mat2, Vec2};
use crate::integrals::{
    conjugacy_invariant, closed_relations_defect, dressing_rhs, dressing_state, flow_observed, generating_poly,
    integral_count, integrals_f, lax_trace_poly, xi_field, DRESSING_SCALE,
};
use crate::io::{polygon_to_json, sv_to_json};
use crate::lax::{
    bianchi_complete, c_relation_residual, c_step, classify_butterfly_tol, embed_parameter, iterate_c_dynamics,
    iterate_moduli, reflection_chain, reflection_composite, solve_c_related, step_matrix, ButterflyClass,
    CRelatedPair, CSolution,
};
use crate::polygon::{
    closure_defect, closure_defect_norm, is_closed_sv, monodromy, monodromy_via_continuants, reconstruct, sv_coords,
    PolygonData, SVCoords,
};
use crate::random::{
    nonzero_ratio, random_closed, random_positive_closed, random_sl2, random_star_pentagon, random_sv, random_twisted,
    small_ratio, trial_rng, uniform, Rng64,
};
use crate::recut::{braid_check_with, elementary_recut, recut, recut_commutes_with_c, recut_differential};
use crate::scalar::{rel_diff, Rational, Scalar};
use crate::smallgons::{
    cond4, detect_period, level_curve_samples, pentagon_chart, pentagon_discriminant, pentagon_flow_check,
    pentagon_k_sv, pentagon_point_with_k, pentagon_solver_exists, quad_conic_product, quad_conics,
    quad_partner_quadratic, triangle_analysis, triangle_identity_check, tune_c_for_period, PentagonChart,
};
use crate::symplectic::{
    casimir, center, center_of_vertices, circumconic, d_ijk, diagonal_cut, displace, ijk, omega, omega_raw,
    sl2_fields, stratum_tangent_basis, TangentVector,
};
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const SUITES: [&str; 7] = ["core", "lax", "integrals", "recutting", "symplectic", "smallgons", "all"];

/// A deliberate defect for mutation testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the `P_{j+1}` term in the elementary recut.
    RecutSign,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol: Option<f64>,
    /// Where suites write side artifacts such as the pentagon grid.
    pub artifact_dir: Option<PathBuf>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42, trials: 100, tol: None, artifact_dir: None, fault: None }
    }
}

impl VerifyConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub criterion: Option<u8>,
    pub passed: bool,
    pub trials: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub worst_residual: f64,
    /// Inputs of the first failing trial.
    pub witness: Option<Value>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }

    /// Properties serving acceptance criterion `k`.
    pub fn criterion(&self, k: u8) -> impl Iterator<Item = &PropertyReport> {
        self.properties.iter().filter(move |p| p.criterion == Some(k))
    }
}

/// Result of one trial.
enum Outcome {
    Pass(f64),
    Fail(f64, Value),
    Skip,
}

fn check(residual: f64, tol: f64, witness: impl FnOnce() -> Value) -> Outcome {
    if residual <= tol {
        Outcome::Pass(residual)
    } else {
        Outcome::Fail(residual, witness())
    }
}

/// FNV-1a, to give each property an independent stream family.
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

struct Spec<'a> {
    name: &'a str,
    criterion: Option<u8>,
    trials: usize,
    tol: f64,
    note: &'a str,
}

fn run<F>(cfg: &VerifyConfig, spec: Spec, trial: F) -> PropertyReport
where
    F: Fn(&mut Rng64, usize) -> Result<Outcome> + Sync,
{
    let base = cfg.seed ^ name_hash(spec.name);
    let mut outcomes: Vec<(usize, Outcome)> = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let out = trial(&mut trial_rng(base, i as u64), i).unwrap_or_else(|e| {
                Outcome::Fail(f64::INFINITY, json!({"error": e.code(), "message": e.to_string()}))
            });
            (i, out)
        })
        .collect();
    outcomes.sort_by_key(|(i, _)| *i);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    let mut witness = None;
    for (i, out) in outcomes {
        match out {
            Outcome::Pass(r) => worst = worst.max(r),
            Outcome::Skip => skipped += 1,
            Outcome::Fail(r, w) => {
                worst = worst.max(r);
                if witness.is_none() {
                    witness = Some(json!({"trial": i, "residual": r, "input": w}));
                }
            }
        }
    }
    let ran = spec.trials - skipped;
    let passed = witness.is_none() && ran > 0;
    let mut note = spec.note.to_string();
    if ran == 0 {
        note = format!("every trial skipped; {note}");
    }
    PropertyReport {
        name: spec.name.to_string(),
        criterion: spec.criterion,
        passed,
        trials: spec.trials,
        skipped,
        tolerance: spec.tol,
        worst_residual: worst,
        witness,
        note,
    }
}

/// Runs a named suite; `all` concatenates the six module suites.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let properties = match name {
        "core" => core_suite(cfg),
        "lax" => lax_suite(cfg),
        "integrals" => integrals_suite(cfg),
        "recutting" => recutting_suite(cfg),
        "symplectic" => symplectic_suite(cfg),
        "smallgons" => smallgons_suite(cfg)?,
        "all" => {
            let mut all = core_suite(cfg);
            all.extend(lax_suite(cfg));
            all.extend(integrals_suite(cfg));
            all.extend(recutting_suite(cfg));
            all.extend(symplectic_suite(cfg));
            all.extend(smallgons_suite(cfg)?);
            all
        }
        other => return Err(Error::InvalidInput(format!("unknown suite \"{other}\"; expected one of {SUITES:?}"))),
    };
    let passed = properties.iter().all(|p| p.passed);
    Ok(SuiteReport { suite: name.to_string(), seed: cfg.seed, trials: cfg.trials, passed, properties })
}

// ---------------------------------------------------------------- helpers

fn gap<S: Scalar>(a: &S, b: &S) -> f64 {
    if a == b {
        0.0
    } else {
        (a.clone() - b.clone()).to_f64().abs().max(f64::MIN_POSITIVE)
    }
}

fn gaps<'a, S: Scalar + 'a>(pairs: impl IntoIterator<Item = (&'a S, &'a S)>) -> f64 {
    pairs.into_iter().map(|(a, b)| gap(a, b)).fold(0.0, f64::max)
}

fn mat_gap<S: Scalar>(a: &Mat2<S>, b: &Mat2<S>) -> f64 {
    gaps([(&a.a, &b.a), (&a.b, &b.b), (&a.c, &b.c), (&a.d, &b.d)])
}

fn sv_gap<S: Scalar>(a: &SVCoords<S>, b: &SVCoords<S>) -> f64 {
    if a.n() != b.n() {
        return f64::INFINITY;
    }
    gaps(a.s.iter().zip(&b.s)).max(gaps(a.v.iter().zip(&b.v)))
}

fn vertex_gap<S: Scalar>(a: &[Vec2<S>], b: &[Vec2<S>]) -> f64 {
    a.iter().zip(b).map(|(p, q)| gap(&p.x, &q.x).max(gap(&p.y, &q.y))).fold(0.0, f64::max)
}

fn point<S: Scalar>(r: &mut Rng64) -> Vec2<S> {
    Vec2::new(small_ratio(r, 9, 4), small_ratio(r, 9, 4))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn is_degenerate(e: &Error) -> bool {
    matches!(
        e,
        Error::DegeneratePolygon { .. }
            | Error::DegenerateDiagonal { .. }
            | Error::CollinearPair
            | Error::SingularSystem
            | Error::SingularCompletion { .. }
            | Error::ChartSingular
            | Error::DegenerateQuad
            | Error::FitSingular
            | Error::NoRealPartner { .. }
            | Error::BranchLost { .. }
            | Error::ExhaustedRejection { .. }
    )
}

/// Turns degenerate-input errors into skips.
fn skip_degenerate(out: Result<Outcome>) -> Result<Outcome> {
    match out {
        Err(e) if is_degenerate(&e) => Ok(Outcome::Skip),
        other => other,
    }
}

/// A positive closed float polygon with a real c-partner, redrawing `c` and the polygon.
fn draw_pair(r: &mut Rng64, n: usize) -> Result<CRelatedPair<f64>> {
    for _ in 0..200 {
        let p: PolygonData<f64> = random_positive_closed(r, n)?;
        let smax = sv_coords(&p)?.s.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let c = uniform(r, 0.05, 1.5) * smax;
        if let Ok(CSolution::Pairs(pairs)) = solve_c_related(&p, &c) {
            if let Some(pr) = pairs.into_iter().next() {
                return Ok(pr);
            }
        }
    }
    Err(Error::ExhaustedRejection { attempts: 200 })
}

/// Spectral samples with every factor `|lambda^2/s^2 - 1| >= 0.1`, away from the poles of tr^2/det.
fn lambdas(r: &mut Rng64, sv: &SVCoords<f64>, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let lam = uniform(r, 0.2, 3.0) * if r.gen::<bool>() { 1.0 } else { -1.0 };
        if sv.s.iter().all(|s| (lam * lam / (s * s) - 1.0).abs() >= 0.1) {
            out.push(lam);
        }
    }
    out
}

fn pair_json(pr: &CRelatedPair<f64>) -> Value {
    json!({"p": polygon_to_json(&pr.p), "q": polygon_to_json(&pr.q), "c": pr.c})
}

// ---------------------------------------------------------------- core

fn core_suite(cfg: &VerifyConfig) -> Vec<PropertyReport> {
    let t = cfg.trials;
    vec![
        run(
            cfg,
            Spec {
                name: "core.monodromy_continuants",
                criterion: Some(1),
                trials: 6 * t,
                tol: 0.0,
                note: "twisted rational polygons, n = 3..8 cycling",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_twisted(r, 3 + i % 6)?;
                let sv = sv_coords(&p)?;
                let m = monodromy(&sv);
                let res = mat_gap(&m, &monodromy_via_continuants(&sv)).max(gap(&m.trace(), &p.monodromy.trace()));
                Ok(check(res, 0.0, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec { name: "core.reconstruct_round_trip", criterion: None, trials: t, tol: 0.0, note: "n = 3..8" },
            |r, i| {
                let p: PolygonData<Rational> = random_twisted(r, 3 + i % 6)?;
                let sv = sv_coords(&p)?;
                let back = reconstruct(&sv, (p.vertices[0].clone(), p.vertices[1].clone()))?;
                let res = vertex_gap(&back.vertices, &p.vertices).max(mat_gap(&back.monodromy, &p.monodromy));
                Ok(check(res, 0.0, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec { name: "core.sl2_invariance", criterion: None, trials: t, tol: 0.0, note: "sv of M P equals sv of P" },
            |r, i| {
                let p: PolygonData<Rational> = random_twisted(r, 3 + i % 6)?;
                let g = random_sl2(r);
                let q = p.transform(&g);
                let res = sv_gap(&sv_coords(&p)?, &sv_coords(&q)?).max(gap(&p.monodromy.trace(), &q.monodromy.trace()));
                Ok(check(res, 0.0, || json!({"polygon": polygon_to_json(&p)})))
            },
        ),
        run(
            cfg,
            Spec {
                name: "core.closure_detection",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "closed polygons have zero defect; nontrivial monodromy is not closed",
            },
            |r, i| {
                let n = 3 + i % 6;
                let p: PolygonData<Rational> = random_closed(r, n)?;
                let sv = sv_coords(&p)?;
                let mut res = closure_defect_norm(&sv);
                if !is_closed_sv(&sv) {
                    res = res.max(1.0);
                }
                let tw: PolygonData<Rational> = random_twisted(r, n)?;
                if !tw.monodromy.is_identity(0.0) && is_closed_sv(&sv_coords(&tw)?) {
                    res = res.max(1.0);
                }
                Ok(check(res, 0.0, || json!({"closed": polygon_to_json(&p), "twisted": polygon_to_json(&tw)})))
            },
        ),
    ]
}

// ---------------------------------------------------------------- lax

fn lax_suite(cfg: &VerifyConfig) -> Vec<PropertyReport> {
    let t = cfg.trials;
    let tol_bracket = cfg.tol(1e-9);
    let tol_cons = cfg.tol(1e-8);
    let tol_bianchi = cfg.tol(1e-8);
    vec![
        run(
            cfg,
            Spec { name: "lax.c_step_brackets", criterion: None, trials: 10 * t, tol: 0.0, note: "exact rationals" },
            |r, _| {
                let (qi, pi, pn): (Vec2<Rational>, Vec2<Rational>, Vec2<Rational>) = (point(r), point(r), point(r));
                let c = bracket(&pi, &qi);
                if c.is_zero() {
                    return Ok(Outcome::Skip);
                }
                skip_degenerate((|| {
                    let qn = c_step(&qi, &pi, &pn, &c)?;
                    let res = gap(&bracket(&pn, &qn), &c).max(gap(&bracket(&qi, &qn), &bracket(&pi, &pn)));
                    Ok(check(res, 0.0, || json!({"q_i": [qi.x.to_string(), qi.y.to_string()], "c": c.to_string()})))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "lax.step_matrix_vs_c_step",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "the line-parameter action re-embedded equals the vector step",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_twisted(r, 3 + i % 4)?;
                let sv = sv_coords(&p)?;
                let c: Rational = nonzero_ratio(r, 5, 3);
                let tpar: Rational = small_ratio(r, 5, 3);
                let k = (i % p.n()) as i64;
                let q = embed_parameter(&p, k, &c, &tpar);
                let Some(t2) = step_matrix(&sv, k, &c).apply(&tpar) else { return Ok(Outcome::Skip) };
                skip_degenerate((|| {
                    let direct = c_step(&q, &p.vertex(k), &p.vertex(k + 1), &c)?;
                    let via = embed_parameter(&p, k + 1, &c, &t2);
                    let res = vertex_gap(&[direct], &[via]);
                    Ok(check(res, 0.0, || polygon_to_json(&p)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "lax.partner_conservation",
                criterion: Some(3),
                trials: t,
                tol: tol_cons,
                note: "positive closed floats, n = 3..6; F_k and tr^2/det at 10 lambda, plus defining brackets",
            },
            move |r, i| {
                let pr = draw_pair(r, 3 + i % 4)?;
                let (sp, sq) = (sv_coords(&pr.p)?, sv_coords(&pr.q)?);
                let mut res = integrals_f(&sp).max_rel_diff(&integrals_f(&sq));
                for lam in lambdas(r, &sp, 10) {
                    let (a, b) = (conjugacy_invariant(&sp, &lam)?, conjugacy_invariant(&sq, &lam)?);
                    res = res.max(rel_diff(a, b));
                }
                let bracket_ok = pr.residual <= tol_bracket;
                let res = if bracket_ok { res } else { res.max(f64::INFINITY) };
                Ok(check(res, tol_cons, || json!({"pair": pair_json(&pr), "bracket_residual": pr.residual})))
            },
        ),
        run(
            cfg,
            Spec {
                name: "lax.partner_involutivity",
                criterion: None,
                trials: t,
                tol: cfg.tol(1e-7),
                note: "the partners of Q include P or -P",
            },
            |r, i| {
                let pr = draw_pair(r, 3 + i % 4)?;
                let back = solve_c_related(&pr.q, &pr.c)?;
                let best = back
                    .pairs()
                    .iter()
                    .map(|b| b.q.max_vertex_diff(&pr.p).min(b.q.max_vertex_diff(&pr.p.negated())))
                    .fold(f64::INFINITY, f64::min);
                let res = if back.is_all_related() { 0.0 } else { best };
                Ok(check(res, cfg.tol(1e-7), || pair_json(&pr)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "lax.bianchi",
                criterion: Some(4),
                trials: (t / 2).max(1),
                tol: tol_bianchi,
                note: "q ~d S, r ~c S and butterfly quadrilaterals (P_i, Q_i, S_i, R_i)",
            },
            move |r, i| {
                let n = 3 + i % 4;
                for _ in 0..50 {
                    let pc = draw_pair(r, n)?;
                    let p = pc.p.clone();
                    let smax = sv_coords(&p)?.s.iter().fold(0.0f64, |m, s| m.max(s.abs()));
                    let d = uniform(r, 0.05, 1.5) * smax;
                    let Ok(CSolution::Pairs(pd)) = solve_c_related(&p, &d) else { continue };
                    let Some(pd) = pd.into_iter().next() else { continue };
                    let (q, rr) = (&pc.q, &pd.q);
                    let s = match bianchi_complete(&p, q, rr, &pc.c, &d) {
                        Ok(s) => s,
                        Err(e) if is_degenerate(&e) => continue,
                        Err(e) => return Err(e),
                    };
                    let scale = pc.c.abs().max(d.abs()).max(1.0);
                    let mut res = c_relation_residual(q, &s, &d).max(c_relation_residual(rr, &s, &pc.c)) / scale;
                    for k in 0..n {
                        let quad = [p.vertices[k].clone(), q.vertices[k].clone(), s.vertices[k].clone(), rr.vertices[k].clone()];
                        if classify_butterfly_tol(&quad, 1e-8) != ButterflyClass::Butterfly {
                            res = f64::INFINITY;
                        }
                    }
                    let witness = || json!({"p": polygon_to_json(&p), "c": pc.c, "d": d});
                    return Ok(check(res, tol_bianchi, witness));
                }
                Ok(Outcome::Skip)
            },
        ),
        run(
            cfg,
            Spec {
                name: "lax.reflection_chain",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "odd n in {3,5,7}: the chain pair is c-related for c = [P_0,Q_0], and R^2 = Id",
            },
            |r, i| {
                let n = [3, 5, 7][i % 3];
                let a: PolygonData<Rational> = random_closed(r, n)?;
                let start: Vec2<Rational> = point(r);
                skip_degenerate((|| {
                    let (p, q) = reflection_chain(&a, &start)?;
                    let c = bracket(&p.vertices[0], &q.vertices[0]);
                    let composite = reflection_composite(&a)?;
                    let res = c_relation_residual(&p, &q, &c).to_f64().abs()
                        + mat_gap(&composite.mul(&composite), &Mat2::identity());
                    Ok(check(res, 0.0, || polygon_to_json(&a)))
                })())
            },
        ),
    ]
}

// ---------------------------------------------------------------- integrals

/// `tr` of the canonical monodromy equals `(prod s) F_0`.
fn top_integral<S: Scalar>(sv: &SVCoords<S>) -> S {
    let prod = sv.s.iter().fold(S::one(), |acc, s| acc * s.clone());
    prod * integrals_f(sv).f[0].clone()
}

/// `v + h xi` at fixed `s`.
fn shift_v(sv: &SVCoords<Rational>, xi: &[Rational], h: i64) -> SVCoords<Rational> {
    let h = Rational::from_i64(h);
    SVCoords { s: sv.s.clone(), v: sv.v.iter().zip(xi).map(|(v, x)| v.clone() + x.clone() * h.clone()).collect() }
}

/// The derivative at 0 of a polynomial of degree at most `2m`, exact from its values at `-m..=m`.
fn stencil_derivative(f: impl Fn(i64) -> Rational, m: i64) -> Rational {
    let fact = |k: i64| (1..=k).fold(Rational::from_i64(1), |a, j| a * Rational::from_i64(j));
    (1..=m).fold(Rational::zero(), |acc, j| {
        let w = fact(m) * fact(m) / (Rational::from_i64(j) * fact(m - j) * fact(m + j));
        let term = w * (f(j) - f(-j));
        if j % 2 == 1 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn integrals_suite(cfg: &VerifyConfig) -> Vec<PropertyReport> {
    let t = cfg.trials;
    let tol_rel = cfg.tol(1e-8);
    let tol_df0 = cfg.tol(1e-6);
    let tol_drift = cfg.tol(1e-7);
    vec![
        run(
            cfg,
            Spec {
                name: "integrals.trace_oracle",
                criterion: Some(2),
                trials: 5 * t,
                tol: 0.0,
                note: "rational sv, n = 3..7: trace coefficient of lambda^(n-2k) is F_k, odd-parity degrees vanish",
            },
            |r, i| {
                let n = 3 + i % 5;
                let sv: SVCoords<Rational> = random_sv(r, n)?;
                let tr = lax_trace_poly(&sv);
                let gen = generating_poly(&sv);
                let f = integrals_f(&sv);
                let mut res = 0.0f64;
                for deg in 0..=n + 1 {
                    let expect = if deg <= n && (n - deg) % 2 == 0 { gen.coeff((n - deg) / 2) } else { Rational::zero() };
                    res = res.max(gap(&tr.coeff(deg), &expect));
                }
                for k in 0..integral_count(n) {
                    res = res.max(gap(&f.f[k], &gen.coeff(k)));
                }
                Ok(check(res, 0.0, || sv_to_json(&sv)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.canonical_triangle",
                criterion: Some(2),
                trials: 1,
                tol: 0.0,
                note: "s = (1,1,1), v = (-1,-1,-1) gives F = (2, -3)",
            },
            |_, _| {
                let one = Rational::from_i64(1);
                let sv = SVCoords::new(vec![one.clone(); 3], vec![-one.clone(); 3])?;
                let f = integrals_f(&sv);
                let res = gap(&f.f[0], &Rational::from_i64(2)).max(gap(&f.f[1], &Rational::from_i64(-3)));
                Ok(check(res, 0.0, || sv_to_json(&sv)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.trace_top_integral",
                criterion: Some(2),
                trials: 3 * t,
                tol: 0.0,
                note: "n = 3,4,5 twisted rationals: tr(vertex monodromy) = (prod s) F_0",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_twisted(r, 3 + i % 3)?;
                let sv = sv_coords(&p)?;
                Ok(check(gap(&p.monodromy.trace(), &top_integral(&sv)), 0.0, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.closed_relations",
                criterion: Some(6),
                trials: t,
                tol: tol_rel,
                note: "positive closed floats, n = 3..6: F_0 = 2/prod s, F_1 = -(1/2)(sum s^2) F_0",
            },
            move |r, i| {
                let p: PolygonData<f64> = random_positive_closed(r, 3 + i % 4)?;
                let sv = sv_coords(&p)?;
                let f = integrals_f(&sv);
                let (r0, r1) = closed_relations_defect(&sv);
                let res = (r0.abs() / f.f[0].abs().max(1.0)).max(r1.abs() / f.f[1].abs().max(1.0));
                Ok(check(res, tol_rel, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.df0_closed",
                criterion: Some(6),
                trials: t,
                tol: tol_df0,
                note: "fourth-order central differences of F_0 along 20 random v-directions at fixed s, which cover every tangent to the closed stratum",
            },
            move |r, i| {
                let p: PolygonData<f64> = random_positive_closed(r, 3 + i % 4)?;
                let sv = sv_coords(&p)?;
                let f0 = |v: Vec<f64>| integrals_f(&SVCoords { s: sv.s.clone(), v }).f[0];
                let base = f0(sv.v.clone()).abs();
                // Steps and gradients are measured relative to the size of v and of F_0.
                let vmax = sv.v.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let h = 1e-3 * vmax;
                let mut res = 0.0f64;
                for _ in 0..20 {
                    let dir: Vec<f64> = (0..sv.n()).map(|_| uniform(r, -1.0, 1.0)).collect();
                    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let at = |k: f64| f0(sv.v.iter().zip(&dir).map(|(v, d)| v + k * h * d / norm).collect());
                    // Fourth-order central difference.
                    let d = (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h);
                    res = res.max(d.abs() * vmax / base);
                }
                Ok(check(res, tol_df0, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.dressing_identity",
                criterion: Some(7),
                trials: t,
                tol: 0.0,
                note: "pushforward of xi to g equals DRESSING_SCALE * dressing_rhs, exact rationals n = 3,5,7",
            },
            |r, i| {
                let n = [3, 5, 7][i % 3];
                let sv: SVCoords<Rational> = random_sv(r, n)?;
                let xi = xi_field(&sv)?;
                let rhs = dressing_rhs(&dressing_state(&sv)?)?;
                let scale = Rational::from_i64(DRESSING_SCALE);
                let res = (0..n)
                    .map(|k| {
                        let pushed = xi[k].clone() / (sv.s_at(k as i64 - 1) * sv.s_at(k as i64));
                        gap(&pushed, &(scale.clone() * rhs[k].clone()))
                    })
                    .fold(0.0, f64::max);
                Ok(check(res, 0.0, || sv_to_json(&sv)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.flow_drift",
                criterion: Some(7),
                trials: (t / 4).max(1),
                tol: tol_drift,
                note: "RK4, dt = 1e-3, T = 5 on random star pentagons; drift of every F_k and K",
            },
            move |r, _| {
                let p = random_star_pentagon(r, 0.25)?;
                let sv = sv_coords(&p)?;
                let (f0, k0) = (integrals_f(&sv), pentagon_k_sv(&sv));
                let mut drift = 0.0f64;
                flow_observed(&sv, 5.0, 1e-3, |_, st| {
                    drift = drift.max(integrals_f(st).max_rel_diff(&f0)).max(rel_diff(pentagon_k_sv(st), k0));
                })?;
                Ok(check(drift, tol_drift, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.xi_conserves",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "dF_k(xi) by an exact central stencil on rational odd-gons, n = 3,5,7",
            },
            |r, i| {
                let n = [3, 5, 7][i % 3];
                let sv: SVCoords<Rational> = random_sv(r, n)?;
                let xi = xi_field(&sv)?;
                let m = n.div_ceil(2) as i64;
                let samples: Vec<_> = (-m..=m).map(|h| integrals_f(&shift_v(&sv, &xi, h))).collect();
                let res = (0..integral_count(n))
                    .map(|k| gap(&stencil_derivative(|h| samples[(h + m) as usize].f[k].clone(), m), &Rational::zero()))
                    .fold(0.0, f64::max);
                Ok(check(res, 0.0, || sv_to_json(&sv)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "integrals.xi_preserves_closure",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "d(closure defect)(xi) by an exact central stencil on closed rational odd-gons",
            },
            |r, i| {
                let n = [3, 5, 7][i % 3];
                let p: PolygonData<Rational> = random_closed(r, n)?;
                let sv = sv_coords(&p)?;
                let xi = xi_field(&sv)?;
                let m = n.div_ceil(2) as i64;
                let samples: Vec<_> = (-m..=m).map(|h| closure_defect(&shift_v(&sv, &xi, h))).collect();
                let res = (0..n)
                    .map(|k| gap(&stencil_derivative(|h| samples[(h + m) as usize][k].clone(), m), &Rational::zero()))
                    .fold(0.0, f64::max);
                Ok(check(res, 0.0, || polygon_to_json(&p)))
            },
        ),
    ]
}

// ---------------------------------------------------------------- recutting

/// The elementary recut with the sign of the `P_{j+1}` term flipped.
fn sign_flipped_recut<S: Scalar>(p: &PolygonData<S>, j: usize) -> Result<PolygonData<S>> {
    let mut out = elementary_recut(p, j)?;
    let ji = j as i64;
    let (prev, cur, next) = (p.vertex(ji - 1), p.vertex(ji), p.vertex(ji + 1));
    let v = bracket(&prev, &next);
    out.vertices[j] = (prev.scale(&bracket(&prev, &cur)) - next.scale(&bracket(&cur, &next))).div(&v);
    Ok(out)
}

fn recutting_suite(cfg: &VerifyConfig) -> Vec<PropertyReport> {
    let t = cfg.trials;
    let fault = cfg.fault;
    let tol_c = cfg.tol(1e-8);
    vec![
        run(
            cfg,
            Spec {
                name: "recutting.braid_relations",
                criterion: Some(5),
                trials: t,
                tol: 0.0,
                note: "R_j^2 = Id, (R_j R_{j+1})^3 = Id, distant commutation; twisted rationals n = 4..7",
            },
            move |r, i| {
                let p: PolygonData<Rational> = random_twisted(r, 4 + i % 4)?;
                let report = match fault {
                    Some(Fault::RecutSign) => braid_check_with(&p, 0.0, &sign_flipped_recut),
                    None => braid_check_with(&p, 0.0, &elementary_recut),
                };
                let worst = report
                    .checks
                    .iter()
                    .filter_map(|c| match c.status {
                        crate::recut::RelationStatus::Fail { max_vertex_diff } => Some(max_vertex_diff.max(f64::MIN_POSITIVE)),
                        _ => None,
                    })
                    .fold(0.0, f64::max);
                Ok(check(worst, 0.0, || {
                    let failed = report.checks.iter().find(|c| matches!(c.status, crate::recut::RelationStatus::Fail { .. }));
                    json!({"polygon": polygon_to_json(&p), "relation": failed.map(|c| format!("{:?} j={} k={}", c.family, c.j, c.k))})
                }))
            },
        ),
        run(
            cfg,
            Spec {
                name: "recutting.quad_period_three",
                criterion: Some(5),
                trials: t,
                tol: 0.0,
                note: "closed rational quadrilaterals: three full recuts restore (s, v)",
            },
            |r, _| {
                let p: PolygonData<Rational> = random_closed(r, 4)?;
                skip_degenerate((|| {
                    let q = recut(&recut(&recut(&p)?)?)?;
                    Ok(check(sv_gap(&sv_coords(&p)?, &sv_coords(&q)?), 0.0, || polygon_to_json(&p)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "recutting.conservation",
                criterion: Some(5),
                trials: t,
                tol: 0.0,
                note: "closed rationals n = 4..7: recut preserves every F_k, I, J, K and the center",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_closed(r, 4 + i % 4)?;
                skip_degenerate((|| {
                    let q = recut(&p)?;
                    let (fp, fq) = (integrals_f(&sv_coords(&p)?), integrals_f(&sv_coords(&q)?));
                    let (a, b) = (ijk(&p), ijk(&q));
                    let (cp, cq) = (center(&p), center(&q));
                    let res = gaps(fp.f.iter().zip(&fq.f))
                        .max(gaps([(&a.0, &b.0), (&a.1, &b.1), (&a.2, &b.2)]))
                        .max(gaps([(&cp.a, &cq.a), (&cp.b, &cq.b), (&cp.c, &cq.c)]));
                    Ok(check(res, 0.0, || polygon_to_json(&p)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "recutting.commutes_with_c",
                criterion: None,
                trials: t,
                tol: tol_c,
                note: "R_j(P) ~c R_j(Q) for each j and recut(P) ~c recut(Q), positive closed floats",
            },
            move |r, i| {
                let pr = draw_pair(r, 3 + i % 4)?;
                skip_degenerate((|| {
                    let rep = recut_commutes_with_c(&pr.p, &pr.c)?;
                    let res = rep.max_residual() / pr.c.abs().max(1.0);
                    Ok(check(res, tol_c, || pair_json(&pr)))
                })())
            },
        ),
    ]
}

// ---------------------------------------------------------------- symplectic

fn combine<S: Scalar>(r: &mut Rng64, basis: &[TangentVector<S>]) -> TangentVector<S> {
    let n = basis[0].u.len();
    basis.iter().fold(TangentVector::new(vec![Vec2::zero(); n]), |acc, b| acc.add(&b.scale(&small_ratio(r, 5, 3))))
}

fn combine_f64(r: &mut Rng64, basis: &[TangentVector<f64>]) -> TangentVector<f64> {
    let n = basis[0].u.len();
    let u = basis.iter().fold(TangentVector::new(vec![Vec2::zero(); n]), |acc, b| acc.add(&b.scale(&uniform(r, -1.0, 1.0))));
    let norm = u.u.iter().map(Vec2::norm_f64).fold(0.0, f64::max).max(1e-300);
    u.scale(&(1.0 / norm))
}

fn tangent_norm(u: &TangentVector<f64>) -> f64 {
    u.u.iter().map(Vec2::norm_f64).fold(0.0, f64::max)
}

/// The partner of `p` at `c` closest to `near`.
fn nearest_partner(p: &PolygonData<f64>, c: f64, near: &PolygonData<f64>) -> Result<PolygonData<f64>> {
    let sol = solve_c_related(p, &c)?;
    sol.pairs()
        .iter()
        .min_by(|a, b| a.q.max_vertex_diff(near).total_cmp(&b.q.max_vertex_diff(near)))
        .map(|pr| pr.q.clone())
        .ok_or(Error::NoRealPartner { step: 0 })
}

fn symplectic_suite(cfg: &VerifyConfig) -> Vec<PropertyReport> {
    let t = cfg.trials;
    let tol_ham = cfg.tol(1e-6);
    let tol_ijk = cfg.tol(1e-8);
    let tol_omega_c = cfg.tol(1e-5);
    let tol_tangency = cfg.tol(1e-9);
    vec![
        run(
            cfg,
            Spec {
                name: "symplectic.omega_antisymmetry",
                criterion: Some(8),
                trials: t,
                tol: 0.0,
                note: "closed rationals n = 4..7, random stratum tangents",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_closed(r, 4 + i % 4)?;
                let basis = stratum_tangent_basis(&p, 0.0);
                let (u, v) = (combine(r, &basis), combine(r, &basis));
                let uv = omega(&p, &u, &v, 0.0)?;
                let vu = omega(&p, &v, &u, 0.0)?;
                let res = gap(&uv, &-vu).max(gap(&omega(&p, &u, &u, 0.0)?, &Rational::zero()));
                Ok(check(res, 0.0, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.omega_sl2",
                criterion: Some(8),
                trials: t,
                tol: 0.0,
                note: "omega(M P, M U, M V) = omega(P, U, V) over rationals",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_closed(r, 4 + i % 4)?;
                let basis = stratum_tangent_basis(&p, 0.0);
                let (u, v) = (combine(r, &basis), combine(r, &basis));
                let m = random_sl2(r);
                let lhs = omega(&p.transform(&m), &u.transform(&m), &v.transform(&m), 0.0)?;
                let res = gap(&lhs, &omega(&p, &u, &v, 0.0)?).max(gap(&casimir(&p.transform(&m)), &casimir(&p)));
                Ok(check(res, 0.0, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.hamiltonian_fd",
                criterion: Some(8),
                trials: t,
                tol: tol_ham,
                note: "omega(e,V) = -dI, omega(h,V) = dJ, omega(f,V) = dK against central differences",
            },
            move |r, i| {
                let p: PolygonData<f64> = random_positive_closed(r, 4 + i % 4)?;
                let basis = stratum_tangent_basis(&p, 1e-10);
                let v = combine_f64(r, &basis);
                let [e, hf, f] = sl2_fields(&p);
                let h = 1e-5;
                let (plus, minus) = (ijk(&displace(&p, &v, &h)), ijk(&displace(&p, &v, &-h)));
                let d = ((plus.0 - minus.0) / (2.0 * h), (plus.1 - minus.1) / (2.0 * h), (plus.2 - minus.2) / (2.0 * h));
                let res = rel(omega_raw(&p, &e, &v), -d.0)
                    .max(rel(omega_raw(&p, &hf, &v), d.1))
                    .max(rel(omega_raw(&p, &f, &v), d.2));
                Ok(check(res, tol_ham, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.lie_derivatives",
                criterion: None,
                trials: t,
                tol: tol_ham,
                note: "sl(2) action on (I, J, K) by central differences",
            },
            move |r, i| {
                let p: PolygonData<f64> = random_positive_closed(r, 3 + i % 5)?;
                let (ii, jj, kk) = ijk(&p);
                let [e, hf, f] = sl2_fields(&p);
                let h = 1e-5;
                let fd = |u: &TangentVector<f64>| {
                    let (a, b) = (ijk(&displace(&p, u, &h)), ijk(&displace(&p, u, &-h)));
                    ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h), (a.2 - b.2) / (2.0 * h))
                };
                let (de, dh, df) = (fd(&e), fd(&hf), fd(&f));
                let expect = [
                    (de.0, 0.0),
                    (de.1, 2.0 * ii),
                    (de.2, jj),
                    (dh.0, 2.0 * ii),
                    (dh.1, 0.0),
                    (dh.2, -2.0 * kk),
                    (df.0, jj),
                    (df.1, 2.0 * kk),
                    (df.2, 0.0),
                ];
                let res = expect.iter().map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
                Ok(check(res, tol_ham, || polygon_to_json(&p)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.ijk_c_invariance",
                criterion: None,
                trials: t,
                tol: tol_ijk,
                note: "I, J, K and 4IK - J^2 agree between c-partners",
            },
            move |r, i| {
                let pr = draw_pair(r, 3 + i % 4)?;
                let (a, b) = (ijk(&pr.p), ijk(&pr.q));
                let res = rel(a.0, b.0).max(rel(a.1, b.1)).max(rel(a.2, b.2)).max(rel(casimir(&pr.p), casimir(&pr.q)));
                Ok(check(res, tol_ijk, || pair_json(&pr)))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.omega_c_invariance",
                criterion: None,
                trials: (t / 2).max(1),
                tol: tol_omega_c,
                note: "omega pulled back through a fourth-order central-difference Jacobian of P -> Q, step halved until converged",
            },
            move |r, i| {
                let pr = draw_pair(r, 4 + i % 3)?;
                let basis = stratum_tangent_basis(&pr.p, 1e-10);
                let (u, v) = (combine_f64(r, &basis), combine_f64(r, &basis));
                let pulled = |h: f64| -> Result<f64> {
                    let at = |w: &TangentVector<f64>, k: f64| nearest_partner(&displace(&pr.p, w, &(k * h)), pr.c, &pr.q);
                    let push = |w: &TangentVector<f64>| -> Result<TangentVector<f64>> {
                        let (p1, m1, p2, m2) = (at(w, 1.0)?, at(w, -1.0)?, at(w, 2.0)?, at(w, -2.0)?);
                        let d = |j: usize| {
                            let near = (p1.vertices[j].clone() - m1.vertices[j].clone()).scale(&8.0);
                            (near - (p2.vertices[j].clone() - m2.vertices[j].clone())).scale(&(1.0 / (12.0 * h)))
                        };
                        Ok(TangentVector::new((0..p1.n()).map(d).collect()))
                    };
                    Ok(omega_raw(&pr.q, &push(&u)?, &push(&v)?))
                };
                skip_degenerate((|| {
                    let before = omega_raw(&pr.p, &u, &v);
                    let scale = pr.p.vertices.iter().map(Vec2::norm_f64).fold(0.0, f64::max).powi(2)
                        * tangent_norm(&u)
                        * tangent_norm(&v);
                    let denom = before.abs().max(scale).max(1e-300);
                    // Halve the step until two successive estimates agree; near a fold of P -> Q
                    // they never do and the pair is reported as skipped.
                    let mut h = 1e-3;
                    let mut prev = pulled(h)?;
                    let mut after = None;
                    while h > 1e-6 {
                        h /= 2.0;
                        let next = pulled(h)?;
                        if (next - prev).abs() / denom < 0.05 * tol_omega_c {
                            after = Some(next);
                            break;
                        }
                        prev = next;
                    }
                    let Some(after) = after else { return Ok(Outcome::Skip) };
                    let res = (before - after).abs() / denom;
                    Ok(check(res, tol_omega_c, || pair_json(&pr)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.omega_recut",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "exact recut Jacobian preserves omega over rationals",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_closed(r, 4 + i % 4)?;
                let basis = stratum_tangent_basis(&p, 0.0);
                let (u, v) = (combine(r, &basis), combine(r, &basis));
                skip_degenerate((|| {
                    let (q, du) = recut_differential(&p, &u.u)?;
                    let (_, dv) = recut_differential(&p, &v.u)?;
                    let after = omega(&q, &TangentVector::new(du), &TangentVector::new(dv), 0.0)?;
                    Ok(check(gap(&after, &omega(&p, &u, &v, 0.0)?), 0.0, || polygon_to_json(&p)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.center_additivity",
                criterion: Some(9),
                trials: t,
                tol: 0.0,
                note: "center(P) = center(P1) + center(P2) across a random diagonal, n = 4..8",
            },
            |r, i| {
                let n = 4 + i % 5;
                let p: PolygonData<Rational> = random_closed(r, n)?;
                let a = r.gen_range(0..n);
                let b = (a + r.gen_range(2..=n - 2)) % n;
                let (first, second) = diagonal_cut(&p, a, b)?;
                let sum = center_of_vertices(&first).add(&center_of_vertices(&second));
                let whole = center(&p);
                let res = gaps([(&sum.a, &whole.a), (&sum.b, &whole.b), (&sum.c, &whole.c)]);
                Ok(check(res, 0.0, || json!({"polygon": polygon_to_json(&p), "cut": [a, b]})))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.butterfly_center",
                criterion: Some(9),
                trials: t,
                tol: 0.0,
                note: "random rational butterflies (P1, P2, Q2, Q1) have zero center",
            },
            |r, _| {
                let (p1, p2, q1): (Vec2<Rational>, Vec2<Rational>, Vec2<Rational>) = (point(r), point(r), point(r));
                let den = bracket(&q1, &p2);
                if den.is_zero() {
                    return Ok(Outcome::Skip);
                }
                let (a, b) = (bracket(&p1, &p2), bracket(&p1, &q1));
                let q2 = (p2.scale(&a) - q1.scale(&b)).div(&den);
                let quad = [p1, p2, q2, q1];
                if classify_butterfly_tol(&quad, 0.0) != ButterflyClass::Butterfly {
                    return Ok(Outcome::Fail(f64::INFINITY, json!("construction is not a butterfly")));
                }
                let c = center_of_vertices(&quad);
                let z = Rational::zero();
                let res = gaps([(&c.a, &z), (&c.b, &z), (&c.c, &z)]);
                Ok(check(res, 0.0, || json!(quad.iter().map(|v| [v.x.to_string(), v.y.to_string()]).collect::<Vec<_>>())))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.circumconic_proportional",
                criterion: Some(9),
                trials: t,
                tol: 0.0,
                note: "center(T) with axes swapped equals -s0 s1 s2 times the circumscribed central conic",
            },
            |r, _| {
                let tri: [Vec2<Rational>; 3] = [point(r), point(r), point(r)];
                let s = [bracket(&tri[0], &tri[1]), bracket(&tri[1], &tri[2]), bracket(&tri[2], &tri[0])];
                if s.iter().any(|x| x.is_zero()) {
                    return Ok(Outcome::Skip);
                }
                let conic = circumconic(&tri)?;
                let k = -(s[0].clone() * s[1].clone() * s[2].clone());
                let lhs = center_of_vertices(&tri).swapped();
                let rhs = conic.scale(&k);
                let res = gaps([(&lhs.a, &rhs.a), (&lhs.b, &rhs.b), (&lhs.c, &rhs.c)]);
                Ok(check(res, 0.0, || json!(tri.iter().map(|v| [v.x.to_string(), v.y.to_string()]).collect::<Vec<_>>())))
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.pentagon_hamiltonian",
                criterion: Some(8),
                trials: t,
                tol: tol_ham,
                note: "i_xi omega = dK on the pentagon chart (central differences) and tangency x'K_x + y'K_y = 0",
            },
            move |r, _| {
                let p = random_star_pentagon(r, 0.25)?;
                skip_degenerate((|| {
                    let ch = PentagonChart::from_sv(&sv_coords(&p)?)?;
                    let rep = pentagon_flow_check(&ch)?;
                    let (kx, ky) = crate::smallgons::pentagon_k_grad(&ch);
                    let tscale = (rep.xdot * kx).abs().max((rep.ydot * ky).abs()).max(1.0);
                    let tangency = rep.tangency.abs() / tscale;
                    let res = if tangency <= tol_tangency { rep.hamiltonian_fd } else { f64::INFINITY };
                    Ok(check(res, tol_ham, || json!({"x": ch.x, "y": ch.y, "s": ch.s, "tangency": tangency})))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.pentagon_hamiltonian_exact",
                criterion: Some(8),
                trials: t,
                tol: 0.0,
                note: "rational chart points: tangency and the Hamiltonian identity are exact",
            },
            |r, _| {
                let s: [Rational; 5] = std::array::from_fn(|_| nonzero_ratio(r, 5, 3));
                let (x, y) = (nonzero_ratio(r, 7, 3), nonzero_ratio(r, 7, 3));
                skip_degenerate((|| {
                    let ch = PentagonChart::new(x, y, s)?;
                    let rep = pentagon_flow_check(&ch)?;
                    let z = Rational::zero();
                    let res = gaps([(&rep.tangency, &z), (&rep.hamiltonian, &z), (&rep.field, &z)]);
                    Ok(check(res, 0.0, || json!({"x": ch.x.to_string(), "y": ch.y.to_string()})))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "symplectic.hamiltonian_exact",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "omega(e,V) = -dI, omega(h,V) = dJ, omega(f,V) = dK with exact derivatives",
            },
            |r, i| {
                let p: PolygonData<Rational> = random_closed(r, 4 + i % 4)?;
                let v = combine(r, &stratum_tangent_basis(&p, 0.0));
                let [e, hf, f] = sl2_fields(&p);
                let (di, dj, dk) = d_ijk(&p, &v);
                let res = gap(&omega_raw(&p, &e, &v), &-di)
                    .max(gap(&omega_raw(&p, &hf, &v), &dj))
                    .max(gap(&omega_raw(&p, &f, &v), &dk));
                Ok(check(res, 0.0, || polygon_to_json(&p)))
            },
        ),
    ]
}

// ---------------------------------------------------------------- smallgons

/// Grid shared by `verify smallgons` and the `pentagon` command.
pub const GRID_SIDES: [f64; 5] = [1.0, 3.0, 5.0, 7.0, 9.0];
pub const GRID_C: (f64, f64) = (0.1, 12.0);
pub const GRID_K: (f64, f64) = (-12.0, 12.0);

#[derive(Debug, Clone, Serialize)]
pub struct GridCell {
    pub c: f64,
    pub k: f64,
    pub dd: f64,
    pub predicted: bool,
    /// `None` when no chart point realizes the level or the cell sits on a boundary.
    pub solver: Option<bool>,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// The `(c, K)` existence grid: the discriminant prediction against the solver.
pub fn pentagon_grid(s: &[f64; 5], cs: &[f64], ks: &[f64]) -> Vec<GridCell> {
    let points: Vec<Option<PentagonChart<f64>>> = ks.iter().map(|&k| pentagon_point_with_k(s, k)).collect();
    let scale = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    cs.par_iter()
        .flat_map_iter(|&c| {
            let disc = pentagon_discriminant(s, c);
            let near_s = s.iter().any(|x| (c.abs() - x.abs()).abs() < 1e-9 * scale);
            ks.iter().zip(&points).map(move |(&k, pt)| {
                let near_root = disc.k_roots.is_some_and(|(lo, hi)| {
                    let w = 1e-7 * lo.abs().max(hi.abs()).max(1.0);
                    (k - lo).abs() < w || (k - hi).abs() < w
                });
                let solver = match pt {
                    Some(ch) if !near_s && !near_root => pentagon_solver_exists(ch, c).ok(),
                    _ => None,
                };
                GridCell { c, k, dd: disc.dd, predicted: disc.predicts_partner(k), solver }
            })
        })
        .collect()
}

pub fn grid_csv(cells: &[GridCell]) -> String {
    let mut out = String::from("c,K,DD,predicted,solver\n");
    for g in cells {
        let solver = match g.solver {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        out.push_str(&format!("{:.17e},{:.17e},{:.17e},{},{}\n", g.c, g.k, g.dd, g.predicted as u8, solver));
    }
    out
}

/// Maximal runs of grid columns in which some level has no partner.
fn gap_bands(cells: &[GridCell], cs: &[f64]) -> Vec<(f64, f64)> {
    let mut bands = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for &c in cs {
        let gapped = cells.iter().any(|g| g.c == c && g.solver == Some(false));
        open = match (open, gapped) {
            (None, true) => Some((c, c)),
            (Some((lo, _)), true) => Some((lo, c)),
            (Some(b), false) => {
                bands.push(b);
                None
            }
            (None, false) => None,
        };
    }
    bands.extend(open);
    bands
}

/// Porism levels on `s = (1,1,1,1,1)`, around the pentagram point.
pub const PORISM_LEVELS: [f64; 4] = [-10.0, -9.0, -8.5, -8.2];

#[derive(Debug, Clone, Serialize)]
pub struct PorismCurve {
    pub level: f64,
    pub c: f64,
    pub periods: Vec<Option<usize>>,
    pub consistent: bool,
}

/// Period detection at every sample of each level curve, for the fixed `c`
/// or, when `c` is `None`, for the `c` tuned to period `m` on the first sample.
pub fn porism_scan(levels: &[f64], samples: usize, c: Option<f64>, m: usize) -> Result<Vec<PorismCurve>> {
    let s = [1.0; 5];
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let center = (-phi, -phi);
    levels
        .iter()
        .map(|&level| {
            let pts = level_curve_samples(&s, center, level, samples);
            let first = pentagon_chart(pts.first().ok_or(Error::ChartSingular)?)?;
            let c = match c {
                Some(c) => c,
                None => tune_c_for_period(&first, center, m, 0.2, 0.7)?,
            };
            let periods = pts
                .iter()
                .map(|ch| {
                    let orbit = iterate_moduli(&pentagon_chart(ch)?, &c, 12)?;
                    Ok(detect_period(&orbit, 1e-6))
                })
                .collect::<Result<Vec<_>>>()?;
            let consistent = periods.len() >= 10 && periods.iter().all(|p| *p == periods[0]);
            Ok(PorismCurve { level, c, periods, consistent })
        })
        .collect()
}

fn smallgons_suite(cfg: &VerifyConfig) -> Result<Vec<PropertyReport>> {
    let t = cfg.trials;
    let tol_conic = cfg.tol(1e-8);
    let tol_iter = cfg.tol(1e-7);
    let tol_k = cfg.tol(1e-8);
    let mut props = vec![
        run(
            cfg,
            Spec {
                name: "smallgons.triangle_identity",
                criterion: Some(10),
                trials: t,
                tol: 0.0,
                note: "(m-l)^2 + 4kn = -c^2 prod / (s0 s1 s2)^2 over rationals",
            },
            |r, _| {
                let tri: [Vec2<Rational>; 3] = [point(r), point(r), point(r)];
                let c: Rational = nonzero_ratio(r, 5, 3);
                if (0..3).any(|k| bracket(&tri[k], &tri[(k + 1) % 3]).is_zero()) {
                    return Ok(Outcome::Skip);
                }
                skip_degenerate((|| {
                    let id = triangle_identity_check(&tri, &c)?;
                    Ok(check(gap(&id.residual, &Rational::zero()), 0.0, || json!({"c": c.to_string()})))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.triangle_bound",
                criterion: Some(10),
                trials: 5 * t,
                tol: 0.0,
                note: "c^2 prod <= 4 (s0 s1 s2)^2 against the solver; cells within 1e-6 of equality skipped",
            },
            |r, _| {
                let s: [f64; 3] = std::array::from_fn(|_| uniform(r, 0.2, 3.0) * if r.gen_bool(0.2) { -1.0 } else { 1.0 });
                let c = uniform(r, 0.05, 4.0);
                let rep = triangle_analysis(&s, &c);
                if (rep.discriminant_lhs - rep.discriminant_rhs).abs() < 1e-6 * rep.discriminant_rhs.abs().max(1e-300) {
                    return Ok(Outcome::Skip);
                }
                let Some(solver) = rep.solver_exists else { return Ok(Outcome::Skip) };
                let res = if solver == rep.exists { 0.0 } else { 1.0 };
                Ok(check(res, 0.0, || json!({"s": s, "c": c})))
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.quad_discriminant",
                criterion: Some(10),
                trials: 2 * t,
                tol: 0.0,
                note: "sign of the partner quadratic's discriminant against the solver, and the sign of cond4",
            },
            |r, _| {
                let p: PolygonData<f64> = random_closed(r, 4)?;
                let smax = sv_coords(&p)?.s.iter().fold(0.0f64, |m, s| m.max(s.abs()));
                let c = uniform(r, 0.05, 2.0) * smax;
                skip_degenerate((|| {
                    let qq = quad_partner_quadratic(&p, &c)?;
                    let sol = solve_c_related(&p, &c)?;
                    if sol.is_all_related() || qq.disc.abs() < 1e-7 * (qq.u * qq.u + 4.0 * qq.v.abs()).max(1e-300) {
                        return Ok(Outcome::Skip);
                    }
                    let sv = sv_coords(&p)?;
                    let s = [sv.s[0], sv.s[1], sv.s[2], sv.s[3]];
                    let (lhs, rhs) = cond4(&s, &c);
                    let agree_solver = (qq.disc > 0.0) == !sol.pairs().is_empty();
                    let agree_cond = (lhs - rhs).abs() < 1e-7 * lhs.abs().max(rhs.abs()) || (qq.disc > 0.0) == (lhs > rhs);
                    let res = if agree_solver && agree_cond { 0.0 } else { 1.0 };
                    Ok(check(res, 0.0, || json!({"polygon": polygon_to_json(&p), "c": c, "disc": qq.disc})))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.cond4_symmetry",
                criterion: None,
                trials: t,
                tol: 0.0,
                note: "the quadrilateral condition is invariant under cyclic relabeling and reversal",
            },
            |r, _| {
                let s: [Rational; 4] = std::array::from_fn(|_| nonzero_ratio(r, 7, 3));
                let c: Rational = nonzero_ratio(r, 5, 3);
                let base = cond4(&s, &c);
                let shifted = cond4(&[s[1].clone(), s[2].clone(), s[3].clone(), s[0].clone()], &c);
                let reversed = cond4(&[s[3].clone(), s[2].clone(), s[1].clone(), s[0].clone()], &c);
                let res = gap(&base.0, &shifted.0).max(gap(&base.1, &shifted.1)).max(gap(&base.0, &reversed.0)).max(gap(&base.1, &reversed.1));
                Ok(check(res, 0.0, || json!({"c": c.to_string()})))
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.quad_conics",
                criterion: None,
                trials: t,
                tol: tol_conic,
                note: "alternating vertices lie on homothetic central conics; 4(n^2 - mk) matches the side product",
            },
            move |r, _| {
                let pr = draw_pair(r, 4)?;
                skip_degenerate((|| {
                    let qc = quad_conics(&pr.p, &pr.q)?;
                    let sv = sv_coords(&pr.p)?;
                    let prod = quad_conic_product(&[sv.s[0], sv.s[1], sv.s[2], sv.s[3]]);
                    let res = qc.residual.max(rel(4.0 * qc.discriminant, prod));
                    Ok(check(res, tol_conic, || pair_json(&pr)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.quad_second_iterate",
                criterion: None,
                trials: t,
                tol: tol_iter,
                note: "two c-steps return a quadrilateral to its SL(2) class (equal (s, v))",
            },
            move |r, _| {
                let pr = draw_pair(r, 4)?;
                skip_degenerate((|| {
                    let orbit = iterate_c_dynamics(&pr.p, &pr.c, 2)?;
                    let res = sv_coords(&orbit[2])?.max_rel_diff(&sv_coords(&pr.p)?);
                    Ok(check(res, tol_iter, || pair_json(&pr)))
                })())
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.k_plus_minus",
                criterion: Some(10),
                trials: 1,
                tol: 1e-12,
                note: "s = (1,1,1,1,1), c = sqrt 2: K = 2 -+ sqrt 2",
            },
            |_, _| {
                let d = pentagon_discriminant(&[1.0; 5], 2f64.sqrt());
                let Some((lo, hi)) = d.k_roots else { return Ok(Outcome::Fail(f64::INFINITY, json!("no roots"))) };
                let r2 = 2f64.sqrt();
                let res = (lo - (2.0 - r2)).abs().max((hi - (2.0 + r2)).abs());
                Ok(check(res, 1e-12, || json!({"roots": [lo, hi]})))
            },
        ),
        run(
            cfg,
            Spec {
                name: "smallgons.k_orbit_invariance",
                criterion: None,
                trials: (t / 4).max(1),
                tol: tol_k,
                note: "K constant along 50-step pentagon orbits at c = 0.5",
            },
            move |r, _| {
                let p = random_star_pentagon(r, 0.15)?;
                skip_degenerate((|| {
                    let sv = sv_coords(&p)?;
                    let k0 = pentagon_k_sv(&sv);
                    let orbit = iterate_moduli(&sv, &0.5, 50)?;
                    let res = orbit.iter().map(|q| rel_diff(pentagon_k_sv(q), k0)).fold(0.0, f64::max);
                    Ok(check(res, tol_k, || polygon_to_json(&p)))
                })())
            },
        ),
    ];

    let cs = linspace(GRID_C.0, GRID_C.1, 50);
    let ks = linspace(GRID_K.0, GRID_K.1, 50);
    let cells = pentagon_grid(&GRID_SIDES, &cs, &ks);
    if let Some(dir) = &cfg.artifact_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("artifact dir: {e}")))?;
        std::fs::write(dir.join("discr_grid.csv"), grid_csv(&cells))
            .map_err(|e| Error::InvalidInput(format!("artifact write: {e}")))?;
    }
    let checked: Vec<&GridCell> = cells.iter().filter(|g| g.solver.is_some()).collect();
    let mismatches: Vec<&&GridCell> = checked.iter().filter(|g| g.solver != Some(g.predicted)).collect();
    let bands = gap_bands(&cells, &cs);
    let mut sorted = GRID_SIDES;
    sorted.sort_by(f64::total_cmp);
    let predicted_bands = [(sorted[0], sorted[1]), (sorted[2], sorted[3]), (sorted[4], f64::INFINITY)];
    let bands_ok = bands.len() == 3 && bands.iter().zip(&predicted_bands).all(|(b, p)| b.0 > p.0 && b.1 < p.1);
    let worst = mismatches.len() as f64 + if bands_ok { 0.0 } else { 1.0 };
    props.push(PropertyReport {
        name: "smallgons.pentagon_grid".into(),
        criterion: Some(10),
        passed: mismatches.is_empty() && bands_ok && !checked.is_empty(),
        trials: cells.len(),
        skipped: cells.len() - checked.len(),
        tolerance: 0.0,
        worst_residual: worst,
        witness: (!mismatches.is_empty() || !bands_ok).then(|| {
            json!({"mismatches": mismatches.iter().take(5).map(|g| json!({"c": g.c, "K": g.k})).collect::<Vec<_>>(), "bands": bands})
        }),
        note: format!(
            "s = {GRID_SIDES:?}, 50 x 50 (c, K) grid; {} mismatches, {} gap bands in |c|",
            mismatches.len(),
            bands.len()
        ),
    });

    let tuned = porism_scan(&PORISM_LEVELS, 11, None, 4)?;
    let fixed = porism_scan(&PORISM_LEVELS, 11, Some(0.5), 4)?;
    let consistent = tuned.iter().chain(&fixed).all(|c| c.consistent);
    let periodic = tuned.iter().all(|c| c.periods[0].is_some());
    props.push(PropertyReport {
        name: "smallgons.porism".into(),
        criterion: Some(11),
        passed: consistent && periodic,
        trials: tuned.iter().chain(&fixed).map(|c| c.periods.len()).sum(),
        skipped: 0,
        tolerance: 1e-6,
        worst_residual: if consistent { 0.0 } else { 1.0 },
        witness: (!consistent || !periodic).then(|| json!({"tuned": tuned, "fixed": fixed})),
        note: format!(
            "levels {PORISM_LEVELS:?}, 11 samples each; tuned c gives periods {:?}; c = 0.5 gives {:?}",
            tuned.iter().map(|c| c.periods[0]).collect::<Vec<_>>(),
            fixed.iter().map(|c| c.periods[0]).collect::<Vec<_>>()
        ),
    });
    Ok(props)
}
