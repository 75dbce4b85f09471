//! Centroaffine recutting.
//!
//! The elementary recut `R_j` replaces `P_j` by
//! `(s[j-1] P_{j-1} + s[j] P_{j+1}) / v[j]`, which swaps the two side
//! brackets at `P_j`. The full recut applies `R_0` first and `R_{n-1}` last.

use crate::error::{Error, Result};
use crate::geom::{bracket, Vec2};
use crate::lax::{c_relation_residual, solve_c_related, CSolution};
use crate::polygon::PolygonData;
use crate::scalar::Scalar;
use serde::Serialize;

fn check_index<S: Scalar>(p: &PolygonData<S>, j: usize) -> Result<()> {
    if j >= p.n() {
        return Err(Error::InvalidInput(format!("recut index {j} out of range for n = {}", p.n())));
    }
    Ok(())
}

fn diagonal_is_degenerate<S: Scalar>(prev: &Vec2<S>, next: &Vec2<S>, v: &S) -> bool {
    v.is_negligible(prev.norm_f64() * next.norm_f64(), 1e-12)
}

/// `R_j`.
pub fn elementary_recut<S: Scalar>(p: &PolygonData<S>, j: usize) -> Result<PolygonData<S>> {
    check_index(p, j)?;
    let j = j as i64;
    let (prev, cur, next) = (p.vertex(j - 1), p.vertex(j), p.vertex(j + 1));
    let v = bracket(&prev, &next);
    if diagonal_is_degenerate(&prev, &next, &v) {
        return Err(Error::DegenerateDiagonal { index: j as usize });
    }
    let new = (prev.scale(&bracket(&prev, &cur)) + next.scale(&bracket(&cur, &next))).div(&v);
    let mut out = p.clone();
    out.vertices[j as usize] = new;
    Ok(out)
}

/// Applies `R_{order[0]}` first.
pub fn recut_sequence<S: Scalar>(p: &PolygonData<S>, order: &[usize]) -> Result<PolygonData<S>> {
    order.iter().try_fold(p.clone(), |acc, &j| elementary_recut(&acc, j))
}

/// `R_{n-1} o ... o R_0`.
pub fn recut<S: Scalar>(p: &PolygonData<S>) -> Result<PolygonData<S>> {
    recut_sequence(p, &(0..p.n()).collect::<Vec<_>>())
}

/// Pushforward of a tangent field through `R_j`, exact for rational data.
///
/// Returns the recut polygon together with the image of `u`.
pub fn elementary_recut_differential<S: Scalar>(
    p: &PolygonData<S>,
    j: usize,
    u: &[Vec2<S>],
) -> Result<(PolygonData<S>, Vec<Vec2<S>>)> {
    if u.len() != p.n() {
        return Err(Error::WrongArity { expected: "one tangent vector per vertex", got: u.len() });
    }
    let out = elementary_recut(p, j)?;
    let n = p.n() as i64;
    let ji = j as i64;
    // Tangent vectors wrap like vertices; closed polygons wrap with the identity.
    let du = |k: i64| {
        let w = u[k.rem_euclid(n) as usize].clone();
        let lap = k.div_euclid(n);
        match lap {
            0 => w,
            1 => p.monodromy.apply(&w),
            -1 => p.monodromy.adjugate().apply(&w),
            _ => unreachable!("neighbours are at most one lap away"),
        }
    };
    let (a, b, cpt) = (p.vertex(ji - 1), p.vertex(ji), p.vertex(ji + 1));
    let (da, db, dc) = (du(ji - 1), du(ji), du(ji + 1));
    let s_prev = bracket(&a, &b);
    let s_next = bracket(&b, &cpt);
    let v = bracket(&a, &cpt);
    let ds_prev = bracket(&da, &b) + bracket(&a, &db);
    let ds_next = bracket(&db, &cpt) + bracket(&b, &dc);
    let dv = bracket(&da, &cpt) + bracket(&a, &dc);
    let new = &out.vertices[j];
    let numer = a.scale(&ds_prev) + da.scale(&s_prev) + cpt.scale(&ds_next) + dc.scale(&s_next);
    let dnew = (numer - new.scale(&dv)).div(&v);
    let mut image = u.to_vec();
    image[j] = dnew;
    Ok((out, image))
}

/// Pushforward through the full recut.
pub fn recut_differential<S: Scalar>(p: &PolygonData<S>, u: &[Vec2<S>]) -> Result<(PolygonData<S>, Vec<Vec2<S>>)> {
    (0..p.n()).try_fold((p.clone(), u.to_vec()), |(q, w), j| elementary_recut_differential(&q, j, &w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationFamily {
    Involution,
    Braid,
    Commute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RelationStatus {
    Pass,
    Fail { max_vertex_diff: f64 },
    Degenerate { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub family: RelationFamily,
    pub j: usize,
    pub k: usize,
    #[serde(flatten)]
    pub status: RelationStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraidReport {
    pub n: usize,
    pub checks: Vec<RelationCheck>,
}

impl BraidReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == RelationStatus::Pass)
    }

    /// True when no check failed, with degenerate configurations allowed.
    pub fn no_failures(&self) -> bool {
        !self.checks.iter().any(|c| matches!(c.status, RelationStatus::Fail { .. }))
    }

    pub fn count(&self, family: RelationFamily) -> usize {
        self.checks.iter().filter(|c| c.family == family).count()
    }
}

fn cyclic_distance(j: usize, k: usize, n: usize) -> usize {
    let d = j.abs_diff(k);
    d.min(n - d)
}

/// A recut rule: the library one, or a stand-in under test.
pub trait RecutStep<S>: Fn(&PolygonData<S>, usize) -> Result<PolygonData<S>> {}
impl<S, F: Fn(&PolygonData<S>, usize) -> Result<PolygonData<S>>> RecutStep<S> for F {}

fn apply_word<S: Scalar>(p: &PolygonData<S>, word: &[usize], step: &impl RecutStep<S>) -> Result<PolygonData<S>> {
    word.iter().try_fold(p.clone(), |acc, &j| step(&acc, j))
}

fn compare<S: Scalar>(p: &PolygonData<S>, word: &[usize], tol: f64, step: &impl RecutStep<S>) -> RelationStatus {
    let degenerate = |e: Error| match e {
        Error::DegenerateDiagonal { index } => RelationStatus::Degenerate { index },
        other => panic!("unexpected recut error {other:?}"),
    };
    match apply_word(p, word, step) {
        Ok(q) if q.approx_eq(p, tol) => RelationStatus::Pass,
        Ok(q) => RelationStatus::Fail { max_vertex_diff: q.max_vertex_diff(p) },
        Err(e) => degenerate(e),
    }
}

fn commutator_status<S: Scalar>(p: &PolygonData<S>, j: usize, k: usize, tol: f64, step: &impl RecutStep<S>) -> RelationStatus {
    match (apply_word(p, &[j, k], step), apply_word(p, &[k, j], step)) {
        (Ok(a), Ok(b)) if a.approx_eq(&b, tol) => RelationStatus::Pass,
        (Ok(a), Ok(b)) => RelationStatus::Fail { max_vertex_diff: a.max_vertex_diff(&b) },
        (Err(Error::DegenerateDiagonal { index }), _) | (_, Err(Error::DegenerateDiagonal { index })) => {
            RelationStatus::Degenerate { index }
        }
        (Err(e), _) | (_, Err(e)) => panic!("unexpected recut error {e:?}"),
    }
}

/// Checks `R_j^2 = Id`, `(R_j R_{j+1})^3 = Id` and `R_j R_k = R_k R_j` for cyclic
/// distance at least two. Exact for rationals; `tol` applies to floats only.
pub fn braid_check<S: Scalar>(p: &PolygonData<S>, tol: f64) -> BraidReport {
    braid_check_with(p, tol, &elementary_recut)
}

/// [`braid_check`] for an arbitrary recut rule.
pub fn braid_check_with<S: Scalar>(p: &PolygonData<S>, tol: f64, step: &impl RecutStep<S>) -> BraidReport {
    let n = p.n();
    let mut checks = Vec::new();
    for j in 0..n {
        checks.push(RelationCheck { family: RelationFamily::Involution, j, k: j, status: compare(p, &[j, j], tol, step) });
    }
    for j in 0..n {
        let k = (j + 1) % n;
        let word = [k, j, k, j, k, j];
        checks.push(RelationCheck { family: RelationFamily::Braid, j, k, status: compare(p, &word, tol, step) });
    }
    for j in 0..n {
        for k in j + 1..n {
            if cyclic_distance(j, k, n) >= 2 {
                let status = commutator_status(p, j, k, tol, step);
                checks.push(RelationCheck { family: RelationFamily::Commute, j, k, status });
            }
        }
    }
    BraidReport { n, checks }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationReport {
    /// Residual of the original pair.
    pub base_residual: f64,
    /// `max |[R_j P_i, R_j Q_i] - c|` per `j`, `None` where a recut degenerates.
    pub elementary: Vec<Option<f64>>,
    /// Residual of `recut(P)` against `recut(Q)`, `None` if degenerate.
    pub full: Option<f64>,
    pub degenerate: Vec<usize>,
}

impl CommutationReport {
    pub fn max_residual(&self) -> f64 {
        self.elementary.iter().flatten().chain(self.full.iter()).fold(self.base_residual, |m, &r| m.max(r))
    }
}

/// Whether recutting a given c-related pair yields a c-related pair.
pub fn recut_commutes_for_pair<S: Scalar>(p: &PolygonData<S>, q: &PolygonData<S>, c: &S) -> CommutationReport {
    let residual = |a: &PolygonData<S>, b: &PolygonData<S>| c_relation_residual(a, b, c).to_f64();
    let mut degenerate = Vec::new();
    let elementary = (0..p.n())
        .map(|j| match (elementary_recut(p, j), elementary_recut(q, j)) {
            (Ok(a), Ok(b)) => Some(residual(&a, &b)),
            (Err(Error::DegenerateDiagonal { index }), _) | (_, Err(Error::DegenerateDiagonal { index })) => {
                degenerate.push(index);
                None
            }
            _ => None,
        })
        .collect();
    let full = match (recut(p), recut(q)) {
        (Ok(a), Ok(b)) => Some(residual(&a, &b)),
        (Err(Error::DegenerateDiagonal { index }), _) | (_, Err(Error::DegenerateDiagonal { index })) => {
            degenerate.push(index);
            None
        }
        _ => None,
    };
    degenerate.sort_unstable();
    degenerate.dedup();
    CommutationReport { base_residual: residual(p, q), elementary, full, degenerate }
}

/// Solves for partners of `p` and checks commutation for the first one.
pub fn recut_commutes_with_c<S: Scalar>(p: &PolygonData<S>, c: &S) -> Result<CommutationReport> {
    match solve_c_related(p, c)? {
        CSolution::AllRelated => Err(Error::AllRelated),
        CSolution::Pairs(pairs) => {
            let pair = pairs.first().ok_or(Error::NoRealPartner { step: 0 })?;
            Ok(recut_commutes_for_pair(&pair.p, &pair.q, c))
        }
    }
}
