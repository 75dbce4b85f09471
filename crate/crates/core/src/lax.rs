//! The c-relation: reflections, Lax step matrices, the fixed-point solver,
//! branch-selected iteration, butterflies, the reflection-chain construction
//! and Bianchi completion.
//!
//! A partner `Q` of `P` is parameterized by the line
//! `Q_0 = c P_1 / s[0] + t P_0`; the Lax map carries `t` once around the
//! polygon, and partners are its fixed points.

use crate::error::{Error, Result};
use crate::geom::{bracket, Mat2, Vec2};
use crate::polygon::{canonical_frame, reconstruct, sv_coords, PolygonData, SVCoords};
use crate::scalar::{approx_eq, max_abs, Scalar, FLOAT_TOL};

/// Vertexwise tolerance for the `-previous` exclusion on floats.
pub const BRANCH_TOL: f64 = 1e-7;

/// Relative tolerance for detecting a Lax map proportional to the identity.
pub const ALL_RELATED_TOL: f64 = 1e-10;

/// The fractional-linear map `t -> (a t + b)/(c t + d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusMap<S> {
    pub m: Mat2<S>,
}

impl<S: Scalar> MoebiusMap<S> {
    /// `None` at the pole.
    pub fn apply(&self, t: &S) -> Option<S> {
        let num = self.m.a.clone() * t.clone() + self.m.b.clone();
        let den = self.m.c.clone() * t.clone() + self.m.d.clone();
        (!den.is_zero()).then(|| num / den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusMap { m: self.m.mul(&other.m) }
    }

    pub fn det(&self) -> S {
        self.m.det()
    }
}

/// The linear reflection swapping `q` and `p`: `x -> ([q,x]q + [x,p]p)/[q,p]`.
pub fn reflect<S: Scalar>(q: &Vec2<S>, p: &Vec2<S>, x: &Vec2<S>) -> Result<Vec2<S>> {
    let den = bracket(q, p);
    if den.is_zero() {
        return Err(Error::CollinearPair);
    }
    Ok((q.scale(&bracket(q, x)) + p.scale(&bracket(x, p))).div(&den))
}

/// Matrix of [`reflect`] as a linear map.
pub fn reflection_matrix<S: Scalar>(q: &Vec2<S>, p: &Vec2<S>) -> Result<Mat2<S>> {
    let e1 = reflect(q, p, &Vec2::new(S::one(), S::zero()))?;
    let e2 = reflect(q, p, &Vec2::new(S::zero(), S::one()))?;
    Ok(Mat2::from_columns(&e1, &e2))
}

/// Next partner vertex: `(-c q_i + [p_i,p_next] p_next)/[q_i,p_next]`.
pub fn c_step<S: Scalar>(q_i: &Vec2<S>, p_i: &Vec2<S>, p_next: &Vec2<S>, c: &S) -> Result<Vec2<S>> {
    let den = bracket(q_i, p_next);
    if den.is_zero() {
        return Err(Error::CollinearPair);
    }
    Ok((q_i.scale(&-c.clone()) + p_next.scale(&bracket(p_i, p_next))).div(&den))
}

/// Step `i` of the Lax map on the line `{c P_{i+1}/s[i] + t P_i}`.
pub fn step_matrix<S: Scalar>(sv: &SVCoords<S>, i: i64, c: &S) -> MoebiusMap<S> {
    let (si, si1) = (sv.s_at(i), sv.s_at(i + 1));
    let a = -(c.clone() * sv.v_at(i + 1)) / (si.clone() * si1);
    let b = S::one() - c.clone() * c.clone() / (si.clone() * si);
    MoebiusMap { m: Mat2::new(a, b, S::one(), S::zero()) }
}

/// Ordered product of the step matrices, later steps on the left.
pub fn lax_matrix<S: Scalar>(sv: &SVCoords<S>, lambda: &S) -> MoebiusMap<S> {
    (0..sv.n() as i64).fold(MoebiusMap { m: Mat2::identity() }, |acc, i| step_matrix(sv, i, lambda).compose(&acc))
}

/// The point `c P_{i+1}/s[i] + t P_i` of the parameter line at vertex `i`.
pub fn embed_parameter<S: Scalar>(p: &PolygonData<S>, i: i64, c: &S, t: &S) -> Vec2<S> {
    let (pi, pn) = (p.vertex(i), p.vertex(i + 1));
    let s = bracket(&pi, &pn);
    pn.scale(&(c.clone() / s)) + pi.scale(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CRelatedPair<S> {
    pub p: PolygonData<S>,
    pub q: PolygonData<S>,
    pub c: S,
    pub t_root: S,
    /// Largest defect of the defining brackets, as a float.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CSolution<S> {
    /// Isolated partners, sorted by `t`.
    Pairs(Vec<CRelatedPair<S>>),
    /// The Lax map is the identity: a one-parameter family of partners.
    AllRelated,
}

impl<S: Scalar> CSolution<S> {
    pub fn pairs(&self) -> &[CRelatedPair<S>] {
        match self {
            CSolution::Pairs(v) => v,
            CSolution::AllRelated => &[],
        }
    }

    pub fn is_all_related(&self) -> bool {
        matches!(self, CSolution::AllRelated)
    }
}

/// Roots of `A t^2 + B t + C = 0`, ascending; one root at a tangency.
fn quadratic_roots<S: Scalar>(a: S, b: S, c: S) -> Result<Vec<S>> {
    let two = S::from_i64(2);
    if a.is_zero() {
        if b.is_zero() {
            return Ok(vec![]);
        }
        return Ok(vec![-c / b]);
    }
    let disc = b.clone() * b.clone() - S::from_i64(4) * a.clone() * c.clone();
    let scale = (b.clone() * b.clone()).to_f64().abs() + (S::from_i64(4) * a.clone() * c.clone()).to_f64().abs();
    if disc.is_negligible(scale, 1e-14) {
        return Ok(vec![-b / (two * a)]);
    }
    if disc < S::zero() {
        return Ok(vec![]);
    }
    let root = disc.sqrt().ok_or(Error::IrrationalRoot)?;
    // q = -(b + sign(b) sqrt(disc))/2 avoids cancellation.
    let q = if b >= S::zero() { -(b + root) / two } else { (root - b) / two };
    let mut roots = vec![q.clone() / a, c / q];
    roots.sort_by(|x, y| x.partial_cmp(y).expect("finite roots"));
    Ok(roots)
}

/// Max defect of `[P_i,Q_i] = c` and `[Q_i,Q_{i+1}] = [P_i,P_{i+1}]`, wrapping via monodromy.
pub fn c_relation_residual<S: Scalar>(p: &PolygonData<S>, q: &PolygonData<S>, c: &S) -> S {
    let n = p.n() as i64;
    let mut defects = Vec::with_capacity(2 * p.n() + 1);
    for i in 0..n {
        defects.push(bracket(&p.vertex(i), &q.vertex(i)) - c.clone());
        defects.push(bracket(&q.vertex(i), &q.vertex(i + 1)) - bracket(&p.vertex(i), &p.vertex(i + 1)));
    }
    max_abs(defects)
}

/// Exact for rationals; relative `tol` (scaled by `|c|` and the side brackets) for floats.
pub fn is_c_related<S: Scalar>(p: &PolygonData<S>, q: &PolygonData<S>, c: &S, tol: f64) -> bool {
    if p.n() != q.n() {
        return false;
    }
    let r = c_relation_residual(p, q, c);
    if S::EXACT {
        return r.is_zero();
    }
    let scale = sv_scale(p).max(c.to_f64().abs()).max(1.0);
    r.to_f64() <= tol * scale
}

fn sv_scale<S: Scalar>(p: &PolygonData<S>) -> f64 {
    (0..p.n() as i64)
        .map(|i| bracket(&p.vertex(i), &p.vertex(i + 1)).to_f64().abs())
        .fold(0.0, f64::max)
}

/// Builds the partner whose first vertex sits at parameter `t`.
///
/// Steps with `[Q_i, P_{i+1}] = 0` are only admissible when `c^2 = s[i]^2`,
/// where the step map is singular and `Q_{i+1}` is free on its line; its
/// parameter is then chosen so that the remaining steps return to `t`.
pub fn partner_from_root<S: Scalar>(p: &PolygonData<S>, c: &S, t: &S) -> Result<PolygonData<S>> {
    let sv = sv_coords(p)?;
    let n = p.n() as i64;
    let mut qs = vec![embed_parameter(p, 0, c, t)];
    for i in 0..n - 1 {
        let (qi, pi, pn) = (&qs[i as usize], p.vertex(i), p.vertex(i + 1));
        let scale = qi.norm_f64() * pn.norm_f64();
        let next = if bracket(qi, &pn).is_negligible(scale, 1e-12) {
            let si = sv.s_at(i);
            let det = c.clone() * c.clone() - si.clone() * si;
            if !det.is_negligible(c.to_f64().powi(2), 1e-12) {
                return Err(Error::CollinearPair);
            }
            let rest = (i + 1..n).fold(Mat2::identity(), |acc, k| step_matrix(&sv, k, c).m.mul(&acc));
            embed_parameter(p, i + 1, c, &preimage(&rest, t)?)
        } else {
            c_step(qi, &pi, &pn, c)?
        };
        qs.push(next);
    }
    Ok(PolygonData { vertices: qs, closed: p.closed, monodromy: p.monodromy.clone() })
}

/// A parameter `u` with `R(u) = t`; for singular `R` the kernel point, which
/// keeps the chain on its degenerate branch.
fn preimage<S: Scalar>(r: &Mat2<S>, t: &S) -> Result<S> {
    let inv = MoebiusMap { m: r.adjugate() };
    if !r.det().is_negligible(r.max_abs_f64().powi(2), 1e-12) {
        return inv.apply(t).ok_or(Error::CollinearPair);
    }
    if !r.a.is_zero() {
        Ok(-r.b.clone() / r.a.clone())
    } else if !r.c.is_zero() {
        Ok(-r.d.clone() / r.c.clone())
    } else {
        Err(Error::CollinearPair)
    }
}

/// All polygons c-related to `p`, from the fixed points of the Lax map at `c`.
pub fn solve_c_related<S: Scalar>(p: &PolygonData<S>, c: &S) -> Result<CSolution<S>> {
    if c.is_zero() {
        return Err(Error::ZeroC);
    }
    let sv = sv_coords(p)?;
    let l = lax_matrix(&sv, c).m;
    if l.is_scalar_multiple(ALL_RELATED_TOL) {
        return Ok(CSolution::AllRelated);
    }
    let roots = quadratic_roots(l.c.clone(), l.d.clone() - l.a.clone(), -l.b.clone())?;
    let mut pairs = Vec::with_capacity(roots.len());
    for t in roots {
        // a root whose chain runs into a pole is not a partner
        let Ok(q) = partner_from_root(p, c, &t) else { continue };
        let residual = c_relation_residual(p, &q, c).to_f64();
        pairs.push(CRelatedPair { p: p.clone(), q, c: c.clone(), t_root: t, residual });
    }
    Ok(CSolution::Pairs(pairs))
}

/// Picks the candidate that is not `excluded`; errors when the branch is ambiguous.
fn pick_other<T: Clone>(cands: &[T], is_excluded: impl Fn(&T) -> bool, step: usize) -> Result<T> {
    let keep: Vec<&T> = cands.iter().filter(|c| !is_excluded(c)).collect();
    match (cands.len(), keep.len()) {
        (0, _) => Err(Error::NoRealPartner { step }),
        (_, 0) => Err(Error::BranchLost { step }),
        _ => Ok(keep[0].clone()),
    }
}

/// Branch-consistent orbit `P = P_0, P_1, ..., P_steps` of the c-relation.
///
/// The first step takes the partner with the larger `t`; afterwards the
/// partner equal to `-P_{k-1}` is discarded.
pub fn iterate_c_dynamics<S: Scalar>(p: &PolygonData<S>, c: &S, steps: usize) -> Result<Vec<PolygonData<S>>> {
    let mut orbit = vec![p.clone()];
    for step in 1..=steps {
        let cur = orbit.last().expect("nonempty orbit");
        let sol = solve_c_related(cur, c)?;
        if sol.is_all_related() {
            return Err(Error::AllRelated);
        }
        let cands: Vec<PolygonData<S>> = sol.pairs().iter().map(|pr| pr.q.clone()).collect();
        let next = if step == 1 {
            cands.last().cloned().ok_or(Error::NoRealPartner { step })?
        } else {
            let excluded = orbit[step - 2].negated();
            pick_other(&cands, |q| q.approx_eq(&excluded, BRANCH_TOL), step)?
        };
        orbit.push(next);
    }
    Ok(orbit)
}

/// The same orbit on the moduli space: each step is re-normalized to the
/// canonical frame, and the excluded candidate is the one with the previous
/// (s,v) coordinates, since `-P` and `P` share them.
pub fn iterate_moduli<S: Scalar>(sv: &SVCoords<S>, c: &S, steps: usize) -> Result<Vec<SVCoords<S>>> {
    let mut orbit = vec![sv.clone()];
    for step in 1..=steps {
        let cur = orbit.last().expect("nonempty orbit");
        let p = reconstruct(cur, canonical_frame(cur))?;
        let sol = solve_c_related(&p, c)?;
        if sol.is_all_related() {
            return Err(Error::AllRelated);
        }
        let cands = sol.pairs().iter().map(|pr| sv_coords(&pr.q)).collect::<Result<Vec<_>>>()?;
        let next = if step == 1 {
            cands.last().cloned().ok_or(Error::NoRealPartner { step })?
        } else {
            let prev = &orbit[step - 2];
            pick_other(&cands, |q| q.approx_eq(prev, BRANCH_TOL), step)?
        };
        orbit.push(next);
    }
    Ok(orbit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ButterflyClass {
    Butterfly,
    AntiButterfly,
    OppositeSymmetric,
    Generic,
}

/// Classifies a quadrilateral given in the order `(P1, P2, Q2, Q1)`.
///
/// Butterfly: `[P1,P2] = [Q1,Q2]` and `[P1,Q1] = [P2,Q2]`. AntiButterfly:
/// the same after negating `Q2`. OppositeSymmetric: `P1 = -Q2` or `P2 = -Q1`.
pub fn classify_butterfly<S: Scalar>(quad: &[Vec2<S>; 4]) -> ButterflyClass {
    classify_butterfly_tol(quad, FLOAT_TOL)
}

pub fn classify_butterfly_tol<S: Scalar>(quad: &[Vec2<S>; 4], tol: f64) -> ButterflyClass {
    let [p1, p2, q2, q1] = quad;
    let scale = quad.iter().map(Vec2::norm_f64).fold(0.0, f64::max).powi(2).max(1.0);
    let eq = |a: S, b: S| (a - b).is_negligible(scale, tol);
    let (a1, b1) = (bracket(p1, p2), bracket(q1, q2));
    let (a2, b2) = (bracket(p1, q1), bracket(p2, q2));
    if eq(a1.clone(), b1.clone()) && eq(a2.clone(), b2.clone()) {
        return ButterflyClass::Butterfly;
    }
    if eq(a1, -b1) && eq(a2, -b2) {
        return ButterflyClass::AntiButterfly;
    }
    let null = |v: Vec2<S>| v.x.is_negligible(scale.sqrt(), tol) && v.y.is_negligible(scale.sqrt(), tol);
    if null(p1.clone() + q2.clone()) || null(p2.clone() + q1.clone()) {
        return ButterflyClass::OppositeSymmetric;
    }
    ButterflyClass::Generic
}

/// `sum_i (-1)^i v[i] / (s[i-1] s[i])` for even n.
pub fn even_closure_condition<S: Scalar>(sv: &SVCoords<S>) -> Result<S> {
    if sv.n() % 2 == 1 {
        return Err(Error::WrongArity { expected: "even n", got: sv.n() });
    }
    Ok((0..sv.n() as i64).fold(S::zero(), |acc, i| {
        let term = sv.v_at(i) / (sv.s_at(i - 1) * sv.s_at(i));
        if i % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    }))
}

fn closed_vertex_list<S: Scalar>(a: &PolygonData<S>) -> Result<&[Vec2<S>]> {
    if !a.closed {
        return Err(Error::NotClosed);
    }
    Ok(&a.vertices)
}

/// Composite `R_{n-1} ... R_0` of the reflections swapping `A_k` and `A_{k+1}`.
pub fn reflection_composite<S: Scalar>(a: &PolygonData<S>) -> Result<Mat2<S>> {
    let verts = closed_vertex_list(a)?;
    let n = verts.len();
    let mut m = Mat2::identity();
    for k in 0..n {
        m = reflection_matrix(&verts[k], &verts[(k + 1) % n])?.mul(&m);
    }
    Ok(m)
}

/// A c-related pair built by reflecting `start` around the closed polygon `a`.
///
/// For odd n the chain runs twice around. For even n the construction
/// needs a second seed; the quarter turn of `start` is used.
pub fn reflection_chain<S: Scalar>(a: &PolygonData<S>, start: &Vec2<S>) -> Result<(PolygonData<S>, PolygonData<S>)> {
    if a.n() % 2 == 1 {
        reflection_chain_seeded(a, start, None)
    } else {
        reflection_chain_seeded(a, start, Some(&start.rotate90()))
    }
}

/// As [`reflection_chain`] with an explicit second seed `Q_0` (even n only).
pub fn reflection_chain_seeded<S: Scalar>(
    a: &PolygonData<S>,
    p0: &Vec2<S>,
    q0: Option<&Vec2<S>>,
) -> Result<(PolygonData<S>, PolygonData<S>)> {
    let verts = closed_vertex_list(a)?;
    let n = verts.len();
    let refl = |k: usize, x: &Vec2<S>| reflect(&verts[k % n], &verts[(k + 1) % n], x);
    let mut ps = vec![Vec2::zero(); n];
    let mut qs = vec![Vec2::zero(); n];
    if n % 2 == 1 {
        let mut x = p0.clone();
        for k in 0..2 * n {
            if k % 2 == 0 {
                ps[k % n] = x.clone();
            } else {
                qs[k % n] = x.clone();
            }
            x = refl(k, &x)?;
        }
    } else {
        let cond = even_closure_condition(&sv_coords(a)?)?;
        let q0 = q0.ok_or_else(|| Error::InvalidInput("even n needs a second seed".into()))?;
        let chain_closes = |r: &Mat2<S>| r.is_identity(FLOAT_TOL * r.max_abs_f64().max(1.0));
        if !cond.is_negligible(1.0, FLOAT_TOL) || !chain_closes(&reflection_composite(a)?) {
            return Err(Error::NotClosedChain { residual: cond.to_f64() });
        }
        let (mut x, mut y) = (p0.clone(), q0.clone());
        for k in 0..n {
            if k % 2 == 0 {
                ps[k] = x.clone();
                qs[k] = y.clone();
            } else {
                qs[k] = x.clone();
                ps[k] = y.clone();
            }
            x = refl(k, &x)?;
            y = refl(k, &y)?;
        }
    }
    Ok((PolygonData::closed(ps)?, PolygonData::closed(qs)?))
}

/// Completes `p ~c q`, `p ~d r` to `S` with `q ~d S` and `r ~c S`.
///
/// Each `S_i` solves `[R_i,S_i] = c`, `[Q_i,S_i] = d`, which makes
/// `(P_i, Q_i, S_i, R_i)` a butterfly.
pub fn bianchi_complete<S: Scalar>(
    p: &PolygonData<S>,
    q: &PolygonData<S>,
    r: &PolygonData<S>,
    c: &S,
    d: &S,
) -> Result<PolygonData<S>> {
    if !is_c_related(p, q, c, FLOAT_TOL) || !is_c_related(p, r, d, FLOAT_TOL) {
        return Err(Error::NotRelated);
    }
    let mut out = Vec::with_capacity(p.n());
    for (i, (ri, qi)) in r.vertices.iter().zip(&q.vertices).enumerate() {
        // [R,S] = R.x S.y - R.y S.x = c and [Q,S] = Q.x S.y - Q.y S.x = d
        let det = bracket(ri, qi);
        let scale = ri.norm_f64() * qi.norm_f64();
        if det.is_negligible(scale, 1e-12) {
            return Err(Error::SingularCompletion { index: i });
        }
        let sx = (c.clone() * qi.x.clone() - d.clone() * ri.x.clone()) / det.clone();
        let sy = (c.clone() * qi.y.clone() - d.clone() * ri.y.clone()) / det;
        out.push(Vec2::new(sx, sy));
    }
    let s = PolygonData { vertices: out, closed: p.closed, monodromy: p.monodromy.clone() };
    if !is_c_related(q, &s, d, 1e-7) || !is_c_related(r, &s, c, 1e-7) {
        return Err(Error::NotRelated);
    }
    Ok(s)
}

/// Relative check that a pair of floats agrees, for callers comparing
/// conjugation invariants.
pub fn same_invariant<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    approx_eq(a, b, tol)
}
