//! Closed-form theory of c-related triangles, quadrilaterals and pentagons.
//!
//! Side brackets are passed in the 0-based convention `s[i] = [P_i, P_{i+1}]`.
//! The pentagon chart is `x = v[1]`, `y = v[4]`.

use crate::error::{Error, Result};
use crate::geom::{bracket, Mat2, Vec2};
use crate::integrals::xi_field;
use crate::lax::{solve_c_related, step_matrix, CSolution};
use crate::linalg::cramer3;
use crate::polygon::{canonical_frame, reconstruct, sv_coords, PolygonData, SVCoords};
use crate::scalar::Scalar;
use crate::symplectic::{ijk, QuadraticForm};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleReport<S> {
    /// `c^2 (s0+s1+s2)(s0+s1-s2)(s1+s2-s0)(s2+s0-s1)`.
    pub discriminant_lhs: S,
    /// `4 (s0 s1 s2)^2`.
    pub discriminant_rhs: S,
    /// The quadruple product alone; its sign decides the motion.
    pub product: S,
    pub exists: bool,
    pub motion: Motion,
    /// Whether the fixed-point solver finds partners for a triangle with these sides.
    pub solver_exists: Option<bool>,
}

fn prod<S: Scalar>(xs: &[S]) -> S {
    xs.iter().fold(S::one(), |acc, x| acc * x.clone())
}

fn sq<S: Scalar>(x: &S) -> S {
    x.clone() * x.clone()
}

/// `(s0+s1+s2)(s0+s1-s2)(s1+s2-s0)(s2+s0-s1)`.
pub fn triangle_product<S: Scalar>(s: &[S; 3]) -> S {
    let [a, b, c] = s.clone();
    (a.clone() + b.clone() + c.clone())
        * (a.clone() + b.clone() - c.clone())
        * (b.clone() + c.clone() - a.clone())
        * (c + a - b)
}

/// The triangle `(1,0), (0,s0), (-s1/s0, -s2)`, whose side brackets are `s`.
pub fn triangle_from_sides<S: Scalar>(s: &[S; 3]) -> Result<PolygonData<S>> {
    let [a, b, c] = s.clone();
    PolygonData::closed(vec![
        Vec2::new(S::one(), S::zero()),
        Vec2::new(S::zero(), a.clone()),
        Vec2::new(-(b / a), -c),
    ])
}

/// Classifies by sign, with the parabolic band `|x| <= 1e-12 scale^4` on floats.
fn motion_of<S: Scalar>(product: &S, scale: f64) -> Motion {
    if product.is_negligible(scale.powi(4), 1e-12) {
        Motion::Parabolic
    } else if *product > S::zero() {
        Motion::Elliptic
    } else {
        Motion::Hyperbolic
    }
}

/// The existence inequality and motion type for triangles with side brackets `s`.
pub fn triangle_analysis<S: Scalar>(s: &[S; 3], c: &S) -> TriangleReport<S> {
    let product = triangle_product(s);
    let lhs = sq(c) * product.clone();
    let rhs = S::from_i64(4) * sq(&prod(s));
    let scale = s.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    let exists = lhs <= rhs;
    let motion = motion_of(&product, scale);
    let fs = [s[0].to_f64(), s[1].to_f64(), s[2].to_f64()];
    let solver_exists = triangle_from_sides(&fs)
        .and_then(|t| solve_c_related(&t, &c.to_f64()))
        .ok()
        .map(|sol| sol.is_all_related() || !sol.pairs().is_empty());
    TriangleReport { discriminant_lhs: lhs, discriminant_rhs: rhs, product, exists, motion, solver_exists }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleIdentity<S> {
    /// `m - l`, `k`, `n` for `M = [[m, k], [n, l]]`.
    pub d: S,
    pub k: S,
    pub n: S,
    /// `(m - l)^2 + 4kn`, which equals `tr(M)^2 - 4`.
    pub trace_disc: S,
    /// `trace_disc + c^2 product / (s0 s1 s2)^2`; zero by the identity.
    pub residual: S,
}

/// Solves `[P, M P] = c` at the three vertices for `(m - l, k, n)` and checks
/// `(m-l)^2 + 4kn = -c^2 (s0+s1+s2)(s0+s1-s2)(s1+s2-s0)(s2+s0-s1) / (s0 s1 s2)^2`.
pub fn triangle_identity_check<S: Scalar>(tri: &[Vec2<S>; 3], c: &S) -> Result<TriangleIdentity<S>> {
    // [P, M P] = n x^2 - (m - l) x y - k y^2
    let row = |p: &Vec2<S>| [sq(&p.x), -(p.x.clone() * p.y.clone()), -sq(&p.y)];
    let m = [row(&tri[0]), row(&tri[1]), row(&tri[2])];
    let rhs = [c.clone(), c.clone(), c.clone()];
    let [n, d, k] = cramer3(&m, &rhs, 1e-12).ok_or(Error::SingularSystem)?;
    let s = [bracket(&tri[0], &tri[1]), bracket(&tri[1], &tri[2]), bracket(&tri[2], &tri[0])];
    let trace_disc = sq(&d) + S::from_i64(4) * k.clone() * n.clone();
    let residual = trace_disc.clone() + sq(c) * triangle_product(&s) / sq(&prod(&s));
    Ok(TriangleIdentity { d, k, n, trace_disc, residual })
}

/// The matrix `M` of the identity, completing `l` from `det M = 1`; floats only.
pub fn triangle_matrix(tri: &[Vec2<f64>; 3], c: f64) -> Result<Mat2<f64>> {
    let id = triangle_identity_check(tri, &c)?;
    // l^2 + d l - (1 + k n) = 0
    let disc = id.d * id.d + 4.0 * (1.0 + id.k * id.n);
    if disc < 0.0 {
        return Err(Error::SingularSystem);
    }
    let l = (-id.d + disc.sqrt()) / 2.0;
    Ok(Mat2::new(l + id.d, id.k, id.n, l))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadQuadratic<S> {
    pub u: S,
    pub v: S,
    pub disc: S,
}

fn quad_sides<S: Scalar>(p: &PolygonData<S>) -> Result<(SVCoords<S>, [S; 4])> {
    if p.n() != 4 {
        return Err(Error::WrongArity { expected: "4", got: p.n() });
    }
    let sv = sv_coords(p)?;
    let s = [sv.s[0].clone(), sv.s[1].clone(), sv.s[2].clone(), sv.s[3].clone()];
    Ok((sv, s))
}

/// Coefficients of `b^2 + u b + v = 0` for `Q_0 = (b, c)` in the frame
/// `P_0 = (1,0)`, `P_1 = (0, s0)`, `P_2 = (-s1/s0, v1)`, `P_3 = (-v3/s0, -s3)`.
pub fn quad_partner_quadratic<S: Scalar>(p: &PolygonData<S>, c: &S) -> Result<QuadQuadratic<S>> {
    let (sv, [s1, s3, s5, s7]) = quad_sides(p)?;
    let v2 = sv.v[1].clone();
    let scale = p.vertices.iter().map(Vec2::norm_f64).fold(0.0, f64::max).powi(2);
    let denom = s5.clone() * s7.clone() - s1.clone() * s3.clone();
    if v2.is_negligible(scale, 1e-12) || denom.is_negligible(scale * scale, 1e-12) {
        return Err(Error::DegenerateQuad);
    }
    let two = S::from_i64(2);
    let u = c.clone() / v2.clone()
        * ((sq(&s1) - sq(&s3) - sq(&s5) - sq(&s7)) / denom.clone()
            + two * s3.clone() * s5.clone() * s7.clone() / (s1.clone() * denom.clone()));
    let v = (sq(c) - sq(&s1)) * (s3.clone() * s5.clone() - s1.clone() * s7.clone()) * (s3.clone() * s7.clone() - s1.clone() * s5.clone())
        / (sq(&v2) * sq(&s1) * denom);
    let disc = sq(&u) - S::from_i64(4) * v.clone();
    Ok(QuadQuadratic { u, v, disc })
}

/// The two sides of the quadrilateral existence inequality, `(lhs, rhs)`; partners exist iff `lhs >= rhs`.
pub fn cond4<S: Scalar>(s: &[S; 4], c: &S) -> (S, S) {
    let [s1, s3, s5, s7] = s.clone();
    let lhs = sq(c)
        * (s1.clone() + s3.clone() - s5.clone() - s7.clone())
        * (s1.clone() - s3.clone() + s5.clone() - s7.clone())
        * (s1.clone() - s3.clone() - s5.clone() + s7.clone())
        * (s1.clone() + s3.clone() + s5.clone() + s7.clone());
    let rhs = S::from_i64(4)
        * (s3.clone() * s5.clone() - s1.clone() * s7.clone())
        * (s3.clone() * s7.clone() - s1.clone() * s5.clone())
        * (s1 * s3 - s5 * s7);
    (lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicKind {
    Ellipse,
    Hyperbola,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConics<S> {
    /// Normalized to `form = 1` on `P_0, Q_1, P_2, Q_3`.
    pub c1: QuadraticForm<S>,
    /// Normalized to `form = 1` on `Q_0, P_1, Q_2, P_3`.
    pub c2: QuadraticForm<S>,
    pub kind: ConicKind,
    /// `n^2 - mk` of the form `m x^2 + 2n xy + k y^2`.
    pub discriminant: S,
    /// Worst relative residual of the eight incidences.
    pub residual: f64,
}

/// `(s0+s1+s2+s3)(s0+s1-s2-s3)(s0-s1+s2-s3)(s0-s1-s2+s3)`, equal to `4 (n^2 - mk)`.
pub fn quad_conic_product<S: Scalar>(s: &[S; 4]) -> S {
    let [a, b, c, d] = s.clone();
    (a.clone() + b.clone() + c.clone() + d.clone())
        * (a.clone() + b.clone() - c.clone() - d.clone())
        * (a.clone() - b.clone() + c.clone() - d.clone())
        * (a - b - c + d)
}

/// The homothetic central conics carrying the alternating vertices of a c-related pair.
pub fn quad_conics<S: Scalar>(p: &PolygonData<S>, q: &PolygonData<S>) -> Result<QuadConics<S>> {
    quad_sides(p)?;
    if q.n() != 4 {
        return Err(Error::WrongArity { expected: "4", got: q.n() });
    }
    let (x, y): (Vec<S>, Vec<S>) = p.vertices.iter().map(|v| (v.x.clone(), v.y.clone())).unzip();
    let (k_, _, m_) = ijk(p);
    let (m, k) = (m_, k_);
    let half = S::from_ratio(1, 2);
    let n = -(half
        * ((sq(&x[0]) - sq(&x[2])) * (sq(&y[1]) - sq(&y[3])) - (sq(&x[1]) - sq(&x[3])) * (sq(&y[0]) - sq(&y[2]))));
    let form = QuadraticForm::new(m.clone(), -(S::from_i64(2) * n.clone()), k.clone());
    let scale = p.vertices.iter().map(Vec2::norm_f64).fold(0.0, f64::max).powi(4);
    let (l1, l2) = (form.eval_at(&p.vertices[0]), form.eval_at(&p.vertices[1]));
    if form.is_zero() || l1.is_negligible(scale, 1e-12) || l2.is_negligible(scale, 1e-12) {
        return Err(Error::FitSingular);
    }
    let c1 = form.scale(&(S::one() / l1));
    let c2 = form.scale(&(S::one() / l2));
    let on1 = [&p.vertices[0], &q.vertices[1], &p.vertices[2], &q.vertices[3]];
    let on2 = [&q.vertices[0], &p.vertices[1], &q.vertices[2], &p.vertices[3]];
    let residual = on1
        .iter()
        .map(|v| (c1.eval_at(v).to_f64() - 1.0).abs())
        .chain(on2.iter().map(|v| (c2.eval_at(v).to_f64() - 1.0).abs()))
        .fold(0.0, f64::max);
    let discriminant = sq(&n) - m * k;
    let kind = if discriminant.is_negligible(scale, 1e-12) {
        ConicKind::Degenerate
    } else if discriminant < S::zero() {
        ConicKind::Ellipse
    } else {
        ConicKind::Hyperbola
    };
    Ok(QuadConics { c1, c2, kind, discriminant, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PentagonChart<S> {
    pub x: S,
    pub y: S,
    pub s: [S; 5],
}

fn chart_guard<S: Scalar>(vals: &[&S]) -> Result<()> {
    if vals.iter().any(|v| v.is_negligible(1.0, 1e-14)) {
        return Err(Error::ChartSingular);
    }
    Ok(())
}

impl<S: Scalar> PentagonChart<S> {
    pub fn new(x: S, y: S, s: [S; 5]) -> Result<Self> {
        chart_guard(&[&x, &y])?;
        chart_guard(&s.iter().collect::<Vec<_>>())?;
        Ok(PentagonChart { x, y, s })
    }

    /// The chart point of closed pentagon coordinates.
    pub fn from_sv(sv: &SVCoords<S>) -> Result<Self> {
        if sv.n() != 5 {
            return Err(Error::WrongArity { expected: "5", got: sv.n() });
        }
        let s = [sv.s[0].clone(), sv.s[1].clone(), sv.s[2].clone(), sv.s[3].clone(), sv.s[4].clone()];
        PentagonChart::new(sv.v[1].clone(), sv.v[4].clone(), s)
    }

    pub fn to_f64(&self) -> PentagonChart<f64> {
        PentagonChart { x: self.x.to_f64(), y: self.y.to_f64(), s: [0, 1, 2, 3, 4].map(|i| self.s[i].to_f64()) }
    }
}

/// Full coordinates of the closed pentagon with `v[1] = x`, `v[4] = y`.
pub fn pentagon_chart<S: Scalar>(ch: &PentagonChart<S>) -> Result<SVCoords<S>> {
    let [s0, s1, s2, s3, s4] = ch.s.clone();
    let (x, y) = (ch.x.clone(), ch.y.clone());
    chart_guard(&[&x, &y])?;
    let v2 = (s0.clone() * s2.clone() - s1.clone() * y.clone()) / x.clone();
    let v3 = (s2.clone() * s4.clone() - s3.clone() * x.clone()) / y.clone();
    let v0 = (s0.clone() * s3 * x.clone() + s1 * s4.clone() * y.clone() - s0 * s2 * s4) / (x.clone() * y.clone());
    chart_guard(&[&v0, &v2, &v3])?;
    SVCoords::new(ch.s.to_vec(), vec![v0, x, v2, v3, y])
}

/// The closed pentagon in the canonical frame.
pub fn pentagon_polygon<S: Scalar>(ch: &PentagonChart<S>) -> Result<PolygonData<S>> {
    let sv = pentagon_chart(ch)?;
    reconstruct(&sv, canonical_frame(&sv))
}

/// `sum v[i] / (s[i-1] s[i])` on a pentagon.
pub fn pentagon_k_sv<S: Scalar>(sv: &SVCoords<S>) -> S {
    (0..5).fold(S::zero(), |acc, i| acc + sv.v_at(i) / (sv.s_at(i - 1) * sv.s_at(i)))
}

fn ab<S: Scalar>(s: &[S; 5]) -> (S, S) {
    let a = (sq(&s[0]) + sq(&s[1])) / (s[0].clone() * s[1].clone());
    let b = (sq(&s[3]) + sq(&s[4])) / (s[3].clone() * s[4].clone());
    (a, b)
}

/// `K = x/(s0 s1) + y/(s3 s4) + A/x + B/y - x/(s2 y) - y/(s2 x) - s2/(x y)`,
/// with `A = (s0^2+s1^2)/(s0 s1)`, `B = (s3^2+s4^2)/(s3 s4)`.
pub fn pentagon_k<S: Scalar>(ch: &PentagonChart<S>) -> S {
    let s = &ch.s;
    let (x, y) = (ch.x.clone(), ch.y.clone());
    let (a, b) = ab(s);
    x.clone() / (s[0].clone() * s[1].clone()) + y.clone() / (s[3].clone() * s[4].clone()) + a / x.clone() + b / y.clone()
        - x.clone() / (s[2].clone() * y.clone())
        - y.clone() / (s[2].clone() * x.clone())
        - s[2].clone() / (x * y)
}

/// `(dK/dx, dK/dy)`.
pub fn pentagon_k_grad<S: Scalar>(ch: &PentagonChart<S>) -> (S, S) {
    let s = &ch.s;
    let (x, y) = (ch.x.clone(), ch.y.clone());
    let (a, b) = ab(s);
    let s2 = s[2].clone();
    let kx = S::one() / (s[0].clone() * s[1].clone()) - a / sq(&x) - S::one() / (s2.clone() * y.clone())
        + y.clone() / (s2.clone() * sq(&x))
        + s2.clone() / (sq(&x) * y.clone());
    let ky = S::one() / (s[3].clone() * s[4].clone()) - b / sq(&y) + x.clone() / (s2.clone() * sq(&y))
        - S::one() / (s2.clone() * x.clone())
        + s2 / (x * sq(&y));
    (kx, ky)
}

/// The chart velocity of the infinitesimal field:
/// `x' = x (g2 - g3 + g4 - g0) + s1/s0 - s0/s1`, `y' = y (g0 - g1 + g2 - g3) + s4/s3 - s3/s4`.
pub fn pentagon_velocity<S: Scalar>(ch: &PentagonChart<S>) -> Result<(S, S)> {
    let sv = pentagon_chart(ch)?;
    let g: Vec<S> = (0..5).map(|i| sv.v_at(i) / (sv.s_at(i - 1) * sv.s_at(i))).collect();
    let s = &ch.s;
    let xd = ch.x.clone() * (g[2].clone() - g[3].clone() + g[4].clone() - g[0].clone()) + s[1].clone() / s[0].clone()
        - s[0].clone() / s[1].clone();
    let yd = ch.y.clone() * (g[0].clone() - g[1].clone() + g[2].clone() - g[3].clone()) + s[4].clone() / s[3].clone()
        - s[3].clone() / s[4].clone();
    Ok((xd, yd))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PentagonFlowReport<S> {
    pub xdot: S,
    pub ydot: S,
    /// `x' K_x + y' K_y`.
    pub tangency: S,
    /// `max(|x'/(xy) - K_y|, |y'/(xy) + K_x|)` with exact partials.
    pub hamiltonian: S,
    /// The same identity against central finite differences of `K`.
    pub hamiltonian_fd: f64,
    /// `max |(x', y') - (xi[1], xi[4])|`.
    pub field: S,
}

/// Checks `i_xi omega = dK` for `omega = dx ^ dy / (x y)` and agreement with the general field.
pub fn pentagon_flow_check<S: Scalar>(ch: &PentagonChart<S>) -> Result<PentagonFlowReport<S>> {
    let (xd, yd) = pentagon_velocity(ch)?;
    let (kx, ky) = pentagon_k_grad(ch);
    let xy = ch.x.clone() * ch.y.clone();
    let tangency = xd.clone() * kx.clone() + yd.clone() * ky.clone();
    let h1 = (xd.clone() / xy.clone() - ky).abs();
    let h2 = (yd.clone() / xy + kx).abs();
    let hamiltonian = if h1 > h2 { h1 } else { h2 };

    let f = ch.to_f64();
    let eps = 1e-6 * f.x.abs().max(f.y.abs()).max(1.0);
    let k_at = |dx: f64, dy: f64| pentagon_k(&PentagonChart { x: f.x + dx, y: f.y + dy, s: f.s });
    let fkx = (k_at(eps, 0.0) - k_at(-eps, 0.0)) / (2.0 * eps);
    let fky = (k_at(0.0, eps) - k_at(0.0, -eps)) / (2.0 * eps);
    let (fxd, fyd, fxy) = (xd.to_f64(), yd.to_f64(), f.x * f.y);
    let hamiltonian_fd = ((fxd / fxy - fky).abs()).max((fyd / fxy + fkx).abs()) / 1f64.max(fkx.abs()).max(fky.abs());

    let xi = xi_field(&pentagon_chart(ch)?)?;
    let e1 = (xd.clone() - xi[1].clone()).abs();
    let e2 = (yd.clone() - xi[4].clone()).abs();
    let field = if e1 > e2 { e1 } else { e2 };
    Ok(PentagonFlowReport { xdot: xd, ydot: yd, tangency, hamiltonian, hamiltonian_fd, field })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PentagonDiscriminant {
    pub dd: f64,
    /// `(K_-, K_+)` when `dd > 0`; partners are absent for `K` strictly between them.
    pub k_roots: Option<(f64, f64)>,
}

impl PentagonDiscriminant {
    pub fn predicts_partner(&self, k: f64) -> bool {
        match self.k_roots {
            Some((lo, hi)) => !(k > lo && k < hi),
            None => true,
        }
    }
}

/// `DD = prod (c^2 - s_j^2)` and the roots
/// `K = ((sum s^2) - 2c^2) c^2 / prod s +- 2 sqrt(DD) / (c prod s)`.
pub fn pentagon_discriminant(s: &[f64; 5], c: f64) -> PentagonDiscriminant {
    let dd: f64 = s.iter().map(|x| c * c - x * x).product();
    let ps: f64 = s.iter().product();
    let sum_sq: f64 = s.iter().map(|x| x * x).sum();
    let k_roots = (dd > 0.0).then(|| {
        let mid = (sum_sq - 2.0 * c * c) * c * c / ps;
        let half = 2.0 * dd.sqrt() / (c * ps);
        let (a, b) = (mid - half, mid + half);
        (a.min(b), a.max(b))
    });
    PentagonDiscriminant { dd, k_roots }
}

/// Chart points on the level `K` with the given `y`: `alpha x^2 + (gamma - K) x + beta = 0`.
pub fn pentagon_points_on_level(s: &[f64; 5], y: f64, k: f64) -> Vec<PentagonChart<f64>> {
    let (a, b) = ab(s);
    let alpha = 1.0 / (s[0] * s[1]) - 1.0 / (s[2] * y);
    let gamma = y / (s[3] * s[4]) + b / y;
    let beta = a - y / s[2] - s[2] / y;
    let bq = gamma - k;
    let disc = bq * bq - 4.0 * alpha * beta;
    if disc < 0.0 || alpha == 0.0 {
        return Vec::new();
    }
    let r = disc.sqrt();
    let q = -0.5 * (bq + bq.signum() * r);
    let mut xs = vec![q / alpha];
    if q != 0.0 {
        xs.push(beta / q);
    }
    xs.into_iter().filter_map(|x| PentagonChart::new(x, y, *s).ok()).filter(|ch| pentagon_chart(ch).is_ok()).collect()
}

/// Whether the fixed-point solver finds a c-related partner of the chart pentagon.
pub fn pentagon_solver_exists(ch: &PentagonChart<f64>, c: f64) -> Result<bool> {
    let p = pentagon_polygon(ch)?;
    Ok(match solve_c_related(&p, &c)? {
        CSolution::AllRelated => true,
        CSolution::Pairs(pairs) => !pairs.is_empty(),
    })
}

/// Discriminant of the fixed-point quadratic of the Lax map at `c`, a signed proxy for `D(K)`.
pub fn lax_fixed_point_discriminant(sv: &SVCoords<f64>, c: f64) -> f64 {
    let m = (0..sv.n() as i64).fold(Mat2::identity(), |acc, i| step_matrix(sv, i, &c).m.mul(&acc));
    (m.d - m.a).powi(2) + 4.0 * m.b * m.c
}

/// Points on the level curve `K = level` by bisection along `count` rays from `center`.
///
/// The center should be a strict local extremum enclosed by the curve.
pub fn level_curve_samples(s: &[f64; 5], center: (f64, f64), level: f64, count: usize) -> Vec<PentagonChart<f64>> {
    let k = |x: f64, y: f64| PentagonChart::new(x, y, *s).map(|ch| pentagon_k(&ch)).unwrap_or(f64::NAN);
    let k0 = k(center.0, center.1);
    let side = |v: f64| (v - level) * (k0 - level) > 0.0;
    let mut out = Vec::new();
    for j in 0..count {
        let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
        let (dx, dy) = (th.cos(), th.sin());
        let at = |r: f64| k(center.0 + r * dx, center.1 + r * dy);
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut r = 1e-3;
        while r < 1e3 {
            let v = at(r);
            if !v.is_finite() {
                break;
            }
            if !side(v) {
                hi = r;
                break;
            }
            lo = r;
            r *= 1.1;
        }
        if hi == 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if side(at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        if let Ok(ch) = PentagonChart::new(center.0 + r * dx, center.1 + r * dy, *s) {
            out.push(ch);
        }
    }
    out
}

/// A chart point on the level `K`, scanning `y` for a slice where the level is hit.
pub fn pentagon_point_with_k(s: &[f64; 5], k: f64) -> Option<PentagonChart<f64>> {
    let ys = (0..40).flat_map(|m| {
        let y = 0.05 * 1.25f64.powi(m);
        [y, -y]
    });
    ys.into_iter().find_map(|y| pentagon_points_on_level(s, y, k).into_iter().next())
}

/// Angle of the chart point `(v[1], v[4])` around `center`, summed along an orbit.
pub fn chart_winding(orbit: &[SVCoords<f64>], center: (f64, f64)) -> f64 {
    use std::f64::consts::PI;
    let ang: Vec<f64> = orbit.iter().map(|q| (q.v[4] - center.1).atan2(q.v[1] - center.0)).collect();
    ang.windows(2).map(|w| (w[1] - w[0] + PI).rem_euclid(2.0 * PI) - PI).sum()
}

/// The least `m <= max` with `orbit[m]` equal to `orbit[0]` to `tol`.
pub fn detect_period(orbit: &[SVCoords<f64>], tol: f64) -> Option<usize> {
    (1..orbit.len()).find(|&m| orbit[m].max_rel_diff(&orbit[0]) < tol)
}

/// Bisects `c` in `[lo, hi]` so that `m` steps from `sv` wind once around `center`.
///
/// A point whose orbit winds once in `m` steps is `m`-periodic; the
/// winding must change sign across the bracket.
pub fn tune_c_for_period(sv: &SVCoords<f64>, center: (f64, f64), m: usize, lo: f64, hi: f64) -> Result<f64> {
    let f = |c: f64| -> Result<f64> {
        Ok(chart_winding(&crate::lax::iterate_moduli(sv, &c, m)?, center) - 2.0 * std::f64::consts::PI)
    };
    let (mut lo, mut hi) = (lo, hi);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo * fhi > 0.0 {
        return Err(Error::InvalidInput("winding does not change sign on the bracket".into()));
    }
    let rising = flo < 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(x: i64) -> Rational {
        Rational::from_i64(x)
    }

    #[test]
    fn triangle_examples() {
        let one = [r(1), r(1), r(1)];
        let rep = triangle_analysis(&one, &r(1));
        assert!(rep.exists);
        assert_eq!((rep.discriminant_lhs.clone(), rep.discriminant_rhs.clone()), (r(3), r(4)));
        assert_eq!(rep.motion, Motion::Elliptic);
        assert_eq!(rep.solver_exists, Some(true));
        let rep = triangle_analysis(&one, &r(2));
        assert!(!rep.exists);
        assert_eq!(rep.discriminant_lhs, r(12));
        assert_eq!(rep.solver_exists, Some(false));
        assert_eq!(triangle_analysis(&[r(3), r(1), r(2)], &r(1)).motion, Motion::Parabolic);
    }

    #[test]
    fn triangle_identity_on_canonical_triangle() {
        let tri = [Vec2::from_i64(1, 0), Vec2::from_i64(0, 1), Vec2::from_i64(-1, -1)];
        let id = triangle_identity_check(&tri, &r(1)).unwrap();
        assert_eq!(id.residual, r(0));
        assert_eq!(id.trace_disc, r(-3));
        let line: [Vec2<Rational>; 3] = [Vec2::from_i64(1, 0), Vec2::from_i64(2, 0), Vec2::from_i64(-1, 0)];
        assert_eq!(triangle_identity_check(&line, &r(1)), Err(Error::SingularSystem));
    }

    #[test]
    fn regular_pentagon_chart() {
        let x = 2.0 * (72f64).to_radians().cos();
        let ch = PentagonChart::new(x, x, [1.0; 5]).unwrap();
        let sv = pentagon_chart(&ch).unwrap();
        assert!(sv.v.iter().all(|v| (v - x).abs() < 1e-12));
        assert!((pentagon_k(&ch) - 5.0 * x).abs() < 1e-12);
        assert!((pentagon_k_sv(&sv) - 5.0 * x).abs() < 1e-12);
        assert_eq!(PentagonChart::new(0.0, 1.0, [1.0; 5]), Err(Error::ChartSingular));
    }

    #[test]
    fn pentagon_discriminant_at_sqrt2() {
        let d = pentagon_discriminant(&[1.0; 5], 2f64.sqrt());
        assert!((d.dd - 1.0).abs() < 1e-12);
        let (lo, hi) = d.k_roots.unwrap();
        assert!((lo - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((hi - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(pentagon_discriminant(&[1.0; 5], 0.5).k_roots.is_none());
    }

    #[test]
    fn pentagon_flow_exact() {
        let ch = PentagonChart::new(Rational::from_ratio(-3, 2), Rational::from_ratio(-5, 3), [r(1), r(2), r(1), r(3), r(2)]).unwrap();
        let rep = pentagon_flow_check(&ch).unwrap();
        assert_eq!(rep.tangency, r(0));
        assert_eq!(rep.hamiltonian, r(0));
        assert_eq!(rep.field, r(0));
        assert!(rep.hamiltonian_fd < 1e-6);
    }
}
