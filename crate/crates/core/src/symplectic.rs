//! The presymplectic form on closed polygons with fixed side brackets,
//! the quadratic Hamiltonians `I, J, K` and the center of a polygon.
//!
//! `omega = sum_i s[i] (dx_i ^ dy_{i+1} + dx_{i+1} ^ dy_i)`,
//! `I = sum s[i] x_i x_{i+1}`, `J = sum s[i] (x_i y_{i+1} + x_{i+1} y_i)`,
//! `K = sum s[i] y_i y_{i+1}`.

use crate::error::{Error, Result};
use crate::geom::{bracket, Mat2, Vec2};
use crate::linalg::{cramer3, nullspace};
use crate::polygon::PolygonData;
use crate::scalar::Scalar;

/// Per-vertex displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<S> {
    pub u: Vec<Vec2<S>>,
}

impl<S: Scalar> TangentVector<S> {
    pub fn new(u: Vec<Vec2<S>>) -> Self {
        TangentVector { u }
    }

    pub fn scale(&self, k: &S) -> Self {
        TangentVector { u: self.u.iter().map(|w| w.scale(k)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        TangentVector { u: self.u.iter().zip(&o.u).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn transform(&self, m: &Mat2<S>) -> Self {
        TangentVector { u: self.u.iter().map(|w| m.apply(w)).collect() }
    }
}

/// `P + h U`.
pub fn displace<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>, h: &S) -> PolygonData<S> {
    let vertices = p.vertices.iter().zip(&u.u).map(|(a, w)| a.clone() + w.scale(h)).collect();
    PolygonData { vertices, closed: p.closed, monodromy: p.monodromy.clone() }
}

/// `d s[i] (U) = [U_i, P_{i+1}] + [P_i, U_{i+1}]` for each `i`.
pub fn side_differentials<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>) -> Vec<S> {
    let n = p.n();
    (0..n)
        .map(|i| {
            let k = (i + 1) % n;
            bracket(&u.u[i], &p.vertices[k]) + bracket(&p.vertices[i], &u.u[k])
        })
        .collect()
}

/// Largest `|d s[i](U)|`, relative to the size of `P` and `U`.
pub fn tangency_residual<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>) -> f64 {
    let scale = p.vertices.iter().map(Vec2::norm_f64).fold(0.0, f64::max)
        * u.u.iter().map(Vec2::norm_f64).fold(0.0, f64::max);
    let worst = side_differentials(p, u).iter().map(|d| d.to_f64().abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

fn check_tangent<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>, which: &'static str, tol: f64) -> Result<()> {
    if u.u.len() != p.n() {
        return Err(Error::WrongArity { expected: "one tangent vector per vertex", got: u.u.len() });
    }
    let exact_ok = S::EXACT && side_differentials(p, u).iter().all(|d| d.is_zero());
    let residual = tangency_residual(p, u);
    if !(exact_ok || (!S::EXACT && residual <= tol)) {
        return Err(Error::NotTangent { which, residual });
    }
    Ok(())
}


/// The raw bilinear sum, without contract checks.
pub fn omega_raw<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>, v: &TangentVector<S>) -> S {
    let n = p.n();
    let s: Vec<S> = (0..n).map(|i| bracket(&p.vertices[i], &p.vertices[(i + 1) % n])).collect();
    (0..n).fold(S::zero(), |acc, i| {
        let k = (i + 1) % n;
        let (ui, uk, vi, vk) = (&u.u[i], &u.u[k], &v.u[i], &v.u[k]);
        let term = ui.x.clone() * vk.y.clone() - vi.x.clone() * uk.y.clone() + uk.x.clone() * vi.y.clone()
            - vk.x.clone() * ui.y.clone();
        acc + s[i].clone() * term
    })
}

/// `omega(U, V)` on a closed polygon, with both vectors tangent to the fixed-s stratum.
pub fn omega<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>, v: &TangentVector<S>, tol: f64) -> Result<S> {
    if !p.closed {
        return Err(Error::NotClosed);
    }
    check_tangent(p, u, "U", tol)?;
    check_tangent(p, v, "V", tol)?;
    Ok(omega_raw(p, u, v))
}

/// `(I, J, K)` of a vertex list read cyclically.
pub fn ijk_of_vertices<S: Scalar>(pts: &[Vec2<S>]) -> (S, S, S) {
    let n = pts.len();
    let mut out = (S::zero(), S::zero(), S::zero());
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        let s = bracket(a, b);
        out.0 = out.0 + s.clone() * a.x.clone() * b.x.clone();
        out.1 = out.1 + s.clone() * (a.x.clone() * b.y.clone() + b.x.clone() * a.y.clone());
        out.2 = out.2 + s * a.y.clone() * b.y.clone();
    }
    out
}

pub fn ijk<S: Scalar>(p: &PolygonData<S>) -> (S, S, S) {
    ijk_of_vertices(&p.vertices)
}

/// Directional derivatives `(dI, dJ, dK)(U)` along a fixed-s tangent vector.
pub fn d_ijk<S: Scalar>(p: &PolygonData<S>, u: &TangentVector<S>) -> (S, S, S) {
    let n = p.n();
    let mut out = (S::zero(), S::zero(), S::zero());
    for i in 0..n {
        let k = (i + 1) % n;
        let (a, b, da, db) = (&p.vertices[i], &p.vertices[k], &u.u[i], &u.u[k]);
        let s = bracket(a, b);
        out.0 = out.0 + s.clone() * (da.x.clone() * b.x.clone() + a.x.clone() * db.x.clone());
        let dj = da.x.clone() * b.y.clone() + a.x.clone() * db.y.clone() + db.x.clone() * a.y.clone() + b.x.clone() * da.y.clone();
        out.1 = out.1 + s.clone() * dj;
        out.2 = out.2 + s * (da.y.clone() * b.y.clone() + a.y.clone() * db.y.clone());
    }
    out
}

/// `4IK - J^2`.
pub fn casimir<S: Scalar>(p: &PolygonData<S>) -> S {
    let (i, j, k) = ijk(p);
    S::from_i64(4) * i * k - j.clone() * j
}

/// The binary form `a x^2 - b xy + c y^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Scalar> QuadraticForm<S> {
    pub fn new(a: S, b: S, c: S) -> Self {
        QuadraticForm { a, b, c }
    }

    pub fn zero() -> Self {
        QuadraticForm { a: S::zero(), b: S::zero(), c: S::zero() }
    }

    pub fn eval(&self, x: &S, y: &S) -> S {
        self.a.clone() * x.clone() * x.clone() - self.b.clone() * x.clone() * y.clone() + self.c.clone() * y.clone() * y.clone()
    }

    pub fn eval_at(&self, p: &Vec2<S>) -> S {
        self.eval(&p.x, &p.y)
    }

    /// The form `w -> self(M w)`.
    pub fn pullback(&self, m: &Mat2<S>) -> Self {
        // Columns of M are the images of the basis vectors.
        let (e1, e2) = (Vec2::new(m.a.clone(), m.c.clone()), Vec2::new(m.b.clone(), m.d.clone()));
        let a = self.eval_at(&e1);
        let c = self.eval_at(&e2);
        let sum = self.eval_at(&(e1 + e2));
        QuadraticForm { a: a.clone(), b: a + c.clone() - sum, c }
    }

    /// `b^2 - 4ac`, invariant under SL(2) pullback.
    pub fn discriminant(&self) -> S {
        self.b.clone() * self.b.clone() - S::from_i64(4) * self.a.clone() * self.c.clone()
    }

    pub fn scale(&self, k: &S) -> Self {
        QuadraticForm { a: self.a.clone() * k.clone(), b: self.b.clone() * k.clone(), c: self.c.clone() * k.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadraticForm { a: self.a.clone() + o.a.clone(), b: self.b.clone() + o.b.clone(), c: self.c.clone() + o.c.clone() }
    }

    /// The form with the roles of `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        QuadraticForm { a: self.c.clone(), b: self.b.clone(), c: self.a.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    fn coeffs(&self) -> [S; 3] {
        [self.a.clone(), self.b.clone(), self.c.clone()]
    }

    /// Proportionality by vanishing 2x2 minors of the coefficient vectors.
    pub fn is_proportional(&self, o: &Self, tol: f64) -> bool {
        let (p, q) = (self.coeffs(), o.coeffs());
        let scale = p.iter().chain(&q).map(|x| x.to_f64().abs()).fold(0.0, f64::max).powi(2);
        (0..3).all(|i| {
            (i + 1..3).all(|j| (p[i].clone() * q[j].clone() - p[j].clone() * q[i].clone()).is_negligible(scale, tol))
        })
    }

    /// `k` with `self = k * o`, if the forms are proportional and `o` is nonzero.
    pub fn ratio_to(&self, o: &Self, tol: f64) -> Option<S> {
        if !self.is_proportional(o, tol) {
            return None;
        }
        let (p, q) = (self.coeffs(), o.coeffs());
        let k = (0..3).max_by(|&i, &j| q[i].to_f64().abs().total_cmp(&q[j].to_f64().abs()))?;
        (!q[k].is_zero()).then(|| p[k].clone() / q[k].clone())
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        use crate::scalar::approx_eq;
        approx_eq(&self.a, &o.a, tol) && approx_eq(&self.b, &o.b, tol) && approx_eq(&self.c, &o.c, tol)
    }

    pub fn to_f64(&self) -> QuadraticForm<f64> {
        QuadraticForm { a: self.a.to_f64(), b: self.b.to_f64(), c: self.c.to_f64() }
    }
}

/// `I x^2 - J xy + K y^2`, which equals `sum s[i] l_i l_{i+1}` with `l_i(x,y) = x_i x - y_i y`.
pub fn center_of_vertices<S: Scalar>(pts: &[Vec2<S>]) -> QuadraticForm<S> {
    let (i, j, k) = ijk_of_vertices(pts);
    QuadraticForm { a: i, b: j, c: k }
}

pub fn center<S: Scalar>(p: &PolygonData<S>) -> QuadraticForm<S> {
    center_of_vertices(&p.vertices)
}

/// The matrix `N` with `center(M P) = center(P).pullback(N)`.
pub fn center_pullback_matrix<S: Scalar>(m: &Mat2<S>) -> Mat2<S> {
    Mat2::new(m.a.clone(), -m.c.clone(), -m.b.clone(), m.d.clone())
}

/// The central conic `a x^2 - b xy + c y^2 = 1` through three points.
pub fn circumconic<S: Scalar>(tri: &[Vec2<S>; 3]) -> Result<QuadraticForm<S>> {
    let row = |p: &Vec2<S>| [p.x.clone() * p.x.clone(), -(p.x.clone() * p.y.clone()), p.y.clone() * p.y.clone()];
    let m = [row(&tri[0]), row(&tri[1]), row(&tri[2])];
    let [a, b, c] = cramer3(&m, &[S::one(), S::one(), S::one()], 1e-12).ok_or(Error::SingularSystem)?;
    Ok(QuadraticForm { a, b, c })
}

/// Cuts a closed polygon along the diagonal `P_i P_j` into `P_i..P_j` and `P_j..P_i`.
pub fn diagonal_cut<S: Scalar>(p: &PolygonData<S>, i: usize, j: usize) -> Result<(Vec<Vec2<S>>, Vec<Vec2<S>>)> {
    let n = p.n();
    let (i, j) = (i.min(j), i.max(j));
    if j >= n || j - i < 2 || n - (j - i) < 2 {
        return Err(Error::InvalidInput(format!("({i},{j}) is not a diagonal of an {n}-gon")));
    }
    let first = p.vertices[i..=j].to_vec();
    let second = p.vertices[j..].iter().chain(&p.vertices[..=i]).cloned().collect();
    Ok((first, second))
}

/// The infinitesimal generators `e = (0, x)`, `h = (x, -y)`, `f = (y, 0)`.
pub fn sl2_fields<S: Scalar>(p: &PolygonData<S>) -> [TangentVector<S>; 3] {
    let z = S::zero;
    let e = p.vertices.iter().map(|q| Vec2::new(z(), q.x.clone())).collect();
    let h = p.vertices.iter().map(|q| Vec2::new(q.x.clone(), -q.y.clone())).collect();
    let f = p.vertices.iter().map(|q| Vec2::new(q.y.clone(), z())).collect();
    [TangentVector::new(e), TangentVector::new(h), TangentVector::new(f)]
}

/// A basis of the tangent space to the fixed-s stratum at `p`.
pub fn stratum_tangent_basis<S: Scalar>(p: &PolygonData<S>, tol: f64) -> Vec<TangentVector<S>> {
    let n = p.n();
    // Unknowns ordered (x_0, y_0, x_1, y_1, ...).
    let rows: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let k = (i + 1) % n;
            let (a, b) = (&p.vertices[i], &p.vertices[k]);
            let mut row = vec![S::zero(); 2 * n];
            row[2 * i] = row[2 * i].clone() + b.y.clone();
            row[2 * i + 1] = row[2 * i + 1].clone() - b.x.clone();
            row[2 * k] = row[2 * k].clone() - a.y.clone();
            row[2 * k + 1] = row[2 * k + 1].clone() + a.x.clone();
            row
        })
        .collect();
    nullspace(&rows, 2 * n, tol)
        .into_iter()
        .map(|x| TangentVector::new(x.chunks(2).map(|c| Vec2::new(c[0].clone(), c[1].clone())).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::Rational;

    fn r(x: i64) -> Rational {
        Rational::from_i64(x)
    }

    fn pts(v: &[(i64, i64)]) -> Vec<Vec2<Rational>> {
        v.iter().map(|&(x, y)| Vec2::from_i64(x, y)).collect()
    }

    #[test]
    fn triangle_center_and_conic() {
        let tri = PolygonData::closed(pts(&[(1, 0), (0, 1), (-1, -1)])).unwrap();
        assert_eq!(ijk(&tri), (r(-1), r(-1), r(-1)));
        assert_eq!(casimir(&tri), r(3));
        assert_eq!(center(&tri), QuadraticForm::new(r(-1), r(-1), r(-1)));
        let conic = circumconic(&[tri.vertices[0].clone(), tri.vertices[1].clone(), tri.vertices[2].clone()]).unwrap();
        assert_eq!(conic, QuadraticForm::new(r(1), r(1), r(1)));
    }

    #[test]
    fn butterfly_center_vanishes() {
        let q = pts(&[(1, 0), (2, 1), (0, 1), (1, 2)]);
        assert!(center_of_vertices(&q).is_zero());
    }

    #[test]
    fn circle_conic_and_singular_system() {
        let five = Rational::from_i64(5);
        let p = |x: i64, y: i64| Vec2::new(Rational::from_i64(x) / five.clone(), Rational::from_i64(y) / five.clone());
        let conic = circumconic(&[p(5, 0), p(3, 4), p(-4, 3)]).unwrap();
        assert_eq!(conic, QuadraticForm::new(r(1), r(0), r(1)));
        let collinear: [Vec2<Rational>; 3] = [Vec2::from_i64(1, 0), Vec2::from_i64(2, 0), Vec2::from_i64(3, 0)];
        assert_eq!(circumconic(&collinear), Err(Error::SingularSystem));
    }

    #[test]
    fn tangent_basis_and_antisymmetry() {
        let p = PolygonData::closed(pts(&[(3, 0), (2, 3), (-1, 2), (-3, -1), (1, -4)])).unwrap();
        let basis = stratum_tangent_basis(&p, 0.0);
        assert_eq!(basis.len(), 5);
        for u in &basis {
            assert!(side_differentials(&p, u).iter().all(|d| d.is_zero()));
            assert_eq!(omega(&p, u, u, 0.0).unwrap(), r(0));
        }
        let w = omega(&p, &basis[0], &basis[1], 0.0).unwrap();
        assert_eq!(omega(&p, &basis[1], &basis[0], 0.0).unwrap(), -w);
        let bad = TangentVector::new(vec![Vec2::from_i64(1, 0); 5]);
        assert!(matches!(omega(&p, &bad, &basis[0], 0.0), Err(Error::NotTangent { which: "U", .. })));
    }

    #[test]
    fn hamiltonian_identities_exact() {
        let p = PolygonData::closed(pts(&[(3, 0), (2, 3), (-1, 2), (-3, -1), (1, -4)])).unwrap();
        let [e, h, f] = sl2_fields(&p);
        for v in stratum_tangent_basis(&p, 0.0) {
            let (di, dj, dk) = d_ijk(&p, &v);
            assert_eq!(omega_raw(&p, &e, &v), -di);
            assert_eq!(omega_raw(&p, &h, &v), dj);
            assert_eq!(omega_raw(&p, &f, &v), dk);
        }
    }

    #[test]
    fn center_pullback() {
        let p = PolygonData::closed(pts(&[(3, 0), (2, 3), (-1, 2), (-3, -1), (1, -4)])).unwrap();
        let m = Mat2::new(r(2), r(1), r(3), r(2));
        let lhs = center(&p.transform(&m));
        assert_eq!(lhs, center(&p).pullback(&center_pullback_matrix(&m)));
        assert_eq!(lhs.discriminant(), center(&p).discriminant());
    }
}
