//! Concrete polygons, (s,v) moduli coordinates, reconstruction and monodromy.
//!
//! Conventions: `s[i] = [P_i, P_{i+1}]` and `v[i] = [P_{i-1}, P_{i+1}]`, all
//! indices cyclic. A twisted polygon stores one period `P_0..P_{n-1}` and the
//! vertex monodromy `M` with `P_{i+n} = M P_i`.

use crate::continuant::continuant_range;
use crate::error::{Error, Result};
use crate::geom::{bracket, Mat2, Vec2};
use crate::scalar::{approx_eq, max_abs, Scalar, DEGENERACY_TOL, FLOAT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonData<S> {
    pub vertices: Vec<Vec2<S>>,
    pub closed: bool,
    pub monodromy: Mat2<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SVCoords<S> {
    pub s: Vec<S>,
    pub v: Vec<S>,
}

fn bracket_vanishes<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>) -> bool {
    bracket(a, b).is_negligible(a.norm_f64() * b.norm_f64(), DEGENERACY_TOL)
}

impl<S: Scalar> PolygonData<S> {
    /// A closed polygon; validates the bracket invariants.
    pub fn closed(vertices: Vec<Vec2<S>>) -> Result<Self> {
        let p = PolygonData { vertices, closed: true, monodromy: Mat2::identity() };
        p.validate()?;
        Ok(p)
    }

    /// A twisted polygon with the given vertex monodromy.
    pub fn twisted(vertices: Vec<Vec2<S>>, monodromy: Mat2<S>) -> Result<Self> {
        if !approx_eq(&monodromy.det(), &S::one(), FLOAT_TOL) {
            return Err(Error::BadMonodromy);
        }
        let closed = monodromy.is_identity(FLOAT_TOL);
        let monodromy = if closed { Mat2::identity() } else { monodromy };
        let p = PolygonData { vertices, closed, monodromy };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// `P_i` for any integer `i`, wrapping through the monodromy.
    pub fn vertex(&self, i: i64) -> Vec2<S> {
        let n = self.n() as i64;
        let (q, r) = (i.div_euclid(n), i.rem_euclid(n) as usize);
        let base = &self.vertices[r];
        if q == 0 || self.closed {
            return base.clone();
        }
        let m = if q > 0 {
            self.monodromy.clone()
        } else {
            // det = 1, so the adjugate is the inverse.
            self.monodromy.adjugate()
        };
        m.pow(q.unsigned_abs() as u32).apply(base)
    }

    /// Consecutive and short-diagonal brackets must not vanish.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 3 {
            return Err(Error::WrongArity { expected: ">= 3", got: n });
        }
        for i in 0..n as i64 {
            let (prev, cur, next) = (self.vertex(i - 1), self.vertex(i), self.vertex(i + 1));
            if bracket_vanishes(&cur, &next) || bracket_vanishes(&prev, &next) {
                return Err(Error::DegeneratePolygon { index: i as usize });
            }
        }
        Ok(())
    }

    /// Applies a linear map to every vertex, conjugating the monodromy.
    pub fn transform(&self, m: &Mat2<S>) -> Self {
        let vertices = self.vertices.iter().map(|p| m.apply(p)).collect();
        let monodromy = if self.closed {
            Mat2::identity()
        } else {
            let inv = m.inverse().expect("transform needs an invertible matrix");
            m.mul(&self.monodromy).mul(&inv)
        };
        PolygonData { vertices, closed: self.closed, monodromy }
    }

    /// The central reflection `-P`.
    pub fn negated(&self) -> Self {
        PolygonData {
            vertices: self.vertices.iter().map(|p| -p.clone()).collect(),
            closed: self.closed,
            monodromy: self.monodromy.clone(),
        }
    }

    pub fn to_f64(&self) -> PolygonData<f64> {
        PolygonData {
            vertices: self.vertices.iter().map(Vec2::to_f64).collect(),
            closed: self.closed,
            monodromy: self.monodromy.to_f64(),
        }
    }

    /// Largest vertex coordinate difference, as a float.
    pub fn max_vertex_diff(&self, o: &Self) -> f64 {
        self.vertices
            .iter()
            .zip(&o.vertices)
            .map(|(a, b)| (a.clone() - b.clone()).norm_f64())
            .fold(0.0, f64::max)
    }

    /// Exact equality for rationals, vertexwise relative `tol` for floats.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        if self.n() != o.n() {
            return false;
        }
        if S::EXACT {
            return self.vertices == o.vertices;
        }
        let scale = self.vertices.iter().map(Vec2::norm_f64).fold(1.0, f64::max);
        self.max_vertex_diff(o) <= tol * scale
    }
}

impl<S: Scalar> SVCoords<S> {
    pub fn new(s: Vec<S>, v: Vec<S>) -> Result<Self> {
        if s.len() != v.len() || s.len() < 3 {
            return Err(Error::WrongArity { expected: ">= 3 with |s| = |v|", got: s.len().min(v.len()) });
        }
        let sv = SVCoords { s, v };
        if let Some(k) = sv.s.iter().chain(&sv.v).position(|x| x.is_zero()) {
            return Err(Error::DegeneratePolygon { index: k % sv.s.len() });
        }
        Ok(sv)
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// `s[i]` with cyclic index.
    pub fn s_at(&self, i: i64) -> S {
        self.s[i.rem_euclid(self.n() as i64) as usize].clone()
    }

    /// `v[i]` with cyclic index.
    pub fn v_at(&self, i: i64) -> S {
        self.v[i.rem_euclid(self.n() as i64) as usize].clone()
    }

    pub fn to_f64(&self) -> SVCoords<f64> {
        SVCoords {
            s: self.s.iter().map(Scalar::to_f64).collect(),
            v: self.v.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Exact equality for rationals, entrywise relative `tol` for floats.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.n() == o.n()
            && self.s.iter().zip(&o.s).all(|(a, b)| approx_eq(a, b, tol))
            && self.v.iter().zip(&o.v).all(|(a, b)| approx_eq(a, b, tol))
    }

    /// Largest entrywise relative difference, as a float.
    pub fn max_rel_diff(&self, o: &Self) -> f64 {
        self.s
            .iter()
            .zip(&o.s)
            .chain(self.v.iter().zip(&o.v))
            .map(|(a, b)| crate::scalar::rel_diff(a.to_f64(), b.to_f64()))
            .fold(0.0, f64::max)
    }

    /// The continuant arguments `a_j = v[j]/s[j-1]` and `b_j = s[j]/s[j-1]`.
    pub fn continuant_args(&self) -> (Vec<S>, Vec<S>) {
        let n = self.n() as i64;
        let a = (0..n).map(|j| self.v_at(j) / self.s_at(j - 1)).collect();
        let b = (0..n).map(|j| self.s_at(j) / self.s_at(j - 1)).collect();
        (a, b)
    }
}

/// `s[i] = [P_i,P_{i+1}]`, `v[i] = [P_{i-1},P_{i+1}]`, wrapping through the monodromy.
pub fn sv_coords<S: Scalar>(p: &PolygonData<S>) -> Result<SVCoords<S>> {
    let n = p.n() as i64;
    if n < 3 {
        return Err(Error::WrongArity { expected: ">= 3", got: p.n() });
    }
    let mut s = Vec::with_capacity(p.n());
    let mut v = Vec::with_capacity(p.n());
    for i in 0..n {
        let (prev, cur, next) = (p.vertex(i - 1), p.vertex(i), p.vertex(i + 1));
        if bracket_vanishes(&cur, &next) || bracket_vanishes(&prev, &next) {
            return Err(Error::DegeneratePolygon { index: i as usize });
        }
        s.push(bracket(&cur, &next));
        v.push(bracket(&prev, &next));
    }
    Ok(SVCoords { s, v })
}

/// Rebuilds vertices from `(s,v)` and the frame `(P_0, P_1)` by
/// `P_{i+1} = (v[i]/s[i-1]) P_i - (s[i]/s[i-1]) P_{i-1}`.
pub fn reconstruct<S: Scalar>(sv: &SVCoords<S>, frame: (Vec2<S>, Vec2<S>)) -> Result<PolygonData<S>> {
    let n = sv.n();
    let (p0, p1) = frame;
    if !approx_eq(&bracket(&p0, &p1), &sv.s[0], FLOAT_TOL) {
        return Err(Error::FrameMismatch);
    }
    let mut pts = vec![p0, p1];
    for i in 1..=n as i64 {
        let k = i as usize;
        let next = pts[k].scale(&(sv.v_at(i) / sv.s_at(i - 1))) - pts[k - 1].scale(&(sv.s_at(i) / sv.s_at(i - 1)));
        pts.push(next);
    }
    // M [P_0 P_1] = [P_n P_{n+1}]
    let base = Mat2::from_columns(&pts[0], &pts[1]);
    let image = Mat2::from_columns(&pts[n], &pts[n + 1]);
    let m = image.mul(&base.inverse().ok_or(Error::FrameMismatch)?);
    pts.truncate(n);
    PolygonData::twisted(pts, m)
}

/// The frame `P_0 = (1,0)`, `P_1 = (0, s[0])`.
pub fn canonical_frame<S: Scalar>(sv: &SVCoords<S>) -> (Vec2<S>, Vec2<S>) {
    (Vec2::new(S::one(), S::zero()), Vec2::new(S::zero(), sv.s[0].clone()))
}

/// Product of `[[0,1],[-s[i]/s[i-1], v[i]/s[i-1]]]`, later steps on the left.
pub fn monodromy<S: Scalar>(sv: &SVCoords<S>) -> Mat2<S> {
    (0..sv.n() as i64).fold(Mat2::identity(), |acc, i| {
        let den = sv.s_at(i - 1);
        let step = Mat2::new(S::zero(), S::one(), -(sv.s_at(i) / den.clone()), sv.v_at(i) / den);
        step.mul(&acc)
    })
}

/// `[[-b_0 D_{1,n-1}, D_{0,n-1}], [-b_0 D_{1,n}, D_{0,n}]]`.
pub fn monodromy_via_continuants<S: Scalar>(sv: &SVCoords<S>) -> Mat2<S> {
    let (a, b) = sv.continuant_args();
    let n = sv.n() as i64;
    let d = |i: i64, k: i64| continuant_range(&a, &b, i, k).expect("valid continuant range");
    let b0 = b[0].clone();
    Mat2::new(-(b0.clone() * d(1, n - 1)), d(0, n - 1), -(b0 * d(1, n)), d(0, n))
}

/// The continuants `D_{i,n+i-1}`, `i = 0..n-1`, over the periodic sequence.
///
/// These vanish for monodromy `Id` and also for `-Id`; use
/// [`is_closed_sv`] to tell the two apart.
pub fn closure_defect<S: Scalar>(sv: &SVCoords<S>) -> Vec<S> {
    let (a, b) = sv.continuant_args();
    let n = sv.n() as i64;
    (0..n).map(|i| continuant_range(&a, &b, i, n + i - 1).expect("valid continuant range")).collect()
}

/// True when the monodromy is the identity (exact, or within 1e-9 for floats).
pub fn is_closed_sv<S: Scalar>(sv: &SVCoords<S>) -> bool {
    monodromy(sv).is_identity(FLOAT_TOL)
}

/// Residuals of the Ptolemy-Plücker relations for n = 4, 5.
pub fn ptolemy_defect<S: Scalar>(sv: &SVCoords<S>) -> Result<Vec<S>> {
    let (s, v) = (|i: i64| sv.s_at(i), |i: i64| sv.v_at(i));
    match sv.n() {
        4 => Ok(vec![v(1) * v(2) - (s(0) * s(2) - s(1) * s(3)), v(3) + v(1), v(0) + v(2)]),
        5 => Ok((0..5).map(|i| v(i) * v(i + 1) + s(i) * v(i + 3) - s(i - 1) * s(i + 1)).collect()),
        n => Err(Error::WrongArity { expected: "{4, 5}", got: n }),
    }
}

/// Whether `s` is a regular value of the side-bracket map.
pub fn is_regular_value<S: Scalar>(s: &[S]) -> bool {
    let n = s.len();
    if n < 3 || s.iter().any(|x| x.is_zero()) {
        return false;
    }
    if n % 2 == 1 {
        return true;
    }
    let prod = |start: usize| s.iter().skip(start).step_by(2).fold(S::one(), |acc, x| acc * x.clone());
    let (even, odd) = (prod(0), prod(1));
    even != odd && even != -odd
}

/// Largest |defect| as a float (convenience for reports).
pub fn closure_defect_norm<S: Scalar>(sv: &SVCoords<S>) -> f64 {
    max_abs(closure_defect(sv)).to_f64()
}
