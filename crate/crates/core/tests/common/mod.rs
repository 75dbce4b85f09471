//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls the library's algorithms: determinants, brackets and
//! linear solves are written out directly so the tests compare two
//! unrelated computations.

#![allow(dead_code)]

use centroaffine::{Mat2, PolygonData, Rational, Scalar, Vec2};
use num_traits::{One, Zero};
use proptest::prelude::*;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

pub fn qi(p: i64) -> Rational {
    Rational::from_i64(p)
}

pub fn pt(x: i64, y: i64) -> Vec2<Rational> {
    Vec2::new(qi(x), qi(y))
}

/// `a.x b.y - b.x a.y`, written out.
pub fn det2<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>) -> S {
    a.x.clone() * b.y.clone() - b.x.clone() * a.y.clone()
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Rational::zero();
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect()).collect();
        let term = m[0][col].clone() * det_cofactor(&minor);
        total = if col % 2 == 0 { total + term } else { total - term };
    }
    total
}

/// Vertex `P_k` of a twisted polygon for any integer `k`, by repeated monodromy.
pub fn vertex<S: Scalar>(p: &PolygonData<S>, k: i64) -> Vec2<S> {
    let n = p.n() as i64;
    let (wraps, idx) = (k.div_euclid(n), k.rem_euclid(n) as usize);
    let mut v = p.vertices[idx].clone();
    let m = if wraps >= 0 { p.monodromy.clone() } else { p.monodromy.inverse().expect("det 1") };
    for _ in 0..wraps.abs() {
        v = m.apply(&v);
    }
    v
}

/// Side and diagonal brackets straight from the vertex sequence.
pub fn brackets<S: Scalar>(p: &PolygonData<S>) -> (Vec<S>, Vec<S>) {
    let n = p.n() as i64;
    let s = (0..n).map(|i| det2(&vertex(p, i), &vertex(p, i + 1))).collect();
    let v = (0..n).map(|i| det2(&vertex(p, i - 1), &vertex(p, i + 1))).collect();
    (s, v)
}

/// `[[a, b], [c, d]]` with columns `u`, `w`.
pub fn columns<S: Scalar>(u: &Vec2<S>, w: &Vec2<S>) -> Mat2<S> {
    Mat2::new(u.x.clone(), w.x.clone(), u.y.clone(), w.y.clone())
}

/// The coefficient monodromy from the vertices alone.
///
/// The recursion maps the pair `(P_{i-1}, P_i)` to `(P_i, P_{i+1})`, so after
/// `n` steps `[P_{n-1} P_n] = F M^T` with `F = [P_{-1} P_0]`, while the vertex
/// monodromy gives `[P_{n-1} P_n] = V F`. Hence `M = (F^{-1} V F)^T`.
pub fn coefficient_monodromy(p: &PolygonData<Rational>) -> Mat2<Rational> {
    let f = columns(&vertex(p, -1), &vertex(p, 0));
    f.inverse().expect("independent frame").mul(&p.monodromy).mul(&f).transpose()
}

/// `[P_i, Q_i] = c` and `[Q_i, Q_{i+1}] = [P_i, P_{i+1}]` for every `i`, exactly.
pub fn is_c_related_exact(p: &PolygonData<Rational>, qq: &PolygonData<Rational>, c: &Rational) -> bool {
    let n = p.n() as i64;
    (0..n).all(|i| {
        det2(&vertex(p, i), &vertex(qq, i)) == *c
            && det2(&vertex(qq, i), &vertex(qq, i + 1)) == det2(&vertex(p, i), &vertex(p, i + 1))
    })
}

/// Worst defect of the c-relation brackets, relative to the bracket scale.
pub fn c_relation_defect(p: &PolygonData<f64>, qq: &PolygonData<f64>, c: f64) -> f64 {
    let n = p.n() as i64;
    let mut worst = 0.0f64;
    for i in 0..n {
        let (a, b) = (vertex(p, i), vertex(qq, i));
        let scale = 1.0 + a.norm_f64() * b.norm_f64();
        worst = worst.max((det2(&a, &b) - c).abs() / scale);
        let side_p = det2(&a, &vertex(p, i + 1));
        let side_q = det2(&b, &vertex(qq, i + 1));
        worst = worst.max((side_p - side_q).abs() / (1.0 + side_p.abs()));
    }
    worst
}

/// `f'(0)` exactly for a polynomial `f` of degree at most `2m`, from `f(+-1), ..., f(+-m)`.
pub fn exact_derivative(f: impl Fn(i64) -> Rational, m: i64) -> Rational {
    let fact = |k: i64| (1..=k).fold(qi(1), |acc, j| acc * qi(j));
    (1..=m).fold(qi(0), |acc, j| {
        let sign = if j % 2 == 1 { qi(1) } else { qi(-1) };
        let w = sign * fact(m) * fact(m) / (qi(j) * fact(m - j) * fact(m + j));
        acc + w * (f(j) - f(-j))
    })
}

/// Evaluates `sum c_k x^k`.
pub fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Coefficients of the polynomial through `(x_k, y_k)` by solving the Vandermonde system.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    let n = xs.len();
    let mut m: Vec<Vec<Rational>> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let mut row: Vec<Rational> = (0..n).map(|k| num_traits::pow(x.clone(), k)).collect();
            row.push(y.clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("distinct nodes");
        m.swap(col, piv);
        let inv = Rational::one() / m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, p) in m[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * p;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n].clone()).collect()
}

/// Cyclically sparse subsets of `0..n` by brute-force filtering of all bitmasks.
pub fn sparse_masks(n: usize) -> Vec<u32> {
    (0u32..1 << n)
        .filter(|m| (0..n).all(|i| !(m >> i & 1 == 1 && m >> ((i + 1) % n) & 1 == 1)))
        .collect()
}

/// A rational with numerator in `[-num, num]` and denominator in `[1, den]`.
pub fn rat(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    (-num..=num, 1..=den).prop_map(|(p, d)| q(p, d))
}

pub fn nonzero_rat(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    rat(num, den).prop_filter("nonzero", |x| !x.is_zero())
}

pub fn point_strategy() -> impl Strategy<Value = Vec2<Rational>> {
    (rat(9, 4), rat(9, 4)).prop_map(|(x, y)| Vec2::new(x, y))
}

/// Closed rational polygons with nonvanishing side and diagonal brackets.
pub fn closed_polygon(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PolygonData<Rational>> {
    n.prop_flat_map(|n| proptest::collection::vec(point_strategy(), n)).prop_filter_map("degenerate brackets", |pts| {
        let p = PolygonData::closed(pts).ok()?;
        centroaffine::polygon::sv_coords(&p).ok().map(|_| p)
    })
}

/// An SL(2) matrix as a product of shears with small rational entries.
pub fn sl2_strategy() -> impl Strategy<Value = Mat2<Rational>> {
    (rat(3, 2), rat(3, 2), rat(3, 2)).prop_map(|(a, b, c)| {
        let one = qi(1);
        let zero = qi(0);
        let u = |t: Rational| Mat2::new(one.clone(), t, zero.clone(), one.clone());
        let l = |t: Rational| Mat2::new(one.clone(), zero.clone(), t, one.clone());
        u(a).mul(&l(b)).mul(&u(c))
    })
}

/// Twisted rational polygons with an SL(2) monodromy.
pub fn twisted_polygon(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PolygonData<Rational>> {
    (n.prop_flat_map(|n| proptest::collection::vec(point_strategy(), n)), sl2_strategy()).prop_filter_map(
        "degenerate brackets",
        |(pts, m)| {
            let p = PolygonData::twisted(pts, m).ok()?;
            centroaffine::polygon::sv_coords(&p).ok().map(|_| p)
        },
    )
}
