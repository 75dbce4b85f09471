//! Seeded generators for polygons, coordinates and SL(2) matrices.
//!
//! Everything is driven by a [`ChaCha8Rng`] so a seed fixes every output.
//! Rational data uses small numerators and denominators to keep exact
//! arithmetic cheap.

use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::polygon::{PolygonData, SVCoords};
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type Rng64 = ChaCha8Rng;

/// Attempts allowed before a rejection sampler gives up.
pub const MAX_ATTEMPTS: usize = 10_000;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A per-trial generator derived from a suite seed.
pub fn trial_rng(seed: u64, trial: u64) -> Rng64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial + 1);
    r
}

/// `p/q` with `|p| <= num`, `1 <= q <= den`.
pub fn small_ratio<S: Scalar>(r: &mut Rng64, num: i64, den: i64) -> S {
    S::from_ratio(r.gen_range(-num..=num), r.gen_range(1..=den))
}

/// A nonzero `p/q`.
pub fn nonzero_ratio<S: Scalar>(r: &mut Rng64, num: i64, den: i64) -> S {
    loop {
        let x: S = small_ratio(r, num, den);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Converts an `f64` sample exactly.
pub fn lift<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("finite sample")
}

fn random_point<S: Scalar>(r: &mut Rng64) -> Vec2<S> {
    Vec2::new(small_ratio(r, 9, 4), small_ratio(r, 9, 4))
}

fn reject<T>(mut attempt: impl FnMut() -> Option<T>) -> Result<T> {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(t) = attempt() {
            return Ok(t);
        }
    }
    Err(Error::ExhaustedRejection { attempts: MAX_ATTEMPTS })
}

/// A product of elementary shears; exact determinant one.
pub fn random_sl2<S: Scalar>(r: &mut Rng64) -> Mat2<S> {
    let mut m = Mat2::identity();
    for k in 0..3 {
        let t: S = small_ratio(r, 3, 2);
        let shear = if k % 2 == 0 {
            Mat2::new(S::one(), t, S::zero(), S::one())
        } else {
            Mat2::new(S::one(), S::zero(), t, S::one())
        };
        m = shear.mul(&m);
    }
    m
}

/// Closed polygon with random small-rational vertices, rejecting degenerate brackets.
pub fn random_closed<S: Scalar>(r: &mut Rng64, n: usize) -> Result<PolygonData<S>> {
    if n < 3 {
        return Err(Error::WrongArity { expected: ">= 3", got: n });
    }
    reject(|| PolygonData::closed((0..n).map(|_| random_point(r)).collect()).ok())
}

/// Twisted polygon with a random SL(2) monodromy.
pub fn random_twisted<S: Scalar>(r: &mut Rng64, n: usize) -> Result<PolygonData<S>> {
    if n < 3 {
        return Err(Error::WrongArity { expected: ">= 3", got: n });
    }
    reject(|| {
        let m = random_sl2(r);
        PolygonData::twisted((0..n).map(|_| random_point(r)).collect(), m).ok()
    })
}

/// Random nonzero moduli coordinates; every such pair is a twisted polygon.
pub fn random_sv<S: Scalar>(r: &mut Rng64, n: usize) -> Result<SVCoords<S>> {
    let s = (0..n).map(|_| nonzero_ratio(r, 7, 3)).collect();
    let v = (0..n).map(|_| nonzero_ratio(r, 7, 3)).collect();
    SVCoords::new(s, v)
}

/// A closed polygon winding once counterclockwise around the origin, so all `s > 0`.
///
/// Consecutive angular gaps stay below `pi`; radii lie in `[0.6, 1.6]`.
pub fn random_positive_closed<S: Scalar>(r: &mut Rng64, n: usize) -> Result<PolygonData<S>> {
    if n < 3 {
        return Err(Error::WrongArity { expected: ">= 3", got: n });
    }
    reject(|| {
        let mut angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        let max_gap = (0..n)
            .map(|i| if i + 1 < n { angles[i + 1] - angles[i] } else { angles[0] + 2.0 * PI - angles[i] })
            .fold(0.0, f64::max);
        if max_gap > 0.9 * PI {
            return None;
        }
        let pts = angles
            .iter()
            .map(|a| {
                let rad = r.gen_range(0.6..1.6);
                Vec2::new(lift(rad * a.cos()), lift(rad * a.sin()))
            })
            .collect();
        PolygonData::closed(pts).ok().filter(|p| crate::polygon::sv_coords(p).is_ok())
    })
}

/// A pentagon with vertex angles `4 pi k / 5 + U(-spread, spread)` and radii in `[0.7, 1.3]`,
/// a perturbation of the pentagram.
pub fn random_star_pentagon(r: &mut Rng64, spread: f64) -> Result<PolygonData<f64>> {
    reject(|| {
        let pts = (0..5)
            .map(|k| {
                let a = 4.0 * PI * k as f64 / 5.0 + r.gen_range(-spread..=spread);
                let rad = r.gen_range(0.7..1.3);
                Vec2::new(rad * a.cos(), rad * a.sin())
            })
            .collect();
        PolygonData::closed(pts).ok()
    })
}

/// Regular `n`-gon scaled to unit side brackets.
pub fn regular_polygon(n: usize) -> Result<PolygonData<f64>> {
    if n < 3 {
        return Err(Error::WrongArity { expected: ">= 3", got: n });
    }
    let step = 2.0 * PI / n as f64;
    let rad = (1.0 / step.sin()).sqrt();
    PolygonData::closed((0..n).map(|k| Vec2::new(rad * (k as f64 * step).cos(), rad * (k as f64 * step).sin())).collect())
}

/// A uniform sample in `[lo, hi)`.
pub fn uniform(r: &mut Rng64, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::sv_coords;
    use crate::scalar::Rational;

    #[test]
    fn seeds_reproduce() {
        let a: PolygonData<Rational> = random_closed(&mut rng(7), 5).unwrap();
        let b: PolygonData<Rational> = random_closed(&mut rng(7), 5).unwrap();
        assert_eq!(a, b);
        let t: PolygonData<Rational> = random_twisted(&mut trial_rng(7, 3), 4).unwrap();
        assert_eq!(t.monodromy.det(), Rational::from_i64(1));
    }

    #[test]
    fn positive_and_regular() {
        let p: PolygonData<f64> = random_positive_closed(&mut rng(1), 6).unwrap();
        assert!(sv_coords(&p).unwrap().s.iter().all(|s| *s > 0.0));
        let reg = regular_polygon(5).unwrap();
        let sv = sv_coords(&reg).unwrap();
        assert!(sv.s.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!(sv.v.iter().all(|v| (v - 0.618_033_988_749_895).abs() < 1e-12));
    }
}
