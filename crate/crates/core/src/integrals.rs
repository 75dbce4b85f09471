//! Spectral integrals of the c-relation, closed-polygon relations, the
//! infinitesimal vector field and the dressing chain.
//!
//! With `g_i = v[i]/(s[i-1] s[i])` and `t = lambda^{-2}`, the Lax trace is
//! `lambda^n * sum_k F_k t^k`, where the generating function runs over the
//! cyclically sparse subsets `I`:
//! `sum_I prod_{j, j+1 not in I} g_j * prod_{i in I} (t - 1/s[i-1]^2)`.

use crate::continuant::continuant_range;
use crate::error::{Error, Result};
use crate::lax::lax_matrix;
use crate::poly::Poly;
use crate::polygon::SVCoords;
use crate::scalar::Scalar;

/// Overall factor relating the dressing chain to the pushed-forward field:
/// `dressing_rhs = DRESSING_SCALE * d/dt g` along `xi_field`.
pub const DRESSING_SCALE: i64 = -1;

/// Blow-up threshold for [`flow`].
pub const BLOWUP: f64 = 1e12;

/// `F_k`, `k = 0..floor((n-1)/2)`, ascending in `k` (degree `n - 2k` in lambda).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralVector<S> {
    pub f: Vec<S>,
}

impl<S: Scalar> IntegralVector<S> {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Largest relative difference between two vectors of integrals.
    pub fn max_rel_diff(&self, o: &Self) -> f64 {
        self.f
            .iter()
            .zip(&o.f)
            .map(|(a, b)| crate::scalar::rel_diff(a.to_f64(), b.to_f64()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressingState<S> {
    pub g: Vec<S>,
    pub beta: Vec<S>,
}

/// Cyclically sparse subsets of `{0..n-1}` as sorted index lists, by bitmask order.
pub fn sparse_subsets(n: usize) -> Vec<Vec<usize>> {
    assert!((1..=30).contains(&n), "sparse_subsets supports 1 <= n <= 30");
    let full = (1u32 << n) - 1;
    (0..=full)
        .filter(|&m| {
            let rot = ((m << 1) | (m >> (n - 1))) & full;
            n == 1 || m & rot == 0
        })
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// `g_i = v[i] / (s[i-1] s[i])`.
pub fn g_vars<S: Scalar>(sv: &SVCoords<S>) -> Vec<S> {
    (0..sv.n() as i64).map(|i| sv.v_at(i) / (sv.s_at(i - 1) * sv.s_at(i))).collect()
}

/// Number of nontrivial integrals, `floor((n+1)/2)`.
pub fn integral_count(n: usize) -> usize {
    n.div_ceil(2)
}

/// The generating-function coefficients in `t`, including the constant
/// top coefficient `2` that appears for even n.
pub fn generating_poly<S: Scalar>(sv: &SVCoords<S>) -> Poly<S> {
    let n = sv.n();
    let g = g_vars(sv);
    let mut total = Poly::zero();
    for subset in sparse_subsets(n) {
        let mut mask = vec![false; n];
        for &i in &subset {
            mask[i] = true;
        }
        let gprod = (0..n).filter(|&j| !mask[j] && !mask[(j + 1) % n]).fold(S::one(), |acc, j| acc * g[j].clone());
        let term = subset.iter().fold(Poly::constant(gprod), |acc, &i| {
            let w = S::one() / (sv.s_at(i as i64 - 1) * sv.s_at(i as i64 - 1));
            acc * Poly::new(vec![-w, S::one()])
        });
        total = total + term;
    }
    total
}

use num_traits::Zero;

/// The integrals `F_0..F_q` of the sparse-subset generating function.
pub fn integrals_f<S: Scalar>(sv: &SVCoords<S>) -> IntegralVector<S> {
    let poly = generating_poly(sv);
    IntegralVector { f: (0..integral_count(sv.n())).map(|k| poly.coeff(k)).collect() }
}

/// Lax trace via continuants with `a_i = lambda g_i`, `b_i = lambda^2/s[i-1]^2 - 1`:
/// `D_{0,n} - b_0 D_{1,n-1}`.
///
/// This differs from the trace of [`lax_matrix`] by the sign `(-1)^n`,
/// which cancels in every conjugation invariant.
pub fn lax_trace_poly<S: Scalar>(sv: &SVCoords<S>) -> Poly<S> {
    let n = sv.n() as i64;
    let g = g_vars(sv);
    let a: Vec<Poly<S>> = g.iter().map(|gi| Poly::new(vec![S::zero(), gi.clone()])).collect();
    let b: Vec<Poly<S>> = (0..n)
        .map(|i| {
            let s = sv.s_at(i - 1);
            Poly::new(vec![-S::one(), S::zero(), S::one() / (s.clone() * s)])
        })
        .collect();
    let d = |i: i64, k: i64| continuant_range(&a, &b, i, k).expect("valid continuant range");
    d(0, n) - b[0].clone() * d(1, n - 1)
}

/// `(tr L)^2 / det L` at `lambda`.
pub fn conjugacy_invariant<S: Scalar>(sv: &SVCoords<S>, lambda: &S) -> Result<S> {
    let l = lax_matrix(sv, lambda).m;
    let det = l.det();
    let scale = (0..sv.n() as i64)
        .map(|i| (lambda.clone() * lambda.clone() / (sv.s_at(i) * sv.s_at(i))).to_f64().abs() + 1.0)
        .product::<f64>();
    if det.is_negligible(scale, 1e-14) {
        return Err(Error::SingularSpectral);
    }
    let tr = l.trace();
    Ok(tr.clone() * tr / det)
}

/// Residuals of `F_0 = 2/prod s` and `F_1 = -(1/2) (sum s^2) F_0` on closed polygons.
pub fn closed_relations_defect<S: Scalar>(sv: &SVCoords<S>) -> (S, S) {
    let f = integrals_f(sv);
    let prod = sv.s.iter().fold(S::one(), |acc, s| acc * s.clone());
    let sum_sq = sv.s.iter().fold(S::zero(), |acc, s| acc + s.clone() * s.clone());
    let two = S::from_i64(2);
    let r0 = f.f[0].clone() - two.clone() / prod;
    let r1 = f.f[1].clone() + sum_sq / two * f.f[0].clone();
    (r0, r1)
}

fn require_odd(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::EvenArity { n });
    }
    Ok(())
}

/// `v'[i] = v[i] sum_{k=1}^{n-1} (-1)^{k-1} g_{i+k} + s[i]/s[i-1] - s[i-1]/s[i]`; `s' = 0`.
pub fn xi_field<S: Scalar>(sv: &SVCoords<S>) -> Result<Vec<S>> {
    require_odd(sv.n())?;
    let n = sv.n() as i64;
    let g = g_vars(sv);
    Ok((0..n)
        .map(|i| {
            let alt = alternating_tail(&g, i);
            sv.v_at(i) * alt + sv.s_at(i) / sv.s_at(i - 1) - sv.s_at(i - 1) / sv.s_at(i)
        })
        .collect())
}

/// `g_{i+1} - g_{i+2} + ... + (-1)^n g_{i+n-1}`.
fn alternating_tail<S: Scalar>(g: &[S], i: i64) -> S {
    let n = g.len() as i64;
    (1..n).fold(S::zero(), |acc, k| {
        let gk = g[(i + k).rem_euclid(n) as usize].clone();
        if k % 2 == 1 {
            acc + gk
        } else {
            acc - gk
        }
    })
}

/// `g_i = v[i]/(s[i-1]s[i])`, `beta_i = -1/s[i-1]^2`.
pub fn dressing_state<S: Scalar>(sv: &SVCoords<S>) -> Result<DressingState<S>> {
    require_odd(sv.n())?;
    let beta = (0..sv.n() as i64).map(|i| -(S::one() / (sv.s_at(i - 1) * sv.s_at(i - 1)))).collect();
    Ok(DressingState { g: g_vars(sv), beta })
}

/// `g'_i = -g_i (g_{i+1} - g_{i+2} + ... - g_{i+n-1}) + beta_i - beta_{i+1}`.
pub fn dressing_rhs<S: Scalar>(st: &DressingState<S>) -> Result<Vec<S>> {
    let n = st.g.len();
    require_odd(n)?;
    Ok((0..n)
        .map(|i| -(st.g[i].clone() * alternating_tail(&st.g, i as i64)) + st.beta[i].clone() - st.beta[(i + 1) % n].clone())
        .collect())
}

/// Fixed-step RK4 integration of [`xi_field`] over `[0, T]`.
pub fn flow(sv: &SVCoords<f64>, t_end: f64, dt: f64) -> Result<SVCoords<f64>> {
    flow_observed(sv, t_end, dt, |_, _| {})
}

/// As [`flow`], calling `observe(t, state)` at the start and after every step.
pub fn flow_observed(
    sv: &SVCoords<f64>,
    t_end: f64,
    dt: f64,
    mut observe: impl FnMut(f64, &SVCoords<f64>),
) -> Result<SVCoords<f64>> {
    require_odd(sv.n())?;
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidInput("flow needs dt > 0 and T >= 0".into()));
    }
    let mut state = sv.clone();
    observe(0.0, &state);
    if t_end == 0.0 {
        return Ok(state);
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let shifted = |base: &SVCoords<f64>, k: &[f64], w: f64| SVCoords {
        s: base.s.clone(),
        v: base.v.iter().zip(k).map(|(v, k)| v + w * k).collect(),
    };
    for step in 0..steps {
        let k1 = xi_field(&state)?;
        let k2 = xi_field(&shifted(&state, &k1, h / 2.0))?;
        let k3 = xi_field(&shifted(&state, &k2, h / 2.0))?;
        let k4 = xi_field(&shifted(&state, &k3, h))?;
        for i in 0..state.n() {
            state.v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let time = (step + 1) as f64 * h;
        if state.v.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
            return Err(Error::StepBlowup { time });
        }
        observe(time, &state);
    }
    Ok(state)
}
