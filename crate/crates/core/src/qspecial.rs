//! q-Pochhammer symbols, theta functions, the bracket `[u]`, double products
//! `{z}`, the q-Gamma function and the basic hypergeometric series ₂φ₁.

use crate::error::{Error, Result};
use crate::scalar::{cre, lit, one, rpow, zero, Real};
use num_complex::Complex;

/// Hard cap on factors of any infinite product. Products stop earlier, as soon
/// as the next factor differs from 1 by less than machine epsilon.
pub const MAX_PRODUCT_FACTORS: usize = 200_000;

/// Moduli `q`, `r` and the derived nome `p = q^{2r}`, with truncation data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusParams<T: Real> {
    pub q: T,
    pub r: T,
    pub p: T,
    /// Maximum number of terms of any ₂φ₁ partial sum.
    pub series_cutoff: usize,
    /// Number of `p`-factors after which `p^k < tol·1e-3`.
    pub product_cutoff: usize,
    pub tol: T,
}

impl<T: Real> ModulusParams<T> {
    pub fn new(q: T, r: T) -> Result<Self> {
        Self::with_tol(q, r, lit(1e-10))
    }

    pub fn with_tol(q: T, r: T, tol: T) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
        }
        if !(r > T::zero()) {
            return Err(Error::Domain(format!("r = {r} must be positive")));
        }
        if !(tol > T::zero()) {
            return Err(Error::Domain(format!("tol = {tol} must be positive")));
        }
        let p = q.powf(lit::<T>(2.0) * r);
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Domain(format!("p = q^(2r) = {p} underflows or is not in (0, 1)")));
        }
        let target = (tol * lit(1e-3)).ln();
        let product_cutoff = (target / p.ln()).ceil().to_usize().unwrap_or(1).max(1);
        Ok(ModulusParams { q, r, p, series_cutoff: 20_000, product_cutoff, tol })
    }

    /// Real constant `q^{r/4} e^{iπ/4} (−2πi/log p)^{−1/2} = q^{r/4} (|log p|/2π)^{1/2}`.
    pub fn bracket_prefactor(&self) -> T {
        let two_pi = lit::<T>(2.0) * T::PI();
        self.q.powf(self.r / lit(4.0)) * (self.p.ln().abs() / two_pi).sqrt()
    }
}

/// Length of a q-Pochhammer symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Len {
    Finite(usize),
    Infinite,
}

/// `(x; q)_n = ∏_{k<n} (1 − x q^k)`.
pub fn qpoch<T: Real>(x: Complex<T>, q: T, n: Len) -> Result<Complex<T>> {
    match n {
        Len::Finite(n) => {
            let mut acc = one();
            let mut t = x;
            for _ in 0..n {
                acc = acc * (one::<T>() - t);
                t = t * q;
            }
            Ok(acc)
        }
        Len::Infinite => {
            if q.abs() >= T::one() {
                return Err(Error::Domain(format!("infinite product needs |q| < 1, got {q}")));
            }
            Ok(qpoch_inf(x, q))
        }
    }
}

/// `(x; q)_∞` for `|q| < 1`, stopped once factors equal 1 to machine precision.
pub fn qpoch_inf<T: Real>(x: Complex<T>, q: T) -> Complex<T> {
    let stop = T::epsilon() * lit(1e-2);
    let mut acc = one();
    let mut t = x;
    for _ in 0..MAX_PRODUCT_FACTORS {
        if t.norm() < stop {
            break;
        }
        acc = acc * (one::<T>() - t);
        t = t * q;
    }
    acc
}

/// `Θ_p(z) = (z;p)_∞ (p/z;p)_∞ (p;p)_∞`.
pub fn theta_p<T: Real>(z: Complex<T>, p: T) -> Result<Complex<T>> {
    if z == zero() {
        return Err(Error::Domain("theta_p at z = 0".into()));
    }
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Domain(format!("theta_p needs 0 < p < 1, got {p}")));
    }
    Ok(theta_unchecked(z, p))
}

pub(crate) fn theta_unchecked<T: Real>(z: Complex<T>, p: T) -> Complex<T> {
    qpoch_inf(z, p) * qpoch_inf(cre::<T>(p) / z, p) * qpoch_inf(cre(p), p)
}

/// `[u] = q^{r/4} e^{iπ/4} (−2πi/log p)^{−1/2} q^{u²/r − u} Θ_p(q^{2u})`.
pub fn bracket<T: Real>(u: Complex<T>, params: &ModulusParams<T>) -> Complex<T> {
    let ModulusParams { q, r, p, .. } = *params;
    let gauss = rpow(q, u * u / r - u);
    let z = rpow(q, u * lit::<T>(2.0));
    gauss * theta_unchecked(z, p) * params.bracket_prefactor()
}

/// `{z} = ∏_{n,m≥0} (1 − z ξ^{2n} p^m)`.
pub fn dbl_prod<T: Real>(z: Complex<T>, p: T, xi: T) -> Complex<T> {
    let stop = T::epsilon() * lit(1e-2);
    let xi2 = xi * xi;
    let mut acc = one();
    let mut t = z;
    for _ in 0..MAX_PRODUCT_FACTORS {
        if t.norm() < stop {
            break;
        }
        acc = acc * qpoch_inf(t, p);
        t = t * xi2;
    }
    acc
}

/// `{z}` with its `(n, m) = (0, 0)` factor `1 − z` removed.
pub fn dbl_prod_punctured<T: Real>(z: Complex<T>, p: T, xi: T) -> Complex<T> {
    dbl_prod(z * xi * xi, p, xi) * qpoch_inf(z * p, p)
}

/// `Γ_q(z) = (q;q)_∞ / (q^z;q)_∞ · (1−q)^{1−z}`.
pub fn qgamma<T: Real>(z: Complex<T>, q: T) -> Result<Complex<T>> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::Domain(format!("q-Gamma needs 0 < q < 1, got {q}")));
    }
    let k = z.re.round();
    if k <= T::zero() && (z - cre(k)).norm() < lit(1e-12) {
        return Err(Error::Pole(format!("Γ_q has a pole at z = {}", z.re)));
    }
    let den = qpoch_inf(rpow(q, z), q);
    Ok(qpoch_inf(cre(q), q) / den * rpow(T::one() - q, one::<T>() - z))
}

/// `₂φ₁(A, B; C; q, z) = Σ (A;q)_n (B;q)_n / ((C;q)_n (q;q)_n) zⁿ`, summed by the
/// running term ratio.
pub fn phi21<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    q: T,
    z: Complex<T>,
) -> Result<Complex<T>> {
    phi21_cut(a, b, c, q, z, 20_000)
}

pub fn phi21_cut<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    q: T,
    z: Complex<T>,
    cutoff: usize,
) -> Result<Complex<T>> {
    let az = z.norm();
    if az >= T::one() {
        return Err(Error::Divergence(format!("₂φ₁ argument |z| = {az} ≥ 1")));
    }
    let eps = T::epsilon();
    let pole = lit::<T>(1e-14);
    let mut sum = zero();
    let mut term = one::<T>();
    let mut qk = T::one();
    for _ in 0..cutoff {
        sum = sum + term;
        let den = (one::<T>() - c * qk) * (T::one() - qk * q);
        if den.norm() < pole {
            return Err(Error::Pole("₂φ₁ lower parameter hits q^{-k}".into()));
        }
        term = term * (one::<T>() - a * qk) * (one::<T>() - b * qk) / den * z;
        qk = qk * q;
        // The term ratio tends to z, so the tail is bounded by |term|/(1−|z|).
        if term.norm() <= eps * sum.norm() * (T::one() - az) {
            return Ok(sum + term);
        }
        if term == zero() {
            return Ok(sum);
        }
    }
    Err(Error::Divergence(format!("₂φ₁ did not converge in {cutoff} terms")))
}

/// Relative residual of the ₂φ₁ connection formula between `z → ∞` and `z → 0`
/// with parameters `q^a, q^b, q^c`.
pub fn connection_residual<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    q: T,
    z: Complex<T>,
) -> Result<T> {
    let qa = rpow(q, a);
    let qb = rpow(q, b);
    let qc = rpow(q, c);
    let lhs = phi21(qa, qb, qc, q, one::<T>() / z)?;
    let w = rpow(q, c - a - b + one::<T>()) * z;
    let th = |x: Complex<T>| theta_p(x, q);
    let g = |x: Complex<T>| qgamma(x, q);
    let t0 = th(z * q)?;
    let c1 = g(c)? * g(b - a)? * th(rpow(q, one::<T>() - a) * z)? / (g(b)? * g(c - a)? * t0);
    let c2 = g(c)? * g(a - b)? * th(rpow(q, one::<T>() - b) * z)? / (g(a)? * g(c - b)? * t0);
    let one_ = one::<T>();
    let s1 = phi21(qa, rpow(q, a - c + one_), rpow(q, a - b + one_), q, w)?;
    let s2 = phi21(qb, rpow(q, b - c + one_), rpow(q, b - a + one_), q, w)?;
    let rhs = c1 * s1 + c2 * s2;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}
