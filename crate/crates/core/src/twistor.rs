//! Face-type twistor `F(z, λ)` in the vector representation, the elliptic
//! dynamical R matrix `R(z, λ) = σ(F(z⁻¹, λ)) R(z) F(z, λ)⁻¹`, and residuals
//! of the difference equation, the dynamical YBE and the shifted cocycle.
//!
//! Everything below is driven by the vector `a_j, j ∈ J` (≺ order) of
//! dynamical coordinates; public entry points accept a [`DynamicalWeight`].

use crate::error::{Error, Result};
use crate::liealg::{AlgebraSpec, DynamicalWeight, Family};
use crate::linalg::{lift12, lift13, lift23, CMat};
use crate::qspecial::{dbl_prod, phi21_cut, qpoch_inf, theta_unchecked, ModulusParams};
use crate::scalar::{cre, lit, zero, Real};
use crate::trigr::{trig_r, BlockMatrix, POLE_GUARD};
use crate::vectorrep::{a_vector, qt_matrix, qtheta_entries};
use num_complex::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Truncated ordered product `A_K ⋯ A_1`.
    Product,
    /// Closed 1×1 and 2×2 blocks; the `N × N` block of B, C, D is taken from
    /// the product (reported as [`Method::Hybrid`]).
    Closed,
    Hybrid,
}

#[derive(Clone, Debug)]
pub struct TwistorResult<T: Real> {
    pub f: BlockMatrix<T>,
    /// Product depth used (0 when no product entered).
    pub k: usize,
    pub method: Method,
    pub domain_ok: bool,
}

/// `max_{i,j} |w_ij^{±1}|` with `w_ij = q^{2(a_i − a_j)}`.
fn w_max<T: Real>(a: &[T], q: T) -> T {
    let lo = a.iter().fold(T::infinity(), |m, x| m.min(*x));
    let hi = a.iter().fold(T::neg_infinity(), |m, x| m.max(*x));
    q.powf(-lit::<T>(2.0) * (hi - lo))
}

/// Geometric rate of the product: the larger of `p·max|w^{±1}|` and
/// `max_{i≺j} w_ij`. The second term is the decay of the conjugated
/// off-diagonal entries of `R(0)` and of `Ad(q^{−2θ̄})^k F_ḡ − 1`.
pub fn product_rate<T: Real>(a: &[T], params: &ModulusParams<T>) -> T {
    let mut worst = params.p * w_max(a, params.q);
    for (x, ax) in a.iter().enumerate() {
        for ay in &a[x + 1..] {
            worst = worst.max(params.q.powf(lit::<T>(2.0) * (*ax - *ay)));
        }
    }
    worst
}

/// The truncated product with limit factor 1 converges: `a_i > a_j` for
/// `i ≺ j` and `p·max|w^{±1}| < 1`.
pub fn product_domain_ok<T: Real>(a: &[T], params: &ModulusParams<T>) -> bool {
    product_rate(a, params) < T::one()
}

/// Smallest `K` with `p^K < 1e-13` and `rate^K < 1e-13`.
pub fn default_depth<T: Real>(a: &[T], params: &ModulusParams<T>) -> usize {
    let target = lit::<T>(1e-13).ln();
    let rate = product_rate(a, params).max(params.p);
    if rate >= T::one() {
        return 0;
    }
    (target / rate.ln()).ceil().to_usize().unwrap_or(1).max(1) + 1
}

/// Depth for the cocycle check: the twistors there are also evaluated at
/// `λ + h`, whose products converge more slowly. `0` if a shift leaves the domain.
pub fn cocycle_depth<T: Real>(a: &[T], spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> usize {
    let mut k = default_depth(a, params);
    for &m in &spec.j {
        let d = default_depth(&shifted_a(a, m, spec), params);
        if d == 0 {
            return 0;
        }
        k = k.max(d);
    }
    k
}

/// `ln` of the diagonal of `q^{−2θ̄(λ)}`, up to a common constant.
fn ln_d<T: Real>(a: &[T], spec: &AlgebraSpec<T>) -> Vec<T> {
    qtheta_entries(spec, a).into_iter().map(|d| d.ln()).collect()
}

/// `(X ⊗ 1)^k M (X ⊗ 1)^{−k}` for diagonal `X = exp(ln_x)`, entrywise.
fn ad_slot1<T: Real>(m: &CMat<T>, lnx: &[T], k: usize) -> CMat<T> {
    let n = lnx.len();
    let kk = T::from_usize(k).unwrap();
    CMat::from_fn(n * n, |r, c| {
        let v = m[(r, c)];
        if v == zero() {
            v
        } else {
            v * (kk * (lnx[r / n] - lnx[c / n])).exp()
        }
    })
}

/// `A_K ⋯ A_1` with `A_k = Ad((q^{−2θ̄}⊗1)^k)[(q^T R(p^k z))⁻¹]`.
pub(crate) fn product_a<T: Real>(
    z: Complex<T>,
    a: &[T],
    k: usize,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<CMat<T>> {
    let lnd = ln_d(a, spec);
    let qt = qt_matrix(spec);
    let n2 = spec.dim * spec.dim;
    let mut f = CMat::identity(n2);
    let mut pk = T::one();
    let mut last = T::zero();
    for step in 1..=k {
        pk = pk * params.p;
        let m = &qt * &trig_r(z * pk, spec)?.mat;
        let ak = ad_slot1(&m.inverse()?, &lnd, step);
        last = (&ak - &CMat::identity(n2)).max_abs();
        f = &ak * &f;
    }
    if k > 0 && !(last < lit(1e-6)) {
        return Err(Error::Divergence(format!("twistor factor A_{k} differs from 1 by {last}")));
    }
    Ok(f)
}

fn a_checked<T: Real>(w: &DynamicalWeight<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Result<Vec<T>> {
    let a = a_vector(spec, w)?;
    if !product_domain_ok(&a, params) {
        return Err(Error::Domain(format!(
            "product rate {} ≥ 1: twistor product does not converge",
            product_rate(&a, params)
        )));
    }
    Ok(a)
}

pub fn twistor_numeric<T: Real>(
    z: Complex<T>,
    w: &DynamicalWeight<T>,
    k: usize,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<TwistorResult<T>> {
    let a = a_checked(w, spec, params)?;
    let f = product_a(z, &a, k, spec, params)?;
    Ok(TwistorResult { f: BlockMatrix::new(spec, z, f), k, method: Method::Product, domain_ok: true })
}

/// `f(z)`, the scalar of the 1×1 blocks.
pub fn f_scalar<T: Real>(z: Complex<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Complex<T> {
    let (p, q, xi) = (params.p, spec.q, spec.xi);
    let d = |x: Complex<T>| dbl_prod(x, p, xi);
    let (qq, x2) = (q * q, xi * xi);
    let pz = z * p;
    if spec.family == Family::A {
        return d(pz) * d(pz * x2) / (d(pz * qq) * d(pz * x2 / qq));
    }
    d(pz) * d(pz * xi / qq) * d(pz * qq * xi) * d(pz * x2) / (d(pz * qq) * d(pz * xi).powi(2) * d(pz * x2 / qq))
}

/// `[[X_ij^ij, X_ij^ji], [X_ji^ij, X_ji^ji]]` at `w = w_ij`.
pub fn x_block<T: Real>(z: Complex<T>, w: T, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Result<[[Complex<T>; 2]; 2]> {
    let (p, q) = (params.p, spec.q);
    let qq = q * q;
    let arg = z * p / qq;
    let cut = params.series_cutoff;
    let phi = |a: T, b: T, c: T| phi21_cut(cre(a), cre(b), cre(c), p, arg, cut);
    let wi = p / w;
    if (T::one() - w).abs() < lit(POLE_GUARD) || (T::one() - wi).abs() < lit(POLE_GUARD) {
        return Err(Error::Pole(format!("w = {w} makes 1 − w vanish")));
    }
    let dq = q - T::one() / q;
    Ok([
        [phi(w * qq, qq, w)?, cre(dq * w / (T::one() - w)) * phi(w * qq, p * qq, p * w)?],
        [z * (dq * wi / (T::one() - wi)) * phi(wi * qq, p * qq, p * wi)?, phi(wi * qq, qq, wi)?],
    ])
}

/// Ordered pairs `(i, j)` with `i ≺ j`, `i ≠ ±j`: the 2×2 sectors.
pub fn pairs<T: Real>(spec: &AlgebraSpec<T>) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for (x, &i) in spec.j.iter().enumerate() {
        for &j in &spec.j[x + 1..] {
            if i != -j {
                out.push((i, j));
            }
        }
    }
    out
}

/// `(row, col)` positions of the `N × N` sector `E_{ij} ⊗ E_{−i,−j}`.
fn nxn_positions<T: Real>(spec: &AlgebraSpec<T>) -> Vec<(usize, usize)> {
    let n = spec.dim;
    let ix = |x: i32| spec.index_of(x).unwrap();
    let mut out = Vec::new();
    if spec.family == Family::A {
        return out;
    }
    for &i in &spec.j {
        for &j in &spec.j {
            out.push((ix(i) * n + ix(-i), ix(j) * n + ix(-j)));
        }
    }
    out
}

fn closed_a<T: Real>(
    z: Complex<T>,
    a: &[T],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<(CMat<T>, usize)> {
    let n = spec.dim;
    let ix = |x: i32| spec.index_of(x).unwrap();
    let q = spec.q;
    let f0 = f_scalar(z, spec, params);
    let mut m = CMat::zeros(n * n);
    for &i in &spec.j {
        if i != 0 {
            m[(ix(i) * n + ix(i), ix(i) * n + ix(i))] = f0;
        }
    }
    for (i, j) in pairs(spec) {
        let w = q.powf(lit::<T>(2.0) * (a[ix(i)] - a[ix(j)]));
        let x = x_block(z, w, spec, params)?;
        let (ij, ji) = (ix(i) * n + ix(j), ix(j) * n + ix(i));
        m[(ij, ij)] = f0 * x[0][0];
        m[(ij, ji)] = f0 * x[0][1];
        m[(ji, ij)] = f0 * x[1][0];
        m[(ji, ji)] = f0 * x[1][1];
    }
    let mut k = 0;
    if spec.family != Family::A {
        if !product_domain_ok(a, params) {
            return Err(Error::Domain("N×N sector needs the product twistor, outside its domain".into()));
        }
        k = default_depth(a, params);
        let num = product_a(z, a, k, spec, params)?;
        for (r, c) in nxn_positions(spec) {
            m[(r, c)] = num[(r, c)];
        }
    }
    Ok((m, k))
}

pub fn twistor_closed<T: Real>(
    z: Complex<T>,
    w: &DynamicalWeight<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<TwistorResult<T>> {
    let a = a_vector(spec, w)?;
    let (m, k) = closed_a(z, &a, spec, params)?;
    let method = if spec.family == Family::A { Method::Closed } else { Method::Hybrid };
    Ok(TwistorResult { f: BlockMatrix::new(spec, z, m), k, method, domain_ok: product_domain_ok(&a, params) })
}

fn twistor_a<T: Real>(
    z: Complex<T>,
    a: &[T],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    method: Method,
    k: Option<usize>,
) -> Result<CMat<T>> {
    match method {
        Method::Product => {
            if !product_domain_ok(a, params) {
                return Err(Error::Domain("product twistor outside its convergence domain".into()));
            }
            product_a(z, a, k.unwrap_or_else(|| default_depth(a, params)), spec, params)
        }
        Method::Closed | Method::Hybrid => Ok(closed_a(z, a, spec, params)?.0),
    }
}

/// `ρ_ell(z) = f(z⁻¹) ρ(z) f(z)⁻¹` from its double-product form.
pub fn rho_ell<T: Real>(z: Complex<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Complex<T> {
    let (p, q, xi) = (params.p, spec.q, spec.xi);
    let d = |x: Complex<T>| dbl_prod(x, p, xi);
    let (qq, x2) = (q * q, xi * xi);
    let zi = z.inv();
    if spec.family == Family::A {
        let n = T::from_usize(spec.n).unwrap();
        let pre = q.powf(-n / (n + T::one()));
        let num = d(z * qq) * d(z * x2 / qq) * d(zi * p) * d(zi * (p * x2));
        let den = d(z) * d(z * x2) * d(zi * (p * qq)) * d(zi * (p * x2 / qq));
        return num / den * pre;
    }
    let num = d(z * qq)
        * d(z * xi).powi(2)
        * d(z * x2 / qq)
        * d(zi * p)
        * d(zi * (p * xi / qq))
        * d(zi * (p * qq * xi))
        * d(zi * (p * x2));
    let den = d(z)
        * d(z * xi / qq)
        * d(z * qq * xi)
        * d(z * x2)
        * d(zi * (p * qq))
        * d(zi * (p * xi)).powi(2)
        * d(zi * (p * x2 / qq));
    num / den / q
}

/// The four printed 2×2-sector functions of one pair `i ≺ j`.
#[derive(Clone, Copy, Debug)]
pub struct PairBlocks<T: Real> {
    pub i: i32,
    pub j: i32,
    pub w: T,
    pub r_ij_ij: Complex<T>,
    pub r_ji_ji: Complex<T>,
    /// Coefficient of `E_{ij} ⊗ E_{ji}`.
    pub r_ij_ji: Complex<T>,
    /// Coefficient of `E_{ji} ⊗ E_{ij}`.
    pub r_ji_ij: Complex<T>,
}

#[derive(Clone, Debug)]
pub struct ClosedBlocks<T: Real> {
    pub rho_ell: Complex<T>,
    pub pairs: Vec<PairBlocks<T>>,
}

pub fn pair_blocks<T: Real>(z: Complex<T>, i: i32, j: i32, w: T, params: &ModulusParams<T>, q: T) -> Result<PairBlocks<T>> {
    let p = params.p;
    let qq = q * q;
    let th = |x: Complex<T>| theta_unchecked(x, p);
    let qp = |x: T| qpoch_inf(cre(x), p);
    let wi = p / w;
    let nz = |v: Complex<T>, what: &str| -> Result<Complex<T>> {
        if v.norm() < lit(POLE_GUARD) {
            Err(Error::Pole(format!("{what} vanishes at w = {w}")))
        } else {
            Ok(v)
        }
    };
    let tz = th(z) / nz(th(z * qq), "Θ_p(q²z)")?;
    let tq = th(cre(qq));
    Ok(PairBlocks {
        i,
        j,
        w,
        r_ij_ij: qp(wi * qq) * qp(wi / qq) / nz(qp(wi).powi(2), "(p/w;p)²")? * tz * q,
        r_ji_ji: qp(w * qq) * qp(w / qq) / nz(qp(w).powi(2), "(w;p)²")? * tz * q,
        r_ij_ji: tq / nz(th(cre(w)), "Θ_p(w)")? * th(z * w) / nz(th(z * qq), "Θ_p(q²z)")?,
        r_ji_ij: z * tq / nz(th(cre(wi)), "Θ_p(p/w)")? * th(z * wi) / th(z * qq),
    })
}

pub fn dyn_r_closed_blocks<T: Real>(
    z: Complex<T>,
    w: &DynamicalWeight<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ClosedBlocks<T>> {
    let a = a_vector(spec, w)?;
    closed_blocks_a(z, &a, spec, params)
}

pub(crate) fn closed_blocks_a<T: Real>(
    z: Complex<T>,
    a: &[T],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ClosedBlocks<T>> {
    let q = spec.q;
    let ix = |x: i32| spec.index_of(x).unwrap();
    let pairs = pairs(spec)
        .into_iter()
        .map(|(i, j)| pair_blocks(z, i, j, q.powf(lit::<T>(2.0) * (a[ix(i)] - a[ix(j)])), params, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedBlocks { rho_ell: rho_ell(z, spec, params), pairs })
}

pub(crate) fn dyn_r_a<T: Real>(
    z: Complex<T>,
    a: &[T],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    method: Method,
    k: Option<usize>,
) -> Result<CMat<T>> {
    let p = CMat::flip(spec.dim);
    let finv = twistor_a(z.inv(), a, spec, params, method, k)?;
    let fz = twistor_a(z, a, spec, params, method, k)?;
    let r = trig_r(z, spec)?.mat;
    Ok(&(&(&(&p * &finv) * &p) * &r) * &fz.inverse()?)
}

/// `R(z, λ) = P F(z⁻¹, λ) P R(z) F(z, λ)⁻¹`.
pub fn dyn_r<T: Real>(
    z: Complex<T>,
    w: &DynamicalWeight<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    method: Method,
) -> Result<BlockMatrix<T>> {
    let a = a_vector(spec, w)?;
    Ok(BlockMatrix::new(spec, z, dyn_r_a(z, &a, spec, params, method, None)?))
}

/// Relative residual of `F(pz) = (q^{2θ̄}⊗1) F(z) (q^{−2θ̄}⊗1) q^T R(pz)`.
pub fn twistor_diff_residual<T: Real>(
    z: Complex<T>,
    w: &DynamicalWeight<T>,
    k: Option<usize>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    method: Method,
) -> Result<T> {
    let a = a_vector(spec, w)?;
    let fz = twistor_a(z, &a, spec, params, method, k)?;
    let fpz = twistor_a(z * params.p, &a, spec, params, method, k)?;
    Ok(diff_residual_of(&fz, &fpz, z, &a, spec, params)?)
}

/// The same residual for caller-supplied `F(z)` and `F(pz)`.
pub fn diff_residual_of<T: Real>(
    fz: &CMat<T>,
    fpz: &CMat<T>,
    z: Complex<T>,
    a: &[T],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<T> {
    let lnd: Vec<T> = ln_d(a, spec).into_iter().map(|x| -x).collect();
    let rhs = &(&ad_slot1(fz, &lnd, 1) * &qt_matrix(spec)) * &trig_r(z * params.p, spec)?.mat;
    Ok((fpz - &rhs).max_abs() / fpz.max_abs())
}

/// `a_m ↦ a_m + (k̂|m̂)` for `m ≠ 0`.
pub fn shifted_a<T: Real>(a: &[T], k: i32, spec: &AlgebraSpec<T>) -> Vec<T> {
    spec.j
        .iter()
        .zip(a)
        .map(|(&m, &am)| if m == 0 { am } else { am + spec.hat_ip(k, m).unwrap() })
        .collect()
}

/// `Σ_k M_k` placed on slots `(s, t)` of `V⊗V⊗V`, block-diagonal in the
/// remaining slot whose basis index is `k`.
fn sector_lift<T: Real>(ms: &[CMat<T>], n: usize, free: usize) -> CMat<T> {
    let mut out = CMat::zeros(n * n * n);
    let split = |x: usize| (x / (n * n), (x / n) % n, x % n);
    for r in 0..n * n * n {
        let (r1, r2, r3) = split(r);
        for c in 0..n * n * n {
            let (c1, c2, c3) = split(c);
            let (rk, ck, ra, rb, ca, cb) = match free {
                1 => (r1, c1, r2, r3, c2, c3),
                2 => (r2, c2, r1, r3, c1, c3),
                _ => (r3, c3, r1, r2, c1, c2),
            };
            if rk != ck {
                continue;
            }
            out[(r, c)] = ms[rk][(ra * n + rb, ca * n + cb)];
        }
    }
    out
}

/// Relative residual of
/// `R¹²(z₁/z₂, λ+h³) R¹³(z₁, λ) R²³(z₂, λ+h¹) = R²³(z₂, λ) R¹³(z₁, λ+h²) R¹²(z₁/z₂, λ)`.
pub fn dybe_residual<T: Real>(
    z1: Complex<T>,
    z2: Complex<T>,
    w: &DynamicalWeight<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    method: Method,
) -> Result<T> {
    let a = a_vector(spec, w)?;
    dybe_residual_a(z1, z2, &a, spec, params, method)
}

pub(crate) fn dybe_residual_a<T: Real>(
    z1: Complex<T>,
    z2: Complex<T>,
    a: &[T],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    method: Method,
) -> Result<T> {
    let n = spec.dim;
    let r = |z: Complex<T>, aa: &[T]| dyn_r_a(z, aa, spec, params, method, None);
    let shifted = |z: Complex<T>| -> Result<Vec<CMat<T>>> {
        spec.j.iter().map(|&k| r(z, &shifted_a(a, k, spec))).collect()
    };
    let z12 = z1 / z2;
    let r12_h3 = sector_lift(&shifted(z12)?, n, 3);
    let r23_h1 = sector_lift(&shifted(z2)?, n, 1);
    let r13_h2 = sector_lift(&shifted(z1)?, n, 2);
    let lhs = &(&r12_h3 * &lift13(&r(z1, a)?, n)) * &r23_h1;
    let rhs = &(&lift23(&r(z2, a)?, n) * &r13_h2) * &lift12(&r(z12, a)?, n);
    Ok((&lhs - &rhs).max_abs() / lhs.max_abs())
}

/// Relative residual of the shifted cocycle condition on `V⊗V⊗V`:
/// `F¹²(z₁/z₂, λ) (Δ⊗id)F(λ) = F²³(z₂/z₃, λ+h¹) (id⊗Δ)F(λ)`, with both
/// coproduct images built as truncated products of depth `k`.
pub fn cocycle_residual<T: Real>(
    zs: [Complex<T>; 3],
    w: &DynamicalWeight<T>,
    k: usize,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<T> {
    let a = a_checked(w, spec, params)?;
    let [z1, z2, z3] = zs;
    let n = spec.dim;
    let n3 = n * n * n;
    let qt = qt_matrix(spec);
    let qtd: Vec<T> = qt.diag().iter().map(|x| x.re).collect();
    let t12 = lift12(&qt, n);
    let t23 = lift23(&qt, n);
    let t13 = lift13(&qt, n);
    let lnd = ln_d(&a, spec);
    let mut ln1 = vec![T::zero(); n3];
    let mut ln2 = vec![T::zero(); n3];
    for x in 0..n3 {
        let (i, j) = (x / (n * n), (x / n) % n);
        ln1[x] = lnd[i] + lnd[j] + lit::<T>(2.0) * qtd[i * n + j].ln();
        ln2[x] = lnd[i];
    }
    let conj = |m: &CMat<T>, lnx: &[T], step: usize| -> CMat<T> {
        let kk = T::from_usize(step).unwrap();
        CMat::from_fn(n3, |r, c| {
            let v = m[(r, c)];
            if v == zero() {
                v
            } else {
                v * (kk * (lnx[r] - lnx[c])).exp()
            }
        })
    };
    let mut fd = CMat::identity(n3);
    let mut fi = CMat::identity(n3);
    let mut pk = T::one();
    for step in 1..=k {
        pk = pk * params.p;
        let r13 = lift13(&trig_r(z1 / z3 * pk, spec)?.mat, n);
        let md = &(&(&t13 * &t23) * &r13) * &lift23(&trig_r(z2 / z3 * pk, spec)?.mat, n);
        fd = &conj(&md.inverse()?, &ln1, step) * &fd;
        let mi = &(&(&t12 * &t13) * &r13) * &lift12(&trig_r(z1 / z2 * pk, spec)?.mat, n);
        fi = &conj(&mi.inverse()?, &ln2, step) * &fi;
    }
    let f12 = lift12(&product_a(z1 / z2, &a, k, spec, params)?, n);
    let f23: Vec<CMat<T>> = spec
        .j
        .iter()
        .map(|&kk| product_a(z2 / z3, &shifted_a(&a, kk, spec), k, spec, params))
        .collect::<Result<_>>()?;
    let lhs = &f12 * &fd;
    let rhs = &sector_lift(&f23, n, 1) * &fi;
    Ok((&lhs - &rhs).max_abs() / lhs.max_abs())
}
