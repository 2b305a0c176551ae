//! Elliptic face weights `W(a b / c d | u) = κ(u) W̄(a b / c d | u)`.
//!
//! Corners: `b = a + ν̂`, `c = a + μ̂`, `d = c + λ̂`, and `d − b` must be a
//! weight as well.

use std::fmt;

use crate::error::{Error, Result};
use crate::liealg::{g_ratio, AlgebraSpec, DynamicalWeight, Family, Height};
use crate::qspecial::{bracket, dbl_prod, dbl_prod_punctured, ModulusParams};
use crate::scalar::{cre, lit, one, psqrt, rpow, to_f64, Real};
use num_complex::Complex;

/// Which line of the weight table a plaquette falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// `d = a + 2μ̂`, `μ ≠ 0`.
    Unit,
    /// `b = c`, `d = c + λ̂` with `λ ≠ ±μ`.
    IDiag,
    /// `b ≠ c`, `d = a + μ̂ + ν̂`.
    IOff,
    /// `b = c`, `d = a`.
    IIDiag,
    /// `b ≠ c`, `d = a`.
    IIOff,
}

impl Pattern {
    pub fn name(self) -> &'static str {
        match self {
            Pattern::Unit => "I-unit",
            Pattern::IDiag => "I-diag",
            Pattern::IOff => "I-off",
            Pattern::IIDiag => "II-diag",
            Pattern::IIOff => "II-off",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An admissible plaquette `(a b / c d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FacePlaquette<T: Real> {
    pub a: Height<T>,
    pub b: Height<T>,
    pub c: Height<T>,
    pub d: Height<T>,
    /// `a → b`.
    pub nu: i32,
    /// `a → c`.
    pub mu: i32,
    /// `c → d`.
    pub lam: i32,
    pub pattern: Pattern,
}

impl<T: Real> FacePlaquette<T> {
    /// Classifies four corners; any non-admissible edge is an error.
    pub fn new(a: &Height<T>, b: &Height<T>, c: &Height<T>, d: &Height<T>, spec: &AlgebraSpec<T>) -> Result<Self> {
        let edge = |x: &Height<T>, y: &Height<T>, what: &str| {
            x.step_to(y, spec)
                .ok_or_else(|| Error::Inadmissible(format!("{what} is not a weight of the vector representation")))
        };
        let nu = edge(a, b, "b − a")?;
        let mu = edge(a, c, "c − a")?;
        let lam = edge(c, d, "d − c")?;
        edge(b, d, "d − b")?;
        let pattern = if mu == nu {
            if lam == -mu {
                Pattern::IIDiag
            } else if lam == mu {
                Pattern::Unit
            } else {
                Pattern::IDiag
            }
        } else if lam == -mu {
            Pattern::IIOff
        } else if lam == nu {
            Pattern::IOff
        } else {
            return Err(Error::Inadmissible(format!("unknown corner pattern μ={mu} ν={nu} λ={lam}")));
        };
        if spec.family == Family::A && matches!(pattern, Pattern::IIDiag | Pattern::IIOff) {
            return Err(Error::Inadmissible("d = a cannot occur for A".into()));
        }
        Ok(FacePlaquette { a: a.clone(), b: b.clone(), c: c.clone(), d: d.clone(), nu, mu, lam, pattern })
    }

    /// `(a, a+ν̂ / a+μ̂, a+μ̂+λ̂)`.
    pub fn from_steps(a: &Height<T>, nu: i32, mu: i32, lam: i32, spec: &AlgebraSpec<T>) -> Result<Self> {
        let b = a.step(nu, spec)?;
        let c = a.step(mu, spec)?;
        let d = c.step(lam, spec)?;
        Self::new(a, &b, &c, &d, spec)
    }

    pub fn from_weight(w: &DynamicalWeight<T>, nu: i32, mu: i32, lam: i32, spec: &AlgebraSpec<T>) -> Result<Self> {
        Self::from_steps(&Height::from_weight(w, spec), nu, mu, lam, spec)
    }
}

/// Steps `μ` with `a + μ̂` generic, in `≺` order.
pub fn admissible_steps<T: Real>(a: &Height<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Vec<i32> {
    spec.j.iter().copied().filter(|&mu| g_ratio(a, mu, spec, params).is_ok()).collect()
}

/// All generic plaquettes with top-left corner `a`.
pub fn plaquettes_at<T: Real>(a: &Height<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Vec<FacePlaquette<T>> {
    let mut out = Vec::new();
    for nu in admissible_steps(a, spec, params) {
        for mu in admissible_steps(a, spec, params) {
            let c = a.step(mu, spec).unwrap();
            for lam in admissible_steps(&c, spec, params) {
                if let Ok(p) = FacePlaquette::from_steps(a, nu, mu, lam, spec) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// `√([A+1][A−1])`, signed by the order of `μ, ν`.
fn off_root<T: Real>(a: Complex<T>, mu: i32, nu: i32, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Complex<T> {
    let o = one::<T>();
    let s = psqrt(bracket(a + o, params) * bracket(a - o, params));
    let flip = if spec.family == Family::C {
        mu > nu
    } else {
        spec.index_of(mu).unwrap() > spec.index_of(nu).unwrap()
    };
    if flip {
        -s
    } else {
        s
    }
}

fn nonzero<T: Real>(v: Complex<T>, what: &str) -> Result<Complex<T>> {
    if v.norm() < lit(crate::trigr::POLE_GUARD) {
        return Err(Error::Pole(format!("bracket {what} vanishes")));
    }
    Ok(v)
}

/// `W̄(a b / c d | u)`.
pub fn wbar<T: Real>(
    plq: &FacePlaquette<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<Complex<T>> {
    let br = |x: Complex<T>| bracket(x, params);
    let o = one::<T>();
    let eta = cre(spec.eta);
    let two = lit::<T>(2.0);
    let a = &plq.a;
    let am = |m: i32| a.a(m, spec).map(cre);
    let b1 = br(o);
    let den_u = nonzero(br(o + u), "[1+u]")?;
    match plq.pattern {
        Pattern::Unit => Ok(o),
        Pattern::IDiag => {
            let x = am(plq.mu)? - am(plq.lam)?;
            Ok(b1 * br(x - u) / (den_u * nonzero(br(x), "[a_μν]")?))
        }
        Pattern::IOff => {
            let x = am(plq.mu)? - am(plq.nu)?;
            Ok(br(u) * off_root(x, plq.mu, plq.nu, spec, params) / (den_u * nonzero(br(x), "[a_μν]")?))
        }
        Pattern::IIOff => {
            let x = am(plq.mu)? + am(plq.nu)?;
            let g = psqrt(g_ratio(a, plq.mu, spec, params)?) * psqrt(g_ratio(a, plq.nu, spec, params)?);
            let den = nonzero(br(eta - u), "[η−u]")? * den_u * nonzero(br(x + o), "[a_μ,−ν + 1]")?;
            Ok(br(u) * b1 * br(x + o + eta - u) / den * g)
        }
        Pattern::IIDiag => {
            let am_mu = am(plq.mu)?;
            let x = am_mu * two;
            let e_u = nonzero(br(eta - u), "[η−u]")?;
            let e_x = nonzero(br(x + o + eta * two), "[a_μ,−μ + 1 + 2η]")?;
            let t1 = br(eta + u) * b1 * br(x + o + eta * two - u) / (e_u * den_u * e_x);
            let mut sum = Complex::new(T::zero(), T::zero());
            for &k in spec.j.iter().filter(|&&k| k != plq.mu) {
                let xk = am_mu + am(k)?;
                let gk = g_ratio(a, k, spec, params)?;
                sum = sum + br(xk + o + eta * two) / nonzero(br(xk + o), "[a_μ,−κ + 1]")? * gk;
            }
            let t2 = br(u) * b1 * br(x + o + eta - u) / (e_u * den_u * e_x) * sum;
            Ok(t1 - t2)
        }
    }
}

/// Functional equations must hold below this on the validation grid.
pub const KAPPA_TOL: f64 = 1e-9;

/// Closed product solution `κ(u)` of the two functional equations, with the
/// residuals it achieved on the validation grid.
#[derive(Clone, Debug)]
pub struct KappaSpec<T: Real> {
    pub family: Family,
    pub q: T,
    pub r: T,
    pub p: T,
    pub xi: T,
    pub eta: T,
    /// Exponent `γ` of the `A` prefactor `e^{γu}`.
    pub gamma: T,
    /// `max |κ(u)κ(−u) − 1|`.
    pub inversion_residual: f64,
    /// `max |lhs/rhs − 1|` of the family relation.
    pub family_residual: f64,
}

/// `{pξ²/z}/{z}`.
fn gam<T: Real>(z: Complex<T>, p: T, xi: T) -> Complex<T> {
    dbl_prod(cre(p * xi * xi) / z, p, xi) / dbl_prod(z, p, xi)
}

/// `Γ(x)Γ(pξ²x)`, regular at `x = 1`.
fn gam_pair<T: Real>(x: Complex<T>, p: T, xi: T) -> Complex<T> {
    let px2 = cre(p * xi * xi);
    let outer = dbl_prod(px2 / x, p, xi) / dbl_prod(px2 * x, p, xi);
    let inner = dbl_prod_punctured(x.inv(), p, xi) / dbl_prod_punctured(x, p, xi);
    -outer * inner / x
}

impl<T: Real> KappaSpec<T> {
    /// Builds `κ` and checks both functional equations on a 20-point grid.
    pub fn build(spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Result<Self> {
        let eta = spec.eta;
        let two = lit::<T>(2.0);
        let gamma = params.q.ln() * ((two + lit::<T>(4.0) * eta) / params.r - two) / (two * eta);
        let mut k = KappaSpec {
            family: spec.family,
            q: params.q,
            r: params.r,
            p: params.p,
            xi: spec.xi,
            eta,
            gamma,
            inversion_residual: 0.0,
            family_residual: 0.0,
        };
        let br = |x: Complex<T>| bracket(x, params);
        let o = one::<T>();
        let e = cre(eta);
        for i in 0..20 {
            let u = Complex::new(lit::<T>(-0.9 + 1.8 * i as f64 / 19.0), lit::<T>(0.13));
            let inv = to_f64((k.eval(u) * k.eval(-u) - o).norm());
            let (lhs, rhs) = if spec.family == Family::A {
                (k.eval(e - u) * k.eval(e + u), br(o + e + u) * br(o + e - u) / (br(e + u) * br(e - u)))
            } else {
                (k.eval(u) * k.eval(e + u), br(-u) * br(o + e + u) / (br(o - u) * br(e + u)))
            };
            let fam = to_f64((lhs / rhs - o).norm());
            k.inversion_residual = k.inversion_residual.max(if inv.is_finite() { inv } else { f64::INFINITY });
            k.family_residual = k.family_residual.max(if fam.is_finite() { fam } else { f64::INFINITY });
        }
        let worst = k.inversion_residual.max(k.family_residual);
        if worst.is_nan() || worst >= KAPPA_TOL {
            return Err(Error::Kappa(worst));
        }
        Ok(k)
    }

    /// `κ(u)`.
    pub fn eval(&self, u: Complex<T>) -> Complex<T> {
        let (p, xi, q) = (self.p, self.xi, self.q);
        let x = rpow(q, u * lit::<T>(2.0));
        let g = |z: Complex<T>| gam(z, p, xi);
        let q2 = q * q;
        let pq = p / q2;
        if self.family == Family::A {
            let k = gam_pair(x, p, xi) / (g(x * q2) * g(x * (pq * xi * xi)));
            return -(u * self.gamma).exp() * k;
        }
        let num = g(x * (pq * xi)) * gam_pair(x, p, xi) * g(x * (q2 * xi));
        let den = g(x * (p * xi)) * g(x * q2) * g(x * (pq * xi * xi)) * g(x * xi);
        -rpow(q, u * lit::<T>(2.0) / self.r) * num / den
    }
}

pub fn kappa<T: Real>(u: Complex<T>, k: &KappaSpec<T>) -> Complex<T> {
    k.eval(u)
}

/// `W = κ(u) W̄`.
pub fn weight<T: Real>(
    plq: &FacePlaquette<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    k: &KappaSpec<T>,
) -> Result<Complex<T>> {
    Ok(k.eval(u) * wbar(plq, u, spec, params)?)
}
