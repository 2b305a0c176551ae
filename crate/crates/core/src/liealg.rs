//! Index sets, orders, weights `μ̂`, dynamical coordinates `a_μ` and the
//! characters `G_a` for the families A, B, C, D.

use crate::error::{Error, Result};
use crate::qspecial::{bracket, ModulusParams};
use crate::scalar::{lit, one, Real};
use num_complex::Complex;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            other => Err(Error::Unsupported(other.to_string())),
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Static data of one affine algebra in its vector representation.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSpec<T: Real> {
    pub family: Family,
    pub n: usize,
    /// Dimension of the vector representation.
    pub dim: usize,
    /// Index set in `≺` order.
    pub j: Vec<i32>,
    pub hvee: i32,
    pub t: i32,
    pub s_sign: i32,
    pub q: T,
    /// `q^{t h∨}`.
    pub xi: T,
    /// `−t h∨ / 2`.
    pub eta: T,
}

pub fn build_algebra<T: Real>(family: Family, n: usize, q: T) -> Result<AlgebraSpec<T>> {
    if n < family.min_rank() {
        return Err(Error::InvalidRank { family: family.letter(), rank: n });
    }
    let ni = n as i32;
    let pos: Vec<i32> = (1..=ni).collect();
    let neg: Vec<i32> = (1..=ni).rev().map(|k| -k).collect();
    let (j, hvee, t, s_sign) = match family {
        Family::A => ((1..=ni + 1).collect(), ni + 1, 1, 1),
        Family::B => ([pos, vec![0], neg].concat(), 2 * ni - 1, 1, 1),
        Family::C => ([pos, neg].concat(), ni + 1, 2, -1),
        Family::D => ([pos, neg].concat(), 2 * ni - 2, 1, 1),
    };
    let j: Vec<i32> = j;
    let th = T::from_i32(t * hvee).unwrap();
    Ok(AlgebraSpec {
        family,
        n,
        dim: j.len(),
        j,
        hvee,
        t,
        s_sign,
        q,
        xi: q.powf(th),
        eta: -th / lit(2.0),
    })
}

impl<T: Real> AlgebraSpec<T> {
    /// Position of `mu` in `≺` order.
    pub fn index_of(&self, mu: i32) -> Result<usize> {
        self.j.iter().position(|&x| x == mu).ok_or(Error::UnknownIndex(mu))
    }

    /// Strict order `1 ≺ 2 ≺ … ≺ n (≺ 0) ≺ −n ≺ … ≺ −1`.
    pub fn precedes(&self, i: i32, j: i32) -> Result<bool> {
        Ok(self.index_of(i)? < self.index_of(j)?)
    }

    /// Number of ε-coordinates: `n+1` for A, `n` otherwise.
    pub fn eps_dim(&self) -> usize {
        match self.family {
            Family::A => self.n + 1,
            _ => self.n,
        }
    }

    /// `μ̂` in the ε-basis; for A this is `ε_μ − (1/(n+1))Σε_j`.
    pub fn hat(&self, mu: i32) -> Result<Vec<T>> {
        self.index_of(mu)?;
        let mut v = vec![T::zero(); self.eps_dim()];
        match self.family {
            Family::A => {
                let off = T::one() / T::from_usize(self.n + 1).unwrap();
                for x in v.iter_mut() {
                    *x = -off;
                }
                v[(mu - 1) as usize] = v[(mu - 1) as usize] + T::one();
            }
            _ => {
                if mu != 0 {
                    v[(mu.unsigned_abs() - 1) as usize] = T::from_i32(mu.signum()).unwrap();
                }
            }
        }
        Ok(v)
    }

    /// `(μ̂|ν̂)`.
    pub fn hat_ip(&self, mu: i32, nu: i32) -> Result<T> {
        let (a, b) = (self.hat(mu)?, self.hat(nu)?);
        Ok(a.iter().zip(&b).fold(T::zero(), |s, (x, y)| s + *x * *y))
    }

    /// `ε_j`: `−1` for `j < 0` in type C, else `+1`.
    pub fn eps_sign(&self, j: i32) -> i32 {
        if self.family == Family::C && j < 0 {
            -1
        } else {
            1
        }
    }

    /// `q_i` for the Chevalley generator `i = 0..n`.
    pub fn q_i(&self, i: usize) -> T {
        let q = self.q;
        match self.family {
            Family::B if i == self.n => q.sqrt(),
            Family::C if i == 0 || i == self.n => q * q,
            _ => q,
        }
    }
}

/// `a + ρ = Σ s_i Λ_i`, stored through `s_0..s_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalWeight<T: Real> {
    pub s: Vec<T>,
}

impl<T: Real> DynamicalWeight<T> {
    pub fn new(s: Vec<T>, spec: &AlgebraSpec<T>) -> Result<Self> {
        if s.len() != spec.n + 1 {
            return Err(Error::Domain(format!(
                "expected {} coordinates s_0..s_{}, got {}",
                spec.n + 1,
                spec.n,
                s.len()
            )));
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite dynamical coordinate".into()));
        }
        Ok(DynamicalWeight { s })
    }

    /// `a_μ = (a+ρ|μ̂)`; `a_0 = −1/2`. Independent of `s_0`.
    pub fn a_coord(&self, mu: i32, spec: &AlgebraSpec<T>) -> Result<T> {
        spec.index_of(mu)?;
        let s = &self.s;
        let n = spec.n;
        let half = lit::<T>(0.5);
        let sum = |lo: usize, hi: usize| (lo..hi).fold(T::zero(), |acc, j| acc + s[j]);
        if spec.family == Family::A {
            let m = mu as usize;
            let mut v = T::zero();
            for (jj, sj) in s.iter().enumerate().take(n + 1).skip(1) {
                let jf = T::from_usize(jj).unwrap();
                if jj < m {
                    v = v - jf * *sj;
                } else {
                    v = v + (T::from_usize(n + 1).unwrap() - jf) * *sj;
                }
            }
            return Ok(v / T::from_usize(n + 1).unwrap());
        }
        if mu == 0 {
            return Ok(-half);
        }
        let i = mu.unsigned_abs() as usize;
        let v = match spec.family {
            Family::B => sum(i, n) + s[n] * half,
            Family::C => sum(i, n + 1),
            Family::D => sum(i, n) + (s[n] - s[n - 1]) * half,
            Family::A => unreachable!(),
        };
        Ok(if mu < 0 { -v } else { v })
    }

    /// ε-coordinates `x` with `a_μ = (x|μ̂)`.
    pub fn eps_coords(&self, spec: &AlgebraSpec<T>) -> Vec<T> {
        let m = spec.eps_dim() as i32;
        (1..=m).map(|k| self.a_coord(k, spec).unwrap()).collect()
    }
}

/// A point of `a + ρ + Σ ℤμ̂` in ε-coordinates, with the count of nonzero steps
/// taken from the base weight. The count fixes `ε(a) = s_sign^count`.
#[derive(Clone, Debug, PartialEq)]
pub struct Height<T: Real> {
    pub x: Vec<T>,
    pub parity: u32,
}

/// Two coordinates are the same height when they differ by less than this.
pub const HEIGHT_TOL: f64 = 1e-9;

impl<T: Real> Height<T> {
    pub fn from_weight(w: &DynamicalWeight<T>, spec: &AlgebraSpec<T>) -> Self {
        Height { x: w.eps_coords(spec), parity: 0 }
    }

    pub fn from_eps(x: Vec<T>) -> Self {
        Height { x, parity: 0 }
    }

    pub fn step(&self, mu: i32, spec: &AlgebraSpec<T>) -> Result<Self> {
        let h = spec.hat(mu)?;
        Ok(Height {
            x: self.x.iter().zip(&h).map(|(a, b)| *a + *b).collect(),
            parity: self.parity + u32::from(mu != 0),
        })
    }

    /// `a_μ = (x|μ̂)`, with `a_0 = −1/2`.
    pub fn a(&self, mu: i32, spec: &AlgebraSpec<T>) -> Result<T> {
        if mu == 0 {
            spec.index_of(0)?;
            return Ok(lit(-0.5));
        }
        let h = spec.hat(mu)?;
        Ok(self.x.iter().zip(&h).fold(T::zero(), |s, (x, y)| s + *x * *y))
    }

    pub fn same(&self, other: &Self) -> bool {
        let tol = lit::<T>(HEIGHT_TOL);
        self.x.iter().zip(&other.x).all(|(a, b)| (*a - *b).abs() < tol)
    }

    /// The label `μ` with `other = self + μ̂`, if any.
    pub fn step_to(&self, other: &Self, spec: &AlgebraSpec<T>) -> Option<i32> {
        let tol = lit::<T>(HEIGHT_TOL);
        spec.j.iter().copied().find(|&mu| {
            let h = spec.hat(mu).unwrap();
            self.x.iter().zip(&other.x).zip(&h).all(|((a, b), d)| (*b - *a - *d).abs() < tol)
        })
    }

    /// Rounded coordinates, usable as a map key.
    pub fn key(&self) -> Vec<i64> {
        self.x.iter().map(|v| (crate::scalar::to_f64(*v) * 1e8).round() as i64).collect()
    }
}

/// A bracket value counts as zero below this fraction of `|[1]|`.
pub const DEGENERATE_TOL: f64 = 1e-8;

fn guarded<T: Real>(u: T, params: &ModulusParams<T>, what: &str) -> Result<Complex<T>> {
    let v = bracket(Complex::new(u, T::zero()), params);
    let unit = bracket(one(), params).norm();
    if v.norm() < lit::<T>(DEGENERATE_TOL) * unit {
        return Err(Error::Degenerate(format!("[{what}] = [{u}] vanishes")));
    }
    Ok(v)
}

/// `G_a = ε(a) ∏ h(a_i) ∏_{i<j} [a_i − a_j][a_i + a_j]` for B, C, D and
/// `∏_{i<j} [a_i − a_j]` for A.
pub fn g_char<T: Real>(h: &Height<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Result<Complex<T>> {
    let a = &h.x;
    let mut g = one::<T>();
    let m = a.len();
    for i in 0..m {
        for j in i + 1..m {
            g = g * guarded(a[i] - a[j], params, "a_i - a_j")?;
            if spec.family != Family::A {
                g = g * guarded(a[i] + a[j], params, "a_i + a_j")?;
            }
        }
        match spec.family {
            Family::B => g = g * guarded(a[i], params, "a_i")?,
            Family::C => g = g * guarded(lit::<T>(2.0) * a[i], params, "2a_i")?,
            _ => {}
        }
    }
    if spec.s_sign < 0 && h.parity % 2 == 1 {
        g = -g;
    }
    Ok(g)
}

/// `G_{aμ} = G_{a+μ̂} / G_a`.
pub fn g_ratio<T: Real>(
    h: &Height<T>,
    mu: i32,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<Complex<T>> {
    Ok(g_char(&h.step(mu, spec)?, spec, params)? / g_char(h, spec, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let a = build_algebra(Family::A, 2, 0.4f64).unwrap();
        assert_eq!((a.dim, a.hvee, a.t, a.eta), (3, 3, 1, -1.5));
        assert_eq!(a.j, vec![1, 2, 3]);
        let b = build_algebra(Family::B, 2, 0.4f64).unwrap();
        assert_eq!((b.dim, b.hvee), (5, 3));
        assert_eq!(b.j, vec![1, 2, 0, -2, -1]);
        assert!((b.xi - 0.4f64.powi(3)).abs() < 1e-16);
        let c = build_algebra(Family::C, 2, 0.4f64).unwrap();
        assert_eq!((c.dim, c.hvee, c.t, c.eta, c.s_sign), (4, 3, 2, -3.0, -1));
        let d = build_algebra(Family::D, 3, 0.4f64).unwrap();
        assert_eq!((d.dim, d.hvee), (6, 4));
    }

    #[test]
    fn rank_guards() {
        assert!(build_algebra::<f64>(Family::A, 0, 0.4).is_err());
        assert!(build_algebra::<f64>(Family::B, 1, 0.4).is_err());
        assert!(build_algebra::<f64>(Family::C, 1, 0.4).is_err());
        assert!(build_algebra::<f64>(Family::D, 2, 0.4).is_err());
    }

    #[test]
    fn order() {
        let b = build_algebra(Family::B, 3, 0.4f64).unwrap();
        assert!(b.precedes(1, -1).unwrap());
        assert!(b.precedes(0, -3).unwrap());
        assert!(b.precedes(3, 0).unwrap());
        assert!(!b.precedes(2, 2).unwrap());
        assert_eq!(b.precedes(7, 1), Err(Error::UnknownIndex(7)));
    }

    #[test]
    fn hats() {
        let b = build_algebra(Family::B, 2, 0.4f64).unwrap();
        assert_eq!(b.hat(0).unwrap(), vec![0.0, 0.0]);
        let c = build_algebra(Family::C, 3, 0.4f64).unwrap();
        let h2: Vec<f64> = c.hat(-2).unwrap().iter().map(|x| -x).collect();
        assert_eq!(h2, c.hat(2).unwrap());
        let a = build_algebra(Family::A, 2, 0.4f64).unwrap();
        let h = a.hat(1).unwrap();
        let want = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        assert!(h.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-15));
    }

    #[test]
    fn a_coords() {
        let a = build_algebra(Family::A, 3, 0.4f64).unwrap();
        let w = DynamicalWeight::new(vec![0.3, 1.1, 2.3, 0.7], &a).unwrap();
        let d = w.a_coord(1, &a).unwrap() - w.a_coord(3, &a).unwrap();
        assert!((d - 3.4).abs() < 1e-14);
        let tot: f64 = (1..=4).map(|m| w.a_coord(m, &a).unwrap()).sum();
        assert!(tot.abs() < 1e-14);
        let b = build_algebra(Family::B, 2, 0.4f64).unwrap();
        let w = DynamicalWeight::new(vec![0.0, 1.2, 2.6], &b).unwrap();
        assert_eq!(w.a_coord(0, &b).unwrap(), -0.5);
        assert!((w.a_coord(1, &b).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(w.a_coord(-2, &b).unwrap(), -w.a_coord(2, &b).unwrap());
    }

    #[test]
    fn height_a_matches_a_coord() {
        let d = build_algebra(Family::D, 4, 0.4f64).unwrap();
        let w = DynamicalWeight::new(vec![0.0, 1.3, 0.9, 1.1, 0.4], &d).unwrap();
        let h = Height::from_weight(&w, &d);
        for &mu in &d.j {
            assert!((h.a(mu, &d).unwrap() - w.a_coord(mu, &d).unwrap()).abs() < 1e-14);
        }
        let k = h.step(-3, &d).unwrap();
        assert_eq!(h.step_to(&k, &d), Some(-3));
        assert_eq!(k.parity, 1);
    }

    #[test]
    fn g_a1_is_single_bracket() {
        let spec = build_algebra(Family::A, 1, 0.4f64).unwrap();
        let prm = ModulusParams::<f64>::new(0.4, 6.0).unwrap();
        let w = DynamicalWeight::new(vec![0.0, 2.3], &spec).unwrap();
        let h = Height::from_weight(&w, &spec);
        let g = g_char(&h, &spec, &prm).unwrap();
        let want = bracket(Complex::new(2.3, 0.0), &prm);
        assert!((g - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn c_ratio_carries_sign() {
        let spec = build_algebra(Family::C, 2, 0.4f64).unwrap();
        let prm = ModulusParams::<f64>::new(0.4, 6.0).unwrap();
        let w = DynamicalWeight::new(vec![0.0, 1.3, 1.9], &spec).unwrap();
        let h = Height::from_weight(&w, &spec);
        let mut flat = h.step(1, &spec).unwrap();
        flat.parity = 0;
        let unsigned = g_char(&flat, &spec, &prm).unwrap() / g_char(&h, &spec, &prm).unwrap();
        let r = g_ratio(&h, 1, &spec, &prm).unwrap();
        assert!((r + unsigned).norm() < 1e-14 * r.norm());
    }

    #[test]
    fn degenerate_weight_reported() {
        let spec = build_algebra(Family::A, 1, 0.4f64).unwrap();
        let prm = ModulusParams::<f64>::new(0.4, 6.0).unwrap();
        let h = Height::from_eps(vec![0.5, 0.5]);
        assert!(matches!(g_char(&h, &spec, &prm), Err(Error::Degenerate(_))));
    }
}
