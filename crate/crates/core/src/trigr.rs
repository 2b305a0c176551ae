//! Trigonometric R matrix `R(z) = ρ(z) R̄(z)` of `U_q(g)` on `V ⊗ V`.
//!
//! `E_{ij} ⊗ E_{kl}` sends `v_j ⊗ v_l` to `v_i ⊗ v_k`; it sits at row
//! `(i, k)`, column `(j, l)` of the `N² × N²` array.

use crate::error::{Error, Result};
use crate::liealg::{AlgebraSpec, Family};
use crate::linalg::{lift12, lift13, lift23, CMat};
use crate::qspecial::qpoch_inf;
use crate::scalar::{cre, lit, one, zero, Real};
use num_complex::Complex;

/// Denominators closer to zero than this are reported as poles.
pub const POLE_GUARD: f64 = 1e-12;

/// An operator on `V ⊗ V` with rows and columns labelled by pairs in `J × J`.
#[derive(Clone, Debug)]
pub struct BlockMatrix<T: Real> {
    pub j: Vec<i32>,
    pub z: Complex<T>,
    pub mat: CMat<T>,
}

impl<T: Real> BlockMatrix<T> {
    pub fn new(spec: &AlgebraSpec<T>, z: Complex<T>, mat: CMat<T>) -> Self {
        BlockMatrix { j: spec.j.clone(), z, mat }
    }

    fn pos(&self, i: i32) -> Result<usize> {
        self.j.iter().position(|&x| x == i).ok_or(Error::UnknownIndex(i))
    }

    pub fn row(&self, i: i32, k: i32) -> Result<usize> {
        Ok(self.pos(i)? * self.j.len() + self.pos(k)?)
    }

    /// Entry at row `(i, k)`, column `(j, l)`.
    pub fn entry(&self, row: (i32, i32), col: (i32, i32)) -> Result<Complex<T>> {
        Ok(self.mat[(self.row(row.0, row.1)?, self.row(col.0, col.1)?)])
    }

    /// Largest entry that violates `î + k̂ = ĵ + l̂` at row `(i,k)`, column `(j,l)`.
    pub fn weight_violation(&self, spec: &AlgebraSpec<T>) -> T {
        let n = self.j.len();
        let hats: Vec<Vec<T>> = self.j.iter().map(|&m| spec.hat(m).unwrap()).collect();
        let tol = lit::<T>(1e-9);
        let mut worst = T::zero();
        for r in 0..n * n {
            for c in 0..n * n {
                let (i, k, jj, l) = (r / n, r % n, c / n, c % n);
                let conserved = (0..hats[0].len())
                    .all(|x| (hats[i][x] + hats[k][x] - hats[jj][x] - hats[l][x]).abs() < tol);
                if !conserved {
                    worst = worst.max(self.mat[(r, c)].norm());
                }
            }
        }
        worst
    }
}

fn guard<T: Real>(d: Complex<T>, what: &str) -> Result<Complex<T>> {
    if d.norm() < lit(POLE_GUARD) {
        return Err(Error::Pole(format!("{what} vanishes")));
    }
    Ok(d)
}

/// `j̄`: `j − ε_j`, `n − ε_0` or `j + N − ε_j` for positive, zero, negative `j`.
pub fn jbar<T: Real>(j: i32, spec: &AlgebraSpec<T>) -> i32 {
    let e = spec.eps_sign(j);
    match j.signum() {
        1 => j - e,
        0 => spec.n as i32 - e,
        _ => j + spec.dim as i32 - e,
    }
}

/// Scalar normalisation `ρ(z)`.
pub fn rho<T: Real>(z: Complex<T>, spec: &AlgebraSpec<T>) -> Result<Complex<T>> {
    let q = spec.q;
    let xi = spec.xi;
    let x2 = xi * xi;
    let qq = q * q;
    let poch = |w: Complex<T>| qpoch_inf(w, x2);
    if spec.family == Family::A {
        let n = T::from_usize(spec.n).unwrap();
        let pre = q.powf(-n / (n + T::one()));
        let den = guard(poch(z) * poch(z * x2), "ρ(z) denominator")?;
        return Ok(poch(z * qq) * poch(z * x2 / qq) / den * pre);
    }
    let num = poch(z * qq) * poch(z * xi).powi(2) * poch(z * x2 / qq);
    let den = poch(z) * poch(z * xi / qq) * poch(z * qq * xi) * poch(z * x2);
    Ok(num / guard(den, "ρ(z) denominator")? / q)
}

/// `a_{ij}(z)` for B, C, D (zero for A).
pub fn a_ij<T: Real>(i: i32, j: i32, z: Complex<T>, spec: &AlgebraSpec<T>) -> Complex<T> {
    if spec.family == Family::A {
        return zero();
    }
    let q = spec.q;
    let xi = spec.xi;
    let o = one::<T>();
    if i == j {
        let base = (cre(q * q) - z * xi) * (o - z);
        return if i == 0 { base + (o - z * xi) * (z + q) * (T::one() - q) } else { base };
    }
    let d = if i == -j { o - z * xi } else { zero() };
    let e = T::from_i32(spec.eps_sign(i) * spec.eps_sign(j)).unwrap()
        * q.powi(jbar(j, spec) - jbar(i, spec));
    let c = T::one() - q * q;
    if spec.precedes(i, j).unwrap() {
        ((z - o) * e + d) * c
    } else {
        ((z - o) * (xi * e) + d) * z * c
    }
}

/// `R̄(z) = R(z)/ρ(z)`.
pub fn trig_rbar<T: Real>(z: Complex<T>, spec: &AlgebraSpec<T>) -> Result<CMat<T>> {
    let q = spec.q;
    let n = spec.dim;
    let o = one::<T>();
    let den = guard(o - z * q * q, "1 − q²z")?;
    let b = (o - z) * q / den;
    let c = cre(T::one() - q * q) / den;
    let mut m = CMat::zeros(n * n);
    let ix = |x: i32| spec.index_of(x).unwrap();
    let mut put = |i: i32, j: i32, k: i32, l: i32, v: Complex<T>| {
        let (r, cc) = (ix(i) * n + ix(k), ix(j) * n + ix(l));
        m[(r, cc)] = m[(r, cc)] + v;
    };
    for &i in &spec.j {
        if i != 0 {
            put(i, i, i, i, o);
        }
        for &j in &spec.j {
            if i != j && i != -j {
                put(i, i, j, j, b);
            }
            if spec.precedes(i, j)? && i != -j {
                put(i, j, j, i, c);
                put(j, i, i, j, c * z);
            }
        }
    }
    if spec.family != Family::A {
        let den2 = den * guard(o - z * spec.xi, "1 − ξz")?;
        for &i in &spec.j {
            for &j in &spec.j {
                put(i, j, -i, -j, a_ij(i, j, z, spec) / den2);
            }
        }
    }
    Ok(m)
}

pub fn trig_r<T: Real>(z: Complex<T>, spec: &AlgebraSpec<T>) -> Result<BlockMatrix<T>> {
    let r = trig_rbar(z, spec)?.scale(rho(z, spec)?);
    Ok(BlockMatrix::new(spec, z, r))
}

/// `max|R¹²(z₁/z₂)R¹³(z₁)R²³(z₂) − R²³(z₂)R¹³(z₁)R¹²(z₁/z₂)| / max|LHS|`.
pub fn qybe_residual<T: Real>(z1: Complex<T>, z2: Complex<T>, spec: &AlgebraSpec<T>) -> Result<T> {
    let n = spec.dim;
    let r12 = lift12(&trig_r(z1 / z2, spec)?.mat, n);
    let r13 = lift13(&trig_r(z1, spec)?.mat, n);
    let r23 = lift23(&trig_r(z2, spec)?.mat, n);
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    Ok((&lhs - &rhs).max_abs() / lhs.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::build_algebra;
    use crate::vectorrep::vector_rep;
    type C = Complex<f64>;

    #[test]
    fn a1_entries_by_hand() {
        let spec = build_algebra(Family::A, 1, 0.4f64).unwrap();
        let z = C::new(0.5, 0.0);
        let r = trig_rbar(z, &spec).unwrap();
        let (q, zz) = (0.4, 0.5);
        let b = q * (1.0 - zz) / (1.0 - q * q * zz);
        let c = (1.0 - q * q) / (1.0 - q * q * zz);
        let want = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, b, c, 0.0],
            [0.0, zz * c, b, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((r[(i, j)] - C::new(*w, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn weight_conservation() {
        for (f, n) in [(Family::A, 2), (Family::B, 2), (Family::C, 3), (Family::D, 3)] {
            let spec = build_algebra(f, n, 0.4f64).unwrap();
            let r = trig_r(C::new(0.3, 0.2), &spec).unwrap();
            assert_eq!(r.weight_violation(&spec), 0.0);
        }
    }

    #[test]
    fn unitarity_up_to_scalar() {
        for (f, n) in [(Family::A, 2), (Family::B, 2), (Family::C, 2), (Family::D, 3)] {
            let spec = build_algebra(f, n, 0.4f64).unwrap();
            let z = C::new(0.3, 0.2);
            let p = CMat::flip(spec.dim);
            let m = &(&(&trig_rbar(z, &spec).unwrap() * &p) * &trig_rbar(z.inv(), &spec).unwrap()) * &p;
            let s = m[(0, 0)];
            assert!(m.rel_diff(&CMat::identity(spec.dim * spec.dim).scale(s)) < 1e-12);
        }
    }

    #[test]
    fn intertwines_coproduct() {
        for (f, n) in [(Family::A, 2), (Family::B, 2), (Family::C, 2), (Family::D, 3)] {
            let spec = build_algebra(f, n, 0.4f64).unwrap();
            let rep = vector_rep(&spec);
            let (z1, z2) = (C::new(0.7, 0.1), C::new(0.3, -0.2));
            let r = trig_rbar(z1 / z2, &spec).unwrap();
            let id = CMat::identity(spec.dim);
            for i in 0..=n {
                let (s1, s2) = if i == 0 { (z1, z2) } else { (C::new(1.0, 0.0), C::new(1.0, 0.0)) };
                let (e, fm, t) = (&rep.e[i], &rep.f[i], &rep.t[i]);
                let ti = t.inverse().unwrap();
                let (e1, e2) = (e.scale(s1), e.scale(s2));
                let (f1, f2) = (fm.scale(s1.inv()), fm.scale(s2.inv()));
                let de = &e1.kron(&id) + &t.kron(&e2);
                let dope = &e1.kron(t) + &id.kron(&e2);
                let df = &f1.kron(&ti) + &id.kron(&f2);
                let dopf = &f1.kron(&id) + &ti.kron(&f2);
                for (a, b) in [(de, dope), (df, dopf)] {
                    assert!((&(&r * &a) - &(&b * &r)).max_abs() < 1e-10, "{f:?}{n} i={i}");
                }
            }
        }
    }

    #[test]
    fn a_family_has_no_nxn_block() {
        let spec = build_algebra(Family::A, 3, 0.4f64).unwrap();
        assert_eq!(a_ij(1, 2, C::new(0.3, 0.0), &spec), C::new(0.0, 0.0));
    }

    #[test]
    fn pole_detected() {
        let spec = build_algebra(Family::A, 1, 0.5f64).unwrap();
        assert!(matches!(trig_rbar(C::new(4.0, 0.0), &spec), Err(Error::Pole(_))));
    }
}
