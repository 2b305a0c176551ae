//! Vector representation of `U'_q(g)`: Chevalley generators, the Cartan
//! data `h̄_i, h̄^i`, and the diagonal operators `q^T` and `q^{−2θ̄(λ)}`.

use crate::error::Result;
use crate::liealg::{AlgebraSpec, DynamicalWeight, Family};
use crate::linalg::CMat;
use crate::scalar::{cre, lit, Real};
use num_complex::Complex;

/// `π_V` of `e_i, f_i, t_i` for `i = 0..n` and of `h̄_i, h̄^i` for `i = 1..n`
/// (stored at `i − 1`). Rows and columns follow `≺` order on `J`.
#[derive(Clone, Debug)]
pub struct RepMatrices<T: Real> {
    pub e: Vec<CMat<T>>,
    pub f: Vec<CMat<T>>,
    pub t: Vec<CMat<T>>,
    pub hbar: Vec<CMat<T>>,
    pub hbar_dual: Vec<CMat<T>>,
}

struct Builder<'a, T: Real> {
    spec: &'a AlgebraSpec<T>,
}

impl<T: Real> Builder<'_, T> {
    fn unit(&self, i: i32, j: i32) -> CMat<T> {
        let mut m = CMat::zeros(self.spec.dim);
        m[(self.spec.index_of(i).unwrap(), self.spec.index_of(j).unwrap())] = cre(T::one());
        m
    }

    fn comb(&self, terms: &[(f64, i32, i32)]) -> CMat<T> {
        let mut m = CMat::zeros(self.spec.dim);
        for &(c, i, j) in terms {
            m = &m + &self.unit(i, j).scale(cre(lit(c)));
        }
        m
    }

    /// `Σ_j q^{Σ c δ_{j,k}} E_jj`.
    fn qdiag(&self, exps: &[(i32, f64)]) -> CMat<T> {
        let q = self.spec.q;
        let d: Vec<Complex<T>> = self
            .spec
            .j
            .iter()
            .map(|&j| {
                let e = exps.iter().filter(|(k, _)| *k == j).fold(0.0, |s, (_, c)| s + c);
                cre(q.powf(lit(e)))
            })
            .collect();
        CMat::from_diag(&d)
    }

    fn rdiag(&self, coeffs: &[(i32, f64)]) -> CMat<T> {
        let d: Vec<Complex<T>> = self
            .spec
            .j
            .iter()
            .map(|&j| cre(lit(coeffs.iter().filter(|(k, _)| *k == j).fold(0.0, |s, (_, c)| s + c))))
            .collect();
        CMat::from_diag(&d)
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn vector_rep<T: Real>(spec: &AlgebraSpec<T>) -> RepMatrices<T> {
    let bld = Builder { spec };
    let n = spec.n;
    let ni = n as i32;
    let fam = spec.family;
    let mut e = Vec::with_capacity(n + 1);
    let mut t = Vec::with_capacity(n + 1);

    e.push(match fam {
        Family::A => bld.unit(ni + 1, 1),
        Family::B => bld.comb(&[(sign(n), -1, 2), (-sign(n), -2, 1)]),
        Family::D => bld.comb(&[(sign(n - 1), -1, 2), (-sign(n - 1), -2, 1)]),
        Family::C => bld.unit(-1, 1),
    });
    t.push(match fam {
        Family::A => bld.qdiag(&[(1, -1.0), (ni + 1, 1.0)]),
        Family::B | Family::D => bld.qdiag(&[(1, -1.0), (2, -1.0), (-1, 1.0), (-2, 1.0)]),
        Family::C => bld.qdiag(&[(1, -2.0), (-1, 2.0)]),
    });
    let inner = if fam == Family::A { n } else { n - 1 };
    for i in 1..=inner as i32 {
        if fam == Family::A {
            e.push(bld.unit(i, i + 1));
            t.push(bld.qdiag(&[(i, 1.0), (i + 1, -1.0)]));
        } else {
            e.push(bld.comb(&[(1.0, i, i + 1), (-1.0, -i - 1, -i)]));
            t.push(bld.qdiag(&[(i, 1.0), (i + 1, -1.0), (-i - 1, 1.0), (-i, -1.0)]));
        }
    }
    match fam {
        Family::A => {}
        Family::B => {
            let qn = spec.q_i(n);
            let s2 = (qn + T::one() / qn).sqrt();
            e.push(bld.comb(&[(1.0, ni, 0), (-1.0, 0, -ni)]).scale(cre(s2)));
            t.push(bld.qdiag(&[(ni, 1.0), (-ni, -1.0)]));
        }
        Family::C => {
            e.push(bld.unit(ni, -ni));
            t.push(bld.qdiag(&[(ni, 2.0), (-ni, -2.0)]));
        }
        Family::D => {
            e.push(bld.comb(&[(1.0, ni - 1, -ni), (-1.0, ni, -ni + 1)]));
            t.push(bld.qdiag(&[(ni - 1, 1.0), (ni, 1.0), (-ni, -1.0), (-ni + 1, -1.0)]));
        }
    }
    let f = e.iter().map(transpose).collect();

    let mut hbar = Vec::with_capacity(n);
    let mut hbar_dual = Vec::with_capacity(n);
    let sym = |k: i32| -> Vec<(i32, f64)> { (1..=k).flat_map(|j| [(j, 1.0), (-j, -1.0)]).collect() };
    for i in 1..=ni {
        match fam {
            Family::A => {
                hbar.push(bld.rdiag(&[(i, 1.0), (i + 1, -1.0)]));
                let np1 = (n + 1) as f64;
                let c: Vec<(i32, f64)> = (1..=ni + 1)
                    .map(|j| (j, if j <= i { (np1 - i as f64) / np1 } else { -(i as f64) / np1 }))
                    .collect();
                hbar_dual.push(bld.rdiag(&c));
            }
            _ if i < ni => {
                hbar.push(bld.rdiag(&[(i, 1.0), (i + 1, -1.0), (-i - 1, 1.0), (-i, -1.0)]));
                if fam == Family::D && i == ni - 1 {
                    let mut c: Vec<(i32, f64)> = sym(ni - 1).into_iter().map(|(j, v)| (j, 0.5 * v)).collect();
                    c.extend([(ni, -0.5), (-ni, 0.5)]);
                    hbar_dual.push(bld.rdiag(&c));
                } else {
                    hbar_dual.push(bld.rdiag(&sym(i)));
                }
            }
            Family::B => {
                hbar.push(bld.rdiag(&[(ni, 2.0), (-ni, -2.0)]));
                let c: Vec<(i32, f64)> = sym(ni).into_iter().map(|(j, v)| (j, 0.5 * v)).collect();
                hbar_dual.push(bld.rdiag(&c));
            }
            Family::C => {
                hbar.push(bld.rdiag(&[(ni, 1.0), (-ni, -1.0)]));
                hbar_dual.push(bld.rdiag(&sym(ni)));
            }
            Family::D => {
                hbar.push(bld.rdiag(&[(ni - 1, 1.0), (ni, 1.0), (-ni, -1.0), (-ni + 1, -1.0)]));
                let mut c: Vec<(i32, f64)> = sym(ni - 1).into_iter().map(|(j, v)| (j, 0.5 * v)).collect();
                c.extend([(ni, 0.5), (-ni, -0.5)]);
                hbar_dual.push(bld.rdiag(&c));
            }
        }
    }
    RepMatrices { e, f, t, hbar, hbar_dual }
}

fn transpose<T: Real>(m: &CMat<T>) -> CMat<T> {
    CMat::from_fn(m.dim(), |i, j| m[(j, i)])
}

/// `q^{π_{V⊗V}(T)}`, diagonal on `v_i ⊗ v_j` (row index `i·N + j`).
pub fn qt_matrix<T: Real>(spec: &AlgebraSpec<T>) -> CMat<T> {
    let q = spec.q;
    let mut d = Vec::with_capacity(spec.dim * spec.dim);
    for &i in &spec.j {
        for &j in &spec.j {
            let dij = if i == j { T::one() } else { T::zero() };
            let v = match spec.family {
                Family::A => q.powf(dij - T::one() / T::from_usize(spec.n + 1).unwrap()),
                _ => {
                    let dm = if i == -j { T::one() } else { T::zero() };
                    q.powf(dij - dm)
                }
            };
            d.push(cre(v));
        }
    }
    CMat::from_diag(&d)
}

/// Diagonal entries of `q^{−2π_V(θ̄(λ))}` in `≺` order.
pub fn qtheta_entries<T: Real>(spec: &AlgebraSpec<T>, a: &[T]) -> Vec<T> {
    let q = spec.q;
    let two = lit::<T>(2.0);
    match spec.family {
        Family::A => {
            let n = T::from_usize(spec.n).unwrap();
            let pre = q.powf(n / (n + T::one()));
            a.iter().map(|aj| pre * q.powf(two * *aj)).collect()
        }
        _ => a.iter().map(|aj| q.powf(two * *aj + T::one())).collect(),
    }
}

/// `a_j` for every `j ∈ J` in `≺` order.
pub fn a_vector<T: Real>(spec: &AlgebraSpec<T>, w: &DynamicalWeight<T>) -> Result<Vec<T>> {
    spec.j.iter().map(|&j| w.a_coord(j, spec)).collect()
}

/// `q^{−2π_V(θ̄(λ))}` for `λ̄ = Σ (s_i + 1) h̄^i`.
pub fn qtheta_diag<T: Real>(spec: &AlgebraSpec<T>, w: &DynamicalWeight<T>) -> Result<CMat<T>> {
    let a = a_vector(spec, w)?;
    let d: Vec<Complex<T>> = qtheta_entries(spec, &a).into_iter().map(cre).collect();
    Ok(CMat::from_diag(&d))
}
