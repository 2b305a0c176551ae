//! Residuals of the identities satisfied by the face weights and by the
//! dynamical R matrix, and the gauge comparison between the two.
//!
//! Identity sums range over admissible, generic heights only. Every residual
//! is packaged in a [`ResidualReport`].

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::faceweights::{admissible_steps, wbar, FacePlaquette, KappaSpec, Pattern};
use crate::liealg::{g_char, AlgebraSpec, DynamicalWeight, Family, Height};
use crate::qspecial::{connection_residual, ModulusParams};
use crate::scalar::{cre, lit, one, rpow, to_f64, zero, Real};
use crate::twistor::{dyn_r, pairs, Method};

/// One residual at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub identity: String,
    pub family: char,
    pub rank: usize,
    pub q: f64,
    pub r: f64,
    /// ε-coordinates of the base height (or `a + ρ` data) of the point.
    pub point: Vec<f64>,
    /// Spectral arguments, as `(name, [re, im])`.
    pub args: Vec<(String, [f64; 2])>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub meta: Vec<(String, String)>,
}

impl ResidualReport {
    pub fn new<T: Real>(identity: &str, spec: &AlgebraSpec<T>, params: &ModulusParams<T>, point: &[T]) -> Self {
        ResidualReport {
            identity: identity.to_string(),
            family: spec.family.letter(),
            rank: spec.n,
            q: to_f64(params.q),
            r: to_f64(params.r),
            point: point.iter().map(|x| to_f64(*x)).collect(),
            args: Vec::new(),
            residual: f64::NAN,
            tol: to_f64(params.tol),
            pass: false,
            meta: Vec::new(),
        }
    }

    pub fn arg<T: Real>(mut self, name: &str, v: Complex<T>) -> Self {
        self.args.push((name.to_string(), [to_f64(v.re), to_f64(v.im)]));
        self
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    /// Sets the residual; `pass ⇔ residual < tol`, so NaN fails.
    pub fn judge(mut self, residual: f64, tol: f64) -> Self {
        self.residual = residual;
        self.tol = tol;
        self.pass = residual < tol;
        self
    }

    pub fn with_residual(self, residual: f64) -> Self {
        let tol = self.tol;
        self.judge(residual, tol)
    }
}

/// A source of face weights, so that identities can be fed altered weights.
pub type WeightFn<'a, T> = dyn Fn(&FacePlaquette<T>, Complex<T>) -> Result<Complex<T>> + 'a;

/// `W̄` itself.
pub fn wbar_fn<'a, T: Real>(spec: &'a AlgebraSpec<T>, params: &'a ModulusParams<T>) -> impl Fn(&FacePlaquette<T>, Complex<T>) -> Result<Complex<T>> + 'a {
    move |p, u| wbar(p, u, spec, params)
}

/// `W = κ W̄`.
pub fn weight_fn<'a, T: Real>(
    spec: &'a AlgebraSpec<T>,
    params: &'a ModulusParams<T>,
    k: &'a KappaSpec<T>,
) -> impl Fn(&FacePlaquette<T>, Complex<T>) -> Result<Complex<T>> + 'a {
    move |p, u| Ok(k.eval(u) * wbar(p, u, spec, params)?)
}

/// `base`, with the single entry at corners `target` scaled by `1 + eps`.
pub fn perturbed<'a, T: Real>(
    base: &'a WeightFn<'a, T>,
    target: [Vec<i64>; 4],
    eps: T,
) -> impl Fn(&FacePlaquette<T>, Complex<T>) -> Result<Complex<T>> + 'a {
    move |p, u| {
        let v = base(p, u)?;
        let hit = [&p.a, &p.b, &p.c, &p.d].iter().zip(&target).all(|(h, k)| h.key() == *k);
        Ok(if hit { v * (T::one() + eps) } else { v })
    }
}

pub fn corner_keys<T: Real>(p: &FacePlaquette<T>) -> [Vec<i64>; 4] {
    [p.a.key(), p.b.key(), p.c.key(), p.d.key()]
}

fn nbrs<T: Real>(h: &Height<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Vec<Height<T>> {
    admissible_steps(h, spec, params).into_iter().map(|m| h.step(m, spec).unwrap()).collect()
}

fn plq<T: Real>(a: &Height<T>, b: &Height<T>, c: &Height<T>, d: &Height<T>, spec: &AlgebraSpec<T>) -> Option<FacePlaquette<T>> {
    FacePlaquette::new(a, b, c, d, spec).ok()
}

fn adm<T: Real>(x: &Height<T>, y: &Height<T>, spec: &AlgebraSpec<T>) -> bool {
    x.step_to(y, spec).is_some()
}

/// Corners `a, b, c, d, e, f` of the hexagon in the face YBE.
pub type Hexagon<T> = [Height<T>; 6];

/// Left side, right side, and the sum of term magnitudes.
fn face_ybe_sides<T: Real>(
    hx: &Hexagon<T>,
    u: Complex<T>,
    v: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<(Complex<T>, Complex<T>, T)> {
    let [a, b, c, d, e, f] = hx;
    let (mut lhs, mut rhs, mut scale) = (zero::<T>(), zero::<T>(), T::zero());
    for g in nbrs(b, spec, params) {
        if let (Some(p1), Some(p2), Some(p3)) = (plq(f, &g, e, d, spec), plq(a, b, f, &g, spec), plq(b, c, &g, d, spec)) {
            let t = w(&p1, u)? * w(&p2, u + v)? * w(&p3, v)?;
            lhs = lhs + t;
            scale = scale + t.norm();
        }
    }
    for g in nbrs(a, spec, params) {
        if let (Some(p1), Some(p2), Some(p3)) = (plq(a, b, &g, c, spec), plq(&g, c, e, d, spec), plq(a, &g, f, e, spec)) {
            let t = w(&p1, u)? * w(&p2, u + v)? * w(&p3, v)?;
            rhs = rhs + t;
            scale = scale + t.norm();
        }
    }
    Ok((lhs, rhs, scale))
}

fn rel<T: Real>(diff: Complex<T>, scale: T) -> f64 {
    if scale == T::zero() {
        0.0
    } else {
        to_f64(diff.norm() / scale)
    }
}

/// Face YBE at one hexagon, relative to the total term magnitude. `κ` cancels.
pub fn face_ybe_residual<T: Real>(
    hx: &Hexagon<T>,
    u: Complex<T>,
    v: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ResidualReport> {
    let w = wbar_fn(spec, params);
    let (l, r, s) = face_ybe_sides(hx, u, v, spec, params, &w)?;
    Ok(ResidualReport::new("face-ybe", spec, params, &hx[0].x).arg("u", u).arg("v", v).with_residual(rel(l - r, s)))
}

/// Every hexagon with corner `a`; admissibility of `e → d` is the only constraint.
pub fn hexagons<T: Real>(a: &Height<T>, spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Vec<Hexagon<T>> {
    let mut out = Vec::new();
    for b in nbrs(a, spec, params) {
        for c in nbrs(&b, spec, params) {
            for f in nbrs(a, spec, params) {
                for e in nbrs(&f, spec, params) {
                    for d in nbrs(&c, spec, params) {
                        if adm(&e, &d, spec) {
                            out.push([a.clone(), b.clone(), c.clone(), d, e.clone(), f.clone()]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Largest face YBE residual over all hexagons at `a`, for a given weight source.
pub fn face_ybe_sweep_with<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    v: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<ResidualReport> {
    let hx = hexagons(a, spec, params);
    let mut worst = 0.0f64;
    for h in &hx {
        let (l, r, s) = face_ybe_sides(h, u, v, spec, params, w)?;
        worst = worst.max(rel(l - r, s));
    }
    Ok(ResidualReport::new("face-ybe", spec, params, &a.x)
        .arg("u", u)
        .arg("v", v)
        .meta("configurations", hx.len())
        .with_residual(worst))
}

pub fn face_ybe_sweep<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    v: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ResidualReport> {
    face_ybe_sweep_with(a, u, v, spec, params, &wbar_fn(spec, params))
}

/// `Σ_g W(a g / d c | u) W(a b / g c | −u) − δ_{bd}`.
fn unitarity_value<T: Real>(
    a: &Height<T>,
    b: &Height<T>,
    c: &Height<T>,
    d: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<Complex<T>> {
    let mut s = zero::<T>();
    for g in nbrs(a, spec, params) {
        if let (Some(p1), Some(p2)) = (plq(a, &g, d, c, spec), plq(a, b, &g, c, spec)) {
            s = s + w(&p1, u)? * w(&p2, -u)?;
        }
    }
    Ok(if b.same(d) { s - one() } else { s })
}

/// Unitarity at corners `a, b, c, d`; `κ(u)κ(−u) = 1`, so `W̄` is used.
pub fn unitarity_residual<T: Real>(
    a: &Height<T>,
    b: &Height<T>,
    c: &Height<T>,
    d: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ResidualReport> {
    let v = unitarity_value(a, b, c, d, u, spec, params, &wbar_fn(spec, params))?;
    Ok(ResidualReport::new("unitarity", spec, params, &a.x).arg("u", u).with_residual(to_f64(v.norm())))
}

pub fn unitarity_sweep_with<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<ResidualReport> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for b in nbrs(a, spec, params) {
        for d in nbrs(a, spec, params) {
            for c in nbrs(&b, spec, params) {
                if adm(&d, &c, spec) {
                    let v = unitarity_value(a, &b, &c, &d, u, spec, params, w)?;
                    worst = worst.max(to_f64(v.norm()));
                    count += 1;
                }
            }
        }
    }
    Ok(ResidualReport::new("unitarity", spec, params, &a.x).arg("u", u).meta("configurations", count).with_residual(worst))
}

pub fn unitarity_sweep<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ResidualReport> {
    unitarity_sweep_with(a, u, spec, params, &wbar_fn(spec, params))
}

/// `Σ_g G_aG_g/(G_bG_d) W(a b / d g | −u) W(c d / b g | 2η+u) − δ_{ac}` and
/// the number of terms. For `A_n` with `n > 1` the sum is empty (no step `−μ`)
/// and `a ≠ c`, so the relation holds as `0 = 0`.
#[allow(clippy::too_many_arguments)]
fn inversion_value<T: Real>(
    a: &Height<T>,
    b: &Height<T>,
    c: &Height<T>,
    d: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<(Complex<T>, usize)> {
    let eta2 = cre(spec.eta * lit::<T>(2.0));
    let g = |h: &Height<T>| g_char(h, spec, params);
    let pre = g(a)? / (g(b)? * g(d)?);
    let mut s = zero::<T>();
    let mut terms = 0;
    for x in nbrs(b, spec, params) {
        if let (Some(p1), Some(p2)) = (plq(a, b, d, &x, spec), plq(c, d, b, &x, spec)) {
            s = s + pre * g(&x)? * w(&p1, -u)? * w(&p2, eta2 + u)?;
            terms += 1;
        }
    }
    Ok((if a.same(c) { s - one() } else { s }, terms))
}

/// Second inversion relation at corners `a, b, c, d` (`b, d` adjacent to `a`,
/// `c` adjacent to `b` and `d`). Needs `κ`.
#[allow(clippy::too_many_arguments)]
pub fn second_inversion_residual<T: Real>(
    a: &Height<T>,
    b: &Height<T>,
    c: &Height<T>,
    d: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    k: &KappaSpec<T>,
) -> Result<ResidualReport> {
    let (v, terms) = inversion_value(a, b, c, d, u, spec, params, &weight_fn(spec, params, k))?;
    Ok(ResidualReport::new("inversion2", spec, params, &a.x)
        .arg("u", u)
        .meta("eta", to_f64(spec.eta))
        .meta("terms", terms)
        .with_residual(to_f64(v.norm())))
}

pub fn second_inversion_sweep_with<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<ResidualReport> {
    let mut worst = 0.0f64;
    let (mut count, mut terms) = (0, 0);
    for b in nbrs(a, spec, params) {
        for d in nbrs(a, spec, params) {
            for c in nbrs(&b, spec, params) {
                if adm(&d, &c, spec) {
                    let (v, t) = inversion_value(a, &b, &c, &d, u, spec, params, w)?;
                    worst = worst.max(to_f64(v.norm()));
                    count += 1;
                    terms += t;
                }
            }
        }
    }
    Ok(ResidualReport::new("inversion2", spec, params, &a.x)
        .arg("u", u)
        .meta("eta", to_f64(spec.eta))
        .meta("configurations", count)
        .meta("terms", terms)
        .with_residual(worst))
}

pub fn second_inversion_sweep<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    k: &KappaSpec<T>,
) -> Result<ResidualReport> {
    second_inversion_sweep_with(a, u, spec, params, &weight_fn(spec, params, k))
}

fn crossing_supported<T: Real>(spec: &AlgebraSpec<T>) -> Result<()> {
    if spec.family == Family::A && spec.n > 1 {
        return Err(Error::Unsupported(format!("crossing symmetry does not hold for A{}", spec.n)));
    }
    Ok(())
}

/// `(squared, unsquared up to the branch sign)` relative residuals of
/// `W(a b / c d | u) = √(G_bG_c/(G_aG_d)) W(c a / d b | η−u)`.
fn crossing_values<T: Real>(
    p: &FacePlaquette<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<(f64, f64)> {
    let g = |h: &Height<T>| g_char(h, spec, params);
    let ratio = g(&p.b)? * g(&p.c)? / (g(&p.a)? * g(&p.d)?);
    let swapped = FacePlaquette::new(&p.c, &p.a, &p.d, &p.b, spec)?;
    let l = w(p, u)?;
    let r = w(&swapped, cre(spec.eta) - u)?;
    let l2 = l * l;
    let r2 = ratio * r * r;
    let sq = to_f64((l2 - r2).norm() / l2.norm().max(r2.norm()));
    let rr = crate::scalar::psqrt(ratio) * r;
    let unsq = to_f64((l - rr).norm().min((l + rr).norm()) / l.norm().max(rr.norm()));
    Ok((sq, unsq))
}

/// Crossing symmetry for one plaquette; the residual is the branch-free squared
/// form, the unsquared one is recorded in `meta`.
pub fn crossing_residual<T: Real>(
    p: &FacePlaquette<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    k: &KappaSpec<T>,
) -> Result<ResidualReport> {
    crossing_supported(spec)?;
    let (sq, unsq) = crossing_values(p, u, spec, params, &weight_fn(spec, params, k))?;
    Ok(ResidualReport::new("crossing", spec, params, &p.a.x)
        .arg("u", u)
        .meta("unsquared", format!("{unsq:e}"))
        .with_residual(sq))
}

pub fn crossing_sweep_with<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    w: &WeightFn<T>,
) -> Result<ResidualReport> {
    crossing_supported(spec)?;
    let (mut sq, mut unsq) = (0.0f64, 0.0f64);
    let plqs = crate::faceweights::plaquettes_at(a, spec, params);
    for p in &plqs {
        let (s, us) = crossing_values(p, u, spec, params, w)?;
        sq = sq.max(s);
        unsq = unsq.max(us);
    }
    Ok(ResidualReport::new("crossing", spec, params, &a.x)
        .arg("u", u)
        .meta("configurations", plqs.len())
        .meta("unsquared", format!("{unsq:e}"))
        .with_residual(sq))
}

pub fn crossing_sweep<T: Real>(
    a: &Height<T>,
    u: Complex<T>,
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
    k: &KappaSpec<T>,
) -> Result<ResidualReport> {
    crossing_sweep_with(a, u, spec, params, &weight_fn(spec, params, k))
}

/// `max |κ(u)κ(−u) − 1|` and the family relation, from the validated `κ`.
pub fn kappa_report<T: Real>(spec: &AlgebraSpec<T>, params: &ModulusParams<T>) -> Result<ResidualReport> {
    let k = KappaSpec::build(spec, params)?;
    Ok(ResidualReport::new::<T>("kappa", spec, params, &[])
        .meta("inversion", format!("{:e}", k.inversion_residual))
        .meta("family", format!("{:e}", k.family_residual))
        .meta("grid", 20)
        .with_residual(k.inversion_residual.max(k.family_residual)))
}

/// Connection formula for `₂φ₁` at parameters `(a, b, c)` over the `z` values.
pub fn conn_formula_report<T: Real>(
    abc: [Complex<T>; 3],
    zs: &[Complex<T>],
    spec: &AlgebraSpec<T>,
    params: &ModulusParams<T>,
) -> Result<ResidualReport> {
    let mut worst = 0.0f64;
    for &z in zs {
        worst = worst.max(to_f64(connection_residual(abc[0], abc[1], abc[2], params.q, z)?));
    }
    let mut rep = ResidualReport::new::<T>("conn-formula", spec, params, &[]);
    for (n, v) in ["a", "b", "c"].iter().zip(abc) {
        rep = rep.arg(n, v);
    }
    Ok(rep.meta("points", zs.len()).with_residual(worst))
}

// ---------------------------------------------------------------------------
// Gauge equivalence between the dynamical R matrix and W̄.

/// Summary of the two-stage comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeReport {
    /// `max |Q_R/Q_W − 1|` over pairs and grid points.
    pub cross_ratio: f64,
    /// `max` relative mismatch of the diagonal double ratios.
    pub double_ratio: f64,
    /// `max |W − f·gauge·R| / |W|` after the fit.
    pub stage2: f64,
    pub rows: usize,
    pub unknowns: usize,
    pub rank: usize,
    /// Entries zero on exactly one side.
    pub zero_mismatch: usize,
    /// The sign system has no solution over GF(2).
    pub sign_inconsistent: bool,
    /// Twistor depth used for the `N × N` sector (0 when closed throughout).
    pub depth: usize,
}

/// The plaquette `W(a, a+ô₂ / a+ĉ₁, a+ĉ₁+ĉ₂)` matching `R[(o₁,o₂),(c₁,c₂)]`.
fn entry_plaquette(
    a: &Height<f64>,
    o2: i32,
    c1: i32,
    c2: i32,
    spec: &AlgebraSpec<f64>,
) -> Result<FacePlaquette<f64>> {
    FacePlaquette::from_steps(a, o2, c1, c2, spec)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Corner factor exponent `E` with `W̄ z^{−E/r}` gauge equivalent to `R`.
fn corner_exponent(p: &FacePlaquette<f64>, o1: i32, c1: i32, spec: &AlgebraSpec<f64>) -> Result<f64> {
    let diff = |x: &Height<f64>| -> Vec<f64> { x.x.iter().zip(&p.a.x).map(|(s, t)| s - t).collect() };
    let (db, dc, dd) = (diff(&p.b), diff(&p.c), diff(&p.d));
    let h: Vec<f64> = spec.hat(o1)?.iter().zip(spec.hat(c1)?).map(|(s, t)| s - t).collect();
    Ok(dot(&p.a.x, &h) + 0.5 * (dot(&dd, &dd) - dot(&db, &db) - dot(&dc, &dc)))
}

fn conserved(spec: &AlgebraSpec<f64>, o: (i32, i32), c: (i32, i32)) -> bool {
    let (h1, h2, h3, h4) = (spec.hat(o.0).unwrap(), spec.hat(o.1).unwrap(), spec.hat(c.0).unwrap(), spec.hat(c.1).unwrap());
    (0..h1.len()).all(|x| (h1[x] + h2[x] - h3[x] - h4[x]).abs() < 1e-9)
}

/// Solves `A x = b` over GF(2); `None` when inconsistent.
pub fn gf2_solve(a: &[Vec<u8>], b: &[u8]) -> Option<Vec<u8>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<u8>> = a.iter().zip(b).map(|(r, &v)| r.iter().map(|x| x & 1).chain([v & 1]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..m).find(|&i| rows[i][col] == 1) else { continue };
        rows.swap(row, pr);
        let pivot = rows[row].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != row && r[col] == 1 {
                r.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| r[n] == 1) {
        return None;
    }
    let mut x = vec![0u8; n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][n];
    }
    Some(x)
}

struct GaugeRow {
    k: usize,
    edges: [(usize, f64); 4],
    r: Complex<f64>,
    w: Complex<f64>,
}

/// Compares `R(z, λ)` with `W̄` on the grid `z_k = q^{2u_k}`.
pub fn gauge_equivalence(
    us: &[f64],
    w: &DynamicalWeight<f64>,
    spec: &AlgebraSpec<f64>,
    params: &ModulusParams<f64>,
) -> Result<GaugeReport> {
    gauge_equivalence_with(us, w, spec, params, &wbar_fn(spec, params))
}

pub fn gauge_equivalence_with(
    us: &[f64],
    w: &DynamicalWeight<f64>,
    spec: &AlgebraSpec<f64>,
    params: &ModulusParams<f64>,
    weights: &WeightFn<f64>,
) -> Result<GaugeReport> {
    if us.len() < 2 {
        return Err(Error::Domain("the gauge comparison needs at least two grid points".into()));
    }
    let a = Height::from_weight(w, spec);
    let q = params.q;
    let mut edges: HashMap<(Vec<i64>, Vec<i64>), usize> = HashMap::new();
    let mut eid = |x: &Height<f64>, y: &Height<f64>| {
        let n = edges.len();
        *edges.entry((x.key(), y.key())).or_insert(n)
    };
    let mut rows = Vec::new();
    let mut zero_mismatch = 0;
    let mut depth = 0;
    let (mut cross, mut double) = (0.0f64, 0.0f64);
    let mut first_ratio: Vec<(Complex<f64>, Complex<f64>)> = Vec::new();
    for (k, &u) in us.iter().enumerate() {
        let uc = Complex::new(u, 0.0);
        let z = rpow(q, uc * 2.0);
        let rm = dyn_r(z, w, spec, params, Method::Closed)?;
        if spec.family != Family::A {
            depth = crate::twistor::default_depth(&crate::vectorrep::a_vector(spec, w)?, params);
        }
        let rmax = rm.mat.max_abs();
        let mut cell = Vec::new();
        for &o1 in &spec.j {
            for &o2 in &spec.j {
                for &c1 in &spec.j {
                    for &c2 in &spec.j {
                        if !conserved(spec, (o1, o2), (c1, c2)) {
                            continue;
                        }
                        let p = entry_plaquette(&a, o2, c1, c2, spec)?;
                        let e = corner_exponent(&p, o1, c1, spec)?;
                        let wv = weights(&p, uc)? * rpow(q, uc * (-2.0 * e / params.r));
                        cell.push((p, rm.entry((o1, o2), (c1, c2))?, wv));
                    }
                }
            }
        }
        let wmax = cell.iter().fold(0.0f64, |m, c| m.max(c.2.norm()));
        for (p, rv, wv) in cell {
            let (rz, wz) = (rv.norm() < 1e-12 * rmax, wv.norm() < 1e-12 * wmax);
            if rz != wz {
                zero_mismatch += 1;
            }
            if rz || wz {
                continue;
            }
            let edges = [(eid(&p.a, &p.b), 1.0), (eid(&p.b, &p.d), 1.0), (eid(&p.a, &p.c), -1.0), (eid(&p.c, &p.d), -1.0)];
            rows.push(GaugeRow { k, edges, r: rv, w: wv });
        }
        // Stage 1 on each 2×2 sector.
        for (idx, (i, j)) in pairs(spec).into_iter().enumerate() {
            let rv = |o: (i32, i32), c: (i32, i32)| rm.entry(o, c);
            let wv = |o: (i32, i32), c: (i32, i32)| -> Result<Complex<f64>> { weights(&entry_plaquette(&a, o.1, c.0, c.1, spec)?, uc) };
            let (d1r, d2r) = (rv((i, j), (i, j))?, rv((j, i), (j, i))?);
            let (d1w, d2w) = (wv((i, j), (i, j))?, wv((j, i), (j, i))?);
            let qr = rv((i, j), (j, i))? * rv((j, i), (i, j))? / (d1r * d2r);
            let qw = wv((i, j), (j, i))? * wv((j, i), (i, j))? / (d1w * d2w);
            cross = cross.max((qr / qw - 1.0).norm());
            let (er, ew) = (d1r / d2r, d1w / d2w);
            if k == 0 {
                first_ratio.push((er, ew));
            } else {
                let (er0, ew0) = first_ratio[idx];
                double = double.max(((er / er0) / (ew / ew0) - 1.0).norm());
            }
        }
    }
    let ne = edges.len();
    let nk = us.len();
    let cols = nk + ne;
    let mut am = DMatrix::<f64>::zeros(rows.len(), cols);
    let mut y = DVector::<f64>::zeros(rows.len());
    let mut bits = Vec::with_capacity(rows.len());
    let mut a2 = vec![vec![0u8; cols]; rows.len()];
    let mut phase_dev = 0.0f64;
    for (x, row) in rows.iter().enumerate() {
        am[(x, row.k)] = 1.0;
        a2[x][row.k] ^= 1;
        for &(e, s) in &row.edges {
            am[(x, nk + e)] += s;
            a2[x][nk + e] ^= 1;
        }
        let s = row.w / row.r;
        y[x] = s.norm().ln();
        let th = s.arg().abs();
        let neg = th > std::f64::consts::FRAC_PI_2;
        bits.push(u8::from(neg));
        phase_dev = phase_dev.max(if neg { std::f64::consts::PI - th } else { th });
    }
    let svd = am.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rows.len() <= rank {
        return Err(Error::RankDeficient { rank: rows.len(), cols: rank + 1 });
    }
    let sol = svd.solve(&y, 1e-10 * smax).map_err(|_| Error::Singular)?;
    let fitted = &am * &sol;
    let signs = gf2_solve(&a2, &bits);
    let mut stage2 = 0.0f64;
    for (x, row) in rows.iter().enumerate() {
        let neg = match &signs {
            Some(sv) => a2[x].iter().zip(sv).fold(0u8, |acc, (c, v)| acc ^ (c & v)) == 1,
            None => bits[x] == 1,
        };
        let model = row.r * fitted[x].exp() * if neg { -1.0 } else { 1.0 };
        stage2 = stage2.max((row.w - model).norm() / row.w.norm());
    }
    stage2 = stage2.max(phase_dev);
    if signs.is_none() || zero_mismatch > 0 {
        stage2 = stage2.max(1.0);
    }
    Ok(GaugeReport {
        cross_ratio: cross,
        double_ratio: double,
        stage2,
        rows: rows.len(),
        unknowns: cols,
        rank,
        zero_mismatch,
        sign_inconsistent: signs.is_none(),
        depth,
    })
}

/// The gauge comparison as three reports: cross ratio, double ratio, stage 2.
pub fn gauge_reports(
    us: &[f64],
    w: &DynamicalWeight<f64>,
    spec: &AlgebraSpec<f64>,
    params: &ModulusParams<f64>,
) -> Result<Vec<ResidualReport>> {
    let g = gauge_equivalence(us, w, spec, params)?;
    let base = || {
        let mut r = ResidualReport::new("gauge", spec, params, &w.s);
        for &u in us {
            r = r.arg("u", Complex::new(u, 0.0));
        }
        r.meta("trunc_K", g.depth)
    };
    Ok(vec![
        base().meta("stage", "1-cross-ratio").with_residual(g.cross_ratio),
        base().meta("stage", "1-double-ratio").with_residual(g.double_ratio),
        base()
            .meta("stage", "2-fit")
            .meta("rows", g.rows)
            .meta("unknowns", g.unknowns)
            .meta("rank", g.rank)
            .meta("zero_mismatch", g.zero_mismatch)
            .meta("sign_inconsistent", g.sign_inconsistent)
            .with_residual(g.stage2),
    ])
}

// ---------------------------------------------------------------------------
// Uniqueness of the part (II) diagonal weights.

/// How the part (II) diagonal weights are recovered from the face YBE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part2Mode {
    /// Unknown at the `u` slot only; a linear least-squares problem.
    Linear,
    /// Unknown in all three slots; Gauss-Newton from a perturbed start.
    Nonlinear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Part2Report {
    pub equations: usize,
    pub unknowns: usize,
    /// Numerical rank of the (Jacobian) system.
    pub rank: usize,
    /// `max |x − W̄| / |W̄|` over the unknowns.
    pub error: f64,
    /// Largest equation residual at the solution, relative to the term magnitudes.
    pub residual: f64,
}

#[derive(Clone, Copy)]
enum Factor {
    Known(Complex<f64>),
    Unknown(usize),
}

type Term = (f64, [Factor; 3]);

/// Solves the face YBE around `a` (and its neighbours when `radius = 1`) for
/// the `II-diag` weights, and compares with `W̄`.
pub fn part2_unique(
    a: &Height<f64>,
    u: f64,
    v: f64,
    radius: usize,
    mode: Part2Mode,
    spec: &AlgebraSpec<f64>,
    params: &ModulusParams<f64>,
) -> Result<Part2Report> {
    if spec.family == Family::A {
        return Err(Error::Unsupported("A has no part (II) weights".into()));
    }
    let slots = [u, u + v, v];
    let mut ids: HashMap<(Vec<i64>, Vec<i64>, usize), usize> = HashMap::new();
    let mut exact: Vec<Complex<f64>> = Vec::new();
    let mut factor = |p: &FacePlaquette<f64>, slot: usize| -> Result<Factor> {
        let val = wbar(p, Complex::new(slots[slot], 0.0), spec, params)?;
        let free = p.pattern == Pattern::IIDiag && (slot == 0 || mode == Part2Mode::Nonlinear);
        if !free {
            return Ok(Factor::Known(val));
        }
        let n = ids.len();
        let id = *ids.entry((p.a.key(), p.b.key(), slot)).or_insert(n);
        if id == exact.len() {
            exact.push(val);
        }
        Ok(Factor::Unknown(id))
    };
    let mut bases = vec![a.clone()];
    if radius > 0 {
        bases.extend(nbrs(a, spec, params));
    }
    let mut eqs: Vec<Vec<Term>> = Vec::new();
    for base in &bases {
        for hx in hexagons(base, spec, params) {
            let [a, b, c, d, e, f] = &hx;
            let mut terms = Vec::new();
            for g in nbrs(b, spec, params) {
                if let (Some(p1), Some(p2), Some(p3)) = (plq(f, &g, e, d, spec), plq(a, b, f, &g, spec), plq(b, c, &g, d, spec)) {
                    terms.push((1.0, [factor(&p1, 0)?, factor(&p2, 1)?, factor(&p3, 2)?]));
                }
            }
            for g in nbrs(a, spec, params) {
                if let (Some(p1), Some(p2), Some(p3)) = (plq(a, b, &g, c, spec), plq(&g, c, e, d, spec), plq(a, &g, f, e, spec)) {
                    terms.push((-1.0, [factor(&p1, 0)?, factor(&p2, 1)?, factor(&p3, 2)?]));
                }
            }
            if terms.iter().any(|(_, fs)| fs.iter().any(|f| matches!(f, Factor::Unknown(_)))) {
                eqs.push(terms);
            }
        }
    }
    let nu = exact.len();
    if nu == 0 {
        return Err(Error::Domain("no part (II) diagonal weights around this height".into()));
    }
    // Rows are scaled by their total term magnitude at `W̄`, so that large
    // entries do not dominate the rounding error.
    let scales: Vec<f64> = eqs
        .iter()
        .map(|terms| {
            let s: f64 = terms
                .iter()
                .map(|(_, fs)| {
                    fs.iter()
                        .map(|f| match f {
                            Factor::Known(v) => v.norm(),
                            Factor::Unknown(j) => exact[*j].norm(),
                        })
                        .product::<f64>()
                })
                .sum();
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    let eval = |x: &[Complex<f64>]| -> (DVector<Complex<f64>>, DMatrix<Complex<f64>>) {
        let mut f = DVector::zeros(eqs.len());
        let mut jac = DMatrix::zeros(eqs.len(), nu);
        for (i, terms) in eqs.iter().enumerate() {
            for (sg, fs) in terms {
                let vals: Vec<Complex<f64>> = fs
                    .iter()
                    .map(|f| match f {
                        Factor::Known(v) => *v,
                        Factor::Unknown(j) => x[*j],
                    })
                    .collect();
                let sg = *sg * scales[i];
                f[i] += vals.iter().product::<Complex<f64>>() * sg;
                for (s, fac) in fs.iter().enumerate() {
                    if let Factor::Unknown(j) = fac {
                        let rest: Complex<f64> = (0..3).filter(|&t| t != s).map(|t| vals[t]).product();
                        jac[(i, *j)] += rest * sg;
                    }
                }
            }
        }
        (f, jac)
    };
    let rank_of = |m: &DMatrix<Complex<f64>>| {
        let s = m.clone().svd(false, false).singular_values;
        let smax = s.max();
        s.iter().filter(|&&x| x > 1e-10 * smax).count()
    };
    let x = match mode {
        Part2Mode::Linear => {
            // Linear in x: F(x) = F(0) + J x.
            let (f0, jac) = eval(&vec![Complex::new(0.0, 0.0); nu]);
            let svd = jac.svd(true, true);
            let smax = svd.singular_values.max();
            let sol = svd.solve(&(-f0), 1e-12 * smax).map_err(|_| Error::Singular)?;
            sol.iter().copied().collect::<Vec<_>>()
        }
        Part2Mode::Nonlinear => {
            let mut x: Vec<Complex<f64>> = exact
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let t = i as f64;
                    e * Complex::new(1.0 + 0.05 * (1.7 * t + 0.3).sin(), 0.05 * (2.3 * t + 1.1).cos())
                })
                .collect();
            for _ in 0..60 {
                let (f, jac) = eval(&x);
                let svd = jac.svd(true, true);
                let smax = svd.singular_values.max();
                let dx = svd.solve(&(-f), 1e-12 * smax).map_err(|_| Error::Singular)?;
                let step = dx.iter().zip(&x).fold(0.0f64, |m, (d, v)| m.max(d.norm() / v.norm().max(1e-300)));
                x.iter_mut().zip(dx.iter()).for_each(|(v, d)| *v += d);
                if step < 1e-15 {
                    break;
                }
            }
            x
        }
    };
    let (f, jac) = eval(&x);
    let error = x.iter().zip(&exact).fold(0.0f64, |m, (s, e)| m.max((s - e).norm() / e.norm()));
    Ok(Part2Report {
        equations: eqs.len(),
        unknowns: nu,
        rank: rank_of(&jac),
        error,
        residual: f.iter().fold(0.0f64, |m, v| m.max(v.norm())),
    })
}

pub fn part2_report(
    a: &Height<f64>,
    u: f64,
    v: f64,
    mode: Part2Mode,
    spec: &AlgebraSpec<f64>,
    params: &ModulusParams<f64>,
) -> Result<ResidualReport> {
    let p = part2_unique(a, u, v, 0, mode, spec, params)?;
    let full = p.rank == p.unknowns;
    Ok(ResidualReport::new("part2-unique", spec, params, &a.x)
        .arg("u", Complex::new(u, 0.0))
        .arg("v", Complex::new(v, 0.0))
        .meta("mode", format!("{mode:?}"))
        .meta("equations", p.equations)
        .meta("unknowns", p.unknowns)
        .meta("rank", p.rank)
        .meta("equation_residual", format!("{:e}", p.residual))
        .with_residual(if full { p.error } else { f64::INFINITY }))
}
