//! Acceptance suite: one line per criterion, then the negative controls.
//! Exits non-zero if any line fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ellface::faceweights::{plaquettes_at, FacePlaquette, KappaSpec};
use ellface::liealg::{build_algebra, DynamicalWeight, Family, Height};
use ellface::qspecial::{bracket, connection_residual, theta_p, ModulusParams};
use ellface::trigr::qybe_residual;
use ellface::twistor::{
    cocycle_depth, cocycle_residual, default_depth, dybe_residual, twistor_closed, twistor_diff_residual, twistor_numeric, Method,
};
use ellface::vectorrep::a_vector;
use ellface::verify::{
    corner_keys, crossing_sweep, crossing_sweep_with, face_ybe_sweep, face_ybe_sweep_with, gauge_equivalence, gauge_equivalence_with,
    kappa_report, part2_report, perturbed, second_inversion_sweep, second_inversion_sweep_with, unitarity_sweep, unitarity_sweep_with,
    wbar_fn, weight_fn, Part2Mode, WeightFn,
};
use ellface::{Heights, Kappa, Params, Spec, Weight, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const Q: f64 = 0.4;
const US: [f64; 6] = [0.11, 0.23, 0.37, 0.52, 0.64, 0.81];
const BUMP: f64 = 1e-3;
const CONTROL_FLOOR: f64 = 1e-5;

struct Model {
    name: String,
    spec: Spec,
    params: Params,
    w: Weight,
    a: Heights,
}

impl Model {
    fn new(family: Family, n: usize, s: &[f64], r: f64) -> Model {
        let spec = build_algebra(family, n, Q).unwrap();
        let params = ModulusParams::new(Q, r).unwrap();
        let w = DynamicalWeight::new(s.to_vec(), &spec).unwrap();
        let a = Height::from_weight(&w, &spec);
        Model { name: format!("{family}{n}"), spec, params, w, a }
    }

    fn kappa(&self) -> Kappa {
        KappaSpec::build(&self.spec, &self.params).unwrap()
    }
}

fn a1() -> Model {
    Model::new(Family::A, 1, &[0.0, 2.3], 10.0)
}
fn a2() -> Model {
    Model::new(Family::A, 2, &[0.0, 2.3, 1.9], 10.0)
}
fn b2() -> Model {
    Model::new(Family::B, 2, &[0.0, 2.5, 4.6], 14.0)
}
fn c2() -> Model {
    Model::new(Family::C, 2, &[0.0, 3.61, 4.37], 30.0)
}
fn d3() -> Model {
    Model::new(Family::D, 3, &[0.0, 1.3, 1.9, 4.7], 14.0)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A generic multiplicative spectral point `q^{2u}` with a phase.
fn random_z(rng: &mut StdRng) -> C64 {
    let u: f64 = rng.random_range(0.1..0.9);
    let t: f64 = rng.random_range(-0.5..0.5);
    C64::from_polar(Q.powf(2.0 * u), t)
}

/// Outcome and detail lines of one criterion.
struct Check {
    detail: Vec<String>,
    ok: bool,
}

impl Check {
    fn new() -> Check {
        Check { detail: Vec::new(), ok: true }
    }

    /// `value < tol`; NaN fails.
    fn below(&mut self, label: &str, value: f64, tol: f64) {
        let pass = value < tol;
        self.ok &= pass;
        self.detail.push(format!("{label} {value:.1e}{}{tol:.0e}", if pass { "<" } else { " NOT < " }));
    }

    /// `value > floor`, for the negative controls.
    fn above(&mut self, label: &str, value: f64, floor: f64) {
        let pass = value > floor;
        self.ok &= pass;
        self.detail.push(format!("{label} {value:.1e}{}{floor:.0e}", if pass { ">" } else { " NOT > " }));
    }

    fn within(&mut self, label: &str, took: Duration, limit: Duration) {
        let pass = took < limit;
        self.ok &= pass;
        self.detail.push(format!("{label} {:.2}s{}{}s", took.as_secs_f64(), if pass { "<" } else { " NOT < " }, limit.as_secs()));
    }
}

fn report(id: &str, title: &str, run: impl FnOnce(&mut Check)) -> bool {
    let mut ch = Check::new();
    run(&mut ch);
    println!("{} {id:<4} {title}", if ch.ok { "PASS" } else { "FAIL" });
    for d in &ch.detail {
        println!("       {d}");
    }
    ch.ok
}

fn criterion_1(ch: &mut Check) {
    let start = Instant::now();
    let params = ModulusParams::new(Q, 6.0).unwrap();
    let p = params.p;
    let grid: Vec<C64> = (0..20).map(|k| C64::from_polar(0.35 + 0.08 * k as f64, 0.3 + 0.29 * k as f64)).collect();
    let us: Vec<C64> = (0..20).map(|k| c(-2.7 + 0.29 * k as f64, 0.05 * (k as f64 - 9.5))).collect();
    let rel = |x: C64, y: C64| (x - y).norm() / x.norm().max(y.norm());
    let (mut inv, mut per, mut odd, mut anti) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &z in &grid {
        let t = theta_p(z, p).unwrap();
        inv = inv.max(rel(theta_p(c(p, 0.0) / z, p).unwrap(), t));
        per = per.max(rel(theta_p(z * p, p).unwrap(), -t / z));
    }
    for &u in &us {
        let b = bracket(u, &params);
        odd = odd.max(rel(bracket(-u, &params), -b));
        anti = anti.max(rel(bracket(u + 6.0, &params), -b));
    }
    let abc = [c(0.3, 0.0), c(0.7, 0.0), c(1.4, 0.0)];
    let conn = (0..20)
        .map(|k| connection_residual(abc[0], abc[1], abc[2], Q, C64::from_polar(2.4, 0.2 + 0.31 * k as f64)).unwrap())
        .fold(0.0f64, f64::max);
    let took = start.elapsed();
    ch.below("theta inversion", inv, 1e-9);
    ch.below("theta quasi-periodicity", per, 1e-9);
    ch.below("[-u] = -[u]", odd, 1e-9);
    ch.below("[u+r] = -[u]", anti, 1e-9);
    ch.below("2phi1 connection", conn, 1e-9);
    ch.within("runtime", took, Duration::from_secs(1));
}

fn criterion_2(ch: &mut Check) {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    for (m, tol) in [(a1(), 1e-9), (a2(), 1e-9), (b2(), 1e-8), (c2(), 1e-8), (d3(), 1e-8)] {
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let (z1, z2) = (random_z(&mut rng), random_z(&mut rng));
            worst = worst.max(qybe_residual(z1, z2, &m.spec).unwrap());
        }
        ch.below(&m.name, worst, tol);
    }
    ch.within("runtime", start.elapsed(), Duration::from_secs(30));
}

fn criterion_3(ch: &mut Check) {
    for m in [a1(), a2(), b2(), c2(), d3()] {
        let start = Instant::now();
        let a = a_vector(&m.spec, &m.w).unwrap();
        let k = default_depth(&a, &m.params);
        ch.below(&format!("{} p^K (K = {k})", m.name), m.params.p.powi(k as i32), 1e-12);
        let (mut closed, mut product, mut agree) = (0.0f64, 0.0f64, 0.0f64);
        for &u in &US {
            let z = C64::from_polar(Q.powf(2.0 * u), 0.3);
            closed = closed.max(twistor_diff_residual(z, &m.w, None, &m.spec, &m.params, Method::Closed).unwrap());
            product = product.max(twistor_diff_residual(z, &m.w, Some(k), &m.spec, &m.params, Method::Product).unwrap());
            let fp = twistor_numeric(z, &m.w, k, &m.spec, &m.params).unwrap().f.mat;
            let fc = twistor_closed(z, &m.w, &m.spec, &m.params).unwrap().f.mat;
            agree = agree.max((&fp - &fc).max_abs());
        }
        ch.below(&format!("{} closed", m.name), closed, 1e-9);
        ch.below(&format!("{} product", m.name), product, 1e-8);
        ch.below(&format!("{} agreement", m.name), agree, 1e-8);
        ch.within(&format!("{} runtime", m.name), start.elapsed(), Duration::from_secs(60));
    }
}

fn criterion_4(ch: &mut Check) {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    for (m, tol) in [(a1(), 1e-8), (b2(), 1e-7), (c2(), 1e-7), (d3(), 1e-7)] {
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let (z1, z2) = (random_z(&mut rng), random_z(&mut rng));
            worst = worst.max(dybe_residual(z1, z2, &m.w, &m.spec, &m.params, Method::Closed).unwrap());
        }
        ch.below(&m.name, worst, tol);
    }
    ch.within("runtime", start.elapsed(), Duration::from_secs(120));
}

fn criterion_5(ch: &mut Check) {
    let mut rng = StdRng::seed_from_u64(5);
    for m in [a1(), b2()] {
        let k = cocycle_depth(&a_vector(&m.spec, &m.w).unwrap(), &m.spec, &m.params);
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let zs = [random_z(&mut rng), random_z(&mut rng), random_z(&mut rng)];
            worst = worst.max(cocycle_residual(zs, &m.w, k, &m.spec, &m.params).unwrap());
        }
        ch.below(&format!("{} (K = {k})", m.name), worst, 1e-7);
    }
}

fn criterion_6(ch: &mut Check) {
    let start = Instant::now();
    for (m, tol) in [(a1(), 1e-9), (b2(), 1e-8), (c2(), 1e-8), (d3(), 1e-8)] {
        let k = m.kappa();
        let (mut ybe, mut unit, mut inv, mut cross) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (x, &u) in US.iter().enumerate() {
            let (uc, vc) = (c(u, 0.0), c(US[(x + 1) % US.len()], 0.0));
            ybe = ybe.max(face_ybe_sweep(&m.a, uc, vc, &m.spec, &m.params).unwrap().residual);
            unit = unit.max(unitarity_sweep(&m.a, uc, &m.spec, &m.params).unwrap().residual);
            inv = inv.max(second_inversion_sweep(&m.a, uc, &m.spec, &m.params, &k).unwrap().residual);
            cross = cross.max(crossing_sweep(&m.a, uc, &m.spec, &m.params, &k).unwrap().residual);
        }
        ch.below(&format!("{} face YBE", m.name), ybe, tol);
        ch.below(&format!("{} unitarity", m.name), unit, tol);
        ch.below(&format!("{} second inversion", m.name), inv, 1e-8);
        ch.below(&format!("{} crossing", m.name), cross, 1e-8);
    }
    ch.within("runtime", start.elapsed(), Duration::from_secs(120));
}

fn criterion_7(ch: &mut Check) {
    for m in [b2(), c2(), d3()] {
        let mut worst = 0.0f64;
        for x in 0..US.len() - 1 {
            worst = worst.max(part2_report(&m.a, US[x], US[x + 1], Part2Mode::Linear, &m.spec, &m.params).unwrap().residual);
        }
        ch.below(&format!("{} linear", m.name), worst, 1e-8);
        let nl = part2_report(&m.a, US[0], US[1], Part2Mode::Nonlinear, &m.spec, &m.params).unwrap().residual;
        ch.below(&format!("{} nonlinear", m.name), nl, 1e-8);
    }
}

fn criterion_8(ch: &mut Check) {
    let start = Instant::now();
    for m in [a1(), a2(), b2(), c2(), d3()] {
        let g = gauge_equivalence(&US, &m.w, &m.spec, &m.params).unwrap();
        ch.below(&format!("{} cross ratio", m.name), g.cross_ratio, 1e-8);
        ch.below(&format!("{} double ratio", m.name), g.double_ratio, 1e-8);
        ch.below(&format!("{} stage 2 ({} rows)", m.name, g.rows), g.stage2, 1e-7);
    }
    ch.within("runtime", start.elapsed(), Duration::from_secs(300));
}

fn criterion_9(ch: &mut Check) {
    for m in [a1(), a2(), b2(), c2(), d3()] {
        let r = kappa_report(&m.spec, &m.params).unwrap();
        ch.below(&m.name, r.residual, 1e-9);
    }
}

/// Perturbs each plaquette at the base height in turn; the smallest resulting
/// residual must clear the floor.
/// With `at = Some(u)` only the value at spectral argument `u` is scaled.
fn control(ch: &mut Check, m: &Model, label: &str, at: Option<C64>, identity: impl Fn(&WeightFn<f64>) -> f64) {
    let k = m.kappa();
    let base = weight_fn(&m.spec, &m.params, &k);
    let plqs = plaquettes_at(&m.a, &m.spec, &m.params);
    let mut least = f64::INFINITY;
    for p in &plqs {
        let bumped = perturbed(&base, corner_keys(p), BUMP);
        let w = |q: &FacePlaquette<f64>, u: C64| if at.is_none_or(|x| x == u) { bumped(q, u) } else { base(q, u) };
        least = least.min(identity(&w));
    }
    ch.above(&format!("{} {label}, weakest of {} entries", m.name, plqs.len()), least, CONTROL_FLOOR);
}

fn negative_controls(ch: &mut Check) {
    let (u, v) = (c(0.37, 0.0), c(0.23, 0.0));
    for m in [a1(), b2(), c2(), d3()] {
        let (spec, params, a) = (&m.spec, &m.params, &m.a);
        control(ch, &m, "face YBE", None, |w| face_ybe_sweep_with(a, u, v, spec, params, w).unwrap().residual);
        control(ch, &m, "unitarity", None, |w| unitarity_sweep_with(a, u, spec, params, w).unwrap().residual);
        control(ch, &m, "second inversion", None, |w| second_inversion_sweep_with(a, u, spec, params, w).unwrap().residual);
        // The all-equal plaquette of B is its own crossing image, and the squared
        // relation is homogeneous in it: scale W(u) only, not W(η − u).
        control(ch, &m, "crossing", Some(u), |w| crossing_sweep_with(a, u, spec, params, w).unwrap().residual);
    }
    // Gauge: a single entry perturbed at one grid point.
    for m in [a1(), b2(), d3()] {
        let base = wbar_fn(&m.spec, &m.params);
        let mut least = f64::INFINITY;
        let plqs: Vec<FacePlaquette<f64>> = plaquettes_at(&m.a, &m.spec, &m.params);
        for p in &plqs {
            let keys = corner_keys(p);
            let w = |q: &FacePlaquette<f64>, uu: C64| {
                let val = base(q, uu)?;
                Ok(if corner_keys(q) == keys && uu.re == US[2] { val * (1.0 + BUMP) } else { val })
            };
            let g = gauge_equivalence_with(&US, &m.w, &m.spec, &m.params, &w).unwrap();
            least = least.min(g.stage2.max(g.cross_ratio).max(g.double_ratio));
        }
        ch.above(&format!("{} gauge, weakest of {} entries", m.name, plqs.len()), least, CONTROL_FLOOR);
    }
}

fn main() -> ExitCode {
    let results = [
        report("1", "q-kernel identities", criterion_1),
        report("2", "trigonometric YBE", criterion_2),
        report("3", "twistor difference equation", criterion_3),
        report("4", "dynamical YBE", criterion_4),
        report("5", "shifted cocycle", criterion_5),
        report("6", "face YBE, unitarity, second inversion, crossing", criterion_6),
        report("7", "uniqueness of the part II weights", criterion_7),
        report("8", "gauge equivalence of R and the face weights", criterion_8),
        report("9", "kappa functional equations", criterion_9),
        report("neg", "negative controls (one entry scaled by 1 + 1e-3)", negative_controls),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
