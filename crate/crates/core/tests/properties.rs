//! Invariants of the special functions and the face weights at random arguments.

use ellface::faceweights::{plaquettes_at, wbar, KappaSpec};
use ellface::liealg::{build_algebra, DynamicalWeight, Family, Height};
use ellface::qspecial::{bracket, phi21, qgamma, qpoch, theta_p, Len, ModulusParams};
use ellface::verify::unitarity_residual;
use ellface::C64;
use proptest::prelude::*;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn annulus() -> impl Strategy<Value = C64> {
    (0.3f64..2.0, -3.1f64..3.1).prop_map(|(m, t)| C64::from_polar(m, t))
}

fn spectral() -> impl Strategy<Value = C64> {
    (-0.9f64..0.9, -0.4f64..0.4).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_inversion(z in annulus(), p in 0.01f64..0.5) {
        let lhs = theta_p(C64::new(p, 0.0) / z, p).unwrap();
        prop_assert!(rel(lhs, theta_p(z, p).unwrap()) < 1e-12);
    }

    #[test]
    fn theta_quasi_periodic(z in annulus(), p in 0.01f64..0.5) {
        let lhs = theta_p(z * p, p).unwrap();
        let rhs = -theta_p(z, p).unwrap() / z;
        prop_assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn bracket_odd_and_antiperiodic(u in spectral(), r in 3.0f64..12.0) {
        let params = ModulusParams::<f64>::new(0.4, r).unwrap();
        let b = bracket(u, &params);
        prop_assert!(rel(bracket(-u, &params), -b) < 1e-11);
        prop_assert!(rel(bracket(u + r, &params), -b) < 1e-9);
    }

    #[test]
    fn qgamma_recursion(z in (0.2f64..3.0, -1.0f64..1.0), q in 0.1f64..0.8) {
        let z = C64::new(z.0, z.1);
        let lhs = qgamma(z + 1.0, q).unwrap();
        let factor = (C64::new(1.0, 0.0) - C64::new(q, 0.0).powc(z)) / (1.0 - q);
        prop_assert!(rel(lhs, factor * qgamma(z, q).unwrap()) < 1e-11);
    }

    #[test]
    fn phi21_matches_direct_sum(a in annulus(), b in annulus(), c in (0.0f64..0.5), z in (0.0f64..0.6, -3.1f64..3.1), q in 0.1f64..0.7) {
        let c = C64::new(c, 0.2);
        let z = C64::from_polar(z.0, z.1);
        let mut direct = C64::new(0.0, 0.0);
        for n in 0..400usize {
            let num = qpoch(a, q, Len::Finite(n)).unwrap() * qpoch(b, q, Len::Finite(n)).unwrap();
            let den = qpoch(c, q, Len::Finite(n)).unwrap() * qpoch(C64::new(q, 0.0), q, Len::Finite(n)).unwrap();
            direct += num / den * z.powu(n as u32);
        }
        prop_assert!(rel(phi21(a, b, c, q, z).unwrap(), direct) < 1e-10);
    }

    #[test]
    fn q_binomial(a in annulus(), z in (0.0f64..0.7, -3.1f64..3.1), q in 0.1f64..0.7) {
        // ₂φ₁(a, c; c; q, z) = (az; q)_∞ / (z; q)_∞.
        let z = C64::from_polar(z.0, z.1);
        let c = C64::new(0.3, -0.1);
        let want = qpoch(a * z, q, Len::Infinite).unwrap() / qpoch(z, q, Len::Infinite).unwrap();
        prop_assert!(rel(phi21(a, c, c, q, z).unwrap(), want) < 1e-11);
    }
}

struct Model {
    spec: ellface::Spec,
    params: ellface::Params,
    a: ellface::Heights,
    kappa: ellface::Kappa,
}

fn model(f: Family, n: usize, s: &[f64], r: f64) -> Model {
    let spec = build_algebra(f, n, 0.4f64).unwrap();
    let params = ModulusParams::<f64>::new(0.4, r).unwrap();
    let a = Height::from_weight(&DynamicalWeight::new(s.to_vec(), &spec).unwrap(), &spec);
    let kappa = KappaSpec::build(&spec, &params).unwrap();
    Model { spec, params, a, kappa }
}

fn models() -> Vec<Model> {
    vec![
        model(Family::A, 1, &[0.0, 2.3], 10.0),
        model(Family::A, 2, &[0.0, 2.3, 1.9], 10.0),
        model(Family::B, 2, &[0.0, 2.5, 4.6], 14.0),
        model(Family::C, 2, &[0.0, 3.61, 4.37], 30.0),
        model(Family::D, 3, &[0.0, 1.3, 1.9, 4.7], 14.0),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kappa_inversion(u in spectral()) {
        for m in models() {
            let v = m.kappa.eval(u) * m.kappa.eval(-u);
            prop_assert!((v - 1.0).norm() < 1e-9, "{}{}: {v}", m.spec.family, m.spec.n);
        }
    }

    #[test]
    fn wbar_is_identity_at_zero(_x in 0u8..1) {
        for m in models() {
            for p in plaquettes_at(&m.a, &m.spec, &m.params) {
                let v = wbar(&p, C64::new(0.0, 0.0), &m.spec, &m.params).unwrap();
                let want = if p.b.same(&p.c) { 1.0 } else { 0.0 };
                prop_assert!((v - want).norm() < 1e-12, "{} at u = 0: {v}", p.pattern);
            }
        }
    }

    #[test]
    fn unitarity_at_random_u(u in spectral()) {
        for m in models() {
            for p in plaquettes_at(&m.a, &m.spec, &m.params) {
                let r = unitarity_residual(&p.a, &p.b, &p.d, &p.c, u, &m.spec, &m.params).unwrap();
                prop_assert!(r.residual < 1e-8, "{}{}: {}", m.spec.family, m.spec.n, r.residual);
            }
        }
    }
}
