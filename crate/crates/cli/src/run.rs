//! The three subcommands.

use std::collections::BTreeMap;

use ellface::faceweights::{plaquettes_at, wbar, KappaSpec};
use ellface::liealg::Height;
use ellface::trigr::qybe_residual;
use ellface::twistor::{
    cocycle_depth, cocycle_residual, default_depth, dybe_residual, twistor_closed, twistor_diff_residual, twistor_numeric, Method,
};
use ellface::vectorrep::a_vector;
use ellface::verify::{
    conn_formula_report, crossing_sweep, face_ybe_sweep, gauge_reports, kappa_report, part2_report,
    second_inversion_sweep, unitarity_sweep, Part2Mode, ResidualReport,
};
use ellface::{Error, C64};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{pair, provenance, render};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct WeightRow {
    pub u: [f64; 2],
    pub pattern: String,
    pub nu: i32,
    pub mu: i32,
    pub lam: i32,
    pub wbar: [f64; 2],
    pub kappa: [f64; 2],
    pub w: [f64; 2],
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct WeightCsv {
    pub u_re: f64,
    pub u_im: f64,
    pub pattern: String,
    pub nu: i32,
    pub mu: i32,
    pub lam: i32,
    pub wbar_re: f64,
    pub wbar_im: f64,
    pub kappa_re: f64,
    pub kappa_im: f64,
    pub w_re: f64,
    pub w_im: f64,
}

/// Table of `W̄`, `κ` and `W` for every plaquette at the base height.
pub fn cmd_weights(cfg: &RunConfig) -> Result<String, CliError> {
    let (spec, params) = (&cfg.spec, &cfg.params);
    let kappa = KappaSpec::build(spec, params)?;
    let a = Height::from_weight(&cfg.weight, spec);
    let plqs = plaquettes_at(&a, spec, params);
    let mut rows = Vec::new();
    for &u in &cfg.u {
        let uc = C64::new(u, 0.0);
        let k = kappa.eval(uc);
        for p in &plqs {
            let wb = wbar(p, uc, spec, params)?;
            let w = k * wb;
            rows.push(WeightRow {
                u: pair(u, 0.0),
                pattern: p.pattern.name().to_string(),
                nu: p.nu,
                mu: p.mu,
                lam: p.lam,
                wbar: pair(wb.re, wb.im),
                kappa: pair(k.re, k.im),
                w: pair(w.re, w.im),
            });
        }
    }
    let csv: Vec<WeightCsv> = rows
        .iter()
        .map(|r| WeightCsv {
            u_re: r.u[0],
            u_im: r.u[1],
            pattern: r.pattern.clone(),
            nu: r.nu,
            mu: r.mu,
            lam: r.lam,
            wbar_re: r.wbar[0],
            wbar_im: r.wbar[1],
            kappa_re: r.kappa[0],
            kappa_im: r.kappa[1],
            w_re: r.w[0],
            w_im: r.w[1],
        })
        .collect();
    let meta = provenance(
        cfg,
        "weights",
        json!({
            "entries_per_u": plqs.len(),
            "kappa_inversion_residual": kappa.inversion_residual,
            "kappa_family_residual": kappa.family_residual,
        }),
    );
    render(cfg, meta, &rows, &csv)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TwistorRow {
    pub z: [f64; 2],
    pub row: [i32; 2],
    pub col: [i32; 2],
    pub product: [f64; 2],
    pub closed: [f64; 2],
    pub disagreement: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TwistorCsv {
    pub z_re: f64,
    pub z_im: f64,
    pub row_i: i32,
    pub row_k: i32,
    pub col_j: i32,
    pub col_l: i32,
    pub product_re: f64,
    pub product_im: f64,
    pub closed_re: f64,
    pub closed_im: f64,
    pub disagreement: f64,
}

/// `F(z, λ)` entrywise by the truncated product and by the closed/hybrid form.
pub fn cmd_twistor(cfg: &RunConfig) -> Result<String, CliError> {
    let (spec, params) = (&cfg.spec, &cfg.params);
    let a = a_vector(spec, &cfg.weight)?;
    let k = cfg.trunc_k.unwrap_or_else(|| default_depth(&a, params));
    let zs = cfg.z_grid();
    let blocks: Vec<Result<Vec<TwistorRow>, CliError>> = zs
        .par_iter()
        .map(|&z| {
            let zc = C64::new(z, 0.0);
            let fp = twistor_numeric(zc, &cfg.weight, k, spec, params)?.f;
            let fc = twistor_closed(zc, &cfg.weight, spec, params)?.f;
            let mut out = Vec::new();
            for &i in &spec.j {
                for &kk in &spec.j {
                    for &j in &spec.j {
                        for &l in &spec.j {
                            let p = fp.entry((i, kk), (j, l))?;
                            let c = fc.entry((i, kk), (j, l))?;
                            out.push(TwistorRow {
                                z: pair(z, 0.0),
                                row: [i, kk],
                                col: [j, l],
                                product: pair(p.re, p.im),
                                closed: pair(c.re, c.im),
                                disagreement: (p - c).norm(),
                            });
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    let csv: Vec<TwistorCsv> = rows
        .iter()
        .map(|r| TwistorCsv {
            z_re: r.z[0],
            z_im: r.z[1],
            row_i: r.row[0],
            row_k: r.row[1],
            col_j: r.col[0],
            col_l: r.col[1],
            product_re: r.product[0],
            product_im: r.product[1],
            closed_re: r.closed[0],
            closed_im: r.closed[1],
            disagreement: r.disagreement,
        })
        .collect();
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.disagreement));
    let meta = provenance(
        cfg,
        "twistor",
        json!({ "depth": k, "max_disagreement": worst, "closed_method": if cfg.family == ellface::liealg::Family::A { "closed" } else { "hybrid" } }),
    );
    render(cfg, meta, &rows, &csv)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: String,
    pub value: [f64; 2],
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub identity: String,
    pub index: usize,
    pub status: String,
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub point: Vec<f64>,
    pub args: Vec<Arg>,
    pub meta: BTreeMap<String, String>,
    pub error: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerifyCsv {
    pub identity: String,
    pub index: usize,
    pub status: String,
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub args: String,
    pub meta: String,
    pub error: String,
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Qybe(C64, C64),
    Diff(C64, Method),
    Dybe(C64, C64),
    Cocycle([C64; 3]),
    FaceYbe(f64, f64),
    Unitarity(f64),
    Inversion(f64),
    Crossing(f64),
    Gauge,
    Part2(f64, f64, Part2Mode),
    Kappa,
    Conn,
}

fn tasks(cfg: &RunConfig, suite: &str) -> Vec<Task> {
    let zs: Vec<C64> = cfg.z_grid().iter().map(|&z| C64::new(z, 0.0)).collect();
    let us = &cfg.u;
    let nz = zs.len();
    let nu = us.len();
    let tw = |z: C64, t: f64| z * C64::from_polar(1.0, t);
    match suite {
        "qybe" => (0..nz).map(|k| Task::Qybe(tw(zs[k], 0.2), tw(zs[(k + 1) % nz], -0.1))).collect(),
        "twistor-diff" => zs
            .iter()
            .flat_map(|&z| [Task::Diff(tw(z, 0.3), Method::Product), Task::Diff(tw(z, 0.3), Method::Closed)])
            .collect(),
        "dybe" => (0..nz).map(|k| Task::Dybe(tw(zs[k], 0.1), tw(zs[(k + 1) % nz], -0.2))).collect(),
        "cocycle" => (0..nz).map(|k| Task::Cocycle([tw(zs[k], 0.1), zs[(k + 1) % nz], tw(zs[(k + 2) % nz], -0.1)])).collect(),
        "face-ybe" => (0..nu).map(|k| Task::FaceYbe(us[k], us[(k + 1) % nu])).collect(),
        "unitarity" => us.iter().map(|&u| Task::Unitarity(u)).collect(),
        "inversion2" => us.iter().map(|&u| Task::Inversion(u)).collect(),
        "crossing" => us.iter().map(|&u| Task::Crossing(u)).collect(),
        "gauge" => vec![Task::Gauge],
        "part2-unique" => {
            let mut t: Vec<Task> = (0..nu).map(|k| Task::Part2(us[k], us[(k + 1) % nu], Part2Mode::Linear)).collect();
            t.push(Task::Part2(us[0], us[1 % nu], Part2Mode::Nonlinear));
            t
        }
        "kappa" => vec![Task::Kappa],
        "conn-formula" => vec![Task::Conn],
        _ => Vec::new(),
    }
}

fn run_task(cfg: &RunConfig, task: Task) -> ellface::Result<Vec<ResidualReport>> {
    let (spec, params, w) = (&cfg.spec, &cfg.params, &cfg.weight);
    let a = Height::from_weight(w, spec);
    let base = |name: &str| ResidualReport::new(name, spec, params, &cfg.s);
    let cu = |u: f64| C64::new(u, 0.0);
    let kappa = || KappaSpec::build(spec, params);
    let depth = || -> ellface::Result<usize> { Ok(cfg.trunc_k.unwrap_or(default_depth(&a_vector(spec, w)?, params))) };
    let one = |r: ResidualReport| Ok(vec![r]);
    match task {
        Task::Qybe(z1, z2) => one(base("qybe").arg("z1", z1).arg("z2", z2).with_residual(qybe_residual(z1, z2, spec)?)),
        Task::Diff(z, m) => {
            let k = match m {
                Method::Product => Some(depth()?),
                _ => None,
            };
            let r = twistor_diff_residual(z, w, k, spec, params, m)?;
            let rep = base("twistor-diff").arg("z", z).meta("method", format!("{m:?}").to_lowercase());
            one(match k {
                Some(k) => rep.meta("trunc_K", k),
                None => rep,
            }
            .with_residual(r))
        }
        Task::Dybe(z1, z2) => {
            let r = dybe_residual(z1, z2, w, spec, params, Method::Closed)?;
            one(base("dybe").arg("z1", z1).arg("z2", z2).with_residual(r))
        }
        Task::Cocycle(zs) => {
            let k = cfg.trunc_k.unwrap_or(cocycle_depth(&a_vector(spec, w)?, spec, params));
            let r = cocycle_residual(zs, w, k, spec, params)?;
            one(base("cocycle").arg("z1", zs[0]).arg("z2", zs[1]).arg("z3", zs[2]).meta("trunc_K", k).with_residual(r))
        }
        Task::FaceYbe(u, v) => one(face_ybe_sweep(&a, cu(u), cu(v), spec, params)?),
        Task::Unitarity(u) => one(unitarity_sweep(&a, cu(u), spec, params)?),
        Task::Inversion(u) => one(second_inversion_sweep(&a, cu(u), spec, params, &kappa()?)?),
        Task::Crossing(u) => one(crossing_sweep(&a, cu(u), spec, params, &kappa()?)?),
        Task::Gauge => gauge_reports(&cfg.u, w, spec, params),
        Task::Part2(u, v, m) => one(part2_report(&a, u, v, m, spec, params)?),
        Task::Kappa => one(kappa_report(spec, params)?),
        Task::Conn => {
            let zs: Vec<C64> = (0..20).map(|k| C64::from_polar(2.4, 0.2 + 0.31 * k as f64)).collect();
            let abc = [Complex::new(0.3, 0.0), Complex::new(0.7, 0.0), Complex::new(1.4, 0.0)];
            one(conn_formula_report(abc, &zs, spec, params)?)
        }
    }
}

fn row_of(identity: &str, index: usize, rep: &ResidualReport) -> VerifyRow {
    VerifyRow {
        identity: identity.to_string(),
        index,
        status: if rep.pass { "pass" } else { "fail" }.to_string(),
        residual: rep.residual.is_finite().then_some(rep.residual),
        tol: rep.tol,
        pass: rep.pass,
        point: rep.point.clone(),
        args: rep.args.iter().map(|(n, v)| Arg { name: n.clone(), value: *v }).collect(),
        meta: rep.meta.iter().cloned().collect(),
        error: None,
    }
}

fn error_row(cfg: &RunConfig, identity: &str, index: usize, e: &Error) -> VerifyRow {
    let skipped = matches!(e, Error::Unsupported(_));
    VerifyRow {
        identity: identity.to_string(),
        index,
        status: if skipped { "skipped" } else { "error" }.to_string(),
        residual: None,
        tol: cfg.tol,
        pass: skipped,
        point: cfg.s.clone(),
        args: Vec::new(),
        meta: BTreeMap::new(),
        error: Some(e.to_string()),
    }
}

/// Runs the suites; returns the document and whether every point passed.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    let jobs: Vec<(String, usize, Task)> = cfg
        .suite
        .iter()
        .flat_map(|s| tasks(cfg, s).into_iter().enumerate().map(move |(i, t)| (s.clone(), i, t)))
        .collect();
    let results: Vec<Vec<VerifyRow>> = jobs
        .par_iter()
        .map(|(s, i, t)| match run_task(cfg, *t) {
            Ok(reps) => reps.iter().map(|r| row_of(s, *i, r)).collect(),
            Err(e) => vec![error_row(cfg, s, *i, &e)],
        })
        .collect();
    let rows: Vec<VerifyRow> = results.into_iter().flatten().collect();
    let mut summary = serde_json::Map::new();
    for s in &cfg.suite {
        let mine: Vec<&VerifyRow> = rows.iter().filter(|r| &r.identity == s).collect();
        let max = mine.iter().filter_map(|r| r.residual).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        let count = |st: &str| mine.iter().filter(|r| r.status == st).count();
        summary.insert(
            s.clone(),
            json!({
                "max_residual": max,
                "rows": mine.len(),
                "failures": count("fail"),
                "errors": count("error"),
                "skipped": count("skipped"),
                "pass": mine.iter().all(|r| r.pass),
            }),
        );
    }
    let ok = rows.iter().all(|r| r.pass);
    let csv: Vec<VerifyCsv> = rows
        .iter()
        .map(|r| VerifyCsv {
            identity: r.identity.clone(),
            index: r.index,
            status: r.status.clone(),
            residual: r.residual,
            tol: r.tol,
            pass: r.pass,
            args: r.args.iter().map(|a| format!("{}={}{:+}i", a.name, a.value[0], a.value[1])).collect::<Vec<_>>().join(";"),
            meta: r.meta.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
            error: r.error.clone().unwrap_or_default(),
        })
        .collect();
    let meta = provenance(cfg, "verify", json!({ "summary": summary, "pass": ok }));
    Ok((render(cfg, meta, &rows, &csv)?, ok))
}
