use anyhow::Result;
use num_complex::Complex64;
use serde_json::{json, Value};

use foldwave::export::{Cell, CsvTable};
use foldwave::kl::{airy_kl_data, kl_field, linear_layer_kl_closed};
use foldwave::rays::{
    find_caustic, integrate_hamiltonian, linear_layer_caustic_depth, linear_layer_caustic_time, linear_layer_jacobian,
    linear_layer_phase_along, linear_layer_ray, LinearLayerParams, RefractionProfile1D,
};
use foldwave::specfun::AccuracyPolicy;
use foldwave::surgery::{combined_wkb_wigner_extended, stationary_points, surgery_pieces, WignerBranchIntegral};
use foldwave::validation::{run_all, ValidationConfig};
use foldwave::wigner::{wigner_exact_airy, wigner_numeric, PhaseSpaceGrid, WaveFunctionSampler};
use foldwave::wkb::{airy_inner_approx, airy_wkb_field, linear_layer_amplitudes, linear_layer_phases};

use crate::config::RunConfig;
use crate::output::OutputDir;

/// What a command reports back to `main` besides the files it wrote.
pub enum Outcome {
    Done,
    ValidationFailed(usize),
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn json_array(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| json!(x)).collect())
}

pub fn rays(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    match cfg.layer {
        Some(p) => layer_rays(cfg, &p, out),
        None => airy_rays(cfg, out),
    }
}

/// Fan of caustic-bound rays launched from points in (0, x0], plus the ray
/// leaving x0 away from the caustic.
fn airy_rays(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let profile = RefractionProfile1D::airy();
    let policy = AccuracyPolicy::ray_tracing();
    let x0 = cfg.x0;
    let t_end = 4.0 * x0.sqrt();
    let mut launches: Vec<(f64, f64)> = foldwave::numerics::linspace(x0 / cfg.nrays as f64, x0, cfg.nrays - 1)
        .into_iter()
        .map(|x| (x, -x.sqrt()))
        .collect();
    launches.push((x0, x0.sqrt()));

    let mut path_csv = CsvTable::new(&["ray", "t", "x", "k", "J", "S"]);
    let mut caustic_csv = CsvTable::new(&["ray", "x_launch", "k_launch", "t_caustic", "x_caustic"]);
    let mut summary = Vec::new();
    for (id, &(xl, kl)) in launches.iter().enumerate() {
        let path = integrate_hamiltonian(&profile, xl, kl, t_end, &policy)?;
        for s in &path.samples {
            path_csv.push(vec![Cell::from(id), num(s.t), num(s.x), num(s.k), num(s.jacobian), num(s.phase)]);
        }
        let hits = find_caustic(&profile, xl, kl, t_end)?;
        for &(t, x) in &hits {
            caustic_csv.push(vec![Cell::from(id), num(xl), num(kl), num(t), num(x)]);
        }
        summary.push(json!({
            "ray": id, "x_launch": xl, "k_launch": kl,
            "energy_error": path.max_energy_error(&profile),
            "caustics": hits.iter().map(|&(t, x)| json!([t, x])).collect::<Vec<_>>(),
        }));
    }
    if cfg.csv {
        out.write("rays.csv", &path_csv.render())?;
        out.write("caustics.csv", &caustic_csv.render())?;
    }
    if cfg.json {
        out.write_json("rays.json", &json!({ "scenario": "airy", "x0": x0, "rays": summary }))?;
    }
    Ok(Outcome::Done)
}

fn layer_rays(cfg: &RunConfig, p: &LinearLayerParams, out: &mut OutputDir) -> Result<Outcome> {
    let tc = linear_layer_caustic_time(p);
    let ts = foldwave::numerics::linspace(0.0, 2.0 * tc, 201);
    let span = 2.0 * tc * p.eta0 * p.psi.sin();
    let launches = foldwave::numerics::linspace(-span, 0.0, cfg.nrays);
    let mut path_csv = CsvTable::new(&["ray", "t", "y", "z", "J", "S"]);
    for (id, &xi) in launches.iter().enumerate() {
        for &t in &ts {
            let (y, z) = linear_layer_ray(t, xi, p);
            path_csv.push(vec![
                Cell::from(id),
                num(t),
                num(y),
                num(z),
                num(linear_layer_jacobian(t, p)),
                num(linear_layer_phase_along(t, xi, p)),
            ]);
        }
    }
    let depth = linear_layer_caustic_depth(p);
    if cfg.csv {
        out.write("rays.csv", &path_csv.render())?;
        let mut c = CsvTable::new(&["t_caustic", "z_caustic"]);
        c.push(vec![num(tc), num(depth)]);
        out.write("caustics.csv", &c.render())?;
    }
    if cfg.json {
        out.write_json(
            "rays.json",
            &json!({ "scenario": "linear_layer", "t_caustic": tc, "z_caustic": depth, "rays": launches.len() }),
        )?;
    }
    Ok(Outcome::Done)
}

pub fn field(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    match cfg.layer {
        Some(p) => layer_field(cfg, &p, out),
        None => airy_field(cfg, out),
    }
}

/// WKB, KL and fundamental-solution fields on the x-grid. The WKB columns are
/// NaN outside (0, x0), where the two-phase field does not exist.
fn airy_field(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let (eps, x0) = (cfg.epsilon, cfg.x0);
    let (coords, amps) = airy_kl_data(x0)?;
    let xs = cfg.x.points();
    let mut t = CsvTable::new(&[
        "x",
        "re_wkb",
        "im_wkb",
        "abs2_wkb",
        "re_kl",
        "im_kl",
        "abs2_kl",
        "re_exact",
        "im_exact",
        "abs2_exact",
        "near_caustic",
    ]);
    let mut cols: [Vec<f64>; 3] = Default::default();
    for &x in &xs {
        let (wkb, flag) = match airy_wkb_field(x, eps, x0) {
            Ok(f) => (f.value, f.near_caustic),
            Err(_) => (Complex64::new(f64::NAN, f64::NAN), false),
        };
        let kl = kl_field(&coords, &amps, eps, x)?;
        let exact = airy_inner_approx(x, x0, eps);
        t.push(vec![
            num(x),
            num(wkb.re),
            num(wkb.im),
            num(wkb.norm_sqr()),
            num(kl.re),
            num(kl.im),
            num(kl.norm_sqr()),
            num(exact.re),
            num(exact.im),
            num(exact.norm_sqr()),
            Cell::from(usize::from(flag)),
        ]);
        cols[0].push(wkb.norm_sqr());
        cols[1].push(kl.norm_sqr());
        cols[2].push(exact.norm_sqr());
    }
    if cfg.csv {
        out.write("field.csv", &t.render())?;
    }
    if cfg.json {
        out.write_json(
            "field.json",
            &json!({
                "epsilon": eps, "x0": x0, "x": json_array(&xs),
                "abs2_wkb": json_array(&cols[0]), "abs2_kl": json_array(&cols[1]), "abs2_exact": json_array(&cols[2]),
            }),
        )?;
    }
    Ok(Outcome::Done)
}

/// Ray phases, amplitudes and KL coordinates down the depth axis at y = 0.
fn layer_field(cfg: &RunConfig, p: &LinearLayerParams, out: &mut OutputDir) -> Result<Outcome> {
    let coords = linear_layer_kl_closed(*p)?;
    let zs = cfg.x.points();
    let mut t = CsvTable::new(&["z", "s_plus", "s_minus", "abs_a_plus", "abs_a_minus", "phi", "rho"]);
    for &z in &zs {
        let row = (|| -> foldwave::Result<[f64; 6]> {
            let (sp, sm) = linear_layer_phases(0.0, z, p)?;
            let (ap, am) = linear_layer_amplitudes(z, p)?;
            Ok([sp, sm, ap.norm(), am.norm(), (coords.phi)(0.0, z)?, (coords.rho)(0.0, z)?])
        })()
        .unwrap_or([f64::NAN; 6]);
        let mut cells = vec![num(z)];
        cells.extend(row.iter().map(|&v| num(v)));
        t.push(cells);
    }
    if cfg.csv {
        out.write("field.csv", &t.render())?;
    }
    if cfg.json {
        out.write_json(
            "field.json",
            &json!({ "scenario": "linear_layer", "z": json_array(&zs), "caustic_depth": linear_layer_caustic_depth(p) }),
        )?;
    }
    Ok(Outcome::Done)
}

fn total_real_points(x: f64, k: f64, x0: f64) -> foldwave::Result<usize> {
    let mut n = 0;
    for index in 1..=4 {
        let w = WignerBranchIntegral::new(index, x0)?;
        n += stationary_points(&w, x, k)?.points.iter().filter(|p| p.is_real()).count();
    }
    Ok(n)
}

pub fn wigner(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let (eps, x0) = (cfg.epsilon, cfg.x0);
    let xs = cfg.x.points();
    let ks = cfg.k.points();
    let psi = WaveFunctionSampler::new(move |x| airy_inner_approx(x, x0, eps), (-2.0, 1e6), eps);
    let numeric = wigner_numeric(&psi, &xs, &ks, &cfg.quadrature)?;
    let exact = PhaseSpaceGrid::from_fn(&xs, &ks, eps, |x, k| wigner_exact_airy(x, k, eps, x0));

    let mut t = CsvTable::new(&[
        "x",
        "k",
        "region",
        "n_stationary",
        "W_exact",
        "W_numeric",
        "W_diagonal",
        "W_offdiagonal",
        "W_combined",
        "diff_combined",
        "diff_numeric",
    ]);
    let mut combined = Vec::with_capacity(xs.len() * ks.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &k) in ks.iter().enumerate() {
            let (region, n, diag, off, comb) = if x > 0.0 {
                let p = surgery_pieces(x, k, eps, x0)?;
                let diag = p.w1 + p.w2;
                (p.region.to_string(), total_real_points(x, k, x0)?, diag, p.combined - diag, p.combined)
            } else {
                ("shadow".to_string(), 0, f64::NAN, f64::NAN, combined_wkb_wigner_extended(x, k, eps, x0)?)
            };
            let e = exact.get(i, j);
            t.push(vec![
                num(x),
                num(k),
                Cell::from(region),
                Cell::from(n),
                num(e),
                num(numeric.get(i, j)),
                num(diag),
                num(off),
                num(comb),
                num(comb - e),
                num(numeric.get(i, j) - e),
            ]);
            combined.push(comb);
        }
    }
    if cfg.csv {
        out.write("wigner.csv", &t.render())?;
    }
    if cfg.json {
        let rows = |values: &[f64]| -> Value { Value::Array(values.chunks(ks.len()).map(json_array).collect()) };
        out.write_json(
            "wigner.json",
            &json!({
                "epsilon": eps, "x0": x0, "x": json_array(&xs), "k": json_array(&ks),
                "W_exact": rows(&exact.values), "W_numeric": rows(&numeric.values), "W_combined": rows(&combined),
            }),
        )?;
    }
    Ok(Outcome::Done)
}

pub fn validate(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let vc = ValidationConfig { epsilon: cfg.epsilon, x0: cfg.x0, seed: cfg.seed, random_points: cfg.random_points };
    let reports = run_all(&vc);
    let mut failed = 0;
    let mut entries = Vec::new();
    for r in &reports {
        println!("criterion {:>2} {:<28} {}  {}", r.id, r.title, if r.passed { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.passed);
        entries.push(json!({
            "id": r.id,
            "title": r.title,
            "passed": r.passed,
            "metric": r.metric,
            "threshold": r.threshold,
            "detail": r.detail,
            "seconds": r.seconds,
        }));
    }
    out.write_json(
        "report.json",
        &json!({
            "scenario": cfg.scenario.name(), "epsilon": cfg.epsilon, "x0": cfg.x0, "seed": cfg.seed,
            "passed": failed == 0, "criteria": entries,
        }),
    )?;
    Ok(if failed == 0 { Outcome::Done } else { Outcome::ValidationFailed(failed) })
}
