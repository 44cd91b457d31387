//! One function per subcommand.

use std::f64::consts::PI;
use std::io::Write;

use heisenberg_cmc::calibration::{CylinderSpec, Side};
use heisenberg_cmc::curvature::{k_eigenvalue, operator_k, second_fundamental_form};
use heisenberg_cmc::foliation::{
    field_m_bar, field_sample, integrate_meridian, meridian_residual, meridian_start, MeridianCurve,
};
use heisenberg_cmc::isoperimetry::{deficit_check, deficit_exponent, make_competitor};
use heisenberg_cmc::sphere::{euclidean_profile, pansu_profile, radius_function};
use heisenberg_cmc::verification::{run_suite, SuiteConfig};
use heisenberg_cmc::{Error, ModelParams, SphereSpec};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{resolve, ConfigFile};
use crate::output::{num, open, write_columns, write_csv, write_json, write_obj};
use crate::{CliError, Command, Geometry, GridPreset, PolylineFormat};

pub fn dispatch(cmd: Command, file: &ConfigFile) -> Result<(), CliError> {
    match cmd {
        Command::Sphere {
            geometry,
            out,
            limits,
            samples,
        } => sphere(&geometry, file, out, limits, samples),
        Command::Curvature {
            geometry,
            samples,
            theta,
            out,
        } => curvature(&geometry, file, samples, theta, &out),
        Command::Meridian {
            geometry,
            figure1,
            step,
            r0,
            theta0,
            out,
            format,
        } => meridian(&geometry, file, figure1, step, r0, theta0, out, format),
        Command::Calibration {
            geometry,
            delta,
            grid,
            out,
        } => calibration(&geometry, file, delta, grid, &out),
        Command::Foliation {
            geometry,
            extent,
            grid,
            out,
        } => foliation(&geometry, file, extent, grid, &out),
        Command::Isoperim {
            geometry,
            delta,
            n,
            seed,
            json,
            csv,
        } => isoperim(&geometry, file, delta, n, seed, &json, csv),
        Command::Verify {
            geometry,
            grid,
            samples,
            perturb_h,
            seed,
            json,
        } => verify(&geometry, file, grid, samples, perturb_h, seed, json),
    }
}

/// Resolved `(ε, σ, R)`; `None` defaults make the value required.
fn geometry(
    g: &Geometry,
    file: &ConfigFile,
    preset: Option<(f64, f64, f64)>,
    defaults: (Option<f64>, Option<f64>, Option<f64>),
) -> Result<(f64, f64, f64), CliError> {
    let e = resolve(
        g.epsilon.or(preset.map(|p| p.0)),
        file,
        "epsilon",
        defaults.0,
    )?;
    let s = resolve(g.sigma.or(preset.map(|p| p.1)), file, "sigma", defaults.1)?;
    let r = resolve(g.radius.or(preset.map(|p| p.2)), file, "R", defaults.2)?;
    Ok((e, s, r))
}

fn sphere_spec(e: f64, s: f64, r: f64) -> Result<SphereSpec, CliError> {
    Ok(SphereSpec::new(ModelParams::new(e, s)?, r)?)
}

/// Domain errors become a blank cell; anything else aborts.
fn cell(v: heisenberg_cmc::Result<f64>) -> Result<f64, CliError> {
    match v {
        Ok(x) => Ok(x),
        Err(Error::Domain(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v < min {
        return Err(CliError::input(format!("--{name} must be at least {min}")));
    }
    Ok(v)
}

fn print_summary(pairs: &[(&str, String)]) -> Result<(), CliError> {
    let mut w = std::io::stdout().lock();
    for (k, v) in pairs {
        writeln!(w, "{k}={v}").map_err(CliError::io)?;
    }
    Ok(())
}

fn sphere(
    g: &Geometry,
    file: &ConfigFile,
    out: Option<String>,
    limits: Option<String>,
    samples: Option<usize>,
) -> Result<(), CliError> {
    let (e, s, r) = geometry(g, file, None, (Some(1.0), Some(1.0), None))?;
    let spec = sphere_spec(e, s, r)?;
    let n = at_least("samples", resolve(samples, file, "samples", Some(201))?, 2)?;
    let radii: Vec<f64> = (0..n).map(|i| r * i as f64 / (n - 1) as f64).collect();
    if let Some(path) = out {
        let mut rows = Vec::with_capacity(n);
        for &x in &radii {
            rows.push(vec![
                x,
                spec.profile_f(x)?,
                cell(spec.profile_f_r(x))?,
                cell(spec.profile_f_big_r(x))?,
            ]);
        }
        write_csv(&path, &["r", "f", "f_r", "f_R"], &rows)?;
    }
    if let Some(path) = limits {
        let mut rows = Vec::with_capacity(n);
        for &x in &radii {
            rows.push(vec![
                x,
                spec.profile_f(x)?,
                euclidean_profile(r, x)?,
                cell(pansu_profile(s, r, x))?,
            ]);
        }
        write_csv(&path, &["r", "f", "round", "pansu"], &rows)?;
    }
    print_summary(&[
        ("mean_curvature", num(spec.mean_curvature())),
        ("pole_height", num(spec.pole_height())),
        ("area", num(spec.area()?)),
        ("volume", num(spec.volume()?)),
        ("hemisphere_area", num(spec.hemisphere_area()?)),
    ])
}

fn curvature(
    g: &Geometry,
    file: &ConfigFile,
    samples: Option<usize>,
    theta: Option<f64>,
    out: &str,
) -> Result<(), CliError> {
    let (e, s, r) = geometry(g, file, None, (Some(1.0), Some(1.0), Some(1.0)))?;
    let spec = sphere_spec(e, s, r)?;
    let n = at_least("samples", resolve(samples, file, "samples", Some(64))?, 1)?;
    let theta = resolve(theta, file, "theta", Some(0.0))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let phi = PI * (i as f64 + 0.5) / n as f64;
        let p = spec.point_polar(phi, theta);
        let h = second_fundamental_form(&spec, &p)?;
        let k = operator_k(&spec, &p)?;
        rows.push(vec![
            phi,
            p.x,
            p.y,
            p.t,
            h.h11,
            h.h12,
            h.h22,
            h.kappa1,
            h.kappa2,
            h.beta,
            k_eigenvalue(&spec, p.r()),
            k.k0_norm,
        ]);
    }
    let header = [
        "phi", "x", "y", "t", "h11", "h12", "h22", "kappa1", "kappa2", "beta", "k_eigen", "k0_norm",
    ];
    write_csv(out, &header, &rows)
}

pub const MERIDIAN_PRESET: (f64, f64, f64) = (0.5, 0.5, 2.0);

fn infer_format(out: &str) -> PolylineFormat {
    let ext = std::path::Path::new(out)
        .extension()
        .and_then(|x| x.to_str())
        .unwrap_or("");
    match ext.to_ascii_lowercase().as_str() {
        "obj" => PolylineFormat::Obj,
        "dat" | "gp" | "gnuplot" => PolylineFormat::Gnuplot,
        _ => PolylineFormat::Csv,
    }
}

fn write_meridian(
    curve: &MeridianCurve,
    out: &str,
    format: PolylineFormat,
) -> Result<(), CliError> {
    match format {
        PolylineFormat::Obj => {
            let pts: Vec<_> = curve.samples.iter().map(|s| s.point).collect();
            write_obj(out, &pts)
        }
        PolylineFormat::Csv | PolylineFormat::Gnuplot => {
            let header = ["s", "x", "y", "t", "m_x", "m_y", "m_t"];
            let rows: Vec<Vec<f64>> = curve
                .samples
                .iter()
                .map(|m| {
                    vec![
                        m.s,
                        m.point.x,
                        m.point.y,
                        m.point.t,
                        m.velocity.ax,
                        m.velocity.ay,
                        m.velocity.at,
                    ]
                })
                .collect();
            if format == PolylineFormat::Csv {
                write_csv(out, &header, &rows)
            } else {
                write_columns(out, &header, &rows)
            }
        }
    }
}

/// `max |ε𝓜 − 𝓜̄|` in the barred frame and the max geodesic residual, over
/// samples off the axis.
fn meridian_diagnostics(spec: &SphereSpec, curve: &MeridianCurve) -> Result<(f64, f64), CliError> {
    let params = spec.params();
    let e = params.epsilon();
    let mut pansu: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for m in &curve.samples {
        if m.point.r() == 0.0 {
            continue;
        }
        residual = residual.max(meridian_residual(params, &m.point)?);
        if params.sigma() > 0.0 {
            let bar = field_m_bar(params.sigma(), &m.point)?;
            let scaled = heisenberg_cmc::TangentVector::new(
                m.velocity.ax,
                m.velocity.ay,
                e * e * e * m.velocity.at,
            );
            pansu = pansu.max((scaled - bar).norm());
        }
    }
    let pansu = if params.sigma() > 0.0 {
        pansu
    } else {
        f64::NAN
    };
    Ok((residual, pansu))
}

#[allow(clippy::too_many_arguments)]
fn meridian(
    g: &Geometry,
    file: &ConfigFile,
    figure1: bool,
    step: Option<f64>,
    r0: Option<f64>,
    theta0: Option<f64>,
    out: Option<String>,
    format: Option<PolylineFormat>,
) -> Result<(), CliError> {
    let d = MERIDIAN_PRESET;
    let (e, s, r) = geometry(
        g,
        file,
        figure1.then_some(d),
        (Some(d.0), Some(d.1), Some(d.2)),
    )?;
    let spec = sphere_spec(e, s, r)?;
    let step = resolve(step, file, "step", Some(r / 2000.0))?;
    let r0 = resolve(r0, file, "r0", Some(0.01 * r))?;
    let theta0 = resolve(theta0, file, "theta0", Some(0.0))?;
    if !(r0 > 0.0 && r0 < r) {
        return Err(CliError::input("--r0 must lie in (0, R)"));
    }
    let start = meridian_start(&spec, r0, theta0)?;
    // Horizontal length is about πRε, vertical at most 2f(0)/ε².
    let max_len = 10.0 * (PI * r * e + 2.0 * spec.pole_height() / (e * e)) + r;
    let (curve, failure) = match integrate_meridian(&spec, &start, step, max_len) {
        Ok(c) => (c, None),
        Err(f) => match f.error {
            Error::Domain(m) => return Err(CliError::input(m)),
            e => (f.partial, Some(e)),
        },
    };
    if let Some(path) = &out {
        write_meridian(&curve, path, format.unwrap_or_else(|| infer_format(path)))?;
    }
    let (residual, pansu) = meridian_diagnostics(&spec, &curve)?;
    print_summary(&[
        ("samples", curve.samples.len().to_string()),
        ("length", num(curve.length())),
        ("reached_south_pole", curve.reached_south_pole.to_string()),
        ("max_leaf_drift", num(curve.max_leaf_drift(spec.params()))),
        ("max_geodesic_residual", num(residual)),
        ("pansu_deviation", num(pansu)),
    ])?;
    match failure {
        None => Ok(()),
        Some(e) => Err(CliError::numeric(format!(
            "meridian integration stopped: {e}"
        ))),
    }
}

fn calibration(
    g: &Geometry,
    file: &ConfigFile,
    delta: Option<f64>,
    grid: Option<usize>,
    out: &str,
) -> Result<(), CliError> {
    let (e, s, r) = geometry(g, file, None, (Some(1.0), Some(1.0), Some(1.0)))?;
    let spec = sphere_spec(e, s, r)?;
    let cyl = CylinderSpec::new(spec, resolve(delta, file, "delta", Some(0.3))?)?;
    let n = at_least("grid", resolve(grid, file, "grid", Some(40))?, 1)?;
    // Up to half a radius above the north pole.
    let t_top = spec.pole_height() + 0.5 * r;
    let mut rows = Vec::new();
    for i in 0..n {
        let x = cyl.r_cut() * i as f64 / n as f64;
        let top = spec.profile_f(x)?;
        for j in 1..=n {
            let t = cyl.t_cut() + (t_top - cyl.t_cut()) * j as f64 / n as f64;
            let p = heisenberg_cmc::Point::new(x, 0.0, t);
            let leaf = cyl.u(&p)?;
            let (div, h_lambda) = match cyl.divergence_check(&p) {
                Ok(v) => v,
                Err(Error::Domain(_)) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e.into()),
            };
            let h_lambda = if h_lambda.is_nan() {
                let l = leaf.label.lambda.max(r);
                1.0 / (e * l)
            } else {
                h_lambda
            };
            let slack = if t < top {
                cell(cyl.g_z_and_bounds(x, top - t).map(|b| b.lhs - b.bound))?
            } else {
                f64::NAN
            };
            let side = match leaf.side {
                Side::Above => 0.0,
                Side::Below => 1.0,
            };
            rows.push(vec![x, t, leaf.label.lambda, side, div, h_lambda, slack]);
        }
    }
    write_csv(
        out,
        &["r", "t", "u", "side", "div_v", "h_lambda", "bound_slack"],
        &rows,
    )
}

fn foliation(
    g: &Geometry,
    file: &ConfigFile,
    extent: Option<f64>,
    grid: Option<usize>,
    out: &str,
) -> Result<(), CliError> {
    let (e, s, _) = geometry(g, file, None, (Some(1.0), Some(1.0), Some(1.0)))?;
    let params = ModelParams::new(e, s)?;
    let a = resolve(extent, file, "extent", Some(2.0))?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(CliError::input("--extent must be positive"));
    }
    let n = at_least("grid", resolve(grid, file, "grid", Some(41))?, 2)?;
    let mut rows = Vec::new();
    for i in 1..=n {
        let x = a * i as f64 / n as f64;
        for j in 0..n {
            let t = -a + 2.0 * a * j as f64 / (n - 1) as f64;
            let p = heisenberg_cmc::Point::new(x, 0.0, t);
            let lambda = radius_function(&params, x, t)?.value;
            let mut row = vec![x, t, lambda];
            match field_sample(&params, &p) {
                Ok(f) => {
                    for v in [f.n, f.dnn, f.m] {
                        row.extend(v.to_array());
                    }
                }
                Err(Error::Domain(_)) => row.extend([f64::NAN; 9]),
                Err(e) => return Err(e.into()),
            }
            rows.push(row);
        }
    }
    let header = [
        "x",
        "t",
        "leaf_radius",
        "n_x",
        "n_y",
        "n_t",
        "dnn_x",
        "dnn_y",
        "dnn_t",
        "m_x",
        "m_y",
        "m_t",
    ];
    write_csv(out, &header, &rows)
}

#[derive(Debug, Serialize)]
struct Params {
    epsilon: f64,
    sigma: f64,
    #[serde(rename = "R")]
    radius: f64,
}

#[derive(Debug, Serialize)]
struct CompetitorRow {
    index: usize,
    symdiff: f64,
    deficit: f64,
    bound: f64,
    slack: f64,
}

#[derive(Debug, Serialize)]
struct IsoperimReport {
    params: Params,
    delta: f64,
    seed: u64,
    n_competitors: usize,
    min_slack: f64,
    exponent_fit: f64,
    bound: &'static str,
    competitors: Vec<CompetitorRow>,
}

fn isoperim(
    g: &Geometry,
    file: &ConfigFile,
    delta: Option<f64>,
    n: Option<usize>,
    seed: Option<u64>,
    json: &str,
    csv: Option<String>,
) -> Result<(), CliError> {
    let (e, s, r) = geometry(g, file, None, (Some(1.0), Some(1.0), Some(1.0)))?;
    let spec = sphere_spec(e, s, r)?;
    let delta = resolve(delta, file, "delta", Some(0.3))?;
    let cyl = CylinderSpec::new(spec, delta)?;
    let n = at_least("n", resolve(n, file, "n", Some(20))?, 1)?;
    let seed = resolve(seed, file, "seed", Some(7))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut first = None;
    for index in 0..n {
        let c = make_competitor(&cyl, &mut rng)?;
        let rep = deficit_check(&c)?;
        rows.push(CompetitorRow {
            index,
            symdiff: rep.symdiff,
            deficit: rep.deficit(),
            bound: rep.bound,
            slack: rep.slack,
        });
        first.get_or_insert(c);
    }
    let f0 = spec.pole_height();
    let amps: Vec<f64> = (0..6).map(|i| f0 * 1e-3 * 2f64.powi(i)).collect();
    let exponent_fit = deficit_exponent(first.as_ref().expect("n >= 1"), &amps)?;
    let min_slack = rows.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    if let Some(path) = csv {
        let table: Vec<Vec<f64>> = rows
            .iter()
            .map(|c| vec![c.index as f64, c.symdiff, c.deficit, c.bound, c.slack])
            .collect();
        write_csv(
            &path,
            &["index", "symdiff", "deficit", "bound", "slack"],
            &table,
        )?;
    }
    let report = IsoperimReport {
        params: Params {
            epsilon: e,
            sigma: s,
            radius: r,
        },
        delta,
        seed,
        n_competitors: n,
        min_slack,
        exponent_fit,
        bound: if delta > 0.0 { "quadratic" } else { "cubic" },
        competitors: rows,
    };
    write_json(json, &report)?;
    if min_slack < 0.0 {
        return Err(CliError::failed(format!(
            "isoperimetric bound violated: min_slack = {min_slack}"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CheckRow {
    name: &'static str,
    measured: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    pass: bool,
    specs: Vec<[f64; 3]>,
    samples: usize,
    perturb_h: f64,
    seed: u64,
    checks: Vec<CheckRow>,
}

fn verify(
    g: &Geometry,
    file: &ConfigFile,
    grid: Option<GridPreset>,
    samples: Option<usize>,
    perturb_h: Option<f64>,
    seed: Option<u64>,
    json: Option<String>,
) -> Result<(), CliError> {
    let single = g.epsilon.is_some()
        || g.sigma.is_some()
        || g.radius.is_some()
        || ["epsilon", "sigma", "R"].iter().any(|k| file.contains(k));
    let preset = match grid {
        Some(p) => p,
        None => match file.get::<String>("grid")?.as_deref() {
            None | Some("default") => GridPreset::Default,
            Some("full") => GridPreset::Full,
            Some(other) => {
                return Err(CliError::input(format!(
                    "config key `grid`: unknown preset `{other}`"
                )))
            }
        },
    };
    let mut cfg = SuiteConfig::default();
    if single && grid.is_none() {
        let (e, s, r) = geometry(g, file, None, (Some(1.0), Some(1.0), Some(1.0)))?;
        sphere_spec(e, s, r)?;
        cfg.specs = vec![(e, s, r)];
    } else if preset == GridPreset::Full {
        const V: [f64; 3] = [0.5, 1.0, 2.0];
        cfg.specs = V
            .iter()
            .flat_map(|&e| {
                V.iter()
                    .flat_map(move |&s| V.iter().map(move |&r| (e, s, r)))
            })
            .collect();
    }
    cfg.samples = at_least(
        "samples",
        resolve(samples, file, "samples", Some(cfg.samples))?,
        1,
    )?;
    cfg.perturb_h = resolve(perturb_h, file, "perturb_h", Some(0.0))?;
    if !cfg.perturb_h.is_finite() {
        return Err(CliError::input("--perturb-h must be finite"));
    }
    let seed = resolve(seed, file, "seed", Some(1))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = run_suite(&cfg, &mut rng)?;
    let pass = checks.iter().all(|c| c.pass);
    match json {
        Some(path) => {
            let report = VerifyReport {
                pass,
                specs: cfg.specs.iter().map(|&(e, s, r)| [e, s, r]).collect(),
                samples: cfg.samples,
                perturb_h: cfg.perturb_h,
                seed,
                checks: checks
                    .iter()
                    .map(|c| CheckRow {
                        name: c.name,
                        measured: c.measured,
                        tolerance: c.tolerance,
                        pass: c.pass,
                    })
                    .collect(),
            };
            write_json(&path, &report)?;
        }
        None => {
            let mut w = open("-")?;
            for c in &checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                writeln!(
                    w,
                    "{tag} {} measured={} tolerance={}",
                    c.name,
                    num(c.measured),
                    num(c.tolerance)
                )
                .map_err(CliError::io)?;
            }
            w.flush().map_err(CliError::io)?;
        }
    }
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::failed(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}
