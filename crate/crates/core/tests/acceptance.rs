//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p heisenberg-cmc --test acceptance`.

use heisenberg_cmc::calibration::{CylinderSpec, Side};
use heisenberg_cmc::curvature::{operator_k, second_fundamental_form, sphere_frame};
use heisenberg_cmc::foliation::{
    integrate_meridian, meridian_residual, meridian_start, pansu_geodesic_residual, POLE_RADIUS,
};
use heisenberg_cmc::geometry::{connection, riemann, to_coordinates};
use heisenberg_cmc::isoperimetry::{
    deficit_check, deficit_exponent, jacobi_residual, make_competitor, RightInvariant,
};
use heisenberg_cmc::sphere::{euclidean_profile, foliation_normal, pansu_profile};
use heisenberg_cmc::verification::{bound_violations, riemann_symmetry_defect};
use heisenberg_cmc::{ModelParams, Point, SphereSpec, TangentVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::process::ExitCode;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn grid() -> Vec<SphereSpec> {
    let mut v = Vec::new();
    for e in [0.5, 1.0, 2.0] {
        for s in [0.5, 1.0, 2.0] {
            for r in [0.5, 1.0, 2.0] {
                v.push(SphereSpec::new(ModelParams::new(e, s).unwrap(), r).unwrap());
            }
        }
    }
    v
}

fn random_point(sp: &SphereSpec, rng: &mut ChaCha8Rng) -> Point {
    let phi = 0.02 + (PI - 0.04) * uniform(rng);
    sp.point_polar(phi, 2.0 * PI * uniform(rng))
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

/// Five-point derivative.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Mean curvature of the upper graph, `−(1/2εr)(rF)'` with
/// `F = f_r/√(ε⁶ + f_r² + σ²r²)`, all derivatives numerical.
fn mean_curvature_oracle(sp: &SphereSpec, r: f64) -> f64 {
    let m = sp.params();
    let (e, s) = (m.epsilon(), m.sigma());
    // The nested stencil reaches `r − 4h`; near the equator `f` has a
    // square-root singularity, so the step also shrinks with `R − r`.
    let h = (0.05 * r).min(2e-3 * (sp.radius() - r));
    let flux = |x: f64| {
        let fr = d1(|y| sp.profile_f(y).unwrap(), x, h);
        x * fr / (e.powi(6) + fr * fr + s * s * x * x).sqrt()
    };
    -d1(flux, r, h) / (2.0 * e * r)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for sp in grid() {
        let h = 1.0 / (sp.params().epsilon() * sp.radius());
        for _ in 0..100 {
            let r = sp.radius() * (0.005 + 0.985 * uniform(&mut rng));
            worst = worst.max((mean_curvature_oracle(&sp, r) - h).abs() / h);
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max rel error {worst:.3e} <= 1e-6 over 27 specs x 100 radii"),
    )
}

/// `∇_v 𝒩` from a difference quotient of the foliation normal plus the
/// connection term.
fn shape_oracle(m: &ModelParams, p: &Point, v: TangentVector) -> TangentVector {
    let w = to_coordinates(m, p, v);
    let h = 1e-5 * p.r().clamp(1e-2, 1.0);
    let n = |s: f64| foliation_normal(m, &p.shifted(w, s)).unwrap().to_array();
    let d: [f64; 3] = std::array::from_fn(|i| d1(|s| n(s)[i], 0.0, h));
    TangentVector::from_array(d) + connection(m, v, foliation_normal(m, p).unwrap())
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut dev, mut eig, mut trace): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for sp in grid() {
        let m = sp.params();
        let hm = sp.mean_curvature();
        for _ in 0..10 {
            let p = random_point(&sp, &mut rng);
            let f = sphere_frame(&sp, &p).unwrap();
            let d = second_fundamental_form(&sp, &p).unwrap();
            let scale = d.h11.abs().max(d.h22.abs());
            let h1 = shape_oracle(m, &p, f.x1);
            let h2 = shape_oracle(m, &p, f.x2);
            for (a, b) in [
                (h1.dot(f.x1), d.h11),
                (h1.dot(f.x2), d.h12),
                (h2.dot(f.x2), d.h22),
            ] {
                dev = dev.max((a - b).abs() / scale);
            }
            for (k, kappa) in [(d.k1, d.kappa1), (d.k2, d.kappa2)] {
                eig = eig.max((shape_oracle(m, &p, k) - kappa * k).norm());
            }
            trace = trace.max((d.h11 + d.h22 - 2.0 * hm).abs() / hm);
        }
    }
    outcome(
        dev <= 1e-5 && eig <= 1e-6 && trace <= 1e-12,
        format!("entry dev {dev:.3e} <= 1e-5, eigen residual {eig:.3e} <= 1e-6, trace {trace:.3e} <= 1e-12"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for sp in grid() {
        for _ in 0..200 {
            let p = random_point(&sp, &mut rng);
            worst = worst.max(operator_k(&sp, &p).unwrap().k0_norm);
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |k0| {worst:.3e} <= 1e-10 over 27 specs x 200 points"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lemma: f64 = 0.0;
    let mut sym: f64 = 0.0;
    let mut sect: f64 = 0.0;
    let (x, y, t) = (TangentVector::X, TangentVector::Y, TangentVector::T);
    for sp in grid() {
        let m = sp.params();
        let tau = m.tau();
        for _ in 0..4 {
            let p = random_point(&sp, &mut rng);
            let f = sphere_frame(&sp, &p).unwrap();
            let n = sp.outer_normal(&p).unwrap();
            let energy = 0.1 + 5.0 * uniform(&mut rng);
            let a = 2.0 * PI * uniform(&mut rng);
            let s = energy.sqrt();
            let v1 = s * (a.cos() * f.x1 + a.sin() * f.x2);
            let v2 = s * (-a.sin() * f.x1 + a.cos() * f.x2);
            let lhs = riemann(m, v2, v1, n).dot(v2);
            let rhs = 4.0 * tau * tau * energy * v1.at * n.at;
            lemma = lemma.max((lhs - rhs).abs() / (tau * tau * energy));
        }
        let t2 = tau * tau;
        sym = sym.max(riemann_symmetry_defect(m) / t2.max(1.0));
        sect = sect
            .max((riemann(m, x, y, y).dot(x) + 3.0 * t2).abs() / t2)
            .max((riemann(m, x, t, t).dot(x) - t2).abs() / t2);
    }
    outcome(
        lemma <= 1e-10 && sym <= 1e-12 && sect <= 1e-12,
        format!("identity {lemma:.3e} <= 1e-10 (108 samples), symmetries {sym:.3e} <= 1e-12, sectional {sect:.3e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut drift: f64 = 0.0;
    let mut resid: f64 = 0.0;
    let mut poles = true;
    let mut figure_one = false;
    for (e, s, rr) in [(0.5, 0.5, 2.0), (1.0, 1.0, 1.0), (2.0, 1.0, 0.5)] {
        let sp = SphereSpec::new(ModelParams::new(e, s).unwrap(), rr).unwrap();
        let start = meridian_start(&sp, 0.01 * rr, 0.3).unwrap();
        let curve = match integrate_meridian(&sp, &start, rr / 2000.0, 100.0 * rr) {
            Ok(c) => c,
            Err(f) => return outcome(false, format!("integration failed: {:?}", f.error)),
        };
        let n = curve.samples.len();
        let ok = curve.reached_south_pole
            && curve.samples[n - 2].point.r() <= POLE_RADIUS * rr
            && curve.samples[n - 2].point.t < 0.0;
        poles &= ok;
        if (e, s, rr) == (0.5, 0.5, 2.0) {
            figure_one = ok;
        }
        drift = drift.max(curve.max_leaf_drift(sp.params()));
        for smp in curve.samples.iter().step_by(41) {
            if smp.point.r() > 1e-2 * rr {
                resid = resid.max(meridian_residual(sp.params(), &smp.point).unwrap());
            }
        }
    }
    outcome(
        drift <= 1e-8 && resid <= 1e-6 && poles && figure_one,
        format!("leaf drift {drift:.3e} <= 1e-8, geodesic residual {resid:.3e} <= 1e-6, pole to pole: {poles}"),
    )
}

fn sup_distance(sp: &SphereSpec, target: impl Fn(f64) -> f64) -> f64 {
    (0..=2000)
        .map(|i| {
            let r = sp.radius() * i as f64 / 2000.0;
            (sp.profile_f(r).unwrap() - target(r)).abs()
        })
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let eu: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&tau| {
            let sp = SphereSpec::new(ModelParams::from_tau(1.0, tau).unwrap(), 1.0).unwrap();
            sup_distance(&sp, |r| euclidean_profile(1.0, r).unwrap())
        })
        .collect();
    let pa: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&e| {
            let sp = SphereSpec::new(ModelParams::new(e, 1.0).unwrap(), 1.0).unwrap();
            sup_distance(&sp, |r| pansu_profile(1.0, 1.0, r).unwrap())
        })
        .collect();
    let mut geo: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for sigma in [0.5, 1.0, 2.0] {
        for _ in 0..50 {
            let r = 0.1 + 1.9 * uniform(&mut rng);
            let th = 2.0 * PI * uniform(&mut rng);
            let t = 4.0 * (uniform(&mut rng) - 0.5);
            let p = Point::new(r * th.cos(), r * th.sin(), t);
            geo = geo.max(pansu_geodesic_residual(sigma, &p).unwrap());
        }
    }
    let mono = eu.windows(2).all(|w| w[1] < w[0]) && pa.windows(2).all(|w| w[1] < w[0]);
    outcome(
        eu[2] <= 1e-2 && mono && geo <= 1e-8,
        format!(
            "euclidean sup {:.3e} <= 1e-2 (sweep {}), pansu sweep {}, monotone: {mono}, pansu geodesic {geo:.3e} <= 1e-8",
            eu[2],
            list(&eu),
            list(&pa)
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut round: f64 = 0.0;
    let mut normal: f64 = 0.0;
    let mut div: f64 = 0.0;
    let mut exceeds = false;
    let mut violations = 0;
    for (e, s, rr) in [(1.0, 1.0, 1.0), (0.5, 0.5, 1.0), (1.0, 2.0, 2.0)] {
        let sp = SphereSpec::new(ModelParams::new(e, s).unwrap(), rr).unwrap();
        let cap = 1.0 / (e * rr);
        for d in [0.0, 0.3] {
            let cyl = CylinderSpec::new(sp, d * rr).unwrap();
            for lam in [1.001, 1.1, 1.5, 3.0, 10.0] {
                for a in [0.0, 0.25, 0.5, 0.9] {
                    let p = cyl.leaf_point(a * cyl.r_cut(), lam * rr).unwrap();
                    if cyl.contains(&p) {
                        let u = cyl.u(&p).unwrap();
                        round = round.max((u.label.lambda - lam * rr).abs() / (lam * rr));
                        exceeds |= u.side != Side::Below;
                    }
                }
            }
            for a in [0.0, 0.2, 0.5, 0.8, 0.99] {
                let r = a * cyl.r_cut();
                let p = Point::new(r, 0.0, sp.profile_f(r).unwrap());
                let v = cyl.calibration_field(&p).unwrap().v;
                normal = normal.max((v - sp.outer_normal(&p).unwrap()).norm());
            }
            for a in [0.1, 0.45, 0.8] {
                let r = a * cyl.r_cut();
                let top = sp.profile_f(r).unwrap();
                for b in [0.1, 0.5, 0.9, 1.1] {
                    let t = if b < 1.0 {
                        cyl.t_cut() + b * (top - cyl.t_cut())
                    } else {
                        top + 0.1 * rr
                    };
                    let (dv, hl) = cyl.divergence_check(&Point::new(r, 0.0, t)).unwrap();
                    div = div.max((0.5 * dv - hl).abs() / hl);
                    exceeds |= 0.5 * dv > cap * (1.0 + 1e-5);
                }
            }
            violations += bound_violations(&cyl, 100, 100).unwrap();
        }
    }
    outcome(
        round <= 1e-10 && normal <= 1e-8 && div <= 1e-5 && !exceeds && violations == 0,
        format!(
            "roundtrip {round:.3e} <= 1e-10, V vs normal {normal:.3e} <= 1e-8, half div V vs H {div:.3e} <= 1e-5, cap exceeded: {exceeds}, bound violations {violations} on 100x100 grids"
        ),
    )
}

fn criterion_8() -> Outcome {
    let sp = SphereSpec::new(ModelParams::new(1.0, 1.0).unwrap(), 1.0).unwrap();
    let mut min_slack = [f64::INFINITY; 2];
    for (i, (delta, seed)) in [(0.3, 7u64), (0.0, 11)].into_iter().enumerate() {
        let cyl = CylinderSpec::new(sp, delta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let c = make_competitor(&cyl, &mut rng).unwrap();
            min_slack[i] = min_slack[i].min(deficit_check(&c).unwrap().slack);
        }
    }
    let cyl = CylinderSpec::new(sp, 0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = make_competitor(&cyl, &mut rng).unwrap();
    let amps: Vec<f64> = (0..6)
        .map(|i| sp.pole_height() * 1e-3 * 2f64.powi(i))
        .collect();
    let k = deficit_exponent(&base, &amps).unwrap();
    outcome(
        min_slack[0] >= 0.0 && min_slack[1] >= 0.0 && (k - 2.0).abs() <= 0.1,
        format!(
            "min slack quadratic {:.3e} >= 0, cubic {:.3e} >= 0 (20 competitors each), exponent {k:.4} = 2 +- 0.1",
            min_slack[0], min_slack[1]
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for (e, s, rr) in [
        (1.0, 1.0, 1.0),
        (0.5, 0.5, 1.0),
        (1.0, 2.0, 2.0),
        (2.0, 1.0, 0.5),
    ] {
        let sp = SphereSpec::new(ModelParams::new(e, s).unwrap(), rr).unwrap();
        for w in RightInvariant::ALL {
            worst = worst.max(jacobi_residual(&sp, w, rr / 400.0).unwrap());
            let coarse = jacobi_residual(&sp, w, rr / 100.0).unwrap();
            let fine = jacobi_residual(&sp, w, rr / 200.0).unwrap();
            worst_ratio = worst_ratio.max(fine / coarse);
        }
    }
    outcome(
        worst <= 1e-3 && worst_ratio <= 0.5,
        format!("max residual at R/400 {worst:.3e} <= 1e-3, worst refinement ratio R/100 -> R/200 {worst_ratio:.3e} <= 0.5"),
    )
}

fn criterion_10() -> Outcome {
    let (s, rr) = (1.0, 1.0);
    let limit = PI * PI * s * rr * rr * rr / 2.0;
    let vals: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&e| {
            e * SphereSpec::new(ModelParams::new(e, s).unwrap(), rr)
                .unwrap()
                .hemisphere_area()
                .unwrap()
        })
        .collect();
    let gaps: Vec<f64> = vals.iter().map(|v| (v - limit).abs()).collect();
    let d1 = (vals[1] - vals[0]).abs();
    let d2 = (vals[2] - vals[1]).abs();
    outcome(
        gaps[0] > gaps[1] && gaps[1] > gaps[2] && 2.0 * d2 <= d1,
        format!(
            "distances to pi^2 sigma R^3/2: {}, successive differences {d1:.3e} -> {d2:.3e}",
            list(&gaps)
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("mean curvature is constant", criterion_1),
        ("shape operator oracle", criterion_2),
        ("trace-free k vanishes", criterion_3),
        ("curvature identity and symmetries", criterion_4),
        ("meridian geodesics", criterion_5),
        ("euclidean and pansu limits", criterion_6),
        ("calibration foliation", criterion_7),
        ("quantitative isoperimetric deficit", criterion_8),
        ("jacobi fields", criterion_9),
        ("sub-riemannian area limit", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!(
            "{} criterion {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
