//! Graph areas, volume-preserving competitors, the quantitative deficit,
//! and the Jacobi fields coming from right-invariant Killing fields.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::calibration::{constants, CylinderSpec};
use crate::curvature::shape_matrix;
use crate::error::{Error, Result};
use crate::geometry::{from_coordinates, ricci, ModelParams, Point, TangentVector};
use crate::math::{abs, asin_clamped, cos, exp, hypot, log, sin, sq, sqrt, PI};
use crate::quadrature::integrate;
use crate::sphere::{radius_function, SphereSpec};

/// `(1/ε)∫_{|z|<ρ} √(ε⁶ + |∇f|² + σ²|z|² + 2σ(x f_y − y f_x)) dz` for a graph
/// given by its gradient. The radial variable is `r = ρ sin φ`, so gradients
/// with a square-root blow-up at `|z| = ρ` are integrable.
pub fn graph_area<G>(params: &ModelParams, rho: f64, grad: G) -> Result<f64>
where
    G: Fn(f64, f64) -> [f64; 2],
{
    let e = params.epsilon();
    let e6 = sq(e * e * e);
    let s = params.sigma();
    let mut failure = None;
    let outer = integrate(
        |theta| {
            let (ct, st) = (cos(theta), sin(theta));
            let inner = integrate(
                |phi| {
                    let r = rho * sin(phi);
                    let jac = rho * cos(phi);
                    let (x, y) = (r * ct, r * st);
                    let [fx, fy] = grad(x, y);
                    let (gx, gy) = (fx * jac, fy * jac);
                    let rad = e6 * jac * jac
                        + gx * gx
                        + gy * gy
                        + jac * jac * s * s * r * r
                        + 2.0 * s * jac * (x * gy - y * gx);
                    r * sqrt(rad.max(0.0))
                },
                0.0,
                0.5 * PI,
                1e-11,
                0.0,
            );
            match inner {
                Ok(q) => q.value,
                Err(err) => {
                    failure = Some(err);
                    0.0
                }
            }
        },
        0.0,
        2.0 * PI,
        1e-10,
        0.0,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(outer?.value / e)
}

/// Area of a radial `t`-graph over `|z| < ρ` with radial slope `g_r`;
/// the same `r = ρ sin φ` substitution.
pub fn radial_graph_area<G>(params: &ModelParams, rho: f64, slope: G) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let e = params.epsilon();
    let e6 = sq(e * e * e);
    let s = params.sigma();
    let q = integrate(
        |phi| {
            let r = rho * sin(phi);
            let jac = rho * cos(phi);
            let g = slope(r) * jac;
            r * sqrt(jac * jac * (e6 + s * s * r * r) + g * g)
        },
        0.0,
        0.5 * PI,
        1e-13,
        0.0,
    )?;
    Ok(2.0 * PI * q.value / e)
}

/// `∫_{|z|<ρ} √(g_r² + σ²r²) dz`, the `ε → 0` limit of `ε·area`.
pub fn sub_riemannian_radial_area<G>(sigma: f64, rho: f64, slope: G) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let q = integrate(
        |phi| {
            let r = rho * sin(phi);
            let jac = rho * cos(phi);
            let g = slope(r) * jac;
            r * sqrt(sq(jac * sigma * r) + g * g)
        },
        0.0,
        0.5 * PI,
        1e-13,
        0.0,
    )?;
    Ok(2.0 * PI * q.value)
}

/// Slope of the Pansu profile, `−σr²/√(ρ²−r²)`.
pub fn pansu_slope(sigma: f64, rho: f64, r: f64) -> f64 {
    -sigma * r * r / sqrt(((rho - r) * (rho + r)).max(0.0))
}

/// Smooth bump `exp(1 − 1/(1−s²))`, `s = (r − center)/width`, peak 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn lo(&self) -> f64 {
        self.center - self.width
    }
    pub fn hi(&self) -> f64 {
        self.center + self.width
    }
    pub fn shape(&self, r: f64) -> f64 {
        let s = (r - self.center) / self.width;
        if abs(s) >= 1.0 {
            0.0
        } else {
            exp(1.0 - 1.0 / (1.0 - s * s))
        }
    }
    pub fn shape_r(&self, r: f64) -> f64 {
        let s = (r - self.center) / self.width;
        if abs(s) >= 1.0 {
            0.0
        } else {
            let d = 1.0 - s * s;
            self.shape(r) * (-2.0 * s / (d * d)) / self.width
        }
    }
    pub fn value(&self, r: f64) -> f64 {
        self.amplitude * self.shape(r)
    }
    pub fn slope(&self, r: f64) -> f64 {
        self.amplitude * self.shape_r(r)
    }
    /// `∫ shape(r) r dr` over the support.
    pub fn moment(&self) -> Result<f64> {
        Ok(integrate(|r| self.shape(r) * r, self.lo(), self.hi(), 1e-14, 0.0)?.value)
    }
}

/// A radial two-bump perturbation of the upper graph of `Σ_R` with equal
/// enclosed volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Competitor {
    pub spec: SphereSpec,
    pub cyl: CylinderSpec,
    pub bumps: [Bump; 2],
}

/// Space kept between bump supports and the walls of the cylinder, as
/// fractions of `R` (radially) and of `f(0;R)` (vertically).
const MARGIN: f64 = 0.05;

impl Competitor {
    /// Build from a leading bump and the shape of the second one. The second
    /// amplitude is fixed by the volume constraint, which for graph
    /// perturbations is linear: `a₂ = −a₁·∫φ₁r/∫φ₂r`.
    pub fn new(cyl: CylinderSpec, lead: Bump, center: f64, width: f64) -> Result<Self> {
        let spec = *cyl.sphere();
        let lag_shape = Bump {
            center,
            width,
            amplitude: 1.0,
        };
        let amplitude = -lead.amplitude * lead.moment()? / lag_shape.moment()?;
        let lag = Bump {
            amplitude,
            ..lag_shape
        };
        let c = Self {
            spec,
            cyl,
            bumps: [lead, lag],
        };
        c.validate()?;
        Ok(c)
    }

    /// The unperturbed ball as a degenerate competitor.
    pub fn trivial(cyl: CylinderSpec) -> Self {
        let r = cyl.r_cut();
        let b = Bump {
            center: 0.5 * r,
            width: 0.1 * r,
            amplitude: 0.0,
        };
        Self {
            spec: *cyl.sphere(),
            cyl,
            bumps: [b, b],
        }
    }

    fn validate(&self) -> Result<()> {
        let rr = self.spec.radius();
        let [a, b] = self.bumps;
        let (first, second) = if a.center < b.center { (a, b) } else { (b, a) };
        if first.lo() < MARGIN * rr || second.hi() > self.cyl.r_cut() - MARGIN * rr {
            return Err(Error::Domain(
                "bump support too close to the axis or the cylinder wall",
            ));
        }
        if first.hi() > second.lo() {
            return Err(Error::Domain("bump supports overlap"));
        }
        // The graph must stay above the floor of the cylinder.
        let floor = self.cyl.t_cut() + MARGIN * self.spec.pole_height();
        for bump in self.bumps {
            if bump.amplitude < 0.0 {
                let lowest = (0..=200)
                    .map(|i| {
                        let r = bump.lo() + (bump.hi() - bump.lo()) * i as f64 / 200.0;
                        self.spec.profile_f(r).unwrap_or(f64::NAN) + bump.value(r)
                    })
                    .fold(f64::INFINITY, f64::min);
                if !(lowest > floor) {
                    return Err(Error::Domain("perturbed graph leaves the cylinder"));
                }
            }
        }
        Ok(())
    }

    /// Height of the perturbed upper graph.
    pub fn height(&self, r: f64) -> Result<f64> {
        Ok(self.spec.profile_f(r)? + self.bumps.iter().map(|b| b.value(r)).sum::<f64>())
    }

    /// `(1/ε)·2π∫ [W(f+δ) − W(f)] r dr` over the supports, with
    /// `W(g) = √(ε⁶ + g_r² + σ²r²)`, written without cancellation.
    pub fn area_change(&self) -> Result<f64> {
        let params = self.spec.params();
        let e = params.epsilon();
        let e6 = sq(e * e * e);
        let s = params.sigma();
        let mut total = 0.0;
        for b in self.bumps {
            if b.amplitude == 0.0 {
                continue;
            }
            let q = integrate(
                |r| {
                    let fr = self.spec.profile_f_r(r).unwrap_or(f64::NAN);
                    let d = b.slope(r);
                    let a = e6 + s * s * r * r;
                    let w0 = sqrt(a + fr * fr);
                    let w1 = sqrt(a + sq(fr + d));
                    (2.0 * fr * d + d * d) / (w0 + w1) * r
                },
                b.lo(),
                b.hi(),
                1e-13,
                1e-300,
            )?;
            total += q.value;
        }
        Ok(2.0 * PI * total / e)
    }

    /// `ℒ³(E Δ E_R)`; the supports are disjoint so this is a sum of moments.
    pub fn symdiff(&self) -> Result<f64> {
        let mut v = 0.0;
        for b in self.bumps {
            v += abs(b.amplitude) * b.moment()?;
        }
        Ok(2.0 * PI * v)
    }

    /// Signed volume change; zero by construction.
    pub fn volume_change(&self) -> Result<f64> {
        let mut v = 0.0;
        for b in self.bumps {
            v += b.amplitude * b.moment()?;
        }
        Ok(2.0 * PI * v)
    }

    /// Monte Carlo estimate of `ℒ³(E Δ E_R)` with `n` samples.
    ///
    /// Points are drawn uniformly in boxes `[−ρ, ρ]² × [0, |a|]` in the
    /// sheared coordinates `(x, y, t − f(|z|))`, which preserve volume; a
    /// sample is a hit when it lies between the two graphs.
    pub fn symdiff_monte_carlo<Rng: RngCore>(&self, n: usize, rng: &mut Rng) -> f64 {
        let mut total = 0.0;
        let per = n / self.bumps.len();
        for b in self.bumps {
            if b.amplitude == 0.0 || per == 0 {
                continue;
            }
            let rho = b.hi();
            let height = abs(b.amplitude);
            let mut hits = 0usize;
            for _ in 0..per {
                let x = rho * (2.0 * uniform(rng) - 1.0);
                let y = rho * (2.0 * uniform(rng) - 1.0);
                let s = height * uniform(rng);
                let r = hypot(x, y);
                if s < abs(b.value(r)) {
                    hits += 1;
                }
            }
            total += 4.0 * rho * rho * height * hits as f64 / per as f64;
        }
        total
    }

    /// `𝒢(E_R∖E) = ∫_{E_R∖E} (1 − R/u)`, with `u` the foliation label.
    pub fn calibration_gap(&self) -> Result<f64> {
        let rr = self.spec.radius();
        let mut total = 0.0;
        let mut failure = None;
        for b in self.bumps {
            if !(b.amplitude < 0.0) {
                continue;
            }
            let q = integrate(
                |r| {
                    let top = match self.spec.profile_f(r) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            return 0.0;
                        }
                    };
                    let depth = -b.value(r);
                    if depth <= 0.0 {
                        return 0.0;
                    }
                    let inner = integrate(
                        |s| match self.cyl.u(&Point::new(r, 0.0, top - s)) {
                            Ok(l) => 1.0 - rr / l.label.lambda,
                            Err(_) => f64::NAN,
                        },
                        0.0,
                        depth,
                        1e-9,
                        // The root solve for u leaves ~1e−15 noise in 1 − R/u.
                        1e-13 * depth,
                    );
                    match inner {
                        Ok(v) => v.value * r,
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    }
                },
                b.lo(),
                b.hi(),
                1e-8,
                1e-13 * abs(b.amplitude) * b.width,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            total += q?.value;
        }
        Ok(2.0 * PI * total)
    }
}

fn uniform<Rng: RngCore>(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draw a random admissible competitor: two disjoint bumps in the two
/// halves of `[0.05R, r_cut − 0.05R]`, random order of the raised and the
/// lowered one, leading amplitude a few percent of `f(0;R)`.
pub fn make_competitor<Rng: RngCore>(cyl: &CylinderSpec, rng: &mut Rng) -> Result<Competitor> {
    let rr = cyl.sphere().radius();
    let lo = MARGIN * rr;
    let hi = cyl.r_cut() - MARGIN * rr;
    if !(hi > lo) {
        return Err(Error::Domain("cylinder too thin for competitors"));
    }
    let mid = 0.5 * (lo + hi);
    let f0 = cyl.sphere().pole_height();
    let mut last = Error::Domain("no admissible competitor drawn");
    for _ in 0..64 {
        let draw = |rng: &mut Rng, a: f64, b: f64| {
            let half = 0.5 * (b - a);
            let width = half * (0.4 + 0.55 * uniform(rng));
            let slack = half - width;
            let center = a + half + slack * (2.0 * uniform(rng) - 1.0);
            (center, width)
        };
        let (c1, w1) = draw(rng, lo, mid);
        let (c2, w2) = draw(rng, mid, hi);
        let amp = f0 * (0.01 + 0.04 * uniform(rng));
        let raised_inside = rng.next_u32() & 1 == 0;
        let (lead_c, lead_w, lag_c, lag_w) = if raised_inside {
            (c1, w1, c2, w2)
        } else {
            (c2, w2, c1, w1)
        };
        let lead = Bump {
            center: lead_c,
            width: lead_w,
            amplitude: amp,
        };
        match Competitor::new(*cyl, lead, lag_c, lag_w) {
            Ok(c) => return Ok(c),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Both sides of the quantitative isoperimetric inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeficitReport {
    pub area_e: f64,
    pub area_er: f64,
    pub symdiff: f64,
    pub bound: f64,
    pub slack: f64,
}

impl DeficitReport {
    pub fn deficit(&self) -> f64 {
        self.slack + self.bound
    }
}

/// Quadratic bound `√δ·C·|EΔE_R|²` for `δ > 0`, cubic `D·|EΔE_R|³` for
/// `δ = 0`.
pub fn deficit_check(c: &Competitor) -> Result<DeficitReport> {
    let area_er = c.spec.area()?;
    let deficit = c.area_change()?;
    let symdiff = c.symdiff()?;
    let k = constants(&c.spec);
    let delta = c.cyl.delta();
    let bound = if delta < 1e-14 {
        k.d * symdiff * symdiff * symdiff
    } else {
        sqrt(delta) * k.c * symdiff * symdiff
    };
    Ok(DeficitReport {
        area_e: area_er + deficit,
        area_er,
        symdiff,
        bound,
        slack: deficit - bound,
    })
}

/// Least-squares slope of `log deficit` against `log amplitude` for one
/// competitor shape rescaled to each amplitude.
pub fn deficit_exponent(base: &Competitor, amplitudes: &[f64]) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let [lead, lag] = base.bumps;
    for &a in amplitudes {
        let c = Competitor::new(
            base.cyl,
            Bump {
                amplitude: a,
                ..lead
            },
            lag.center,
            lag.width,
        )?;
        let d = c.area_change()?;
        if !(d > 0.0) {
            return Err(Error::Numeric {
                what: "non-positive deficit in exponent fit",
                estimate: d,
            });
        }
        xs.push(log(a));
        ys.push(log(d));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| sq(x - mx)).sum();
    Ok(sxy / sxx)
}

/// Right-invariant Killing fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightInvariant {
    X,
    Y,
    T,
}

impl RightInvariant {
    pub const ALL: [Self; 3] = [Self::X, Self::Y, Self::T];

    pub fn name(self) -> &'static str {
        match self {
            Self::X => "X_hat",
            Self::Y => "Y_hat",
            Self::T => "T_hat",
        }
    }

    /// Frame coefficients at `p`: `X̂ = X − 2τεy T`, `Ŷ = Y + 2τεx T`, `T̂ = T`.
    pub fn field(self, params: &ModelParams, p: &Point) -> TangentVector {
        let te = params.tau() * params.epsilon();
        match self {
            Self::X => TangentVector::new(1.0, 0.0, -2.0 * te * p.y),
            Self::Y => TangentVector::new(0.0, 1.0, 2.0 * te * p.x),
            Self::T => TangentVector::T,
        }
    }

    /// `⟨V̂, 𝒩⟩` on the leaf through `p`.
    pub fn normal_component(self, params: &ModelParams, p: &Point) -> Result<f64> {
        let rf = radius_function(params, p.r(), p.t)?;
        Ok(self.field(params, p).dot(rf.normal(p)))
    }
}

/// `g_V̂ > 0` regions of `Σ_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hemispheres {
    pub spec: SphereSpec,
}

pub fn hemispheres(spec: &SphereSpec) -> Hemispheres {
    Hemispheres { spec: *spec }
}

impl Hemispheres {
    pub fn g(&self, which: RightInvariant, p: &Point) -> Result<f64> {
        self.spec.outer_normal(p)?;
        which.normal_component(self.spec.params(), p)
    }
    pub fn contains(&self, which: RightInvariant, p: &Point) -> Result<bool> {
        Ok(self.g(which, p)? > 0.0)
    }
}

/// Derivative at 0 from values at `±h/2` and `±3h/2`, fourth order.
fn staggered<F: Fn(f64) -> Result<f64>>(f: F, h: f64) -> Result<f64> {
    let near = f(0.5 * h)? - f(-0.5 * h)?;
    let far = f(1.5 * h)? - f(-1.5 * h)?;
    Ok((27.0 * near - far) / (24.0 * h))
}

/// First fundamental form of the upper hemisphere in `(φ, θ)`, with
/// `r = R sin φ`.
fn metric_polar(spec: &SphereSpec, phi: f64, theta: f64) -> Result<[f64; 3]> {
    let params = spec.params();
    let rr = spec.radius();
    let p = spec.point_polar(phi, theta);
    let r = p.r();
    let e = params.epsilon();
    // f_r·R cos φ = −ε³ r ω(r), finite at the equator.
    let dt = -e * e * e * r * crate::sphere::omega(params, r);
    let d_phi = [rr * cos(phi) * cos(theta), rr * cos(phi) * sin(theta), dt];
    let d_theta = [-p.y, p.x, 0.0];
    let a = from_coordinates(params, &p, d_phi);
    let b = from_coordinates(params, &p, d_theta);
    Ok([a.dot(a), a.dot(b), b.dot(b)])
}

/// `max |Δg + (|h|² + Ric(𝒩))g|` over interior nodes of the upper
/// hemisphere for `g = ⟨V̂, 𝒩⟩`.
///
/// `Δ` is the Laplace–Beltrami operator in divergence form on the `(φ, θ)`
/// chart, discretised by nested fourth-order staggered differences of
/// angular step `mesh/R`. Nodes within `0.05R` of the pole axis and of the
/// equatorial circle (in `r`) are skipped.
pub fn jacobi_residual(spec: &SphereSpec, which: RightInvariant, mesh: f64) -> Result<f64> {
    let rr = spec.radius();
    let d = mesh / rr;
    let phi_lo = asin_clamped(0.05);
    let phi_hi = asin_clamped(0.95);
    if !(d > 0.0) || d > 0.1 * (phi_hi - phi_lo) {
        return Err(Error::Domain("mesh too coarse for the Jacobi stencil"));
    }
    let params = spec.params();
    let g = |phi: f64, theta: f64| -> Result<f64> {
        which.normal_component(params, &spec.point_polar(phi, theta))
    };
    // √det(G)·G⁻¹·∇g at a point.
    let flux = |phi: f64, theta: f64| -> Result<[f64; 2]> {
        let [g11, g12, g22] = metric_polar(spec, phi, theta)?;
        let det = g11 * g22 - g12 * g12;
        let s = sqrt(det);
        let gp = staggered(|a| g(phi + a, theta), d)?;
        let gt = staggered(|a| g(phi, theta + a), d)?;
        Ok([
            s * (g22 * gp - g12 * gt) / det,
            s * (-g12 * gp + g11 * gt) / det,
        ])
    };
    let mut worst: f64 = 0.0;
    const N_PHI: usize = 12;
    const N_THETA: usize = 5;
    for i in 0..N_PHI {
        let phi = phi_lo + (phi_hi - phi_lo) * (i as f64 + 0.5) / N_PHI as f64;
        for j in 0..N_THETA {
            let theta = 2.0 * PI * (j as f64 + 0.3) / N_THETA as f64;
            let [g11, g12, g22] = metric_polar(spec, phi, theta)?;
            let s = sqrt(g11 * g22 - g12 * g12);
            let div = (staggered(|a| Ok(flux(phi + a, theta)?[0]), d)?
                + staggered(|a| Ok(flux(phi, theta + a)?[1]), d)?)
                / s;
            let p = spec.point_polar(phi, theta);
            let n = spec.outer_normal(&p)?;
            let h = shape_matrix(spec, p.r());
            let h2 = sq(h[0]) + 2.0 * sq(h[1]) + sq(h[2]);
            let pot = h2 + ricci(params, n)?;
            worst = worst.max(abs(div + pot * g(phi, theta)?));
        }
    }
    Ok(worst)
}
