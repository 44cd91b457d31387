//! The normal field of the foliation `{Σ_R}`, its self-derivative, the
//! meridian field `𝓜` and its integral curves, and the Euclidean and Pansu
//! limit fields.

use alloc::vec::Vec;

use crate::diff::d1_vec;
use crate::error::{Error, Result};
use crate::geometry::{connection, to_coordinates, ModelParams, Point, TangentVector};
use crate::math::{abs, atan, cos, hypot, signum_pos, sin, sq, sqrt};
use crate::sphere::{pansu_radius, radius_function, RadiusField, SphereSpec};

/// Everything the foliation knows at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: Point,
    pub n: TangentVector,
    pub dnn: TangentVector,
    pub m: TangentVector,
}

fn off_axis(pt: &Point) -> Result<()> {
    if pt.r() == 0.0 {
        Err(Error::Domain("field undefined on the center axis"))
    } else {
        Ok(())
    }
}

/// `(𝒩R, 𝒩p)`: `𝒩R = ℓ(p)/ε` and
/// `𝒩p = [τ·sgn(t)·q − ετ²R²ℓ(p)·atan p]/(Rω(r)²)`.
pub fn normal_derivatives(params: &ModelParams, pt: &Point) -> Result<(f64, f64)> {
    let rf = radius_function(params, pt.r(), pt.t)?;
    let e = params.epsilon();
    let tau = params.tau();
    let nr = rf.ell / e;
    let np = (tau * rf.sign * rf.q - e * tau * tau * sq(rf.value) * rf.ell * atan(rf.p))
        / (rf.value * sq(rf.omega_r));
    Ok((nr, np))
}

/// `A = ω²ℓ(p)[p + (1+p²)atan p]`, the common factor of `∇_𝒩𝒩`.
fn dnn_factor(rf: &RadiusField) -> f64 {
    let p = rf.p;
    sq(rf.omega_r) * rf.ell * (p + (1.0 + p * p) * atan(p))
}

fn dnn_from(params: &ModelParams, pt: &Point, rf: &RadiusField) -> TangentVector {
    let e = params.epsilon();
    let tau = params.tau();
    let r2 = sq(pt.r());
    let a = dnn_factor(rf);
    let rr2 = sq(rf.value);
    let w2 = sq(rf.omega_r);
    let twist = e * tau * tau * r2 * a / (rr2 * w2 * w2);
    let radial = rf.p * a / (e * rr2 * w2);
    TangentVector::new(
        -twist * pt.y + radial * pt.x,
        twist * pt.x + radial * pt.y,
        -tau * r2 * a / (rr2 * w2 * w2),
    )
}

/// `∇_𝒩𝒩` in a form without removable singularities.
pub fn nabla_n_n(params: &ModelParams, pt: &Point) -> Result<TangentVector> {
    off_axis(pt)?;
    let rf = radius_function(params, pt.r(), pt.t)?;
    Ok(dnn_from(params, pt, &rf))
}

fn m_from(params: &ModelParams, pt: &Point, rf: &RadiusField) -> TangentVector {
    let r = pt.r();
    let rr = rf.value;
    let lambda = rf.sign * rf.omega_r * rf.q / (r * rr);
    let mu = params.tau() * params.epsilon() * r / (rr * rf.omega_r);
    TangentVector::new(
        pt.x * lambda - pt.y * mu,
        pt.y * lambda + pt.x * mu,
        -r / (rr * rf.omega_r),
    )
}

/// `𝓜 = (xλ−yμ)X + (yλ+xμ)Y − (r/(Rω))T` with `λ = sgn(t)√(R²−r²)/(rR)`
/// and `μ = τεr/(Rω(r))`.
pub fn field_m(params: &ModelParams, pt: &Point) -> Result<TangentVector> {
    off_axis(pt)?;
    let rf = radius_function(params, pt.r(), pt.t)?;
    Ok(m_from(params, pt, &rf))
}

pub fn field_sample(params: &ModelParams, pt: &Point) -> Result<FieldSample> {
    off_axis(pt)?;
    let rf = radius_function(params, pt.r(), pt.t)?;
    Ok(FieldSample {
        point: *pt,
        n: rf.normal(pt),
        dnn: dnn_from(params, pt, &rf),
        m: m_from(params, pt, &rf),
    })
}

/// `∇_v W` for a frame-coefficient field `W`, differentiating numerically
/// along the coordinate direction of `v` with a fourth-order stencil of
/// step `h`.
pub fn covariant_derivative_fd<F>(
    params: &ModelParams,
    pt: &Point,
    v: TangentVector,
    field: F,
    h: f64,
) -> Result<TangentVector>
where
    F: Fn(&Point) -> Result<TangentVector>,
{
    let w = to_coordinates(params, pt, v);
    let mut failure = None;
    let d = d1_vec(
        |s| match field(&pt.shifted(w, s)) {
            Ok(u) => u.to_array(),
            Err(e) => {
                failure = Some(e);
                [f64::NAN; 3]
            }
        },
        0.0,
        h,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(TangentVector::from_array(d) + connection(params, v, field(pt)?))
}

/// Coordinate step used for numerical derivatives of the closed-form fields.
fn fd_step(params: &ModelParams, pt: &Point) -> f64 {
    1e-3 * pt.r() * params.epsilon().min(1.0)
}

/// `|∇_𝓜𝓜 + (H/ω(r)²)𝒩|` with `∇_𝓜𝓜` by finite differences and `H` the
/// mean curvature of the leaf through `pt`.
pub fn meridian_residual(params: &ModelParams, pt: &Point) -> Result<f64> {
    let s = field_sample(params, pt)?;
    let mm = covariant_derivative_fd(params, pt, s.m, |q| field_m(params, q), fd_step(params, pt))?;
    let rf = radius_function(params, pt.r(), pt.t)?;
    let hm = 1.0 / (params.epsilon() * rf.value);
    let expected = (-hm / sq(rf.omega_r)) * s.n;
    Ok((mm - expected).norm())
}

/// One sample of a meridian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianSample {
    /// Arclength from the start.
    pub s: f64,
    pub point: Point,
    pub velocity: TangentVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeridianCurve {
    pub radius: f64,
    pub samples: Vec<MeridianSample>,
    /// The last sample is the south pole.
    pub reached_south_pole: bool,
}

impl MeridianCurve {
    /// `max |R(sample) − R|` over the samples.
    pub fn max_leaf_drift(&self, params: &ModelParams) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                radius_function(params, s.point.r(), s.point.t)
                    .map(|rf| abs(rf.value - self.radius))
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.s)
    }
}

/// Integration stopped early; the curve up to the failure is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct MeridianFailure {
    pub error: Error,
    pub partial: MeridianCurve,
}

/// Fraction of `R` below which the south pole is considered reached.
pub const POLE_RADIUS: f64 = 1e-3;

fn project_to_leaf(params: &ModelParams, radius: f64, pt: Point) -> Result<Point> {
    let mut pt = pt;
    for _ in 0..30 {
        let rf = radius_function(params, pt.r(), pt.t)?;
        let d = rf.value - radius;
        if abs(d) <= 1e-13 * radius {
            return Ok(pt);
        }
        // Move along 𝒩, using 𝒩R = ℓ/ε.
        let n = to_coordinates(params, &pt, rf.normal(&pt));
        pt = pt.shifted(n, -d * params.epsilon() / rf.ell);
    }
    Err(Error::Numeric {
        what: "projection onto the sphere did not converge",
        estimate: pt.r(),
    })
}

/// Integrate `γ' = 𝓜(γ)` from `start` with classical RK4 and arclength step
/// `step`, projecting back onto `Σ_R` after every step. Near the south pole
/// the step shrinks geometrically so the pole is approached, not overshot.
pub fn integrate_meridian(
    spec: &SphereSpec,
    start: &Point,
    step: f64,
    max_len: f64,
) -> core::result::Result<MeridianCurve, MeridianFailure> {
    let params = spec.params();
    let radius = spec.radius();
    let mut curve = MeridianCurve {
        radius,
        samples: Vec::new(),
        reached_south_pole: false,
    };
    macro_rules! bail {
        ($e:expr) => {
            return Err(MeridianFailure {
                error: $e,
                partial: curve,
            })
        };
    }
    if !(step > 0.0) {
        bail!(Error::Domain("meridian step must be positive"));
    }
    if start.r() == 0.0 {
        bail!(Error::Domain("meridian must start off the poles"));
    }
    let mut pt = match spec
        .outer_normal(start)
        .and_then(|_| project_to_leaf(params, radius, *start))
    {
        Ok(p) => p,
        Err(e) => bail!(e),
    };
    let vel =
        |p: &Point| -> Result<[f64; 3]> { Ok(to_coordinates(params, p, field_m(params, p)?)) };
    let mut s = 0.0;
    let e = params.epsilon();
    loop {
        let m = match field_m(params, &pt) {
            Ok(m) => m,
            Err(err) => bail!(err),
        };
        curve.samples.push(MeridianSample {
            s,
            point: pt,
            velocity: m,
        });
        let r = pt.r();
        if pt.t < 0.0 && r < POLE_RADIUS * radius {
            // Close the curve at the pole; near it the sphere is horizontal
            // and the remaining length is ε·r to leading order.
            s += e * r;
            curve.samples.push(MeridianSample {
                s,
                point: Point::new(0.0, 0.0, -spec.pole_height()),
                velocity: m,
            });
            curve.reached_south_pole = true;
            return Ok(curve);
        }
        if s > max_len {
            bail!(Error::Numeric {
                what: "meridian exceeded max length before reaching the south pole",
                estimate: s,
            });
        }
        let h = if pt.t < 0.0 {
            step.min(0.5 * e * r)
        } else {
            step
        };
        let next = (|| -> Result<Point> {
            let k1 = vel(&pt)?;
            let k2 = vel(&pt.shifted(k1, 0.5 * h))?;
            let k3 = vel(&pt.shifted(k2, 0.5 * h))?;
            let k4 = vel(&pt.shifted(k3, h))?;
            let d: [f64; 3] =
                core::array::from_fn(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0);
            project_to_leaf(params, radius, pt.shifted(d, h))
        })();
        match next {
            Ok(p) => pt = p,
            Err(err) => bail!(err),
        }
        s += h;
    }
}

/// A start point on `Σ_R` at distance `r0` from the axis, azimuth `theta`,
/// in the upper hemisphere.
pub fn meridian_start(spec: &SphereSpec, r0: f64, theta: f64) -> Result<Point> {
    spec.point(r0 * cos(theta), r0 * sin(theta), true)
}

/// The two limit fields at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitFields {
    /// Euclidean meridian field (`ε = 1`, `σ → 0`) in coordinates
    /// `[∂x, ∂y, ∂t]`, on the round sphere through the point.
    pub m_hat: TangentVector,
    /// Pansu field as coefficients on `X̄ = ∂x + σy∂t`, `Ȳ = ∂y − σx∂t`,
    /// `T̄ = ∂t`, on the Pansu sphere through the point.
    pub m_bar: TangentVector,
    /// Radius of that Pansu sphere.
    pub pansu_radius: f64,
}

/// Barred-frame coefficients of `𝓜̄` on the Pansu sphere of radius `rb`.
fn m_bar_on(pt: &Point, rb: f64) -> TangentVector {
    let r = pt.r();
    let lambda = signum_pos(pt.t) * sqrt(((rb - r) * (rb + r)).max(0.0)) / (r * rb);
    let mu = 1.0 / rb;
    TangentVector::new(pt.x * lambda - pt.y * mu, pt.y * lambda + pt.x * mu, 0.0)
}

pub fn limit_fields(params: &ModelParams, pt: &Point) -> Result<LimitFields> {
    off_axis(pt)?;
    let r = pt.r();
    let re = hypot(r, pt.t);
    let m_hat = TangentVector::new(pt.t * pt.x / (r * re), pt.t * pt.y / (r * re), -r / re);
    let rb = pansu_radius(params.sigma(), r, pt.t)?;
    Ok(LimitFields {
        m_hat,
        m_bar: m_bar_on(pt, rb),
        pansu_radius: rb,
    })
}

/// `𝓜̄` as a field (barred coefficients) through the Pansu foliation.
pub fn field_m_bar(sigma: f64, pt: &Point) -> Result<TangentVector> {
    off_axis(pt)?;
    let rb = pansu_radius(sigma, pt.r(), pt.t)?;
    Ok(m_bar_on(pt, rb))
}

/// Coordinate vector of barred coefficients.
pub fn barred_to_coordinates(sigma: f64, pt: &Point, v: TangentVector) -> [f64; 3] {
    [v.ax, v.ay, sigma * (pt.y * v.ax - pt.x * v.ay) + v.at]
}

/// `∇_𝓜̄𝓜̄` in barred coefficients, by finite differences. In the barred
/// frame `∇_X̄Ȳ = −σT̄`, `∇_ȲX̄ = σT̄` and `∇_X̄X̄ = ∇_ȲȲ = 0`, so for a
/// horizontal field the connection terms cancel and only the derivative of
/// the coefficients is left.
pub fn nabla_m_bar_m_bar(sigma: f64, pt: &Point) -> Result<TangentVector> {
    let m = field_m_bar(sigma, pt)?;
    let w = barred_to_coordinates(sigma, pt, m);
    let h = 1e-3 * pt.r();
    let mut failure = None;
    let d = d1_vec(
        |s| match field_m_bar(sigma, &pt.shifted(w, s)) {
            Ok(u) => u.to_array(),
            Err(e) => {
                failure = Some(e);
                [f64::NAN; 3]
            }
        },
        0.0,
        h,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(TangentVector::from_array(d))
}

/// `|∇_𝓜̄𝓜̄ − (2/R̄)J(𝓜̄)|`.
pub fn pansu_geodesic_residual(sigma: f64, pt: &Point) -> Result<f64> {
    let lhs = nabla_m_bar_m_bar(sigma, pt)?;
    let m = field_m_bar(sigma, pt)?;
    let rb = pansu_radius(sigma, pt.r(), pt.t)?;
    let rhs = (2.0 / rb) * crate::geometry::complex_structure_j(m)?;
    Ok((lhs - rhs).norm())
}

/// Horizontal barred coefficients of `ε⁻⁴∇_𝓜𝓜` (using its closed form
/// `−(H/ω²)𝒩`) and of the limit `(1/(2σ²r²))∇_𝓜̄𝓜̄`.
pub fn normal_defect_pair(params: &ModelParams, pt: &Point) -> Result<([f64; 2], [f64; 2])> {
    off_axis(pt)?;
    let rf = radius_function(params, pt.r(), pt.t)?;
    let e = params.epsilon();
    let n = rf.normal(pt);
    let coef = -1.0 / (e * rf.value * sq(rf.omega_r) * sq(e * e));
    // aX + bY = (a/ε)X̄ + (b/ε)Ȳ.
    let lhs = [coef * n.ax / e, coef * n.ay / e];
    let lim = nabla_m_bar_m_bar(params.sigma(), pt)?;
    let k = 1.0 / (2.0 * sq(params.sigma() * pt.r()));
    Ok((lhs, [k * lim.ax, k * lim.ay]))
}
