//! The CMC spheres `Σ_R`, their profile, the radius function of the
//! foliation `{Σ_R}` and the two limit profiles.
//!
//! Notation: `ω(r) = √(1+τ²ε²r²)`, `q = √(R²−r²)/ω(r)`, `p = sgn(t)·τεq`,
//! `ℓ(p) = 1/(1+p·atan p)`. The profile is written through `q` so that it
//! stays finite as `τ → 0`:
//!
//! `f = (ε³ω(r)²q/2)·[(1+p²)·atan(p)/p + 1]`.

use crate::error::{Error, Result};
use crate::geometry::{ModelParams, Point, TangentVector};
use crate::math::{abs, acos, atan, atan2, atanc, cos, hypot, signum_pos, sin, sq, sqrt, PI};
use crate::quadrature::integrate;
use crate::roots::{brent, expand_upper};

/// `ω(r) = √(1+τ²ε²r²)`.
pub fn omega(params: &ModelParams, r: f64) -> f64 {
    sqrt(1.0 + sq(params.tau() * params.epsilon() * r))
}

/// `ℓ(p) = 1/(1 + p·atan p)`.
pub fn ell(p: f64) -> f64 {
    1.0 / (1.0 + p * atan(p))
}

/// Height of `Σ_R` above the point at distance `r` from the axis, as a
/// function of `q`.
fn height_from_q(params: &ModelParams, omega_r: f64, q: f64) -> f64 {
    let e = params.epsilon();
    let p = params.tau() * e * q;
    0.5 * e * e * e * sq(omega_r) * q * ((1.0 + p * p) * atanc(p) + 1.0)
}

/// A sphere of the family, `εHR = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSpec {
    params: ModelParams,
    radius: f64,
    h: f64,
}

/// Pointwise profile data at distance `r` from the axis (upper hemisphere).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileQuantities {
    pub omega_r: f64,
    pub p: f64,
    pub ell: f64,
    pub rho: f64,
}

impl SphereSpec {
    pub fn new(params: ModelParams, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain("sphere radius must be positive and finite"));
        }
        Ok(Self {
            params,
            radius,
            h: 1.0 / (params.epsilon() * radius),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    /// Mean curvature `1/(εR)`.
    pub fn mean_curvature(&self) -> f64 {
        self.h
    }

    fn check_r(&self, r: f64, closed: bool) -> Result<()> {
        let ok = if closed {
            r >= 0.0 && r <= self.radius
        } else {
            r >= 0.0 && r < self.radius
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("r outside the sphere's disc"))
        }
    }

    pub fn quantities(&self, r: f64) -> Result<ProfileQuantities> {
        self.check_r(r, true)?;
        let w = omega(&self.params, r);
        let q = sqrt(sq(self.radius) - r * r) / w;
        let p = self.params.tau() * self.params.epsilon() * q;
        Ok(ProfileQuantities {
            omega_r: w,
            p,
            ell: ell(p),
            rho: self.params.tau() * self.params.epsilon() * r,
        })
    }

    /// `f(r;R)`, the height of the upper hemisphere.
    pub fn profile_f(&self, r: f64) -> Result<f64> {
        self.check_r(r, true)?;
        if self.params.is_flat() {
            let e = self.params.epsilon();
            return Ok(e * e * e * euclidean_profile(self.radius, r)?);
        }
        let w = omega(&self.params, r);
        let q = sqrt((self.radius - r) * (self.radius + r)) / w;
        Ok(height_from_q(&self.params, w, q))
    }

    /// `f(0;R)`, the height of the north pole.
    pub fn pole_height(&self) -> f64 {
        self.profile_f(0.0).unwrap_or(f64::NAN)
    }

    /// `f_r = −ε³ r ω(r)/√(R²−r²)`.
    pub fn profile_f_r(&self, r: f64) -> Result<f64> {
        self.check_r(r, false)?;
        let e = self.params.epsilon();
        Ok(-e * e * e * r * omega(&self.params, r) / sqrt((self.radius - r) * (self.radius + r)))
    }

    /// `∂f/∂R = ε³R/(q·ℓ(p))`, finite for `τ = 0` as well.
    pub fn profile_f_big_r(&self, r: f64) -> Result<f64> {
        self.check_r(r, false)?;
        let e = self.params.epsilon();
        let w = omega(&self.params, r);
        let q = sqrt((self.radius - r) * (self.radius + r)) / w;
        let p = self.params.tau() * e * q;
        Ok(e * e * e * self.radius / (q * ell(p)))
    }

    /// The two textbook forms of `∂f/∂R`: `τε⁴R(atan p + 1/p)` and
    /// `σR/(p ℓ(p))`. Both need `τ ≠ 0`.
    pub fn profile_f_big_r_forms(&self, r: f64) -> Result<(f64, f64)> {
        self.check_r(r, false)?;
        if self.params.is_flat() {
            return Err(Error::Domain("the printed forms of f_R divide by tau"));
        }
        let e = self.params.epsilon();
        let p = self.quantities(r)?.p;
        let a = self.params.tau() * e * e * e * e * self.radius * (atan(p) + 1.0 / p);
        let b = self.params.sigma() * self.radius / (p * ell(p));
        Ok((a, b))
    }

    /// Lebesgue volume of the enclosed ball.
    pub fn volume(&self) -> Result<f64> {
        let rr = self.radius;
        // r = R sin φ removes the square-root endpoint behaviour of f.
        let q = integrate(
            |phi| {
                let r = rr * sin(phi);
                self.profile_f(r.min(rr)).unwrap_or(0.0) * r * rr * cos(phi)
            },
            0.0,
            0.5 * PI,
            1e-12,
            0.0,
        )?;
        Ok(4.0 * PI * q.value)
    }

    /// Riemannian area of one hemisphere.
    pub fn hemisphere_area(&self) -> Result<f64> {
        let e = self.params.epsilon();
        let e6 = sq(e * e * e);
        let s = self.params.sigma();
        let rr = self.radius;
        let q = integrate(
            |phi| {
                let r = rr * sin(phi);
                let c = cos(phi);
                let w2 = sq(omega(&self.params, r));
                r * sqrt(sq(rr * c) * (e6 + sq(s * r)) + e6 * r * r * w2)
            },
            0.0,
            0.5 * PI,
            1e-13,
            0.0,
        )?;
        Ok(2.0 * PI * q.value / e)
    }

    /// Riemannian area of `Σ_R`.
    pub fn area(&self) -> Result<f64> {
        Ok(2.0 * self.hemisphere_area()?)
    }

    /// Outer unit normal at a point of `Σ_R`.
    pub fn outer_normal(&self, p: &Point) -> Result<TangentVector> {
        let rf = radius_function(&self.params, p.r(), p.t)?;
        let dev = abs(rf.value - self.radius);
        if dev > 1e-8 * self.radius.max(1.0) {
            return Err(Error::Contract {
                what: "point is not on the sphere",
                measured: dev,
            });
        }
        Ok(rf.normal(p))
    }

    /// The point of the upper (or lower, `north == false`) hemisphere
    /// above `(x, y)`.
    pub fn point(&self, x: f64, y: f64, north: bool) -> Result<Point> {
        let f = self.profile_f(hypot(x, y))?;
        Ok(Point::new(x, y, if north { f } else { -f }))
    }

    /// Point with polar angle `phi` from the north pole on the
    /// parametrisation `r = R sin φ` and azimuth `theta`.
    pub fn point_polar(&self, phi: f64, theta: f64) -> Point {
        let r = self.radius * abs(sin(phi)).min(1.0);
        let f = self.profile_f(r.min(self.radius)).unwrap_or(0.0);
        let t = if cos(phi) >= 0.0 { f } else { -f };
        Point::new(r * cos(theta), r * sin(theta), t)
    }
}

/// Value and partials of the foliation label `R(r, t)`, plus the auxiliary
/// quantities at the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusField {
    pub value: f64,
    pub r_partial: f64,
    pub t_partial: f64,
    /// `q = √(R²−r²)/ω(r) ≥ 0`.
    pub q: f64,
    /// Signed `p`.
    pub p: f64,
    pub ell: f64,
    pub omega_r: f64,
    /// `sgn(t)` with `+1` on the equator.
    pub sign: f64,
}

impl RadiusField {
    /// `𝒩 = (1/R)[(x+yp)X + (y−xp)Y + sgn(t)·q·T]`.
    pub fn normal(&self, pt: &Point) -> TangentVector {
        let rr = self.value;
        TangentVector::new(
            (pt.x + pt.y * self.p) / rr,
            (pt.y - pt.x * self.p) / rr,
            self.sign * self.q / rr,
        )
    }
}

/// Solve `f(r; R) = |t|` for the sphere through `(r, t)`.
///
/// The unknown is `q`, which keeps full relative accuracy close to the
/// equator where `R − r` is tiny.
pub fn radius_function(params: &ModelParams, r: f64, t: f64) -> Result<RadiusField> {
    if r < 0.0 || !r.is_finite() || !t.is_finite() {
        return Err(Error::Domain("radius function needs finite r >= 0 and t"));
    }
    if r == 0.0 && t == 0.0 {
        return Err(Error::Domain("radius function is undefined at the origin"));
    }
    let e = params.epsilon();
    let e3 = e * e * e;
    let te = params.tau() * e;
    let w = omega(params, r);
    let target = abs(t);
    let sign = signum_pos(t);
    let q = if target == 0.0 {
        0.0
    } else {
        let hi = target / (e3 * w * w);
        let q0 = brent(
            |q| height_from_q(params, w, q) - target,
            0.0,
            hi * (1.0 + 1e-12),
            hi * 1e-16,
        )?;
        // One Newton step with F'(q) = ε³ω²/ℓ polishes the last bits.
        let l = ell(te * q0);
        let q1 = q0 - (height_from_q(params, w, q0) - target) * l / (e3 * w * w);
        if q1 >= 0.0 {
            q1
        } else {
            q0
        }
    };
    let value = hypot(r, w * q);
    let p = sign * te * q;
    let l = ell(p);
    Ok(RadiusField {
        value,
        r_partial: r * l / value,
        t_partial: sign * q * l / (e3 * value),
        q,
        p,
        ell: l,
        omega_r: w,
        sign,
    })
}

/// Unit normal of the foliation `{Σ_R}` at any point but the origin.
pub fn foliation_normal(params: &ModelParams, pt: &Point) -> Result<TangentVector> {
    Ok(radius_function(params, pt.r(), pt.t)?.normal(pt))
}

/// `√(R²−r²)`.
pub fn euclidean_profile(radius: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r <= radius) {
        return Err(Error::Domain("r outside [0, R]"));
    }
    Ok(sqrt((radius - r) * (radius + r)))
}

/// `(σ/2)[R² acos(r/R) + r√(R²−r²)]`.
pub fn pansu_profile(sigma: f64, radius: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r <= radius) {
        return Err(Error::Domain("r outside [0, R]"));
    }
    let w = sqrt((radius - r) * (radius + r));
    Ok(0.5 * sigma * (radius * radius * acos(r / radius) + r * w))
}

/// Radius of the Pansu sphere through `(r, t)`, `σ > 0`.
pub fn pansu_radius(sigma: f64, r: f64, t: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain("pansu spheres need sigma > 0"));
    }
    if r == 0.0 && t == 0.0 {
        return Err(Error::Domain("pansu radius is undefined at the origin"));
    }
    let target = abs(t);
    if target == 0.0 {
        return Ok(r);
    }
    // Unknown w = √(R²−r²): the height is (σ/2)[(r²+w²)·atan2(w,r) + r w].
    let g = |w: f64| 0.5 * sigma * ((r * r + w * w) * atan2(w, r) + r * w) - target;
    let guess = sqrt(4.0 * target / (sigma * PI)).max(1e-300);
    let (lo, hi) = expand_upper(g, 0.0, guess)?;
    let w = brent(g, lo, hi, hi * 1e-16)?;
    Ok(hypot(r, w))
}
