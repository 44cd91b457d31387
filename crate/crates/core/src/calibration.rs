//! The calibrating foliation of the vertical half-cylinder
//! `C = {|z| < R, t > t_cut}` with `t_cut = f(R−δ; R)`.
//!
//! Above `Σ_R` the leaves are vertical translates of its upper graph, so
//! `u = f(|z|;R) − t + R`. Below, the leaf through a point is the translate
//! of the graph of `f(·;λ)` that passes through `(r_cut, t_cut)`, and
//! `u = λ` solves `F(r,t,λ) = f(r;λ) − f(r_cut;λ) + t_cut − t = 0`.

use crate::error::{Error, Result};
use crate::geometry::{to_coordinates, Point, TangentVector};
use crate::math::{sqrt, PI};
use crate::roots::{brent, expand_upper};
use crate::sphere::{omega, SphereSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    spec: SphereSpec,
    delta: f64,
    r_cut: f64,
    t_cut: f64,
}

/// A leaf `S_λ` of the foliation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LeafLabel {
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationConstants {
    pub k: f64,
    pub c: f64,
    pub d: f64,
}

/// `k = ε³ω(R)√R`, `C = 1/(4πεR³(Rk + f(0;R)))`,
/// `D = 1/(12επ²R⁵(4Rk² + f(0;R)²))`.
pub fn constants(spec: &SphereSpec) -> FoliationConstants {
    let e = spec.params().epsilon();
    let rr = spec.radius();
    let f0 = spec.pole_height();
    let k = e * e * e * omega(spec.params(), rr) * sqrt(rr);
    let c = 1.0 / (4.0 * PI * e * rr * rr * rr * (rr * k + f0));
    let d = 1.0 / (12.0 * e * PI * PI * libm::pow(rr, 5.0) * (4.0 * rr * k * k + f0 * f0));
    FoliationConstants { k, c, d }
}

/// Where a point sits relative to `Σ_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// On or above the upper graph.
    Above,
    /// Strictly inside the ball.
    Below,
}

/// Value of `u` and of the vertical calibration geometry at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafPoint {
    pub label: LeafLabel,
    pub side: Side,
}

/// Frame gradient of `u` and the unit field `V = −∇u/|∇u|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSample {
    pub label: LeafLabel,
    pub grad_u: TangentVector,
    pub v: TangentVector,
}

impl CylinderSpec {
    pub fn new(spec: SphereSpec, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta < spec.radius()) {
            return Err(Error::Domain("delta must lie in [0, R)"));
        }
        let r_cut = spec.radius() - delta;
        let t_cut = spec.profile_f(r_cut)?;
        Ok(Self {
            spec,
            delta,
            r_cut,
            t_cut,
        })
    }

    pub fn sphere(&self) -> &SphereSpec {
        &self.spec
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }
    pub fn t_cut(&self) -> f64 {
        self.t_cut
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.r() < self.spec.radius() && p.t > self.t_cut
    }

    fn leaf(&self, lambda: f64) -> Result<SphereSpec> {
        SphereSpec::new(*self.spec.params(), lambda)
    }

    fn big_f_unchecked(&self, r: f64, t: f64, lambda: f64) -> Result<f64> {
        let s = self.leaf(lambda)?;
        Ok(s.profile_f(r)? - s.profile_f(self.r_cut)? + self.t_cut - t)
    }

    /// `F(r,t,λ) = f(r;λ) − f(r_cut;λ) + t_cut − t`.
    pub fn big_f(&self, r: f64, t: f64, lambda: f64) -> Result<f64> {
        if !(r >= 0.0 && r < self.r_cut) {
            return Err(Error::Domain("F needs 0 <= r < r_cut"));
        }
        if !(t > self.t_cut && t < self.spec.profile_f(r)?) {
            return Err(Error::Domain("F needs t_cut < t < f(r;R)"));
        }
        if !(lambda > self.spec.radius()) {
            return Err(Error::Domain("F needs lambda > R"));
        }
        self.big_f_unchecked(r, t, lambda)
    }

    /// The foliation label `u` at a point of the cylinder.
    pub fn u(&self, p: &Point) -> Result<LeafPoint> {
        if !self.contains(p) {
            return Err(Error::Domain("point outside the half-cylinder"));
        }
        let r = p.r();
        let rr = self.spec.radius();
        let top = self.spec.profile_f(r)?;
        if p.t >= top {
            return Ok(LeafPoint {
                label: LeafLabel {
                    lambda: top - p.t + rr,
                },
                side: Side::Above,
            });
        }
        let g = |l: f64| self.big_f_unchecked(r, p.t, l).unwrap_or(f64::NAN);
        let (lo, hi) = expand_upper(g, rr, 2.0 * rr)?;
        let lambda = brent(g, lo, hi, 1e-15 * hi)?;
        Ok(LeafPoint {
            label: LeafLabel { lambda },
            side: Side::Below,
        })
    }

    /// The point of `S_λ` at distance `r` from the axis.
    pub fn leaf_point(&self, r: f64, lambda: f64) -> Result<Point> {
        let rr = self.spec.radius();
        let t = if lambda <= rr {
            self.spec.profile_f(r)? + rr - lambda
        } else {
            if r >= self.r_cut {
                return Err(Error::Domain("inner leaves live over r < r_cut"));
            }
            let s = self.leaf(lambda)?;
            s.profile_f(r)? - s.profile_f(self.r_cut)? + self.t_cut
        };
        Ok(Point::new(r, 0.0, t))
    }

    /// `∇u` by implicit differentiation and `V = −∇u/|∇u|`.
    ///
    /// Below `Σ_R`, `u_r = −F_r/F_λ` and `u_t = 1/F_λ`. The direction of
    /// `−∇u` is that of `(−f_r(r;λ), 1)` on both sides, which is what `V` is
    /// built from so that it stays defined where `F_λ` blows up (`δ = 0`
    /// on the sphere).
    pub fn calibration_field(&self, p: &Point) -> Result<CalibrationSample> {
        let leaf = self.u(p)?;
        let lambda = leaf.label.lambda;
        let rr = self.spec.radius();
        let r = p.r();
        let params = self.spec.params();
        let (slope, ur, ut) = match leaf.side {
            Side::Above => {
                let fr = if r == 0.0 {
                    0.0
                } else {
                    self.spec.profile_f_r(r)?
                };
                (fr, fr, -1.0)
            }
            Side::Below => {
                let s = self.leaf(lambda.max(rr))?;
                let fr = if r == 0.0 { 0.0 } else { s.profile_f_r(r)? };
                // With δ = 0 and λ rounded onto R, f_R(r_cut; λ) is +∞ and
                // ∇u vanishes; the direction below still defines V.
                let f_cut = if self.r_cut < s.radius() {
                    s.profile_f_big_r(self.r_cut)?
                } else {
                    f64::INFINITY
                };
                let f_lambda = s.profile_f_big_r(r)? - f_cut;
                (fr, -fr / f_lambda, 1.0 / f_lambda)
            }
        };
        let radial = |a: f64| {
            if r == 0.0 {
                [0.0, 0.0]
            } else {
                [a * p.x / r, a * p.y / r]
            }
        };
        let frame_grad = |gr: f64, gt: f64| {
            let [gx, gy] = radial(gr);
            let e = params.epsilon();
            let s = params.sigma();
            TangentVector::new((gx + s * p.y * gt) / e, (gy - s * p.x * gt) / e, e * e * gt)
        };
        let grad_u = frame_grad(ur, ut);
        let dir = frame_grad(-slope, 1.0);
        let n = dir.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Numeric {
                what: "degenerate gradient of u",
                estimate: n,
            });
        }
        Ok(CalibrationSample {
            label: leaf.label,
            grad_u,
            v: (1.0 / n) * dir,
        })
    }

    /// `(div V, H_λ)` at a point off `Σ_R`, with `div V` the coordinate
    /// divergence (the Riemannian volume is Lebesgue measure) by central
    /// differences of step `1e−5·R`.
    pub fn divergence_check(&self, p: &Point) -> Result<(f64, f64)> {
        let rr = self.spec.radius();
        let hstep = 1e-5 * rr;
        let params = self.spec.params();
        let top = |q: &Point| self.spec.profile_f(q.r().min(rr));
        let side0 = p.t >= top(p)?;
        let mut div = 0.0;
        for axis in 0..3 {
            let mut d = [0.0; 3];
            d[axis] = 1.0;
            let mut vals = [0.0; 2];
            for (k, sgn) in [1.0, -1.0].iter().enumerate() {
                let q = p.shifted(d, sgn * hstep);
                if !self.contains(&q) {
                    return Err(Error::Domain("divergence stencil leaves the cylinder"));
                }
                if (q.t >= top(&q)?) != side0 {
                    return Err(Error::Domain("divergence stencil straddles the sphere"));
                }
                let v = self.calibration_field(&q)?.v;
                vals[k] = to_coordinates(params, &q, v)[axis];
            }
            div += (vals[0] - vals[1]) / (2.0 * hstep);
        }
        let lambda = self.u(p)?.label.lambda;
        let e = params.epsilon();
        let h_lambda = if lambda > rr {
            1.0 / (e * lambda)
        } else {
            1.0 / (e * rr)
        };
        Ok((div, h_lambda))
    }

    /// `g_z(t) = u(z, f(|z|;R) − t)` and the matching lower bound on
    /// `1 − R/g_z(t)`.
    pub fn g_z_and_bounds(&self, r: f64, t: f64) -> Result<GzBound> {
        if !(r >= 0.0 && r < self.r_cut) {
            return Err(Error::Domain("g_z needs |z| < r_cut"));
        }
        let top = self.spec.profile_f(r)?;
        if !(t >= 0.0 && t < top - self.t_cut) {
            return Err(Error::Domain("g_z needs 0 <= t < f(|z|;R) − t_cut"));
        }
        let g = self.u(&Point::new(r, 0.0, top - t))?.label.lambda;
        let rr = self.spec.radius();
        let c = constants(&self.spec);
        let f0 = self.spec.pole_height();
        let bound = if self.delta < 1e-14 {
            t * t / (4.0 * rr * c.k * c.k + f0 * f0)
        } else {
            sqrt(self.delta) * t / (rr * c.k + f0)
        };
        let lhs = 1.0 - rr / g;
        Ok(GzBound {
            g,
            lhs,
            bound,
            // Slack for the rounding of R/g at t = 0, where both sides vanish.
            ok: lhs >= bound - 1e-14,
        })
    }

    /// Frame coefficients of the upward unit normal of `Σ_R` at `p`.
    pub fn sphere_normal(&self, p: &Point) -> Result<TangentVector> {
        self.spec.outer_normal(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GzBound {
    pub g: f64,
    /// `1 − R/g_z(t)`.
    pub lhs: f64,
    pub bound: f64,
    pub ok: bool,
}
