//! Second fundamental form, principal data and the operator `k` of `Σ_R`.
//!
//! All 2×2 operators are expressed in the tangent frame `(X1, X2)`, with
//! `h_ij = ⟨∇_{X_i}𝒩, X_j⟩`.

use crate::diff::d1_vec;
use crate::error::{Error, Result};
use crate::geometry::{connection, to_coordinates, Point, TangentVector};
use crate::math::{abs, atan, cos, sin, sq, sqrt};
use crate::sphere::{foliation_normal, omega, radius_function, RadiusField, SphereSpec};

/// Symmetric 2×2 matrix stored as `[m11, m12, m22]`.
pub type Sym2 = [f64; 3];

/// Orthonormal tangent frame of `Σ_R` away from the poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFrame {
    pub x1: TangentVector,
    pub x2: TangentVector,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeData {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Angle between `X1` and the first principal direction.
    pub beta: f64,
    pub k1: TangentVector,
    pub k2: TangentVector,
}

impl ShapeData {
    pub fn matrix(&self) -> Sym2 {
        [self.h11, self.h12, self.h22]
    }
    /// `|h|² = h11² + 2h12² + h22²`.
    pub fn norm_sq(&self) -> f64 {
        sq(self.h11) + 2.0 * sq(self.h12) + sq(self.h22)
    }
    /// `h` applied to a tangent vector given in the ambient frame.
    pub fn apply(&self, frame: &SphereFrame, v: TangentVector) -> TangentVector {
        let (u1, u2) = (v.dot(frame.x1), v.dot(frame.x2));
        let w1 = self.h11 * u1 + self.h12 * u2;
        let w2 = self.h12 * u1 + self.h22 * u2;
        w1 * frame.x1 + w2 * frame.x2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorK {
    pub k: Sym2,
    pub k0: Sym2,
    pub k0_norm: f64,
    pub alpha: f64,
}

fn on_sphere(spec: &SphereSpec, pt: &Point) -> Result<RadiusField> {
    let rf = radius_function(spec.params(), pt.r(), pt.t)?;
    let dev = abs(rf.value - spec.radius());
    if dev > 1e-8 * spec.radius().max(1.0) {
        return Err(Error::Contract {
            what: "point is not on the sphere",
            measured: dev,
        });
    }
    Ok(rf)
}

/// Frame `X1 = −a((y−xp)X − (x+yp)Y)`, `X2 = −b((x+yp)X + (y−xp)Y) + cT`.
///
/// `(X1, X2, 𝒩)` is positively oriented and `⟨X1, −yX + xY⟩ > 0`.
pub fn sphere_frame(spec: &SphereSpec, pt: &Point) -> Result<SphereFrame> {
    let rf = on_sphere(spec, pt)?;
    let r = pt.r();
    if r == 0.0 {
        return Err(Error::Domain("the sphere frame is undefined at the poles"));
    }
    let params = spec.params();
    let rr = rf.value;
    let w_r = rf.omega_r;
    let w_big = omega(params, rr);
    let (x, y, p) = (pt.x, pt.y, rf.p);
    let a = w_r / (r * w_big);
    let b = rf.sign * w_r * rf.q / (r * rr * w_big);
    let c = r * w_big / (rr * w_r);
    let x1 = TangentVector::new(-a * (y - x * p), a * (x + y * p), 0.0);
    let x2 = TangentVector::new(-b * (x + y * p), -b * (y - x * p), c);
    Ok(SphereFrame { x1, x2, a, b, c, p })
}

/// `h = 1/(1+ϱ²)·[[H(1+2ϱ²), τϱ²], [τϱ², H]]`, `ϱ = τεr`.
pub fn shape_matrix(spec: &SphereSpec, r: f64) -> Sym2 {
    let tau = spec.params().tau();
    let hm = spec.mean_curvature();
    let rho2 = sq(tau * spec.params().epsilon() * r);
    let d = 1.0 + rho2;
    [hm * (1.0 + 2.0 * rho2) / d, tau * rho2 / d, hm / d]
}

/// Half the rotation angle of the principal frame, `atan(τ/(H + √(H²+τ²)))`.
pub fn principal_angle(spec: &SphereSpec) -> f64 {
    let tau = spec.params().tau();
    let hm = spec.mean_curvature();
    atan(tau / (hm + sqrt(hm * hm + tau * tau)))
}

/// Closed-form second fundamental form and principal data. At the poles the
/// frame vectors are replaced by `X`, `Y`.
pub fn second_fundamental_form(spec: &SphereSpec, pt: &Point) -> Result<ShapeData> {
    on_sphere(spec, pt)?;
    let r = pt.r();
    let [h11, h12, h22] = shape_matrix(spec, r);
    let tau = spec.params().tau();
    let hm = spec.mean_curvature();
    let rho2 = sq(tau * spec.params().epsilon() * r);
    let split = rho2 / (1.0 + rho2) * sqrt(hm * hm + tau * tau);
    let beta = principal_angle(spec);
    let (e1, e2) = if r == 0.0 {
        (TangentVector::X, TangentVector::Y)
    } else {
        let f = sphere_frame(spec, pt)?;
        (f.x1, f.x2)
    };
    let (cb, sb) = (cos(beta), sin(beta));
    Ok(ShapeData {
        h11,
        h12,
        h22,
        kappa1: hm + split,
        kappa2: hm - split,
        beta,
        k1: cb * e1 + sb * e2,
        k2: -sb * e1 + cb * e2,
    })
}

/// `∇_v 𝒩` by numerical differentiation of the foliation normal along `v`,
/// projected to the tangent plane.
pub fn shape_operator_oracle(
    spec: &SphereSpec,
    pt: &Point,
    v: TangentVector,
) -> Result<TangentVector> {
    let rf = on_sphere(spec, pt)?;
    let params = spec.params();
    let n = rf.normal(pt);
    let w = to_coordinates(params, pt, v);
    let h = 1e-5 * abs(rf.p).max(1.0) * spec.radius().min(1.0) / v.norm().max(1e-300);
    let mut failure = None;
    let dn = d1_vec(
        |s| match foliation_normal(params, &pt.shifted(w, s)) {
            Ok(m) => m.to_array(),
            Err(e) => {
                failure = Some(e);
                [0.0; 3]
            }
        },
        0.0,
        h,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if dn.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric {
            what: "shape operator stencil produced non-finite values",
            estimate: f64::NAN,
        });
    }
    let full = TangentVector::from_array(dn) + connection(params, v, n);
    Ok(full - full.dot(n) * n)
}

/// `k = h + (2τ²/√(H²+τ²))·q(ϑ⊗ϑ)q⁻¹` with `q` the rotation by `α_H`, plus
/// its trace-free part.
pub fn assemble_k(tau: f64, hm: f64, h: Sym2, theta1: f64, theta2: f64) -> Result<OperatorK> {
    if !(hm > 0.0) {
        return Err(Error::Domain("operator k needs H > 0"));
    }
    let root = sqrt(hm * hm + tau * tau);
    let alpha = 0.5 * atan(tau / hm);
    let (ca, sa) = (cos(alpha), sin(alpha));
    // Rotate the vector (ϑ(X1), ϑ(X2)) and take its outer product.
    let u1 = ca * theta1 - sa * theta2;
    let u2 = sa * theta1 + ca * theta2;
    let g = 2.0 * tau * tau / root;
    let k = [h[0] + g * u1 * u1, h[1] + g * u1 * u2, h[2] + g * u2 * u2];
    let half = 0.5 * (k[0] + k[2]);
    let k0 = [k[0] - half, k[1], k[2] - half];
    let k0_norm = sqrt(sq(k0[0]) + 2.0 * sq(k0[1]) + sq(k0[2]));
    Ok(OperatorK {
        k,
        k0,
        k0_norm,
        alpha,
    })
}

pub fn operator_k(spec: &SphereSpec, pt: &Point) -> Result<OperatorK> {
    let frame = sphere_frame(spec, pt)?;
    let h = shape_matrix(spec, pt.r());
    assemble_k(
        spec.params().tau(),
        spec.mean_curvature(),
        h,
        frame.x1.at,
        frame.x2.at,
    )
}

/// The scalar `H + (ϱ²/(1+ϱ²))√(H²+τ²)` that `k` is a multiple of.
pub fn k_eigenvalue(spec: &SphereSpec, r: f64) -> f64 {
    let tau = spec.params().tau();
    let hm = spec.mean_curvature();
    let rho2 = sq(tau * spec.params().epsilon() * r);
    hm + rho2 / (1.0 + rho2) * sqrt(hm * hm + tau * tau)
}
