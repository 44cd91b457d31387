//! Left-invariant frame, Levi-Civita connection and curvature of H¹.

use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math::{abs, hypot, sq};

/// The metric family. `tau` is always derived from `(epsilon, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    epsilon: f64,
    sigma: f64,
    tau: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, sigma: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain("epsilon must be positive and finite"));
        }
        if !sigma.is_finite() {
            return Err(Error::Domain("sigma must be finite"));
        }
        let e2 = epsilon * epsilon;
        Ok(Self {
            epsilon,
            sigma,
            tau: sigma / (e2 * e2),
        })
    }

    /// Build from `(ε, τ)`; σ is recomputed as `τε⁴` and τ re-derived from it.
    pub fn from_tau(epsilon: f64, tau: f64) -> Result<Self> {
        let e2 = epsilon * epsilon;
        Self::new(epsilon, tau * e2 * e2)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Euclidean-limit dispatch threshold for formulas with a `1/τ` prefactor.
    pub fn is_flat(&self) -> bool {
        abs(self.tau) < 1e-14
    }
}

/// A point of H¹ = ℂ×ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }
    pub fn r(&self) -> f64 {
        hypot(self.x, self.y)
    }
    /// Move by a coordinate displacement.
    pub fn shifted(&self, d: [f64; 3], h: f64) -> Self {
        Self::new(self.x + h * d[0], self.y + h * d[1], self.t + h * d[2])
    }
}

/// Coefficients on the orthonormal frame `(X, Y, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentVector {
    pub ax: f64,
    pub ay: f64,
    pub at: f64,
}

impl TangentVector {
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const T: Self = Self::new(0.0, 0.0, 1.0);
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const FRAME: [Self; 3] = [Self::X, Self::Y, Self::T];

    pub const fn new(ax: f64, ay: f64, at: f64) -> Self {
        Self { ax, ay, at }
    }
    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
    pub fn to_array(self) -> [f64; 3] {
        [self.ax, self.ay, self.at]
    }
    pub fn dot(self, o: Self) -> f64 {
        self.ax * o.ax + self.ay * o.ay + self.at * o.at
    }
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }
    pub fn norm(self) -> f64 {
        crate::math::sqrt(self.norm_sq())
    }
    /// Largest absolute coefficient.
    pub fn max_abs(self) -> f64 {
        abs(self.ax).max(abs(self.ay)).max(abs(self.at))
    }
    /// Cross product in the orthonormal frame; `X × Y = T`.
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.ay * o.at - self.at * o.ay,
            self.at * o.ax - self.ax * o.at,
            self.ax * o.ay - self.ay * o.ax,
        )
    }
}

impl Add for TangentVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.ax + o.ax, self.ay + o.ay, self.at + o.at)
    }
}
impl Sub for TangentVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.ax - o.ax, self.ay - o.ay, self.at - o.at)
    }
}
impl Neg for TangentVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.ax, -self.ay, -self.at)
    }
}
impl Mul<TangentVector> for f64 {
    type Output = TangentVector;
    fn mul(self, v: TangentVector) -> TangentVector {
        TangentVector::new(self * v.ax, self * v.ay, self * v.at)
    }
}

/// Coordinate components `[∂x, ∂y, ∂t]` of `X`, `Y`, `T` at `p`.
pub fn frame_in_coordinates(params: &ModelParams, p: &Point) -> [[f64; 3]; 3] {
    let e = params.epsilon();
    let s = params.sigma();
    [
        [1.0 / e, 0.0, s * p.y / e],
        [0.0, 1.0 / e, -s * p.x / e],
        [0.0, 0.0, e * e],
    ]
}

/// Frame coefficients to a coordinate vector at `p`.
pub fn to_coordinates(params: &ModelParams, p: &Point, v: TangentVector) -> [f64; 3] {
    let e = params.epsilon();
    let s = params.sigma();
    [
        v.ax / e,
        v.ay / e,
        (v.ax * p.y - v.ay * p.x) * s / e + v.at * e * e,
    ]
}

/// Coordinate vector at `p` to frame coefficients.
pub fn from_coordinates(params: &ModelParams, p: &Point, w: [f64; 3]) -> TangentVector {
    let e = params.epsilon();
    let s = params.sigma();
    TangentVector::new(
        e * w[0],
        e * w[1],
        (w[2] - s * p.y * w[0] + s * p.x * w[1]) / (e * e),
    )
}

/// Contact form: the `T` coefficient.
pub fn theta(v: TangentVector) -> f64 {
    v.at
}

/// `∇_u v` for constant-coefficient fields, from the table
/// `∇_Y X = τT`, `∇_X Y = −τT`, `∇_T X = ∇_X T = τY`, `∇_T Y = ∇_Y T = −τX`.
pub fn connection(params: &ModelParams, u: TangentVector, v: TangentVector) -> TangentVector {
    let tau = params.tau();
    TangentVector::new(
        -tau * (u.ay * v.at + u.at * v.ay),
        tau * (u.ax * v.at + u.at * v.ax),
        tau * (u.ay * v.ax - u.ax * v.ay),
    )
}

/// Lie bracket of constant fields: `[X,Y] = −2τT`, the rest vanish.
pub fn bracket(params: &ModelParams, u: TangentVector, v: TangentVector) -> TangentVector {
    TangentVector::new(0.0, 0.0, -2.0 * params.tau() * (u.ax * v.ay - u.ay * v.ax))
}

/// A frame-coefficient field sampled at one point, optionally with the
/// derivative of its coefficients along the direction of differentiation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub value: TangentVector,
    pub derivative: Option<TangentVector>,
}

impl FieldJet {
    pub fn constant(value: TangentVector) -> Self {
        Self {
            value,
            derivative: Some(TangentVector::ZERO),
        }
    }
}

/// `∇_u v = u(vⁱ) eᵢ + vⁱ ∇_u eᵢ`.
pub fn covariant_derivative(
    params: &ModelParams,
    u: TangentVector,
    v: &FieldJet,
) -> Result<TangentVector> {
    let dv = v.derivative.ok_or(Error::Contract {
        what: "covariant derivative needs the coefficient derivatives along u",
        measured: f64::NAN,
    })?;
    Ok(dv + connection(params, u, v.value))
}

/// `R(u,v)w = ∇_u∇_v w − ∇_v∇_u w − ∇_[u,v] w` on constant fields.
pub fn riemann(
    params: &ModelParams,
    u: TangentVector,
    v: TangentVector,
    w: TangentVector,
) -> TangentVector {
    connection(params, u, connection(params, v, w))
        - connection(params, v, connection(params, u, w))
        - connection(params, bracket(params, u, v), w)
}

/// `Ric(n) = Σᵢ ⟨R(eᵢ,n)n, eᵢ⟩` for unit `n`.
pub fn ricci(params: &ModelParams, n: TangentVector) -> Result<f64> {
    let dev = abs(n.norm_sq() - 1.0);
    if dev > 1e-10 {
        return Err(Error::Contract {
            what: "ricci expects a unit vector",
            measured: dev,
        });
    }
    Ok(TangentVector::FRAME
        .iter()
        .map(|&e| riemann(params, e, n, n).dot(e))
        .sum())
}

/// Closed form of the Ricci quadratic form, `2τ²(2⟨n,T⟩² − |n|²)`.
pub fn ricci_closed(params: &ModelParams, n: TangentVector) -> f64 {
    2.0 * sq(params.tau()) * (2.0 * sq(n.at) - n.norm_sq())
}

/// Rotation of horizontal vectors by +π/2: `X ↦ Y`, `Y ↦ −X`.
pub fn complex_structure_j(v: TangentVector) -> Result<TangentVector> {
    if abs(v.at) > 1e-12 * v.norm().max(1.0) {
        return Err(Error::Contract {
            what: "J acts on horizontal vectors only",
            measured: v.at,
        });
    }
    Ok(TangentVector::new(-v.ay, v.ax, 0.0))
}
