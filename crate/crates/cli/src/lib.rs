//! `hcmc`: command-line front end for `heisenberg-cmc`.
//!
//! Every subcommand reads its numbers from flags, then from an optional
//! flat `key = value` file (`--config`), then from built-in defaults.
//! Exit codes: 0 ok, 1 a check failed, 2 bad input, 3 numeric failure.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod output;

pub use config::ConfigFile;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
    pub fn failed(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
    /// A closed pipe on the reading side is not a failure: code 0.
    pub fn io(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Self {
                code: 0,
                message: String::new(),
            };
        }
        Self::numeric(format!("write failed: {e}"))
    }
    pub fn csv(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => Self::io(e),
            other => Self::numeric(format!("write failed: {other:?}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<heisenberg_cmc::Error> for CliError {
    fn from(e: heisenberg_cmc::Error) -> Self {
        match e {
            heisenberg_cmc::Error::Domain(_) => Self::input(e.to_string()),
            _ => Self::numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hcmc",
    version,
    about = "CMC spheres in the Riemannian Heisenberg group"
)]
pub struct Cli {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Model parameters. The orthonormal frame is `X = (1/ε)(∂x + σy∂t)`,
/// `Y = (1/ε)(∂y − σx∂t)`, `T = ε²∂t`.
#[derive(Debug, Clone, Default, Args)]
pub struct Geometry {
    /// ε > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// σ >= 0; σ = 0 is the flat case.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Sphere radius R > 0; the mean curvature is 1/(εR).
    #[arg(long = "R", alias = "radius", allow_hyphen_values = true)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolylineFormat {
    Csv,
    Obj,
    Gnuplot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridPreset {
    /// (ε, σ, R) in {(.5,.5,1), (1,1,1), (2,1,.5), (1,2,2)}.
    Default,
    /// (ε, σ, R) in {0.5, 1, 2}³.
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile, area and volume of Σ_R.
    #[command(after_help = SPHERE_HELP)]
    Sphere {
        #[command(flatten)]
        geometry: Geometry,
        /// Profile table (CSV).
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
        /// Comparison with the round and the Pansu profiles (CSV).
        #[arg(long, value_name = "PATH")]
        limits: Option<String>,
        /// Number of radii, equally spaced on [0, R].
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Second fundamental form and the operator k along a meridian.
    #[command(after_help = CURVATURE_HELP)]
    Curvature {
        #[command(flatten)]
        geometry: Geometry,
        /// Number of polar angles, at the midpoints of n equal cells of (0, π).
        #[arg(long)]
        samples: Option<usize>,
        /// Azimuth of the meridian.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, default_value = "-", value_name = "PATH")]
        out: String,
    },
    /// Integrate a meridian of Σ_R along the field 𝓜.
    #[command(after_help = MERIDIAN_HELP)]
    Meridian {
        #[command(flatten)]
        geometry: Geometry,
        /// R = 2, ε = 0.5, σ = 0.5 (flags still win).
        #[arg(long)]
        figure1: bool,
        /// Arclength step; default R/2000.
        #[arg(long)]
        step: Option<f64>,
        /// Distance of the start point from the axis; default 0.01R.
        #[arg(long)]
        r0: Option<f64>,
        /// Azimuth of the start point.
        #[arg(long, allow_hyphen_values = true)]
        theta0: Option<f64>,
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
        /// Inferred from the extension of --out when omitted (.obj, .dat/.gp, else csv).
        #[arg(long, value_enum)]
        format: Option<PolylineFormat>,
    },
    /// The label u and the field V on the vertical half-cylinder over r < R − δ.
    #[command(after_help = CALIBRATION_HELP)]
    Calibration {
        #[command(flatten)]
        geometry: Geometry,
        /// Cut depth δ in [0, R).
        #[arg(long)]
        delta: Option<f64>,
        /// Grid cells per direction.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "-", value_name = "PATH")]
        out: String,
    },
    /// Normal 𝒩, ∇_𝒩𝒩 and 𝓜 of the foliation by the spheres Σ_λ, in the plane y = 0.
    #[command(after_help = FOLIATION_HELP)]
    Foliation {
        #[command(flatten)]
        geometry: Geometry,
        /// Half-width of the sampled window: 0 < x <= a, −a <= t <= a.
        #[arg(long)]
        extent: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "-", value_name = "PATH")]
        out: String,
    },
    /// Random volume-preserving competitors against the quantitative isoperimetric bound.
    #[command(after_help = ISOPERIM_HELP)]
    Isoperim {
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long)]
        delta: Option<f64>,
        /// Number of competitors.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "-", value_name = "PATH")]
        json: String,
        /// Per-competitor table.
        #[arg(long, value_name = "PATH")]
        csv: Option<String>,
    },
    /// Run the invariant suite; nonzero exit iff a check fails.
    #[command(after_help = VERIFY_HELP)]
    Verify {
        /// Geometry flags select a single spec instead of a preset.
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long, value_enum)]
        grid: Option<GridPreset>,
        /// Random points per spec.
        #[arg(long)]
        samples: Option<usize>,
        /// Adds this to h11 before forming k0 (negative control).
        #[arg(long, allow_hyphen_values = true)]
        perturb_h: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here (`-` for stdout) instead of PASS/FAIL lines.
        #[arg(long, value_name = "PATH")]
        json: Option<String>,
    },
}

const SPHERE_HELP: &str = "\
Printed: mean_curvature = 1/(εR), pole_height = f(0;R), area, volume,
hemisphere_area (area of the upper graph).

--out columns:
  r     distance to the t-axis
  f     upper profile f(r;R); Σ_R is t = ±f
  f_r   ∂f/∂r
  f_R   ∂f/∂R
Cells are empty where a value is undefined (f_r, f_R at r = R).

--limits columns:
  r, f   as above
  round  √(R² − r²)
  pansu  (σ/2)[R² acos(r/R) + r√(R²−r²)]";

const CURVATURE_HELP: &str = "\
Columns:
  phi, x, y, t        sample point (polar angle phi from the north pole)
  h11, h12, h22       second fundamental form ⟨∇_{Xi}𝒩, Xj⟩ in the frame X1, X2
  kappa1, kappa2      principal curvatures, kappa1 + kappa2 = 2/(εR)
  beta                angle from X1 to the first principal direction
  k_eigen             H + (ϱ²/(1+ϱ²))√(H²+τ²), ϱ = τεr
  k0_norm             |k − (tr k/2) Id| for k = h + (2τ²/√(H²+τ²)) q(ϑ⊗ϑ)q⁻¹,
                      q the rotation by atan(τ/H)/2";

const MERIDIAN_HELP: &str = "\
Printed: samples, length (Riemannian arclength), reached_south_pole,
max_leaf_drift = max |R(γ) − R|, max_geodesic_residual = max |∇_𝓜𝓜 + (H/ω²)𝒩|,
pansu_deviation = max |ε𝓜 − 𝓜̄| in the frame ∂x + σy∂t, ∂y − σx∂t, ∂t.

CSV / gnuplot columns: s (arclength), x, y, t, m_x, m_y, m_t (𝓜 in X, Y, T).
OBJ: one vertex per sample and a single polyline element.
Exits 3 after writing the partial curve if integration fails.";

const CALIBRATION_HELP: &str = "\
Columns:
  r, t         point in the half-plane y = 0 of the cylinder r < R, t > f(R − δ; R)
  u            leaf label λ: u = R + f(r;R) − t on and above Σ_R, else the λ > R
               with f(r;λ) − f(R−δ;λ) = t − f(R−δ;R)
  side         0 on or above Σ_R, 1 inside
  div_v        divergence of V = −∇u/|∇u|
  h_lambda     mean curvature 1/(ελ) of the leaf (1/(εR) above Σ_R)
  bound_slack  (1 − R/g) − lower bound, for g = u at depth f(r;R) − t below Σ_R
Empty cells: the divergence stencil would cross Σ_R or leave the cylinder,
or the point is above Σ_R (bound_slack).";

const FOLIATION_HELP: &str = "\
Columns:
  x, t                  point (x, 0, t)
  leaf_radius           λ with the point on Σ_λ
  n_x, n_y, n_t         unit normal 𝒩 of Σ_λ in X, Y, T
  dnn_x, dnn_y, dnn_t   ∇_𝒩𝒩
  m_x, m_y, m_t         meridian field 𝓜 (unit, tangent to Σ_λ)
Empty cells where a field is undefined.";

const ISOPERIM_HELP: &str = "\
JSON: params, delta, n_competitors, min_slack, exponent_fit (slope of
log deficit vs log amplitude), bound = quadratic (δ > 0: √δ·C·|EΔE_R|²)
or cubic (δ = 0: D·|EΔE_R|³), and the per-competitor rows.

CSV columns: index, symdiff = |EΔE_R|, deficit = A(E) − A(E_R), bound, slack = deficit − bound.
Exits 1 if min_slack < 0.";

const VERIFY_HELP: &str = "\
Checks (measured deviation <= tolerance):
  cmc_constancy          |H_fd − H|/H, H_fd = −(F' + F/r)/(2ε), F = f_r/√(ε⁶ + f_r² + σ²r²)
  shape_operator_oracle  analytic h vs finite-difference ∇_W𝒩
  principal_directions   |h(Ki) − κi Ki|
  k0_vanishes            |k0|
  curvature_identity     ⟨R(v2,v1)𝒩, v2⟩ = 4τ²|v|²ϑ(v1)ϑ(𝒩)
  riemann_symmetries     antisymmetry in each pair and pair exchange of R
  calibration_bounds     grid points violating the lower bound on 1 − R/g
  jacobi_fields          |Δg + (|h|² + Ric(𝒩))g| for g the normal component of a
                         right-invariant field";

/// Dispatch a parsed command.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    commands::dispatch(cli.command, &file)
}
