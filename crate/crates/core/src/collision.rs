//! SRT, TRT and MRT relaxation operators and the relaxation-rate algebra.
//!
//! All operators act on one cell's 19 populations and preserve density and
//! momentum exactly. Rates live in `(0, 2)`; the shear rate relates to the
//! kinematic viscosity as `s_nu = 1 / (3 nu + 1/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Q, VELOCITIES};

/// Collision operator selection, as it appears in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum CollisionModel {
    Srt,
    Trt {
        /// Magic parameter; `1/4` suits porous media, `3/16` puts straight
        /// bounce-back walls at exactly half-way.
        lambda: f64,
    },
    Mrt {
        /// Ratio `(1/s_nu - 1/2) / (1/s_e - 1/2)` kept constant for the two
        /// symmetric energy modes.
        #[serde(default = "default_energy_ratio")]
        energy_ratio: f64,
    },
}

pub fn default_energy_ratio() -> f64 {
    4.6
}

impl CollisionModel {
    pub fn name(&self) -> &'static str {
        match self {
            CollisionModel::Srt => "srt",
            CollisionModel::Trt { .. } => "trt",
            CollisionModel::Mrt { .. } => "mrt",
        }
    }
}

/// Shear relaxation rate for a kinematic viscosity in lattice units.
#[inline]
pub fn omega_from_nu(nu: f64) -> f64 {
    1.0 / (3.0 * nu + 0.5)
}

/// Kinematic viscosity implied by a shear relaxation rate.
#[inline]
pub fn nu_from_omega(omega: f64) -> f64 {
    (1.0 / omega - 0.5) / 3.0
}

fn check_rate(omega: f64, what: &str) -> Result<()> {
    if omega > 0.0 && omega < 2.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} = {omega} outside the stable range (0, 2)"
        )))
    }
}

/// Antisymmetric TRT rate from the symmetric rate and the magic parameter
/// `Lambda = (1/w+ - 1/2)(1/w- - 1/2)`.
pub fn omega_minus(omega_plus: f64, lambda: f64) -> Result<f64> {
    check_rate(omega_plus, "omega_plus")?;
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("lambda = {lambda} must be positive")));
    }
    let om = 1.0 / (lambda / (1.0 / omega_plus - 0.5) + 0.5);
    check_rate(om, "derived omega_minus")?;
    Ok(om)
}

/// Single-relaxation-time collision, `f' = f - omega (f - f_eq)`.
#[inline]
pub fn relax_srt(f: &[f64; Q], feq: &[f64; Q], omega: f64) -> [f64; Q] {
    let mut out = [0.0; Q];
    for k in 0..Q {
        out[k] = f[k] - omega * (f[k] - feq[k]);
    }
    out
}

/// Two-relaxation-time collision. The populations split into symmetric and
/// antisymmetric halves over opposite direction pairs,
/// `f±_k = (f_k ± f_kbar) / 2`, each relaxed at its own rate.
#[inline]
pub fn relax_trt(f: &[f64; Q], feq: &[f64; Q], omega_plus: f64, omega_minus: f64) -> [f64; Q] {
    let mut out = [0.0; Q];
    // Rest direction is purely symmetric.
    out[0] = f[0] - omega_plus * (f[0] - feq[0]);
    let mut k = 1;
    while k < Q {
        let kb = k + 1; // opposite pairs are adjacent by construction
        let fp = 0.5 * (f[k] + f[kb]);
        let fm = 0.5 * (f[k] - f[kb]);
        let ep = 0.5 * (feq[k] + feq[kb]);
        let em = 0.5 * (feq[k] - feq[kb]);
        let dp = omega_plus * (fp - ep);
        let dm = omega_minus * (fm - em);
        out[k] = f[k] - dp - dm;
        out[kb] = f[kb] - dp + dm;
        k += 2;
    }
    out
}

/// Orthogonal (not orthonormal) 19-row moment basis obtained by Gram-Schmidt
/// orthogonalization of polynomials in the velocity components, in the
/// conventional row order: density, energy, energy squared, then interleaved
/// momentum/heat-flux rows, stress rows and third-order rows.
#[derive(Debug, Clone)]
pub struct MomentBasis {
    /// Moment matrix; rows are mutually orthogonal.
    pub m: [[f64; Q]; Q],
    /// Exact inverse `M^T (M M^T)^{-1}`, using the diagonal row-norm matrix.
    pub inv: [[f64; Q]; Q],
}

/// Row indices of the conserved moments (density and momentum).
pub const CONSERVED_ROWS: [usize; 4] = [0, 3, 5, 7];
/// Row indices of the two symmetric energy modes.
pub const ENERGY_ROWS: [usize; 2] = [1, 2];
/// Row indices of the five viscous stress modes.
pub const VISCOUS_ROWS: [usize; 5] = [9, 11, 13, 14, 15];
/// Row indices of the remaining kinetic modes.
pub const KINETIC_ROWS: [usize; 8] = [4, 6, 8, 10, 12, 16, 17, 18];

impl MomentBasis {
    pub fn new() -> Self {
        // Seed polynomials evaluated on the 19 velocities, ordered so the
        // orthogonalized rows land on the conventional mode indices.
        let mut seeds = [[0.0f64; Q]; Q];
        for k in 0..Q {
            let [x, y, z] = VELOCITIES[k].map(|c| c as f64);
            let e2 = x * x + y * y + z * z;
            seeds[0][k] = 1.0;
            seeds[1][k] = e2;
            seeds[2][k] = e2 * e2;
            seeds[3][k] = x;
            seeds[4][k] = e2 * x;
            seeds[5][k] = y;
            seeds[6][k] = e2 * y;
            seeds[7][k] = z;
            seeds[8][k] = e2 * z;
            seeds[9][k] = 3.0 * x * x - e2;
            seeds[10][k] = e2 * (3.0 * x * x - e2);
            seeds[11][k] = y * y - z * z;
            seeds[12][k] = e2 * (y * y - z * z);
            seeds[13][k] = x * y;
            seeds[14][k] = y * z;
            seeds[15][k] = x * z;
            seeds[16][k] = (y * y - z * z) * x;
            seeds[17][k] = (z * z - x * x) * y;
            seeds[18][k] = (x * x - y * y) * z;
        }

        // Gram-Schmidt over the plain Euclidean inner product on directions.
        let mut m = seeds;
        for row in 0..Q {
            for prev in 0..row {
                let num: f64 = (0..Q).map(|k| m[row][k] * m[prev][k]).sum();
                let den: f64 = (0..Q).map(|k| m[prev][k] * m[prev][k]).sum();
                let c = num / den;
                if c != 0.0 {
                    for k in 0..Q {
                        m[row][k] -= c * m[prev][k];
                    }
                }
            }
        }

        // inv = M^T D^{-1} with D = diag(row . row).
        let mut inv = [[0.0f64; Q]; Q];
        for row in 0..Q {
            let den: f64 = (0..Q).map(|k| m[row][k] * m[row][k]).sum();
            for k in 0..Q {
                inv[k][row] = m[row][k] / den;
            }
        }

        Self { m, inv }
    }

    /// Transform populations to moment space.
    #[inline]
    pub fn to_moments(&self, f: &[f64; Q]) -> [f64; Q] {
        let mut m = [0.0; Q];
        for (row, out) in m.iter_mut().enumerate() {
            let mr = &self.m[row];
            *out = (0..Q).map(|k| mr[k] * f[k]).sum();
        }
        m
    }

    /// Transform moments back to population space.
    #[inline]
    pub fn from_moments(&self, mom: &[f64; Q]) -> [f64; Q] {
        let mut f = [0.0; Q];
        for (k, out) in f.iter_mut().enumerate() {
            let ik = &self.inv[k];
            *out = (0..Q).map(|row| ik[row] * mom[row]).sum();
        }
        f
    }
}

impl Default for MomentBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// The 19 MRT relaxation rates: conserved modes at zero, the five viscous
/// stress modes at `s_nu`, the two symmetric energy modes from the constant
/// ratio `(1/s_nu - 1/2)/(1/s_e - 1/2)`, and the remaining kinetic modes at
/// `s_zeta = 8 (2 - s_nu) / (8 - s_nu)`.
pub fn mrt_rates(s_nu: f64, energy_ratio: f64) -> Result<[f64; Q]> {
    check_rate(s_nu, "s_nu")?;
    if !(energy_ratio > 0.0) {
        return Err(Error::Config(format!(
            "energy ratio {energy_ratio} must be positive"
        )));
    }
    let s_zeta = 8.0 * (2.0 - s_nu) / (8.0 - s_nu);
    let s_e = 1.0 / ((1.0 / s_nu - 0.5) / energy_ratio + 0.5);
    let mut s = [0.0; Q];
    for k in VISCOUS_ROWS {
        s[k] = s_nu;
    }
    for k in ENERGY_ROWS {
        s[k] = s_e;
    }
    for k in KINETIC_ROWS {
        s[k] = s_zeta;
    }
    Ok(s)
}

/// Multiple-relaxation-time collision, `f' = f - M^{-1} S M (f - f_eq)`.
#[inline]
pub fn relax_mrt(f: &[f64; Q], feq: &[f64; Q], basis: &MomentBasis, rates: &[f64; Q]) -> [f64; Q] {
    let mut diff = [0.0; Q];
    for k in 0..Q {
        diff[k] = f[k] - feq[k];
    }
    let mut mom = basis.to_moments(&diff);
    for (m, s) in mom.iter_mut().zip(rates.iter()) {
        *m *= s;
    }
    let corr = basis.from_moments(&mom);
    let mut out = [0.0; Q];
    for k in 0..Q {
        out[k] = f[k] - corr[k];
    }
    out
}

/// A collision model with all rates resolved for a concrete viscosity, ready
/// to apply per cell.
#[derive(Debug, Clone)]
pub enum Collider {
    Srt {
        omega: f64,
    },
    Trt {
        omega_plus: f64,
        omega_minus: f64,
    },
    Mrt {
        basis: Box<MomentBasis>,
        rates: [f64; Q],
    },
}

impl Collider {
    pub fn build(model: CollisionModel, nu: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Config(format!("viscosity nu = {nu} must be positive")));
        }
        let omega = omega_from_nu(nu);
        check_rate(omega, "omega")?;
        Ok(match model {
            CollisionModel::Srt => Collider::Srt { omega },
            CollisionModel::Trt { lambda } => Collider::Trt {
                omega_plus: omega,
                omega_minus: omega_minus(omega, lambda)?,
            },
            CollisionModel::Mrt { energy_ratio } => Collider::Mrt {
                basis: Box::new(MomentBasis::new()),
                rates: mrt_rates(omega, energy_ratio)?,
            },
        })
    }

    /// The rate the interpolation/extrapolation wall scheme should use:
    /// the SRT rate, `omega+` for TRT, `s_nu` for MRT.
    pub fn wall_omega(&self) -> f64 {
        match self {
            Collider::Srt { omega } => *omega,
            Collider::Trt { omega_plus, .. } => *omega_plus,
            Collider::Mrt { rates, .. } => rates[VISCOUS_ROWS[0]],
        }
    }

    #[inline]
    pub fn apply(&self, f: &[f64; Q], feq: &[f64; Q]) -> [f64; Q] {
        match self {
            Collider::Srt { omega } => relax_srt(f, feq, *omega),
            Collider::Trt {
                omega_plus,
                omega_minus,
            } => relax_trt(f, feq, *omega_plus, *omega_minus),
            Collider::Mrt { basis, rates } => relax_mrt(f, feq, basis, rates),
        }
    }
}
