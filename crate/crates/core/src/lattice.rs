//! The D3Q19 velocity set, equilibrium distribution and macroscopic moments.
//!
//! Everything in this module works in lattice units (`dx = dt = 1`), so the
//! lattice sound speed is `c_s^2 = 1/3`. Physical scaling happens at
//! configuration and reporting boundaries, never here.

use crate::error::{Error, Result};

/// Number of discrete velocities.
pub const Q: usize = 19;

/// Mean density of the incompressible model; populations carry `rho0 + drho`.
pub const RHO0: f64 = 1.0;

/// Lattice sound speed squared.
pub const CS2: f64 = 1.0 / 3.0;

/// Lattice sound speed.
pub const CS: f64 = 0.577_350_269_189_625_8; // sqrt(1/3)

/// Discrete velocities. Index 0 is the rest direction, 1-6 the axis
/// directions, 7-18 the face diagonals. Opposite directions are adjacent
/// pairs so `OPPOSITE` stays trivial.
pub const VELOCITIES: [[i32; 3]; Q] = [
    [0, 0, 0],
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
    [1, 1, 0],
    [-1, -1, 0],
    [1, -1, 0],
    [-1, 1, 0],
    [1, 0, 1],
    [-1, 0, -1],
    [1, 0, -1],
    [-1, 0, 1],
    [0, 1, 1],
    [0, -1, -1],
    [0, 1, -1],
    [0, -1, 1],
];

/// Quadrature weights, normalized to unity.
pub const WEIGHTS: [f64; Q] = [
    1.0 / 3.0,
    1.0 / 18.0,
    1.0 / 18.0,
    1.0 / 18.0,
    1.0 / 18.0,
    1.0 / 18.0,
    1.0 / 18.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
    1.0 / 36.0,
];

/// Index of the diametrically opposite direction, `e[OPPOSITE[k]] = -e[k]`.
pub const OPPOSITE: [usize; Q] = [
    0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13, 16, 15, 18, 17,
];

/// Macroscopic density and velocity of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    pub rho: f64,
    pub u: [f64; 3],
}

#[inline]
fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Incompressible equilibrium populations for the given density and velocity,
/// without the stability guard. Only for use where the caller already bounds
/// the velocity (e.g. inside the collision kernel, which is validated at the
/// observation cadence).
#[inline]
pub(crate) fn equilibrium_unchecked(rho: f64, u: [f64; 3]) -> [f64; Q] {
    let uu = dot3(u, u);
    let mut f = [0.0; Q];
    for k in 0..Q {
        let e = VELOCITIES[k];
        let eu = e[0] as f64 * u[0] + e[1] as f64 * u[1] + e[2] as f64 * u[2];
        f[k] = WEIGHTS[k] * (rho + RHO0 * (3.0 * eu + 4.5 * eu * eu - 1.5 * uu));
    }
    f
}

/// Incompressible equilibrium distribution,
/// `f_k = w_k { rho + rho0 [ 3 e.u + 9/2 (e.u)^2 - 3/2 u.u ] }`.
///
/// Fails when `|u| >= c_s`, which signals an under-resolved flow.
pub fn equilibrium(rho: f64, u: [f64; 3]) -> Result<[f64; Q]> {
    if !(rho > 0.0) {
        return Err(Error::Config(format!("density must be positive, got {rho}")));
    }
    let mag = dot3(u, u).sqrt();
    if !(mag < CS) {
        return Err(Error::VelocityLimit { mag, cs: CS });
    }
    Ok(equilibrium_unchecked(rho, u))
}

/// Zeroth and first moments: `rho = sum f_k`, `u = (1/rho0) sum e_k f_k`.
///
/// The velocity moment divides by the constant `rho0`, not by `rho`; this is
/// the incompressible model's definition.
#[inline]
pub fn moments(f: &[f64; Q]) -> MacroState {
    let mut rho = 0.0;
    let mut u = [0.0; 3];
    for k in 0..Q {
        rho += f[k];
        let e = VELOCITIES[k];
        u[0] += e[0] as f64 * f[k];
        u[1] += e[1] as f64 * f[k];
        u[2] += e[2] as f64 * f[k];
    }
    u[0] /= RHO0;
    u[1] /= RHO0;
    u[2] /= RHO0;
    MacroState { rho, u }
}

/// Double-buffered population storage: a read level (time `t_n`) and a write
/// level (time `t_{n+1}`). Layout is cell-major: entry `(k, cell)` lives at
/// `cell * Q + k`, so one cell's populations are contiguous and the write
/// level splits into disjoint per-cell chunks for data-parallel updates.
#[derive(Debug, Clone)]
pub struct DistributionField {
    n_cells: usize,
    curr: Vec<f64>,
    next: Vec<f64>,
}

impl DistributionField {
    pub fn new(n_cells: usize) -> Self {
        Self {
            n_cells,
            curr: vec![0.0; n_cells * Q],
            next: vec![0.0; n_cells * Q],
        }
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Read level `t_n`.
    #[inline]
    pub fn curr(&self) -> &[f64] {
        &self.curr
    }

    /// Write level `t_{n+1}`.
    #[inline]
    pub fn next_mut(&mut self) -> &mut [f64] {
        &mut self.next
    }

    /// Both levels at once, for fused read/write passes.
    #[inline]
    pub fn levels_mut(&mut self) -> (&[f64], &mut [f64]) {
        (&self.curr, &mut self.next)
    }

    /// Promote the write level to the new read level.
    #[inline]
    pub fn swap(&mut self) {
        std::mem::swap(&mut self.curr, &mut self.next);
    }

    #[inline]
    pub fn get(&self, k: usize, cell: usize) -> f64 {
        self.curr[k * self.n_cells + cell]
    }

    #[inline]
    pub fn set(&mut self, k: usize, cell: usize, value: f64) {
        self.curr[k * self.n_cells + cell] = value;
    }

    /// All 19 populations of one cell on the read level.
    #[inline]
    pub fn cell(&self, cell: usize) -> [f64; Q] {
        let mut f = [0.0; Q];
        for k in 0..Q {
            f[k] = self.curr[k * self.n_cells + cell];
        }
        f
    }

    /// Store all 19 populations of one cell on the read level.
    pub fn set_cell(&mut self, cell: usize, f: &[f64; Q]) {
        for k in 0..Q {
            self.curr[k * self.n_cells + cell] = f[k];
        }
    }

    /// True if every entry of the read level is finite.
    pub fn is_finite(&self) -> bool {
        self.curr.iter().all(|v| v.is_finite())
    }
}
