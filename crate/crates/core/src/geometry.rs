//! Periodic sphere-pack domains: voxelization into fluid/solid flags and
//! exact wall distances by ray-sphere intersection.
//!
//! Cell `i` spans `[i, i+1)` along each axis, so cell centers sit at
//! half-integer coordinates. A plane wall at an integer coordinate therefore
//! lands exactly half-way between two cell centers (`q = 0.5`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::VELOCITIES;

pub const FLUID: u8 = 0;
pub const SOLID: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: [f64; 3],
    pub radius: f64,
}

/// A periodic box with spheres; lengths are in cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePack {
    pub size: [usize; 3],
    pub periodic: [bool; 3],
    pub spheres: Vec<Sphere>,
}

/// Per-cell fluid/solid classification.
#[derive(Debug, Clone)]
pub struct FlagField {
    pub size: [usize; 3],
    flags: Vec<u8>,
}

impl FlagField {
    #[inline]
    pub fn n_cells(&self) -> usize {
        self.size[0] * self.size[1] * self.size[2]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.size[0] * (y + self.size[1] * z)
    }

    #[inline]
    pub fn coords(&self, cell: usize) -> [usize; 3] {
        let x = cell % self.size[0];
        let y = (cell / self.size[0]) % self.size[1];
        let z = cell / (self.size[0] * self.size[1]);
        [x, y, z]
    }

    #[inline]
    pub fn is_solid(&self, cell: usize) -> bool {
        self.flags[cell] == SOLID
    }

    #[inline]
    pub fn is_fluid(&self, cell: usize) -> bool {
        self.flags[cell] == FLUID
    }

    pub fn flags(&self) -> &[u8] {
        &self.flags
    }

    pub fn n_fluid(&self) -> usize {
        self.flags.iter().filter(|&&f| f == FLUID).count()
    }

    pub fn solid_fraction(&self) -> f64 {
        1.0 - self.n_fluid() as f64 / self.n_cells() as f64
    }

    /// Neighbor cell index along direction `k`, wrapping periodic axes.
    /// `None` when the step would leave the domain through a non-periodic
    /// face.
    pub fn neighbor_wrapped(&self, cell: usize, k: usize, periodic: [bool; 3]) -> Option<usize> {
        let [x, y, z] = self.coords(cell);
        let e = VELOCITIES[k];
        let pos = [x as i64, y as i64, z as i64];
        let mut out = [0usize; 3];
        for (a, o) in out.iter_mut().enumerate() {
            let mut p = pos[a] + e[a] as i64;
            let n = self.size[a] as i64;
            if p < 0 || p >= n {
                if !periodic[a] {
                    return None;
                }
                p = p.rem_euclid(n);
            }
            *o = p as usize;
        }
        Some(self.index(out[0], out[1], out[2]))
    }
}

impl SpherePack {
    /// Center coordinate of a cell.
    #[inline]
    pub fn cell_center(&self, x: usize, y: usize, z: usize) -> [f64; 3] {
        [x as f64 + 0.5, y as f64 + 0.5, z as f64 + 0.5]
    }

    /// Distance from a point to the nearest periodic image of a sphere center.
    fn image_distance2(&self, p: [f64; 3], c: [f64; 3]) -> f64 {
        let mut d2 = 0.0;
        for a in 0..3 {
            let mut d = p[a] - c[a];
            if self.periodic[a] {
                let l = self.size[a] as f64;
                d -= l * (d / l).round();
            }
            d2 += d * d;
        }
        d2
    }

    /// True if the point lies inside (or exactly on the surface of) any
    /// sphere image.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        self.spheres
            .iter()
            .any(|s| self.image_distance2(p, s.center) <= s.radius * s.radius)
    }

    /// Classify every cell center; ties on the surface count as solid.
    pub fn voxelize(&self) -> FlagField {
        let [nx, ny, nz] = self.size;
        let mut flags = vec![FLUID; nx * ny * nz];
        let mut idx = 0;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    if self.contains(self.cell_center(x, y, z)) {
                        flags[idx] = SOLID;
                    }
                    idx += 1;
                }
            }
        }
        FlagField {
            size: self.size,
            flags,
        }
    }

    /// Normalized wall distance `q` for the link from the fluid cell at
    /// `(x, y, z)` along direction `k` whose neighbor cell is solid: the
    /// smallest positive ray-sphere intersection parameter over all periodic
    /// sphere images, in `(0, 1]`. `None` when voxelization and the exact
    /// surface disagree on a grazing cut.
    pub fn wall_distance(&self, cell: [usize; 3], k: usize) -> Option<f64> {
        let p = self.cell_center(cell[0], cell[1], cell[2]);
        let e = VELOCITIES[k];
        let d = [e[0] as f64, e[1] as f64, e[2] as f64];
        let a: f64 = d.iter().map(|v| v * v).sum();

        let mut best: Option<f64> = None;
        let offsets = |periodic: bool| -> &'static [f64] {
            if periodic {
                &[-1.0, 0.0, 1.0]
            } else {
                &[0.0]
            }
        };
        for s in &self.spheres {
            for ox in offsets(self.periodic[0]) {
                for oy in offsets(self.periodic[1]) {
                    for oz in offsets(self.periodic[2]) {
                        let c = [
                            s.center[0] + ox * self.size[0] as f64,
                            s.center[1] + oy * self.size[1] as f64,
                            s.center[2] + oz * self.size[2] as f64,
                        ];
                        let pc = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
                        let b = 2.0 * (d[0] * pc[0] + d[1] * pc[1] + d[2] * pc[2]);
                        let c0 = pc.iter().map(|v| v * v).sum::<f64>() - s.radius * s.radius;
                        let disc = b * b - 4.0 * a * c0;
                        if disc < 0.0 {
                            continue;
                        }
                        let sq = disc.sqrt();
                        for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                            if t >= 1e-12 && t <= 1.0 + 1e-9 {
                                let t = t.min(1.0);
                                if best.is_none_or(|cur| t < cur) {
                                    best = Some(t);
                                }
                            }
                        }
                    }
                }
            }
        }
        best
    }

    /// Exact solid volume fraction after voxelization at infinite resolution:
    /// one sphere per cubic cell of edge `l`, overlaps with the six axis
    /// neighbors removed.
    pub fn voxel_fraction(&self) -> f64 {
        self.voxelize().solid_fraction()
    }
}

/// Analytic solid volume of a periodic simple-cubic sphere arrangement per
/// unit cell: the sphere volume minus the six lens overlaps with its axis
/// neighbors (each lens is two equal spherical caps of height `r - l/2`).
/// Valid while caps along different axes do not intersect, i.e. `r <= l/sqrt2`.
pub fn solid_volume_analytic(r: f64, l: f64) -> Result<f64> {
    if r * 2.0_f64.sqrt() > l * (1.0 + 1e-12) {
        return Err(Error::Geometry(format!(
            "radius {r} exceeds l/sqrt(2) = {}; cap overlaps not supported",
            l / 2.0_f64.sqrt()
        )));
    }
    let sphere = 4.0 / 3.0 * std::f64::consts::PI * r * r * r;
    let h = (r - 0.5 * l).max(0.0);
    let cap = std::f64::consts::PI / 3.0 * h * h * (3.0 * r - h);
    Ok(sphere - 6.0 * cap)
}

/// Analytic solid volume fraction `chi(l)` for a sphere of radius `r` in a
/// periodic cube of edge `l`.
pub fn solid_fraction_analytic(r: f64, l: f64) -> Result<f64> {
    Ok(solid_volume_analytic(r, l)? / (l * l * l))
}

/// Cubic REV edge length `l` such that one sphere of radius `r` occupies the
/// solid volume fraction `chi`, solved by bisection to 1e-12 relative.
pub fn domain_size_for_fraction(r: f64, chi: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Geometry(format!("radius {r} must be positive")));
    }
    let lo = 2.0_f64.sqrt() * r;
    let chi_max = solid_fraction_analytic(r, lo)?;
    if !(chi > 0.0 && chi < chi_max) {
        return Err(Error::Geometry(format!(
            "solid fraction {chi} outside reachable range (0, {chi_max:.6})"
        )));
    }
    // Dilute estimate is exact for chi <= pi/6 and an upper bound otherwise.
    let mut hi = r * (4.0 * std::f64::consts::PI / (3.0 * chi)).powf(1.0 / 3.0);
    if hi < 2.0 * r {
        hi = 2.0 * r;
    }
    let mut lo = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if solid_fraction_analytic(r, mid)? > chi {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / hi < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A cubic representative elementary volume holding a single sphere at the
/// requested solid fraction. The edge length is rounded to whole cells and
/// the radius adjusted so the fraction stays exact; the sphere center can be
/// shifted streamwise (axis 0) for displacement studies.
pub fn single_sphere_rev(r_target: f64, chi: f64, shift: f64) -> Result<SpherePack> {
    let s = domain_size_for_fraction(1.0, chi)?;
    let l = (s * r_target).round().max(4.0);
    let r = l / s;
    let c = 0.5 * l;
    Ok(SpherePack {
        size: [l as usize; 3],
        periodic: [true; 3],
        spheres: vec![Sphere {
            center: [c + shift, c, c],
            radius: r,
        }],
    })
}

/// On-disk pack description: either an explicit sphere list or a generated
/// single-sphere REV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackFile {
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default, rename = "sphere")]
    pub spheres: Vec<Sphere>,
    #[serde(default)]
    pub generate: Option<GenerateSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub size: [usize; 3],
    #[serde(default = "default_periodic")]
    pub periodic: [bool; 3],
}

fn default_periodic() -> [bool; 3] {
    [true; 3]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenerateSpec {
    SingleSphereRev {
        radius: f64,
        solid_fraction: f64,
        #[serde(default)]
        shift: f64,
    },
}

impl PackFile {
    pub fn parse(text: &str) -> Result<SpherePack> {
        let file: PackFile =
            toml::from_str(text).map_err(|e| Error::Format(format!("pack file: {e}")))?;
        file.into_pack()
    }

    pub fn into_pack(self) -> Result<SpherePack> {
        match (self.domain, self.generate) {
            (Some(domain), None) => {
                if domain.size.iter().any(|&n| n < 2) {
                    return Err(Error::Geometry("domain must be at least 2 cells".into()));
                }
                Ok(SpherePack {
                    size: domain.size,
                    periodic: domain.periodic,
                    spheres: self.spheres,
                })
            }
            (None, Some(GenerateSpec::SingleSphereRev {
                radius,
                solid_fraction,
                shift,
            })) => single_sphere_rev(radius, solid_fraction, shift),
            (Some(_), Some(_)) => Err(Error::Format(
                "pack file has both [domain] and [generate]; pick one".into(),
            )),
            (None, None) => Err(Error::Format(
                "pack file needs a [domain] or a [generate] section".into(),
            )),
        }
    }
}
