//! Potential terms the split-operator propagator can apply.
//!
//! A [`PotentialSource`] is asked once per factor (`prepare`, at that
//! factor's absolute time) and then sampled at every grid point.  Samples
//! are either a Zeeman term −μ σ·B or a spin-independent scalar potential;
//! both carry the squared derivative norm that feeds the gradient correction
//! of the fourth-order splitting.

use crate::error::{Result, SgiError};
use crate::field::{FieldModel, QuadraticFieldPatch};
use crate::field::kernels::AxisKernelTable;
use crate::grid::{Grid, X, Y, Z};
use crate::phys::PhysParams;
use crate::reduce::chunked_sum_array;
use crate::spinor::SpinorField;

/// Potential at one grid point.
#[derive(Debug, Clone, Copy)]
pub enum PotSample {
    /// Zeeman coupling −μ σ·B; `j2` is Σᵢⱼ (∂ᵢBⱼ)² in internal units.
    Zeeman { b: [f64; 3], j2: f64 },
    /// Spin-independent potential V; `g2` is |∇V|².
    Scalar { v: f64, g2: f64 },
}

/// A potential the propagator can sample point by point.
///
/// `prepare` is always called before the first `sample` of a factor and runs
/// exclusively; `sample` runs from many threads and must be pure.
pub trait PotentialSource {
    /// Refresh any cached data for the potential factor at absolute time `t`.
    fn prepare(&mut self, t: f64, field: &SpinorField) -> Result<()>;

    /// Potential at flat index `flat`, grid coordinates `r` (co-moving frame).
    fn sample(&self, flat: usize, r: [f64; 3]) -> PotSample;
}

/// Closure-backed scalar potential, used to validate the propagator against
/// analytically solvable problems.
pub struct ScalarTestSource<V, G> {
    v: V,
    g2: G,
}

impl<V, G> ScalarTestSource<V, G>
where
    V: Fn([f64; 3]) -> f64 + Sync,
    G: Fn([f64; 3]) -> f64 + Sync,
{
    /// Build from V(r) and |∇V|²(r).
    pub fn new(v: V, g2: G) -> Self {
        Self { v, g2 }
    }
}

impl<V, G> PotentialSource for ScalarTestSource<V, G>
where
    V: Fn([f64; 3]) -> f64 + Sync,
    G: Fn([f64; 3]) -> f64 + Sync,
{
    fn prepare(&mut self, _t: f64, _field: &SpinorField) -> Result<()> {
        Ok(())
    }

    fn sample(&self, _flat: usize, r: [f64; 3]) -> PotSample {
        PotSample::Scalar {
            v: (self.v)(r),
            g2: (self.g2)(r),
        }
    }
}

/// V = 0: free flight.
pub fn zero_potential(
) -> ScalarTestSource<impl Fn([f64; 3]) -> f64 + Sync, impl Fn([f64; 3]) -> f64 + Sync> {
    ScalarTestSource::new(|_| 0.0, |_| 0.0)
}

/// Isotropic harmonic well V = ½ m ω² |r|² (active axes only, since inert
/// axes report coordinate 0).
pub fn harmonic_potential(
    mass: f64,
    omega: f64,
) -> ScalarTestSource<impl Fn([f64; 3]) -> f64 + Sync, impl Fn([f64; 3]) -> f64 + Sync> {
    let k = mass * omega * omega;
    ScalarTestSource::new(
        move |r| 0.5 * k * (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]),
        move |r| k * k * (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]),
    )
}

/// 1-D interferometer potential: B_z(0, y_beam(t), z) on the grid's z-line.
///
/// The z-kernels are tabulated once; each `prepare` reduces to one small
/// mat-vec over the wavenumber nodes.
pub struct Axis1dSource {
    phys: PhysParams,
    table: AxisKernelTable,
    bz: Vec<f64>,
    jzz: Vec<f64>,
}

impl Axis1dSource {
    pub fn new(model: &FieldModel, phys: &PhysParams, grid: &Grid) -> Result<Self> {
        if grid.is_active(X) || grid.is_active(Y) || !grid.is_active(Z) {
            return Err(SgiError::Config(
                "the 1-D axis potential needs a z-only grid".into(),
            ));
        }
        let z = grid.axis_coords(Z);
        let table = AxisKernelTable::build(model, &z)?;
        let n = z.len();
        Ok(Self {
            phys: *phys,
            table,
            bz: vec![0.0; n],
            jzz: vec![0.0; n],
        })
    }
}

impl PotentialSource for Axis1dSource {
    fn prepare(&mut self, t: f64, _field: &SpinorField) -> Result<()> {
        let y = self.phys.y_lab(t);
        let Self {
            table, bz, jzz, ..
        } = self;
        table.fill_bz(y, bz, jzz);
        Ok(())
    }

    fn sample(&self, flat: usize, _r: [f64; 3]) -> PotSample {
        let g = self.jzz[flat];
        PotSample::Zeeman {
            b: [0.0, 0.0, self.bz[flat]],
            j2: g * g,
        }
    }
}

/// Full 3-D field sampled through per-component quadratic expansions.
///
/// Each factor rebuilds one field patch around the probability centroid of
/// every spin component (in laboratory coordinates, so the beam's y-motion
/// is included); a grid point then reads the patch whose centroid is nearest
/// in z.  Points beyond a patch's validity ball occur only where the packet
/// density is negligible and evaluate as a smooth extrapolation.
pub struct SpinFieldSource {
    model: FieldModel,
    phys: PhysParams,
    validity_radius: f64,
    centroid_time: Option<f64>,
    centroid_up: [f64; 3],
    centroid_dn: [f64; 3],
    z_mid: f64,
    up_is_upper: bool,
    y_offset: f64,
    patches: Option<(QuadraticFieldPatch, QuadraticFieldPatch)>,
}

impl SpinFieldSource {
    pub fn new(model: FieldModel, phys: &PhysParams, validity_radius: f64) -> Result<Self> {
        if !(validity_radius > 0.0) {
            return Err(SgiError::Config(
                "patch validity radius must be positive".into(),
            ));
        }
        Ok(Self {
            model,
            phys: *phys,
            validity_radius,
            centroid_time: None,
            centroid_up: [0.0; 3],
            centroid_dn: [0.0; 3],
            z_mid: 0.0,
            up_is_upper: true,
            y_offset: 0.0,
            patches: None,
        })
    }

    /// Probability centroids of the two spin components in grid coordinates.
    /// A component holding less than 1e-12 of the total weight borrows the
    /// other's centroid.
    fn component_centroids(field: &SpinorField) -> ([f64; 3], [f64; 3], f64, f64) {
        let grid = field.grid;
        let moments = |data: &[num_complex::Complex64]| -> [f64; 4] {
            chunked_sum_array(data, |off, chunk: &[num_complex::Complex64]| {
                let mut acc = [0.0; 4];
                for (p, amp) in chunk.iter().enumerate() {
                    let w = amp.norm_sqr();
                    if w == 0.0 {
                        continue;
                    }
                    let (i, j, k) = grid.unindex(off + p);
                    acc[0] += w;
                    acc[1] += w * grid.coord(X, i);
                    acc[2] += w * grid.coord(Y, j);
                    acc[3] += w * grid.coord(Z, k);
                }
                acc
            })
        };
        let mu = moments(&field.up);
        let md = moments(&field.dn);
        let total = mu[0] + md[0];
        let centroid = |m: &[f64; 4], other: &[f64; 4]| -> [f64; 3] {
            let m = if m[0] > 1e-12 * total { m } else { other };
            if m[0] > 0.0 {
                [m[1] / m[0], m[2] / m[0], m[3] / m[0]]
            } else {
                [0.0; 3]
            }
        };
        (centroid(&mu, &md), centroid(&md, &mu), mu[0], md[0])
    }
}

impl PotentialSource for SpinFieldSource {
    fn prepare(&mut self, t: f64, field: &SpinorField) -> Result<()> {
        // Centroids move a negligible fraction of the patch radius within one
        // step, so they are refreshed once per step (the three factors of a
        // step see the same `field.time`); the patches themselves are rebuilt
        // every factor because the beam advances in y between factors.
        if self.centroid_time != Some(field.time) {
            let (cu, cd, _, _) = Self::component_centroids(field);
            self.centroid_up = cu;
            self.centroid_dn = cd;
            self.z_mid = 0.5 * (cu[2] + cd[2]);
            self.up_is_upper = cu[2] >= cd[2];
            self.centroid_time = Some(field.time);
        }
        self.y_offset = self.phys.y_lab(t);
        let lab = |c: [f64; 3]| [c[0], c[1] + self.y_offset, c[2]];
        let up = QuadraticFieldPatch::build(&self.model, lab(self.centroid_up), self.validity_radius)?;
        let dn = QuadraticFieldPatch::build(&self.model, lab(self.centroid_dn), self.validity_radius)?;
        self.patches = Some((up, dn));
        Ok(())
    }

    fn sample(&self, _flat: usize, r: [f64; 3]) -> PotSample {
        let (pu, pd) = self
            .patches
            .as_ref()
            .expect("prepare runs before any sample");
        let upper = r[2] >= self.z_mid;
        let patch = if upper == self.up_is_upper { pu } else { pd };
        let r_lab = [r[0], r[1] + self.y_offset, r[2]];
        let (b, j2) = patch.field_and_grad_norm_sq(r_lab);
        PotSample::Zeeman { b, j2 }
    }
}
