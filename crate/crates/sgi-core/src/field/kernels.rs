//! Precomputed z-kernels of the field on the symmetry plane x = 0.
//!
//! On the plane the potential separates per wavenumber node into
//! (trig in y) × (Bessel kernel in z): with u± = k|z ± a|,
//!
//!   A(z)  = K₀(u₊) + p K₀(u₋)
//!   A′(z) = −k [sgn(z+a) K₁(u₊) + p sgn(z−a) K₁(u₋)]
//!   A″(z) = k² K₀ + k K₁/s  summed over both lines
//!   A‴(z) = sgn·(−k³K₁ − k²K₀/s − 2kK₁/s²)  summed over both lines
//!
//! so the z-dependence can be tabulated once per geometry and the time
//! dependence (the packet riding along y) enters only through per-node
//! cos/sin weights.  Two consumers:
//!
//! * [`AxisKernelTable`]: kernels evaluated exactly at the points of a fixed
//!   z-grid — the 1D propagation potential becomes one small mat-vec per
//!   split-operator factor.
//! * [`PlaneInterpTable`]: kernels on a fine uniform grid plus cubic Hermite
//!   interpolation (exact derivatives are stored, so the interpolant is
//!   O(h⁴) accurate) — classical trajectory integration probes |B| and ∇|B|
//!   at arbitrary (y, z) thousands of times per calibration iteration.

use crate::bessel;
use crate::error::{Result, SgiError};
use crate::field::FieldModel;
use crate::units::BOHR_PER_MICRON;

/// Per-node kernel derivative rows at fixed z-points, for the 1D potential.
#[derive(Debug, Clone)]
pub struct AxisKernelTable {
    k_nodes: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
    scale: f64,
    n_z: usize,
    /// A′ per node (row-major, node × z), derivative per μm.
    a1: Vec<f64>,
    /// A″ per node, per μm².
    a2: Vec<f64>,
}

impl AxisKernelTable {
    /// Tabulate at the given z-points (internal units).
    pub fn build(model: &FieldModel, z_points: &[f64]) -> Result<Self> {
        let (k_nodes, weights) = model.nodes_and_weights();
        let n_z = z_points.len();
        let mut a1 = vec![0.0; k_nodes.len() * n_z];
        let mut a2 = vec![0.0; k_nodes.len() * n_z];
        for (n, &k) in k_nodes.iter().enumerate() {
            let row1 = &mut a1[n * n_z..(n + 1) * n_z];
            let row2 = &mut a2[n * n_z..(n + 1) * n_z];
            for (i, &z_int) in z_points.iter().enumerate() {
                let z = z_int / BOHR_PER_MICRON;
                let (d1, d2, _, _) = kernel_derivs(model, k, z)?;
                row1[i] = d1;
                row2[i] = d2;
            }
        }
        Ok(Self {
            k_nodes: k_nodes.to_vec(),
            weights: weights.to_vec(),
            bias: model.profile.bias,
            scale: model.scale,
            n_z,
            a1,
            a2,
        })
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    /// Fill B_z(0, y, zᵢ) (magnetic a.u.) and ∂B_z/∂z (per internal length)
    /// for all tabulated z at once.
    pub fn fill_bz(&self, y: f64, bz: &mut [f64], dbz_dz: &mut [f64]) {
        assert_eq!(bz.len(), self.n_z);
        assert_eq!(dbz_dz.len(), self.n_z);
        let y_um = y / BOHR_PER_MICRON;
        bz.fill(0.0);
        dbz_dz.fill(0.0);
        for (n, (&k, &w)) in self.k_nodes.iter().zip(&self.weights).enumerate() {
            let c = w * (k * y_um).cos();
            if c == 0.0 {
                continue;
            }
            let row1 = &self.a1[n * self.n_z..(n + 1) * self.n_z];
            let row2 = &self.a2[n * self.n_z..(n + 1) * self.n_z];
            for i in 0..self.n_z {
                bz[i] += c * row1[i];
                dbz_dz[i] += c * row2[i];
            }
        }
        let f = self.scale;
        for i in 0..self.n_z {
            bz[i] = f * (self.bias - bz[i]);
            dbz_dz[i] = -f * dbz_dz[i] / BOHR_PER_MICRON;
        }
    }
}

/// |B| and its in-plane gradient from a Hermite-interpolated kernel table.
#[derive(Debug, Clone, Copy)]
pub struct PlaneProbe {
    /// |B| in magnetic atomic units.
    pub norm: f64,
    /// ∂|B|/∂y, per internal length.
    pub grad_y: f64,
    /// ∂|B|/∂z, per internal length.
    pub grad_z: f64,
}

/// Kernels on a fine uniform z-grid for arbitrary-z probing.
#[derive(Debug, Clone)]
pub struct PlaneInterpTable {
    k_nodes: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
    scale: f64,
    z0_um: f64,
    dz_um: f64,
    n_z: usize,
    a0: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
    a3: Vec<f64>,
}

impl PlaneInterpTable {
    /// Tabulate over [z_min, z_max] (internal units) with `n_z` points.
    pub fn build(model: &FieldModel, z_min: f64, z_max: f64, n_z: usize) -> Result<Self> {
        if n_z < 8 || !(z_max > z_min) {
            return Err(SgiError::Config(format!(
                "degenerate interpolation range [{z_min}, {z_max}] × {n_z}"
            )));
        }
        let (k_nodes, weights) = model.nodes_and_weights();
        let z0_um = z_min / BOHR_PER_MICRON;
        let dz_um = (z_max - z_min) / BOHR_PER_MICRON / (n_z - 1) as f64;
        let nn = k_nodes.len();
        let mut a0 = vec![0.0; nn * n_z];
        let mut a1 = vec![0.0; nn * n_z];
        let mut a2 = vec![0.0; nn * n_z];
        let mut a3 = vec![0.0; nn * n_z];
        for (n, &k) in k_nodes.iter().enumerate() {
            for i in 0..n_z {
                let z = z0_um + i as f64 * dz_um;
                let (d1, d2, d0, d3) = kernel_derivs(model, k, z)?;
                a0[n * n_z + i] = d0;
                a1[n * n_z + i] = d1;
                a2[n * n_z + i] = d2;
                a3[n * n_z + i] = d3;
            }
        }
        Ok(Self {
            k_nodes: k_nodes.to_vec(),
            weights: weights.to_vec(),
            bias: model.profile.bias,
            scale: model.scale,
            z0_um,
            dz_um,
            n_z,
            a0,
            a1,
            a2,
            a3,
        })
    }

    /// Same table, different overall field scale.
    pub fn with_scale(&self, scale: f64) -> Self {
        let mut t = self.clone();
        t.scale = scale;
        t
    }

    /// |B| and ∇|B| at (0, y, z), both in internal units.
    pub fn probe(&self, y: f64, z: f64) -> Result<PlaneProbe> {
        let y_um = y / BOHR_PER_MICRON;
        let z_um = z / BOHR_PER_MICRON;
        let pos = (z_um - self.z0_um) / self.dz_um;
        if !(pos >= 0.0 && pos <= (self.n_z - 1) as f64) {
            return Err(SgiError::Domain(format!(
                "z = {z_um} μm outside tabulated range"
            )));
        }
        let j = (pos as usize).min(self.n_z - 2);
        let t = pos - j as f64;
        let h = self.dz_um;

        // Cubic Hermite basis on [0, 1].
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let herm = |f0: f64, d0: f64, f1: f64, d1: f64| {
            h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
        };

        let mut by = 0.0;
        let mut bz_mod = 0.0;
        let mut dy_by = 0.0;
        let mut dz_by = 0.0;
        let mut dz_bz = 0.0;
        for (n, (&k, &w)) in self.k_nodes.iter().zip(&self.weights).enumerate() {
            let base = n * self.n_z + j;
            let a0l = self.a0[base];
            let a0r = self.a0[base + 1];
            let a1l = self.a1[base];
            let a1r = self.a1[base + 1];
            let a2l = self.a2[base];
            let a2r = self.a2[base + 1];
            let a3l = self.a3[base];
            let a3r = self.a3[base + 1];
            let va = herm(a0l, a1l, a0r, a1r);
            let vap = herm(a1l, a2l, a1r, a2r);
            let vapp = herm(a2l, a3l, a2r, a3r);
            let (sy, cy) = (k * y_um).sin_cos();
            by += w * k * sy * va;
            bz_mod -= w * cy * vap;
            dy_by += w * k * k * cy * va;
            dz_by += w * k * sy * vap;
            dz_bz -= w * cy * vapp;
        }
        let bz = self.bias + bz_mod;
        let norm_unscaled = (by * by + bz * bz).sqrt();
        if norm_unscaled == 0.0 {
            return Ok(PlaneProbe {
                norm: 0.0,
                grad_y: 0.0,
                grad_z: 0.0,
            });
        }
        // ∂_y B_z = ∂_z B_y for a curl-free field.
        let dy_norm = (by * dy_by + bz * dz_by) / norm_unscaled;
        let dz_norm = (by * dz_by + bz * dz_bz) / norm_unscaled;
        let f = self.scale;
        Ok(PlaneProbe {
            norm: f * norm_unscaled,
            grad_y: f * dy_norm / BOHR_PER_MICRON,
            grad_z: f * dz_norm / BOHR_PER_MICRON,
        })
    }
}

/// (A′, A″, A, A‴) for one wavenumber node at plane position z (μm);
/// derivatives are per μm.
fn kernel_derivs(model: &FieldModel, k: f64, z_um: f64) -> Result<(f64, f64, f64, f64)> {
    let a = model.half_gap_um();
    let p = model.parity.sign();
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    let mut d3 = 0.0;
    for (zc, q) in [(-a, 1.0), (a, p)] {
        let dz = z_um - zc;
        let s = dz.abs();
        if s == 0.0 {
            return Err(SgiError::Domain("kernel evaluated on a source line".into()));
        }
        let sgn = dz.signum();
        let u = k * s;
        let (k0v, k1v) = bessel::k0_k1(u)?;
        d0 += q * k0v;
        d1 += q * sgn * (-k * k1v);
        d2 += q * (k * k * k0v + k * k1v / s);
        d3 += q * sgn * (-k * k * k * k1v - k * k * k0v / s - 2.0 * k * k1v / (s * s));
    }
    Ok((d1, d2, d0, d3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldProfile, LineParity};
    use crate::units::BOHR_PER_MICRON;

    fn model(parity: LineParity) -> FieldModel {
        FieldModel::new(
            FieldProfile::default(),
            parity,
            0.71919 * BOHR_PER_MICRON,
            3.0e-4,
        )
        .unwrap()
    }

    #[test]
    fn axis_table_matches_exact_field() {
        for parity in [LineParity::Aligned, LineParity::Opposed] {
            let m = model(parity);
            let zs: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.02 * BOHR_PER_MICRON).collect();
            let table = AxisKernelTable::build(&m, &zs).unwrap();
            let mut bz = vec![0.0; zs.len()];
            let mut dbz = vec![0.0; zs.len()];
            let y = -3.7 * BOHR_PER_MICRON;
            table.fill_bz(y, &mut bz, &mut dbz);
            for (i, &z) in zs.iter().enumerate() {
                let exact = m.field_at([0.0, y, z]).unwrap();
                assert!(
                    (bz[i] - exact[2]).abs() <= 1e-12 * exact[2].abs(),
                    "B_z mismatch at z index {i}: {} vs {}",
                    bz[i],
                    exact[2]
                );
                let (_, jac) = m.field_and_jacobian([0.0, y, z]).unwrap();
                assert!(
                    (dbz[i] - jac[2][2]).abs() <= 1e-10 * jac[2][2].abs().max(1e-30),
                    "∂B_z/∂z mismatch at z index {i}: {} vs {}",
                    dbz[i],
                    jac[2][2]
                );
            }
        }
    }

    #[test]
    fn interp_table_matches_exact_norm_and_gradient() {
        let m = model(LineParity::Aligned);
        let zr = 0.3 * BOHR_PER_MICRON;
        let table = PlaneInterpTable::build(&m, -zr, zr, 1024).unwrap();
        for (y_um, z_um) in [(-7.3, 0.11), (-2.0, -0.22), (0.4, 0.0), (5.9, 0.28)] {
            let y = y_um * BOHR_PER_MICRON;
            let z = z_um * BOHR_PER_MICRON;
            let probe = table.probe(y, z).unwrap();
            let (norm, grad) = m.norm_and_gradient([0.0, y, z]).unwrap();
            assert!(
                ((probe.norm - norm) / norm).abs() < 1e-11,
                "norm at ({y_um}, {z_um}): {} vs {}",
                probe.norm,
                norm
            );
            let gscale = (grad[1] * grad[1] + grad[2] * grad[2]).sqrt().max(1e-300);
            assert!(
                ((probe.grad_y - grad[1]) / gscale).abs() < 1e-8,
                "grad_y at ({y_um}, {z_um}): {} vs {}",
                probe.grad_y,
                grad[1]
            );
            assert!(
                ((probe.grad_z - grad[2]) / gscale).abs() < 1e-8,
                "grad_z at ({y_um}, {z_um}): {} vs {}",
                probe.grad_z,
                grad[2]
            );
        }
    }

    #[test]
    fn probe_rejects_out_of_range() {
        let m = model(LineParity::Aligned);
        let zr = 0.1 * BOHR_PER_MICRON;
        let table = PlaneInterpTable::build(&m, -zr, zr, 64).unwrap();
        assert!(table.probe(0.0, 0.2 * BOHR_PER_MICRON).is_err());
    }
}
