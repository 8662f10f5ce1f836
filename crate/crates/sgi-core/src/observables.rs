//! Spin and spatial observables of a spinor field.
//!
//! The headline quantity is the spin coherence C = |⟨σ⟩|², which is 1 for a
//! spin state that factorises from the spatial wave function and decreases
//! when the two spin components stop overlapping.  It is computed two ways:
//! from the three Pauli expectation values, and independently from the
//! purity of the reduced 2×2 spin density matrix, C = 2 tr ρ² − 1; the two
//! agree identically for exact arithmetic, so their difference is a direct
//! probe of reduction errors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{X, Y, Z};
use crate::reduce::{chunked_sum_array, chunked_sum_c64};
use crate::spinor::SpinorField;

/// Snapshot of every logged observable at one instant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObservableRecord {
    /// Internal time.
    pub time: f64,
    /// Total probability ∫(|ψ↑|² + |ψ↓|²) dV.
    pub norm: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    /// C = sx² + sy² + sz² of the normalised state.
    pub coherence: f64,
    /// C recomputed from the spin density matrix, 2 tr ρ² − 1.
    pub coherence_purity: f64,
    pub norm_up: f64,
    pub norm_dn: f64,
    pub centroid_up: [f64; 3],
    pub centroid_dn: [f64; 3],
    /// √(⟨z²⟩ − ⟨z⟩²) per spin component.
    pub width_z_up: f64,
    pub width_z_dn: f64,
    /// Probability fraction inside the grid-edge guard band.
    pub edge_fraction: f64,
}

impl ObservableRecord {
    pub fn measure(field: &SpinorField) -> Self {
        let grid = field.grid;
        let dv = grid.cell_volume();

        // Per-component moments: [n, Σx, Σy, Σz, Σz²] weighted by |ψ|².
        let moments = |data: &[Complex64]| -> [f64; 5] {
            let mut m = chunked_sum_array(data, |off, chunk: &[Complex64]| {
                let mut acc = [0.0; 5];
                for (p, amp) in chunk.iter().enumerate() {
                    let w = amp.norm_sqr();
                    if w == 0.0 {
                        continue;
                    }
                    let (i, j, k) = grid.unindex(off + p);
                    let x = grid.coord(X, i);
                    let y = grid.coord(Y, j);
                    let z = grid.coord(Z, k);
                    acc[0] += w;
                    acc[1] += w * x;
                    acc[2] += w * y;
                    acc[3] += w * z;
                    acc[4] += w * z * z;
                }
                acc
            });
            for v in &mut m {
                *v *= dv;
            }
            m
        };
        let mu = moments(&field.up);
        let md = moments(&field.dn);

        let overlap = chunked_sum_c64(&field.up, |off, chunk| {
            chunk
                .iter()
                .zip(&field.dn[off..off + chunk.len()])
                .map(|(u, d)| u.conj() * d)
                .sum()
        }) * dv;

        let norm_up = mu[0];
        let norm_dn = md[0];
        let norm = norm_up + norm_dn;
        let sx = 2.0 * overlap.re / norm;
        let sy = 2.0 * overlap.im / norm;
        let sz = (norm_up - norm_dn) / norm;
        let coherence = sx * sx + sy * sy + sz * sz;

        // Purity route: ρ = [[n↑, ov*], [ov, n↓]]/N,
        // tr ρ² = (n↑² + n↓² + 2|ov|²)/N².
        let tr_rho_sq =
            (norm_up * norm_up + norm_dn * norm_dn + 2.0 * overlap.norm_sqr()) / (norm * norm);
        let coherence_purity = 2.0 * tr_rho_sq - 1.0;

        let centroid = |m: &[f64; 5]| -> [f64; 3] {
            if m[0] > 0.0 {
                [m[1] / m[0], m[2] / m[0], m[3] / m[0]]
            } else {
                [0.0; 3]
            }
        };
        let width_z = |m: &[f64; 5]| -> f64 {
            if m[0] > 0.0 {
                let mean = m[3] / m[0];
                (m[4] / m[0] - mean * mean).max(0.0).sqrt()
            } else {
                0.0
            }
        };

        Self {
            time: field.time,
            norm,
            sx,
            sy,
            sz,
            coherence,
            coherence_purity,
            norm_up,
            norm_dn,
            centroid_up: centroid(&mu),
            centroid_dn: centroid(&md),
            width_z_up: width_z(&mu),
            width_z_dn: width_z(&md),
            edge_fraction: field.boundary_fraction(),
        }
    }

    /// Spin-component separation ⟨z⟩↑ − ⟨z⟩↓.
    pub fn separation_z(&self) -> f64 {
        self.centroid_up[2] - self.centroid_dn[2]
    }

    /// Longitudinal (y) centroid separation between spin components.
    pub fn separation_y(&self) -> f64 {
        self.centroid_up[1] - self.centroid_dn[1]
    }

    /// |C_pauli − C_purity|, an internal consistency probe.
    pub fn coherence_route_mismatch(&self) -> f64 {
        (self.coherence - self.coherence_purity).abs()
    }
}
