//! Two-component wave functions on a grid.

use num_complex::Complex64;

use crate::error::{Result, SgiError};
use crate::grid::{Grid, EDGE_GUARD};
use crate::reduce::{chunked_sum_c64, chunked_sum_f64};

/// Spinor wave function ψ = (ψ↑, ψ↓) sampled on a [`Grid`].
///
/// `time` is the reference time of the co-moving frame; the propagator
/// advances it together with the amplitudes.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub grid: Grid,
    pub up: Vec<Complex64>,
    pub dn: Vec<Complex64>,
    pub time: f64,
}

impl SpinorField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            up: vec![Complex64::new(0.0, 0.0); n],
            dn: vec![Complex64::new(0.0, 0.0); n],
            time: 0.0,
        }
    }

    /// Normalised Gaussian packet of width `delta` centred at `center`
    /// (active axes only), with spin amplitudes `(c_up, c_dn)`.
    ///
    /// In the co-moving frame the packet carries no plane-wave factor; the
    /// longitudinal momentum is absorbed by the frame transformation.
    pub fn gaussian_packet(
        grid: Grid,
        delta: f64,
        center: [f64; 3],
        c_up: Complex64,
        c_dn: Complex64,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(SgiError::Config("packet width must be positive".into()));
        }
        let spin_norm = (c_up.norm_sqr() + c_dn.norm_sqr()).sqrt();
        if spin_norm == 0.0 {
            return Err(SgiError::Config("spin amplitudes are both zero".into()));
        }
        let mut f = Self::zeros(grid);
        let (cu, cd) = (c_up / spin_norm, c_dn / spin_norm);
        for flat in 0..grid.len() {
            let (i, j, k) = grid.unindex(flat);
            let mut q = 0.0;
            for (ax, &idx) in [i, j, k].iter().enumerate() {
                if grid.is_active(ax) {
                    let r = grid.coord(ax, idx) - center[ax];
                    q += r * r;
                }
            }
            let amp = Complex64::new((-q / (2.0 * delta * delta)).exp(), 0.0);
            f.up[flat] = cu * amp;
            f.dn[flat] = cd * amp;
        }
        let n = f.norm_sqr().sqrt();
        f.scale(1.0 / n);
        Ok(f)
    }

    /// Equal superposition (|↑⟩ + |↓⟩)/√2, the standard input state.
    pub fn gaussian_packet_x_polarised(grid: Grid, delta: f64, center: [f64; 3]) -> Result<Self> {
        Self::gaussian_packet(
            grid,
            delta,
            center,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    /// Total probability ∫(|ψ↑|² + |ψ↓|²) dV.
    pub fn norm_sqr(&self) -> f64 {
        let dv = self.grid.cell_volume();
        let up = chunked_sum_f64(&self.up, |_, c| c.iter().map(|z| z.norm_sqr()).sum());
        let dn = chunked_sum_f64(&self.dn, |_, c| c.iter().map(|z| z.norm_sqr()).sum());
        (up + dn) * dv
    }

    /// Component norms (∫|ψ↑|²dV, ∫|ψ↓|²dV).
    pub fn component_norms(&self) -> (f64, f64) {
        let dv = self.grid.cell_volume();
        let up = chunked_sum_f64(&self.up, |_, c| c.iter().map(|z| z.norm_sqr()).sum());
        let dn = chunked_sum_f64(&self.dn, |_, c| c.iter().map(|z| z.norm_sqr()).sum());
        (up * dv, dn * dv)
    }

    /// Spin-off-diagonal overlap ∫ψ↑* ψ↓ dV.
    pub fn cross_overlap(&self) -> Complex64 {
        let dv = self.grid.cell_volume();
        let s = chunked_sum_c64(&self.up, |off, chunk| {
            chunk
                .iter()
                .zip(&self.dn[off..off + chunk.len()])
                .map(|(u, d)| u.conj() * d)
                .sum()
        });
        s * dv
    }

    pub fn scale(&mut self, s: f64) {
        for z in self.up.iter_mut().chain(self.dn.iter_mut()) {
            *z *= s;
        }
    }

    /// Probability within [`EDGE_GUARD`] points of any active boundary,
    /// relative to the total.
    pub fn boundary_fraction(&self) -> f64 {
        let grid = self.grid;
        let dv = grid.cell_volume();
        let edge = |data: &[Complex64]| {
            chunked_sum_f64(data, |off, chunk| {
                let mut s = 0.0;
                for (p, z) in chunk.iter().enumerate() {
                    let (i, j, k) = grid.unindex(off + p);
                    if grid.near_edge(i, j, k, EDGE_GUARD) {
                        s += z.norm_sqr();
                    }
                }
                s
            })
        };
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        (edge(&self.up) + edge(&self.dn)) * dv / total
    }

    /// L2 distance to another field on the same grid.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let dv = self.grid.cell_volume();
        let d_up = chunked_sum_f64(&self.up, |off, chunk| {
            chunk
                .iter()
                .zip(&other.up[off..off + chunk.len()])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum()
        });
        let d_dn = chunked_sum_f64(&self.dn, |off, chunk| {
            chunk
                .iter()
                .zip(&other.dn[off..off + chunk.len()])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum()
        });
        ((d_up + d_dn) * dv).sqrt()
    }

    /// Abort-worthy state checks: non-finite amplitudes.
    pub fn check_finite(&self) -> Result<()> {
        for z in self.up.iter().chain(self.dn.iter()) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(SgiError::Numerical("non-finite amplitude".into()));
            }
        }
        Ok(())
    }
}
