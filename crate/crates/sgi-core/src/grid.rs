//! Uniform Cartesian grids for the spectral propagator.
//!
//! A grid always carries three axes (x, y, z); axes of length 1 are inert,
//! which is how the 1-D simplified runs are represented. Coordinates are
//! cell-centred with the origin at index n/2, and the momentum grid follows
//! the usual DFT frequency layout.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgiError};

pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;

/// Number of grid points next to each face counted as the absorbing-free
/// guard band; probability reaching it aborts a run.
pub const EDGE_GUARD: usize = 4;

/// True for the transform sizes the spectral engine accepts: multiples of 4
/// of the form 2^a·3^b, which mixed-radix FFTs handle at full speed and
/// which keep the cell-centred coordinate layout symmetric.
pub fn is_supported_size(n: usize) -> bool {
    if n < 4 || n % 4 != 0 {
        return false;
    }
    let mut m = n;
    while m % 2 == 0 {
        m /= 2;
    }
    while m % 3 == 0 {
        m /= 3;
    }
    m == 1
}

/// Smallest supported transform size that is at least `n`.
pub fn next_supported_size(n: usize) -> usize {
    let mut m = n.max(4);
    while !is_supported_size(m) {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Points per axis (x, y, z). Active axes must be supported FFT sizes
    /// (see [`is_supported_size`]).
    pub shape: [usize; 3],
    /// Full extent per axis in internal units; ignored on inert axes.
    pub extent: [f64; 3],
}

impl Grid {
    /// One-dimensional grid along z.
    pub fn line_z(n: usize, extent: f64) -> Result<Self> {
        let g = Self {
            shape: [1, 1, n],
            extent: [0.0, 0.0, extent],
        };
        g.check_shape()?;
        Ok(g)
    }

    /// Full three-dimensional grid.
    pub fn box3(shape: [usize; 3], extent: [f64; 3]) -> Result<Self> {
        let g = Self { shape, extent };
        g.check_shape()?;
        Ok(g)
    }

    fn check_shape(&self) -> Result<()> {
        for ax in 0..3 {
            let n = self.shape[ax];
            if n == 0 {
                return Err(SgiError::Config("grid axis of length zero".into()));
            }
            if n > 1 {
                if !is_supported_size(n) {
                    return Err(SgiError::Config(format!(
                        "axis {ax} has {n} points; active axes need a multiple \
                         of 4 of the form 2^a·3^b"
                    )));
                }
                if !(self.extent[ax] > 0.0) {
                    return Err(SgiError::Config(format!(
                        "axis {ax} needs a positive extent"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Resolution and coverage check against a packet width and the largest
    /// expected excursion per axis.
    pub fn validate(&self, delta: f64, max_deflection: [f64; 3]) -> Result<()> {
        self.check_shape()?;
        for ax in 0..3 {
            if !self.is_active(ax) {
                continue;
            }
            let dx = self.spacing(ax);
            if dx > delta / 4.0 + 1e-12 * delta {
                return Err(SgiError::Config(format!(
                    "axis {ax} spacing {:.3e} is coarser than delta/4",
                    dx
                )));
            }
            let needed = 8.0 * delta + max_deflection[ax];
            if self.extent[ax] < needed {
                return Err(SgiError::Config(format!(
                    "axis {ax} extent {:.3e} is below the required {:.3e}",
                    self.extent[ax], needed
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.shape[axis] > 1
    }

    /// Grid spacing along an axis (zero on inert axes).
    pub fn spacing(&self, axis: usize) -> f64 {
        if self.is_active(axis) {
            self.extent[axis] / self.shape[axis] as f64
        } else {
            0.0
        }
    }

    /// Volume element: product of spacings over active axes.
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for ax in 0..3 {
            if self.is_active(ax) {
                v *= self.spacing(ax);
            }
        }
        v
    }

    /// Position of index `i` along `axis`, centred so index n/2 sits at 0.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if !self.is_active(axis) {
            return 0.0;
        }
        (i as f64 - (self.shape[axis] / 2) as f64) * self.spacing(axis)
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// DFT momentum of index `i` along `axis` (ħ = 1).
    pub fn momentum(&self, axis: usize, i: usize) -> f64 {
        if !self.is_active(axis) {
            return 0.0;
        }
        let n = self.shape[axis];
        let signed = ((i + n / 2) % n) as isize - (n / 2) as isize;
        2.0 * std::f64::consts::PI * signed as f64 / self.extent[axis]
    }

    pub fn momentum_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis])
            .map(|i| self.momentum(axis, i))
            .collect()
    }

    /// Flat index of (i, j, k); z runs fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.shape[1] + j) * self.shape[2] + k
    }

    /// Decompose a flat index back into (i, j, k).
    #[inline]
    pub fn unindex(&self, flat: usize) -> (usize, usize, usize) {
        let k = flat % self.shape[2];
        let rest = flat / self.shape[2];
        let j = rest % self.shape[1];
        (rest / self.shape[1], j, k)
    }

    /// True if the point lies within `margin` points of any active-axis face.
    #[inline]
    pub fn near_edge(&self, i: usize, j: usize, k: usize, margin: usize) -> bool {
        let idx = [i, j, k];
        for ax in 0..3 {
            if self.is_active(ax) {
                let n = self.shape[ax];
                if idx[ax] < margin || idx[ax] >= n - margin {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_grid_coords_are_centred() {
        let g = Grid::line_z(8, 8.0).unwrap();
        let z = g.axis_coords(Z);
        assert_eq!(z, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(g.cell_volume(), 1.0);
        assert_eq!(g.coord(X, 0), 0.0);
    }

    #[test]
    fn momentum_grid_layout() {
        let g = Grid::line_z(8, 8.0).unwrap();
        let k: Vec<f64> = g.momentum_coords(Z);
        let f = std::f64::consts::PI / 4.0; // 2π/extent
        let expect = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (kk, e) in k.iter().zip(expect) {
            assert!((kk - e * f).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_unsupported_sizes() {
        assert!(Grid::line_z(1000, 8.0).is_err()); // factor 5³
        assert!(Grid::line_z(6, 8.0).is_err()); // not a multiple of 4
        assert!(Grid::box3([4, 10, 8], [1.0, 1.0, 1.0]).is_err());
        for n in [4, 8, 12, 96, 288, 384, 576, 1536] {
            assert!(Grid::line_z(n, 8.0).is_ok(), "size {n} should be valid");
        }
    }

    #[test]
    fn next_supported_size_rounds_up() {
        assert_eq!(next_supported_size(1), 4);
        assert_eq!(next_supported_size(96), 96);
        assert_eq!(next_supported_size(97), 108);
        assert_eq!(next_supported_size(263), 288);
        assert_eq!(next_supported_size(1100), 1152);
    }

    #[test]
    fn validates_resolution_and_coverage() {
        let delta = 1.0;
        // 96δ over 1024 points resolves δ easily.
        let g = Grid::line_z(1024, 96.0).unwrap();
        g.validate(delta, [0.0, 0.0, 20.0]).unwrap();
        // 16 points over 96δ is far too coarse.
        let g = Grid::line_z(16, 96.0).unwrap();
        assert!(g.validate(delta, [0.0, 0.0, 0.0]).is_err());
        // Extent must cover packet plus deflection.
        let g = Grid::line_z(1024, 20.0).unwrap();
        assert!(g.validate(delta, [0.0, 0.0, 20.0]).is_err());
    }

    #[test]
    fn flat_indexing_round_trip() {
        let g = Grid::box3([4, 8, 16], [1.0, 2.0, 4.0]).unwrap();
        for flat in [0usize, 5, 100, 511] {
            let (i, j, k) = g.unindex(flat);
            assert_eq!(g.index(i, j, k), flat);
        }
    }

    #[test]
    fn edge_detection_ignores_inert_axes() {
        let g = Grid::line_z(64, 64.0).unwrap();
        assert!(g.near_edge(0, 0, 2, 4));
        assert!(g.near_edge(0, 0, 61, 4));
        assert!(!g.near_edge(0, 0, 30, 4));
    }
}
