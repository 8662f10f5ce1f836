//! Local quadratic expansion of the field around a point.
//!
//! The 3D propagation samples the field hundreds of millions of times per
//! step, far too often for the full wavenumber synthesis.  The wave packet,
//! however, occupies a region a few packet-widths across, over which the
//! analytic field is glass-smooth (its shortest spectral scale is ~1/k_max
//! ≈ 0.3 μm while the packet is ~0.01 μm wide).  A second-order Taylor
//! expansion about the packet centroid is therefore accurate to ~1e-6 of
//! |B| over the whole validity ball, at the cost of one exact derivative
//! evaluation per step.

use crate::error::{Result, SgiError};
use crate::field::{FieldDerivatives, FieldModel};

#[derive(Debug, Clone)]
pub struct QuadraticFieldPatch {
    pub center: [f64; 3],
    /// Displacements beyond this radius are outside the trusted region.
    pub validity_radius: f64,
    d: FieldDerivatives,
}

impl QuadraticFieldPatch {
    /// Expand `model` about `center` (internal units).
    ///
    /// Fails if the validity ball comes within 10% of a source line, where
    /// the field is singular and no quadratic model is meaningful.
    pub fn build(model: &FieldModel, center: [f64; 3], validity_radius: f64) -> Result<Self> {
        if !(validity_radius > 0.0) {
            return Err(SgiError::Geometry(
                "patch validity radius must be positive".into(),
            ));
        }
        for zc in [-model.half_gap, model.half_gap] {
            let dist = (center[0] * center[0] + (center[2] - zc) * (center[2] - zc)).sqrt();
            if dist < 1.1 * validity_radius {
                return Err(SgiError::Geometry(format!(
                    "patch ball (radius {validity_radius}) too close to the source line \
                     at z = {zc} (distance {dist})"
                )));
            }
        }
        let d = model.field_derivatives(center)?;
        Ok(Self {
            center,
            validity_radius,
            d,
        })
    }

    #[inline]
    pub fn displacement(&self, r: [f64; 3]) -> [f64; 3] {
        [
            r[0] - self.center[0],
            r[1] - self.center[1],
            r[2] - self.center[2],
        ]
    }

    #[inline]
    pub fn contains(&self, r: [f64; 3]) -> bool {
        let d = self.displacement(r);
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= self.validity_radius * self.validity_radius
    }

    /// B(center + d) to second order in the displacement d.
    #[inline]
    pub fn field(&self, r: [f64; 3]) -> [f64; 3] {
        let d = self.displacement(r);
        let mut b = self.d.b;
        for c in 0..3 {
            let jc = &self.d.jac[c];
            let hc = &self.d.hess[c];
            let mut lin = 0.0;
            let mut quad = 0.0;
            for i in 0..3 {
                lin += jc[i] * d[i];
                let hi = &hc[i];
                quad += d[i] * (hi[0] * d[0] + hi[1] * d[1] + hi[2] * d[2]);
            }
            b[c] += lin + 0.5 * quad;
        }
        b
    }

    /// Jacobian at center + d, to first order in d.
    #[inline]
    pub fn jacobian(&self, r: [f64; 3]) -> [[f64; 3]; 3] {
        let d = self.displacement(r);
        let mut jac = self.d.jac;
        for c in 0..3 {
            for i in 0..3 {
                let hci = &self.d.hess[c][i];
                jac[c][i] += hci[0] * d[0] + hci[1] * d[1] + hci[2] * d[2];
            }
        }
        jac
    }

    /// B and Σᵢⱼ (∂ᵢBⱼ)² together — the inputs the split-operator potential
    /// factor needs at every grid point.
    #[inline]
    pub fn field_and_grad_norm_sq(&self, r: [f64; 3]) -> ([f64; 3], f64) {
        let d = self.displacement(r);
        let mut b = [0.0; 3];
        let mut gns = 0.0;
        for c in 0..3 {
            let jc = &self.d.jac[c];
            let hc = &self.d.hess[c];
            let mut lin = 0.0;
            let mut quad = 0.0;
            for i in 0..3 {
                let hi = &hc[i];
                let hrow = hi[0] * d[0] + hi[1] * d[1] + hi[2] * d[2];
                lin += jc[i] * d[i];
                quad += d[i] * hrow;
                let jelem = jc[i] + hrow;
                gns += jelem * jelem;
            }
            // Same association as `field` so the two paths agree bitwise.
            b[c] = self.d.b[c] + (lin + 0.5 * quad);
        }
        (b, gns)
    }
}
