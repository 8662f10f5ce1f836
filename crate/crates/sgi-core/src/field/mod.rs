//! Magnetic field of the interferometer aperture.
//!
//! The transverse field is synthesised from two wire-like sources running
//! parallel to the beam (y) axis at (x, z) = (0, ∓a), whose source strength
//! is modulated along y so that the on-axis longitudinal profile matches a
//! prescribed target b₀(y).  Writing the scalar potential as a wavenumber
//! integral over modified-Bessel kernels,
//!
//!   φ(r) = (1/π) ∫₀^∞ dk cos(ky) [K₀(k s₊) + p·K₀(k s₋)] b̃₀(k)/(k K₁(ka)),
//!
//! with s± = √(x² + (z ± a)²) and p = ±1 the relative sign of the two
//! sources, the magnetic field is B = f·(−∇φ + B₀ ẑ): a strong uniform bias
//! along z plus the aperture modulation, everything scaled by the
//! dimensionless calibration factor f.  Each k-mode satisfies Laplace's
//! equation identically, so ∇·B = 0 and ∇×B = 0 hold to rounding error by
//! construction.
//!
//! The relative source sign is physically decisive:
//!
//! * `Opposed` (p = −1) gives a potential odd in z, hence B_z − f·B₀ even in
//!   z.  |B| is then symmetric about the beam axis and its z-gradient
//!   vanishes identically on the axis: an on-axis beam is never split.
//!   This variant reproduces the on-axis identity
//!   B_z(0, y, 0)/f − B₀ = 2 b₀(y) exactly.
//! * `Aligned` (p = +1) gives B_z − f·B₀ odd in z, a non-zero on-axis
//!   splitting gradient ∂B_z/∂z, mirror-symmetric trajectories
//!   z₋(t) = −z₊(t), and a large on-axis B_y.  This is the configuration
//!   used for the interferometer runs.
//!
//! Unit convention: coordinates entering the public API are in internal
//! (Bohr-radius) units; field values come back in the magnetic atomic units
//! in which the bias is B₀ = 100, and derivatives are taken with respect to
//! internal lengths.  Internally the synthesis is evaluated with lengths in
//! microns, matching the convention in which b₀(y) is defined.

pub mod kernels;
pub mod patch;

pub use kernels::{AxisKernelTable, PlaneInterpTable, PlaneProbe};
pub use patch::QuadraticFieldPatch;

use serde::{Deserialize, Serialize};

use crate::bessel;
use crate::error::{Result, SgiError};
use crate::quadrature::Quadrature;
use crate::units::BOHR_PER_MICRON;

/// Relative sign of the source at z = +a with respect to the one at z = −a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineParity {
    /// Opposite-sign pair: potential odd in z, no on-axis splitting force.
    Opposed,
    /// Same-sign pair: aperture field odd in z, finite on-axis splitting
    /// gradient.  Default for interferometer runs.
    Aligned,
}

impl LineParity {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            LineParity::Opposed => -1.0,
            LineParity::Aligned => 1.0,
        }
    }
}

/// Longitudinal modulation profile and synthesis controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldProfile {
    /// Modulation wavenumber α in 1/μm.
    pub alpha_um: f64,
    /// Bias field B₀ in magnetic atomic units.
    pub bias: f64,
    /// Wavenumber cutoff as a multiple of α; the spectrum is ~e^(−72)
    /// at the default cutoff 12α.
    pub k_max_factor: f64,
    /// Gauss–Legendre node count on [0, k_max].
    pub quad_nodes: usize,
}

impl Default for FieldProfile {
    fn default() -> Self {
        Self {
            alpha_um: 0.3,
            bias: 100.0,
            k_max_factor: 12.0,
            quad_nodes: 256,
        }
    }
}

/// First, second and third derivatives of the field at a point.
///
/// `b` is in magnetic atomic units; `jac[i][j] = ∂Bᵢ/∂rⱼ` and
/// `hess[c][i][j] = ∂²B_c/∂rᵢ∂rⱼ` are per internal length unit.
#[derive(Debug, Clone, Copy)]
pub struct FieldDerivatives {
    pub b: [f64; 3],
    pub jac: [[f64; 3]; 3],
    pub hess: [[[f64; 3]; 3]; 3],
}

/// The aperture field with fixed geometry (half-gap a) and scale f.
#[derive(Debug, Clone)]
pub struct FieldModel {
    pub profile: FieldProfile,
    pub parity: LineParity,
    /// Half-gap a between beam axis and each source line, internal units.
    pub half_gap: f64,
    /// Dimensionless overall field scale f.
    pub scale: f64,
    half_gap_um: f64,
    /// Wavenumber nodes in 1/μm.
    k_nodes: Vec<f64>,
    /// Effective weights (1/π)·w_GL·b̃₀(k)/(k K₁(ka)) per node.
    weights: Vec<f64>,
}

impl FieldModel {
    pub fn new(
        profile: FieldProfile,
        parity: LineParity,
        half_gap: f64,
        scale: f64,
    ) -> Result<Self> {
        if !(half_gap > 0.0) || !half_gap.is_finite() {
            return Err(SgiError::Geometry(format!(
                "half-gap must be positive, got {half_gap}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(SgiError::Geometry(format!(
                "field scale must be positive, got {scale}"
            )));
        }
        if !(profile.alpha_um > 0.0) || !(profile.bias > 0.0) {
            return Err(SgiError::Config(
                "profile wavenumber and bias must be positive".into(),
            ));
        }
        if profile.quad_nodes < 8 {
            return Err(SgiError::Config(
                "field synthesis needs at least 8 quadrature nodes".into(),
            ));
        }
        let half_gap_um = half_gap / BOHR_PER_MICRON;
        let k_max = profile.k_max_factor * profile.alpha_um;
        if k_max * half_gap_um > 600.0 {
            return Err(SgiError::Geometry(format!(
                "half-gap {half_gap_um} μm too large for wavenumber cutoff {k_max} 1/μm"
            )));
        }
        let quad = Quadrature::gauss_legendre_on(profile.quad_nodes, 0.0, k_max)?;
        let mut weights = Vec::with_capacity(quad.len());
        for (&k, &w) in quad.nodes.iter().zip(&quad.weights) {
            let ka = k * half_gap_um;
            // k·K₁(ka) → 1/a as k → 0; branch to the limit where the
            // direct product would lose accuracy.
            let denom = if ka < 1e-6 {
                1.0 / half_gap_um
            } else {
                k * bessel::k1(ka)?
            };
            weights.push(w * spectrum(profile.alpha_um, k) / denom / std::f64::consts::PI);
        }
        Ok(Self {
            profile,
            parity,
            half_gap,
            scale,
            half_gap_um,
            k_nodes: quad.nodes,
            weights,
        })
    }

    /// Same geometry and profile, different overall scale.
    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(SgiError::Geometry(format!(
                "field scale must be positive, got {scale}"
            )));
        }
        let mut m = self.clone();
        m.scale = scale;
        Ok(m)
    }

    pub(crate) fn half_gap_um(&self) -> f64 {
        self.half_gap_um
    }

    pub(crate) fn nodes_and_weights(&self) -> (&[f64], &[f64]) {
        (&self.k_nodes, &self.weights)
    }

    /// Target on-axis modulation b₀(y) in magnetic atomic units
    /// (y in internal units).
    pub fn b0_profile(&self, y: f64) -> f64 {
        let u = self.profile.alpha_um * (y / BOHR_PER_MICRON);
        self.profile.alpha_um / (2.0 * std::f64::consts::PI).sqrt()
            * ((-0.5 * u * u).exp() - std::f64::consts::SQRT_2 * (-u * u).exp())
    }

    /// Cosine-transform spectrum b̃₀(k) of the target profile, k in 1/μm.
    pub fn b0_spectrum(&self, k_um: f64) -> f64 {
        spectrum(self.profile.alpha_um, k_um)
    }

    /// Bias-to-modulation ratio B₀/|b₀(0)| (≈ 2017 for the default profile).
    pub fn bias_to_modulation_ratio(&self) -> f64 {
        self.profile.bias / self.b0_profile(0.0).abs()
    }

    /// Scalar potential φ (magnetic a.u. × μm); tests and diagnostics only.
    pub fn scalar_potential(&self, r: [f64; 3]) -> Result<f64> {
        let s = self.synthesise(r, 0)?;
        Ok(s.phi)
    }

    /// B(r) in magnetic atomic units.
    pub fn field_at(&self, r: [f64; 3]) -> Result<[f64; 3]> {
        let s = self.synthesise(r, 1)?;
        Ok(self.assemble_b(&s))
    }

    /// B(r) and its Jacobian ∂Bᵢ/∂rⱼ (per internal length).
    pub fn field_and_jacobian(&self, r: [f64; 3]) -> Result<([f64; 3], [[f64; 3]; 3])> {
        let s = self.synthesise(r, 2)?;
        Ok((self.assemble_b(&s), self.assemble_jac(&s)))
    }

    /// B, Jacobian and per-component Hessians, for quadratic patches.
    pub fn field_derivatives(&self, r: [f64; 3]) -> Result<FieldDerivatives> {
        let s = self.synthesise(r, 3)?;
        let f = self.scale;
        let b2 = BOHR_PER_MICRON * BOHR_PER_MICRON;
        // hess[c][i][j] = −f φ_{cij}; index the 10 distinct third partials.
        let h = |cij: [usize; 3]| -> f64 {
            let mut idx = cij;
            idx.sort_unstable();
            -f * s.d3[third_index(idx)] / b2
        };
        let mut hess = [[[0.0; 3]; 3]; 3];
        for c in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    hess[c][i][j] = h([c, i, j]);
                }
            }
        }
        Ok(FieldDerivatives {
            b: self.assemble_b(&s),
            jac: self.assemble_jac(&s),
            hess,
        })
    }

    /// |B| and ∇|B| (per internal length); the classical potential is ∓μ|B|.
    pub fn norm_and_gradient(&self, r: [f64; 3]) -> Result<(f64, [f64; 3])> {
        let (b, jac) = self.field_and_jacobian(r)?;
        let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if norm == 0.0 {
            return Ok((0.0, [0.0; 3]));
        }
        let mut grad = [0.0; 3];
        for (j, g) in grad.iter_mut().enumerate() {
            *g = (b[0] * jac[0][j] + b[1] * jac[1][j] + b[2] * jac[2][j]) / norm;
        }
        Ok((norm, grad))
    }

    /// On-axis splitting gradient ∂B_z/∂z at (0, y, 0), per internal length.
    ///
    /// Evaluated from the dedicated one-dimensional integral
    /// −f·(2/π)∫ dk cos(ky)[k K₀(ka)/K₁(ka) + 1/a] b̃₀(k), which exists only
    /// for the `Aligned` parity; for `Opposed` the gradient is identically
    /// zero on the axis and 0.0 is returned.
    pub fn on_axis_splitting_gradient(&self, y: f64) -> Result<f64> {
        if self.parity == LineParity::Opposed {
            return Ok(0.0);
        }
        let y_um = y / BOHR_PER_MICRON;
        let a = self.half_gap_um;
        let mut sum = 0.0;
        for (&k, &w) in self.k_nodes.iter().zip(&self.weights) {
            // weights already contain (1/π)·w_GL·b̃₀/(k K₁(ka)); multiply by
            // k²K₀(ka) + kK₁(ka)/a to recover the integrand
            // (2/π)·b̃₀·[kK₀/K₁ + 1/a] after the factor of 2 below.
            let ka = k * a;
            let (k0, k1) = bessel::k0_k1(ka)?;
            sum += w * (k * y_um).cos() * (k * k * k0 + k * k1 / a);
        }
        Ok(-2.0 * self.scale * sum / BOHR_PER_MICRON)
    }

    fn assemble_b(&self, s: &Synth) -> [f64; 3] {
        let f = self.scale;
        [
            -f * s.d1[0],
            -f * s.d1[1],
            f * (self.profile.bias - s.d1[2]),
        ]
    }

    fn assemble_jac(&self, s: &Synth) -> [[f64; 3]; 3] {
        let f = self.scale;
        // d2 layout: xx xy xz yy yz zz
        let m = |i: usize, j: usize| -> f64 {
            let idx = match (i.min(j), i.max(j)) {
                (0, 0) => 0,
                (0, 1) => 1,
                (0, 2) => 2,
                (1, 1) => 3,
                (1, 2) => 4,
                (2, 2) => 5,
                _ => unreachable!(),
            };
            -f * s.d2[idx] / BOHR_PER_MICRON
        };
        [
            [m(0, 0), m(0, 1), m(0, 2)],
            [m(1, 0), m(1, 1), m(1, 2)],
            [m(2, 0), m(2, 1), m(2, 2)],
        ]
    }

    /// Core synthesis: φ and its partial derivatives up to `order`
    /// with respect to micron lengths, at internal-unit position `r`.
    fn synthesise(&self, r: [f64; 3], order: u8) -> Result<Synth> {
        let x = r[0] / BOHR_PER_MICRON;
        let y = r[1] / BOHR_PER_MICRON;
        let z = r[2] / BOHR_PER_MICRON;
        let a = self.half_gap_um;
        let p = self.parity.sign();
        let mut out = Synth::default();

        for (&k, &w) in self.k_nodes.iter().zip(&self.weights) {
            let (sin_y, cos_y) = (k * y).sin_cos();

            // In-plane radial sums over the two source lines.
            let mut g0 = 0.0;
            let mut g1 = [0.0; 2]; // x, z
            let mut g2 = [0.0; 3]; // xx, xz, zz
            let mut g3 = [0.0; 4]; // xxx, xxz, xzz, zzz
            for (zc, q) in [(-a, 1.0), (a, p)] {
                let dx = x;
                let dz = z - zc;
                let s = (dx * dx + dz * dz).sqrt();
                if s == 0.0 {
                    return Err(SgiError::Domain(
                        "field evaluated on a source line".into(),
                    ));
                }
                let u = k * s;
                let (k0v, k1v) = bessel::k0_k1(u)?;
                let nx = dx / s;
                let nz = dz / s;
                g0 += q * k0v;
                if order == 0 {
                    continue;
                }
                let r1 = -k * k1v;
                g1[0] += q * r1 * nx;
                g1[1] += q * r1 * nz;
                if order < 2 {
                    continue;
                }
                let r2 = k * k * k0v + k * k1v / s;
                let lam = r1 / s;
                g2[0] += q * (r2 * nx * nx + lam * (1.0 - nx * nx));
                g2[1] += q * (r2 - lam) * nx * nz;
                g2[2] += q * (r2 * nz * nz + lam * (1.0 - nz * nz));
                if order < 3 {
                    continue;
                }
                let r3 = -k * k * k * k1v - k * k * k0v / s - 2.0 * k * k1v / (s * s);
                let c3 = r2 / s - r1 / (s * s);
                g3[0] += q * (r3 * nx * nx * nx + c3 * 3.0 * nx * (1.0 - nx * nx));
                g3[1] += q * (r3 * nx * nx * nz + c3 * (nz - 3.0 * nx * nx * nz));
                g3[2] += q * (r3 * nx * nz * nz + c3 * (nx - 3.0 * nx * nz * nz));
                g3[3] += q * (r3 * nz * nz * nz + c3 * 3.0 * nz * (1.0 - nz * nz));
            }

            out.phi += w * cos_y * g0;
            if order == 0 {
                continue;
            }
            out.d1[0] += w * cos_y * g1[0];
            out.d1[1] += -w * k * sin_y * g0;
            out.d1[2] += w * cos_y * g1[1];
            if order < 2 {
                continue;
            }
            out.d2[0] += w * cos_y * g2[0]; // xx
            out.d2[1] += -w * k * sin_y * g1[0]; // xy
            out.d2[2] += w * cos_y * g2[1]; // xz
            out.d2[3] += -w * k * k * cos_y * g0; // yy
            out.d2[4] += -w * k * sin_y * g1[1]; // yz
            out.d2[5] += w * cos_y * g2[2]; // zz
            if order < 3 {
                continue;
            }
            out.d3[0] += w * cos_y * g3[0]; // xxx
            out.d3[1] += -w * k * sin_y * g2[0]; // xxy
            out.d3[2] += w * cos_y * g3[1]; // xxz
            out.d3[3] += -w * k * k * cos_y * g1[0]; // xyy
            out.d3[4] += -w * k * sin_y * g2[1]; // xyz
            out.d3[5] += w * cos_y * g3[2]; // xzz
            out.d3[6] += w * k * k * k * sin_y * g0; // yyy
            out.d3[7] += -w * k * k * cos_y * g1[1]; // yyz
            out.d3[8] += -w * k * sin_y * g2[2]; // yzz
            out.d3[9] += w * cos_y * g3[3]; // zzz
        }
        Ok(out)
    }
}

fn spectrum(alpha: f64, k: f64) -> f64 {
    let q = k / alpha;
    (-0.5 * q * q).exp() - (-0.25 * q * q).exp()
}

/// Index into the 10 distinct third partials, input sorted (x ≤ y ≤ z).
fn third_index(idx: [usize; 3]) -> usize {
    match idx {
        [0, 0, 0] => 0,
        [0, 0, 1] => 1,
        [0, 0, 2] => 2,
        [0, 1, 1] => 3,
        [0, 1, 2] => 4,
        [0, 2, 2] => 5,
        [1, 1, 1] => 6,
        [1, 1, 2] => 7,
        [1, 2, 2] => 8,
        [2, 2, 2] => 9,
        _ => unreachable!("indices out of range"),
    }
}

#[derive(Debug, Default, Clone)]
struct Synth {
    phi: f64,
    d1: [f64; 3],
    /// xx, xy, xz, yy, yz, zz
    d2: [f64; 6],
    /// xxx, xxy, xxz, xyy, xyz, xzz, yyy, yyz, yzz, zzz
    d3: [f64; 10],
}
