//! 2×2 Hermitian matrices in canonical form and general complex 2×2
//! operators for measurement effects.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;

/// Eigenvalue tolerance below zero accepted for density and effect matrices.
pub const PSD_TOL: f64 = 1e-9;

/// A 2×2 Hermitian matrix stored as two real diagonal entries and one
/// complex off-diagonal, so Hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix2 {
    /// ⟨0|M|0⟩
    pub m00: f64,
    /// ⟨1|M|1⟩
    pub m11: f64,
    /// ⟨0|M|1⟩; the (1,0) entry is its conjugate.
    pub m01: Complex64,
}

impl HermitianMatrix2 {
    pub const ZERO: Self = Self { m00: 0.0, m11: 0.0, m01: Complex64::new(0.0, 0.0) };

    pub fn identity() -> Self {
        Self { m00: 1.0, m11: 1.0, m01: Complex64::new(0.0, 0.0) }
    }

    /// I/2, the maximally mixed density matrix and the uninformative effect.
    pub fn half_identity() -> Self {
        Self { m00: 0.5, m11: 0.5, m01: Complex64::new(0.0, 0.0) }
    }

    /// Density matrix of a Bloch vector: ρ = (I + q·σ)/2 with |0⟩ at z = +1.
    pub fn from_bloch(q: BlochVector) -> Self {
        Self {
            m00: 0.5 * (1.0 + q.z),
            m11: 0.5 * (1.0 - q.z),
            m01: Complex64::new(0.5 * q.x, -0.5 * q.y),
        }
    }

    /// Bloch components (x, y, z) = (2·Re m01, −2·Im m01, m00 − m11).
    /// Meaningful for unit-trace matrices.
    pub fn to_bloch(&self) -> (f64, f64, f64) {
        (2.0 * self.m01.re, -2.0 * self.m01.im, self.m00 - self.m11)
    }

    pub fn trace(&self) -> f64 {
        self.m00 + self.m11
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { m00: self.m00 * c, m11: self.m11 * c, m01: self.m01 * c }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mid = 0.5 * (self.m00 + self.m11);
        let half_gap = 0.5 * (self.m00 - self.m11);
        let radius = (half_gap * half_gap + self.m01.norm_sqr()).sqrt();
        (mid - radius, mid + radius)
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.eigenvalues().0 >= -PSD_TOL
    }

    /// Valid as a density matrix: unit trace and positive semidefinite.
    pub fn is_density(&self) -> bool {
        (self.trace() - 1.0).abs() <= 1e-12 && self.is_positive_semidefinite()
    }

    pub fn to_operator(&self) -> Mat2 {
        Mat2([
            Complex64::new(self.m00, 0.0),
            self.m01,
            self.m01.conj(),
            Complex64::new(self.m11, 0.0),
        ])
    }

    /// Hermitian part of a general matrix, (M + M†)/2. Used to strip the
    /// float-level anti-Hermitian residue off products that are Hermitian
    /// in exact arithmetic.
    pub fn from_operator(op: &Mat2) -> Self {
        Self {
            m00: op.0[0].re,
            m11: op.0[3].re,
            m01: 0.5 * (op.0[1] + op.0[2].conj()),
        }
    }
}

/// General complex 2×2 operator, row-major: [m00, m01, m10, m11].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [Complex64; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        Self([
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
    }

    pub fn diagonal(d0: f64, d1: f64) -> Self {
        Self([
            Complex64::new(d0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(d1, 0.0),
        ])
    }

    /// Rotation about the Bloch y axis by `theta`, matching the convention
    /// of `measurement::rabi_rotate` (+z toward +x for positive theta).
    pub fn rotation_y(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self([
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ])
    }

    pub fn adjoint(&self) -> Self {
        Self([self.0[0].conj(), self.0[2].conj(), self.0[1].conj(), self.0[3].conj()])
    }

    pub fn mul(&self, rhs: &Mat2) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Self([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn scale(&self, c: f64) -> Self {
        Self([self.0[0] * c, self.0[1] * c, self.0[2] * c, self.0[3] * c])
    }

    pub fn add(&self, rhs: &Mat2) -> Self {
        Self([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }

    /// A·H·A†, re-Hermitianized.
    pub fn sandwich(&self, h: &HermitianMatrix2) -> HermitianMatrix2 {
        let product = self.mul(&h.to_operator()).mul(&self.adjoint());
        HermitianMatrix2::from_operator(&product)
    }

    /// Largest absolute entry of (self − rhs).
    pub fn max_deviation(&self, rhs: &Mat2) -> f64 {
        self.0
            .iter()
            .zip(rhs.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Projectors (I ± σ_z)/2 onto the measurement eigenstates, in the order
/// (+z, −z). A complete projective POVM.
pub fn projective_z_effects() -> Vec<Mat2> {
    vec![Mat2::diagonal(1.0, 0.0), Mat2::diagonal(0.0, 1.0)]
}
