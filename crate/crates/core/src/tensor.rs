//! Small fixed-size tensor algebra in three dimensions.
//!
//! The deviatoric stress is stored as a [`SymTraceless3`]: five independent
//! components, with the `zz` entry implied by the zero trace. Symmetry and
//! tracelessness therefore hold by construction, for every state the solvers
//! ever produce.

use std::ops::{Add, Mul, Sub};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Index pairs `(row, col)` of the five packed components, in storage order.
pub const PACKED_INDICES: [(usize, usize); 5] = [(0, 0), (1, 1), (0, 1), (0, 2), (1, 2)];

/// Component names in storage order.
pub const PACKED_NAMES: [&str; 5] = ["xx", "yy", "xy", "xz", "yz"];

/// Symmetric, traceless rank-2 tensor in three dimensions.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymTraceless3 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl SymTraceless3 {
    pub const ZERO: Self = Self {
        xx: 0.0,
        yy: 0.0,
        xy: 0.0,
        xz: 0.0,
        yz: 0.0,
    };

    pub fn from_components(c: [f64; 5]) -> Self {
        Self {
            xx: c[0],
            yy: c[1],
            xy: c[2],
            xz: c[3],
            yz: c[4],
        }
    }

    pub fn components(&self) -> [f64; 5] {
        [self.xx, self.yy, self.xy, self.xz, self.yz]
    }

    /// The implied `zz` entry.
    #[inline]
    pub fn zz(&self) -> f64 {
        -(self.xx + self.yy)
    }

    /// Reads the packed components of `m`. For a symmetric traceless `m`
    /// this is the exact inverse of [`SymTraceless3::to_matrix`]; other
    /// inputs lose their antisymmetric part (upper triangle wins) and trace.
    pub fn from_matrix(m: &Mat3) -> Self {
        Self {
            xx: m[0][0],
            yy: m[1][1],
            xy: m[0][1],
            xz: m[0][2],
            yz: m[1][2],
        }
    }

    pub fn to_matrix(&self) -> Mat3 {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz()],
        ]
    }

    /// `|t|^2 = trace(t^T t)`, summed over all nine entries.
    #[inline]
    pub fn norm_sq(&self) -> f64 {
        let zz = self.zz();
        self.xx * self.xx
            + self.yy * self.yy
            + zz * zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz)
    }

    /// Matrix-vector product `t v`.
    #[inline]
    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        [
            self.xx * v[0] + self.xy * v[1] + self.xz * v[2],
            self.xy * v[0] + self.yy * v[1] + self.yz * v[2],
            self.xz * v[0] + self.yz * v[1] + self.zz() * v[2],
        ]
    }

    /// Row `i` of the reconstructed matrix.
    #[inline]
    pub fn row(&self, i: usize) -> Vec3 {
        match i {
            0 => [self.xx, self.xy, self.xz],
            1 => [self.xy, self.yy, self.yz],
            _ => [self.xz, self.yz, self.zz()],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_components(self.components().map(|c| c * s))
    }
}

impl Add for SymTraceless3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yz: self.yz + o.yz,
        }
    }
}

impl Sub for SymTraceless3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            xx: self.xx - o.xx,
            yy: self.yy - o.yy,
            xy: self.xy - o.xy,
            xz: self.xz - o.xz,
            yz: self.yz - o.yz,
        }
    }
}

impl Mul<f64> for SymTraceless3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// Deviatoric symmetric part `M + M^T - (2/3) tr(M) I` of a velocity gradient.
pub fn dev_sym(m: &Mat3) -> SymTraceless3 {
    let third_tr = (m[0][0] + m[1][1] + m[2][2]) * (2.0 / 3.0);
    SymTraceless3 {
        xx: 2.0 * m[0][0] - third_tr,
        yy: 2.0 * m[1][1] - third_tr,
        xy: m[0][1] + m[1][0],
        xz: m[0][2] + m[2][0],
        yz: m[1][2] + m[2][1],
    }
}

pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
