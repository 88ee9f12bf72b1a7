//! Small fixed-size linear algebra: plane vectors and symmetric 2x2 matrices.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymMat2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMat2 {
    pub const ZERO: SymMat2 = SymMat2 { a11: 0.0, a12: 0.0, a22: 0.0 };

    pub fn identity() -> Self {
        SymMat2 { a11: 1.0, a12: 0.0, a22: 1.0 }
    }

    pub fn diag(a11: f64, a22: f64) -> Self {
        SymMat2 { a11, a12: 0.0, a22 }
    }

    /// `s * I + b * z ⊗ z`
    pub fn iso_plus_outer(s: f64, b: f64, z: Vec2) -> Self {
        SymMat2 {
            a11: s + b * z.x * z.x,
            a12: b * z.x * z.y,
            a22: s + b * z.y * z.y,
        }
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a12 * v.x + self.a22 * v.y)
    }

    pub fn quad_form(self, v: Vec2) -> f64 {
        self.apply(v).dot(v)
    }

    pub fn eigenvalues(self) -> (f64, f64) {
        let tr = self.a11 + self.a22;
        let det = self.a11 * self.a22 - self.a12 * self.a12;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 - disc, tr / 2.0 + disc)
    }

    pub fn min_eigenvalue(self) -> f64 {
        self.eigenvalues().0
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn op_norm(self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        lo.abs().max(hi.abs())
    }

    pub fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }
}

impl Add for SymMat2 {
    type Output = SymMat2;
    fn add(self, o: SymMat2) -> SymMat2 {
        SymMat2 { a11: self.a11 + o.a11, a12: self.a12 + o.a12, a22: self.a22 + o.a22 }
    }
}

impl AddAssign for SymMat2 {
    fn add_assign(&mut self, o: SymMat2) {
        self.a11 += o.a11;
        self.a12 += o.a12;
        self.a22 += o.a22;
    }
}

impl Mul<f64> for SymMat2 {
    type Output = SymMat2;
    fn mul(self, s: f64) -> SymMat2 {
        SymMat2 { a11: self.a11 * s, a12: self.a12 * s, a22: self.a22 * s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diag() {
        let m = SymMat2::diag(3.0, -1.0);
        let (lo, hi) = m.eigenvalues();
        assert_eq!(lo, -1.0);
        assert_eq!(hi, 3.0);
        assert_eq!(m.op_norm(), 3.0);
    }

    #[test]
    fn quad_form_matches_eigen_bounds() {
        let m = SymMat2 { a11: 2.0, a12: 0.7, a22: 1.0 };
        let (lo, hi) = m.eigenvalues();
        for k in 0..16 {
            let t = k as f64 * std::f64::consts::PI / 8.0;
            let v = Vec2::new(t.cos(), t.sin());
            let q = m.quad_form(v);
            assert!(q >= lo - 1e-12 && q <= hi + 1e-12);
        }
    }
}
