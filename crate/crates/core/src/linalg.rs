//! 2×2 matrix helpers.

use num_complex::Complex64;

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Largest absolute entry; used as the scale for tolerance decisions.
    pub fn scale(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn transpose(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Roots of the characteristic polynomial, ordered by real part (descending).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half_tr = 0.5 * self.trace();
        let disc = half_tr * half_tr - self.det();
        if disc >= 0.0 {
            let root = disc.sqrt();
            // numerically stable pair: larger magnitude first, other from the product
            let big = if half_tr >= 0.0 {
                half_tr + root
            } else {
                half_tr - root
            };
            let small = if big != 0.0 { self.det() / big } else { 0.0 };
            let (a, b) = if big >= small { (big, small) } else { (small, big) };
            [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
        } else {
            let im = (-disc).sqrt();
            [Complex64::new(half_tr, im), Complex64::new(half_tr, -im)]
        }
    }

    /// Unit eigenvector for a real eigenvalue `lambda`, oriented with a
    /// non-negative first component (second component non-negative when the
    /// first vanishes).
    pub fn eigenvector(&self, lambda: f64) -> [f64; 2] {
        let m = self.0;
        let a = [m[0][0] - lambda, m[0][1]];
        let b = [m[1][0], m[1][1] - lambda];
        // null vector of the row with the larger norm
        let row = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
        let mut v = if row[0] == 0.0 && row[1] == 0.0 {
            [1.0, 0.0]
        } else {
            [-row[1], row[0]]
        };
        let n = v[0].hypot(v[1]);
        v = [v[0] / n, v[1] / n];
        if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
            v = [-v[0], -v[1]];
        }
        v
    }
}

pub(crate) fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
