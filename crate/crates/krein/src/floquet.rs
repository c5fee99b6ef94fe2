//! Transfer-matrix machinery for periodic coefficient sequences: the
//! monodromy matrix, its discriminant, and the half-line m-functions as fixed
//! points of the period-composed continued-fraction map.

use num_complex::Complex64;

/// One period of coefficients, starting at an arbitrary base site.
/// `a[i]` couples sites `base+i` and `base+i+1`; indices wrap modulo p.
pub(crate) struct PeriodicCoeffs<'a> {
    pub a: &'a [f64],
    pub b: &'a [f64],
}

impl PeriodicCoeffs<'_> {
    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn a_at(&self, n: i64) -> f64 {
        self.a[n.rem_euclid(self.p() as i64) as usize]
    }

    pub fn b_at(&self, n: i64) -> f64 {
        self.b[n.rem_euclid(self.p() as i64) as usize]
    }

    /// Monodromy over one period starting at `base`:
    /// `T = A(base+p-1) ··· A(base)` with
    /// `A(n) = [[(z-b(n))/a(n), -a(n-1)/a(n)], [1, 0]]`.
    pub fn monodromy(&self, z: Complex64, base: i64) -> [[Complex64; 2]; 2] {
        let mut m = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                     [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
        for k in 0..self.p() as i64 {
            let n = base + k;
            let an = self.a_at(n);
            let am = self.a_at(n - 1);
            let row0 = [(z - self.b_at(n)) / an, Complex64::new(-am / an, 0.0)];
            m = [
                [row0[0] * m[0][0] + row0[1] * m[1][0], row0[0] * m[0][1] + row0[1] * m[1][1]],
                [m[0][0], m[0][1]],
            ];
        }
        m
    }

    /// Discriminant `tr T(x)` at real energy.
    pub fn discriminant(&self, x: f64) -> f64 {
        let m = self.monodromy(Complex64::new(x, 0.0), 0);
        (m[0][0] + m[1][1]).re
    }

    /// `m₊` at `base`: value of `⟨δ_base, (J_{≥base} - z)^{-1} δ_base⟩` for
    /// the periodic half line, as the Herglotz fixed point of the Möbius map
    /// composed over one period:
    /// `m(k) = 1 / (b(k) - z - a(k)² m(k+1))`.
    pub fn m_plus(&self, z: Complex64, base: i64) -> Complex64 {
        let mut m = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                     [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
        for k in 0..self.p() as i64 {
            let n = base + k;
            let step = [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(-self.a_at(n) * self.a_at(n), 0.0), self.b_at(n) - z],
            ];
            m = mat_mul(&m, &step);
        }
        herglotz_fixed_point(&m)
    }

    /// `m₋` at `base` for the periodic half line going down:
    /// `m(k) = 1 / (b(k) - z - a(k-1)² m(k-1))`.
    pub fn m_minus(&self, z: Complex64, base: i64) -> Complex64 {
        let mut m = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                     [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
        for k in 0..self.p() as i64 {
            let n = base - k;
            let am = self.a_at(n - 1);
            let step = [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(-am * am, 0.0), self.b_at(n) - z],
            ];
            m = mat_mul(&m, &step);
        }
        herglotz_fixed_point(&m)
    }

    /// Exact diagonal Green function of the whole-line periodic operator.
    pub fn green(&self, z: Complex64, n: i64) -> Complex64 {
        let mp = self.m_plus(z, n + 1);
        let mm = self.m_minus(z, n - 1);
        let an = self.a_at(n);
        let am = self.a_at(n - 1);
        1.0 / (self.b_at(n) - z - an * an * mp - am * am * mm)
    }
}

fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Fixed point `m = (M00·m + M01) / (M10·m + M11)` with positive imaginary
/// part; for `Im z > 0` exactly one root of the quadratic is Herglotz.
fn herglotz_fixed_point(m: &[[Complex64; 2]; 2]) -> Complex64 {
    let a = m[1][0];
    let b = m[1][1] - m[0][0];
    let c = -m[0][1];
    if a.norm() < 1e-300 {
        return -c / b;
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    let r1 = (-b + disc) / (2.0 * a);
    let r2 = (-b - disc) / (2.0 * a);
    if r1.im > r2.im {
        r1
    } else {
        r2
    }
}

/// Constant-coefficient half-line m-function: the corner resolvent entry of
/// the semi-infinite Jacobi matrix with constant `a`, `b`. Behaves like
/// `-1/z` at infinity and maps the upper half plane into itself.
pub(crate) fn constant_tail_m(a: f64, b: f64, z: Complex64) -> Complex64 {
    if a == 0.0 {
        return 1.0 / (b - z);
    }
    let u = z - b;
    // √(u² - 4a²) on the branch ~ u at infinity
    let s = u * (1.0 - 4.0 * a * a / (u * u)).sqrt();
    (-u + s) / (2.0 * a * a)
}
