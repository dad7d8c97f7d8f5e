//! Dense complex linear algebra at desk scale.
//!
//! Matrices here never exceed 81x81, so everything is straightforward
//! row-major storage with O(n^3) products and absolute entrywise tolerances.

use crate::error::{Error, Result};

pub use num_complex::Complex64;

/// Shorthand complex constructor.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self.get(r, col);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::BadEntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// 1x1 matrix holding a single scalar.
    pub fn scalar(z: Complex64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            entries: vec![z],
        }
    }

    /// Column vector from a slice of amplitudes.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    /// Row vector (bra) from a slice of amplitudes, entries taken as given.
    pub fn row(v: &[Complex64]) -> Self {
        Self {
            rows: 1,
            cols: v.len(),
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c] = z;
    }

    /// Column `c` as a plain amplitude vector.
    pub fn column_vec(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                lrows: self.rows,
                lcols: self.cols,
                rrows: other.rows,
                rcols: other.cols,
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for col in 0..other.cols {
                    let v = out.get(r, col) + a * other.get(k, col);
                    out.set(r, col, v);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; block (r, c) of the result is `self[r][c] * other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for col in 0..self.cols {
                let a = self.get(r, col);
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(
                            r * other.rows + r2,
                            col * other.cols + c2,
                            a * other.get(r2, c2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for col in 0..self.cols {
                out.set(col, r, self.get(r, col).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for col in 0..self.cols {
                out.set(col, r, self.get(r, col));
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape("add", other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape("sub", other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Maximum entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_same_shape("max_abs_diff", other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True iff `self * self^dagger` and `self^dagger * self` are within
    /// `tol` of the identity in max-norm.
    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.unitarity_deviation()? <= tol)
    }

    /// Max-norm deviation of `self * self^dagger` and `self^dagger * self`
    /// from the identity.
    pub fn unitarity_deviation(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let id = ComplexMatrix::identity(self.rows);
        let d = self.dagger();
        let a = self.matmul(&d)?.max_abs_diff(&id)?;
        let b = d.matmul(self)?.max_abs_diff(&id)?;
        Ok(a.max(b))
    }

    fn check_same_shape(&self, op: &'static str, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op,
                lrows: self.rows,
                lcols: self.cols,
                rrows: other.rows,
                rcols: other.cols,
            });
        }
        Ok(())
    }
}

/// The 2x2 Hadamard matrix, entries +-1/sqrt(2).
pub fn hadamard2() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::new(
        2,
        2,
        vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
    )
    .unwrap()
}

/// Discrete Fourier basis of dimension `n`, columns are the basis vectors.
pub fn fourier(n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    let norm = 1.0 / (n as f64).sqrt();
    for r in 0..n {
        for col in 0..n {
            let theta = 2.0 * std::f64::consts::PI * (r * col) as f64 / n as f64;
            m.set(r, col, c(norm * theta.cos(), norm * theta.sin()));
        }
    }
    m
}

/// Deterministic xorshift-based pseudo-random matrices for test oracles.
#[cfg(test)]
pub(crate) fn rng_matrix(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        // map to [-1, 1)
        (state >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    };
    let entries = (0..rows * cols).map(|_| c(next(), next())).collect();
    ComplexMatrix::new(rows, cols, entries).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::rng_matrix;

    /// Independent oracle: naive triple loop product.
    fn naive_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows(), b.cols());
        for r in 0..a.rows() {
            for col in 0..b.cols() {
                let mut acc = Complex64::ZERO;
                for k in 0..a.cols() {
                    acc += a.get(r, k) * b.get(k, col);
                }
                out.set(r, col, acc);
            }
        }
        out
    }

    #[test]
    fn matmul_identity_and_hadamard() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(id.matmul(&id).unwrap(), id);
        let h = hadamard2();
        let hh = h.matmul(&h).unwrap();
        assert!(hh.max_abs_diff(&id).unwrap() < 1e-12);
    }

    #[test]
    fn matmul_matches_triple_loop_oracle() {
        let a = rng_matrix(7, 3, 3);
        let b = rng_matrix(8, 3, 3);
        let got = a.matmul(&b).unwrap();
        let want = naive_matmul(&a, &b);
        assert!(got.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn matmul_rejects_dimension_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            a.matmul(&b),
            Err(Error::ShapeMismatch { op: "matmul", .. })
        ));
    }

    #[test]
    fn kron_identity_and_rank_one() {
        let id2 = ComplexMatrix::identity(2);
        assert_eq!(id2.kron(&id2), ComplexMatrix::identity(4));

        let u = ComplexMatrix::column(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let v = ComplexMatrix::column(&[c(3.0, 0.0), c(0.0, 1.0)]);
        let k = u.kron(&v);
        let want = ComplexMatrix::column(&[c(3.0, 0.0), c(0.0, 1.0), c(6.0, 0.0), c(0.0, 2.0)]);
        assert!(k.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn kron_is_associative() {
        let a = rng_matrix(1, 2, 2);
        let b = rng_matrix(2, 2, 2);
        let d = rng_matrix(3, 2, 2);
        let lhs = a.kron(&b.kron(&d));
        let rhs = a.kron(&b).kron(&d);
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn kron_is_bilinear() {
        let a = rng_matrix(4, 2, 2);
        let b = rng_matrix(5, 2, 2);
        let d = rng_matrix(6, 2, 2);
        let lhs = a.add(&b).unwrap().kron(&d);
        let rhs = a.kron(&d).add(&b.kron(&d)).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn dagger_involution_and_hand_case() {
        let a = rng_matrix(9, 3, 4);
        assert_eq!(a.dagger().dagger(), a);

        // dagger([[0, i], [0, 0]]) = [[0, 0], [-i, 0]]
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let want = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(m.dagger(), want);
        assert_eq!(ComplexMatrix::identity(3).dagger(), ComplexMatrix::identity(3));
    }

    #[test]
    fn dagger_is_contravariant() {
        let a = rng_matrix(10, 3, 3);
        let b = rng_matrix(11, 3, 3);
        let lhs = a.matmul(&b).unwrap().dagger();
        let rhs = b.dagger().matmul(&a.dagger()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn unitarity_checks() {
        assert!(ComplexMatrix::identity(3).is_unitary(1e-10).unwrap());
        let diag = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        assert!(!diag.is_unitary(1e-10).unwrap());
        assert!(hadamard2().is_unitary(1e-12).unwrap());
        assert!(fourier(3).is_unitary(1e-12).unwrap());
        // the dimension-2 Fourier basis is the Hadamard
        assert!(fourier(2).max_abs_diff(&hadamard2()).unwrap() < 1e-15);
        assert!(matches!(
            ComplexMatrix::zeros(2, 3).is_unitary(1e-10),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn unitarity_invariant_under_global_phase() {
        let h = hadamard2();
        let phase = c(0.6, 0.8); // modulus 1
        assert!(h.scale(phase).is_unitary(1e-12).unwrap());
    }

    #[test]
    fn max_abs_diff_cases() {
        let a = rng_matrix(12, 3, 3);
        assert_eq!(a.max_abs_diff(&a).unwrap(), 0.0);
        let id = ComplexMatrix::identity(2);
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(id.max_abs_diff(&z).unwrap(), 1.0);

        // entrywise loop oracle
        let b = rng_matrix(13, 3, 3);
        let mut worst = 0.0f64;
        for r in 0..3 {
            for col in 0..3 {
                worst = worst.max((a.get(r, col) - b.get(r, col)).norm());
            }
        }
        assert_eq!(a.max_abs_diff(&b).unwrap(), worst);
        assert!(matches!(
            a.max_abs_diff(&ComplexMatrix::zeros(2, 2)),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
