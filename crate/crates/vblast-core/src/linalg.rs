//! Minimal dense complex linear algebra for the detection chain: Hermitian
//! transpose, products, small Hermitian-positive-definite inverses and
//! orthogonal projections onto interferer-free subspaces.
//!
//! Everything here operates on tiny matrices (the Gram matrix is 1x1 for the
//! two-transmitter chain), so the implementations favour exact, checkable
//! contracts over blocked performance tricks.

use num_complex::Complex64;
use thiserror::Error;

/// Numerical tolerances used by this module, collected in one place.
pub mod tol {
    /// Relative pivot floor for the Cholesky elimination: a pivot below
    /// `HPD_PIVOT_REL * trace(G)` marks the Gram matrix as singular or not
    /// positive definite. Continuous channel distributions make exact rank
    /// deficiency measure-zero; this floor only guards degenerate inputs.
    pub const HPD_PIVOT_REL: f64 = 1e-14;
    /// Residual bound for projector properties (idempotence, Hermitian
    /// symmetry, interferer annihilation).
    pub const PROJECTOR_RESIDUAL: f64 = 1e-10;
    /// Residual bound for `G * inverse(G) - I` on conditioned inputs.
    pub const INVERSE_RESIDUAL: f64 = 1e-12;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular or not positive definite")]
    SingularMatrix,
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("rows and cols must both be at least 1")]
    EmptyDimension,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite(idx));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { rows: n, cols: n, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Stacks column vectors into an n-by-k matrix.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self, LinalgError> {
        let k = columns.len();
        if k == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        let n = columns[0].dim();
        for c in columns {
            if c.dim() != n {
                return Err(LinalgError::DimensionMismatch(
                    "columns have differing lengths".into(),
                ));
            }
        }
        let mut data = vec![Complex64::new(0.0, 0.0); n * k];
        for (j, c) in columns.iter().enumerate() {
            for i in 0..n {
                data[i * k + j] = c[i];
            }
        }
        Ok(Self { rows: n, cols: k, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector { data: (0..self.rows).map(|i| self.get(i, j)).collect() }
    }

    /// Conjugate transpose: `result[j][i] = conj(self[i][j])`.
    pub fn hermitian_transpose(&self) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * other.cols];
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..self.cols {
                    sum += self.get(r, k) * other.get(k, c);
                }
                data[r * other.cols + c] = sum;
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, data })
    }

    /// Matrix-vector product.
    pub fn mat_vec(&self, v: &ComplexVector) -> Result<ComplexVector, LinalgError> {
        if self.cols != v.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot apply {}x{} to a length-{} vector",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let data = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum())
            .collect();
        Ok(ComplexVector { data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("subtraction shape mismatch".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Entrywise max-modulus, used as an infinity-style norm in the contracts.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Inverse of a Hermitian positive definite matrix via Cholesky
    /// elimination. A pivot below `tol::HPD_PIVOT_REL * trace` is treated as
    /// singular. Only the lower triangle (and the real diagonal) is read.
    pub fn invert_hpd(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot invert non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let k = self.rows;
        let trace: f64 = (0..k).map(|i| self.get(i, i).re).sum();
        let floor = tol::HPD_PIVOT_REL * trace;

        // G = L L^H with L lower triangular.
        let mut l = vec![Complex64::new(0.0, 0.0); k * k];
        for j in 0..k {
            let mut d = self.get(j, j).re;
            for p in 0..j {
                d -= l[j * k + p].norm_sqr();
            }
            let pivot_ok = d.is_finite() && d > floor;
            if !pivot_ok {
                return Err(LinalgError::SingularMatrix);
            }
            let dj = d.sqrt();
            l[j * k + j] = Complex64::new(dj, 0.0);
            for i in (j + 1)..k {
                let mut s = self.get(i, j);
                for p in 0..j {
                    s -= l[i * k + p] * l[j * k + p].conj();
                }
                l[i * k + j] = s / dj;
            }
        }

        // Invert L by forward substitution (column by column of the identity).
        let mut linv = vec![Complex64::new(0.0, 0.0); k * k];
        for c in 0..k {
            for r in c..k {
                let rhs = if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                let mut s = rhs;
                for p in c..r {
                    s -= l[r * k + p] * linv[p * k + c];
                }
                linv[r * k + c] = s / l[r * k + r].re;
            }
        }

        // G^{-1} = L^{-H} L^{-1}.
        let mut data = vec![Complex64::new(0.0, 0.0); k * k];
        for i in 0..k {
            for j in 0..k {
                let mut s = Complex64::new(0.0, 0.0);
                for p in i.max(j)..k {
                    s += linv[p * k + i].conj() * linv[p * k + j];
                }
                data[i * k + j] = s;
            }
        }
        Ok(Self { rows: k, cols: k, data })
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite(idx));
        }
        Ok(Self { data })
    }

    pub fn from_reals(values: &[f64]) -> Self {
        Self { data: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![Complex64::new(0.0, 0.0); dim] }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Hermitian inner product `conj(self) . other`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "addition dimension mismatch");
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "subtraction dimension mismatch");
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn scaled_real(&self, factor: f64) -> Self {
        Self { data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, idx: usize) -> &Complex64 {
        &self.data[idx]
    }
}

/// Orthogonal projector onto the complement of the interferer columns:
/// `P = I - H (H^+ H)^{-1} H^+`. An empty interferer set yields the identity.
pub fn projection_matrix(
    dim: usize,
    interferers: &[ComplexVector],
) -> Result<ComplexMatrix, LinalgError> {
    if interferers.is_empty() {
        return Ok(ComplexMatrix::identity(dim));
    }
    for c in interferers {
        if c.dim() != dim {
            return Err(LinalgError::DimensionMismatch(format!(
                "interferer column has length {}, expected {dim}",
                c.dim()
            )));
        }
    }
    let h = ComplexMatrix::from_columns(interferers)?;
    let hh = h.hermitian_transpose();
    let gram_inv = hh.matmul(&h)?.invert_hpd()?;
    let p = ComplexMatrix::identity(dim).sub(&h.matmul(&gram_inv)?.matmul(&hh)?)?;
    Ok(p)
}

/// Component of `h` orthogonal to the span of the interferer columns
/// (`P h` for the projector above), computed as a Gram-solve residual with
/// one re-orthogonalization pass so the result stays orthogonal to every
/// interferer even for nearly collinear channels.
pub fn orthogonal_residual(
    h: &ComplexVector,
    interferers: &[ComplexVector],
) -> Result<ComplexVector, LinalgError> {
    if interferers.is_empty() {
        return Ok(h.clone());
    }
    let dim = h.dim();
    for c in interferers {
        if c.dim() != dim {
            return Err(LinalgError::DimensionMismatch(format!(
                "interferer column has length {}, expected {dim}",
                c.dim()
            )));
        }
    }
    let hm = ComplexMatrix::from_columns(interferers)?;
    let hh = hm.hermitian_transpose();
    let gram_inv = hh.matmul(&hm)?.invert_hpd()?;
    let project_out = |v: &ComplexVector| -> Result<ComplexVector, LinalgError> {
        let coeff = gram_inv.mat_vec(&hh.mat_vec(v)?)?;
        Ok(v.sub(&hm.mat_vec(&coeff)?))
    };
    let once = project_out(h)?;
    project_out(&once)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::RngStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, stream: &mut RngStream) -> ComplexMatrix {
        let data = (0..rows * cols)
            .map(|_| crate::channel::sample_complex_gaussian(stream, 1.0))
            .collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn hermitian_transpose_scalar_and_identity() {
        let m = ComplexMatrix::new(1, 1, vec![c(1.5, -2.0)]).unwrap();
        assert_eq!(m.hermitian_transpose().get(0, 0), c(1.5, 2.0));

        let id = ComplexMatrix::identity(4);
        assert_eq!(id.hermitian_transpose(), id);
    }

    #[test]
    fn hermitian_transpose_is_an_involution() {
        let mut stream = RngStream::new(7, 0);
        let m = random_matrix(3, 2, &mut stream);
        let back = m.hermitian_transpose().hermitian_transpose();
        assert_eq!(back.rows(), 3);
        for r in 0..3 {
            for cix in 0..2 {
                assert!((back.get(r, cix) - m.get(r, cix)).norm() == 0.0);
            }
        }
    }

    #[test]
    fn matmul_identity_and_imaginary_unit() {
        let mut stream = RngStream::new(8, 0);
        let m = random_matrix(3, 3, &mut stream);
        let prod = m.matmul(&ComplexMatrix::identity(3)).unwrap();
        assert!(prod.sub(&m).unwrap().max_abs() == 0.0);

        let i = ComplexMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        let sq = i.matmul(&i).unwrap();
        assert!((sq.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matmul_matches_hand_expansion() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 2.0)])
            .unwrap();
        let b = ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(1.0, -1.0), c(2.0, 2.0), c(0.0, 1.0)])
            .unwrap();
        let p = a.matmul(&b).unwrap();
        // Row 0: (1+i)(0.5) + 2(2+2i) = 4.5 + 4.5i ; (1+i)(1-i) + 2(i) = 2 + 2i
        assert!((p.get(0, 0) - c(4.5, 4.5)).norm() < 1e-14);
        assert!((p.get(0, 1) - c(2.0, 2.0)).norm() < 1e-14);
        // Row 1: (-i)(0.5) + (3+2i)(2+2i) = 2 + 9.5i ; (-i)(1-i) + (3+2i)(i) = -3 + 2i
        assert!((p.get(1, 0) - c(2.0, 9.5)).norm() < 1e-14);
        assert!((p.get(1, 1) - c(-3.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn matmul_rejects_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(LinalgError::DimensionMismatch(_))));
    }

    #[test]
    fn invert_hpd_scalar_and_diagonal() {
        let g = ComplexMatrix::new(1, 1, vec![c(2.0, 0.0)]).unwrap();
        assert!((g.invert_hpd().unwrap().get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);

        let d = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        let dinv = d.invert_hpd().unwrap();
        assert!((dinv.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((dinv.get(1, 1) - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn invert_hpd_residual_below_tolerance() {
        let mut stream = RngStream::new(11, 0);
        for _ in 0..50 {
            let a = random_matrix(4, 3, &mut stream);
            // G = A^+ A + I is comfortably positive definite.
            let mut g = a.hermitian_transpose().matmul(&a).unwrap();
            for i in 0..3 {
                let d = g.get(i, i);
                g.set(i, i, d + Complex64::new(1.0, 0.0));
            }
            let ginv = g.invert_hpd().unwrap();
            let residual = g.matmul(&ginv).unwrap().sub(&ComplexMatrix::identity(3)).unwrap();
            assert!(
                residual.max_abs() < tol::INVERSE_RESIDUAL,
                "residual {}",
                residual.max_abs()
            );
        }
    }

    #[test]
    fn invert_hpd_flags_singular_gram() {
        // Rank-one Gram matrix of two identical columns.
        let g = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(g.invert_hpd(), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn projection_onto_axis_complement() {
        let e1 = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let p = projection_matrix(2, &[e1]).unwrap();
        assert!(p.get(0, 0).norm() < 1e-15);
        assert!(p.get(0, 1).norm() < 1e-15);
        assert!(p.get(1, 0).norm() < 1e-15);
        assert!((p.get(1, 1) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_interferer_set_gives_identity() {
        let p = projection_matrix(3, &[]).unwrap();
        assert!(p.sub(&ComplexMatrix::identity(3)).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn projector_properties_on_random_channels() {
        let mut stream = RngStream::new(21, 0);
        for _ in 0..100 {
            let h = random_matrix(4, 2, &mut stream);
            let cols = [h.column(0), h.column(1)];
            let p = projection_matrix(4, &cols).unwrap();

            let idem = p.matmul(&p).unwrap().sub(&p).unwrap().max_abs();
            assert!(idem < tol::PROJECTOR_RESIDUAL, "idempotence residual {idem}");

            let herm = p.sub(&p.hermitian_transpose()).unwrap().max_abs();
            assert!(herm < tol::PROJECTOR_RESIDUAL, "symmetry residual {herm}");

            for col in &cols {
                let annihilated = p.mat_vec(col).unwrap().max_abs();
                assert!(annihilated < tol::PROJECTOR_RESIDUAL, "annihilation residual {annihilated}");
            }
        }
    }

    #[test]
    fn nested_projectors_compose_to_the_finer_one() {
        // Interferer sets {h1, h2} and {h2}: projecting onto the complement of
        // the superset after the subset equals projecting onto the superset's
        // complement directly, in either order.
        let mut stream = RngStream::new(33, 0);
        for _ in 0..100 {
            let h = random_matrix(4, 2, &mut stream);
            let big = projection_matrix(4, &[h.column(0), h.column(1)]).unwrap();
            let small = projection_matrix(4, &[h.column(1)]).unwrap();
            let left = big.matmul(&small).unwrap().sub(&big).unwrap().max_abs();
            let right = small.matmul(&big).unwrap().sub(&big).unwrap().max_abs();
            assert!(left < tol::PROJECTOR_RESIDUAL, "left residual {left}");
            assert!(right < tol::PROJECTOR_RESIDUAL, "right residual {right}");
        }
    }

    #[test]
    fn projection_matrix_propagates_dependent_columns() {
        let h1 = ComplexVector::new(vec![c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let h2 = h1.scaled(c(0.5, 0.5));
        assert_eq!(projection_matrix(2, &[h1, h2]), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn residual_of_parallel_vector_vanishes() {
        let v = ComplexVector::new(vec![c(1.0, 2.0), c(-0.5, 0.25)]).unwrap();
        let h = v.scaled(c(0.0, -3.0));
        let r = orthogonal_residual(&h, &[v]).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn residual_of_orthogonal_vector_is_unchanged() {
        let e1 = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e2 = ComplexVector::new(vec![c(0.0, 0.0), c(0.0, 2.0)]).unwrap();
        let r = orthogonal_residual(&e2, &[e1]).unwrap();
        assert!(r.sub(&e2).max_abs() < 1e-15);
    }

    #[test]
    fn residual_satisfies_pythagoras_and_orthogonality() {
        let mut stream = RngStream::new(55, 0);
        for _ in 0..100 {
            let h = random_matrix(4, 3, &mut stream);
            let target = h.column(0);
            let interferers = [h.column(1), h.column(2)];
            let perp = orthogonal_residual(&target, &interferers).unwrap();
            let parallel = target.sub(&perp);
            let lhs = target.norm_sqr();
            let rhs = perp.norm_sqr() + parallel.norm_sqr();
            assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0), "pythagoras {lhs} vs {rhs}");
            for col in &interferers {
                let dot = col.inner(&perp).norm() / (col.norm() * perp.norm()).max(1e-300);
                assert!(dot < tol::PROJECTOR_RESIDUAL, "orthogonality {dot}");
            }
        }
    }
}
