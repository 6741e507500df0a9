//! Dense complex linear algebra for multi-qubit operators.
//!
//! Everything here works on square, dense, row-major matrices of
//! `Complex<f64>`; the register sizes this crate targets (up to 10 qubits,
//! dimension 1024) make dense storage the simplest correct choice. Qubit
//! indices are 1-based throughout the crate, and qubit 1 is the most
//! significant bit of a computational-basis index, so `|0...0>` is basis
//! index 0.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Max allowed |a_ij - conj(a_ji)| for a matrix passed to Hermitian routines.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Frobenius tolerance for eigendecomposition reconstruction checks.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Max allowed elementwise deviation of u^dagger u from the identity.
pub const UNITARITY_TOL: f64 = 1e-9;

/// Square dense complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    data: Array2<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { data: Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[[i, i]] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[[i, j]] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[[i, i]] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimMismatch(row.len(), dim));
            }
            for (j, v) in row.into_iter().enumerate() {
                m.data[[i, j]] = v;
            }
        }
        Ok(m)
    }

    /// Rank-one projector |v><v| of a (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[[i, j]] = v;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[[i, i]]).sum()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[[i, i]].re).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.data[[j, i]].conj())
    }

    /// Largest |a_ij - conj(a_ji)| over all entries; zero for exactly
    /// Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[[i, j]] - self.data[[j, i]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimMismatch(self.dim(), rhs.dim()));
        }
        Ok(Self { data: lapack::gemm(&self.data, &rhs.data) })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimMismatch(self.dim(), rhs.dim()));
        }
        Ok(Self { data: &self.data + &rhs.data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimMismatch(self.dim(), rhs.dim()));
        }
        Ok(Self { data: &self.data - &rhs.data })
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { data: self.data.mapv(|z| z * c) }
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn entries(&self) -> &[C64] {
        // Freshly constructed Array2 values are standard layout; every
        // constructor in this type goes through Array2::zeros or mapv.
        self.data.as_slice().expect("row-major layout")
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [C64] {
        self.data.as_slice_mut().expect("row-major layout")
    }

}

/// Eigensystem of a Hermitian matrix: real eigenvalues sorted non-increasing,
/// orthonormal eigenvector columns in matching order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// V diag(w) V^dagger, for reconstruction checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(&self.eigenvalues);
        self.eigenvectors
            .matmul(&d)
            .and_then(|vd| vd.matmul(&self.eigenvectors.dagger()))
            .expect("square factors")
    }
}

/// Kronecker product; output dimension is the product of the input dimensions.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Traces out every qubit not in `keep`. `keep` lists 1-based qubit indices;
/// the first listed qubit becomes the most significant bit of the reduced
/// register. Trace is preserved exactly up to floating-point addition order.
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize], qubit_count: usize) -> Result<ComplexMatrix> {
    let dim = m.dim();
    if dim != 1usize << qubit_count {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        return Err(Error::DimMismatch(dim, 1 << qubit_count));
    }
    let mut seen = vec![false; qubit_count + 1];
    for &q in keep {
        if q == 0 || q > qubit_count {
            return Err(Error::IndexOutOfRange { index: q, qubits: qubit_count });
        }
        if seen[q] {
            return Err(Error::DuplicateIndex(q));
        }
        seen[q] = true;
    }

    // Bit position of qubit q within a basis index (qubit 1 = MSB).
    let pos = |q: usize| qubit_count - q;
    let kept_pos: Vec<usize> = keep.iter().map(|&q| pos(q)).collect();
    let env_pos: Vec<usize> = (1..=qubit_count).filter(|q| !seen[*q]).map(pos).collect();

    let k = keep.len();
    let out_dim = 1usize << k;
    let env_dim = 1usize << env_pos.len();

    let scatter = |bits: usize, positions: &[usize]| -> usize {
        let mut idx = 0usize;
        for (b, &p) in positions.iter().enumerate() {
            // bit b of `bits` counts from the MOST significant position listed
            if bits >> (positions.len() - 1 - b) & 1 == 1 {
                idx |= 1 << p;
            }
        }
        idx
    };

    let row_base: Vec<usize> = (0..out_dim).map(|a| scatter(a, &kept_pos)).collect();
    let env_base: Vec<usize> = (0..env_dim).map(|e| scatter(e, &env_pos)).collect();

    let entries = m.entries();
    let mut out = ComplexMatrix::zeros(out_dim);
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut acc = C64::new(0.0, 0.0);
            for &e in &env_base {
                acc += entries[(row_base[a] | e) * dim + (row_base[b] | e)];
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues sorted
/// non-increasing with eigenvector columns in matching order.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    require_hermitian(m)?;
    let n = m.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0),
        });
    }
    let mut buf = m.entries().to_vec();
    let w = lapack::zheev_full(&mut buf, n)?;
    // The row-major buffer read column-major is conj(m), so LAPACK hands back
    // eigenvectors of conj(m) in its columns; conjugating those gives the
    // eigenvectors of m. Ascending order is flipped to non-increasing.
    let eigenvalues: Vec<f64> = w.iter().rev().cloned().collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| buf[i + (n - 1 - j) * n].conj());
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Eigenvalues only, sorted non-increasing. Much faster than `eig_hermitian`
/// at large dimension: uses the LAPACK two-stage reduction and drops to the
/// real symmetric divide-and-conquer driver when every imaginary part is
/// exactly zero.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(m)?;
    let n = m.dim();
    if n == 0 {
        return Ok(vec![]);
    }
    // A row-major Hermitian matrix reinterpreted as column-major is its
    // conjugate, which has the same (real) spectrum, so no transpose is
    // needed for the values-only call.
    let entries = m.entries();
    let mut w = if entries.iter().all(|z| z.im == 0.0) {
        let mut a: Vec<f64> = entries.iter().map(|z| z.re).collect();
        lapack::dsyevd_values(&mut a, n)
    } else {
        let mut a = entries.to_vec();
        lapack::zheev_2stage_values(&mut a, n)
    }?;
    w.reverse();
    Ok(w)
}

/// u * state * u^dagger. Errors unless `u` is unitary within `UNITARITY_TOL`.
pub fn apply_unitary(state: &ComplexMatrix, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if state.dim() != u.dim() {
        return Err(Error::DimMismatch(state.dim(), u.dim()));
    }
    require_unitary(u)?;
    u.matmul(state)?.matmul(&u.dagger())
}

pub fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect, tol: HERMITICITY_TOL });
    }
    Ok(())
}

pub fn require_unitary(u: &ComplexMatrix) -> Result<()> {
    let gram = u.dagger().matmul(u)?;
    let defect = gram.max_abs_diff(&ComplexMatrix::identity(u.dim()));
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary { defect, tol: UNITARITY_TOL });
    }
    Ok(())
}

mod lapack {
    //! Thin FFI onto the system OpenBLAS: Hermitian eigensolvers (values-only
    //! drivers plus the full-vector zheev) and complex gemm.
    //! The symbols resolve through the link that the openblas-src dependency
    //! establishes in the crate root.

    use super::C64;
    use crate::error::{Error, Result};
    use ndarray::Array2;

    extern "C" {
        fn zheev_(
            jobz: *const u8,
            uplo: *const u8,
            n: *const i32,
            a: *mut C64,
            lda: *const i32,
            w: *mut f64,
            work: *mut C64,
            lwork: *const i32,
            rwork: *mut f64,
            info: *mut i32,
        );
        fn dsyevd_(
            jobz: *const u8,
            uplo: *const u8,
            n: *const i32,
            a: *mut f64,
            lda: *const i32,
            w: *mut f64,
            work: *mut f64,
            lwork: *const i32,
            iwork: *mut i32,
            liwork: *const i32,
            info: *mut i32,
        );
        fn zheev_2stage_(
            jobz: *const u8,
            uplo: *const u8,
            n: *const i32,
            a: *mut C64,
            lda: *const i32,
            w: *mut f64,
            work: *mut C64,
            lwork: *const i32,
            rwork: *mut f64,
            info: *mut i32,
        );
        fn zgemm_(
            transa: *const u8,
            transb: *const u8,
            m: *const i32,
            n: *const i32,
            k: *const i32,
            alpha: *const C64,
            a: *const C64,
            lda: *const i32,
            b: *const C64,
            ldb: *const i32,
            beta: *const C64,
            c: *mut C64,
            ldc: *const i32,
        );
    }

    /// Ascending eigenvalues of a complex Hermitian matrix; `a` is
    /// overwritten with the eigenvectors, one per column-major column.
    pub fn zheev_full(a: &mut [C64], n: usize) -> Result<Vec<f64>> {
        debug_assert_eq!(a.len(), n * n);
        let (jobz, uplo) = (b'V', b'L');
        let n_i = n as i32;
        let mut w = vec![0.0f64; n];
        let mut rwork = vec![0.0f64; (3 * n).saturating_sub(2).max(1)];
        let mut info = 0i32;
        let mut query = [C64::new(0.0, 0.0)];
        unsafe {
            zheev_(&jobz, &uplo, &n_i, a.as_mut_ptr(), &n_i, w.as_mut_ptr(), query.as_mut_ptr(), &-1, rwork.as_mut_ptr(), &mut info);
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        let lwork = query[0].re as i32;
        let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
        unsafe {
            zheev_(&jobz, &uplo, &n_i, a.as_mut_ptr(), &n_i, w.as_mut_ptr(), work.as_mut_ptr(), &lwork, rwork.as_mut_ptr(), &mut info);
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        Ok(w)
    }

    /// Ascending eigenvalues of a real symmetric matrix via the
    /// divide-and-conquer driver; `a` is destroyed.
    pub fn dsyevd_values(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
        debug_assert_eq!(a.len(), n * n);
        let (jobz, uplo) = (b'N', b'L');
        let n_i = n as i32;
        let mut w = vec![0.0f64; n];
        let mut info = 0i32;
        let mut query = [0.0f64];
        let mut iquery = [0i32];
        unsafe {
            dsyevd_(&jobz, &uplo, &n_i, a.as_mut_ptr(), &n_i, w.as_mut_ptr(), query.as_mut_ptr(), &-1, iquery.as_mut_ptr(), &-1, &mut info);
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        let lwork = query[0] as i32;
        let liwork = iquery[0];
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        unsafe {
            dsyevd_(&jobz, &uplo, &n_i, a.as_mut_ptr(), &n_i, w.as_mut_ptr(), work.as_mut_ptr(), &lwork, iwork.as_mut_ptr(), &liwork, &mut info);
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        Ok(w)
    }

    /// Ascending eigenvalues of a complex Hermitian matrix; `a` is destroyed.
    pub fn zheev_2stage_values(a: &mut [C64], n: usize) -> Result<Vec<f64>> {
        debug_assert_eq!(a.len(), n * n);
        let (jobz, uplo) = (b'N', b'L');
        let n_i = n as i32;
        let mut w = vec![0.0f64; n];
        let mut rwork = vec![0.0f64; (3 * n).saturating_sub(2).max(1)];
        let mut info = 0i32;
        let mut query = [C64::new(0.0, 0.0)];
        unsafe {
            zheev_2stage_(&jobz, &uplo, &n_i, a.as_mut_ptr(), &n_i, w.as_mut_ptr(), query.as_mut_ptr(), &-1, rwork.as_mut_ptr(), &mut info);
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        let lwork = query[0].re as i32;
        let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
        unsafe {
            zheev_2stage_(&jobz, &uplo, &n_i, a.as_mut_ptr(), &n_i, w.as_mut_ptr(), work.as_mut_ptr(), &lwork, rwork.as_mut_ptr(), &mut info);
        }
        if info != 0 {
            return Err(Error::Eigensolver(info));
        }
        Ok(w)
    }

    /// Row-major C = A * B. Row-major data read as column-major is the
    /// transpose, and (AB)^T = B^T A^T, so swapping the operands gives the
    /// row-major product without any copies.
    pub fn gemm(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
        let n = a.nrows();
        debug_assert!(a.is_square() && b.is_square() && b.nrows() == n);
        let mut c = Array2::<C64>::zeros((n, n));
        if n == 0 {
            return c;
        }
        let n_i = n as i32;
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let tn = b'N';
        let (a_c, b_c) = (a.as_standard_layout(), b.as_standard_layout());
        let (a_s, b_s) = (
            a_c.as_slice().expect("row-major layout"),
            b_c.as_slice().expect("row-major layout"),
        );
        unsafe {
            zgemm_(
                &tn,
                &tn,
                &n_i,
                &n_i,
                &n_i,
                &one,
                b_s.as_ptr(),
                &n_i,
                a_s.as_ptr(),
                &n_i,
                &zero,
                c.as_slice_mut().expect("fresh array").as_mut_ptr(),
                &n_i,
            );
        }
        c
    }
}
