//! Thin LAPACK/BLAS layer over the system OpenBLAS.
//!
//! Everything here is pinned to a single BLAS thread so that results are
//! bit-reproducible regardless of host parallelism; concurrency belongs to
//! the caller (see [`crate::par`]).
//!
//! nalgebra's `DMatrix` storage is column-major and contiguous, which is
//! exactly the Fortran layout LAPACK expects, so matrices cross the FFI
//! boundary without copies.

use nalgebra::DMatrix;
use num_complex::Complex64 as c64;
use std::ffi::c_char;
use std::sync::Once;

use crate::error::CoreError;

type CMat = DMatrix<c64>;

extern "C" {
    fn openblas_set_num_threads(n: i32);

    fn zgemm3m_(
        transa: *const c_char,
        transb: *const c_char,
        m: *const i32,
        n: *const i32,
        k: *const i32,
        alpha: *const c64,
        a: *const c64,
        lda: *const i32,
        b: *const c64,
        ldb: *const i32,
        beta: *const c64,
        c: *mut c64,
        ldc: *const i32,
    );

    fn zheevd_(
        jobz: *const c_char,
        uplo: *const c_char,
        n: *const i32,
        a: *mut c64,
        lda: *const i32,
        w: *mut f64,
        work: *mut c64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );

    fn zgeqrf_(
        m: *const i32,
        n: *const i32,
        a: *mut c64,
        lda: *const i32,
        tau: *mut c64,
        work: *mut c64,
        lwork: *const i32,
        info: *mut i32,
    );

    fn zungqr_(
        m: *const i32,
        n: *const i32,
        k: *const i32,
        a: *mut c64,
        lda: *const i32,
        tau: *const c64,
        work: *mut c64,
        lwork: *const i32,
        info: *mut i32,
    );
}

static INIT: Once = Once::new();

/// Pin OpenBLAS to one thread. Called lazily by every entry point.
pub fn init() {
    INIT.call_once(|| unsafe {
        openblas_set_num_threads(1);
    });
}

/// Operand transform for [`gemm`].
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// Use the operand as stored.
    None,
    /// Conjugate transpose.
    Adjoint,
}

impl Op {
    fn flag(self) -> c_char {
        match self {
            Op::None => b'N' as c_char,
            Op::Adjoint => b'C' as c_char,
        }
    }

    fn dims(self, m: &CMat) -> (usize, usize) {
        match self {
            Op::None => (m.nrows(), m.ncols()),
            Op::Adjoint => (m.ncols(), m.nrows()),
        }
    }
}

/// `op_a(a) * op_b(b)` through `zgemm3m` (the 3-real-multiply complex kernel).
pub fn gemm(op_a: Op, a: &CMat, op_b: Op, b: &CMat) -> CMat {
    init();
    let (m, k) = op_a.dims(a);
    let (k2, n) = op_b.dims(b);
    assert_eq!(k, k2, "gemm inner dimension mismatch");
    let mut c = CMat::zeros(m, n);
    let (mi, ni, ki) = (m as i32, n as i32, k as i32);
    let lda = a.nrows() as i32;
    let ldb = b.nrows() as i32;
    let one = c64::new(1.0, 0.0);
    let zero = c64::new(0.0, 0.0);
    unsafe {
        zgemm3m_(
            &op_a.flag(),
            &op_b.flag(),
            &mi,
            &ni,
            &ki,
            &one,
            a.as_slice().as_ptr(),
            &lda,
            b.as_slice().as_ptr(),
            &ldb,
            &zero,
            c.as_mut_slice().as_mut_ptr(),
            &mi,
        );
    }
    c
}

/// Convenience product `a * b`.
pub fn mul(a: &CMat, b: &CMat) -> CMat {
    gemm(Op::None, a, Op::None, b)
}

fn zheevd_inplace(a: &mut [c64], n: usize, vectors: bool) -> Result<Vec<f64>, CoreError> {
    init();
    let jobz = (if vectors { b'V' } else { b'N' }) as c_char;
    let uplo = b'L' as c_char;
    let ni = n as i32;
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;

    // workspace query
    let mut wq = [c64::new(0.0, 0.0)];
    let mut rwq = [0.0f64];
    let mut iwq = [0i32];
    let neg = -1i32;
    unsafe {
        zheevd_(
            &jobz,
            &uplo,
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            wq.as_mut_ptr(),
            &neg,
            rwq.as_mut_ptr(),
            &neg,
            iwq.as_mut_ptr(),
            &neg,
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Eigensolver {
            detail: format!("zheevd workspace query failed, info = {info}"),
        });
    }
    let lwork = wq[0].re as i32;
    let lrwork = rwq[0] as i32;
    let liwork = iwq[0];
    let mut work = vec![c64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        zheevd_(
            &jobz,
            &uplo,
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Eigensolver {
            detail: format!(
                "zheevd did not converge (info = {info}); input may be ill-conditioned or contain non-finite entries"
            ),
        });
    }
    Ok(w)
}

/// Eigendecomposition of a Hermitian matrix (divide and conquer).
/// Returns ascending eigenvalues and the unitary matrix of eigenvectors
/// (column `j` pairs with eigenvalue `j`).
pub fn hermitian_eigen(h: &CMat) -> Result<(Vec<f64>, CMat), CoreError> {
    let n = h.nrows();
    assert_eq!(n, h.ncols());
    let mut a = h.clone();
    let w = zheevd_inplace(a.as_mut_slice(), n, true)?;
    Ok((w, a))
}

/// Eigenvalues only.
pub fn hermitian_eigenvalues(h: &CMat) -> Result<Vec<f64>, CoreError> {
    let n = h.nrows();
    assert_eq!(n, h.ncols());
    let mut a = h.clone();
    zheevd_inplace(a.as_mut_slice(), n, false)
}

/// Unitary factor of the QR factorization, with columns rephased so the
/// triangular factor has positive real diagonal. Applied to a matrix of iid
/// standard complex Gaussians this yields the uniform distribution on the
/// unitary group.
pub fn qr_unitary(mut g: CMat) -> Result<CMat, CoreError> {
    init();
    let n = g.nrows();
    assert_eq!(n, g.ncols());
    let ni = n as i32;
    let mut tau = vec![c64::new(0.0, 0.0); n];
    let mut info = 0i32;
    let neg = -1i32;

    unsafe {
        let mut wq = [c64::new(0.0, 0.0)];
        zgeqrf_(
            &ni,
            &ni,
            g.as_mut_slice().as_mut_ptr(),
            &ni,
            tau.as_mut_ptr(),
            wq.as_mut_ptr(),
            &neg,
            &mut info,
        );
        let lwork = wq[0].re as i32;
        let mut work = vec![c64::new(0.0, 0.0); lwork.max(1) as usize];
        zgeqrf_(
            &ni,
            &ni,
            g.as_mut_slice().as_mut_ptr(),
            &ni,
            tau.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Eigensolver {
            detail: format!("zgeqrf failed, info = {info}"),
        });
    }

    // diagonal of R before it is overwritten by the Q assembly
    let diag_phases: Vec<c64> = (0..n)
        .map(|j| {
            let r = g[(j, j)];
            let m = r.norm();
            if m == 0.0 {
                c64::new(1.0, 0.0)
            } else {
                r / m
            }
        })
        .collect();

    unsafe {
        let mut wq = [c64::new(0.0, 0.0)];
        zungqr_(
            &ni,
            &ni,
            &ni,
            g.as_mut_slice().as_mut_ptr(),
            &ni,
            tau.as_ptr(),
            wq.as_mut_ptr(),
            &neg,
            &mut info,
        );
        let lwork = wq[0].re as i32;
        let mut work = vec![c64::new(0.0, 0.0); lwork.max(1) as usize];
        zungqr_(
            &ni,
            &ni,
            &ni,
            g.as_mut_slice().as_mut_ptr(),
            &ni,
            tau.as_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Eigensolver {
            detail: format!("zungqr failed, info = {info}"),
        });
    }

    // absorb the R phases so that A = Q'R' with R' positive-diagonal
    for j in 0..n {
        let p = diag_phases[j];
        for i in 0..n {
            g[(i, j)] *= p;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_random(n: usize) -> CMat {
        let mut s = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, n, |_, _| c64::new(next(), next()))
    }

    #[test]
    fn gemm_matches_nalgebra() {
        let a = small_random(17);
        let b = small_random(17);
        let c = mul(&a, &b);
        let c_ref = &a * &b;
        let err = (&c - &c_ref).map(|z| z.norm()).max();
        assert!(err < 1e-12, "gemm error {err}");
    }

    #[test]
    fn gemm_adjoint_flags() {
        let a = small_random(11);
        let b = small_random(11);
        let c = gemm(Op::Adjoint, &a, Op::None, &b);
        let c_ref = a.adjoint() * &b;
        let err = (&c - &c_ref).map(|z| z.norm()).max();
        assert!(err < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_hermitian() {
        let g = small_random(24);
        let h = (&g + g.adjoint()).map(|z| z * 0.5);
        let (w, v) = hermitian_eigen(&h).unwrap();
        // ascending order
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let d = CMat::from_fn(24, 24, |i, j| {
            if i == j { c64::new(w[i], 0.0) } else { c64::new(0.0, 0.0) }
        });
        let rec = mul(&mul(&v, &d), &v.adjoint().into_owned());
        let err = (&rec - &h).map(|z| z.norm()).max();
        assert!(err < 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn qr_factor_is_unitary() {
        let g = small_random(32);
        let q = qr_unitary(g).unwrap();
        let qhq = gemm(Op::Adjoint, &q, Op::None, &q);
        let id = CMat::identity(32, 32);
        let err = (&qhq - &id).map(|z| z.norm()).max();
        assert!(err < 1e-13, "unitarity drift {err}");
    }
}
