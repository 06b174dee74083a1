use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

/// `N × r` matrix of i.i.d. standard complex Gaussians (`E|z|² = 1`).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// First `r` columns of a Haar unitary of size `N`: QR of an `N × r` Ginibre matrix, with the
/// columns of `Q` rotated by the phases of `diag(R)`.
pub fn sample_haar_isometry<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> CMatrix {
    assert!(r <= n, "isometry needs r <= N");
    if r == 0 {
        return CMatrix::zeros(n, 0);
    }
    let qr = ginibre(n, r, rng).qr();
    let mut q = qr.q();
    let upper = qr.r();
    for c in 0..r {
        let d = upper[(c, c)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for x in q.column_mut(c).iter_mut() {
            *x *= phase;
        }
    }
    q
}

/// A Haar-distributed `N × N` unitary.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    sample_haar_isometry(n, n, rng)
}

/// `H = U diag(λ) U†`.
pub fn conjugate_spectrum(lambda: &[f64], u: &CMatrix) -> CMatrix {
    assert_eq!(lambda.len(), u.ncols(), "spectrum length must match the unitary");
    let mut scaled = u.clone();
    for (c, &l) in lambda.iter().enumerate() {
        for x in scaled.column_mut(c).iter_mut() {
            *x *= l;
        }
    }
    scaled * u.adjoint()
}
