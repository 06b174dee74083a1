use nalgebra::DMatrix;
use num_complex::Complex64;

use super::haar::CMatrix;
use crate::error::{Error, Result};
use crate::exact::factorial;
use crate::moments::{boson_multi_indices, check_fermion_domain, fermion_sign, increasing_tuples};

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for l in (0..dims.len().saturating_sub(1)).rev() {
        s[l] = s[l + 1] * dims[l + 1];
    }
    s
}

fn check_layout(size: usize, dims: &[usize], keep: usize) -> Result<()> {
    let total: usize = dims.iter().product();
    if total != size {
        return Err(Error::Dimension(format!("factor dimensions {dims:?} multiply to {total}, matrix has size {size}")));
    }
    if keep >= dims.len() {
        return Err(Error::IndexOutOfRange { what: "kept factor".into(), value: keep + 1, bound: dims.len() });
    }
    Ok(())
}

/// `π_l(M)`: trace over every tensor factor except `keep` (0-based), multi-indices in
/// lexicographic order (the last factor varies fastest).
pub fn partial_trace(h: &CMatrix, dims: &[usize], keep: usize) -> Result<CMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!("matrix is {}x{}", h.nrows(), h.ncols())));
    }
    check_layout(h.nrows(), dims, keep)?;
    let n = dims[keep];
    let stride = strides(dims)[keep];
    let mut out = CMatrix::zeros(n, n);
    for x in 0..h.nrows() {
        let a = (x / stride) % n;
        let base = x - a * stride;
        for b in 0..n {
            out[(a, b)] += h[(x, base + b * stride)];
        }
    }
    Ok(out)
}

/// `π_l(V diag(w) V†)` without forming the full matrix; `V` is `N × r`.
pub fn partial_trace_factored(v: &CMatrix, weights: &[f64], dims: &[usize], keep: usize) -> Result<CMatrix> {
    check_layout(v.nrows(), dims, keep)?;
    if weights.len() != v.ncols() {
        return Err(Error::LengthMismatch { what: "weights", got: weights.len(), expected: v.ncols() });
    }
    let n = dims[keep];
    let stride = strides(dims)[keep];
    let mut out = CMatrix::zeros(n, n);
    for x in 0..v.nrows() {
        let a = (x / stride) % n;
        let base = x - a * stride;
        for b in 0..n {
            let y = base + b * stride;
            let mut acc = Complex64::new(0.0, 0.0);
            for (z, &w) in weights.iter().enumerate() {
                acc += v[(x, z)] * v[(y, z)].conj() * w;
            }
            out[(a, b)] += acc;
        }
    }
    Ok(out)
}

/// `S : Sym^k C^n → (C^n)^{⊗k}`, `S_{i,α} = √(α!/k!)` when `i` has occupation numbers `α`.
/// Columns follow [`boson_multi_indices`].
pub fn boson_embedding(n: usize, k: usize) -> Result<DMatrix<f64>> {
    if n == 0 || k == 0 {
        return Err(Error::Dimension(format!("need n, k >= 1, got n={n}, k={k}")));
    }
    let basis = boson_multi_indices(n, k);
    let rows = n.pow(k as u32);
    let mut s = DMatrix::zeros(rows, basis.len());
    let k_fact = factorial(k);
    for x in 0..rows {
        let mut alpha = vec![0usize; n];
        let mut rest = x;
        for _ in 0..k {
            alpha[rest % n] += 1;
            rest /= n;
        }
        let col = basis.iter().position(|b| *b == alpha).expect("occupation numbers sum to k");
        let alpha_fact = alpha.iter().fold(num_bigint::BigInt::from(1), |acc, &a| acc * factorial(a));
        let ratio = crate::exact::to_f64(&crate::exact::Exact::new(alpha_fact, k_fact.clone()));
        s[(x, col)] = ratio.sqrt();
    }
    Ok(s)
}

/// `A : ∧^k C^n → (C^n)^{⊗k}`, `A_{i,a} = sgn(i)/√k!` when `i` sorts to `a`. Columns follow
/// [`increasing_tuples`].
pub fn fermion_embedding(n: usize, k: usize) -> Result<DMatrix<f64>> {
    check_fermion_domain(n, k)?;
    let basis = increasing_tuples(n, k);
    let rows = n.pow(k as u32);
    let mut a = DMatrix::zeros(rows, basis.len());
    let scale = 1.0 / crate::exact::to_f64(&crate::exact::big(factorial(k))).sqrt();
    for x in 0..rows {
        let mut tuple = vec![0usize; k];
        let mut rest = x;
        for t in (0..k).rev() {
            tuple[t] = rest % n + 1;
            rest /= n;
        }
        let sign = fermion_sign(&tuple);
        if sign == 0 {
            continue;
        }
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        let col = basis.iter().position(|b| *b == sorted).expect("sorted tuple is a basis label");
        a[(x, col)] = f64::from(sign) * scale;
    }
    Ok(a)
}

fn embed(e: &DMatrix<f64>, v: &CMatrix) -> CMatrix {
    e.map(|x| Complex64::new(x, 0.0)) * v
}

/// `π(H) = π₁(E H Eᵀ)` for an embedding `E` into `(C^n)^{⊗k}`, with `H = V diag(w) V†`.
pub fn embedded_marginal(e: &DMatrix<f64>, v: &CMatrix, weights: &[f64], n: usize, k: usize) -> Result<CMatrix> {
    partial_trace_factored(&embed(e, v), weights, &vec![n; k], 0)
}

/// `π(H)_{ij} = (1/k) Σ_{|γ|=k−1} √((γ_i+1)(γ_j+1)) H_{e_i+γ, e_j+γ}`, `H` indexed by
/// [`boson_multi_indices`]`(n, k)`.
pub fn boson_marginal_from_entries(h: &CMatrix, n: usize, k: usize) -> Result<CMatrix> {
    let basis = boson_multi_indices(n, k);
    if h.nrows() != basis.len() {
        return Err(Error::Dimension(format!("boson space has dimension {}, matrix has {}", basis.len(), h.nrows())));
    }
    let position = |alpha: &Vec<usize>| basis.iter().position(|b| b == alpha).expect("valid occupation");
    let mut out = CMatrix::zeros(n, n);
    for gamma in boson_multi_indices(n, k - 1) {
        for i in 0..n {
            for j in 0..n {
                let mut row = gamma.clone();
                row[i] += 1;
                let mut col = gamma.clone();
                col[j] += 1;
                let w = (((gamma[i] + 1) * (gamma[j] + 1)) as f64).sqrt();
                out[(i, j)] += h[(position(&row), position(&col))] * w;
            }
        }
    }
    Ok(out / Complex64::new(k as f64, 0.0))
}

/// `π(H)_{ij} = (1/k) Σ_{l ∌ i,j} sgn(i,l) sgn(j,l) H_{sr(i,l), sr(j,l)}`, `H` indexed by
/// [`increasing_tuples`]`(n, k)`.
pub fn fermion_marginal_from_entries(h: &CMatrix, n: usize, k: usize) -> Result<CMatrix> {
    check_fermion_domain(n, k)?;
    let basis = increasing_tuples(n, k);
    if h.nrows() != basis.len() {
        return Err(Error::Dimension(format!("fermion space has dimension {}, matrix has {}", basis.len(), h.nrows())));
    }
    let label = |x: usize, l: &[usize]| {
        let mut v = vec![x];
        v.extend_from_slice(l);
        let sign = fermion_sign(&v);
        v.sort_unstable();
        (sign, basis.iter().position(|b| *b == v))
    };
    let mut out = CMatrix::zeros(n, n);
    for l in increasing_tuples(n, k - 1) {
        for i in 1..=n {
            for j in 1..=n {
                if l.contains(&i) || l.contains(&j) {
                    continue;
                }
                let ((si, ri), (sj, rj)) = (label(i, &l), label(j, &l));
                let (ri, rj) = (ri.expect("distinct entries"), rj.expect("distinct entries"));
                out[(i - 1, j - 1)] += h[(ri, rj)] * f64::from(si * sj);
            }
        }
    }
    Ok(out / Complex64::new(k as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::super::haar::{conjugate_spectrum, sample_haar_isometry, sample_haar_unitary};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() < tol)
    }

    fn is_isometry(e: &DMatrix<f64>) -> bool {
        let g = e.transpose() * e;
        (g - DMatrix::identity(e.ncols(), e.ncols())).iter().all(|x| x.abs() < 1e-12)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
        conjugate_spectrum(&lambda, &sample_haar_unitary(n, rng))
    }

    #[test]
    fn product_operator() {
        let a = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let b = CMatrix::from_diagonal_element(3, 3, Complex64::new(1.0 / 3.0, 0.0));
        let h = a.kronecker(&b);
        assert!(close(&partial_trace(&h, &[2, 3], 0).unwrap(), &a, 1e-12));
        let tr_a = a.trace();
        assert!(close(&partial_trace(&h, &[2, 3], 1).unwrap(), &(b * tr_a), 1e-12));
    }

    #[test]
    fn diagonal_two_by_two() {
        // λ reshaped as [[λ₁, λ₂], [λ₃, λ₄]]: π₁ takes row sums, π₂ column sums
        let lambda = [1.0, 2.0, 3.0, 4.0];
        let h = conjugate_spectrum(&lambda, &CMatrix::identity(4, 4));
        let p1 = partial_trace(&h, &[2, 2], 0).unwrap();
        let p2 = partial_trace(&h, &[2, 2], 1).unwrap();
        assert_eq!((p1[(0, 0)].re, p1[(1, 1)].re, p1[(0, 1)].norm()), (3.0, 7.0, 0.0));
        assert_eq!((p2[(0, 0)].re, p2[(1, 1)].re, p2[(1, 0)].norm()), (4.0, 6.0, 0.0));
    }

    #[test]
    fn trace_preserved_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(&mut rng, 12);
        for (dims, keep) in [(vec![3, 4], 0), (vec![3, 4], 1), (vec![2, 3, 2], 1), (vec![2, 3, 2], 2)] {
            let p = partial_trace(&h, &dims, keep).unwrap();
            assert!((p.trace() - h.trace()).norm() < 1e-12);
            assert!(close(&p, &p.adjoint(), 1e-12));
        }
        assert!(partial_trace(&h, &[5, 2], 0).is_err());
        assert!(partial_trace(&h, &[3, 4], 2).is_err());
    }

    #[test]
    fn factored_path_matches_full_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let v = sample_haar_isometry(12, 5, &mut rng);
        let w = [1.0, 0.5, -2.0, 3.0, 0.25];
        let h = &v * CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, w.iter().map(|&x| x.into()))) * v.adjoint();
        for (dims, keep) in [(vec![3, 4], 0), (vec![3, 4], 1), (vec![2, 3, 2], 1)] {
            assert!(close(&partial_trace_factored(&v, &w, &dims, keep).unwrap(), &partial_trace(&h, &dims, keep).unwrap(), 1e-12));
        }
    }

    #[test]
    fn embeddings_are_isometries() {
        for (n, k) in [(2, 1), (2, 2), (3, 2), (2, 3), (3, 3)] {
            let s = boson_embedding(n, k).unwrap();
            assert_eq!(s.shape(), (n.pow(k as u32), crate::exact::binomial_usize(n + k - 1, k)));
            assert!(is_isometry(&s));
        }
        for (n, k) in [(4, 2), (5, 2), (5, 3), (6, 3)] {
            let a = fermion_embedding(n, k).unwrap();
            assert_eq!(a.shape(), (n.pow(k as u32), crate::exact::binomial_usize(n, k)));
            assert!(is_isometry(&a));
        }
        assert!(fermion_embedding(3, 2).is_err());
    }

    #[test]
    fn entry_formulas_match_embedding_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, k) in [(2, 2), (3, 2), (2, 3)] {
            let s = boson_embedding(n, k).unwrap();
            let big_n = s.ncols();
            let u = sample_haar_unitary(big_n, &mut rng);
            let w: Vec<f64> = (0..big_n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let h = conjugate_spectrum(&w, &u);
            let via_entries = boson_marginal_from_entries(&h, n, k).unwrap();
            let via_embedding = embedded_marginal(&s, &u, &w, n, k).unwrap();
            assert!(close(&via_entries, &via_embedding, 1e-12), "boson n={n} k={k}");
        }
        for (n, k) in [(4, 2), (5, 3)] {
            let a = fermion_embedding(n, k).unwrap();
            let big_n = a.ncols();
            let u = sample_haar_unitary(big_n, &mut rng);
            let w: Vec<f64> = (0..big_n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let h = conjugate_spectrum(&w, &u);
            let via_entries = fermion_marginal_from_entries(&h, n, k).unwrap();
            let via_embedding = embedded_marginal(&a, &u, &w, n, k).unwrap();
            assert!(close(&via_entries, &via_embedding, 1e-12), "fermion n={n} k={k}");
        }
    }

    #[test]
    fn every_leg_gives_the_same_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (e, n, k) in [(boson_embedding(2, 3).unwrap(), 2, 3), (fermion_embedding(5, 3).unwrap(), 5, 3)] {
            let u = sample_haar_unitary(e.ncols(), &mut rng);
            let w: Vec<f64> = (0..e.ncols()).map(|_| rng.random_range(0.0..1.0)).collect();
            let big = embed(&e, &u);
            let first = partial_trace_factored(&big, &w, &vec![n; k], 0).unwrap();
            for leg in 1..k {
                assert!(close(&first, &partial_trace_factored(&big, &w, &vec![n; k], leg).unwrap(), 1e-12));
            }
        }
    }
}
