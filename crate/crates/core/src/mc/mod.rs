//! Monte-Carlo oracle: Haar sampling, partial traces through tensor factors or (anti)symmetric
//! embeddings, and reproducible parallel estimation of mixed moments.
//!
//! Samples are drawn in fixed-size batches. Batch `b` uses the ChaCha8 stream `b` of the
//! given seed and batch statistics are merged in batch order, so estimates are bit-identical
//! for every worker count.

mod haar;
mod marginal;

pub use haar::{conjugate_spectrum, ginibre, sample_haar_isometry, sample_haar_unitary, CMatrix};
pub use marginal::{
    boson_embedding, boson_marginal_from_entries, embedded_marginal, fermion_embedding,
    fermion_marginal_from_entries, partial_trace, partial_trace_factored,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::moments::{MomentQuery, System};
use crate::par::Execution;

/// Draws per RNG stream.
pub const BATCH: usize = 512;

/// Sample mean of a complex observable with standard errors of its real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: Complex64,
    pub standard_error: f64,
    pub imag_standard_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MomentEstimate {
    /// `(mean.re − exact) / SE`; infinite when the SE vanishes and the mean misses.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = self.mean.re - exact;
        if self.standard_error > 0.0 {
            diff / self.standard_error
        } else if diff.abs() < 1e-12 * exact.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }

    /// Variance of the real part, `SE² · samples`.
    pub fn variance(&self) -> f64 {
        self.standard_error * self.standard_error * self.samples as f64
    }
}

/// Running mean and centred second moments (Welford, merged with Chan's formula).
#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    count: usize,
    mean_re: f64,
    mean_im: f64,
    m2_re: f64,
    m2_im: f64,
}

impl Stats {
    fn push(&mut self, z: Complex64) {
        self.count += 1;
        let n = self.count as f64;
        let (d_re, d_im) = (z.re - self.mean_re, z.im - self.mean_im);
        self.mean_re += d_re / n;
        self.mean_im += d_im / n;
        self.m2_re += d_re * (z.re - self.mean_re);
        self.m2_im += d_im * (z.im - self.mean_im);
    }

    fn merge(self, other: Stats) -> Stats {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let (d_re, d_im) = (other.mean_re - self.mean_re, other.mean_im - self.mean_im);
        Stats {
            count: self.count + other.count,
            mean_re: self.mean_re + d_re * nb / n,
            mean_im: self.mean_im + d_im * nb / n,
            m2_re: self.m2_re + other.m2_re + d_re * d_re * na * nb / n,
            m2_im: self.m2_im + other.m2_im + d_im * d_im * na * nb / n,
        }
    }

    fn estimate(&self, seed: u64) -> MomentEstimate {
        let n = self.count as f64;
        let se = |m2: f64| if self.count > 1 { (m2 / (n - 1.0) / n).sqrt() } else { 0.0 };
        MomentEstimate {
            mean: Complex64::new(self.mean_re, self.mean_im),
            standard_error: se(self.m2_re),
            imag_standard_error: se(self.m2_im),
            samples: self.count,
            seed,
        }
    }
}

/// Draws marginals of `U diag(λ) U†` for one system.
///
/// With `c` the most frequent eigenvalue, `U diag(λ) U† = c·I + U diag(λ − c) U†`, so only the
/// columns of `U` at eigenvalues other than `c` are sampled; any fixed set of `r` columns of a
/// Haar unitary is distributed as a Haar `N × r` isometry. The marginals of `c·I` are
/// computed once.
#[derive(Debug, Clone)]
pub struct MarginalSampler {
    system: System,
    dimension: usize,
    weights: Vec<f64>,
    embedding: Option<DMatrix<f64>>,
    offset: Vec<CMatrix>,
}

impl MarginalSampler {
    pub fn new(system: &System, lambda: &[f64]) -> Result<Self> {
        system.validate()?;
        let dimension = system.dimension();
        if lambda.len() != dimension {
            return Err(Error::LengthMismatch { what: "spectrum", got: lambda.len(), expected: dimension });
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("spectrum has a non-finite value".into()));
        }
        let embedding = match *system {
            System::Boson { n, k } => Some(boson_embedding(n, k)?),
            System::Fermion { n, k } => Some(fermion_embedding(n, k)?),
            _ => None,
        };
        let shift = most_frequent(lambda);
        let weights = lambda.iter().filter(|&&x| x != shift).map(|&x| x - shift).collect();
        let mut sampler =
            MarginalSampler { system: system.clone(), dimension, weights: vec![shift; dimension], embedding, offset: Vec::new() };
        sampler.offset = sampler.marginals(&CMatrix::identity(dimension, dimension))?;
        sampler.weights = weights;
        Ok(sampler)
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    /// One draw of every single-particle marginal (one matrix for bosons and fermions).
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<CMatrix> {
        let v = sample_haar_isometry(self.dimension, self.weights.len(), rng);
        let mut out = self.marginals(&v).expect("sampler layout is validated at construction");
        for (m, c) in out.iter_mut().zip(&self.offset) {
            *m += c;
        }
        out
    }

    /// Marginals of `V diag(weights) V†`.
    fn marginals(&self, v: &CMatrix) -> Result<Vec<CMatrix>> {
        match (&self.system, &self.embedding) {
            (System::Boson { n, k } | System::Fermion { n, k }, Some(e)) => {
                embedded_marginal(e, v, &self.weights, *n, *k).map(|m| vec![m])
            }
            (system, _) => {
                let dims = system.marginal_dims();
                (0..dims.len()).map(|l| partial_trace_factored(v, &self.weights, &dims, l)).collect()
            }
        }
    }
}

/// Most frequent value; ties go to zero, then to the smallest value.
fn most_frequent(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(usize, bool, f64)> = None;
    for run in sorted.chunk_by(|a, b| a == b) {
        let key = (run.len(), run[0] == 0.0, run[0]);
        if best.is_none_or(|b| (key.0, key.1) > (b.0, b.1)) {
            best = Some(key);
        }
    }
    best.map_or(0.0, |b| b.2)
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Means of `observables(marginals)` over `samples` draws.
fn run_batches<F>(sampler: &MarginalSampler, samples: usize, seed: u64, exec: Execution, width: usize, observables: F) -> Vec<MomentEstimate>
where
    F: Fn(&[CMatrix], &mut Vec<Complex64>) + Sync + Send,
{
    let n_batches = samples.div_ceil(BATCH);
    let merged = exec.chunked_fold(
        n_batches,
        1,
        |range| {
            let mut stats = vec![Stats::default(); width];
            let mut values = Vec::with_capacity(width);
            for b in range {
                let mut rng = batch_rng(seed, b);
                let draws = BATCH.min(samples - b * BATCH);
                for _ in 0..draws {
                    let marginals = sampler.draw(&mut rng);
                    values.clear();
                    observables(&marginals, &mut values);
                    for (s, &z) in stats.iter_mut().zip(&values) {
                        s.push(z);
                    }
                }
            }
            stats
        },
        vec![Stats::default(); width],
        |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
    );
    merged.iter().map(|s| s.estimate(seed)).collect()
}

/// `∏_l ∏_α π_l(H)_{rows[α], cols[α]}` for one draw.
fn monomial(query: &MomentQuery, marginals: &[CMatrix]) -> Complex64 {
    let mut z = Complex64::new(1.0, 0.0);
    for (block, pi) in query.blocks.iter().zip(marginals) {
        for (&r, &c) in block.rows.iter().zip(&block.cols) {
            z *= pi[(r - 1, c - 1)];
        }
    }
    z
}

/// Estimates several moments of the same system from one shared sample set.
pub fn estimate_moments(queries: &[MomentQuery], lambda: &[f64], samples: usize, seed: u64, exec: Execution) -> Result<Vec<MomentEstimate>> {
    let Some(first) = queries.first() else {
        return Ok(Vec::new());
    };
    if let Some(q) = queries.iter().find(|q| q.system != first.system) {
        return Err(Error::Invalid(format!("queries mix systems {} and {}", first.system.name(), q.system.name())));
    }
    if samples < 2 {
        return Err(Error::Invalid(format!("need at least 2 samples, got {samples}")));
    }
    let sampler = MarginalSampler::new(&first.system, lambda)?;
    Ok(run_batches(&sampler, samples, seed, exec, queries.len(), |marginals, out| {
        out.extend(queries.iter().map(|q| monomial(q, marginals)));
    }))
}

pub fn estimate_moment(query: &MomentQuery, lambda: &[f64], samples: usize, seed: u64, exec: Execution) -> Result<MomentEstimate> {
    Ok(estimate_moments(std::slice::from_ref(query), lambda, samples, seed, exec)?.remove(0))
}

/// Entrywise statistics of `scale · π_l(H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSummary {
    pub mean: CMatrix,
    /// `E|X − E X|²` per entry (real plus imaginary variance).
    pub variance: DMatrix<f64>,
    /// Standard error of the real part of each entry.
    pub standard_error: DMatrix<f64>,
    pub samples: usize,
}

pub fn marginal_summary(system: &System, lambda: &[f64], factor: usize, scale: f64, samples: usize, seed: u64, exec: Execution) -> Result<MarginalSummary> {
    let dims = system.marginal_dims();
    let Some(&n) = dims.get(factor) else {
        return Err(Error::IndexOutOfRange { what: "marginal".into(), value: factor + 1, bound: dims.len() });
    };
    if samples < 2 {
        return Err(Error::Invalid(format!("need at least 2 samples, got {samples}")));
    }
    let sampler = MarginalSampler::new(system, lambda)?;
    let est = run_batches(&sampler, samples, seed, exec, n * n, |marginals, out| {
        out.extend(marginals[factor].iter().map(|z| z * scale));
    });
    // nalgebra iterates column-major, so entry (r, c) sits at c·n + r
    let at = |r: usize, c: usize| &est[c * n + r];
    Ok(MarginalSummary {
        mean: CMatrix::from_fn(n, n, |r, c| at(r, c).mean),
        variance: DMatrix::from_fn(n, n, |r, c| {
            let e = at(r, c);
            (e.standard_error.powi(2) + e.imag_standard_error.powi(2)) * e.samples as f64
        }),
        standard_error: DMatrix::from_fn(n, n, |r, c| at(r, c).standard_error),
        samples,
    })
}

#[cfg(test)]
mod tests;
