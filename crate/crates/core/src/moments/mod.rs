//! Exact mixed moments of marginal entries for distinguishable particles, bosons and
//! fermions.
//!
//! Every formula has the shape `Σ_{σ,τ ∈ S_d} w(σ) Wg_N(σ⁻¹τ) Tr_τ(λ)` with a per-system
//! weight `w`. Because `Wg` and `Tr` are class functions, the inner τ-sum is a class function
//! of σ and is computed once per cycle type; the outer σ-sum is data-parallel.

mod boson;
mod fermion;
pub mod naive;

pub use boson::{boson_multi_indices, delta_boson};
pub use fermion::{delta_fermion, fermion_sign, increasing_tuples};

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{big, binomial_usize, Exact};
use crate::par::Execution;
use crate::symgroup::{
    all_permutations, delta_unchecked, project, BlockLayout, CycleType, Permutation, DEFAULT_CAP,
};
use crate::weingarten::{ClassProducts, WgTable};

/// Fixed eigenvalues `λ`, listed in the lexicographic order of the basis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T> Spectrum<T> {
    pub fn new(values: Vec<T>) -> Self {
        Spectrum { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Spectrum<Exact> {
    pub fn from_integers(values: &[i64]) -> Self {
        Spectrum::new(values.iter().map(|&v| crate::exact::int(v)).collect())
    }

    /// `Tr(diag(λ)^p)`.
    pub fn power_sum(&self, p: usize) -> Exact {
        self.values.iter().fold(Exact::zero(), |acc, v| acc + num_traits::pow(v.clone(), p))
    }

    pub fn trace(&self) -> Exact {
        self.power_sum(1)
    }

    pub fn to_f64(&self) -> Spectrum<f64> {
        Spectrum::new(self.values.iter().map(crate::exact::to_f64).collect())
    }
}

impl Spectrum<f64> {
    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `Tr_τ(λ) = ∏_j Tr(diag(λ)^{μ_j})` for the cycle type `(μ_j)` of `τ`.
pub fn tr_tau(tau: &Permutation, lambda: &Spectrum<Exact>) -> Exact {
    tr_class(&tau.cycle_type(), lambda)
}

pub fn tr_class(class: &CycleType, lambda: &Spectrum<Exact>) -> Exact {
    class.parts().iter().fold(Exact::one(), |acc, &p| acc * lambda.power_sum(p))
}

/// The physical system whose marginals are queried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum System {
    /// `C^m ⊗ C^n`; marginals `π₁` (size m) and `π₂` (size n).
    TwoDistinguishable { m: usize, n: usize },
    /// `C^{n₁} ⊗ … ⊗ C^{n_k}`; one marginal per factor.
    Distinguishable { dims: Vec<usize> },
    /// `Sym^k C^n`.
    Boson { n: usize, k: usize },
    /// `∧^k C^n`, with `1 < k < n − 1`.
    Fermion { n: usize, k: usize },
}

impl System {
    pub fn validate(&self) -> Result<()> {
        match self {
            System::TwoDistinguishable { m, n } => {
                if *m == 0 || *n == 0 {
                    return Err(Error::Dimension(format!("factor dimensions must be positive, got ({m}, {n})")));
                }
            }
            System::Distinguishable { dims } => {
                if dims.is_empty() || dims.contains(&0) {
                    return Err(Error::Dimension(format!("factor dimensions must be positive, got {dims:?}")));
                }
            }
            System::Boson { n, k } => {
                if *n == 0 || *k == 0 {
                    return Err(Error::Dimension(format!("boson system needs n, k >= 1, got n={n}, k={k}")));
                }
            }
            System::Fermion { n, k } => check_fermion_domain(*n, *k)?,
        }
        Ok(())
    }

    /// Dimension `N` of the space `H` acts on.
    pub fn dimension(&self) -> usize {
        match self {
            System::TwoDistinguishable { m, n } => m * n,
            System::Distinguishable { dims } => dims.iter().product(),
            System::Boson { n, k } => binomial_usize(n + k - 1, *k),
            System::Fermion { n, k } => binomial_usize(*n, *k),
        }
    }

    /// Sizes of the marginals that index blocks refer to, one per block.
    pub fn marginal_dims(&self) -> Vec<usize> {
        match self {
            System::TwoDistinguishable { m, n } => vec![*m, *n],
            System::Distinguishable { dims } => dims.clone(),
            System::Boson { n, .. } | System::Fermion { n, .. } => vec![*n],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            System::TwoDistinguishable { .. } => "two",
            System::Distinguishable { .. } => "multi",
            System::Boson { .. } => "boson",
            System::Fermion { .. } => "fermion",
        }
    }
}

pub(crate) fn check_fermion_domain(n: usize, k: usize) -> Result<()> {
    if !(1 < k && k + 1 < n) {
        return Err(Error::Domain(format!("fermions need 1 < k < n - 1, got n={n}, k={k}")));
    }
    Ok(())
}

/// Row and column indices of the entries taken from one marginal: the monomial is
/// `∏_α π(H)_{rows[α], cols[α]}`. Indices are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexBlock {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl IndexBlock {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        IndexBlock { rows, cols }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A mixed moment `E[∏_l ∏_α π_l(H)_{i^{(l)}_α, j^{(l)}_α}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentQuery {
    pub system: System,
    pub blocks: Vec<IndexBlock>,
}

impl MomentQuery {
    /// `E[∏ π₁(H)_{i_α,k_α} ∏ π₂(H)_{j_β,l_β}]` on `C^m ⊗ C^n`.
    pub fn two(m: usize, n: usize, i: &[usize], k: &[usize], j: &[usize], l: &[usize]) -> Result<Self> {
        MomentQuery::new(
            System::TwoDistinguishable { m, n },
            vec![IndexBlock::new(i.to_vec(), k.to_vec()), IndexBlock::new(j.to_vec(), l.to_vec())],
        )
    }

    pub fn multi(dims: &[usize], blocks: Vec<IndexBlock>) -> Result<Self> {
        MomentQuery::new(System::Distinguishable { dims: dims.to_vec() }, blocks)
    }

    pub fn boson(n: usize, k: usize, i: &[usize], j: &[usize]) -> Result<Self> {
        MomentQuery::new(System::Boson { n, k }, vec![IndexBlock::new(i.to_vec(), j.to_vec())])
    }

    pub fn fermion(n: usize, k: usize, i: &[usize], j: &[usize]) -> Result<Self> {
        MomentQuery::new(System::Fermion { n, k }, vec![IndexBlock::new(i.to_vec(), j.to_vec())])
    }

    pub fn new(system: System, blocks: Vec<IndexBlock>) -> Result<Self> {
        system.validate()?;
        let dims = system.marginal_dims();
        if blocks.len() != dims.len() {
            return Err(Error::LengthMismatch { what: "index blocks", got: blocks.len(), expected: dims.len() });
        }
        for (l, (block, &bound)) in blocks.iter().zip(&dims).enumerate() {
            if block.rows.len() != block.cols.len() {
                return Err(Error::LengthMismatch {
                    what: "column indices",
                    got: block.cols.len(),
                    expected: block.rows.len(),
                });
            }
            for (side, seq) in [("rows", &block.rows), ("cols", &block.cols)] {
                if let Some(&bad) = seq.iter().find(|&&x| x == 0 || x > bound) {
                    return Err(Error::IndexOutOfRange { what: format!("block {} {side}", l + 1), value: bad, bound });
                }
            }
        }
        Ok(MomentQuery { system, blocks })
    }

    /// Total number of marginal entries in the monomial.
    pub fn degree(&self) -> usize {
        self.blocks.iter().map(IndexBlock::len).sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(IndexBlock::len).collect()
    }
}

/// An exact moment with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult {
    pub value: Exact,
    /// Number of σ with a nonzero weight; each contributes `d!` τ-terms.
    pub term_count: usize,
    pub elapsed: Duration,
}

/// Entry point for exact moment computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    pub cap: usize,
    pub exec: Execution,
}

impl Default for Engine {
    fn default() -> Self {
        Engine { cap: DEFAULT_CAP, exec: Execution::default() }
    }
}

impl Engine {
    pub fn new(cap: usize, exec: Execution) -> Self {
        Engine { cap, exec }
    }

    /// Default engine with the cap taken from `MOMENT_CAP` when set.
    pub fn from_env() -> Self {
        let cap = std::env::var("MOMENT_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP);
        Engine { cap, exec: Execution::default() }
    }

    pub fn with_execution(self, exec: Execution) -> Self {
        Engine { exec, ..self }
    }

    pub fn moment(&self, query: &MomentQuery, lambda: &Spectrum<Exact>) -> Result<MomentResult> {
        match &query.system {
            System::TwoDistinguishable { .. } => self.moment_two_distinguishable(query, lambda),
            System::Distinguishable { .. } => self.moment_k_distinguishable(query, lambda),
            System::Boson { .. } => self.moment_boson(query, lambda),
            System::Fermion { .. } => self.moment_fermion(query, lambda),
        }
    }

    /// Two distinguishable particles:
    /// `Σ_{σ,τ} δ_{pr₁σ}(i,k) δ_{pr₂σ}(j,l) n^{κ₂(σ)} m^{κ₁(σ)} Wg_{mn}(σ⁻¹τ) Tr_τ(λ)`.
    pub fn moment_two_distinguishable(&self, query: &MomentQuery, lambda: &Spectrum<Exact>) -> Result<MomentResult> {
        if !matches!(query.system, System::TwoDistinguishable { .. }) {
            return Err(Error::Invalid("expected a two-particle query".into()));
        }
        self.distinguishable(query, lambda)
    }

    /// `k` distinguishable particles:
    /// `Σ_{σ,τ} Wg_N(σ⁻¹τ) Tr_τ(λ) ∏_l δ_{pr_l σ}(i^{(l)}, j^{(l)}) n_l^{κ_l(σ)}`.
    pub fn moment_k_distinguishable(&self, query: &MomentQuery, lambda: &Spectrum<Exact>) -> Result<MomentResult> {
        if !matches!(query.system, System::Distinguishable { .. } | System::TwoDistinguishable { .. }) {
            return Err(Error::Invalid("expected a distinguishable-particle query".into()));
        }
        self.distinguishable(query, lambda)
    }

    fn distinguishable(&self, query: &MomentQuery, lambda: &Spectrum<Exact>) -> Result<MomentResult> {
        let dims = query.system.marginal_dims();
        let layout = BlockLayout::new(&query.block_sizes());
        let dims_exact: Vec<Exact> = dims.iter().map(|&d| big(d)).collect();
        self.sigma_tau_sum(query, lambda, |sigma| {
            let mut weight = Exact::one();
            for (l, block) in query.blocks.iter().enumerate() {
                if !delta_unchecked(&project(sigma, &layout, l), &block.rows, &block.cols) {
                    return Ok(Exact::zero());
                }
            }
            for cycle in sigma.cycles() {
                for (l, n_l) in dims_exact.iter().enumerate() {
                    if cycle.iter().all(|&x| layout.block_of(x) != l) {
                        weight *= n_l;
                    }
                }
            }
            Ok(weight)
        })
    }

    /// `k` bosons: `Σ_{σ,τ ∈ S_p} Wg_N(σ⁻¹τ) Tr_τ(λ) Δ^{n,k}_σ(i, j)`, `N = C(n+k−1, k)`.
    pub fn moment_boson(&self, query: &MomentQuery, lambda: &Spectrum<Exact>) -> Result<MomentResult> {
        let System::Boson { n, k } = query.system else {
            return Err(Error::Invalid("expected a boson query".into()));
        };
        let block = &query.blocks[0];
        self.sigma_tau_sum(query, lambda, |sigma| delta_boson(sigma, &block.rows, &block.cols, n, k))
    }

    /// `k` fermions: as for bosons with the fermionic `Δ` and `N = C(n, k)`.
    pub fn moment_fermion(&self, query: &MomentQuery, lambda: &Spectrum<Exact>) -> Result<MomentResult> {
        let System::Fermion { n, k } = query.system else {
            return Err(Error::Invalid("expected a fermion query".into()));
        };
        let block = &query.blocks[0];
        self.sigma_tau_sum(query, lambda, |sigma| delta_fermion(sigma, &block.rows, &block.cols, n, k))
    }

    /// `Σ_σ w(σ) · G(type σ)` with `G(ρ) = Σ_τ Wg_N(ρ⁻¹τ) Tr_τ(λ)`.
    fn sigma_tau_sum<W>(&self, query: &MomentQuery, lambda: &Spectrum<Exact>, weight: W) -> Result<MomentResult>
    where
        W: Fn(&Permutation) -> Result<Exact> + Sync + Send,
    {
        let start = Instant::now();
        let n_dim = query.system.dimension();
        if lambda.len() != n_dim {
            return Err(Error::LengthMismatch { what: "spectrum", got: lambda.len(), expected: n_dim });
        }
        let d = query.degree();
        let perms = all_permutations(d, self.cap)?;
        let products = ClassProducts::cached(d, self.cap)?;
        let wg = WgTable::cached(n_dim as u64, d);
        let n_classes = products.classes.len();

        let power_sums: Vec<Exact> = (0..=d).map(|p| lambda.power_sum(p)).collect();
        let traces: Vec<Exact> = products
            .classes
            .iter()
            .map(|c| c.parts().iter().fold(Exact::one(), |acc, &p| acc * &power_sums[p]))
            .collect();
        let inner = products.convolve(&wg, &traces);

        type Acc = Result<(Vec<Exact>, usize)>;
        let empty = || (vec![Exact::zero(); n_classes], 0usize);
        let (class_weights, term_count) = self.exec.chunked_fold(
            perms.len(),
            64,
            |range| -> Acc {
                let (mut acc, mut count) = empty();
                for sigma in &perms[range] {
                    let w = weight(sigma)?;
                    if !w.is_zero() {
                        acc[products.class_index(&sigma.cycle_type())] += w;
                        count += 1;
                    }
                }
                Ok((acc, count))
            },
            Ok(empty()),
            |a: Acc, b: Acc| {
                let (mut a, ca) = a?;
                let (b, cb) = b?;
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok((a, ca + cb))
            },
        )?;

        let value = class_weights.iter().zip(&inner).fold(Exact::zero(), |acc, (w, g)| acc + w * g);
        Ok(MomentResult { value, term_count, elapsed: start.elapsed() })
    }
}

pub(crate) fn check_indices(what: &str, seq: &[usize], bound: usize) -> Result<()> {
    if let Some(&bad) = seq.iter().find(|&&x| x == 0 || x > bound) {
        return Err(Error::IndexOutOfRange { what: what.to_string(), value: bad, bound });
    }
    Ok(())
}

pub(crate) fn k_power_inverse(k: usize, p: usize) -> Exact {
    Exact::new(BigInt::one(), num_traits::pow(BigInt::from(k), p))
}
