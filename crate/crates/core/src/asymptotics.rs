//! Leading-order asymptotics of two-particle mixed moments: fixed `n` with `m → ∞`, the
//! proportional regime `m = ⌈cn⌉`, and their trace-one ("physical") variants, together with
//! convergence diagnostics against the exact engine and the Monte-Carlo oracle.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{big, int, pow_signed, ratio, to_f64, Exact};
use crate::mc::{marginal_summary, MarginalSummary};
use crate::moments::{Engine, MomentQuery, Spectrum, System};
use crate::par::Execution;
use crate::symgroup::{all_permutations, delta_unchecked, max_cycles_mapping, CycleType, Permutation};

/// `μ[λ]`: one atom of weight `1/len` at every eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<Exact>,
}

impl EmpiricalMeasure {
    pub fn new(lambda: &Spectrum<Exact>) -> Self {
        EmpiricalMeasure { atoms: lambda.values().to_vec() }
    }

    pub fn atoms(&self) -> &[Exact] {
        &self.atoms
    }

    pub fn weight(&self) -> Exact {
        ratio(1, self.atoms.len() as i64)
    }

    /// `M_p = (1/len) Σ λ^p`.
    pub fn moment(&self, p: usize) -> Exact {
        if self.atoms.is_empty() {
            return Exact::zero();
        }
        let sum = self.atoms.iter().fold(Exact::zero(), |acc, a| acc + num_traits::pow(a.clone(), p));
        sum * self.weight()
    }
}

/// Power moments `M_1, …, M_{d_max}` of a measure, or trace limits `T_1, …` in the physical
/// setting. `M_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    values: Vec<Exact>,
}

impl MomentVector {
    /// `values[p − 1] = M_p`.
    pub fn new(values: Vec<Exact>) -> Self {
        MomentVector { values }
    }

    pub fn point_mass(a: &Exact, d_max: usize) -> Self {
        MomentVector::new((1..=d_max).map(|p| num_traits::pow(a.clone(), p)).collect())
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Exact] {
        &self.values
    }

    pub fn get(&self, p: usize) -> Result<Exact> {
        if p == 0 {
            return Ok(Exact::one());
        }
        self.values
            .get(p - 1)
            .cloned()
            .ok_or_else(|| Error::IndexOutOfRange { what: "moment order".into(), value: p, bound: self.values.len() })
    }

    /// `M_σ = ∏_j M_{c_j}` over the cycle lengths of `σ`.
    pub fn of_class(&self, class: &CycleType) -> Result<Exact> {
        class.parts().iter().try_fold(Exact::one(), |acc, &c| Ok(acc * self.get(c)?))
    }
}

pub fn empirical_moments(lambda: &Spectrum<Exact>, d_max: usize) -> MomentVector {
    let mu = EmpiricalMeasure::new(lambda);
    MomentVector::new((1..=d_max).map(|p| mu.moment(p)).collect())
}

/// Index pattern of `E[∏ π₁(H)_{i_α,k_α} ∏ π₂(H)_{j_β,l_β}]`; indices 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPattern {
    pub i: Vec<usize>,
    pub k: Vec<usize>,
    pub j: Vec<usize>,
    pub l: Vec<usize>,
}

impl IndexPattern {
    pub fn new(i: &[usize], k: &[usize], j: &[usize], l: &[usize]) -> Result<Self> {
        if i.len() != k.len() {
            return Err(Error::LengthMismatch { what: "k indices", got: k.len(), expected: i.len() });
        }
        if j.len() != l.len() {
            return Err(Error::LengthMismatch { what: "l indices", got: l.len(), expected: j.len() });
        }
        if let Some(&bad) = i.iter().chain(k).chain(j).chain(l).find(|&&x| x == 0) {
            return Err(Error::IndexOutOfRange { what: "indices are 1-based".into(), value: bad, bound: usize::MAX });
        }
        Ok(IndexPattern { i: i.to_vec(), k: k.to_vec(), j: j.to_vec(), l: l.to_vec() })
    }

    pub fn from_query(query: &MomentQuery) -> Result<Self> {
        match (&query.system, query.blocks.as_slice()) {
            (System::TwoDistinguishable { .. }, [a, b]) => IndexPattern::new(&a.rows, &a.cols, &b.rows, &b.cols),
            _ => Err(Error::Invalid("asymptotics are defined for two distinguishable particles".into())),
        }
    }

    pub fn p(&self) -> usize {
        self.i.len()
    }

    pub fn q(&self) -> usize {
        self.j.len()
    }

    /// The concrete query on `C^m ⊗ C^n`.
    pub fn query(&self, m: usize, n: usize) -> Result<MomentQuery> {
        MomentQuery::two(m, n, &self.i, &self.k, &self.j, &self.l)
    }
}

/// Which leading-order formula to use.
#[derive(Debug, Clone, PartialEq)]
pub enum Regime {
    /// `n` fixed, `m → ∞`, moments of `μ[λ]` converging.
    LargeM { n: usize },
    /// `m = ⌈cn⌉`, `n → ∞`.
    Proportional { c: Exact },
    /// `n` fixed, `m → ∞`, `Tr λ = 1` and `Tr λ^k → T_k`.
    PhysicalLargeM { n: usize },
    /// `m = ⌈cn⌉`, `n → ∞`, trace-one spectra.
    PhysicalProportional { c: Exact },
}

impl Regime {
    pub fn is_physical(&self) -> bool {
        matches!(self, Regime::PhysicalLargeM { .. } | Regime::PhysicalProportional { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::LargeM { .. } => "large-m",
            Regime::Proportional { .. } => "proportional",
            Regime::PhysicalLargeM { .. } => "physical-m",
            Regime::PhysicalProportional { .. } => "physical-n",
        }
    }

    /// `(m, n)` at sweep size `size` (`m` for the fixed-`n` regimes, `n` otherwise).
    pub fn dims_at(&self, size: usize) -> (usize, usize) {
        match self {
            Regime::LargeM { n } | Regime::PhysicalLargeM { n } => (size, *n),
            Regime::Proportional { c } | Regime::PhysicalProportional { c } => (ceil_times(c, size), size),
        }
    }
}

fn ceil_times(c: &Exact, n: usize) -> usize {
    let x = c * big(n);
    let q = x.numer().div_ceil(x.denom());
    q.to_usize().unwrap_or(usize::MAX)
}

/// `coefficient · n^{n_exponent} · m^{m_exponent} · c^{c_exponent}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticResult {
    pub regime: &'static str,
    pub coefficient: Exact,
    pub n_exponent: i64,
    pub m_exponent: i64,
    pub c_exponent: i64,
    /// `s(i, k)`; `None` when no permutation maps `i` to `k`.
    pub s_ik: Option<usize>,
    pub s_jl: Option<usize>,
}

impl AsymptoticResult {
    /// Value of the leading term at concrete parameters. Bases with a zero exponent are
    /// ignored.
    pub fn evaluate(&self, n: &Exact, m: &Exact, c: &Exact) -> Result<Exact> {
        if self.coefficient.is_zero() {
            return Ok(Exact::zero());
        }
        let power = |base: &Exact, e: i64| if e == 0 { Ok(Exact::one()) } else { pow_signed(base, e) };
        Ok(&self.coefficient * power(n, self.n_exponent)? * power(m, self.m_exponent)? * power(c, self.c_exponent)?)
    }

    fn vanishing(regime: &'static str, s_ik: Option<usize>, s_jl: Option<usize>) -> Self {
        AsymptoticResult { regime, coefficient: Exact::zero(), n_exponent: 0, m_exponent: 0, c_exponent: 0, s_ik, s_jl }
    }
}

impl fmt::Display for AsymptoticResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for (name, e) in [("n", self.n_exponent), ("m", self.m_exponent), ("c", self.c_exponent)] {
            if e != 0 {
                write!(f, " {name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `Σ_{σ ∈ S_p, δ_σ(a,b)=1, κ(σ) ∈ keep} weight(σ)`.
fn sigma_sum(a: &[usize], b: &[usize], cap: usize, keep: Option<usize>, weight: impl Fn(&Permutation) -> Result<Exact>) -> Result<Exact> {
    let mut total = Exact::zero();
    for sigma in all_permutations(a.len(), cap)? {
        if delta_unchecked(&sigma, a, b) && keep.is_none_or(|s| sigma.num_cycles() == s) {
            total += weight(&sigma)?;
        }
    }
    Ok(total)
}

fn s_values(q: &IndexPattern, cap: usize) -> Result<(Option<usize>, Option<usize>)> {
    Ok((max_cycles_mapping(&q.i, &q.k, cap)?, max_cycles_mapping(&q.j, &q.l, cap)?))
}

fn needs_order(moments: &MomentVector, q: &IndexPattern) -> Result<()> {
    let d = q.p().max(q.q());
    if moments.max_order() < d {
        return Err(Error::LengthMismatch { what: "moment vector", got: moments.max_order(), expected: d });
    }
    Ok(())
}

/// `[Σ_{κ(σ)=s_ik} Σ_{κ(τ)=s_jl} δ δ M_σ M_τ]` shared by the generic regimes.
fn generic_coefficient(q: &IndexPattern, mu: &MomentVector, s_ik: usize, s_jl: usize, cap: usize) -> Result<Exact> {
    let a = sigma_sum(&q.i, &q.k, cap, Some(s_ik), |s| mu.of_class(&s.cycle_type()))?;
    let b = sigma_sum(&q.j, &q.l, cap, Some(s_jl), |t| mu.of_class(&t.cycle_type()))?;
    Ok(a * b)
}

/// Fixed `n`, `m → ∞`: coefficient · `n^{2s(i,k)+s(j,l)−p−q} m^{s(i,k)+2s(j,l)−p−q}`.
pub fn asymptotic_moment_large_m(q: &IndexPattern, mu: &MomentVector, cap: usize) -> Result<AsymptoticResult> {
    needs_order(mu, q)?;
    let (s_ik, s_jl) = s_values(q, cap)?;
    let (Some(a), Some(b)) = (s_ik, s_jl) else {
        return Ok(AsymptoticResult::vanishing("large-m", s_ik, s_jl));
    };
    let pq = (q.p() + q.q()) as i64;
    let (a, b) = (a as i64, b as i64);
    Ok(AsymptoticResult {
        regime: "large-m",
        coefficient: generic_coefficient(q, mu, a as usize, b as usize, cap)?,
        n_exponent: 2 * a + b - pq,
        m_exponent: a + 2 * b - pq,
        c_exponent: 0,
        s_ik,
        s_jl,
    })
}

/// `m = ⌈cn⌉`: coefficient · `c^{s(i,k)+2s(j,l)−p−q} n^{3(s(i,k)+s(j,l))−2(p+q)}`.
pub fn asymptotic_moment_proportional(q: &IndexPattern, mu: &MomentVector, cap: usize) -> Result<AsymptoticResult> {
    needs_order(mu, q)?;
    let (s_ik, s_jl) = s_values(q, cap)?;
    let (Some(a), Some(b)) = (s_ik, s_jl) else {
        return Ok(AsymptoticResult::vanishing("proportional", s_ik, s_jl));
    };
    let pq = (q.p() + q.q()) as i64;
    let (a, b) = (a as i64, b as i64);
    Ok(AsymptoticResult {
        regime: "proportional",
        coefficient: generic_coefficient(q, mu, a as usize, b as usize, cap)?,
        n_exponent: 3 * (a + b) - 2 * pq,
        m_exponent: 0,
        c_exponent: a + 2 * b - pq,
        s_ik,
        s_jl,
    })
}

/// Trace-one spectra with `Tr λ^k → T_k`.
///
/// For fixed `n` the σ-sum over `S_p` is not restricted to maximal `κ(σ)`:
/// `[Σ_σ Σ_{κ(τ)=s(j,l)} δ δ n^{κ(σ)−p−q} T_σ T_τ] · m^{s(j,l)−p−q}`; the coefficient
/// includes the powers of `n`. For `m = ⌈cn⌉`:
/// `[Σ_{κ=s(i,k)} Σ_{κ=s(j,l)} δ δ T_σ T_τ] c^{s(j,l)−p−q} n^{s(i,k)+s(j,l)−2(p+q)}`.
pub fn asymptotic_moment_physical(q: &IndexPattern, t: &MomentVector, regime: &Regime, cap: usize) -> Result<AsymptoticResult> {
    needs_order(t, q)?;
    if t.max_order() == 0 || !t.get(1)?.is_one() {
        return Err(Error::Domain("physical regimes need trace-one spectra (T_1 = 1)".into()));
    }
    let (s_ik, s_jl) = s_values(q, cap)?;
    let name = regime.name();
    let (Some(a), Some(b)) = (s_ik, s_jl) else {
        return Ok(AsymptoticResult::vanishing(name, s_ik, s_jl));
    };
    let pq = (q.p() + q.q()) as i64;
    let tau_sum = sigma_sum(&q.j, &q.l, cap, Some(b), |tau| t.of_class(&tau.cycle_type()))?;
    match regime {
        Regime::PhysicalLargeM { n } => {
            let n_exact = big(*n);
            let sigma_part = sigma_sum(&q.i, &q.k, cap, None, |s| {
                Ok(pow_signed(&n_exact, s.num_cycles() as i64 - pq)? * t.of_class(&s.cycle_type())?)
            })?;
            Ok(AsymptoticResult {
                regime: name,
                coefficient: sigma_part * tau_sum,
                n_exponent: 0,
                m_exponent: b as i64 - pq,
                c_exponent: 0,
                s_ik,
                s_jl,
            })
        }
        Regime::PhysicalProportional { .. } => {
            let sigma_part = sigma_sum(&q.i, &q.k, cap, Some(a), |s| t.of_class(&s.cycle_type()))?;
            Ok(AsymptoticResult {
                regime: name,
                coefficient: sigma_part * tau_sum,
                n_exponent: (a + b) as i64 - 2 * pq,
                m_exponent: 0,
                c_exponent: b as i64 - pq,
                s_ik,
                s_jl,
            })
        }
        _ => Err(Error::Invalid(format!("{name} is not a physical regime"))),
    }
}

/// Dispatch on the regime; `limits` holds `M_p(μ)` or `T_p`.
pub fn asymptotic_moment(q: &IndexPattern, limits: &MomentVector, regime: &Regime, cap: usize) -> Result<AsymptoticResult> {
    match regime {
        Regime::LargeM { .. } => asymptotic_moment_large_m(q, limits, cap),
        Regime::Proportional { .. } => asymptotic_moment_proportional(q, limits, cap),
        _ => asymptotic_moment_physical(q, limits, regime, cap),
    }
}

/// Leading term evaluated at sweep size `size`.
pub fn leading_value(result: &AsymptoticResult, regime: &Regime, size: usize) -> Result<Exact> {
    let (m, n) = regime.dims_at(size);
    let c = match regime {
        Regime::Proportional { c } | Regime::PhysicalProportional { c } => c.clone(),
        _ => Exact::one(),
    };
    result.evaluate(&big(n), &big(m), &c)
}

/// Deterministic spectrum sequences used by the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSequence {
    /// Every atom equal to 1; `μ = δ₁`.
    Flat,
    /// All ones except a first atom equal to 4; `μ = δ₁`.
    Spike,
    /// First half ones, second half zeros; `μ = ½δ₀ + ½δ₁`.
    Half,
    /// `(1, 0, …, 0)`; trace one, `T_k = 1`.
    RankOne,
    /// Every atom `1/size`; trace one, `T_1 = 1`, `T_k → 0` for `k ≥ 2`.
    NormalizedFlat,
}

impl SpectrumSequence {
    pub const ALL: [SpectrumSequence; 5] = [
        SpectrumSequence::Flat,
        SpectrumSequence::Spike,
        SpectrumSequence::Half,
        SpectrumSequence::RankOne,
        SpectrumSequence::NormalizedFlat,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpectrumSequence::Flat => "flat",
            SpectrumSequence::Spike => "spike",
            SpectrumSequence::Half => "half",
            SpectrumSequence::RankOne => "rank-one",
            SpectrumSequence::NormalizedFlat => "normalized-flat",
        }
    }

    pub fn is_trace_one(&self) -> bool {
        matches!(self, SpectrumSequence::RankOne | SpectrumSequence::NormalizedFlat)
    }

    pub fn spectrum(&self, size: usize) -> Spectrum<Exact> {
        let values = (0..size)
            .map(|x| match self {
                SpectrumSequence::Flat => int(1),
                SpectrumSequence::Spike => int(if x == 0 { 4 } else { 1 }),
                SpectrumSequence::Half => int(if x < size / 2 { 1 } else { 0 }),
                SpectrumSequence::RankOne => int(if x == 0 { 1 } else { 0 }),
                SpectrumSequence::NormalizedFlat => ratio(1, size as i64),
            })
            .collect();
        Spectrum::new(values)
    }

    /// `M_p(μ)` of the weak limit (generic regimes) or `T_p` (trace-one sequences).
    pub fn limits(&self, d_max: usize) -> MomentVector {
        let value = |p: usize| match self {
            SpectrumSequence::Flat | SpectrumSequence::Spike | SpectrumSequence::RankOne => int(1),
            SpectrumSequence::Half => ratio(1, 2),
            SpectrumSequence::NormalizedFlat => int(if p == 1 { 1 } else { 0 }),
        };
        MomentVector::new((1..=d_max).map(value).collect())
    }
}

impl FromStr for SpectrumSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpectrumSequence::ALL
            .into_iter()
            .find(|seq| seq.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown spectrum sequence {s:?}")))
    }
}

impl fmt::Display for SpectrumSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One size of a convergence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub m: usize,
    pub n: usize,
    pub exact: Exact,
    pub leading: Exact,
    /// `exact / leading`, absent when the leading term vanishes.
    pub ratio: Option<Exact>,
    pub relative_error: Option<f64>,
}

/// Exact moments along a spectrum sequence against the predicted leading term.
pub fn convergence_diagnostic(
    q: &IndexPattern,
    sequence: SpectrumSequence,
    regime: &Regime,
    sizes: &[usize],
    engine: &Engine,
) -> Result<Vec<DiagnosticRow>> {
    if regime.is_physical() != sequence.is_trace_one() {
        return Err(Error::Invalid(format!("sequence {sequence} does not fit the {} regime", regime.name())));
    }
    let d = q.p().max(q.q()).max(1);
    let leading = asymptotic_moment(q, &sequence.limits(d), regime, engine.cap)?;
    let inner = engine.with_execution(Execution::Sequential);
    engine
        .exec
        .map_indexed(sizes.len(), |idx| {
            let size = sizes[idx];
            let (m, n) = regime.dims_at(size);
            let exact = inner.moment(&q.query(m, n)?, &sequence.spectrum(m * n))?.value;
            let lead = leading_value(&leading, regime, size)?;
            let ratio = (!lead.is_zero()).then(|| &exact / &lead);
            let relative_error = ratio.as_ref().map(|r| to_f64(&(r - Exact::one()).abs()));
            Ok(DiagnosticRow { m, n, exact, leading: lead, ratio, relative_error })
        })
        .into_iter()
        .collect()
}

/// `π₂(m⁻¹H)` (or `π₂(H)` for trace-one sequences) sampled at each `m` with fixed `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlnRow {
    pub m: usize,
    pub n: usize,
    pub summary: MarginalSummary,
    /// Predicted limit of every diagonal entry: `M₁(μ)`, or `1/n` for trace-one sequences.
    pub predicted_diagonal: f64,
}

pub fn lln_diagnostic(sequence: SpectrumSequence, n: usize, ms: &[usize], samples: usize, seed: u64, exec: Execution) -> Result<Vec<LlnRow>> {
    ms.iter()
        .map(|&m| {
            let lambda: Vec<f64> = sequence.spectrum(m * n).values().iter().map(to_f64).collect();
            let (scale, predicted) = if sequence.is_trace_one() {
                (1.0, 1.0 / n as f64)
            } else {
                (1.0 / m as f64, to_f64(&sequence.limits(1).values()[0]))
            };
            let system = System::TwoDistinguishable { m, n };
            let summary = marginal_summary(&system, &lambda, 1, scale, samples, seed, exec)?;
            Ok(LlnRow { m, n, summary, predicted_diagonal: predicted })
        })
        .collect()
}

/// `Tr_τ(λ) = len^{κ(τ)} M_τ(μ[λ])`.
pub fn trace_via_moments(class: &CycleType, lambda: &Spectrum<Exact>) -> Exact {
    let mu = empirical_moments(lambda, class.size());
    let scale = num_traits::pow(BigInt::from(lambda.len()), class.len());
    big(scale) * mu.of_class(class).expect("moments cover the class")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::tr_class;
    use crate::symgroup::partitions;
    use proptest::prelude::*;

    fn pat(i: &[usize], k: &[usize], j: &[usize], l: &[usize]) -> IndexPattern {
        IndexPattern::new(i, k, j, l).unwrap()
    }

    #[test]
    fn empirical_moment_examples() {
        let flat = Spectrum::new(vec![ratio(3, 2); 6]);
        assert_eq!(empirical_moments(&flat, 3), MomentVector::point_mass(&ratio(3, 2), 3));
        let unit = Spectrum::from_integers(&[1, 0, 0, 0]);
        assert!(empirical_moments(&unit, 4).values().iter().all(|v| *v == ratio(1, 4)));
        let zero = Spectrum::from_integers(&[0, 0, 0]);
        assert!(empirical_moments(&zero, 3).values().iter().all(Zero::is_zero));
        let mu = EmpiricalMeasure::new(&unit);
        assert_eq!(mu.weight() * big(mu.atoms().len()), int(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn trace_equals_scaled_moments(vals in prop::collection::vec(-5i64..=5, 1..9), d in 1usize..=4) {
            let lambda = Spectrum::from_integers(&vals);
            for class in partitions(d) {
                prop_assert_eq!(trace_via_moments(&class, &lambda), tr_class(&class, &lambda));
            }
        }
    }

    #[test]
    fn diagonal_pattern_corollaries() {
        let mu = MomentVector::new(vec![ratio(2, 3), int(5), int(7)]);
        for (p, q) in [(1usize, 1usize), (2, 1), (0, 2), (3, 0), (2, 2)] {
            let i: Vec<usize> = (1..=p).collect();
            let j: Vec<usize> = (1..=q).map(|x| x % 2 + 1).collect();
            let query = pat(&i, &i, &j, &j);
            let m1 = num_traits::pow(ratio(2, 3), p + q);
            let lm = asymptotic_moment_large_m(&query, &mu, 7).unwrap();
            assert_eq!((lm.coefficient.clone(), lm.n_exponent, lm.m_exponent), (m1.clone(), p as i64, q as i64));
            let pr = asymptotic_moment_proportional(&query, &mu, 7).unwrap();
            assert_eq!((pr.coefficient, pr.c_exponent, pr.n_exponent), (m1, q as i64, (p + q) as i64));
        }
        let empty = asymptotic_moment_proportional(&pat(&[], &[], &[], &[]), &mu, 7).unwrap();
        assert_eq!((empty.coefficient, empty.c_exponent, empty.n_exponent), (int(1), 0, 0));
    }

    #[test]
    fn special_cases_of_large_m() {
        let mu = MomentVector::new(vec![int(2), int(3), int(5)]);
        // q = 0: Σ_{κ=s} δ M_σ · n^{2s−p} m^{s−p}
        let r = asymptotic_moment_large_m(&pat(&[1, 2, 1], &[2, 1, 1], &[], &[]), &mu, 7).unwrap();
        assert_eq!(r.s_ik, Some(2));
        // σ with two cycles mapping (1,2,1) to (2,1,1): the transposition exchanging the first
        // two letters, M_σ = M₂ M₁
        assert_eq!((r.coefficient, r.n_exponent, r.m_exponent), (int(6), 1, -1));
        // p = 0: Σ_{κ=s} δ M_τ · n^{s−q} m^{2s−q}
        let r = asymptotic_moment_large_m(&pat(&[], &[], &[1, 1], &[1, 1]), &mu, 7).unwrap();
        assert_eq!((r.coefficient, r.n_exponent, r.m_exponent), (int(4), 0, 2));
        let r = asymptotic_moment_large_m(&pat(&[], &[], &[1, 2], &[2, 1]), &mu, 7).unwrap();
        assert_eq!((r.coefficient, r.n_exponent, r.m_exponent), (int(3), -1, 0));
    }

    #[test]
    fn mismatched_multisets_vanish() {
        let mu = MomentVector::new(vec![int(1); 3]);
        let r = asymptotic_moment_large_m(&pat(&[1, 2], &[1, 1], &[1], &[1]), &mu, 7).unwrap();
        assert!(r.coefficient.is_zero());
        assert_eq!(r.s_ik, None);
        assert!(r.evaluate(&int(2), &int(3), &int(1)).unwrap().is_zero());
    }

    #[test]
    fn diagonal_exponents_dominate() {
        let mu = MomentVector::new(vec![int(1); 2]);
        for p in 0..=2usize {
            for q in 0..=2usize {
                let top = asymptotic_moment_large_m(&pat(&vec![1; p], &vec![1; p], &vec![1; q], &vec![1; q]), &mu, 7).unwrap();
                let top_prop = asymptotic_moment_proportional(&pat(&vec![1; p], &vec![1; p], &vec![1; q], &vec![1; q]), &mu, 7).unwrap();
                let seqs = |len: usize| -> Vec<Vec<usize>> {
                    (0..3usize.pow(len as u32)).map(|c| (0..len).map(|t| c / 3usize.pow(t as u32) % 3 + 1).collect()).collect()
                };
                for i in seqs(p) {
                    for k in seqs(p) {
                        for j in seqs(q) {
                            for l in seqs(q) {
                                let r = asymptotic_moment_large_m(&pat(&i, &k, &j, &l), &mu, 7).unwrap();
                                if r.coefficient.is_zero() {
                                    continue;
                                }
                                assert!(r.n_exponent <= top.n_exponent && r.m_exponent <= top.m_exponent);
                                let r = asymptotic_moment_proportional(&pat(&i, &k, &j, &l), &mu, 7).unwrap();
                                assert!(r.n_exponent <= top_prop.n_exponent);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn physical_regimes() {
        let t = MomentVector::new(vec![int(1), ratio(1, 3), ratio(1, 9)]);
        // p = 0, j = l: n^{−q}
        let r = asymptotic_moment_physical(&pat(&[], &[], &[1, 2], &[1, 2]), &t, &Regime::PhysicalLargeM { n: 3 }, 7).unwrap();
        assert_eq!((r.coefficient, r.m_exponent), (ratio(1, 9), 0));
        // j = l: [Σ_σ δ n^{κ(σ)−p−q} T_σ] m^{−p}; i = (1,1) admits id and the swap
        let r = asymptotic_moment_physical(&pat(&[1, 1], &[1, 1], &[2], &[2]), &t, &Regime::PhysicalLargeM { n: 2 }, 7).unwrap();
        assert_eq!((r.coefficient, r.m_exponent), (ratio(1, 2) + ratio(1, 3) * ratio(1, 4), -2));
        // proportional, i = k and j = l: c^{−p} n^{−p−q}
        let r = asymptotic_moment_physical(&pat(&[1, 2], &[1, 2], &[3], &[3]), &t, &Regime::PhysicalProportional { c: int(2) }, 7).unwrap();
        assert_eq!((r.coefficient, r.c_exponent, r.n_exponent), (int(1), -2, -3));
        let bad = MomentVector::new(vec![int(2), int(1)]);
        assert!(asymptotic_moment_physical(&pat(&[1], &[1], &[], &[]), &bad, &Regime::PhysicalLargeM { n: 2 }, 7).is_err());
    }

    #[test]
    fn physical_sum_contains_generic_terms() {
        let i = [1, 1, 2];
        let k = [1, 2, 1];
        let s = max_cycles_mapping(&i, &k, 7).unwrap().unwrap();
        let perms = all_permutations(3, 7).unwrap();
        let generic: Vec<_> = perms.iter().filter(|p| delta_unchecked(p, &i, &k) && p.num_cycles() == s).collect();
        let physical: Vec<_> = perms.iter().filter(|p| delta_unchecked(p, &i, &k)).collect();
        assert!(generic.iter().all(|g| physical.contains(g)));
        assert!(physical.len() > generic.len());
    }

    #[test]
    fn sequences() {
        assert_eq!(SpectrumSequence::Spike.spectrum(4), Spectrum::from_integers(&[4, 1, 1, 1]));
        assert_eq!(SpectrumSequence::Half.spectrum(4), Spectrum::from_integers(&[1, 1, 0, 0]));
        assert_eq!(SpectrumSequence::NormalizedFlat.spectrum(8).trace(), int(1));
        for seq in SpectrumSequence::ALL {
            assert_eq!(seq.name().parse::<SpectrumSequence>().unwrap(), seq);
        }
        assert!("bogus".parse::<SpectrumSequence>().is_err());
        assert_eq!(Regime::Proportional { c: ratio(3, 2) }.dims_at(3), (5, 3));
    }

    #[test]
    fn spike_converges_at_rate_one_over_m() {
        let engine = Engine::default();
        let rows = convergence_diagnostic(&pat(&[1], &[1], &[1], &[1]), SpectrumSequence::Spike, &Regime::LargeM { n: 2 }, &[4, 16], &engine).unwrap();
        let (e4, e16) = (rows[0].relative_error.unwrap(), rows[1].relative_error.unwrap());
        assert!(e4 > 0.0 && e16 / e4 <= 0.5, "{e4} {e16}");
        let bad = convergence_diagnostic(&pat(&[1], &[1], &[], &[]), SpectrumSequence::RankOne, &Regime::LargeM { n: 2 }, &[4], &engine);
        assert!(bad.is_err());
    }

    #[test]
    fn flat_two_point_moment_is_exactly_the_leading_term() {
        // E[π₁₁ π₂₂] = (Tr λ)²/(mn) = M₁² n m when every atom is 1
        let engine = Engine::default();
        let rows = convergence_diagnostic(&pat(&[1], &[1], &[1], &[1]), SpectrumSequence::Flat, &Regime::LargeM { n: 2 }, &[4, 8, 16], &engine).unwrap();
        assert!(rows.iter().all(|r| r.ratio == Some(int(1))));
    }
}
