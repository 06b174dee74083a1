//! The unitary Weingarten function `Wg_{N,d}` evaluated exactly, per conjugacy class.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::{big, factorial, Exact};
use crate::symgroup::{all_permutations, CharacterTable, CycleType, Permutation};

/// `C_λ(N) = ∏_i ∏_{j ≤ λ_i} (N + j − i)`; zero exactly when `ℓ(λ) > N`.
pub fn c_lambda(shape: &CycleType, n: u64) -> BigInt {
    let n = BigInt::from(n);
    let mut acc = BigInt::one();
    for (i, &row) in shape.parts().iter().enumerate() {
        for j in 0..row {
            // 0-based i, j: N + (j+1) − (i+1)
            acc *= &n + BigInt::from(j) - BigInt::from(i);
        }
    }
    acc
}

type TableCache = HashMap<(u64, usize), Arc<WgTable>>;

/// `Wg_{N,d}` tabulated on every cycle type of `S_d`.
#[derive(Debug, Clone)]
pub struct WgTable {
    pub d: usize,
    pub n: u64,
    classes: Vec<CycleType>,
    values: Vec<Exact>,
}

impl WgTable {
    pub fn new(n: u64, d: usize) -> Self {
        let chars = CharacterTable::cached(d);
        let d_fact = big(factorial(d));
        let id = chars.class_index(&CycleType::identity(d)).expect("identity class");
        let shapes: Vec<(usize, BigInt)> = (0..chars.partitions.len())
            .map(|l| (l, c_lambda(&chars.partitions[l], n)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let values = (0..chars.partitions.len())
            .map(|class| {
                let sum = shapes.iter().fold(Exact::zero(), |acc, (l, c)| {
                    let num = BigInt::from(chars.value(*l, id)) * BigInt::from(chars.value(*l, class));
                    acc + Exact::new(num, c.clone())
                });
                sum / &d_fact
            })
            .collect();
        WgTable { d, n, classes: chars.partitions.clone(), values }
    }

    /// Shared table for `(N, d)`, computed once.
    pub fn cached(n: u64, d: usize) -> Arc<WgTable> {
        static CACHE: OnceLock<Mutex<TableCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&(n, d)) {
            return t.clone();
        }
        let table = Arc::new(WgTable::new(n, d));
        cache.lock().unwrap().entry((n, d)).or_insert(table).clone()
    }

    pub fn classes(&self) -> &[CycleType] {
        &self.classes
    }

    /// Value on the `idx`-th class, in the order of [`crate::symgroup::partitions`].
    pub fn by_index(&self, idx: usize) -> &Exact {
        &self.values[idx]
    }

    pub fn get(&self, class: &CycleType) -> Option<&Exact> {
        self.classes.iter().position(|c| c == class).map(|i| &self.values[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CycleType, &Exact)> {
        self.classes.iter().zip(&self.values)
    }
}

/// `Wg_{N,d}(σ)` for a permutation.
pub fn weingarten(sigma: &Permutation, n: u64) -> Exact {
    weingarten_class(&sigma.cycle_type(), n)
}

/// `Wg_{N,d}` on a cycle type (`d` is the size of the partition).
pub fn weingarten_class(class: &CycleType, n: u64) -> Exact {
    WgTable::cached(n, class.size()).get(class).cloned().expect("class of matching degree")
}

/// Leading large-`N` behaviour of `Wg_{N,d}` on a class: `N^{-d}` with coefficient 1 on the
/// identity class, and no `N^{-d}` term (coefficient 0) on every other class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WgLeading {
    pub exponent: i64,
    pub coefficient: u8,
}

pub fn wg_leading_order(class: &CycleType) -> WgLeading {
    let d = class.size() as i64;
    WgLeading { exponent: -d, coefficient: u8::from(class.is_identity()) }
}

/// Class-pair counts `#{τ ∈ S_d : type(ρ_a⁻¹τ) = b, type(τ) = c}` for a representative
/// `ρ_a` of each class `a`. These turn `Σ_τ Wg(σ⁻¹τ) Tr_τ(λ)` into a sum over class pairs.
#[derive(Debug)]
pub struct ClassProducts {
    pub d: usize,
    pub classes: Vec<CycleType>,
    counts: Vec<Vec<(usize, usize, u64)>>,
}

impl ClassProducts {
    fn new(d: usize, cap: usize) -> Result<Self> {
        let perms = all_permutations(d, cap)?;
        let chars = CharacterTable::cached(d);
        let classes = chars.partitions.clone();
        let index: HashMap<&CycleType, usize> = classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let types: Vec<usize> = perms.iter().map(|p| index[&p.cycle_type()]).collect();
        let nc = classes.len();
        let counts = classes
            .iter()
            .map(|rep_type| {
                let rep = representative(rep_type);
                let rep_inv = rep.inverse();
                let mut grid = vec![0u64; nc * nc];
                for (tau, &tc) in perms.iter().zip(&types) {
                    let b = index[&rep_inv.compose(tau).cycle_type()];
                    grid[b * nc + tc] += 1;
                }
                grid.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(bc, &c)| (bc / nc, bc % nc, c))
                    .collect()
            })
            .collect();
        Ok(ClassProducts { d, classes, counts })
    }

    pub fn cached(d: usize, cap: usize) -> Result<Arc<ClassProducts>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ClassProducts>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&d) {
            return Ok(t.clone());
        }
        let table = Arc::new(ClassProducts::new(d, cap)?);
        Ok(cache.lock().unwrap().entry(d).or_insert(table).clone())
    }

    pub fn class_index(&self, class: &CycleType) -> usize {
        self.classes.iter().position(|c| c == class).expect("class of matching degree")
    }

    /// `G(a) = Σ_τ Wg(ρ_a⁻¹τ) · f(type τ)` for every class `a`, with `f` given per class.
    pub fn convolve(&self, wg: &WgTable, per_class: &[Exact]) -> Vec<Exact> {
        self.counts
            .iter()
            .map(|entries| {
                entries.iter().fold(Exact::zero(), |acc, &(b, c, count)| {
                    acc + wg.by_index(b) * &per_class[c] * big(count)
                })
            })
            .collect()
    }
}

/// The canonical permutation with cycle type `class`: consecutive cycles `(1 2 … μ₁)(…)`.
pub fn representative(class: &CycleType) -> Permutation {
    let mut images = Vec::with_capacity(class.size());
    let mut start = 0;
    for &part in class.parts() {
        for t in 0..part {
            images.push(start + (t + 1) % part);
        }
        start += part;
    }
    Permutation::from_images(images).expect("valid representative")
}
