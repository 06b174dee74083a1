//! Permutations, cycle combinatorics and characters of the symmetric group.
//!
//! Points of a [`Permutation`] are 0-based in the Rust API; index *values* (the entries of
//! an [`IndexSeq`]) are 1-based, matching the usual matrix-entry notation. `Display`
//! renders permutations in 1-based cycle notation.

mod character;
mod partition;

pub use character::{character, CharacterTable};
pub use partition::{partitions, CycleType};

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::factorial;

/// Default cap on the order of symmetric groups that may be enumerated.
pub const DEFAULT_CAP: usize = 7;

/// A bijection of `{0, …, d-1}`, stored by images: `σ(r) = images[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation { images: (0..d).collect() }
    }

    /// Builds from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if x >= d || seen[x] {
                return Err(Error::Invalid(format!("{images:?} is not a permutation of 0..{d}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds from 1-based images, e.g. `[3, 1, 2]` for `1↦3, 2↦1, 3↦2`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Invalid("one-based images must be positive".into()));
        }
        Self::from_images(images.iter().map(|&x| x - 1).collect())
    }

    /// Builds from disjoint 1-based cycles; unlisted points are fixed.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for (t, &x) in cycle.iter().enumerate() {
                if x == 0 || x > d || used[x - 1] {
                    return Err(Error::Invalid(format!("bad cycle {cycle:?} for degree {d}")));
                }
                used[x - 1] = true;
                images[x - 1] = cycle[(t + 1) % cycle.len()] - 1;
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, r: usize) -> usize {
        self.images[r]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.degree()];
        for (r, &x) in self.images.iter().enumerate() {
            inv[x] = r;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(r, &x)| r == x)
    }

    /// Canonical cycle decomposition: each cycle starts at its minimum and lists its orbit
    /// in order; cycles are sorted by their minima. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles κ(σ), fixed points included.
    pub fn num_cycles(&self) -> usize {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut count = 0;
        for start in 0..d {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
            }
        }
        count
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_parts(self.cycles().iter().map(Vec::len).collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "()");
        }
        for cycle in self.cycles() {
            let body: Vec<String> = cycle.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// A sequence of 1-based indices over the alphabet `{1, …, bound}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSeq {
    entries: Vec<usize>,
    bound: usize,
}

impl IndexSeq {
    pub fn new(entries: Vec<usize>, bound: usize) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&x| x == 0 || x > bound) {
            return Err(Error::IndexOutOfRange { what: "index sequence".into(), value: bad, bound });
        }
        Ok(IndexSeq { entries, bound })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_cap(d: usize, cap: usize) -> Result<()> {
    if d > cap {
        return Err(Error::CapExceeded { d, size: factorial(d).to_string(), cap });
    }
    Ok(())
}

/// All `d!` permutations of degree `d` in lexicographic order of their image vectors.
pub fn all_permutations(d: usize, cap: usize) -> Result<Vec<Permutation>> {
    check_cap(d, cap)?;
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    loop {
        out.push(Permutation { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..d).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..d).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

/// Canonical cycles of `σ`, see [`Permutation::cycles`].
pub fn cycle_decomposition(sigma: &Permutation) -> Vec<Vec<usize>> {
    sigma.cycles()
}

/// `δ_σ(a, b) = ∏_r δ(a_{σ(r)}, b_r)`.
pub fn delta(sigma: &Permutation, a: &[usize], b: &[usize]) -> Result<bool> {
    let d = sigma.degree();
    if a.len() != d {
        return Err(Error::LengthMismatch { what: "first sequence", got: a.len(), expected: d });
    }
    if b.len() != d {
        return Err(Error::LengthMismatch { what: "second sequence", got: b.len(), expected: d });
    }
    Ok(delta_unchecked(sigma, a, b))
}

#[inline]
pub(crate) fn delta_unchecked<T: PartialEq>(sigma: &Permutation, a: &[T], b: &[T]) -> bool {
    sigma.images.iter().zip(b).all(|(&s, br)| a[s] == *br)
}

/// The factor of `δ_σ` contributed by one cycle `(α₁ … α_h)` of `σ` (points 0-based, in orbit
/// order).
pub fn delta_cycle(cycle: &[usize], a: &[usize], b: &[usize]) -> bool {
    let h = cycle.len();
    (0..h).all(|t| a[cycle[(t + 1) % h]] == b[cycle[t]])
}

/// Consecutive blocks of points `{0..p₁}, {p₁..p₁+p₂}, …` of a symmetric group `S_{p₁+…+p_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    owner: Vec<usize>,
}

impl BlockLayout {
    pub fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut owner = Vec::new();
        let mut acc = 0;
        for (l, &s) in sizes.iter().enumerate() {
            offsets.push(acc);
            owner.extend(std::iter::repeat_n(l, s));
            acc += s;
        }
        BlockLayout { sizes: sizes.to_vec(), offsets, owner }
    }

    pub fn total(&self) -> usize {
        self.owner.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, l: usize) -> usize {
        self.sizes[l]
    }

    pub fn offset(&self, l: usize) -> usize {
        self.offsets[l]
    }

    pub fn block_of(&self, point: usize) -> usize {
        self.owner[point]
    }
}

/// `pr_l(σ)`: erase from every cycle of `σ` the letters outside block `l` (0-based), then
/// relabel the survivors to `0..p_l` preserving order.
pub fn project(sigma: &Permutation, layout: &BlockLayout, l: usize) -> Permutation {
    debug_assert_eq!(sigma.degree(), layout.total());
    let off = layout.offset(l);
    let size = layout.size(l);
    let images = (0..size)
        .map(|r| {
            // first return to block l along the orbit
            let mut x = sigma.apply(off + r);
            while layout.block_of(x) != l {
                x = sigma.apply(x);
            }
            x - off
        })
        .collect();
    Permutation { images }
}

/// `κ_l(σ)`: number of cycles of `σ` that avoid block `l` (0-based) entirely.
///
/// With two blocks `(p, q)` this gives κ₁ = cycles inside `{p+1..p+q}` for `l = 0` and
/// κ₂ = cycles inside `{1..p}` for `l = 1`.
pub fn kappa_block(sigma: &Permutation, layout: &BlockLayout, l: usize) -> usize {
    sigma
        .cycles()
        .iter()
        .filter(|c| c.iter().all(|&x| layout.block_of(x) != l))
        .count()
}

/// `s(i, k)`: the maximal number of cycles among `σ ∈ S_p` with `δ_σ(i, k) = 1`, or `None`
/// when no such `σ` exists (the multisets of `i` and `k` differ).
pub fn max_cycles_mapping(i: &[usize], k: &[usize], cap: usize) -> Result<Option<usize>> {
    if i.len() != k.len() {
        return Err(Error::LengthMismatch { what: "second sequence", got: k.len(), expected: i.len() });
    }
    Ok(all_permutations(i.len(), cap)?
        .iter()
        .filter(|s| delta_unchecked(s, i, k))
        .map(Permutation::num_cycles)
        .max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_sigma() -> Permutation {
        Permutation::from_one_based(&[3, 7, 1, 9, 5, 4, 6, 10, 2, 8]).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(all_permutations(0, 7).unwrap().len(), 1);
        let s3 = all_permutations(3, 7).unwrap();
        assert_eq!(s3.len(), 6);
        let mut dedup = s3.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
        assert_eq!(s3, dedup, "lexicographic order");
        assert_eq!(all_permutations(5, 7).unwrap().len(), 120);
    }

    #[test]
    fn enumeration_cap() {
        match all_permutations(8, 7) {
            Err(Error::CapExceeded { d, size, cap }) => {
                assert_eq!((d, size.as_str(), cap), (8, "40320", 7));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn worked_example_cycles() {
        let s = sample_sigma();
        assert_eq!(s.to_string(), "(1 3)(2 7 6 4 9)(5)(8 10)");
        assert_eq!(s.num_cycles(), 4);
        assert_eq!(s.cycle_type().parts(), &[5, 2, 2, 1]);
        let id = Permutation::identity(4);
        assert_eq!(cycle_decomposition(&id).len(), 4);
    }

    #[test]
    fn delta_examples() {
        let id = Permutation::identity(3);
        assert!(delta(&id, &[1, 2, 2], &[1, 2, 2]).unwrap());
        let swap = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        assert!(delta(&swap, &[5, 9], &[9, 5]).unwrap());
        assert!(!delta(&swap, &[5, 9], &[5, 9]).unwrap());
        assert!(delta(&swap, &[5], &[9, 5]).is_err());
    }

    #[test]
    fn worked_example_delta_factorizes() {
        let s = sample_sigma();
        // b_r = a_{σ(r)} makes every factor 1; perturbing one b entry kills exactly one cycle
        let a: Vec<usize> = (1..=10).collect();
        let b: Vec<usize> = (0..10).map(|r| a[s.apply(r)]).collect();
        assert!(delta(&s, &a, &b).unwrap());
        for c in s.cycles() {
            assert!(delta_cycle(&c, &a, &b));
        }
        let mut b2 = b.clone();
        b2[7] = 99; // position 8 lives in the cycle (8 10)
        let factors: Vec<bool> = s.cycles().iter().map(|c| delta_cycle(c, &a, &b2)).collect();
        assert_eq!(factors, vec![true, true, true, false]);
        assert!(!delta(&s, &a, &b2).unwrap());
    }

    #[test]
    fn worked_example_projections() {
        let s = sample_sigma();
        let layout = BlockLayout::new(&[5, 5]);
        assert_eq!(project(&s, &layout, 0).to_string(), "(1 3)(2 4)(5)");
        // (2 1 4)(3 5) in canonical form
        assert_eq!(project(&s, &layout, 1), Permutation::from_cycles(5, &[&[2, 1, 4], &[3, 5]]).unwrap());
        let id = Permutation::identity(7);
        let layout = BlockLayout::new(&[3, 4]);
        assert!(project(&id, &layout, 0).is_identity());
        assert_eq!(project(&id, &layout, 1), Permutation::identity(4));
    }

    #[test]
    fn worked_example_kappas() {
        let s = Permutation::from_cycles(10, &[&[1, 3], &[2, 7, 6], &[4], &[5, 9], &[8, 10]]).unwrap();
        let layout = BlockLayout::new(&[5, 5]);
        assert_eq!(kappa_block(&s, &layout, 1), 2); // κ₂
        assert_eq!(kappa_block(&s, &layout, 0), 1); // κ₁
        let id = Permutation::identity(5);
        let layout = BlockLayout::new(&[2, 3]);
        assert_eq!(kappa_block(&id, &layout, 0), 3);
        assert_eq!(kappa_block(&id, &layout, 1), 2);
        let long = Permutation::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(kappa_block(&long, &layout, 0), 0);
        assert_eq!(kappa_block(&long, &layout, 1), 0);
    }

    #[test]
    fn max_cycles_examples() {
        assert_eq!(max_cycles_mapping(&[3, 3, 7], &[3, 3, 7], 7).unwrap(), Some(3));
        assert_eq!(max_cycles_mapping(&[1, 2], &[2, 1], 7).unwrap(), Some(1));
        assert_eq!(max_cycles_mapping(&[1, 2], &[1, 3], 7).unwrap(), None);
        assert_eq!(max_cycles_mapping(&[], &[], 7).unwrap(), Some(0));
    }

    fn perm_strategy(max_d: usize) -> impl Strategy<Value = Permutation> {
        (0..=max_d)
            .prop_flat_map(|d| Just((0..d).collect::<Vec<usize>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(s in perm_strategy(7)) {
            prop_assert!(s.compose(&s.inverse()).is_identity());
            prop_assert!(s.inverse().compose(&s).is_identity());
        }

        #[test]
        fn cycles_partition_points(s in perm_strategy(7)) {
            let mut pts: Vec<usize> = s.cycles().concat();
            pts.sort();
            prop_assert_eq!(pts, (0..s.degree()).collect::<Vec<_>>());
            let mut lens: Vec<usize> = s.cycles().iter().map(Vec::len).collect();
            lens.sort_by(|a, b| b.cmp(a));
            prop_assert_eq!(lens, s.cycle_type().parts().to_vec());
            for c in s.cycles() {
                prop_assert_eq!(c[0], *c.iter().min().unwrap());
            }
        }

        #[test]
        fn delta_is_product_over_cycles(
            s in perm_strategy(7),
            seed in prop::collection::vec(1usize..=3, 14),
        ) {
            let d = s.degree();
            let a = &seed[..d];
            let b = &seed[7..7 + d];
            let by_cycles = s.cycles().iter().all(|c| delta_cycle(c, a, b));
            prop_assert_eq!(delta(&s, a, b).unwrap(), by_cycles);
        }

        #[test]
        fn projection_of_block_diagonal_permutation(
            s1 in perm_strategy(4),
            s2 in perm_strategy(3),
        ) {
            let p = s1.degree();
            let mut images = s1.images().to_vec();
            images.extend(s2.images().iter().map(|x| x + p));
            let joint = Permutation::from_images(images).unwrap();
            let layout = BlockLayout::new(&[p, s2.degree()]);
            prop_assert_eq!(project(&joint, &layout, 0), s1);
            prop_assert_eq!(project(&joint, &layout, 1), s2);
        }

        #[test]
        fn max_cycles_of_sequence_with_itself(i in prop::collection::vec(1usize..=3, 0..6)) {
            prop_assert_eq!(max_cycles_mapping(&i, &i, 7).unwrap(), Some(i.len()));
        }
    }
}
