use std::fmt;

use num_bigint::BigInt;

use crate::exact::factorial;

/// A partition of `d`, used both as a cycle type (conjugacy class of `S_d`) and as the
/// label of an irreducible character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    /// Sorts into non-increasing order and drops zero parts.
    pub fn from_parts(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    pub fn identity(d: usize) -> Self {
        CycleType { parts: vec![1; d] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    /// Centralizer order `z_ρ = ∏_j j^{m_j} m_j!`.
    pub fn centralizer_order(&self) -> BigInt {
        let mut z = BigInt::from(1);
        let mut t = 0;
        while t < self.parts.len() {
            let part = self.parts[t];
            let mult = self.parts[t..].iter().take_while(|&&x| x == part).count();
            z *= num_traits::pow(BigInt::from(part), mult) * factorial(mult);
            t += mult;
        }
        z
    }

    /// Number of permutations with this cycle type.
    pub fn class_size(&self) -> BigInt {
        factorial(self.size()) / self.centralizer_order()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        write!(f, "({})", body.join(","))
    }
}

/// All partitions of `d` in reverse lexicographic order: `(d), (d-1,1), …, (1^d)`.
pub fn partitions(d: usize) -> Vec<CycleType> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rest == 0 {
            out.push(CycleType { parts: cur.clone() });
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}
