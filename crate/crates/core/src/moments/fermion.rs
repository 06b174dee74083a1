use num_traits::{One, Zero};

use super::boson::check_shape;
use super::{check_fermion_domain, k_power_inverse};
use crate::error::Result;
use crate::exact::{int, Exact};
use crate::symgroup::Permutation;

/// Sign of the permutation sorting `tuple` increasingly; `0` when an entry repeats.
pub fn fermion_sign(tuple: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for a in 0..tuple.len() {
        for b in a + 1..tuple.len() {
            if tuple[a] == tuple[b] {
                return 0;
            }
            if tuple[a] > tuple[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Strictly increasing `len`-tuples from `{1..=n}` in lexicographic order.
pub fn increasing_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(from: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in from..=n {
            cur.push(v);
            rec(v + 1, n, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, len, &mut Vec::new(), &mut out);
    out
}

fn mask_of(tuple: &[usize]) -> u64 {
    tuple.iter().fold(0, |m, &x| m | (1u64 << x))
}

/// `sgn(x, l)` for the set `l` given as a bit mask (bit `v` for the 1-based value `v`).
fn sign_with(x: usize, l: u64) -> i64 {
    let mut tuple = vec![x];
    tuple.extend((1..64).filter(|v| l & (1u64 << v) != 0));
    i64::from(fermion_sign(&tuple))
}

/// Fermionic weight `Δ^{n,k}_σ(i, j)` by propagating the `(k−1)`-set `l` along each cycle.
///
/// The constraint `sr(i_{σ(r)}, l^{(σ(r))}) = sr(j_r, l^{(r)})` forces
/// `l^{(σ(r))} = (l^{(r)} ∪ {j_r}) \ {i_{σ(r)}}`, so one set per cycle is free.
pub fn delta_fermion(sigma: &Permutation, i: &[usize], j: &[usize], n: usize, k: usize) -> Result<Exact> {
    check_fermion_domain(n, k)?;
    let p = sigma.degree();
    check_shape(p, i, j, n, k)?;
    let sets: Vec<u64> = increasing_tuples(n, k - 1).iter().map(|t| mask_of(t)).collect();
    let bit = |v: usize| 1u64 << v;

    let mut product = Exact::one();
    for cycle in sigma.cycles() {
        let h = cycle.len();
        let first = cycle[0];
        let mut cycle_sum = 0i64;
        'start: for &start in &sets {
            if start & (bit(i[first]) | bit(j[first])) != 0 {
                continue;
            }
            let mut l = start;
            let mut sign = 1i64;
            for t in 0..h {
                let s = cycle[t];
                let next = cycle[(t + 1) % h];
                sign *= sign_with(i[s], l) * sign_with(j[s], l);
                let grown = l | bit(j[s]);
                if grown & bit(i[next]) == 0 {
                    continue 'start;
                }
                l = grown & !bit(i[next]);
                if l & bit(j[next]) != 0 {
                    continue 'start;
                }
            }
            if l == start {
                cycle_sum += sign;
            }
        }
        if cycle_sum == 0 {
            return Ok(Exact::zero());
        }
        product *= int(cycle_sum);
    }
    Ok(product * k_power_inverse(k, p))
}
