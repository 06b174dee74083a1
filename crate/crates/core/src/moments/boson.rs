use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{check_indices, k_power_inverse};
use crate::error::{Error, Result};
use crate::exact::{big, exact_sqrt, Exact};
use crate::symgroup::Permutation;

/// All `n`-component multi-indices with entries summing to `total`, in lexicographic order
/// (largest first component first).
pub fn boson_multi_indices(n: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = cur.len();
        if pos + 1 == n {
            cur[pos] = rest;
            out.push(cur.clone());
            return;
        }
        for v in (0..=rest).rev() {
            cur[pos] = v;
            rec(pos + 1, rest - v, cur, out);
        }
    }
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(0, total, &mut vec![0; n], &mut out);
    out
}

/// Bosonic weight `Δ^{n,k}_σ(i, j)`, evaluated by propagating the multi-index `γ` along each
/// cycle of `σ`.
///
/// The constraint `e_{i_{σ(r)}} + γ^{(σ(r))} = e_{j_r} + γ^{(r)}` fixes `γ^{(σ(r))}` from
/// `γ^{(r)}`, so only one multi-index per cycle is free. Along a closed cycle the radicands
/// `∏ (γ_{i_s}+1)(γ_{j_s}+1)` form a perfect square; a term that is not raises
/// [`Error::NonRational`].
pub fn delta_boson(sigma: &Permutation, i: &[usize], j: &[usize], n: usize, k: usize) -> Result<Exact> {
    let p = sigma.degree();
    check_shape(p, i, j, n, k)?;
    let i0: Vec<usize> = i.iter().map(|x| x - 1).collect();
    let j0: Vec<usize> = j.iter().map(|x| x - 1).collect();
    let gammas = boson_multi_indices(n, k - 1);

    let mut product = Exact::one();
    for cycle in sigma.cycles() {
        let h = cycle.len();
        let mut cycle_sum = BigInt::zero();
        'start: for start in &gammas {
            let mut g: Vec<i64> = start.iter().map(|&x| x as i64).collect();
            let mut radicand = BigInt::one();
            for t in 0..h {
                let s = cycle[t];
                let next = cycle[(t + 1) % h];
                radicand *= BigInt::from((g[i0[s]] + 1) * (g[j0[s]] + 1));
                g[j0[s]] += 1;
                g[i0[next]] -= 1;
                if g[i0[next]] < 0 {
                    continue 'start;
                }
            }
            if g.iter().zip(start).any(|(&a, &b)| a != b as i64) {
                continue;
            }
            let root = exact_sqrt(&radicand).ok_or_else(|| {
                Error::NonRational(format!("radicand {radicand} on cycle {cycle:?} of {sigma} is not a square"))
            })?;
            cycle_sum += root;
        }
        if cycle_sum.is_zero() {
            return Ok(Exact::zero());
        }
        product *= big(cycle_sum);
    }
    Ok(product * k_power_inverse(k, p))
}

pub(super) fn check_shape(p: usize, i: &[usize], j: &[usize], n: usize, k: usize) -> Result<()> {
    if i.len() != p {
        return Err(Error::LengthMismatch { what: "row indices", got: i.len(), expected: p });
    }
    if j.len() != p {
        return Err(Error::LengthMismatch { what: "column indices", got: j.len(), expected: p });
    }
    if n == 0 || k == 0 {
        return Err(Error::Dimension(format!("need n, k >= 1, got n={n}, k={k}")));
    }
    check_indices("row indices", i, n)?;
    check_indices("column indices", j, n)
}
