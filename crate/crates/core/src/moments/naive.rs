//! Full-product enumerators for the boson and fermion `Δ`-functions. They share nothing with
//! the cycle-propagation evaluators beyond the definitions and serve as their oracle.

use num_bigint::BigInt;
use num_traits::Zero;

use super::boson::{boson_multi_indices, check_shape};
use super::check_fermion_domain;
use super::fermion::{fermion_sign, increasing_tuples};
use crate::error::{Error, Result};
use crate::exact::{big, exact_sqrt, Exact};
use crate::symgroup::{delta_unchecked, Permutation};

/// Calls `visit` with every `p`-tuple of choices, each drawn from `options[s]`.
fn for_each_tuple<T>(options: &[Vec<T>], visit: &mut dyn FnMut(&[&T]) -> Result<()>) -> Result<()> {
    fn rec<'a, T>(
        options: &'a [Vec<T>],
        cur: &mut Vec<&'a T>,
        visit: &mut dyn FnMut(&[&T]) -> Result<()>,
    ) -> Result<()> {
        if cur.len() == options.len() {
            return visit(cur);
        }
        for item in &options[cur.len()] {
            cur.push(item);
            rec(options, cur, visit)?;
            cur.pop();
        }
        Ok(())
    }
    rec(options, &mut Vec::new(), visit)
}

/// `Δ^{n,k}_σ(i,j)` for bosons, summing over every tuple `(γ^{(1)}, …, γ^{(p)})`.
pub fn delta_boson_naive(sigma: &Permutation, i: &[usize], j: &[usize], n: usize, k: usize) -> Result<Exact> {
    let p = sigma.degree();
    check_shape(p, i, j, n, k)?;
    let gammas = boson_multi_indices(n, k - 1);
    let options = vec![gammas; p];
    let mut total = BigInt::zero();
    for_each_tuple(&options, &mut |tuple| {
        let shifted = |idx: &[usize], s: usize| {
            let mut v = tuple[s].clone();
            v[idx[s] - 1] += 1;
            v
        };
        let rows: Vec<Vec<usize>> = (0..p).map(|s| shifted(i, s)).collect();
        let cols: Vec<Vec<usize>> = (0..p).map(|s| shifted(j, s)).collect();
        if !delta_unchecked(sigma, &rows, &cols) {
            return Ok(());
        }
        let radicand: BigInt = (0..p)
            .map(|s| BigInt::from((tuple[s][i[s] - 1] + 1) * (tuple[s][j[s] - 1] + 1)))
            .product();
        let root = exact_sqrt(&radicand)
            .ok_or_else(|| Error::NonRational(format!("radicand {radicand} is not a square")))?;
        total += root;
        Ok(())
    })?;
    Ok(big(total) * super::k_power_inverse(k, p))
}

/// `Δ^{n,k}_σ(i,j)` for fermions, summing over every tuple `(l^{(1)}, …, l^{(p)})` with
/// `l^{(s)} ∌ i_s, j_s`.
pub fn delta_fermion_naive(sigma: &Permutation, i: &[usize], j: &[usize], n: usize, k: usize) -> Result<Exact> {
    check_fermion_domain(n, k)?;
    let p = sigma.degree();
    check_shape(p, i, j, n, k)?;
    let all = increasing_tuples(n, k - 1);
    let options: Vec<Vec<Vec<usize>>> = (0..p)
        .map(|s| all.iter().filter(|l| !l.contains(&i[s]) && !l.contains(&j[s])).cloned().collect())
        .collect();
    let sorted_with = |x: usize, l: &[usize]| {
        let mut v = vec![x];
        v.extend_from_slice(l);
        v.sort_unstable();
        v
    };
    let signed = |x: usize, l: &[usize]| {
        let mut v = vec![x];
        v.extend_from_slice(l);
        i64::from(fermion_sign(&v))
    };
    let mut total = 0i64;
    for_each_tuple(&options, &mut |tuple| {
        let rows: Vec<Vec<usize>> = (0..p).map(|s| sorted_with(i[s], tuple[s])).collect();
        let cols: Vec<Vec<usize>> = (0..p).map(|s| sorted_with(j[s], tuple[s])).collect();
        if delta_unchecked(sigma, &rows, &cols) {
            total += (0..p).map(|s| signed(i[s], tuple[s]) * signed(j[s], tuple[s])).product::<i64>();
        }
        Ok(())
    })?;
    Ok(crate::exact::int(total) * super::k_power_inverse(k, p))
}
