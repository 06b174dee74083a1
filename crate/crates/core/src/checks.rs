//! Desk-scale invariant suite behind the `selfcheck` command. Every check is deterministic
//! for a fixed seed, whatever the execution strategy.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exact::{big, binomial, binomial_usize, int, ratio, to_f64, Exact};
use crate::mc::estimate_moments;
use crate::moments::{delta_boson, delta_fermion, naive, Engine, MomentQuery, Spectrum};
use crate::par::Execution;
use crate::symgroup::{all_permutations, CycleType, Permutation};
use crate::weingarten::{weingarten_class, WgTable};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, failures: Vec<String>, cases: usize) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{cases} cases")
        } else {
            format!("{} of {cases} cases failed; first: {}", failures.len(), failures[0])
        };
        Check { name, passed, detail }
    }
}

fn random_spectrum(rng: &mut ChaCha8Rng, len: usize) -> Spectrum<Exact> {
    Spectrum::new((0..len).map(|_| ratio(rng.random_range(-4..=8), rng.random_range(1..=4))).collect())
}

fn weingarten_closed_forms() -> Check {
    let mut failures = Vec::new();
    for n in 2..=12i64 {
        let nu = n as u64;
        let cases = [
            (CycleType::identity(1), ratio(1, n)),
            (CycleType::identity(2), ratio(1, (n + 1) * (n - 1))),
            (CycleType::from_parts(vec![2]), ratio(-1, n * (n + 1) * (n - 1))),
        ];
        for (class, expect) in cases {
            let got = weingarten_class(&class, nu);
            if got != expect {
                failures.push(format!("N={n} class {class}: {got} != {expect}"));
            }
        }
    }
    Check::new("weingarten closed forms", failures, 33)
}

fn weingarten_orthogonality(cap: usize) -> Result<Check> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for d in 1..=3 {
        let perms = all_permutations(d, cap)?;
        for n in 4..=6u64 {
            let wg = WgTable::cached(n, d);
            for s in &perms {
                for p in &perms {
                    cases += 1;
                    let sum = perms.iter().fold(Exact::zero(), |acc, t| {
                        let gram = num_traits::pow(int(n as i64), s.inverse().compose(t).num_cycles());
                        acc + gram * wg.get(&t.inverse().compose(p).cycle_type()).expect("class present")
                    });
                    if sum != int(i64::from(s == p)) {
                        failures.push(format!("d={d} N={n} σ={s} π={p}: {sum}"));
                    }
                }
            }
        }
    }
    Ok(Check::new("weingarten orthogonality", failures, cases))
}

fn distinguishable_closed_forms(engine: &Engine, rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for (m, n) in [(2usize, 2usize), (2, 3), (3, 2), (3, 3)] {
        let lambda = random_spectrum(rng, m * n);
        let tr = lambda.trace();
        let checks = [
            (MomentQuery::two(m, n, &[1], &[1], &[], &[])?, &tr / big(m)),
            (MomentQuery::two(m, n, &[2], &[1], &[], &[])?, Exact::zero()),
            (MomentQuery::two(m, n, &[], &[], &[2], &[2])?, &tr / big(n)),
            (MomentQuery::two(m, n, &[2], &[2], &[1], &[1])?, &tr * &tr / big(m * n)),
        ];
        for (q, expect) in checks {
            cases += 1;
            let got = engine.moment(&q, &lambda)?.value;
            if got != expect {
                failures.push(format!("m={m} n={n} {:?}: {got} != {expect}", q.blocks));
            }
        }
    }
    Ok(Check::new("distinguishable closed forms", failures, cases))
}

fn indistinguishable_means(engine: &Engine, rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut failures = Vec::new();
    let mut cases = 0;
    let systems: Vec<(bool, usize, usize)> =
        vec![(true, 2, 2), (true, 3, 2), (true, 4, 3), (false, 4, 2), (false, 5, 3)];
    for (boson, n, k) in systems {
        let dim = if boson { binomial_usize(n + k - 1, k) } else { binomial_usize(n, k) };
        let lambda = random_spectrum(rng, dim);
        for (a, b) in [(1, 1), (n, n), (1, n)] {
            cases += 1;
            let q = if boson { MomentQuery::boson(n, k, &[a], &[b])? } else { MomentQuery::fermion(n, k, &[a], &[b])? };
            let expect = if a == b { lambda.trace() / big(n) } else { Exact::zero() };
            let got = engine.moment(&q, &lambda)?.value;
            if got != expect {
                failures.push(format!("{} n={n} k={k} ({a},{b}): {got} != {expect}", q.system.name()));
            }
        }
    }
    Ok(Check::new("boson and fermion first moments", failures, cases))
}

fn fermion_transposition() -> Result<Check> {
    let swap = Permutation::from_cycles(2, &[&[1, 2]])?;
    let mut failures = Vec::new();
    let mut cases = 0;
    for (n, k) in [(4usize, 2usize), (5, 3)] {
        let (ni, ki) = (n as i64, k as i64);
        for code in 0..n.pow(4) {
            let d: Vec<usize> = (0..4).map(|t| code / n.pow(t) % n + 1).collect();
            let (i1, i2, j1, j2) = (d[0], d[1], d[2], d[3]);
            let expect = if i1 == i2 && i2 == j1 && j1 == j2 {
                big(binomial(ni - 1, ki - 1))
            } else if i1 == j2 && i2 == j1 {
                big(binomial(ni - 2, ki - 1))
            } else if i1 == j1 && i2 == j2 {
                big(binomial(ni - 2, ki - 2))
            } else {
                Exact::zero()
            } * ratio(1, ki * ki);
            cases += 1;
            let got = delta_fermion(&swap, &[i1, i2], &[j1, j2], n, k)?;
            if got != expect {
                failures.push(format!("n={n} k={k} i=({i1},{i2}) j=({j1},{j2}): {got} != {expect}"));
            }
        }
    }
    Ok(Check::new("fermion transposition closed form", failures, cases))
}

fn delta_oracles(rng: &mut ChaCha8Rng, cap: usize) -> Result<Check> {
    let mut failures = Vec::new();
    let cases = 20;
    for case in 0..cases {
        let p = rng.random_range(1..=3);
        let perms = all_permutations(p, cap)?;
        let sigma = &perms[rng.random_range(0..perms.len())];
        let boson = case % 2 == 0;
        let (n, k) = if boson { (rng.random_range(1..=3), rng.random_range(1..=3)) } else { (4, 2) };
        let i: Vec<usize> = (0..p).map(|_| rng.random_range(1..=n)).collect();
        let mut j = i.clone();
        j.rotate_left(1);
        let (fast, slow) = if boson {
            (delta_boson(sigma, &i, &j, n, k)?, naive::delta_boson_naive(sigma, &i, &j, n, k)?)
        } else {
            (delta_fermion(sigma, &i, &j, n, k)?, naive::delta_fermion_naive(sigma, &i, &j, n, k)?)
        };
        if fast != slow {
            failures.push(format!("σ={sigma} n={n} k={k} i={i:?} j={j:?}: {fast} != {slow}"));
        }
    }
    Ok(Check::new("delta propagation vs enumeration", failures, cases))
}

fn monte_carlo(engine: &Engine, seed: u64, samples: usize, exec: Execution) -> Result<Check> {
    let lambda = Spectrum::from_integers(&[1, 0, 0, 0]);
    let queries = vec![
        MomentQuery::two(2, 2, &[1], &[1], &[], &[])?,
        MomentQuery::two(2, 2, &[1, 1], &[1, 1], &[], &[])?,
        MomentQuery::two(2, 2, &[1], &[1], &[2], &[2])?,
        MomentQuery::two(2, 2, &[1, 2], &[2, 1], &[1], &[1])?,
    ];
    let lambda_f: Vec<f64> = lambda.values().iter().map(to_f64).collect();
    let est = estimate_moments(&queries, &lambda_f, samples, seed, exec)?;
    let mut failures = Vec::new();
    for (q, e) in queries.iter().zip(&est) {
        let exact = engine.moment(q, &lambda)?.value;
        let z = e.z_score(to_f64(&exact));
        if z.abs() >= 4.0 {
            failures.push(format!("{:?}: exact {exact}, estimate {:.6}, z {z:.3}", q.blocks, e.mean.re));
        }
    }
    Ok(Check::new("monte-carlo agreement", failures, queries.len()))
}

/// Runs every check; `samples` sets the Monte-Carlo size.
pub fn selfcheck(engine: &Engine, seed: u64, samples: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        weingarten_closed_forms(),
        weingarten_orthogonality(engine.cap)?,
        distinguishable_closed_forms(engine, &mut rng)?,
        indistinguishable_means(engine, &mut rng)?,
        fermion_transposition()?,
        delta_oracles(&mut rng, engine.cap)?,
        monte_carlo(engine, seed, samples, engine.exec)?,
    ])
}
