use super::*;
use crate::moments::IndexBlock;

fn within(est: &MomentEstimate, exact: f64, k: f64) -> bool {
    est.z_score(exact).abs() < k
}

#[test]
fn first_moment_two_particles() {
    let lambda = [1.0, 2.0, 0.5, -1.0, 3.0, 0.0];
    let tr: f64 = lambda.iter().sum();
    let queries = vec![
        MomentQuery::two(2, 3, &[1], &[1], &[], &[]).unwrap(),
        MomentQuery::two(2, 3, &[1], &[2], &[], &[]).unwrap(),
        MomentQuery::two(2, 3, &[], &[], &[3], &[3]).unwrap(),
        MomentQuery::two(2, 3, &[2], &[2], &[1], &[1]).unwrap(),
        MomentQuery::two(2, 3, &[1, 2], &[1, 1], &[], &[]).unwrap(),
    ];
    let est = estimate_moments(&queries, &lambda, 20_000, 42, Execution::Parallel).unwrap();
    assert!(within(&est[0], tr / 2.0, 4.0));
    assert!(within(&est[1], 0.0, 4.0));
    assert!(within(&est[2], tr / 3.0, 4.0));
    assert!(within(&est[3], tr * tr / 6.0, 4.0));
    assert!(within(&est[4], 0.0, 4.0));
    for e in &est {
        assert!(e.mean.im.abs() < 4.0 * e.imag_standard_error.max(1e-12));
        assert_eq!(e.samples, 20_000);
    }
}

#[test]
fn pure_state_beta_moment() {
    let q = MomentQuery::two(2, 2, &[1, 1], &[1, 1], &[], &[]).unwrap();
    let est = estimate_moment(&q, &[1.0, 0.0, 0.0, 0.0], 50_000, 7, Execution::Parallel).unwrap();
    assert!(within(&est, 0.3, 4.0), "{est:?}");
}

#[test]
fn boson_and_fermion_means() {
    let bos = MomentQuery::boson(2, 2, &[1], &[1]).unwrap();
    let est = estimate_moment(&bos, &[1.0, 0.0, 0.0], 20_000, 3, Execution::Parallel).unwrap();
    assert!(within(&est, 0.5, 4.0));
    let fer = MomentQuery::fermion(4, 2, &[2], &[2]).unwrap();
    let est = estimate_moment(&fer, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 20_000, 3, Execution::Parallel).unwrap();
    assert!(within(&est, 0.25, 4.0));
    let off = MomentQuery::fermion(4, 2, &[2], &[3]).unwrap();
    let est = estimate_moment(&off, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 20_000, 3, Execution::Parallel).unwrap();
    assert!(within(&est, 0.0, 4.0));
}

#[test]
fn three_factor_first_moment() {
    let q = MomentQuery::multi(&[2, 2, 2], vec![IndexBlock::default(), IndexBlock::new(vec![2], vec![2]), IndexBlock::default()]).unwrap();
    let lambda = [1.0, 0.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let est = estimate_moment(&q, &lambda, 20_000, 1, Execution::Parallel).unwrap();
    assert!(within(&est, 2.0, 4.0));
}

#[test]
fn worker_count_does_not_change_estimates() {
    let q = MomentQuery::two(2, 2, &[1, 2], &[1, 2], &[1], &[1]).unwrap();
    let lambda = [0.5, 0.25, 0.25, 0.0];
    let a = estimate_moment(&q, &lambda, 3_000, 99, Execution::Sequential).unwrap();
    for exec in [Execution::Workers(2), Execution::Workers(8), Execution::Parallel] {
        let b = estimate_moment(&q, &lambda, 3_000, 99, exec).unwrap();
        assert_eq!(a.mean.re.to_bits(), b.mean.re.to_bits());
        assert_eq!(a.mean.im.to_bits(), b.mean.im.to_bits());
        assert_eq!(a.standard_error.to_bits(), b.standard_error.to_bits());
    }
    let c = estimate_moment(&q, &lambda, 3_000, 100, Execution::Sequential).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn doubling_samples_shrinks_error_by_root_two() {
    let q = MomentQuery::two(2, 2, &[1], &[1], &[1], &[1]).unwrap();
    let lambda = [1.0, 0.5, 0.0, 0.0];
    let trials = 6;
    let mut ratio = 0.0;
    for t in 0..trials {
        let small = estimate_moment(&q, &lambda, 4_096, 1000 + t, Execution::Parallel).unwrap();
        let large = estimate_moment(&q, &lambda, 8_192, 2000 + t, Execution::Parallel).unwrap();
        ratio += small.standard_error / large.standard_error;
    }
    ratio /= trials as f64;
    assert!((1.2..=1.7).contains(&ratio), "ratio {ratio}");
}

#[test]
fn summary_of_marginal_entries() {
    let system = System::TwoDistinguishable { m: 4, n: 2 };
    let lambda = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    let s = marginal_summary(&system, &lambda, 1, 0.25, 4_000, 5, Execution::Parallel).unwrap();
    assert_eq!(s.mean.shape(), (2, 2));
    for r in 0..2 {
        assert!((s.mean[(r, r)].re - 0.5).abs() < 4.0 * s.standard_error[(r, r)]);
        assert!(s.mean[(r, r)].im.abs() < 1e-12);
    }
    assert!(s.mean[(0, 1)].re.abs() < 4.0 * s.standard_error[(0, 1)]);
    assert!(s.variance.iter().all(|&v| v > 0.0));
}

#[test]
fn sampled_marginals_are_hermitian_and_trace_preserving() {
    let mut rng = batch_rng(8, 0);
    let lambda = [0.3, -1.0, 2.0, 0.0, 0.7, 1.5];
    let sampler = MarginalSampler::new(&System::TwoDistinguishable { m: 3, n: 2 }, &lambda).unwrap();
    for _ in 0..20 {
        for pi in sampler.draw(&mut rng) {
            assert!((pi.trace().re - 3.5).abs() < 1e-12 && pi.trace().im.abs() < 1e-12);
            assert!((&pi - pi.adjoint()).iter().all(|z| z.norm() < 1e-12));
        }
    }
}

#[test]
fn rejects_bad_input() {
    let q = MomentQuery::two(2, 2, &[1], &[1], &[], &[]).unwrap();
    assert!(estimate_moment(&q, &[1.0, 0.0, 0.0], 100, 1, Execution::Sequential).is_err());
    assert!(estimate_moment(&q, &[1.0, 0.0, 0.0, f64::NAN], 100, 1, Execution::Sequential).is_err());
    let other = MomentQuery::two(2, 3, &[1], &[1], &[], &[]).unwrap();
    assert!(estimate_moments(&[q, other], &[1.0; 4], 100, 1, Execution::Sequential).is_err());
}

#[test]
fn shift_prefers_the_commonest_eigenvalue() {
    assert_eq!(most_frequent(&[1.0, 0.0, 0.0, 1.0]), 0.0);
    assert_eq!(most_frequent(&[2.0, 3.0, 3.0, 0.0]), 3.0);
    assert_eq!(most_frequent(&[5.0, 4.0]), 4.0);
    assert_eq!(most_frequent(&[]), 0.0);
}

#[test]
fn scalar_spectrum_needs_no_sampling() {
    let system = System::TwoDistinguishable { m: 3, n: 2 };
    let sampler = MarginalSampler::new(&system, &[0.5; 6]).unwrap();
    assert!(sampler.weights.is_empty());
    let draw = sampler.draw(&mut batch_rng(1, 0));
    assert!((&draw[0] - CMatrix::identity(3, 3) * Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!((&draw[1] - CMatrix::identity(2, 2) * Complex64::new(1.5, 0.0)).norm() < 1e-12);

    let fermions = System::Fermion { n: 4, k: 2 };
    let draw = MarginalSampler::new(&fermions, &[1.0; 6]).unwrap().draw(&mut batch_rng(1, 0));
    assert!((&draw[0] - CMatrix::identity(4, 4) * Complex64::new(1.5, 0.0)).norm() < 1e-12);
}

#[test]
fn shifted_sampler_matches_exact_moments() {
    let lambda = [2.0, 2.0, -1.0, 2.0, 0.5, 2.0];
    let system = System::TwoDistinguishable { m: 2, n: 3 };
    assert_eq!(MarginalSampler::new(&system, &lambda).unwrap().weights, vec![-3.0, -1.5]);
    let queries = vec![
        MomentQuery::two(2, 3, &[1], &[1], &[], &[]).unwrap(),
        MomentQuery::two(2, 3, &[1, 2], &[2, 1], &[], &[]).unwrap(),
        MomentQuery::two(2, 3, &[1], &[1], &[2, 3], &[3, 2]).unwrap(),
    ];
    let est = estimate_moments(&queries, &lambda, 20_000, 3, Execution::Sequential).unwrap();
    let exact_lambda =
        crate::moments::Spectrum::new(lambda.iter().map(|x| crate::exact::parse_exact(&x.to_string()).unwrap()).collect());
    let engine = crate::moments::Engine::default();
    for (q, e) in queries.iter().zip(&est) {
        let value = crate::exact::to_f64(&engine.moment(q, &exact_lambda).unwrap().value);
        assert!(within(e, value, 4.0), "{:?}: {} vs {value}", q.blocks, e.mean.re);
    }
}
