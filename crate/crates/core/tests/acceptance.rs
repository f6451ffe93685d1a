//! End-to-end acceptance run. Each criterion prints one `PASS`/`FAIL` line
//! with its measured numbers and runtime; the test fails if any is red.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use hplus_core::arcs::{Arc, ArcSet};
use hplus_core::construction::{
    assemble_u, build_gn, check_endgame, choose_params, solve_hinfty_partition, verify_estimates,
};
use hplus_core::density::{
    check_condition_a, fit_condition_a, implication_checks, DensityConstants, DIST_SLACK,
};
use hplus_core::gallery::{counterexample_pair, counterexample_union, dyadic_lattice, radial_geometric};
use hplus_core::geometry::{hyperbolic_distance, DiscPoint, Mobius};
use hplus_core::interp::{
    generate_compatible_values, solve_by_partitions, solve_direct, Certificate, InterpolationProblem, Side,
    DEFAULT_TOLERANCE,
};
use hplus_core::measure::{harmonic_measure, poisson_kernel, BoundaryMeasure, GridSpec};
use hplus_core::necessity::{radial_projection_profile, DEFAULT_RADIAL, DEFAULT_RAYS};
use hplus_core::sequence::PointSequence;
use hplus_core::zero_free::{
    cauchy_riemann_defect, check_loglog_compat, construct_modulus_interpolant, ModulusOutcome, ModulusProblem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> DiscPoint {
    DiscPoint::from_polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)).unwrap()
}

fn harnack_sharp() -> Outcome {
    let mu = BoundaryMeasure::atom(0.0, 1.0).unwrap();
    let u0 = mu.poisson_integral(&DiscPoint::ORIGIN);
    let err = (1..=9)
        .map(|k| {
            let z = DiscPoint::new(k as f64 / 10.0, 0.0).unwrap();
            ((mu.poisson_integral(&z) / u0).log2() - hyperbolic_distance(&DiscPoint::ORIGIN, &z)).abs()
        })
        .fold(0.0, f64::max);
    outcome(err < 1e-12, format!("max error {err:.2e}"))
}

fn mobius_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut err = 0.0f64;
    for _ in 0..10_000 {
        let a = random_point(&mut rng, 0.99);
        let (z, w) = (random_point(&mut rng, 0.99), random_point(&mut rng, 0.99));
        let turn = rng.gen_range(0.0..TAU);
        let tau = |p: &DiscPoint| {
            let q = Mobius::to_origin(a).apply(p);
            DiscPoint::from_depth(q.depth(), q.arg() + turn).unwrap()
        };
        err = err.max((hyperbolic_distance(&tau(&z), &tau(&w)) - hyperbolic_distance(&z, &w)).abs());
    }
    outcome(err < 1e-10, format!("max error {err:.2e}"))
}

fn harmonic_measure_oracle() -> Outcome {
    const NODES: usize = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut err = 0.0f64;
    for _ in 0..50 {
        let z = random_point(&mut rng, 0.9);
        let (start, len) = (rng.gen_range(0.0..TAU), rng.gen_range(0.01..TAU));
        let exact = harmonic_measure(&z, &ArcSet::from_arc(&Arc::new(start, len).unwrap()));
        let h = len / NODES as f64;
        let quad: f64 = (0..NODES).map(|i| poisson_kernel(&z, start + (i as f64 + 0.5) * h)).sum::<f64>() * h;
        err = err.max((exact - quad).abs());
    }
    outcome(err < 1e-5, format!("max error {err:.2e}"))
}

/// Random problems for the oracle comparison: even trials carry compatible
/// values, odd trials the same values with one entry scaled by `2^±(1..3)`.
fn oracle_problems() -> Vec<InterpolationProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..100)
        .map(|t| {
            let d = rng.gen_range(1..=8);
            let s = PointSequence::new(format!("p{t}"), (0..d).map(|_| random_point(&mut rng, 0.9)).collect())
                .unwrap();
            let mut w = generate_compatible_values(&s, 0.1, rng.gen());
            if t % 2 == 1 {
                let k = rng.gen_range(0..d);
                let sign: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                w[k] *= (sign * rng.gen_range(1.0..3.0)).exp2();
            }
            InterpolationProblem::new(s, w, 0.1, DEFAULT_TOLERANCE).unwrap()
        })
        .collect()
}

fn oracle_equivalence(certs: &mut Vec<Certificate>) -> Outcome {
    let spec = GridSpec::default();
    let (mut disagree, mut infeasible) = (0, 0);
    for p in oracle_problems() {
        let direct = solve_direct(&p, &spec).unwrap();
        let parts = solve_by_partitions(&p, &spec).unwrap();
        if direct.is_feasible() != parts.feasible {
            disagree += 1;
        }
        if !direct.is_feasible() {
            infeasible += 1;
        }
        certs.extend(direct.certificate);
    }
    outcome(disagree == 0, format!("{disagree} disagreements, {infeasible}/100 infeasible"))
}

fn farkas_soundness(certs: &[Certificate]) -> Outcome {
    let s = PointSequence::new(
        "harnack_pair",
        vec![DiscPoint::ORIGIN, DiscPoint::new(1.0 / 3.0, 0.0).unwrap()],
    )
    .unwrap();
    let p = InterpolationProblem::new(s, vec![1.0, 3.0], 0.1, DEFAULT_TOLERANCE).unwrap();
    let pair = solve_direct(&p, &GridSpec::default()).unwrap();
    let mut all: Vec<&Certificate> = certs.iter().collect();
    all.extend(pair.certificate.as_ref());
    let bad = all.iter().filter(|c| !(c.margin > 0.0 && c.worst_column <= 1e-9)).count();
    let worst = all.iter().map(|c| c.worst_column).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        bad == 0 && !pair.is_feasible(),
        format!(
            "{} certificates, {bad} unsound, worst column {worst:.2e}; pair {}",
            all.len(),
            if pair.is_feasible() { "feasible" } else { "infeasible" }
        ),
    )
}

fn counterexample() -> Outcome {
    let (z1, z2) = counterexample_pair(4).unwrap();
    let (f1, _) = fit_condition_a(&z1, 0.6);
    let (f2, _) = fit_condition_a(&z2, 0.6);
    let u = counterexample_union(4).unwrap();
    let union = check_condition_a(&u, &DensityConstants::new(32.0, 0.9).unwrap());
    // r_4 is the fourth point of the union
    let count = u.distances_from(3).iter().filter(|&&b| b <= 8.0 + DIST_SLACK).count();
    outcome(
        f1 <= 32.0 && f2 <= 32.0 && !union.passed && count >= 256,
        format!(
            "M(Z1) = {f1:.3}, M(Z2) = {f2:.3}; union at (32, 0.9) {} with fitted M = {:.3}; {count} points within 8 of r_4",
            if union.passed { "passes" } else { "fails" },
            union.fitted
        ),
    )
}

fn construction_pipeline() -> Outcome {
    let s = radial_geometric(10).unwrap();
    let (m, _) = fit_condition_a(&s, 0.5);
    let p = choose_params(&s, &DensityConstants::new(m, 0.5).unwrap(), 0.2).unwrap();
    let fam = build_gn(&s, &p).unwrap();
    let n = fam.g_sets.len();
    let overlaps = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !fam.g_sets[i].is_disjoint(&fam.g_sets[j]))
        .count();
    let est = verify_estimates(&fam, &s);
    let margin = est.cover_margin.iter().copied().fold(f64::INFINITY, f64::min);
    let tail = est.tail_sum.iter().copied().fold(0.0, f64::max);
    outcome(
        overlaps == 0 && margin >= 0.0 && tail < 0.2,
        format!("M = {m:.3}, N = {}, {overlaps} overlaps, min margin {margin:.3e}, max tail {tail:.3e}", p.cap_n),
    )
}

fn alternating(n: usize) -> Vec<Side> {
    (0..n).map(|k| if k % 2 == 0 { Side::T } else { Side::S }).collect()
}

fn bounded_gamma() -> Outcome {
    let s = radial_geometric(8).unwrap();
    let h = solve_hinfty_partition(&s, &alternating(s.len()), &GridSpec::default(), 1e-9).unwrap();
    outcome(h.gamma_level > 0.05, format!("gamma = {:.5}", h.gamma_level))
}

fn endgame() -> Outcome {
    let s = radial_geometric(8).unwrap();
    let sides = alternating(s.len());
    let (m, _) = fit_condition_a(&s, 0.5);
    let p = choose_params(&s, &DensityConstants::new(m, 0.5).unwrap(), 0.2).unwrap();
    let fam = build_gn(&s, &p).unwrap();
    let h = solve_hinfty_partition(&s, &sides, &GridSpec::default(), 1e-9).unwrap();
    let eps = p.eta.min(0.02) / 2.0;
    let good = (0..10)
        .filter(|&seed| {
            let w = generate_compatible_values(&s, eps, seed);
            let u = assemble_u(&w, &fam, &h.h).unwrap();
            check_endgame(&s, &w, &sides, &u).all_hold()
        })
        .count();
    outcome(good == 10, format!("eps = {eps:.3e}, {good}/10 runs hold"))
}

fn projection_shape() -> Outcome {
    let lambdas = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut c_fit = 0.0f64;
    for _ in 0..100 {
        let mu = BoundaryMeasure::new((0..10).map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.01..1.0))))
            .unwrap();
        let profile = radial_projection_profile(&mu, &lambdas, DEFAULT_RAYS, DEFAULT_RADIAL).unwrap();
        c_fit = profile.iter().map(|e| e.measure * e.lambda).fold(c_fit, f64::max);
    }
    outcome(c_fit <= 16.0, format!("C_fit = {c_fit:.3}"))
}

fn modulus_interpolation() -> Outcome {
    const CAP: f64 = 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut rel, mut sup, mut cr) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for t in 0..20 {
        let d = rng.gen_range(1..=6);
        let s = PointSequence::new(format!("m{t}"), (0..d).map(|_| random_point(&mut rng, 0.9)).collect()).unwrap();
        let eps = 0.05;
        let moduli = generate_compatible_values(&s, eps, rng.gen())
            .iter()
            .map(|t| CAP * (-t).exp())
            .collect();
        let p = ModulusProblem::new(s, moduli, Some(CAP), eps).unwrap();
        if !check_loglog_compat(&p).0 {
            failures += 1;
            continue;
        }
        let ModulusOutcome::Matched(r) = construct_modulus_interpolant(&p, &GridSpec::default(), DEFAULT_TOLERANCE).unwrap()
        else {
            failures += 1;
            continue;
        };
        rel = rel.max(r.max_relative_error());
        for _ in 0..1000 {
            let z = random_point(&mut rng, 0.999);
            sup = sup.max(r.function.modulus(&z));
        }
        for _ in 0..20 {
            let z = random_point(&mut rng, 0.8);
            cr = cr.max(cauchy_riemann_defect(&r.function.mu, z.x(), z.y(), 1e-5).unwrap());
        }
    }
    outcome(
        failures == 0 && rel < 1e-6 && sup <= CAP + 1e-9 && cr < 1e-6,
        format!("{failures} unmatched, max relative error {rel:.2e}, sup |f| = {sup:.6}, CR defect {cr:.2e}"),
    )
}

fn gallery() -> Vec<PointSequence> {
    let mut g: Vec<PointSequence> = (1..=10).map(|d| radial_geometric(d).unwrap()).collect();
    g.extend((2..=9).map(|d| dyadic_lattice(d, 2).unwrap()));
    g.extend((2..=6).map(|d| dyadic_lattice(d, 3).unwrap()));
    for levels in [2, 3] {
        let (z1, z2) = counterexample_pair(levels).unwrap();
        g.push(z1);
        g.push(z2);
    }
    g.push(counterexample_union(2).unwrap());
    g.push(counterexample_union(3).unwrap());
    g.push(counterexample_union(4).unwrap());
    g
}

fn classifier_consistency() -> Outcome {
    let seqs = gallery();
    let (mut checked, mut premises) = (0, 0);
    let mut disagreements = Vec::new();
    for s in &seqs {
        let (m, _) = fit_condition_a(s, 0.5);
        let mut constants = vec![DensityConstants::new(m.max(1.0), 0.5).unwrap()];
        for (m, a) in [(2.0, 0.5), (8.0, 0.6), (32.0, 0.9)] {
            constants.push(DensityConstants::new(m, a).unwrap());
        }
        for c in &constants {
            for imp in implication_checks(s, c) {
                checked += 1;
                premises += imp.premise as usize;
                if imp.violated() {
                    disagreements.push(format!("{} {} at ({}, {})", s.label(), imp.name, c.m_const, c.alpha));
                }
            }
        }
    }
    outcome(
        disagreements.is_empty() && seqs.len() == 30,
        format!(
            "{} sequences, {checked} implications ({premises} with premise true), disagreements: {disagreements:?}",
            seqs.len()
        ),
    )
}

fn run(id: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let passed = o.passed && took < limit;
    println!(
        "criterion {id:>2}: {} | {} | {:.2}s (limit {}s)",
        if passed { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    passed
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut certs = Vec::new();
    let results = [
        run("1", secs(1), harnack_sharp),
        run("2", secs(1), mobius_invariance),
        run("3", secs(30), harmonic_measure_oracle),
        run("4", secs(300), || oracle_equivalence(&mut certs)),
        run("5", secs(60), || farkas_soundness(&certs)),
        run("6", secs(60), counterexample),
        run("7", secs(120), construction_pipeline),
        run("8a", secs(180), bounded_gamma),
        run("8b", secs(180), endgame),
        run("9", secs(60), projection_shape),
        run("10", secs(120), modulus_interpolation),
        run("11", secs(600), classifier_consistency),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    assert_eq!(failed, 0, "{failed} acceptance criteria are red");
}
