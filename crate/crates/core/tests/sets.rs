use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use quadcantor::fractal::IfsSpec;
use quadcantor::ideals::factor_element;
use quadcantor::intersection::{
    certified_bound, enumerate_level, full_intersection, lattice_points_in_disk, minimal_tuple, preconditions,
    tuple_is_minimal, Mode,
};
use quadcantor::membership::{build_state_graph, build_state_graph_with_radius, coding_of, is_member, verify_coding};
use quadcantor::ordercalc::c2_constant;
use quadcantor::quadring::{FieldElem, FieldSpec, QuadInt};
use quadcantor::DEFAULT_CAP;

type Z = BigInt;

fn big(v: i64) -> Z {
    Z::from(v)
}

fn ifs(d: i64, beta: (i64, i64), digits: &[(i64, i64)]) -> IfsSpec<Z> {
    let f = FieldSpec::new(d).unwrap();
    IfsSpec::new(
        f.small(beta.0, beta.1),
        digits.iter().map(|&(x, y)| f.small(x, y)).collect(),
    )
    .unwrap()
}

fn cantor() -> IfsSpec<Z> {
    ifs(-1, (3, 0), &[(0, 0), (2, 0)])
}

fn example() -> IfsSpec<Z> {
    ifs(-1, (-2, 1), &[(0, 0), (1, 0), (2, 0), (3, 0)])
}

fn specs() -> Vec<IfsSpec<Z>> {
    vec![
        cantor(),
        example(),
        ifs(-2, (1, 1), &[(0, 0), (1, 0)]),
        ifs(-3, (2, 0), &[(0, 0), (1, 0), (0, 1)]),
        ifs(-1, (1, 2), &[(0, 0), (1, 0)]),
    ]
}

fn spec_strategy() -> impl Strategy<Value = IfsSpec<Z>> {
    prop::sample::select(specs())
}

fn ratio_f64(r: &Ratio<Z>) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shrinking_delta_costs_at_most_one_digit_factor(spec in spec_strategy(), num in 1i64..10_000, den in 1i64..10_000) {
        let delta_sq = Ratio::new(big(num), big(den));
        let finer = &delta_sq / Ratio::from_integer(spec.beta().norm());
        let count = big(spec.digit_count() as i64);
        let (coarse_n, fine_n) = (spec.covering_bound_sq(&delta_sq), spec.covering_bound_sq(&finer));
        prop_assert!(fine_n >= coarse_n);
        prop_assert!(fine_n <= coarse_n * count);
    }

    #[test]
    fn period_bound_is_monotone(spec in spec_strategy(), u in 1i64..100_000) {
        prop_assert!(spec.period_bound(&big(u)) <= spec.period_bound(&big(u + 1)));
    }

    /// Every depth-`D` sample sharing a length-`k` prefix lies within `delta` of
    /// that prefix's partial sum, where `k` is the covering level of `delta`.
    #[test]
    fn covering_level_cylinders_cover_samples(spec in spec_strategy(), num in 1i64..64, den in 1i64..64) {
        let delta_sq = Ratio::new(big(num), big(den));
        let k = spec.covering_level_sq(&delta_sq);
        let a = spec.digit_count() as u64;
        prop_assume!(a.pow(k + 2) <= 1 << 16);
        let depth = k + 2;
        let pts = spec.sample_points::<f64>(depth, 1 << 16).unwrap();
        let centers = spec.sample_points::<f64>(k, 1 << 16).unwrap();
        let delta = ratio_f64(&delta_sq).sqrt();
        let per_prefix = a.pow(depth - k) as usize;
        for (i, z) in pts.iter().enumerate() {
            let c = centers[i / per_prefix];
            prop_assert!((z - c).norm() <= delta * (1.0 + 1e-9), "sample {} at {} from {}", i, (z - c).norm(), delta);
        }
        prop_assert_eq!(Z::from(centers.len()), spec.covering_bound_sq(&delta_sq));
    }

    /// A greedy `2 delta`-separated net of the samples is no larger than the
    /// covering bound: net points lie in distinct cylinder disks of radius `delta`.
    #[test]
    fn greedy_net_respects_covering_bound(spec in spec_strategy(), num in 1i64..64, den in 1i64..64) {
        let delta_sq = Ratio::new(big(num), big(den));
        let bound = spec.covering_bound_sq(&delta_sq);
        let pts = spec.sample_points::<f64>(10, 1 << 16).or_else(|_| spec.sample_points::<f64>(6, 1 << 16)).unwrap();
        let sep = 2.0 * ratio_f64(&delta_sq).sqrt() * (1.0 + 1e-9);
        let mut net: Vec<Complex64> = Vec::new();
        for z in &pts {
            if net.iter().all(|c| (z - c).norm() > sep) {
                net.push(*z);
            }
        }
        prop_assert!(Z::from(net.len()) <= bound, "{} net points, bound {}", net.len(), bound);
    }

    #[test]
    fn membership_outputs_are_consistent(spec in spec_strategy(), x in -40i64..40, y in -40i64..40, u in 1i64..=64) {
        let field = spec.field();
        let v = field.small::<Z>(x, y);
        let u = big(u);
        let graph = build_state_graph(&v, &u, &spec).unwrap();
        let nodes = graph.nodes();
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                prop_assert!((a - b).norm() >= Z::one());
            }
        }
        let members = graph.member_states().count();
        prop_assert!(Z::from(members) <= spec.period_bound(&(&u * &u)));
        let coding = coding_of(&v, &u, &spec).unwrap();
        prop_assert_eq!(coding.is_some(), graph.is_member());
        prop_assert_eq!(is_member(&v, &u, &spec).unwrap(), graph.is_member());
        if let Some(c) = coding {
            prop_assert!(verify_coding(&c, &v, &u, &spec).unwrap());
            prop_assert!(Z::from(c.period.len()) <= spec.period_bound(&(&u * &u)));
            let value = c.value(spec.beta()).unwrap();
            prop_assert_eq!(value, FieldElem::new(v.clone(), &field.from_int(u.clone())).unwrap());
        }
        let wider = spec.bounding_radius_sq() * Ratio::from_integer(big(4));
        prop_assert_eq!(build_state_graph_with_radius(&v, &u, &spec, &wider).unwrap().is_member(), graph.is_member());
    }
}

#[test]
fn full_digit_sets_have_dimension_two() {
    for (d, beta) in [(-1, (1, 1)), (-1, (-2, 1)), (-2, (0, 1)), (-3, (2, 1)), (-7, (3, 0))] {
        let f = FieldSpec::new(d).unwrap();
        let beta = f.small::<Z>(beta.0, beta.1);
        let n = beta.norm().to_i64().unwrap();
        let spec = IfsSpec::new(beta, (0..n).map(|k| f.small(k, 0)).collect()).unwrap();
        assert!((spec.similarity_dimension() - 2.0).abs() < 1e-12, "d={d}");
    }
}

/// Candidates from a plain disk of radius `R' |alpha|^N` around the origin.
fn brute_level(level: u32, alpha: &QuadInt<Z>, spec: &IfsSpec<Z>) -> Vec<FieldElem<Z>> {
    let field = spec.field();
    let alpha_n = alpha.pow(level as u64);
    let r2 = spec.bounding_radius_sq() * Ratio::from_integer(alpha_n.norm());
    let mut out: Vec<FieldElem<Z>> = lattice_points_in_disk(field, &field.zero(), &Z::one(), &r2)
        .into_iter()
        .map(|w| FieldElem::new(w, &alpha_n).unwrap())
        .filter(|z| is_member(z.num(), z.den(), spec).unwrap())
        .collect();
    out.sort_by(|a, b| a.cmp_by_size(b));
    out
}

#[test]
fn cylinder_candidates_match_full_disk() {
    let gauss = FieldSpec::gaussian();
    let d2 = FieldSpec::new(-2).unwrap();
    let cases = [
        (gauss.small::<Z>(2, 0), cantor(), 3),
        (gauss.small(10, 0), cantor(), 2),
        (gauss.small(-4, 1), example(), 2),
        (gauss.small(1, 1), ifs(-1, (1, 2), &[(0, 0), (1, 0)]), 4),
        (d2.small(3, 0), ifs(-2, (1, 1), &[(0, 0), (1, 0)]), 3),
        (d2.small(1, 1), ifs(-2, (0, 2), &[(0, 0), (1, 0), (0, 1)]), 4),
    ];
    for (alpha, spec, top) in cases {
        for level in 0..=top {
            let fast: Vec<FieldElem<Z>> = enumerate_level(level, &alpha, &spec, DEFAULT_CAP)
                .unwrap()
                .into_iter()
                .map(|p| p.value)
                .collect();
            assert_eq!(fast, brute_level(level, &alpha, &spec), "alpha={alpha} level={level}");
        }
    }
}

#[test]
fn levels_are_nested_and_points_reverify() {
    let gauss = FieldSpec::gaussian();
    let cases = [
        (gauss.small::<Z>(2, 0), cantor(), 5),
        (gauss.small(10, 0), cantor(), 3),
        (gauss.small(-4, 1), example(), 3),
    ];
    for (alpha, spec, top) in cases {
        let fact = factor_element(&alpha).unwrap();
        let mut prev: HashSet<FieldElem<Z>> = HashSet::new();
        for level in 0..=top {
            let points = enumerate_level(level, &alpha, &spec, DEFAULT_CAP).unwrap();
            let values: HashSet<FieldElem<Z>> = points.iter().map(|p| p.value.clone()).collect();
            assert_eq!(values.len(), points.len(), "duplicate value at level {level}");
            assert!(prev.is_subset(&values), "level {level} lost points");
            let alpha_n = alpha.pow(level as u64);
            let mut tuples: HashMap<FieldElem<Z>, Vec<u32>> = HashMap::new();
            for p in &points {
                let z = &p.value;
                assert!(z.mul_int(&alpha_n).is_integral());
                assert!(verify_coding(&p.coding, z.num(), z.den(), &spec).unwrap());
                assert!(p.period_congruence_holds(spec.beta(), &fact), "{z}");
                assert!(tuple_is_minimal(z, &fact, &p.tuple));
                assert_eq!(minimal_tuple(z, &fact).unwrap(), p.tuple);
                assert_eq!(
                    FieldElem::new(p.numerator.clone(), &alpha.pow(p.den_pow as u64)).unwrap(),
                    *z
                );
                assert!(tuples.insert(z.clone(), p.tuple.exponents.clone()).is_none());
            }
            prev = values;
        }
    }
}

/// Every tuple with `sum n_j = n0` lands past the contradiction.
#[test]
fn bound_chain_holds_at_certified_level() {
    let gauss = FieldSpec::gaussian();
    for (alpha, spec) in [
        (gauss.small::<Z>(2, 0), cantor()),
        (gauss.small(10, 0), cantor()),
        (gauss.small(4, 0), cantor()),
        (gauss.small(-4, 1), example()),
        (gauss.small(2, 1), ifs(-1, (1, 2), &[(0, 0), (1, 0)])),
    ] {
        let report = preconditions(&alpha, &spec).unwrap();
        let primes: Vec<_> = report.alpha_factorization.primes().cloned().collect();
        let lb = c2_constant(spec.beta(), &primes).unwrap();
        let covering = spec.covering_constants();
        let cert = certified_bound(&report, &covering, &lb).expect("a case applies");
        assert!(cert.n0 >= cert.formula_n0);
        let ell = primes.len();
        let mut tuple = vec![0u32; ell];
        let mut checked = 0;
        // Walk the compositions of n0 into ell parts, sampling a stride of them.
        let mut visit = |t: &[u32]| {
            assert!(cert.chain_holds(&covering, &primes, t), "alpha={alpha} tuple={t:?}");
            checked += 1;
        };
        compositions(cert.n0, &mut tuple, 0, &mut visit, 2000);
        assert!(checked > 0);
        let over: Vec<u32> = (0..ell).map(|j| if j == 0 { cert.n0 + 7 } else { 0 }).collect();
        assert!(cert.chain_holds(&covering, &primes, &over));
    }
}

fn compositions(rest: u32, t: &mut Vec<u32>, j: usize, visit: &mut impl FnMut(&[u32]), budget: usize) -> usize {
    if budget == 0 {
        return 0;
    }
    if j + 1 == t.len() {
        t[j] = rest;
        visit(t);
        return 1;
    }
    let mut used = 0;
    for n in 0..=rest {
        t[j] = n;
        used += compositions(rest - n, t, j + 1, visit, budget - used);
        if used >= budget {
            break;
        }
    }
    used
}

#[test]
fn bounded_and_certified_modes_agree_on_small_certificates() {
    let gauss = FieldSpec::gaussian();
    let alpha = gauss.small::<Z>(1, 1);
    let spec = ifs(-1, (1, 2), &[(0, 0), (1, 0)]);
    let certified = full_intersection(&alpha, &spec, Mode::Certified { fallback_nmax: 3 }, DEFAULT_CAP).unwrap();
    let cert = certified.certified.clone().unwrap();
    if certified.exhausted {
        assert_eq!(certified.level, cert.n0);
        let bounded = full_intersection(&alpha, &spec, Mode::Bounded { nmax: cert.n0 + 2 }, DEFAULT_CAP).unwrap();
        let a: Vec<_> = certified.points.iter().map(|p| &p.value).collect();
        let b: Vec<_> = bounded.points.iter().map(|p| &p.value).collect();
        assert_eq!(a, b);
    } else {
        assert_eq!(certified.level, 3);
    }
    assert!(certified.points.iter().all(|p| !p.value.is_zero() || p.den_pow == 0));
}
