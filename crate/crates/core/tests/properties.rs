mod common;

use colourings::alexander::{determinant, determinant_laplace, is_properly_factorizable};
use colourings::colmatrix::{build_colouring_matrix, ColouringMatrix};
use colourings::count::{brute_force_evaluated, count_auto, count_snf_oracle, Countable, DEFAULT_BRUTE_CAP};
use colourings::diagram::{KnotDiagram, Sign};
use colourings::laurent::{LaurentPoly, QuandleSpec};
use colourings::par::Execution;
use colourings::reduce::{apply_op, format_trace, parse_trace, reduce_matrix, replay, DEFAULT_BUDGET};
use colourings::snf::smith_diagonal;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{quandles_up_to, random_op, random_row_sum_zero};

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i32..=4, -6i64..=6), 0..5)
        .prop_map(|t| LaurentPoly::from_terms(t.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

fn nonzero_poly() -> impl Strategy<Value = LaurentPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn quandle() -> impl Strategy<Value = QuandleSpec> {
    (2u64..60, 1u64..60).prop_filter_map("coprime", |(n, m)| QuandleSpec::new(m % n, n).ok())
}

fn unit() -> impl Strategy<Value = LaurentPoly> {
    (any::<bool>(), -5i32..=5).prop_map(|(neg, k)| LaurentPoly::monomial(BigInt::from(if neg { -1 } else { 1 }), k))
}

fn matrix(size: usize) -> impl Strategy<Value = Vec<Vec<LaurentPoly>>> {
    prop::collection::vec(prop::collection::vec(poly(), size), size)
}

fn diagram() -> impl Strategy<Value = KnotDiagram> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec((any::<bool>(), 1..=n), n).prop_map(|cs| {
            let pairs: Vec<(Sign, usize)> = cs
                .into_iter()
                .map(|(pos, o)| (if pos { Sign::Positive } else { Sign::Negative }, o))
                .collect();
            KnotDiagram::from_pairs("random", &pairs).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), q in quandle()) {
        let n = q.n() as u128;
        prop_assert_eq!((&a + &b).eval_mod(&q) as u128, (a.eval_mod(&q) as u128 + b.eval_mod(&q) as u128) % n);
        prop_assert_eq!((&a * &b).eval_mod(&q) as u128, a.eval_mod(&q) as u128 * b.eval_mod(&q) as u128 % n);
        prop_assert_eq!((&LaurentPoly::m() * &LaurentPoly::m_inv()).eval_mod(&q), 1 % q.n());
    }

    #[test]
    fn normalization_is_idempotent_and_unit_blind(a in nonzero_poly(), u in unit()) {
        let n = a.normalize_alexander().unwrap();
        prop_assert_eq!(n.normalize_alexander().unwrap(), n.clone());
        prop_assert_eq!((&a * &u).normalize_alexander().unwrap(), n);
        prop_assert!(a.unit_equal(&(&a * &u)));
    }

    #[test]
    fn text_and_json_round_trip(a in poly()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<LaurentPoly>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), a);
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in nonzero_poly()) {
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn bareiss_matches_laplace(m in (1usize..=4).prop_flat_map(matrix)) {
        prop_assert_eq!(determinant(&m), determinant_laplace(&m));
    }

    #[test]
    fn smith_form_counts_match_enumeration(
        entries in prop::collection::vec(prop::collection::vec(-20i64..20, 3), 3),
        n in 2u64..9,
    ) {
        let big: Vec<Vec<BigInt>> = entries.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let diag = smith_diagonal(big);
        let nb = BigInt::from(n);
        let snf: u128 = diag.iter().map(|d| d.gcd(&nb).to_u128().unwrap()).product();
        let ni = n as i64;
        let mut brute = 0u128;
        for x in 0..ni {
            for y in 0..ni {
                for z in 0..ni {
                    if entries.iter().all(|r| (r[0] * x + r[1] * y + r[2] * z).rem_euclid(ni) == 0) {
                        brute += 1;
                    }
                }
            }
        }
        prop_assert_eq!(snf, brute);
    }

    #[test]
    fn products_are_factorizable(a in nonzero_poly(), b in nonzero_poly()) {
        let prod = &a * &b;
        prop_assume!(prod.span() <= 12);
        let f = is_properly_factorizable(&prod).unwrap();
        let proper = |p: &LaurentPoly| !p.is_unit();
        if proper(&a) && proper(&b) {
            prop_assert!(f.properly_factorizable);
        }
        if let Some((g, h)) = f.witness {
            prop_assert_eq!(&g * &h, prod);
            prop_assert!(!g.is_unit() && !h.is_unit());
        }
    }

    #[test]
    fn kronecker_agrees_with_complex_roots(coeffs in prop::collection::vec(-5i64..=5, 2..=6)) {
        let p = LaurentPoly::from_coeffs(&coeffs);
        prop_assume!(!p.is_zero());
        let f = is_properly_factorizable(&p).unwrap();
        prop_assert_eq!(f.properly_factorizable, factorizable_by_roots(&p));
    }

    #[test]
    fn row_sums_survive_any_op_sequence(seed in any::<u64>(), size in 2usize..=6, len in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_row_sum_zero(&mut rng, size);
        let ops: Vec<_> = (0..len).map(|_| random_op(&mut rng, size)).collect();
        let b = replay(&a, &ops).unwrap();
        prop_assert!(b.row_sums_zero());
        prop_assert_eq!(parse_trace(&format_trace(&ops)).unwrap(), ops);
    }

    #[test]
    fn single_ops_preserve_solution_counts(seed in any::<u64>(), size in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_row_sum_zero(&mut rng, size);
        let op = random_op(&mut rng, size);
        let b = apply_op(&a, &op).unwrap();
        for q in quandles_up_to(8) {
            let before = brute_force_evaluated(&a.evaluate(&q), DEFAULT_BRUTE_CAP, Execution::Sequential).unwrap();
            let after = brute_force_evaluated(&b.evaluate(&q), DEFAULT_BRUTE_CAP, Execution::Sequential).unwrap();
            prop_assert_eq!(before, after, "{} at {}", op, q);
        }
    }

    #[test]
    fn reduction_replays_and_preserves_counts(d in diagram()) {
        let a = build_colouring_matrix(&d).unwrap();
        let form = reduce_matrix(&a, DEFAULT_BUDGET);
        prop_assert_eq!(replay(&a, &form.op_log).unwrap(), form.matrix.clone());
        prop_assert!(form.matrix.row_sums_zero());
        let k = Countable::Reduced(form);
        for q in quandles_up_to(7) {
            let oracle = count_snf_oracle(&a, &q).unwrap().count;
            prop_assert_eq!(count_auto(&k, &q).unwrap().count, oracle, "at {}", q);
            let brute = brute_force_evaluated(&a.evaluate(&q), DEFAULT_BRUTE_CAP, Execution::Sequential).unwrap();
            prop_assert_eq!(brute, oracle, "at {}", q);
        }
    }

    #[test]
    fn execution_modes_agree(seed in any::<u64>(), n in 2u64..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: ColouringMatrix = random_row_sum_zero(&mut rng, 5);
        let q = QuandleSpec::all_for_modulus(n, n).next().unwrap();
        let e = a.evaluate(&q);
        prop_assert_eq!(
            brute_force_evaluated(&e, DEFAULT_BRUTE_CAP, Execution::Sequential).unwrap(),
            brute_force_evaluated(&e, DEFAULT_BRUTE_CAP, Execution::Parallel).unwrap()
        );
    }
}

/// Irreducibility oracle independent of Kronecker's method: a primitive polynomial of
/// degree `d` with leading coefficient `a` factors iff its content is nontrivial or
/// `b * prod (x - r)` over some proper subset of its complex roots has integer
/// coefficients for some `b | a`. Roots come from Durand-Kerner.
fn factorizable_by_roots(p: &LaurentPoly) -> bool {
    let q = p.normalize_alexander().unwrap();
    let coeffs: Vec<BigInt> = q.to_coeffs().unwrap();
    let degree = coeffs.len() - 1;
    if degree == 0 {
        let c = coeffs[0].abs();
        return (2..).take_while(|d: &i64| BigInt::from(*d * *d) <= c).any(|d| (&c % d).is_zero());
    }
    if !q.content().is_one() {
        return true;
    }
    let lead = coeffs[degree].to_i64().unwrap();
    let roots = durand_kerner(&coeffs.iter().map(|c| c.to_f64().unwrap()).collect::<Vec<_>>());
    for mask in 1u32..(1 << degree) - 1 {
        let subset: Vec<Complex64> = (0..degree).filter(|i| mask & (1 << i) != 0).map(|i| roots[i]).collect();
        let mut monic = vec![Complex64::new(1.0, 0.0)];
        for r in &subset {
            let mut next = vec![Complex64::new(0.0, 0.0); monic.len() + 1];
            for (i, c) in monic.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            monic = next;
        }
        for b in 1..=lead.abs() {
            if lead % b != 0 {
                continue;
            }
            let scaled: Vec<Complex64> = monic.iter().map(|c| c * b as f64).collect();
            if scaled.iter().all(|c| c.im.abs() < 1e-6 && (c.re - c.re.round()).abs() < 1e-6) {
                let g = LaurentPoly::from_coeffs(&scaled.iter().map(|c| c.re.round() as i64).collect::<Vec<_>>());
                if q.div_exact(&g).is_some() {
                    return true;
                }
            }
        }
    }
    false
}

fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c / lead);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let prev = roots.clone();
        for i in 0..degree {
            let denom = (0..degree)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        if roots.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-14) {
            break;
        }
    }
    roots
}
