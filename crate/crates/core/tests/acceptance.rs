//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use colourings::alexander::{alexander_from_matrix, alexander_from_triangular, is_properly_factorizable};
use colourings::census::{Census, KindTag};
use colourings::colmatrix::build_colouring_matrix;
use colourings::count::{
    brute_force_evaluated, count_auto, count_snf_oracle, count_type_i, Countable, DEFAULT_BRUTE_CAP,
};
use colourings::distinguish::{grid_compare, witness_nontriangularizable};
use colourings::laurent::{LaurentPoly, QuandleSpec};
use colourings::par::Execution;
use colourings::reduce::{apply_op, apply_op_in_place, reduce_matrix, DEFAULT_BUDGET};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{mirror, quandles_up_to, random_op, random_row_sum_zero, rotate, value_at};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&Census) -> Outcome);

fn p(s: &str) -> LaurentPoly {
    s.parse().unwrap()
}

fn q(m: u64, n: u64) -> QuandleSpec {
    QuandleSpec::new(m, n).unwrap()
}

fn table_count(c: &Census, name: &str, m: u64, n: u64) -> Result<u128, String> {
    let k = c.countable(name).ok_or_else(|| format!("{name} missing from the tables"))?;
    count_auto(&k, &q(m, n)).map(|r| r.count).map_err(|e| format!("{name}: {e}"))
}

fn type_i_prediction(c: &Census, name: &str, m: u64, n: u64) -> Result<u128, String> {
    let alex = c
        .lookup(name)
        .and_then(|e| e.alexander())
        .ok_or_else(|| format!("{name} has no Alexander polynomial"))?;
    Ok(count_type_i(&alex, &q(m, n)).count)
}

fn expect(label: &str, got: u128, want: u128) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want}"))
    }
}

fn worked_examples(c: &Census) -> Outcome {
    let counts = [
        ("8_18", 8, 15, 135),
        ("9_35", 2, 3, 27),
        ("3_1", 2, 3, 9),
        ("4_1", 2, 3, 3),
        ("10_137", 2, 7, 7),
        ("10_155", 2, 7, 49),
        ("8_18", 3, 245, 12005),
        ("9_37", 3, 245, 1225),
        ("9_49", 4, 5, 125),
        ("10_157", 6, 7, 343),
        ("9_47", 2, 3, 27),
        ("9_48", 2, 3, 27),
    ];
    for (name, m, n, want) in counts {
        expect(&format!("count({name}, {m}, {n})"), table_count(c, name, m, n)?, want)?;
    }
    let predictions = [("9_35", 2, 3, 9), ("9_49", 4, 5, 25), ("10_157", 6, 7, 49), ("9_47", 2, 3, 9), ("9_48", 2, 3, 9)];
    for (name, m, n, want) in predictions {
        expect(&format!("prediction({name}, {m}, {n})"), type_i_prediction(c, name, m, n)?, want)?;
    }
    // the same numbers from the bundled diagrams, where there is one
    for (name, m, n, want) in [("8_18", 8, 15, 135), ("9_35", 2, 3, 27), ("3_1", 2, 3, 9), ("4_1", 2, 3, 3), ("8_18", 3, 245, 12005)] {
        let d = c.diagram(name).ok_or_else(|| format!("no diagram for {name}"))?;
        let form = reduce_matrix(&build_colouring_matrix(d).unwrap(), DEFAULT_BUDGET);
        let got = count_auto(&Countable::Reduced(form), &q(m, n)).map_err(|e| e.to_string())?.count;
        expect(&format!("diagram count({name}, {m}, {n})"), got, want)?;
    }
    Ok(format!("{} counts, {} type I predictions, 5 diagram recounts", counts.len(), predictions.len()))
}

fn oracle_equivalence(c: &Census) -> Outcome {
    let quandles = quandles_up_to(12);
    let mut checks = 0;
    let mut brute = 0;
    for d in c.diagrams() {
        let a = build_colouring_matrix(d).unwrap();
        let form = reduce_matrix(&a, DEFAULT_BUDGET);
        let dispatch = Countable::Reduced(form);
        let table = c.countable(&d.name);
        for qs in &quandles {
            let fast = count_auto(&dispatch, qs).map_err(|e| e.to_string())?.count;
            let oracle = count_snf_oracle(&a, qs).map_err(|e| e.to_string())?.count;
            expect(&format!("{} at {qs}: dispatch vs SNF", d.name), fast, oracle)?;
            if let Some(t) = &table {
                let tc = count_auto(t, qs).map_err(|e| e.to_string())?.count;
                expect(&format!("{} at {qs}: table vs SNF", d.name), tc, oracle)?;
            }
            if (qs.n() as u128).pow(d.len() as u32) <= DEFAULT_BRUTE_CAP as u128 {
                let b = brute_force_evaluated(&a.evaluate(qs), DEFAULT_BRUTE_CAP, Execution::default())
                    .map_err(|e| e.to_string())?;
                expect(&format!("{} at {qs}: brute force vs SNF", d.name), b, oracle)?;
                brute += 1;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} (diagram, quandle) pairs agree, {brute} also by brute force"))
}

fn alexander_conformance(c: &Census) -> Outcome {
    let mut diagrams = 0;
    for d in c.diagrams() {
        let a = build_colouring_matrix(d).unwrap();
        let alex = alexander_from_matrix(&a).map_err(|e| format!("{}: {e}", d.name))?;
        let table = c
            .lookup(&d.name)
            .filter(|e| e.kind.tag() != KindTag::Diagram)
            .and_then(|e| e.alexander())
            .ok_or_else(|| format!("{} has no table entry", d.name))?;
        let table = table.normalize_alexander().map_err(|e| e.to_string())?;
        if alex.poly() != &table {
            return Err(format!("{}: matrix gives {}, table gives {table}", d.name, alex.poly()));
        }
        let form = reduce_matrix(&a, DEFAULT_BUDGET);
        if form.classification.is_triangular() {
            let tri = alexander_from_triangular(&form).map_err(|e| format!("{}: {e}", d.name))?;
            if !tri.poly().unit_equal(alex.poly()) {
                return Err(format!("{}: triangular diagonal gives {}", d.name, tri.poly()));
            }
        }
        diagrams += 1;
    }
    let mut table = 0;
    for e in c.of_kind(KindTag::TypeI) {
        let v = e.alexander().unwrap().eval_int(&BigInt::one()).unwrap();
        if v.abs() != BigInt::one() {
            return Err(format!("{}: Alex(1) = {v}", e.name));
        }
        table += 1;
    }
    if table != 216 {
        return Err(format!("expected 216 type I entries, found {table}"));
    }
    Ok(format!("{diagrams} diagrams match their tables, Alex(1) = ±1 for all {table} type I entries"))
}

fn factorizability(c: &Census) -> Outcome {
    let listed = &c.relations.not_properly_factorizable;
    if listed.len() != 9 {
        return Err(format!("expected 9 listed polynomials, found {}", listed.len()));
    }
    for (name, coeffs) in listed {
        let f = is_properly_factorizable(&LaurentPoly::from_coeffs(coeffs)).map_err(|e| e.to_string())?;
        if f.properly_factorizable {
            return Err(format!("{name}: reported factorizable as {:?}", f.witness));
        }
    }
    for s in ["8 - 2*m^2 - m^4", "4 + 2*m^2"] {
        let poly = p(s);
        let f = is_properly_factorizable(&poly).map_err(|e| e.to_string())?;
        let (a, b) = f.witness.ok_or_else(|| format!("{s}: no witness"))?;
        if !f.properly_factorizable || &a * &b != poly || a.is_unit() || b.is_unit() {
            return Err(format!("{s}: bad witness ({a}) * ({b})"));
        }
    }
    Ok("9 irreducible, 2 witnesses multiply back".into())
}

fn nontriangularizable_witnesses(c: &Census) -> Outcome {
    let expected = [("9_35", 2, 3), ("9_47", 2, 3), ("9_48", 2, 3), ("9_49", 4, 5), ("10_157", 6, 7)];
    let mut found = Vec::new();
    for (name, m, n) in expected {
        let block = c.block(name).ok_or_else(|| format!("{name}: no block data"))?;
        let alex = c
            .relations
            .not_properly_factorizable
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| LaurentPoly::from_coeffs(v))
            .ok_or_else(|| format!("{name}: no Alexander polynomial listed"))?;
        let w = witness_nontriangularizable(name, &block.rows, &alex, 10, 10)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{name}: no witness with m, n < 10"))?;
        if (w.q.n(), w.q.m()) > (n, m) || w.actual_count == w.type_i_prediction {
            return Err(format!("{name}: witness {} is later than ({m}, {n})", w.q));
        }
        found.push(format!("{name}@{}", w.q));
    }
    Ok(found.join(" "))
}

fn indistinguishability(c: &Census) -> Outcome {
    let exec = Execution::default();
    let table = |name: &str| c.countable(name).ok_or_else(|| format!("{name} missing"));
    let proven = c.relations.proven_indistinguishable.first().ok_or("no proven pair")?;
    let r = grid_compare(&table(&proven.type_i)?, &table(&proven.type_ii)?, 30, 30, exec)
        .map_err(|e| e.to_string())?;
    if !r.differing.is_empty() {
        return Err(format!("{} / {} differ at {:?}", proven.type_i, proven.type_ii, r.differing[0]));
    }
    let mut cells = r.cells_checked;
    // the same pair from the bundled diagrams, each count checked against the oracle
    let reduced = |name: &str| -> Result<Countable, String> {
        let d = c.diagram(name).ok_or_else(|| format!("no diagram for {name}"))?;
        Ok(Countable::Reduced(reduce_matrix(&build_colouring_matrix(d).unwrap(), DEFAULT_BUDGET)))
    };
    let r = grid_compare(&reduced(&proven.type_i)?, &reduced(&proven.type_ii)?, 30, 30, exec)
        .map_err(|e| e.to_string())?;
    if !r.differing.is_empty() {
        return Err(format!("diagrams of {} / {} differ at {:?}", proven.type_i, proven.type_ii, r.differing[0]));
    }
    cells += r.cells_checked;
    for g in &c.relations.type_i_groups {
        let first = table(&g.knots[0])?;
        for other in &g.knots[1..] {
            let r = grid_compare(&first, &table(other)?, 30, 30, exec).map_err(|e| e.to_string())?;
            if !r.differing.is_empty() {
                return Err(format!("{} / {other} differ at {:?}", g.knots[0], r.differing[0]));
            }
            cells += r.cells_checked;
        }
    }
    for pair in &c.relations.distinguished_pairs {
        let a = table_count(c, &pair.type_i, pair.m, pair.n)?;
        let b = table_count(c, &pair.type_ii, pair.m, pair.n)?;
        if a == b {
            return Err(format!("{} / {} both {a} at (m={}, n={})", pair.type_i, pair.type_ii, pair.m, pair.n));
        }
    }
    Ok(format!(
        "{cells} equal cells over {} groups and the proven pair, {} pairs distinguished",
        c.relations.type_i_groups.len(),
        c.relations.distinguished_pairs.len()
    ))
}

fn reduction_soundness(c: &Census) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..10_000 {
        let size = rng.gen_range(2..=6);
        let mut a = random_row_sum_zero(&mut rng, size);
        for _ in 0..rng.gen_range(1..=12) {
            let op = random_op(&mut rng, size);
            apply_op_in_place(&mut a, &op).map_err(|e| e.to_string())?;
            if !a.row_sums_zero() {
                return Err(format!("trial {trial}: {op} broke the row sums"));
            }
        }
    }
    let quandles = quandles_up_to(8);
    let seq = Execution::Sequential;
    for trial in 0..300 {
        let size = rng.gen_range(2..=4);
        let a = random_row_sum_zero(&mut rng, size);
        let op = random_op(&mut rng, size);
        let b = apply_op(&a, &op).map_err(|e| e.to_string())?;
        for qs in &quandles {
            let before = brute_force_evaluated(&a.evaluate(qs), DEFAULT_BRUTE_CAP, seq).unwrap();
            let after = brute_force_evaluated(&b.evaluate(qs), DEFAULT_BRUTE_CAP, seq).unwrap();
            if before != after {
                return Err(format!("trial {trial}: {op} changed the count at {qs} from {before} to {after}"));
            }
        }
    }
    let mut triangular = 0;
    let mut attempted = 0;
    for d in c.diagrams() {
        let n = d.len();
        let variants = (0..n).flat_map(|r| {
            let rd = rotate(d, r);
            let md = mirror(&rd);
            [rd, md]
        });
        for v in variants {
            attempted += 1;
            let a = build_colouring_matrix(&v).unwrap();
            let form = reduce_matrix(&a, DEFAULT_BUDGET);
            if !form.classification.is_triangular() {
                continue;
            }
            let alex = alexander_from_matrix(&a).map_err(|e| format!("{}: {e}", v.name))?;
            let tri = alexander_from_triangular(&form).map_err(|e| format!("{}: {e}", v.name))?;
            if !tri.poly().unit_equal(alex.poly()) {
                return Err(format!("{}: diagonal product {} vs {}", v.name, tri.poly(), alex.poly()));
            }
            triangular += 1;
        }
    }
    Ok(format!(
        "10000 op sequences, 300 single ops over {} quandles, {triangular}/{attempted} diagram variants triangularized and unit-equal",
        quandles.len()
    ))
}

/// `n` built from the diagonal values at `m` as in the distinguishing construction.
fn constructed_modulus(diagonal: &[LaurentPoly], m: u64) -> Option<u64> {
    let mut product = BigInt::one();
    for d in diagonal {
        let v = value_at(d, m);
        if v == BigInt::from(0) || !v.gcd(&BigInt::from(m)).is_one() {
            return None;
        }
        product *= v.abs();
    }
    let product = product.to_u64()?;
    if product > m {
        return Some(product);
    }
    let next_prime = (m + 1..).find(|&v| (2..v).take_while(|d| d * d <= v).all(|d| v % d != 0))?;
    product.checked_mul(next_prime)
}

fn maximal_count(c: &Census) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let pool: Vec<_> = c.of_kind(KindTag::TypeI).chain(c.of_kind(KindTag::TypeII)).collect();
    let mut samples = Vec::new();
    let mut tries = 0;
    while samples.len() < 20 {
        tries += 1;
        if tries > 10_000 {
            return Err(format!("only {} admissible samples found", samples.len()));
        }
        let e = pool[rng.gen_range(0..pool.len())];
        let m = rng.gen_range(2..=9);
        let diagonal = match &e.kind {
            colourings::EntryKind::TypeI { alex } => vec![alex.clone()],
            colourings::EntryKind::TypeII { alpha1, alpha2, .. } => vec![alpha1.clone(), alpha2.clone()],
            _ => unreachable!(),
        };
        let Some(n) = constructed_modulus(&diagonal, m) else { continue };
        let qs = QuandleSpec::new(m, n).map_err(|e| e.to_string())?;
        let count = count_auto(&e.countable().unwrap(), &qs).map_err(|e| e.to_string())?.count;
        let alex = value_at(&e.alexander().unwrap(), m).abs();
        let want = BigInt::from(n) * alex;
        if BigInt::from(count) != want {
            return Err(format!("{} at {qs}: count {count}, expected {want}", e.name));
        }
        samples.push(format!("{}@{qs}", e.name));
    }
    let kinds = samples.iter().filter(|s| c.lookup_kind(s.split('@').next().unwrap(), KindTag::TypeII).is_some()).count();
    Ok(format!("20 samples ({kinds} type II), e.g. {}", samples[..3].join(" ")))
}

fn main() -> ExitCode {
    let census = match Census::load_default() {
        Ok(c) => c,
        Err(e) => {
            println!("cannot load the bundled census: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: [Criterion; 8] = [
        ("worked examples", worked_examples),
        ("oracle equivalence, n <= 12", oracle_equivalence),
        ("Alexander table conformance", alexander_conformance),
        ("factorizability", factorizability),
        ("non-triangularizability witnesses", nontriangularizable_witnesses),
        ("indistinguishability sweeps, n <= 30", indistinguishability),
        ("reduction soundness", reduction_soundness),
        ("maximal count", maximal_count),
    ];
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&census);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {label} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {label}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
