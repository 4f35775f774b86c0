mod common;

use colourings::census::Census;
use colourings::colmatrix::build_colouring_matrix;
use colourings::count::{count_auto, count_general_triangular, count_snf_oracle, Countable, DEFAULT_TRIANGULAR_CAP};
use colourings::diagram::{parse_diagram, validate_diagram, DiagramError, Violation};
use colourings::reduce::{format_trace, parse_trace, reduce_matrix, replay, Classification, DEFAULT_BUDGET};

use common::{mirror, quandles_up_to, rotate};

fn census() -> Census {
    Census::load_default().unwrap()
}

#[test]
fn census_text_round_trips() {
    for d in census().diagrams() {
        let back = parse_diagram(&d.to_census_text()).unwrap();
        assert_eq!(&back, d);
        assert!(validate_diagram(d).is_empty());
    }
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_diagram("knot 3_1\ncrossings 3\n+ 3\n* 1\n+ 2\n").unwrap_err();
    match err {
        DiagramError::Syntax { line, .. } => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_diagram("crossings 1\n+ 1\n"), Err(DiagramError::Syntax { .. })));
    assert!(matches!(parse_diagram("knot x\ncrossings 2\n+ 1\n"), Err(DiagramError::Syntax { .. })));
}

#[test]
fn over_arcs_must_exist() {
    let err = parse_diagram("knot x\ncrossings 2\n+ 3\n- 1\n").unwrap_err();
    match err {
        DiagramError::Invalid(v) => {
            assert_eq!(v, vec![Violation::OverArcOutOfRange { index: 1, over_arc: 3, arcs: 2 }])
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bundled_reductions_are_pinned() {
    let c = census();
    for d in c.diagrams() {
        let a = build_colouring_matrix(d).unwrap();
        let form = reduce_matrix(&a, DEFAULT_BUDGET);
        let expected = match d.name.as_str() {
            "8_18" | "9_46" => Classification::TypeII,
            "9_35" | "10_140" => Classification::SimplifiedBlock,
            _ => Classification::TypeI,
        };
        assert_eq!(form.classification, expected, "{}", d.name);
        assert!(!form.budget_exhausted);
        let ops = parse_trace(&format_trace(&form.op_log)).unwrap();
        assert_eq!(replay(&a, &ops).unwrap(), form.matrix, "{}", d.name);
    }
}

#[test]
fn triangular_solver_matches_the_oracle() {
    let c = census();
    for d in c.diagrams() {
        let a = build_colouring_matrix(d).unwrap();
        let form = reduce_matrix(&a, DEFAULT_BUDGET);
        if !form.classification.is_triangular() {
            assert!(count_general_triangular(&form, &quandles_up_to(3)[0], DEFAULT_TRIANGULAR_CAP).is_err());
            continue;
        }
        for q in quandles_up_to(11) {
            let t = count_general_triangular(&form, &q, DEFAULT_TRIANGULAR_CAP).unwrap().count;
            assert_eq!(t, count_snf_oracle(&a, &q).unwrap().count, "{} at {q}", d.name);
        }
    }
}

#[test]
fn relabelled_and_mirrored_diagrams_count_the_same() {
    let c = census();
    let quandles = quandles_up_to(9);
    for d in c.diagrams() {
        let base = Countable::Matrix(build_colouring_matrix(d).unwrap());
        let expected: Vec<u128> = quandles.iter().map(|q| count_auto(&base, q).unwrap().count).collect();
        for v in [rotate(d, 1), rotate(d, d.len() / 2), mirror(d)] {
            let form = reduce_matrix(&build_colouring_matrix(&v).unwrap(), DEFAULT_BUDGET);
            let k = Countable::Reduced(form);
            for (q, want) in quandles.iter().zip(&expected) {
                assert_eq!(count_auto(&k, q).unwrap().count, *want, "{} at {q}", v.name);
            }
        }
    }
}
