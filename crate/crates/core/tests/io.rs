mod common;

use relorder::audit::{canonical, sorkin_linear, sorkin_square, CANONICAL_NAMES};
use relorder::distribution::OutcomeDistribution;
use relorder::engines::{joint, Rule};
use relorder::error::Error;
use relorder::io::{
    bundled_document, format_probability, format_value, parse_records, parse_scenario, serialize_distribution,
    serialize_scenario, Format,
};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}.scn", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn fixtures_parse_to_the_bundled_scenarios() {
    for name in CANONICAL_NAMES {
        let parsed = parse_scenario(&fixture(name)).unwrap();
        assert_eq!(parsed, canonical(name).unwrap(), "{name}");
        assert_eq!(bundled_document(name).unwrap(), fixture(name));
    }
    assert!(bundled_document("nope").is_none());
}

#[test]
fn serialized_scenarios_round_trip() {
    for name in CANONICAL_NAMES {
        let s = canonical(name).unwrap();
        let text = serialize_scenario(&s);
        assert_eq!(parse_scenario(&text).unwrap(), s, "{name}");
        assert_eq!(serialize_scenario(&s), text);
    }
    let mut rng = common::rng(21);
    for _ in 0..20 {
        let s = common::random_scenario(&mut rng);
        assert_eq!(parse_scenario(&serialize_scenario(&s)).unwrap(), s);
    }
}

#[test]
fn syntax_errors_carry_byte_offsets() {
    let text = "{\n  \"factors\": [,]\n}";
    match parse_scenario(text) {
        Err(Error::ParseError { offset, .. }) => assert_eq!(&text[offset..offset + 1], ","),
        other => panic!("{other:?}"),
    }
}

#[test]
fn named_states_and_matrix_observables() {
    let doc = r#"{
      "factors": [{"name": "a", "dim": 2}, {"name": "b", "dim": 2}],
      "initial_state": {"kind": "named", "payload": "ghz"},
      "initial_region": {"points": [[-5, 0]]},
      "instruments": [
        {"name": "L", "region": {"points": [[0, -1]]},
         "portions": [{"name": "L", "factors": ["a"], "observable": [[0, [0, -1]], [[0, 1], 0]]}]},
        {"name": "R", "region": {"points": [[0, 1]]},
         "portions": [{"name": "R", "factors": ["b"], "observable": "pauli_z"}]}
      ]
    }"#;
    let s = parse_scenario(doc).unwrap();
    assert!(s.frame.is_none());
    let rho = s.rho0.matrix();
    assert!((rho[(0, 0)].re - 0.5).abs() < 1e-15 && (rho[(0, 3)].re - 0.5).abs() < 1e-15);
    // the L observable is pauli_y; on GHZ the outcomes are uncorrelated with R
    let d = joint(&s, Rule::Relational).unwrap();
    for l in [-1.0, 1.0] {
        for r in [-1.0, 1.0] {
            assert!((d.probability(&[l, r]) - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn unknown_named_observable_is_a_schema_error() {
    let doc = fixture("sorkin-square").replace("\"spin_x\"", "\"spin_w\"");
    assert_eq!(parse_scenario(&doc).unwrap_err().code(), "SchemaError");
}

#[test]
fn value_formatting() {
    assert_eq!(format_value(-0.0), "0");
    assert_eq!(format_value(-1e-13), "0");
    assert_eq!(format_value(2.0), "2");
    assert_eq!(format_value(0.25), "0.25");
    assert_eq!(format_value(-1.0000000000000002), "-1");
    assert_eq!(format_value(1.0 / 3.0), "0.3333333333");
    assert_eq!(format_probability(-1e-16), "0.000000000000");
    assert_eq!(format_probability(0.75), "0.750000000000");
}

#[test]
fn table_output() {
    let d = joint(&sorkin_linear(), Rule::Relational).unwrap().marginalize(&["A", "B"]).unwrap();
    assert_eq!(
        serialize_distribution(&d, Format::Table),
        "C   probability\n-1  0.250000000000\n1   0.750000000000\n"
    );
}

#[test]
fn records_round_trip_to_printing_precision() {
    let d = joint(&sorkin_square(), Rule::Bloch).unwrap();
    let text = serialize_distribution(&d, Format::Records);
    assert!(text.starts_with("{\"outcome\":{\"A\":-1,\"B\":0,\"C\":-1},\"probability\":"));
    let back = parse_records(&text).unwrap();
    assert_eq!(serialize_distribution(&back, Format::Records), text);
    assert!(back.max_deviation(&d).unwrap() < 1e-12);
}

#[test]
fn records_errors() {
    assert!(matches!(parse_records("{\"outcome\":{}}\n"), Err(Error::SchemaError { .. })));
    assert!(matches!(parse_records("nonsense\n"), Err(Error::ParseError { .. })));
    let mixed = "{\"outcome\":{\"A\":1},\"probability\":0.5}\n{\"outcome\":{\"B\":1},\"probability\":0.5}\n";
    assert!(parse_records(mixed).is_err());
    assert_eq!(parse_records("").unwrap(), OutcomeDistribution::default());
}

#[test]
fn format_names() {
    assert_eq!("table".parse::<Format>().unwrap(), Format::Table);
    assert_eq!("records".parse::<Format>().unwrap(), Format::Records);
    assert!("csv".parse::<Format>().is_err());
}
