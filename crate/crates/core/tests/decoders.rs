//! Every checked-in fuzz seed must decode and survive a dump round trip.

use std::fs;
use std::path::PathBuf;

use urcc::bench::ExperimentConfig;
use urcc::circuit::QuantumCircuit;
use urcc::compiler::{CompiledCircuitPair, SampledUnitary};
use urcc::estimator::ObservableDecomposition;
use urcc::qdrift::QdriftSample;
use urcc::{HamiltonianFile, PauliString};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn pauli_seeds() {
    for (name, text) in seeds("pauli_parse") {
        let p: PauliString = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p, "{name}");
    }
}

#[test]
fn hamiltonian_seeds() {
    for (name, text) in seeds("hamiltonian_json") {
        let file = HamiltonianFile::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let h = file
            .build(Some(2.0))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(h.total_lambda() > 0.0, "{name}");
    }
}

#[test]
fn observable_seeds() {
    for (name, text) in seeds("observable_json") {
        let obs =
            ObservableDecomposition::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!obs.is_empty(), "{name}");
    }
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("config_json") {
        ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn circuit_seeds() {
    for (name, text) in seeds("circuit_dump") {
        let c = QuantumCircuit::parse_dump(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            QuantumCircuit::parse_dump(&c.dump()).unwrap().dump(),
            c.dump(),
            "{name}"
        );
    }
}

#[test]
fn pair_seeds() {
    for (name, text) in seeds("pair_dump") {
        let p = CompiledCircuitPair::parse_dump(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        p.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            CompiledCircuitPair::parse_dump(&p.dump()).unwrap().dump(),
            p.dump(),
            "{name}"
        );
    }
}

#[test]
fn qdrift_seeds() {
    for (name, text) in seeds("qdrift_line") {
        let mut parsed = 0;
        for line in text.lines() {
            if let Ok(s) = line.parse::<QdriftSample>() {
                let _ = s.to_unitary();
                parsed += 1;
            }
            if let Ok(u) = line.parse::<SampledUnitary>() {
                assert_eq!(u.to_string().parse::<SampledUnitary>().unwrap(), u);
            }
        }
        assert!(parsed > 0, "{name}");
    }
}

#[test]
fn garbage_is_rejected_not_panicking() {
    let junk = [
        "",
        "{",
        "WIDTH",
        "seg 0 | L rot(X, phi=NaN)",
        "C nan",
        "\u{0}\u{ff}",
        "[1,2]",
        "-iiX",
    ];
    for s in junk {
        let _ = s.parse::<PauliString>();
        let _ = HamiltonianFile::from_json(s);
        let _ = ObservableDecomposition::from_json(s);
        let _ = ExperimentConfig::from_json(s);
        assert!(QuantumCircuit::parse_dump(s).is_err());
        assert!(CompiledCircuitPair::parse_dump(s).is_err());
        let _ = s.parse::<QdriftSample>();
    }
    assert!("seg 1 | L rot(X, phi=NaN)"
        .parse::<SampledUnitary>()
        .is_err());
}
