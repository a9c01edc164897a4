#![no_main]

use libfuzzer_sys::fuzz_target;
use urcc::circuit::{count_resources, QuantumCircuit};

fuzz_target!(|data: &str| {
    if let Ok(circ) = QuantumCircuit::parse_dump(data) {
        let back = QuantumCircuit::parse_dump(&circ.dump()).unwrap();
        assert_eq!(back.gates().len(), circ.gates().len());
        let _ = count_resources(&circ);
    }
});
