#![no_main]

use libfuzzer_sys::fuzz_target;
use urcc::compiler::CompiledCircuitPair;

fuzz_target!(|data: &str| {
    if let Ok(pair) = CompiledCircuitPair::parse_dump(data) {
        let _ = pair.validate();
        let back = CompiledCircuitPair::parse_dump(&pair.dump()).unwrap();
        assert_eq!(back.n_seg(), pair.n_seg());
    }
});
