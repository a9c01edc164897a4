#![no_main]

use libfuzzer_sys::fuzz_target;
use urcc::compiler::SampledUnitary;
use urcc::qdrift::QdriftSample;

fuzz_target!(|data: &str| {
    for line in data.lines() {
        if let Ok(s) = line.parse::<QdriftSample>() {
            let _ = s.to_unitary();
        }
        if let Ok(u) = line.parse::<SampledUnitary>() {
            assert_eq!(u.to_string().parse::<SampledUnitary>().ok(), Some(u));
        }
    }
});
