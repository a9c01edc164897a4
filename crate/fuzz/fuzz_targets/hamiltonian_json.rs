#![no_main]

use libfuzzer_sys::fuzz_target;
use urcc::HamiltonianFile;

fuzz_target!(|data: &str| {
    if let Ok(file) = HamiltonianFile::from_json(data) {
        // Building may still reject windows or durations, but must not panic.
        if let Ok(h) = file.build(Some(1.0)) {
            let _ = h.total_lambda();
        }
    }
});
