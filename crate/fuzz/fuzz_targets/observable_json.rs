#![no_main]

use libfuzzer_sys::fuzz_target;
use urcc::estimator::{group_ldf, ObservableDecomposition};

fuzz_target!(|data: &str| {
    if let Ok(obs) = ObservableDecomposition::from_json(data) {
        let m = 4 * obs.len() as u64;
        if obs.len() <= 64 {
            let _ = group_ldf(&obs, m);
        }
    }
});
