#![no_main]

use libfuzzer_sys::fuzz_target;
use urcc::PauliString;

fuzz_target!(|data: &str| {
    if let Ok(p) = data.parse::<PauliString>() {
        let again: PauliString = p.to_string().parse().unwrap();
        assert_eq!(again, p);
        if let Ok(q) = p.multiply(&p) {
            assert!(q.is_identity_letters());
        }
    }
});
