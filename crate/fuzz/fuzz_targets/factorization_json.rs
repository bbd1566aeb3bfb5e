#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(value) = serde_json::from_slice::<commlab::commmatrix::Factorization>(data) {
        // accepted inputs must survive a serialization roundtrip
        let text = serde_json::to_string(&value).expect("serializable");
        serde_json::from_str::<commlab::commmatrix::Factorization>(&text).expect("roundtrip");
    }
});
