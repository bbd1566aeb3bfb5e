#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = commlab::commmatrix::CommMatrix::parse_text(text) {
            // every accepted matrix has a valid JSON form
            let json = serde_json::to_string(&m).expect("serializable");
            serde_json::from_str::<commlab::commmatrix::CommMatrix>(&json).expect("roundtrip");
        }
    }
});
