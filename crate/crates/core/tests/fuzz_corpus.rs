//! Every checked-in fuzz corpus seed parses and survives a JSON roundtrip.

use std::path::PathBuf;

use commlab::commmatrix::{CommMatrix, Factorization, Implementation};
use commlab::protocol::{AuthTag, Transcript};
use commlab::quantum::{DensityMatrix, Povm};
use commlab::tasks::{Encoding, RefereePolicy};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            (path, text)
        })
        .collect();
    assert!(!out.is_empty(), "no seeds for {target}");
    out.sort();
    out
}

fn roundtrip<T: Serialize + DeserializeOwned>(target: &str) {
    for (path, text) in seeds(target) {
        let value: T = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = serde_json::to_string(&value).unwrap();
        serde_json::from_str::<T>(&again).unwrap_or_else(|e| panic!("{} roundtrip: {e}", path.display()));
    }
}

#[test]
fn json_seeds_parse() {
    roundtrip::<DensityMatrix>("density_matrix_json");
    roundtrip::<Povm>("povm_json");
    roundtrip::<CommMatrix>("comm_matrix_json");
    roundtrip::<Implementation>("implementation_json");
    roundtrip::<Factorization>("factorization_json");
    roundtrip::<Transcript>("transcript_json");
    roundtrip::<AuthTag>("auth_tag_json");
    roundtrip::<RefereePolicy>("referee_policy_json");
    roundtrip::<Encoding>("encoding_json");
}

#[test]
fn text_seeds_parse() {
    for (path, text) in seeds("comm_matrix_text") {
        CommMatrix::parse_text(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
