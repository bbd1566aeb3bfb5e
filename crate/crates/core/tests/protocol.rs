use commlab::protocol::*;
use commlab::quantum::Label;
use commlab::rng::stream;
use proptest::prelude::*;
use rand::Rng;

const SLOTS: usize = 100_000;

fn within_4_sigma(count: u64, trials: u64, p: f64) -> bool {
    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - trials as f64 * p).abs() <= 4.0 * sigma
}

#[test]
fn quantum_conditional_law_is_uniform_over_the_others() {
    let t = run_quantum(SLOTS, &["bob"], 2024).unwrap();
    assert_eq!(verify_disagreement(&t, "bob").unwrap(), Verdict::Ok);
    let bob = t.receiver("bob").unwrap();
    for x in t.alphabet() {
        let given: Vec<&Label> = t.sender().iter().zip(bob).filter(|(a, _)| *a == x).map(|(_, b)| b).collect();
        for y in t.alphabet().iter().filter(|y| *y != x) {
            let k = given.iter().filter(|b| **b == y).count() as u64;
            assert!(within_4_sigma(k, given.len() as u64, 0.5), "sender {x:?} → {y:?}: {k}/{}", given.len());
        }
    }
    // Alice's own symbols are uniform over the trine alphabet
    for x in t.alphabet() {
        let k = t.sender().iter().filter(|a| *a == x).count() as u64;
        assert!(within_4_sigma(k, SLOTS as u64, 1.0 / 3.0));
    }
}

#[test]
fn two_receivers_agree_half_the_time() {
    let t = run_quantum(SLOTS, &["bob", "charlie"], 7).unwrap();
    for party in ["bob", "charlie"] {
        assert_eq!(verify_disagreement(&t, party).unwrap(), Verdict::Ok);
    }
    let agree = t.receiver("bob").unwrap().iter().zip(t.receiver("charlie").unwrap()).filter(|(b, c)| b == c).count();
    assert!(within_4_sigma(agree as u64, SLOTS as u64, 0.5), "{agree}");
}

#[test]
fn classical_baseline_never_reveals_the_same_set() {
    let t = run_classical4(SLOTS, 11).unwrap();
    assert_eq!(verify_disagreement(&t, "bob").unwrap(), Verdict::Ok);
    let set = |l: &Label| matches!(l.as_str(), "c" | "d");
    let bob = t.receiver("bob").unwrap();
    assert!(t.sender().iter().zip(bob).all(|(a, b)| set(a) != set(b)));
    let given_a: Vec<&Label> = t.sender().iter().zip(bob).filter(|(a, _)| a.as_str() == "a").map(|(_, b)| b).collect();
    let c = given_a.iter().filter(|b| b.as_str() == "c").count() as u64;
    assert!(within_4_sigma(c, given_a.len() as u64, 0.5));
    let r = leakage_report(&t, "bob").unwrap();
    assert!((r.divergence - (3f64.log2() - 1.0)).abs() < 0.01, "{}", r.divergence);
}

#[test]
fn random_forgeries_pass_at_the_predicted_rate() {
    const TAGS: u64 = 10_000;
    const K: usize = 20;
    let t = run_quantum(1_000, &["bob"], 3).unwrap();
    let alphabet = t.alphabet().to_vec();
    let mut accepted = 0;
    for i in 0..TAGS {
        let mut rng = stream(99, i);
        let mut slots: Vec<usize> = rand::seq::index::sample(&mut rng, t.len(), K).into_vec();
        slots.sort_unstable();
        let symbols = slots.iter().map(|_| alphabet[rng.random_range(0..3)].clone()).collect();
        let tag = AuthTag::new(slots, symbols).unwrap();
        if check_tag(t.sender(), &tag).unwrap() == TagVerdict::Accept {
            accepted += 1;
        }
    }
    let p = forgery_acceptance(K);
    assert!((p - 3.0e-4).abs() < 1e-5);
    assert!(within_4_sigma(accepted, TAGS, p), "{accepted} accepted");
}

#[test]
fn analytic_leakage() {
    assert_eq!(leakage_analytic(Scheme::Quantum).divergence, 0.0);
    assert!((leakage_analytic(Scheme::Classical4).divergence - 0.585).abs() < 1e-3);
    let c3 = leakage_analytic(Scheme::Classical3);
    assert_eq!(c3.per_symbol.iter().map(|s| s.divergence).collect::<Vec<_>>(), [0.0, 1.0, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transcripts_never_overlap(seed in any::<u64>(), length in 1usize..5_000) {
        let q = run_quantum(length, &["bob", "charlie"], seed).unwrap();
        prop_assert_eq!(verify_disagreement(&q, "bob").unwrap(), Verdict::Ok);
        prop_assert_eq!(verify_disagreement(&q, "charlie").unwrap(), Verdict::Ok);
        let c = run_classical4(length, seed).unwrap();
        prop_assert_eq!(verify_disagreement(&c, "bob").unwrap(), Verdict::Ok);
    }

    #[test]
    fn seeds_determine_transcripts(seed in any::<u64>(), length in 1usize..500) {
        prop_assert_eq!(run_quantum(length, &["bob"], seed).unwrap(), run_quantum(length, &["bob"], seed).unwrap());
        prop_assert_eq!(run_classical4(length, seed).unwrap(), run_classical4(length, seed).unwrap());
    }

    #[test]
    fn genuine_tags_always_pass(seed in any::<u64>(), picks in proptest::collection::btree_set(0usize..300, 1..40)) {
        let t = run_quantum(300, &["bob"], seed).unwrap();
        let slots: Vec<usize> = picks.into_iter().collect();
        let tag = issue_tag(&t, "bob", &slots).unwrap();
        prop_assert_eq!(check_tag(t.sender(), &tag).unwrap(), TagVerdict::Accept);
        let json = serde_json::to_string(&tag).unwrap();
        prop_assert_eq!(serde_json::from_str::<AuthTag>(&json).unwrap(), tag);
    }

    #[test]
    fn transcript_json_roundtrips(seed in any::<u64>(), length in 1usize..200) {
        let t = run_quantum(length, &["bob", "charlie"], seed).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<Transcript>(&json).unwrap(), t);
    }
}
