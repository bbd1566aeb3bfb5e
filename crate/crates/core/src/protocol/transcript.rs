use indexmap::IndexMap;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trine::{antitrine_measurement, trine_alphabet, trine_states};
use crate::quantum::{born_probabilities, Label};
use crate::rng::{sample_index, stream};
use crate::tasks::default_alphabet;
use crate::{Error, Result};

/// Longest transcript accepted from serialized input or generated on request.
pub const MAX_LENGTH: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Trine states with the anti-trine measurement, alphabet `{a, b, c}`.
    Quantum,
    /// Sets `{a, b}` and `{c, d}`; Alice sends the set bit.
    Classical4,
    /// Unbalanced sets `{a}` and `{b, c}`; analytic reference only.
    Classical3,
}

impl Scheme {
    pub fn alphabet(self) -> Vec<Label> {
        match self {
            Scheme::Quantum | Scheme::Classical3 => trine_alphabet(),
            Scheme::Classical4 => default_alphabet(4),
        }
    }
}

/// Sender and receiver sequences of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TranscriptRecord", into = "TranscriptRecord")]
pub struct Transcript {
    scheme: Scheme,
    seed: u64,
    alphabet: Vec<Label>,
    sender: Vec<Label>,
    receivers: IndexMap<String, Vec<Label>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct TranscriptRecord {
    scheme: Scheme,
    seed: u64,
    length: usize,
    alphabet: Vec<Label>,
    sender: Vec<Label>,
    receivers: IndexMap<String, Vec<Label>>,
}

impl Transcript {
    pub fn new(
        scheme: Scheme,
        seed: u64,
        alphabet: Vec<Label>,
        sender: Vec<Label>,
        receivers: IndexMap<String, Vec<Label>>,
    ) -> Result<Self> {
        const WHAT: &str = "transcript";
        if alphabet.is_empty() {
            return Err(Error::invalid(WHAT, "empty alphabet"));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::invalid(WHAT, format!("alphabet repeats symbol {:?}", a.as_str())));
            }
        }
        if sender.len() > MAX_LENGTH {
            return Err(Error::invalid(WHAT, format!("length exceeds {MAX_LENGTH}")));
        }
        let check = |who: &str, seq: &[Label]| -> Result<()> {
            if seq.len() != sender.len() {
                return Err(Error::invalid(WHAT, format!("{who} has {} symbols, expected {}", seq.len(), sender.len())));
            }
            if let Some((slot, s)) = seq.iter().enumerate().find(|(_, s)| !alphabet.contains(s)) {
                return Err(Error::invalid(WHAT, format!("{who} slot {slot}: symbol {:?} not in alphabet", s.as_str())));
            }
            Ok(())
        };
        check("sender", &sender)?;
        for (name, seq) in &receivers {
            if name.is_empty() {
                return Err(Error::invalid(WHAT, "receiver names must be nonempty"));
            }
            check(name, seq)?;
        }
        Ok(Self { scheme, seed, alphabet, sender, receivers })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.sender.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sender.is_empty()
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn sender(&self) -> &[Label] {
        &self.sender
    }

    pub fn receivers(&self) -> &IndexMap<String, Vec<Label>> {
        &self.receivers
    }

    pub fn receiver(&self, party: &str) -> Result<&[Label]> {
        self.receivers.get(party).map(Vec::as_slice).ok_or_else(|| Error::UnknownParty(party.to_string()))
    }

    /// Header and one row per slot: `slot, sender, <receiver>...`.
    pub fn csv_records(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = vec!["slot".to_string(), "sender".to_string()];
        header.extend(self.receivers.keys().cloned());
        let rows = (0..self.len())
            .map(|i| {
                let mut row = vec![i.to_string(), self.sender[i].0.clone()];
                row.extend(self.receivers.values().map(|seq| seq[i].0.clone()));
                row
            })
            .collect();
        (header, rows)
    }
}

impl TryFrom<TranscriptRecord> for Transcript {
    type Error = Error;
    fn try_from(r: TranscriptRecord) -> Result<Self> {
        if r.length != r.sender.len() {
            return Err(Error::invalid("transcript", format!("length {} but {} sender symbols", r.length, r.sender.len())));
        }
        Transcript::new(r.scheme, r.seed, r.alphabet, r.sender, r.receivers)
    }
}

impl From<Transcript> for TranscriptRecord {
    fn from(t: Transcript) -> Self {
        TranscriptRecord {
            scheme: t.scheme,
            seed: t.seed,
            length: t.sender.len(),
            alphabet: t.alphabet,
            sender: t.sender,
            receivers: t.receivers,
        }
    }
}

fn check_length(length: usize) -> Result<()> {
    if length == 0 || length > MAX_LENGTH {
        return Err(Error::OutOfDomain(format!("length must be in 1..={MAX_LENGTH}, got {length}")));
    }
    Ok(())
}

/// Runs the trine scheme. Slot `i` draws from stream `i` of `seed`: first
/// Alice's symbol, then one Born-rule outcome per party in the given order,
/// each from its own fresh qubit.
pub fn run_quantum<S: AsRef<str>>(length: usize, parties: &[S], seed: u64) -> Result<Transcript> {
    check_length(length)?;
    if parties.is_empty() {
        return Err(Error::OutOfDomain("at least one receiving party is required".into()));
    }
    let names: Vec<String> = parties.iter().map(|p| p.as_ref().to_string()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::invalid("parties", format!("party {n:?} listed twice")));
        }
    }
    let meas = antitrine_measurement();
    let table: Vec<Vec<f64>> = trine_states()
        .iter()
        .map(|s| born_probabilities(&s.density(), &meas).map(|p| p.entries().to_vec()))
        .collect::<Result<_>>()?;
    let alphabet = trine_alphabet();
    let slots: Vec<(usize, Vec<usize>)> = (0..length)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let x = rng.random_range(0..3);
            let ys = names.iter().map(|_| sample_index(&table[x], rng.random())).collect();
            (x, ys)
        })
        .collect();
    let sender = slots.iter().map(|(x, _)| alphabet[*x].clone()).collect();
    let receivers = names
        .iter()
        .enumerate()
        .map(|(k, n)| (n.clone(), slots.iter().map(|(_, ys)| alphabet[ys[k]].clone()).collect()))
        .collect();
    Transcript::new(Scheme::Quantum, seed, alphabet, sender, receivers)
}

/// Runs the classical baseline with receiver `"bob"`. Slot `i` draws from
/// stream `i` of `seed`: Alice's set bit, her symbol within the set, then
/// Bob's symbol within the other set.
pub fn run_classical4(length: usize, seed: u64) -> Result<Transcript> {
    check_length(length)?;
    let alphabet = default_alphabet(4);
    let slots: Vec<(usize, usize)> = (0..length)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let set = rng.random_range(0..2usize);
            let x = 2 * set + rng.random_range(0..2usize);
            let y = 2 * (1 - set) + rng.random_range(0..2usize);
            (x, y)
        })
        .collect();
    let sender = slots.iter().map(|&(x, _)| alphabet[x].clone()).collect();
    let bob = slots.iter().map(|&(_, y)| alphabet[y].clone()).collect();
    Transcript::new(Scheme::Classical4, seed, alphabet, sender, IndexMap::from([("bob".to_string(), bob)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Mismatch { slot: usize },
}

/// `Ok` iff the party's symbol differs from Alice's in every slot.
pub fn verify_disagreement(t: &Transcript, party: &str) -> Result<Verdict> {
    let seq = t.receiver(party)?;
    Ok(match t.sender.iter().zip(seq).position(|(a, b)| a == b) {
        Some(slot) => Verdict::Mismatch { slot },
        None => Verdict::Ok,
    })
}
