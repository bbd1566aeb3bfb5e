use serde::{Deserialize, Serialize};

use super::transcript::Transcript;
use crate::quantum::Label;
use crate::{Error, Result};

/// A receiver's symbols at chosen slots, presented to the sender as proof
/// of holding the receiver's sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TagRecord", into = "TagRecord")]
pub struct AuthTag {
    slots: Vec<usize>,
    symbols: Vec<Label>,
}

#[derive(Clone, Serialize, Deserialize)]
struct TagRecord {
    slots: Vec<usize>,
    symbols: Vec<Label>,
}

impl AuthTag {
    pub fn new(slots: Vec<usize>, symbols: Vec<Label>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::invalid("tag", "no slots"));
        }
        if slots.len() != symbols.len() {
            return Err(Error::invalid("tag", format!("{} slots but {} symbols", slots.len(), symbols.len())));
        }
        if let Some(w) = slots.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::invalid("tag", format!("slot indices must increase strictly (position {})", w + 1)));
        }
        Ok(Self { slots, symbols })
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn symbols(&self) -> &[Label] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

impl TryFrom<TagRecord> for AuthTag {
    type Error = Error;
    fn try_from(r: TagRecord) -> Result<Self> {
        AuthTag::new(r.slots, r.symbols)
    }
}

impl From<AuthTag> for TagRecord {
    fn from(t: AuthTag) -> Self {
        TagRecord { slots: t.slots, symbols: t.symbols }
    }
}

fn check_range(slots: &[usize], length: usize) -> Result<()> {
    match slots.iter().find(|&&i| i >= length) {
        Some(i) => Err(Error::invalid("tag", format!("slot {i} is outside a transcript of length {length}"))),
        None => Ok(()),
    }
}

/// Cuts a tag from `party`'s sequence at the given slots.
pub fn issue_tag(t: &Transcript, party: &str, slots: &[usize]) -> Result<AuthTag> {
    let seq = t.receiver(party)?;
    check_range(slots, t.len())?;
    AuthTag::new(slots.to_vec(), slots.iter().map(|&i| seq[i].clone()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TagVerdict {
    Accept,
    Reject { slot: usize },
}

/// Accepts iff every tag symbol differs from the sender's symbol at its slot.
pub fn check_tag(sender: &[Label], tag: &AuthTag) -> Result<TagVerdict> {
    check_range(tag.slots(), sender.len())?;
    Ok(match tag.slots.iter().zip(&tag.symbols).find(|(&i, s)| &sender[i] == *s) {
        Some((&slot, _)) => TagVerdict::Reject { slot },
        None => TagVerdict::Accept,
    })
}

/// Probability that `k` symbols guessed uniformly over the trine alphabet
/// pass `check_tag`: each slot is accepted with probability 2/3.
pub fn forgery_acceptance(k: usize) -> f64 {
    (2.0f64 / 3.0).powi(k as i32)
}
