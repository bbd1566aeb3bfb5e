use serde::{Deserialize, Serialize};

use crate::quantum::{DensityMatrix, Label, Povm, ProbVector};
use crate::tol::EPS_NORM;
use crate::{Error, Result};

/// Symbols `a, b, c, …` for small alphabets, `s26, s27, …` beyond `z`.
pub fn default_alphabet(n: usize) -> Vec<Label> {
    (0..n)
        .map(|i| match u8::try_from(i) {
            Ok(k) if k < 26 => Label::new(char::from(b'a' + k).to_string()),
            _ => Label::new(format!("s{i}")),
        })
        .collect()
}

/// Assignment of one state to every symbol of an alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EncodingRecord", into = "EncodingRecord")]
pub struct Encoding {
    alphabet: Vec<Label>,
    states: Vec<DensityMatrix>,
}

#[derive(Clone, Serialize, Deserialize)]
struct EncodingRecord {
    alphabet: Vec<Label>,
    states: Vec<DensityMatrix>,
}

impl Encoding {
    pub fn new(alphabet: Vec<Label>, states: Vec<DensityMatrix>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::invalid("encoding", "empty alphabet"));
        }
        if alphabet.len() != states.len() {
            return Err(Error::invalid(
                "encoding",
                format!("{} symbols but {} states", alphabet.len(), states.len()),
            ));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::invalid("encoding", format!("duplicate symbol {a:?}")));
            }
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
        Ok(Self { alphabet, states })
    }

    /// Encoding over [`default_alphabet`].
    pub fn with_default_alphabet(states: Vec<DensityMatrix>) -> Result<Self> {
        Self::new(default_alphabet(states.len()), states)
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn state(&self, symbol: &str) -> Option<&DensityMatrix> {
        self.alphabet.iter().position(|l| l.as_str() == symbol).map(|i| &self.states[i])
    }

    /// Checks that `dec` has exactly the alphabet as labels, plus `extra`.
    pub(crate) fn check_decoder(&self, dec: &Povm, extra: &[Label]) -> Result<()> {
        if dec.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dec.dim() });
        }
        let expected: Vec<&Label> = self.alphabet.iter().chain(extra).collect();
        let missing: Vec<String> = expected
            .iter()
            .filter(|l| dec.effect(l.as_str()).is_none())
            .map(|l| l.to_string())
            .collect();
        let extra: Vec<String> = dec.labels().filter(|l| !expected.contains(l)).map(|l| l.to_string()).collect();
        if missing.is_empty() && extra.is_empty() {
            Ok(())
        } else {
            Err(Error::LabelMismatch { missing, extra })
        }
    }
}

impl TryFrom<EncodingRecord> for Encoding {
    type Error = Error;
    fn try_from(r: EncodingRecord) -> Result<Self> {
        Encoding::new(r.alphabet, r.states)
    }
}

impl From<Encoding> for EncodingRecord {
    fn from(e: Encoding) -> Self {
        EncodingRecord { alphabet: e.alphabet, states: e.states }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    MinimumError,
    Unambiguous,
    PartialIgnorance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRecord", into = "GameRecord")]
pub struct GameSpec {
    pub kind: GameKind,
    n: usize,
    prior: ProbVector,
}

#[derive(Clone, Serialize, Deserialize)]
struct GameRecord {
    kind: GameKind,
    #[serde(rename = "N")]
    n: usize,
    prior: Option<Vec<f64>>,
}

impl GameSpec {
    pub fn uniform(kind: GameKind, n: usize) -> Result<Self> {
        Ok(Self { kind, n, prior: ProbVector::uniform(n)? })
    }

    pub fn with_prior(kind: GameKind, prior: ProbVector) -> Self {
        Self { kind, n: prior.len(), prior }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prior(&self) -> &ProbVector {
        &self.prior
    }
}

impl TryFrom<GameRecord> for GameSpec {
    type Error = Error;
    fn try_from(r: GameRecord) -> Result<Self> {
        match r.prior {
            None => GameSpec::uniform(r.kind, r.n),
            Some(p) if p.len() == r.n => Ok(GameSpec::with_prior(r.kind, ProbVector::new(p)?)),
            Some(p) => Err(Error::invalid("game", format!("prior has {} entries, N = {}", p.len(), r.n))),
        }
    }
}

impl From<GameSpec> for GameRecord {
    fn from(g: GameSpec) -> Self {
        GameRecord { kind: g.kind, n: g.n, prior: Some(g.prior.entries().to_vec()) }
    }
}

/// Joint law of (correct symbol, announced wrong symbol) used by the referee
/// in the partial-ignorance game. Entry `(c, w)` is the probability that `c`
/// is correct and `w` is announced to Alice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RefereePolicy {
    joint: Vec<Vec<f64>>,
}

impl RefereePolicy {
    pub fn new(joint: Vec<Vec<f64>>) -> Result<Self> {
        const WHAT: &str = "referee policy";
        let n = joint.len();
        if n < 2 {
            return Err(Error::invalid(WHAT, "needs at least two symbols"));
        }
        let mut total = 0.0;
        for (i, row) in joint.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(WHAT, format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::invalid(WHAT, format!("entry ({i}, {j}) = {p} is negative")));
                }
                if i == j && p > EPS_NORM {
                    return Err(Error::invalid(WHAT, format!("announced symbol equals the correct one at {i}")));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > EPS_NORM {
            return Err(Error::invalid(WHAT, format!("entries sum to {total}")));
        }
        Ok(Self { joint })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfDomain(format!("N = {n} < 2")));
        }
        let p = 1.0 / (n * (n - 1)) as f64;
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { p }).collect()).collect())
    }

    /// Always `correct` is right and `announced` is told to Alice.
    pub fn point_mass(n: usize, correct: usize, announced: usize) -> Result<Self> {
        if correct >= n || announced >= n {
            return Err(Error::invalid("referee policy", "symbol index out of range"));
        }
        let mut joint = vec![vec![0.0; n]; n];
        joint[correct][announced] = 1.0;
        Self::new(joint)
    }

    /// A seeded random off-diagonal law.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        use rand::Rng;
        let mut rng = crate::rng::stream(seed, 0);
        let mut joint: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { rng.random::<f64>() }).collect()).collect();
        let total: f64 = joint.iter().flatten().sum();
        joint.iter_mut().flatten().for_each(|p| *p /= total);
        Self::new(joint)
    }

    pub fn n(&self) -> usize {
        self.joint.len()
    }

    pub fn joint(&self) -> &[Vec<f64>] {
        &self.joint
    }

    /// Inverse-CDF draw of `(correct, announced)` from a uniform `u ∈ [0, 1)`.
    pub(crate) fn sample(&self, u: f64) -> (usize, usize) {
        let n = self.n();
        let mut acc = 0.0;
        let mut last = (0, 1);
        for (i, row) in self.joint.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                acc += p;
                last = (i, j);
                if u < acc {
                    return (i, j);
                }
            }
        }
        debug_assert!(last.0 < n);
        last
    }
}

impl TryFrom<Vec<Vec<f64>>> for RefereePolicy {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        RefereePolicy::new(v)
    }
}

impl From<RefereePolicy> for Vec<Vec<f64>> {
    fn from(p: RefereePolicy) -> Self {
        p.joint
    }
}

/// Outcome of evaluating or simulating a strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    #[serde(rename = "success")]
    pub success_probability: f64,
    pub bound: f64,
    pub saturated: bool,
    /// Binomial standard error of a Monte Carlo estimate; zero for exact evaluations.
    pub stderr: f64,
    pub rounds: Option<u64>,
    pub seed: Option<u64>,
    /// Success rate conditioned on each symbol (`None` if the symbol never occurred).
    pub per_symbol: Vec<Option<f64>>,
}

impl StrategyReport {
    /// Report for an exactly evaluated strategy; `saturated` means within `tol` of `bound`.
    pub fn exact(success: f64, bound: f64, per_symbol: Vec<f64>, tol: f64) -> Self {
        StrategyReport {
            success_probability: success,
            bound,
            saturated: (success - bound).abs() <= tol,
            stderr: 0.0,
            rounds: None,
            seed: None,
            per_symbol: per_symbol.into_iter().map(Some).collect(),
        }
    }
}
