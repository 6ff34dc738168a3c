use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::index::{quat_distance, quaternion, ProjectiveIndex};
use crate::encoding::{GateJson, GateMatrix};
use crate::error::{Error, Result};

/// Letters of the single-qubit word alphabet on the 1221 encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    Z,
    B,
    #[serde(rename = "B^-1")]
    BInv,
    K,
    #[serde(rename = "K^-1")]
    KInv,
    X,
}

impl Letter {
    pub fn name(self) -> &'static str {
        match self {
            Letter::Z => "Z",
            Letter::B => "B",
            Letter::BInv => "B^-1",
            Letter::K => "K",
            Letter::KInv => "K^-1",
            Letter::X => "X",
        }
    }

    pub fn is_k(self) -> bool {
        matches!(self, Letter::K | Letter::KInv)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Z" => Letter::Z,
            "B" => Letter::B,
            "B^-1" | "Bi" | "b" => Letter::BInv,
            "K" => Letter::K,
            "K^-1" | "Ki" | "k" => Letter::KInv,
            "X" => Letter::X,
            _ => return Err(Error::Invalid(format!("unknown letter '{s}'"))),
        })
    }
}

/// Generator matrices for a set of letters.
#[derive(Clone, Debug)]
pub struct Alphabet {
    letters: Vec<(Letter, GateMatrix)>,
}

impl Alphabet {
    /// Builds an alphabet from the base gates `z`, `b`, `k` (and `x` if needed).
    pub fn new(letters: &[Letter], z: &GateMatrix, b: &GateMatrix, k: &GateMatrix, x: &GateMatrix) -> Result<Self> {
        let mut out: Vec<(Letter, GateMatrix)> = Vec::new();
        for &l in letters {
            if out.iter().any(|(m, _)| *m == l) {
                continue;
            }
            let g = match l {
                Letter::Z => z.clone(),
                Letter::B => b.clone(),
                Letter::BInv => b.inverse()?,
                Letter::K => k.clone(),
                Letter::KInv => k.inverse()?,
                Letter::X => x.clone(),
            };
            out.push((l, g));
        }
        if out.is_empty() {
            return Err(Error::Invalid("alphabet is empty".into()));
        }
        Ok(Alphabet { letters: out })
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters.iter().map(|(l, _)| *l)
    }

    pub fn matrix(&self, l: Letter) -> Option<&GateMatrix> {
        self.letters.iter().find(|(m, _)| *m == l).map(|(_, g)| g)
    }

    /// Ordered product `w[0] w[1] ... w[n-1]`; the last letter acts first.
    pub fn evaluate(&self, word: &[Letter]) -> Result<GateMatrix> {
        word.iter().try_fold(GateMatrix::identity(2), |acc, &l| {
            let g = self
                .matrix(l)
                .ok_or_else(|| Error::Invalid(format!("letter {l} is not in the alphabet")))?;
            Ok(&acc * g)
        })
    }
}

/// A word over an [`Alphabet`] with its value.
#[derive(Clone, Debug)]
pub struct GateWord {
    pub letters: Vec<Letter>,
    pub value: GateMatrix,
    pub canonical: GateMatrix,
}

impl GateWord {
    pub fn new(alphabet: &Alphabet, letters: Vec<Letter>) -> Result<Self> {
        let value = alphabet.evaluate(&letters)?;
        let canonical = value.phase_canonical();
        Ok(GateWord {
            letters,
            value,
            canonical,
        })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn k_count(&self) -> usize {
        self.letters.iter().filter(|l| l.is_k()).count()
    }

    pub fn text(&self) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        self.letters.iter().map(|l| l.name()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthJson {
    pub found: bool,
    pub word: Option<Vec<Letter>>,
    pub text: Option<String>,
    pub length: Option<usize>,
    pub k_count: Option<usize>,
    pub distance: Option<f64>,
    pub eps: f64,
    pub max_length: usize,
    pub explored: usize,
    pub value: Option<GateJson>,
}

/// Outcome of [`synthesize_word`].
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub word: Option<GateWord>,
    /// Projective distance of the returned word from the target.
    pub distance: Option<f64>,
    pub eps: f64,
    pub max_length: usize,
    /// Distinct half-words enumerated.
    pub explored: usize,
}

impl Synthesis {
    pub fn to_json(&self) -> SynthJson {
        SynthJson {
            found: self.word.is_some(),
            word: self.word.as_ref().map(|w| w.letters.clone()),
            text: self.word.as_ref().map(GateWord::text),
            length: self.word.as_ref().map(GateWord::len),
            k_count: self.word.as_ref().map(GateWord::k_count),
            distance: self.distance,
            eps: self.eps,
            max_length: self.max_length,
            explored: self.explored,
            value: self.word.as_ref().map(|w| w.value.to_json()),
        }
    }
}

/// Longest accepted word.
pub const MAX_SYNTH_LENGTH: usize = 24;
/// Bound on distinct half-words kept in memory.
pub const HALF_WORD_CAP: usize = 400_000;

struct HalfWords {
    words: Vec<Vec<Letter>>,
    values: Vec<GateMatrix>,
    quats: Vec<[f64; 4]>,
    index: ProjectiveIndex,
}

/// Distinct elements reachable by words of length at most `depth`, each with its
/// shortest (then lexicographically smallest) word.
fn half_words(alphabet: &Alphabet, depth: usize, cell: f64) -> HalfWords {
    const SAME: f64 = 1e-9;
    let mut dedup = ProjectiveIndex::new(1e-6);
    let mut hw = HalfWords {
        words: vec![Vec::new()],
        values: vec![GateMatrix::identity(2)],
        quats: vec![quaternion(&GateMatrix::identity(2))],
        index: ProjectiveIndex::new(cell),
    };
    dedup.insert(hw.quats[0]);
    hw.index.insert(hw.quats[0]);
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &i in &frontier {
            for l in alphabet.letters() {
                if hw.words.len() >= HALF_WORD_CAP {
                    return hw;
                }
                let value = &hw.values[i] * alphabet.matrix(l).unwrap();
                let q = quaternion(&value);
                if !dedup.within(&q, SAME).is_empty() {
                    continue;
                }
                let mut w = hw.words[i].clone();
                w.push(l);
                dedup.insert(q);
                hw.index.insert(q);
                hw.words.push(w);
                hw.values.push(value);
                hw.quats.push(q);
                next.push(hw.words.len() - 1);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    hw
}

/// Meet-in-the-middle search for the shortest word within projective distance
/// `eps` of `target`. Distance is `min_phi |W - e^{i phi} target|_F`. Ties are
/// broken by fewer K letters, then smaller distance.
pub fn synthesize_word(target: &GateMatrix, alphabet: &Alphabet, max_length: usize, eps: f64) -> Result<Synthesis> {
    if target.dim() != 2 || !target.is_unitary(1e-9) {
        return Err(Error::Invalid("target must be a 2x2 unitary".into()));
    }
    if max_length > MAX_SYNTH_LENGTH {
        return Err(Error::Invalid(format!("max length {max_length} exceeds {MAX_SYNTH_LENGTH}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("eps must be in (0, 1), got {eps}")));
    }
    let radius = eps / std::f64::consts::SQRT_2;
    let hw = half_words(alphabet, max_length.div_ceil(2), radius);
    let mut best: Option<(usize, usize, f64, Vec<Letter>)> = None;
    for (i, left) in hw.values.iter().enumerate() {
        let la = hw.words[i].len();
        if best.as_ref().is_some_and(|b| la > b.0) {
            continue;
        }
        let need = quaternion(&(&left.inverse()? * target));
        for j in hw.index.within(&need, radius) {
            let total = la + hw.words[j].len();
            if total > max_length {
                continue;
            }
            let d = quat_distance(&hw.quats[j], &need) * std::f64::consts::SQRT_2;
            let mut word = hw.words[i].clone();
            word.extend_from_slice(&hw.words[j]);
            let kc = word.iter().filter(|l| l.is_k()).count();
            let cand = (total, kc, d, word);
            let better = match &best {
                None => true,
                Some(b) => (cand.0, cand.1).cmp(&(b.0, b.1)).then(cand.2.total_cmp(&b.2)).then(cand.3.cmp(&b.3)).is_lt(),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    let explored = hw.words.len();
    match best {
        None => Ok(Synthesis {
            word: None,
            distance: None,
            eps,
            max_length,
            explored,
        }),
        Some((_, _, _, letters)) => {
            let word = GateWord::new(alphabet, letters)?;
            let distance = word.value.projective_distance(target);
            Ok(Synthesis {
                word: Some(word),
                distance: Some(distance),
                eps,
                max_length,
                explored,
            })
        }
    }
}
