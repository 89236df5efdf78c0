//! The XOR-linearised message expansion as a binary linear code.
//!
//! An `N`-step expansion is a `32N`-bit word; bit `32 * i + b` is bit `b` of
//! expanded word `i`. The code is spanned by the expansions of the 512 unit
//! messages.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::primitives::{expand_words, hamming_weight, ExpansionKind, MessageBlock};

pub const MESSAGE_BITS: usize = 512;

pub fn words_to_bits(words: &[u32]) -> BitVec {
    let mut v = BitVec::zeros(32 * words.len());
    for (i, &w) in words.iter().enumerate() {
        for b in 0..32 {
            if w >> b & 1 == 1 {
                v.set(32 * i + b, true);
            }
        }
    }
    v
}

pub fn bits_to_words(bits: &BitVec) -> Vec<u32> {
    assert_eq!(bits.len() % 32, 0);
    // Bits are packed little-endian into u64s, so each u64 holds two words.
    let mut out = Vec::with_capacity(bits.len() / 32);
    for &w in bits.words() {
        out.push(w as u32);
        out.push((w >> 32) as u32);
    }
    out.truncate(bits.len() / 32);
    out
}

/// `512 x 32N` generator matrix of an XOR-linear expansion.
#[derive(Clone)]
pub struct GeneratorMatrix {
    pub kind: ExpansionKind,
    pub steps: usize,
    pub matrix: BitMatrix,
}

impl fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GeneratorMatrix({}, {} steps, {}x{})",
            self.kind,
            self.steps,
            self.matrix.rows(),
            self.matrix.cols()
        )
    }
}

pub fn build_generator(kind: ExpansionKind, steps: usize) -> Result<GeneratorMatrix> {
    if steps < 16 {
        return Err(Error::TooFewSteps(steps));
    }
    if !kind.is_xor_linear() {
        return Err(Error::InvalidParams(format!(
            "{kind} is not linear over GF(2)"
        )));
    }
    let rows: Vec<BitVec> = (0..MESSAGE_BITS)
        .map(|j| words_to_bits(&expand_words(&MessageBlock::unit(j).0, kind, steps)))
        .collect();
    Ok(GeneratorMatrix {
        kind,
        steps,
        matrix: BitMatrix::from_rows(32 * steps, &rows),
    })
}

impl GeneratorMatrix {
    pub fn length(&self) -> usize {
        self.matrix.cols()
    }

    pub fn encode(&self, m: &MessageBlock) -> BitVec {
        self.matrix.left_mul(&words_to_bits(&m.0))
    }
}

/// A word of the expansion code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Codeword {
    pub words: Vec<u32>,
    pub weight: u32,
}

impl Codeword {
    pub fn from_words(words: Vec<u32>) -> Self {
        let weight = hamming_weight(&words);
        Codeword { words, weight }
    }

    pub fn from_bits(bits: &BitVec) -> Self {
        Self::from_words(bits_to_words(bits))
    }

    pub fn steps(&self) -> usize {
        self.words.len()
    }

    pub fn is_zero(&self) -> bool {
        self.weight == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub min: u32,
    pub max: u32,
}

/// Minimum and maximum weight of the expansion of the 512 single-bit
/// messages. The expansion of the zero message is zero for every kind, so
/// this is also the weight of the output difference from the zero message.
pub fn single_bit_census(kind: ExpansionKind, steps: usize) -> Result<Census> {
    if steps < 16 {
        return Err(Error::TooFewSteps(steps));
    }
    let weights = (0..MESSAGE_BITS)
        .map(|j| hamming_weight(&expand_words(&MessageBlock::unit(j).0, kind, steps)));
    let (min, max) = weights.fold((u32::MAX, 0), |(lo, hi), w| (lo.min(w), hi.max(w)));
    Ok(Census { min, max })
}

/// Checks the recurrence at every position from 16 on and returns the weight.
pub fn verify_codeword(words: &[u32], kind: ExpansionKind, steps: usize) -> Result<(bool, u32)> {
    if words.len() != steps {
        return Err(Error::LengthMismatch {
            expected: steps,
            actual: words.len(),
        });
    }
    let valid = steps < 16 || (16..steps).all(|i| kind.next_word(words, i) == words[i]);
    Ok((valid, hamming_weight(words)))
}

/// Expands a valid word forward to `steps` words.
pub fn extend_codeword(words: &[u32], kind: ExpansionKind, steps: usize) -> Result<Vec<u32>> {
    let (valid, _) = verify_codeword(words, kind, words.len())?;
    if !valid {
        return Err(Error::InvalidCodeword(words.len()));
    }
    if steps < words.len() {
        return Err(Error::InvalidParams(format!(
            "cannot extend {} words to {steps}",
            words.len()
        )));
    }
    Ok(expand_words(words, kind, steps))
}

/// Rotates every word left by `r`.
pub fn rotate_words(words: &[u32], r: u32) -> Vec<u32> {
    words.iter().map(|w| w.rotate_left(r)).collect()
}

/// Longest run of consecutive zero words.
pub fn longest_zero_run(words: &[u32]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for &w in words {
        run = if w == 0 { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

/// Parsed word file: the words in file order and an optional grid width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordFile {
    pub words: Vec<u32>,
    pub grid_cols: Option<usize>,
}

/// Reads hex words, whitespace separated, with `#` comments. A comment of
/// the form `# grid-cols: C` declares that the words are a printed grid
/// with `C` columns listed row by row.
pub fn parse_word_file(text: &str) -> Result<WordFile> {
    let mut words = Vec::new();
    let mut grid_cols = None;
    for (n, line) in text.lines().enumerate() {
        let (body, comment) = match line.find('#') {
            Some(p) => (&line[..p], Some(&line[p + 1..])),
            None => (line, None),
        };
        if let Some(c) = comment {
            if let Some(v) = c.trim().strip_prefix("grid-cols:") {
                let cols = v.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: n + 1,
                    msg: e.to_string(),
                })?;
                grid_cols = Some(cols);
            }
        }
        for tok in body.split_whitespace() {
            let tok = tok.trim_start_matches("0x");
            let w = u32::from_str_radix(tok, 16).map_err(|e| Error::Parse {
                line: n + 1,
                msg: format!("`{tok}`: {e}"),
            })?;
            words.push(w);
        }
    }
    Ok(WordFile { words, grid_cols })
}

/// One word per line, 8 lowercase hex digits.
pub fn format_word_file(words: &[u32]) -> String {
    words.iter().map(|w| format!("{w:08x}\n")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadOrder {
    RowMajor,
    ColumnMajor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitOrder {
    /// Printed hex digits are read as usual.
    MsbFirst,
    /// Printed words have bit 0 on the left, so each word is bit-reversed.
    LsbFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Layout {
    pub order: ReadOrder,
    pub bits: BitOrder,
}

impl Layout {
    pub const ALL: [Layout; 4] = [
        Layout {
            order: ReadOrder::RowMajor,
            bits: BitOrder::MsbFirst,
        },
        Layout {
            order: ReadOrder::ColumnMajor,
            bits: BitOrder::MsbFirst,
        },
        Layout {
            order: ReadOrder::RowMajor,
            bits: BitOrder::LsbFirst,
        },
        Layout {
            order: ReadOrder::ColumnMajor,
            bits: BitOrder::LsbFirst,
        },
    ];

    /// Reorders a grid listed row by row with `cols` columns.
    pub fn apply(&self, listing: &[u32], cols: usize) -> Vec<u32> {
        let rows = listing.len() / cols.max(1);
        let ordered: Vec<u32> = match self.order {
            ReadOrder::RowMajor => listing.to_vec(),
            ReadOrder::ColumnMajor => (0..cols)
                .flat_map(|c| (0..rows).map(move |r| listing[r * cols + c]))
                .collect(),
        };
        match self.bits {
            BitOrder::MsbFirst => ordered,
            BitOrder::LsbFirst => ordered.iter().map(|w| w.reverse_bits()).collect(),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.order {
            ReadOrder::RowMajor => "row-major",
            ReadOrder::ColumnMajor => "column-major",
        };
        let b = match self.bits {
            BitOrder::MsbFirst => "msb-first",
            BitOrder::LsbFirst => "lsb-first",
        };
        write!(f, "{o}/{b}")
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Layout::ALL
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown layout `{s}`")))
    }
}

/// Tries every reading of a printed grid and returns the first that is a
/// valid word of the code. Validity is what authenticates the reading.
pub fn resolve_layout(
    listing: &[u32],
    cols: usize,
    kind: ExpansionKind,
) -> Option<(Layout, Vec<u32>)> {
    if cols == 0 || !listing.len().is_multiple_of(cols) {
        return None;
    }
    Layout::ALL.into_iter().find_map(|layout| {
        let words = layout.apply(listing, cols);
        match verify_codeword(&words, kind, words.len()) {
            Ok((true, _)) => Some((layout, words)),
            _ => None,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_conversion_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 16, 40, 41] {
            let w: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
            assert_eq!(bits_to_words(&words_to_bits(&w)), w);
        }
    }

    #[test]
    fn generator_encodes_expansion() {
        let g = build_generator(ExpansionKind::Sha256Xor, 64).unwrap();
        assert_eq!(g.matrix.rows(), 512);
        assert_eq!(g.length(), 2048);
        assert_eq!(g.matrix.rank(), 512);
        assert!(g.encode(&MessageBlock::ZERO).is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let m = MessageBlock(std::array::from_fn(|_| rng.gen()));
            let w = expand_words(&m.0, ExpansionKind::Sha256Xor, 64);
            assert_eq!(bits_to_words(&g.encode(&m)), w);
        }
        assert!(build_generator(ExpansionKind::Sha256Add, 40).is_err());
        assert!(build_generator(ExpansionKind::Sha256Xor, 15).is_err());
    }

    #[test]
    fn sixteen_step_code_is_everything() {
        let g = build_generator(ExpansionKind::Sha256Xor, 16).unwrap();
        assert_eq!(g.matrix, BitMatrix::identity(512));
    }

    #[test]
    fn verify_and_extend() {
        assert_eq!(
            verify_codeword(&[0; 40], ExpansionKind::Sha256Xor, 40).unwrap(),
            (true, 0)
        );
        assert!(verify_codeword(&[0; 39], ExpansionKind::Sha256Xor, 40).is_err());
        assert_eq!(
            extend_codeword(&[0; 20], ExpansionKind::Sha256Xor, 64).unwrap(),
            vec![0; 64]
        );
        let w = expand_words(&MessageBlock::unit(100).0, ExpansionKind::Sha256Xor, 30);
        assert_eq!(
            extend_codeword(&w, ExpansionKind::Sha256Xor, 30).unwrap(),
            w
        );
        let long = extend_codeword(&w, ExpansionKind::Sha256Xor, 50).unwrap();
        assert_eq!(
            verify_codeword(&long, ExpansionKind::Sha256Xor, 50)
                .unwrap()
                .0,
            true
        );
        let mut bad = w.clone();
        bad[20] ^= 1;
        assert!(matches!(
            extend_codeword(&bad, ExpansionKind::Sha256Xor, 64),
            Err(Error::InvalidCodeword(30))
        ));
    }

    #[test]
    fn word_file_round_trip() {
        let words = vec![0x8000_0000, 0, 0x1234_abcd];
        let text = format_word_file(&words);
        assert_eq!(text, "80000000\n00000000\n1234abcd\n");
        let parsed = parse_word_file(&format!("# header\n{text}# grid-cols: 3\n")).unwrap();
        assert_eq!(
            parsed,
            WordFile {
                words,
                grid_cols: Some(3)
            }
        );
        assert!(parse_word_file("zz\n").is_err());
    }

    #[test]
    fn layouts_reorder_grids() {
        let listing: Vec<u32> = (0..6).collect();
        let cm = Layout {
            order: ReadOrder::ColumnMajor,
            bits: BitOrder::MsbFirst,
        };
        assert_eq!(cm.apply(&listing, 2), vec![0, 2, 4, 1, 3, 5]);
        let rev = Layout {
            order: ReadOrder::RowMajor,
            bits: BitOrder::LsbFirst,
        };
        assert_eq!(rev.apply(&[1], 1), vec![0x8000_0000]);
        for l in Layout::ALL {
            assert_eq!(l.to_string().parse::<Layout>().unwrap(), l);
        }
    }

    #[test]
    fn census_is_deterministic() {
        let a = single_bit_census(ExpansionKind::Sha256Xor, 40).unwrap();
        assert_eq!(a, single_bit_census(ExpansionKind::Sha256Xor, 40).unwrap());
        assert_eq!(a, Census { min: 110, max: 297 });
    }
}
