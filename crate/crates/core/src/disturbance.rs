//! Disturbance vectors, corrective patterns and collisions for the
//! ADD-linear variant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primitives::{compress, expand_words, ExpansionKind, MessageBlock, RegisterState};
use crate::ring::{build_e, hex_words, solve_disturbance_kernel};
use crate::variant::{VariantConfig, VariantName};
use crate::word::RingWord;

/// Length of a full expanded difference.
pub const EXPANDED_WORDS: usize = 64;

/// Corrections added at offsets 1..=8 after a disturbance in the ADD-linear variant.
pub const ADD_LINEAR_CORRECTIONS: [i64; 8] = [-4, 2, 2, 4, 2, 1, 0, -1];

/// Prepends `a` zeros to `s` and truncates the result to `n` entries.
pub fn delay<T: Copy + Default>(s: &[T], a: usize, n: usize) -> Vec<T> {
    let mut out = vec![T::default(); a.min(n)];
    out.extend(s.iter().copied().take(n.saturating_sub(a)));
    out.resize(n, T::default());
    out
}

/// `out[j] = s[j] + sum_k coeffs[k-1] * s[j-k]`, for `k = 1..=coeffs.len()`.
pub fn apply_corrections<W: RingWord>(s: &[W], coeffs: &[i64]) -> Vec<W> {
    let mut out = s.to_vec();
    for (k, &c) in coeffs.iter().enumerate() {
        let c = W::from_i64_wrapping(c);
        if c.is_zero() {
            continue;
        }
        for (o, &d) in out.iter_mut().skip(k + 1).zip(s) {
            *o = o.wrapping_add(&c.wrapping_mul(&d));
        }
    }
    out
}

/// Register differences of one step of the ADD-linear step function, as
/// integer multiples of a single symbolic word difference.
fn symbolic_step(s: [i64; 8], w: i64) -> [i64; 8] {
    let [a, b, c, d, e, f, g, h] = s;
    let t1 = h + e + (e + f + g) + w;
    let t2 = a + (a + b + c);
    [t1 + t2, a, b, c, d + t1, e, f, g]
}

/// Derives the corrective pattern of the ADD-linear variant.
///
/// Each correction is the message difference that cancels the incoming
/// difference of register A, which in the linear step is the only free term.
/// Returns the corrections for offsets 1..=8 and the symbolic register
/// differences at offsets 0..=9.
pub fn derive_corrections() -> ([i64; 8], Vec<[i64; 8]>) {
    let mut corr = [0i64; 8];
    let mut rows = vec![[0i64; 8]];
    let mut s = symbolic_step([0; 8], 1);
    rows.push(s);
    for c in corr.iter_mut() {
        let [a, b, cc, _, e, f, g, h] = s;
        *c = -(h + 2 * e + f + g + 2 * a + b + cc);
        s = symbolic_step(s, *c);
        rows.push(s);
    }
    (corr, rows)
}

/// A 64-word expanded difference `E * dm` for some message difference `dm`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisturbanceVector {
    words: Vec<u32>,
}

impl DisturbanceVector {
    /// Accepts `words` only if it is the identity-σ expansion of its first
    /// sixteen words.
    pub fn new(words: Vec<u32>) -> Result<Self> {
        if words.len() != EXPANDED_WORDS {
            return Err(Error::LengthMismatch {
                expected: EXPANDED_WORDS,
                actual: words.len(),
            });
        }
        if expand_words(
            &words[..16],
            ExpansionKind::Sha256AddIdentitySigma,
            EXPANDED_WORDS,
        ) != words
        {
            return Err(Error::NotDisturbance(
                "words do not follow the message expansion".into(),
            ));
        }
        Ok(DisturbanceVector { words })
    }

    pub fn from_message_diff(dm: &[u32]) -> Result<Self> {
        if dm.len() != 16 {
            return Err(Error::LengthMismatch {
                expected: 16,
                actual: dm.len(),
            });
        }
        let words = build_e::<u32>().mul_vec(dm)?;
        Ok(DisturbanceVector { words })
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn message_diff(&self) -> &[u32] {
        &self.words[..16]
    }

    /// True when no disturbance sits in the last eight words, so every
    /// disturbance has room for its eight corrections.
    pub fn is_correctable(&self) -> bool {
        self.words[EXPANDED_WORDS - 8..].iter().all(|&w| w == 0)
    }
}

/// A disturbance vector combined with its delayed corrections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characteristic {
    pub expanded_diff: Vec<u32>,
    /// `register_diffs[s]` is the state difference entering step `s`;
    /// the last entry is the difference after the final step.
    pub register_diffs: Vec<RegisterState>,
}

impl Characteristic {
    pub fn message_diff(&self) -> [u32; 16] {
        self.expanded_diff[..16]
            .try_into()
            .expect("at least 16 words")
    }

    /// The expanded difference is produced by the message expansion itself.
    pub fn is_valid_expansion(&self) -> bool {
        expand_words(
            &self.expanded_diff[..16],
            ExpansionKind::Sha256AddIdentitySigma,
            self.expanded_diff.len(),
        ) == self.expanded_diff
    }

    /// Zero difference after the last step.
    pub fn is_collision(&self) -> bool {
        self.register_diffs
            .last()
            .is_some_and(RegisterState::is_zero)
    }
}

/// Combines `delta` with its delayed copies weighted by `coeffs` (offsets 1..=8).
pub fn build_characteristic(delta: &DisturbanceVector, coeffs: &[i64]) -> Result<Characteristic> {
    if coeffs.len() != 8 {
        return Err(Error::LengthMismatch {
            expected: 8,
            actual: coeffs.len(),
        });
    }
    let expanded_diff = apply_corrections(delta.words(), coeffs);
    let register_diffs = propagate(&VariantName::AddLinear.config(), &expanded_diff)?;
    Ok(Characteristic {
        expanded_diff,
        register_diffs,
    })
}

/// Exact register-difference propagation through the ADD-linear variant.
///
/// Returns `dw.len() + 1` rows; row `s` is the difference entering step `s`.
pub fn propagate(config: &VariantConfig, dw: &[u32]) -> Result<Vec<RegisterState>> {
    if !config.is_add_linear() {
        return Err(Error::InvalidConfig(
            "exact difference propagation needs the add_linear variant".into(),
        ));
    }
    let mut rows = Vec::with_capacity(dw.len() + 1);
    let mut s = RegisterState::ZERO;
    rows.push(s);
    for &w in dw {
        // The step is affine; constants cancel in a difference.
        s = crate::primitives::step(s, w, 0, config);
        rows.push(s);
    }
    Ok(rows)
}

/// Table of a single corrected disturbance `d` injected at step `i`:
/// message differences and register differences for steps `i..=i+9`.
pub fn single_disturbance_table(d: u32, i: usize) -> Result<Vec<(RegisterState, u32)>> {
    if i + 9 > EXPANDED_WORDS {
        return Err(Error::StepOutOfRange(i));
    }
    let mut dw = vec![0u32; EXPANDED_WORDS];
    dw[i] = d;
    let dw = apply_corrections(&dw, &ADD_LINEAR_CORRECTIONS);
    let rows = propagate(&VariantName::AddLinear.config(), &dw)?;
    Ok((i..=i + 9)
        .map(|s| (rows[s], dw.get(s).copied().unwrap_or(0)))
        .collect())
}

/// A message pair together with both compression outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionPair {
    pub message: MessageBlock,
    pub message_prime: MessageBlock,
    pub digest: RegisterState,
    pub digest_prime: RegisterState,
    pub variant: VariantName,
}

impl CollisionPair {
    pub fn is_collision(&self) -> bool {
        self.digest == self.digest_prime
    }

    /// A collision between two different messages.
    pub fn is_distinct(&self) -> bool {
        self.message != self.message_prime
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "message": hex_words(&self.message.0),
            "message_prime": hex_words(&self.message_prime.0),
            "digest": hex_words(&self.digest.to_array()),
            "variant": self.variant.as_str(),
        })
    }
}

/// Applies the characteristic of `multiple * generator` to `m` and checks
/// that the ADD-linear compression outputs agree.
pub fn collide_with_generator(
    m: &MessageBlock,
    generator: &[u32],
    multiple: u32,
) -> Result<CollisionPair> {
    let dm: Vec<u32> = generator.iter().map(|g| g.wrapping_mul(multiple)).collect();
    let delta = DisturbanceVector::from_message_diff(&dm)?;
    let c = build_characteristic(&delta, &ADD_LINEAR_CORRECTIONS)?;
    let config = VariantName::AddLinear.config();
    let message_prime = m.wrapping_add(&c.message_diff());
    let iv = RegisterState::iv();
    let pair = CollisionPair {
        message: *m,
        message_prime,
        digest: compress(iv, m, &config),
        digest_prime: compress(iv, &message_prime, &config),
        variant: VariantName::AddLinear,
    };
    if !pair.is_collision() {
        return Err(Error::CollisionFailed { multiple });
    }
    Ok(pair)
}

/// Collision for the ADD-linear variant from the solved disturbance kernel.
pub fn find_collision_add_linear(m: &MessageBlock, multiple: u32) -> Result<CollisionPair> {
    let gens = solve_disturbance_kernel();
    collide_with_generator(m, &gens[0], multiple)
}
