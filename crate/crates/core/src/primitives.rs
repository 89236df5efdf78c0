//! SHA-256 building blocks: Boolean functions, the four S-boxes, the step
//! transformation, message expansions (including the SHA-1 recurrences used
//! for comparison) and the compression function.
//!
//! Every function here is pure. Weakenings are selected through
//! [`VariantConfig`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variant::{BoolMode, SboxMode, VariantConfig};

/// Initial chaining value from FIPS 180-2.
pub const IV: [u32; 8] = [
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
];

/// Round constants from FIPS 180-2.
pub const K: [u32; 64] = [
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
];

/// Round constant for step `i`. Extended variants reuse the table cyclically.
pub fn round_constant(i: usize) -> u32 {
    K[i % 64]
}

#[inline]
pub fn maj(x: u32, y: u32, z: u32) -> u32 {
    (x & y) | (x & z) | (y & z)
}

#[inline]
pub fn ch(x: u32, y: u32, z: u32) -> u32 {
    (x & y) | (!x & z)
}

#[inline]
pub fn big_sigma0(x: u32) -> u32 {
    x.rotate_right(2) ^ x.rotate_right(13) ^ x.rotate_right(22)
}

#[inline]
pub fn big_sigma1(x: u32) -> u32 {
    x.rotate_right(6) ^ x.rotate_right(11) ^ x.rotate_right(25)
}

#[inline]
pub fn small_sigma0(x: u32) -> u32 {
    x.rotate_right(7) ^ x.rotate_right(18) ^ (x >> 3)
}

#[inline]
pub fn small_sigma1(x: u32) -> u32 {
    x.rotate_right(17) ^ x.rotate_right(19) ^ (x >> 10)
}

/// The eight chaining variables A..H.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterState {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub f: u32,
    pub g: u32,
    pub h: u32,
}

impl RegisterState {
    pub const ZERO: RegisterState = RegisterState::from_array([0; 8]);

    pub const fn from_array(r: [u32; 8]) -> Self {
        RegisterState {
            a: r[0],
            b: r[1],
            c: r[2],
            d: r[3],
            e: r[4],
            f: r[5],
            g: r[6],
            h: r[7],
        }
    }

    pub const fn to_array(self) -> [u32; 8] {
        [
            self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h,
        ]
    }

    pub fn iv() -> Self {
        Self::from_array(IV)
    }

    pub fn wrapping_add(self, rhs: Self) -> Self {
        let (x, y) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| x[i].wrapping_add(y[i])))
    }

    pub fn wrapping_sub(self, rhs: Self) -> Self {
        let (x, y) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| x[i].wrapping_sub(y[i])))
    }

    pub fn xor(self, rhs: Self) -> Self {
        let (x, y) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| x[i] ^ y[i]))
    }

    pub fn is_zero(&self) -> bool {
        self.to_array().iter().all(|&w| w == 0)
    }
}

/// A raw 512-bit message block of sixteen words.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MessageBlock(pub [u32; 16]);

impl MessageBlock {
    pub const ZERO: MessageBlock = MessageBlock([0; 16]);

    pub fn words(&self) -> &[u32; 16] {
        &self.0
    }

    pub fn wrapping_add(&self, rhs: &[u32]) -> Self {
        MessageBlock(std::array::from_fn(|i| self.0[i].wrapping_add(rhs[i])))
    }

    pub fn xor(&self, rhs: &[u32]) -> Self {
        MessageBlock(std::array::from_fn(|i| self.0[i] ^ rhs[i]))
    }

    /// Unit message with only bit `bit` (0..512) set; bit `32*i + j` is bit `j` of word `i`.
    pub fn unit(bit: usize) -> Self {
        let mut m = Self::ZERO;
        m.0[bit / 32] = 1 << (bit % 32);
        m
    }
}

/// FIPS 180-2 padding for messages short enough to fit one block.
pub fn pad_single_block(msg: &[u8]) -> Result<MessageBlock> {
    if msg.len() > 55 {
        return Err(Error::MessageTooLong(msg.len()));
    }
    let mut bytes = [0u8; 64];
    bytes[..msg.len()].copy_from_slice(msg);
    bytes[msg.len()] = 0x80;
    bytes[56..].copy_from_slice(&((msg.len() as u64) * 8).to_be_bytes());
    Ok(MessageBlock(std::array::from_fn(|i| {
        u32::from_be_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap())
    })))
}

/// Big-endian serialisation of a chaining state, i.e. the digest bytes.
pub fn digest_bytes(state: &RegisterState) -> [u8; 32] {
    let mut out = [0u8; 32];
    for (chunk, w) in out.chunks_exact_mut(4).zip(state.to_array()) {
        chunk.copy_from_slice(&w.to_be_bytes());
    }
    out
}

/// Message expansion recurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// Standard SHA-256: `σ1(W[i-2]) + W[i-7] + σ0(W[i-15]) + W[i-16]`.
    Sha256Add,
    /// SHA-256 with every addition replaced by XOR.
    Sha256Xor,
    /// SHA-256 additions with σ0 = σ1 = identity.
    Sha256AddIdentitySigma,
    /// Standard SHA-1: `ROTL1(W[i-3] ^ W[i-8] ^ W[i-14] ^ W[i-16])`.
    Sha1Xor,
    /// SHA-1 with every XOR replaced by an addition.
    Sha1Add,
}

impl ExpansionKind {
    pub const ALL: [ExpansionKind; 5] = [
        ExpansionKind::Sha1Xor,
        ExpansionKind::Sha1Add,
        ExpansionKind::Sha256Xor,
        ExpansionKind::Sha256Add,
        ExpansionKind::Sha256AddIdentitySigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExpansionKind::Sha256Add => "sha256-add",
            ExpansionKind::Sha256Xor => "sha256-xor",
            ExpansionKind::Sha256AddIdentitySigma => "sha256-add-identity-sigma",
            ExpansionKind::Sha1Xor => "sha1-xor",
            ExpansionKind::Sha1Add => "sha1-add",
        }
    }

    /// Full-length step count of the underlying hash.
    pub fn full_steps(self) -> usize {
        match self {
            ExpansionKind::Sha1Xor | ExpansionKind::Sha1Add => 80,
            _ => 64,
        }
    }

    pub fn is_sha1(self) -> bool {
        matches!(self, ExpansionKind::Sha1Xor | ExpansionKind::Sha1Add)
    }

    /// True when the recurrence is GF(2)-linear.
    pub fn is_xor_linear(self) -> bool {
        matches!(self, ExpansionKind::Sha256Xor | ExpansionKind::Sha1Xor)
    }

    /// Evaluates the recurrence for word `i >= 16` given the prefix `w[..i]`.
    #[inline]
    pub fn next_word(self, w: &[u32], i: usize) -> u32 {
        match self {
            ExpansionKind::Sha256Add => small_sigma1(w[i - 2])
                .wrapping_add(w[i - 7])
                .wrapping_add(small_sigma0(w[i - 15]))
                .wrapping_add(w[i - 16]),
            ExpansionKind::Sha256Xor => {
                small_sigma1(w[i - 2]) ^ w[i - 7] ^ small_sigma0(w[i - 15]) ^ w[i - 16]
            }
            ExpansionKind::Sha256AddIdentitySigma => w[i - 2]
                .wrapping_add(w[i - 7])
                .wrapping_add(w[i - 15])
                .wrapping_add(w[i - 16]),
            ExpansionKind::Sha1Xor => (w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16]).rotate_left(1),
            ExpansionKind::Sha1Add => w[i - 3]
                .wrapping_add(w[i - 8])
                .wrapping_add(w[i - 14])
                .wrapping_add(w[i - 16])
                .rotate_left(1),
        }
    }
}

impl fmt::Display for ExpansionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExpansionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        ExpansionKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// An expanded message `W[0..N]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedMessage {
    words: Vec<u32>,
}

impl ExpandedMessage {
    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn steps(&self) -> usize {
        self.words.len()
    }

    pub fn into_words(self) -> Vec<u32> {
        self.words
    }

    pub fn hamming_weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

/// Expands a block to `n >= 16` words under the given recurrence.
pub fn expand(m: &MessageBlock, kind: ExpansionKind, n: usize) -> Result<ExpandedMessage> {
    if n < 16 {
        return Err(Error::TooFewSteps(n));
    }
    Ok(ExpandedMessage {
        words: expand_words(&m.0, kind, n),
    })
}

/// Extends `prefix` (at least 16 words) forward to `n` words.
pub fn expand_words(prefix: &[u32], kind: ExpansionKind, n: usize) -> Vec<u32> {
    let mut w = Vec::with_capacity(n.max(prefix.len()));
    w.extend_from_slice(prefix);
    for i in w.len()..n {
        let next = kind.next_word(&w, i);
        w.push(next);
    }
    w.truncate(n);
    w
}

/// One step of the (possibly weakened) compression function.
pub fn step(state: RegisterState, w: u32, k: u32, config: &VariantConfig) -> RegisterState {
    let RegisterState {
        a,
        b,
        c,
        d,
        e,
        f,
        g,
        h,
    } = state;
    let (s0, s1) = match config.sbox_mode {
        SboxMode::Standard => (big_sigma0(a), big_sigma1(e)),
        SboxMode::Identity => (a, e),
    };
    let (mj, chs) = match config.bool_mode {
        BoolMode::Standard => (maj(a, b, c), ch(e, f, g)),
        BoolMode::ModularAdd => (
            a.wrapping_add(b).wrapping_add(c),
            e.wrapping_add(f).wrapping_add(g),
        ),
    };
    let t1 = h
        .wrapping_add(s1)
        .wrapping_add(chs)
        .wrapping_add(k)
        .wrapping_add(w);
    let t2 = s0.wrapping_add(mj);
    RegisterState {
        a: t1.wrapping_add(t2),
        b: a,
        c: b,
        d: c,
        e: d.wrapping_add(t1),
        f: e,
        g: f,
        h: g,
    }
}

/// Runs `config.steps` steps on the expanded message, returning every
/// intermediate state (`states[0] == iv`, `states[s]` is the input of step `s`).
pub fn state_trace(
    iv: RegisterState,
    m: &MessageBlock,
    config: &VariantConfig,
) -> Vec<RegisterState> {
    let w = expand_words(&m.0, config.expansion_kind, config.steps.max(16));
    let mut states = Vec::with_capacity(config.steps + 1);
    let mut s = iv;
    states.push(s);
    for (i, &wi) in w.iter().enumerate().take(config.steps) {
        s = step(s, wi, round_constant(i), config);
        states.push(s);
    }
    states
}

/// The compression function: `config.steps` steps followed by the
/// word-wise feed-forward of `iv` when enabled.
pub fn compress(iv: RegisterState, m: &MessageBlock, config: &VariantConfig) -> RegisterState {
    let out = *state_trace(iv, m, config).last().unwrap();
    if config.feed_forward {
        out.wrapping_add(iv)
    } else {
        out
    }
}

/// Number of set bits in a word sequence.
pub fn hamming_weight(words: &[u32]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variant::make_variant;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn boolean_function_examples() {
        assert_eq!(maj(0, 0, 0), 0);
        assert_eq!(maj(u32::MAX, u32::MAX, u32::MAX), u32::MAX);
        assert_eq!(maj(0xF0F0F0F0, 0xFF00FF00, 0), 0xF000F000);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (y, z) = (rng.gen(), rng.gen());
            assert_eq!(ch(u32::MAX, y, z), y);
            assert_eq!(ch(0, y, z), z);
        }
    }

    #[test]
    fn ch_example_matches_bitwise_evaluation() {
        let (x, y, z) = (0xF0F0F0F0u32, 0xFF00FF00u32, 0x0F0F0F0Fu32);
        let mut expected = 0u32;
        for bit in 0..32 {
            let (xb, yb, zb) = ((x >> bit) & 1, (y >> bit) & 1, (z >> bit) & 1);
            let out = if xb == 1 { yb } else { zb };
            expected |= out << bit;
        }
        assert_eq!(ch(x, y, z), expected);
        assert_eq!(expected, 0xFF0F_FF0F);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(small_sigma0(0), 0);
        assert_eq!(small_sigma0(1 << 31).count_ones(), 3);
        assert_eq!(small_sigma0(1).count_ones(), 2);
    }

    #[test]
    fn complement_symmetry_per_bit() {
        for v in 0..8u32 {
            let (x, y, z) = (v >> 2 & 1, v >> 1 & 1, v & 1);
            let n = |b: u32| b ^ 1;
            assert_eq!(maj(n(x), n(y), n(z)) & 1, n(maj(x, y, z) & 1));
            assert_eq!(ch(x, n(y), n(z)) & 1, n(ch(x, y, z) & 1));
        }
    }

    #[test]
    fn abc_digest() {
        let cfg = make_variant("standard").unwrap();
        let m = pad_single_block(b"abc").unwrap();
        let out = compress(RegisterState::iv(), &m, &cfg);
        assert_eq!(
            out.to_array(),
            [
                0xba7816bf, 0x8f01cfea, 0x414140de, 0x5dae2223, 0xb00361a3, 0x96177a9c, 0xb410ff61,
                0xf20015ad
            ]
        );
    }

    #[test]
    fn zero_steps_doubles_iv() {
        let mut cfg = make_variant("standard").unwrap();
        cfg.steps = 0;
        let iv = RegisterState::iv();
        let out = compress(iv, &MessageBlock([7; 16]), &cfg);
        assert_eq!(out, iv.wrapping_add(iv));
    }

    #[test]
    fn expansion_rejects_short_and_fixes_zero() {
        assert!(matches!(
            expand(&MessageBlock::ZERO, ExpansionKind::Sha256Add, 15),
            Err(Error::TooFewSteps(15))
        ));
        for kind in ExpansionKind::ALL {
            let w = expand(&MessageBlock::ZERO, kind, kind.full_steps()).unwrap();
            assert!(w.words().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn add_linear_step_is_zero_at_origin() {
        let cfg = make_variant("add_linear").unwrap();
        assert_eq!(step(RegisterState::ZERO, 0, 0, &cfg), RegisterState::ZERO);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ExpansionKind::ALL {
            assert_eq!(kind.name().parse::<ExpansionKind>().unwrap(), kind);
        }
        assert_eq!(
            "sha256_xor".parse::<ExpansionKind>().unwrap(),
            ExpansionKind::Sha256Xor
        );
        assert!("md5".parse::<ExpansionKind>().is_err());
    }

    #[test]
    fn padding_rejects_long_messages() {
        assert!(pad_single_block(&[0u8; 55]).is_ok());
        assert!(matches!(
            pad_single_block(&[0u8; 56]),
            Err(Error::MessageTooLong(56))
        ));
    }
}
