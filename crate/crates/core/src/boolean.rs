//! Bit-31 difference accounting for the variant without S-boxes that keeps
//! Maj and Ch.
//!
//! When every difference sits in the most significant bit, modular addition
//! behaves like XOR (there is no carry out of bit 31), so the whole analysis
//! reduces to one bit per register. Differences through Maj and Ch are then
//! the only probabilistic events.

use std::fmt;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::disturbance::{DisturbanceVector, EXPANDED_WORDS};
use crate::error::{Error, Result};
use crate::primitives::{ch, maj, round_constant, step, MessageBlock, RegisterState};
use crate::ring::build_e;
use crate::variant::VariantName;

const MSB: u32 = 0x8000_0000;

/// Corrections at offsets 1..=8 after a bit-31 disturbance.
pub const XOR_CORRECTIONS: [u8; 8] = [0, 0, 1, 1, 0, 0, 0, 1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoolFunc {
    Ch,
    Maj,
}

impl BoolFunc {
    pub fn eval(self, x: bool, y: bool, z: bool) -> bool {
        let (x, y, z) = (x as u32, y as u32, z as u32);
        let r = match self {
            BoolFunc::Ch => ch(x, y, z),
            BoolFunc::Maj => maj(x, y, z),
        };
        r & 1 == 1
    }
}

/// `c . (x, y, z) = constant` over GF(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineCondition {
    pub coeffs: [bool; 3],
    pub constant: bool,
}

impl AffineCondition {
    pub fn holds(&self, x: [bool; 3]) -> bool {
        let lhs = (0..3).fold(false, |acc, i| acc ^ (self.coeffs[i] & x[i]));
        lhs == self.constant
    }
}

impl fmt::Display for AffineCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<&str> = ["x", "y", "z"]
            .iter()
            .zip(self.coeffs)
            .filter(|(_, c)| *c)
            .map(|(v, _)| *v)
            .collect();
        write!(f, "{} = {}", vars.join(" + "), self.constant as u8)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BooleanDiffEntry {
    pub func: BoolFunc,
    pub input_diff: [bool; 3],
    /// Number of the 8 input triples giving an output difference.
    pub count: u32,
    /// `None` when the output difference is certain.
    pub condition: Option<AffineCondition>,
}

impl BooleanDiffEntry {
    pub fn probability(&self) -> f64 {
        f64::from(self.count) / 8.0
    }

    pub fn probability_label(&self) -> String {
        match self.count {
            8 => "1".into(),
            0 => "0".into(),
            c => {
                let g = gcd(c, 8);
                format!("{}/{}", c / g, 8 / g)
            }
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bits3(v: u8) -> [bool; 3] {
    [v & 4 != 0, v & 2 != 0, v & 1 != 0]
}

/// Input differences in the order `(1,0,0), (0,1,0), (0,0,1), (1,1,0), (1,0,1), (0,1,1), (1,1,1)`.
pub const INPUT_DIFFS: [[bool; 3]; 7] = [
    [true, false, false],
    [false, true, false],
    [false, false, true],
    [true, true, false],
    [true, false, true],
    [false, true, true],
    [true, true, true],
];

/// Output-difference probability of Ch and Maj for each nonzero input
/// difference, with the affine condition under which it occurs, found by
/// enumerating all eight input triples.
pub fn boolean_diff_table() -> Vec<BooleanDiffEntry> {
    let mut out = Vec::new();
    for d in INPUT_DIFFS {
        for func in [BoolFunc::Ch, BoolFunc::Maj] {
            let active: Vec<bool> = (0..8u8)
                .map(|v| {
                    let x = bits3(v);
                    func.eval(x[0], x[1], x[2]) != func.eval(x[0] ^ d[0], x[1] ^ d[1], x[2] ^ d[2])
                })
                .collect();
            let count = active.iter().filter(|&&a| a).count() as u32;
            let condition = if count == 8 {
                None
            } else {
                (0..16u8)
                    .map(|f| AffineCondition {
                        coeffs: bits3(f >> 1),
                        constant: f & 1 == 1,
                    })
                    .find(|c| (0..8u8).all(|v| c.holds(bits3(v)) == active[v as usize]))
            };
            out.push(BooleanDiffEntry {
                func,
                input_diff: d,
                count,
                condition,
            });
        }
    }
    out
}

/// The bit-31 image of a disturbance vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsbDisturbance {
    /// Factor applied to the message difference to push it into bit 31.
    pub scale: u32,
    pub vector: DisturbanceVector,
    pub bits: Vec<bool>,
}

impl MsbDisturbance {
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Smallest power of two that moves every component of `delta_m` into
/// bit 31 or clears it.
pub fn msb_scale(delta_m: &[u32]) -> u32 {
    let v = delta_m
        .iter()
        .filter(|&&x| x != 0)
        .map(|x| x.trailing_zeros())
        .min()
        .unwrap_or(31);
    1u32 << (31 - v)
}

/// Expands `scale * delta_m` and checks that every expanded word is either
/// zero or exactly bit 31.
pub fn msb_disturbance_scaled(delta_m: &[u32], scale: u32) -> Result<MsbDisturbance> {
    let dm: Vec<u32> = delta_m.iter().map(|x| x.wrapping_mul(scale)).collect();
    let words = build_e::<u32>().mul_vec(&dm)?;
    if let Some((index, &value)) = words.iter().enumerate().find(|(_, &w)| w != 0 && w != MSB) {
        return Err(Error::NotMsbOnly { index, value });
    }
    let bits = words.iter().map(|&w| w == MSB).collect();
    Ok(MsbDisturbance {
        scale,
        vector: DisturbanceVector::from_message_diff(&dm)?,
        bits,
    })
}

/// [`msb_disturbance_scaled`] with the scale from [`msb_scale`].
pub fn msb_disturbance(delta_m: &[u32]) -> Result<MsbDisturbance> {
    msb_disturbance_scaled(delta_m, msb_scale(delta_m))
}

/// Register difference flags `[A..H]` at bit 31.
pub type Flags = [bool; 8];

fn or_model_step(s: Flags, w: bool) -> Flags {
    let [a, b, c, d, e, f, g, h] = s;
    let mo = a | b | c;
    let co = e | f | g;
    let t1 = h ^ e ^ co ^ w;
    let t2 = a ^ mo;
    [t1 ^ t2, a, b, c, d ^ t1, e, f, g]
}

/// Derives the bit-31 corrective pattern under the approximation that an
/// active Boolean function always flips its output.
///
/// Each correction clears the difference that would otherwise enter
/// register A. Returns the corrections for offsets 1..=8 and the register
/// flags at offsets 0..=9.
pub fn derive_xor_corrections() -> ([u8; 8], Vec<Flags>) {
    let mut rows = vec![[false; 8]];
    let mut s = or_model_step([false; 8], true);
    rows.push(s);
    let mut corr = [0u8; 8];
    for c in corr.iter_mut() {
        let [a, b, cc, _, e, f, g, h] = s;
        let w = h ^ e ^ (e | f | g) ^ a ^ (a | b | cc);
        *c = w as u8;
        s = or_model_step(s, w);
        rows.push(s);
    }
    (corr, rows)
}

/// Bit-31 message-word differences of the full characteristic.
pub fn characteristic_bits(bits: &[bool]) -> Vec<bool> {
    (0..bits.len())
        .map(|s| {
            let mut w = bits[s];
            for (k, &c) in XOR_CORRECTIONS.iter().enumerate() {
                if c == 1 && s > k {
                    w ^= bits[s - k - 1];
                }
            }
            w
        })
        .collect()
}

/// Register flags predicted at every step by superposing one corrected
/// local collision per disturbance bit. Entry `s` is the difference entering
/// step `s`; there are `bits.len() + 1` entries.
pub fn superposed_flags(bits: &[bool]) -> Vec<Flags> {
    let (_, template) = derive_xor_corrections();
    let mut states = vec![[false; 8]; bits.len() + 1];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        for (j, t) in template.iter().enumerate() {
            if let Some(s) = states.get_mut(i + j) {
                for r in 0..8 {
                    s[r] ^= t[r];
                }
            }
        }
    }
    states
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ActivityRow {
    pub step: usize,
    /// Difference flags of the Maj inputs (A, B, C).
    pub maj: [bool; 3],
    /// Difference flags of the Ch inputs (E, F, G).
    pub ch: [bool; 3],
    pub cost_e: u32,
}

/// Cost of one step: one bit condition per active Boolean function, except
/// for the input differences whose output difference is certain.
pub fn step_cost(maj_in: [bool; 3], ch_in: [bool; 3]) -> u32 {
    let maj_cost = maj_in.iter().any(|&b| b) && maj_in != [true, true, true];
    let ch_cost = ch_in.iter().any(|&b| b) && ch_in != [false, true, true];
    maj_cost as u32 + ch_cost as u32
}

/// Per-step Boolean-function activity of the characteristic built from the
/// bit-31 disturbance pattern `bits`.
pub fn derive_activity(bits: &[bool]) -> Vec<ActivityRow> {
    let states = superposed_flags(bits);
    (0..bits.len())
        .map(|step| {
            let s = states[step];
            let maj = [s[0], s[1], s[2]];
            let ch = [s[4], s[5], s[6]];
            ActivityRow {
                step,
                maj,
                ch,
                cost_e: step_cost(maj, ch),
            }
        })
        .collect()
}

pub fn total_cost(rows: &[ActivityRow], range: std::ops::Range<usize>) -> u32 {
    rows.iter()
        .filter(|r| range.contains(&r.step))
        .map(|r| r.cost_e)
        .sum()
}

fn pattern(p: [bool; 3]) -> String {
    p.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// CSV with columns `step,maj,ch,e`.
pub fn activity_csv(rows: &[ActivityRow]) -> String {
    let mut out = String::from("step,maj,ch,e\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.step,
            pattern(r.maj),
            pattern(r.ch),
            r.cost_e
        ));
    }
    out
}

/// Bit-31 view of one step of a message pair: difference flags plus the
/// bit-31 values of A, B, C and E, F, G in the first message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    flags: Flags,
    a: [bool; 3],
    e: [bool; 3],
}

impl Node {
    fn from_states(s: &RegisterState, s2: &RegisterState) -> Node {
        let d = s.xor(*s2).to_array();
        let v = s.to_array();
        let bit = |x: u32| x & MSB != 0;
        Node {
            flags: d.map(|x| x != 0),
            a: [bit(v[0]), bit(v[1]), bit(v[2])],
            e: [bit(v[4]), bit(v[5]), bit(v[6])],
        }
    }

    /// Successor when the message-word difference is `w` and the new
    /// bit-31 values of A and E are `na`, `ne`.
    fn next(&self, w: bool, na: bool, ne: bool) -> Node {
        let [da, db, dc, dd, de, df, dg, dh] = self.flags;
        let [a, b, c] = self.a;
        let [e, f, g] = self.e;
        let maj_d = BoolFunc::Maj.eval(a, b, c) ^ BoolFunc::Maj.eval(a ^ da, b ^ db, c ^ dc);
        let ch_d = BoolFunc::Ch.eval(e, f, g) ^ BoolFunc::Ch.eval(e ^ de, f ^ df, g ^ dg);
        let t1 = dh ^ de ^ ch_d ^ w;
        let t2 = da ^ maj_d;
        Node {
            flags: [t1 ^ t2, da, db, dc, dd ^ t1, de, df, dg],
            a: [na, a, b],
            e: [ne, e, f],
        }
    }

    fn index(&self) -> usize {
        let mut i = 0usize;
        for b in self.flags.iter().chain(&self.a).chain(&self.e) {
            i = (i << 1) | *b as usize;
        }
        i
    }
}

const NODE_COUNT: usize = 1 << 14;

/// Exact probability that one isolated bit-31 local collision cancels,
/// assuming uniformly distributed register bits.
///
/// This is computed over the actual Boolean functions rather than the
/// one-condition-per-active-function approximation, so correlated
/// conditions are accounted for.
pub fn exact_local_collision_probability() -> f64 {
    let corr: Vec<bool> = std::iter::once(true)
        .chain(XOR_CORRECTIONS.iter().map(|&c| c == 1))
        .collect();
    let mut layer: Vec<(Node, f64)> = Vec::new();
    for v in 0..64u8 {
        let node = Node {
            flags: [false; 8],
            a: [v & 1 != 0, v & 2 != 0, v & 4 != 0],
            e: [v & 8 != 0, v & 16 != 0, v & 32 != 0],
        };
        layer.push((node, 1.0 / 64.0));
    }
    for &w in &corr {
        let mut acc = vec![0.0f64; NODE_COUNT];
        let mut nodes: Vec<Option<Node>> = vec![None; NODE_COUNT];
        for (node, p) in &layer {
            for (na, ne) in [(false, false), (false, true), (true, false), (true, true)] {
                let n = node.next(w, na, ne);
                let i = n.index();
                acc[i] += p / 4.0;
                nodes[i] = Some(n);
            }
        }
        layer = nodes
            .into_iter()
            .zip(acc)
            .filter_map(|(n, p)| n.map(|n| (n, p)))
            .collect();
    }
    layer
        .iter()
        .filter(|(n, _)| n.flags == [false; 8])
        .map(|(_, p)| p)
        .sum()
}

/// Condition count of one isolated local collision under the
/// one-condition-per-active-function approximation.
pub fn approximate_local_cost() -> u32 {
    let mut bits = vec![false; 16];
    bits[0] = true;
    total_cost(&derive_activity(&bits), 0..16)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub std_error: f64,
}

impl MonteCarloResult {
    fn new(trials: u64, successes: u64) -> Self {
        let rate = successes as f64 / trials as f64;
        let std_error = (rate * (1.0 - rate) / trials as f64).sqrt();
        MonteCarloResult {
            trials,
            successes,
            rate,
            std_error,
        }
    }

    /// Distance from `p` in units of the standard error under `p`.
    pub fn z_score(&self, p: f64) -> f64 {
        let se = (p * (1.0 - p) / self.trials as f64).sqrt();
        if se == 0.0 {
            return if (self.rate - p).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        (self.rate - p) / se
    }
}

/// Seeded generator for worker `index`; independent streams of one seed.
pub fn worker_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn split_trials(trials: u64, workers: usize) -> Vec<u64> {
    let w = workers.max(1) as u64;
    (0..w)
        .map(|i| trials / w + u64::from(i < trials % w))
        .collect()
}

/// Injects `disturbance` into the message word of step `i` of random
/// message pairs from random states, applies the bit-31 corrections at
/// steps `i+1..=i+8`, and counts how often the state difference is zero
/// after step `i+8`.
pub fn monte_carlo_local_collision_with(
    i: usize,
    trials: u64,
    seed: u64,
    workers: usize,
    disturbance: u32,
) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if i > EXPANDED_WORDS - 9 {
        return Err(Error::StepOutOfRange(i));
    }
    let config = VariantName::NoSbox.config();
    let diffs: Vec<u32> = std::iter::once(disturbance)
        .chain(
            XOR_CORRECTIONS
                .iter()
                .map(|&c| if c == 1 { disturbance } else { 0 }),
        )
        .collect();
    let chunks = split_trials(trials, workers);
    let successes: u64 = thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .enumerate()
            .map(|(wi, &n)| {
                let diffs = &diffs;
                scope.spawn(move || {
                    let mut rng = worker_rng(seed, wi);
                    let mut ok = 0u64;
                    for _ in 0..n {
                        let mut s = RegisterState::from_array(std::array::from_fn(|_| rng.gen()));
                        let mut s2 = s;
                        for (j, &d) in diffs.iter().enumerate() {
                            let w: u32 = rng.gen();
                            let k = round_constant(i + j);
                            s = step(s, w, k, &config);
                            s2 = step(s2, w ^ d, k, &config);
                        }
                        ok += u64::from(s == s2);
                    }
                    ok
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .sum()
    });
    Ok(MonteCarloResult::new(trials, successes))
}

pub fn monte_carlo_local_collision(
    i: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloResult> {
    monte_carlo_local_collision_with(i, trials, seed, workers, MSB)
}

/// Bit-31 message-word differences for the first 16 steps of the
/// characteristic of `delta`, as full words.
pub fn first16_message_diff(delta: &MsbDisturbance) -> [u32; 16] {
    let w = characteristic_bits(&delta.bits);
    std::array::from_fn(|s| if w[s] { MSB } else { 0 })
}

/// Difference flags the characteristic predicts after the first 16 steps.
pub fn first16_target(delta: &MsbDisturbance) -> Flags {
    superposed_flags(&delta.bits)[16]
}

/// Runs a message and its partner under the no-S-box variant for 16 steps
/// from the standard IV, returning the pair of states after each step.
fn run_pair(m: &MessageBlock, dm: &[u32; 16]) -> Vec<(RegisterState, RegisterState)> {
    let config = VariantName::NoSbox.config();
    let mut s = RegisterState::iv();
    let mut s2 = s;
    let mut out = vec![(s, s2)];
    for (t, (&w, &d)) in m.0.iter().zip(dm).enumerate() {
        s = step(s, w, round_constant(t), &config);
        s2 = step(s2, w ^ d, round_constant(t), &config);
        out.push((s, s2));
    }
    out
}

/// True when the pair `(m, m xor dm)` stays confined to bit 31 and reaches
/// the characteristic's difference after step 15.
pub fn first16_success(m: &MessageBlock, delta: &MsbDisturbance) -> bool {
    let dm = first16_message_diff(delta);
    let (s, s2) = run_pair(m, &dm)[16];
    let d = s.xor(s2).to_array();
    d.iter().all(|&x| x & !MSB == 0) && d.map(|x| x != 0) == first16_target(delta)
}

/// Backward-reachability table for steering the first 16 steps of a
/// characteristic. Depends only on the disturbance, so it can be built once
/// and applied to many messages.
#[derive(Clone, Debug)]
pub struct First16Modifier {
    dm: [u32; 16],
    dw: [bool; 16],
    /// `live[s][node]`: the target is reachable from `node` entering step `s`.
    live: Vec<Vec<bool>>,
}

const BIT_PAIRS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

/// Upper bound on backtracking steps before giving up on a message.
const MAX_BACKTRACKS: usize = 4096;

impl First16Modifier {
    pub fn new(delta: &MsbDisturbance) -> Self {
        let dm = first16_message_diff(delta);
        let target = first16_target(delta);
        let dw = dm.map(|x| x != 0);
        let decode = |i: usize| -> Node {
            let bit = |k: usize| (i >> (13 - k)) & 1 == 1;
            Node {
                flags: std::array::from_fn(bit),
                a: std::array::from_fn(|k| bit(8 + k)),
                e: std::array::from_fn(|k| bit(11 + k)),
            }
        };
        let mut live = vec![vec![false; NODE_COUNT]; 17];
        for (i, l) in live[16].iter_mut().enumerate() {
            *l = decode(i).flags == target;
        }
        for s in (0..16).rev() {
            let (cur, next) = live.split_at_mut(s + 1);
            for (i, l) in cur[s].iter_mut().enumerate() {
                let n = decode(i);
                *l = BIT_PAIRS
                    .iter()
                    .any(|&(na, ne)| next[0][n.next(dw[s], na, ne).index()]);
            }
        }
        First16Modifier { dm, dw, live }
    }

    /// Adjusts the first 16 message words so the pair `(m, m xor dm)`
    /// follows a bit-31 trail ending in the characteristic's difference
    /// after step 15. Words whose current value keeps the target reachable
    /// are left unchanged; the others are redrawn, backtracking when a step
    /// has no admissible word.
    pub fn apply(&self, m: &MessageBlock, seed: u64) -> Result<MessageBlock> {
        let config = VariantName::NoSbox.config();
        let iv = RegisterState::iv();
        if !self.live[0][Node::from_states(&iv, &iv).index()] {
            return Err(Error::ModificationFailed {
                step: 0,
                reason: "target difference unreachable".into(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = *m;
        let mut states = vec![(iv, iv)];
        let mut redraw = [false; 16];
        let mut backtracks = 0;
        let mut t = 0;
        while t < 16 {
            let (s, s2) = states[t];
            let k = round_constant(t);
            let advance = |w: u32| (step(s, w, k, &config), step(s2, w ^ self.dm[t], k, &config));
            let keep = !redraw[t] && {
                let (n, n2) = advance(out.0[t]);
                self.live[t + 1][Node::from_states(&n, &n2).index()]
            };
            if !keep {
                let node = Node::from_states(&s, &s2);
                let mut choices: Vec<(bool, bool)> = BIT_PAIRS
                    .into_iter()
                    .filter(|&(na, ne)| self.live[t + 1][node.next(self.dw[t], na, ne).index()])
                    .collect();
                let mut word = None;
                while word.is_none() && !choices.is_empty() {
                    let (na, ne) = choices.swap_remove(rng.gen_range(0..choices.len()));
                    word = realize_bits(&s, k, na, ne, &mut rng);
                }
                match word {
                    Some(w) => out.0[t] = w,
                    None => {
                        backtracks += 1;
                        if t == 0 || backtracks > MAX_BACKTRACKS {
                            return Err(Error::ModificationFailed {
                                step: t,
                                reason: "no message word sets the required bits".into(),
                            });
                        }
                        redraw[t] = false;
                        t -= 1;
                        redraw[t] = true;
                        states.pop();
                        continue;
                    }
                }
            }
            redraw[t] = false;
            states.push(advance(out.0[t]));
            t += 1;
        }
        Ok(out)
    }
}

/// [`First16Modifier::apply`] for a single message.
pub fn satisfy_first16(
    m: &MessageBlock,
    delta: &MsbDisturbance,
    seed: u64,
) -> Result<MessageBlock> {
    First16Modifier::new(delta).apply(m, seed)
}

/// Draws a message word giving bit-31 values `na` and `ne` to the new A and
/// E registers of the no-S-box step, uniformly among all such words.
///
/// With `x = D + T1` the conditions are `x` in one half of the circle and
/// `x + (T2 - D)` in another, i.e. `x` in the intersection of two arcs of
/// length 2^31.
fn realize_bits(
    s: &RegisterState,
    k: u32,
    na: bool,
    ne: bool,
    rng: &mut ChaCha8Rng,
) -> Option<u32> {
    const HALF: u64 = 1 << 31;
    let RegisterState {
        a,
        b,
        c,
        d,
        e,
        f,
        g,
        h,
    } = *s;
    let t2 = a.wrapping_add(maj(a, b, c));
    let base = h.wrapping_add(e).wrapping_add(ch(e, f, g)).wrapping_add(k);
    let half = |bit: bool| if bit { MSB } else { 0 };
    let s1 = half(ne);
    let s2 = half(na).wrapping_sub(t2.wrapping_sub(d));
    let off = u64::from(s2.wrapping_sub(s1));
    let (start, len) = if off < HALF {
        (s2, HALF - off)
    } else {
        (s1, off - HALF)
    };
    if len == 0 {
        return None;
    }
    let x = start.wrapping_add(rng.gen_range(0..len) as u32);
    let t1 = x.wrapping_sub(d);
    Some(t1.wrapping_sub(base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::solve_disturbance_kernel;

    fn entry(table: &[BooleanDiffEntry], func: BoolFunc, d: [bool; 3]) -> &BooleanDiffEntry {
        table
            .iter()
            .find(|e| e.func == func && e.input_diff == d)
            .unwrap()
    }

    #[test]
    fn certain_rows() {
        let t = boolean_diff_table();
        assert_eq!(t.len(), 14);
        assert_eq!(entry(&t, BoolFunc::Ch, [false, true, true]).count, 8);
        assert_eq!(entry(&t, BoolFunc::Maj, [true, true, true]).count, 8);
        for e in &t {
            assert!(e.count == 4 || e.count == 8);
            assert_eq!(e.condition.is_none(), e.count == 8);
        }
        let c = entry(&t, BoolFunc::Ch, [true, false, false]);
        assert_eq!(c.probability_label(), "1/2");
        assert_eq!(c.condition.unwrap().to_string(), "y + z = 1");
    }

    #[test]
    fn corrections_and_template() {
        let (corr, rows) = derive_xor_corrections();
        assert_eq!(corr, XOR_CORRECTIONS);
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[9], [false; 8]);
        assert_eq!(approximate_local_cost(), 9);
    }

    #[test]
    fn canonical_generator_has_an_msb_image() {
        let g = &solve_disturbance_kernel()[0];
        let d = msb_disturbance(g).unwrap();
        assert_eq!(d.scale, 1);
        assert!(d.bits[56..].iter().all(|&b| !b));
        let far = [1u32, 0xa, 0xc, 0xa, 0xe, 2, 4, 4, 8, 0xd, 1, 6, 5, 4, 7, 3].map(|x| x << 28);
        assert_eq!(msb_scale(&far), 8);
        assert!(matches!(
            msb_disturbance_scaled(&far, 1),
            Err(Error::NotMsbOnly {
                index: 0,
                value: 0x1000_0000
            })
        ));
        assert_eq!(msb_disturbance_scaled(&far, 8).unwrap().weight(), 27);
    }

    #[test]
    fn zero_pattern_has_no_cost() {
        let rows = derive_activity(&[false; 64]);
        assert_eq!(total_cost(&rows, 0..64), 0);
        assert!(activity_csv(&rows).starts_with("step,maj,ch,e\n0,000,000,0\n"));
    }

    #[test]
    fn exact_local_probability() {
        assert_eq!(exact_local_collision_probability(), 7.0 / 1024.0);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_exact_for_zero() {
        let a = monte_carlo_local_collision(20, 4096, 3, 2).unwrap();
        let b = monte_carlo_local_collision(20, 4096, 3, 2).unwrap();
        assert_eq!(a, b);
        let z = monte_carlo_local_collision_with(20, 1000, 1, 1, 0).unwrap();
        assert_eq!(z.rate, 1.0);
        assert!(matches!(
            monte_carlo_local_collision(20, 0, 1, 1),
            Err(Error::ZeroTrials)
        ));
        assert!(matches!(
            monte_carlo_local_collision(56, 10, 1, 1),
            Err(Error::StepOutOfRange(56))
        ));
    }

    #[test]
    fn first16_modification_reaches_target() {
        let near = msb_disturbance(&solve_disturbance_kernel()[0]).unwrap();
        let far = [1u32, 0xa, 0xc, 0xa, 0xe, 2, 4, 4, 8, 0xd, 1, 6, 5, 4, 7, 3].map(|x| x << 28);
        let far = msb_disturbance(&far).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [near, far] {
            let modifier = First16Modifier::new(&d);
            for seed in 0..1000 {
                let m = MessageBlock(std::array::from_fn(|_| rng.gen()));
                let m2 = modifier.apply(&m, seed).unwrap();
                assert!(first16_success(&m2, &d));
                assert_eq!(modifier.apply(&m2, seed + 1).unwrap(), m2);
            }
        }
    }

    #[test]
    fn realized_words_set_the_requested_bits() {
        let config = VariantName::NoSbox.config();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..2000 {
            let mut s = RegisterState::from_array(rng.gen());
            // force the degenerate offsets T2 - D = 0 and 2^31
            let t2 = s.a.wrapping_add(maj(s.a, s.b, s.c));
            match trial % 3 {
                0 => s.d = t2,
                1 => s.d = t2 ^ MSB,
                _ => {}
            }
            let delta = t2.wrapping_sub(s.d);
            for (na, ne) in BIT_PAIRS {
                let possible = match delta {
                    0 => na == ne,
                    MSB => na != ne,
                    _ => true,
                };
                match realize_bits(&s, 7, na, ne, &mut rng) {
                    Some(w) => {
                        let n = step(s, w, 7, &config);
                        assert_eq!((n.a & MSB != 0, n.e & MSB != 0), (na, ne));
                    }
                    None => assert!(!possible, "{s:?} {na} {ne}"),
                }
            }
        }
    }

    #[test]
    fn no_active_conditions_leaves_message_unchanged() {
        let d = msb_disturbance(&[0; 16]).unwrap();
        let m = MessageBlock(std::array::from_fn(|i| i as u32 * 0x0101_0101));
        assert_eq!(satisfy_first16(&m, &d, 0).unwrap(), m);
    }
}
