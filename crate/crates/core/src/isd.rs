//! Probabilistic low-weight codeword search by information-set decoding.
//!
//! All three algorithms keep the generator matrix in systematic form with
//! respect to an information set `I` of 512 columns: row `r` has a single
//! one inside `I`, at column `info[r]`. Only row operations are used, so
//! every row, and every sum of rows, is a codeword in the original
//! coordinates. Candidates are sums of a few rows (low weight on `I`) that
//! additionally vanish on a window of `l` columns outside `I`.
//!
//! * [`Algorithm::Leon`]: fresh random information set every iteration,
//!   all pairs of rows agreeing on the window.
//! * [`Algorithm::Stern`]: fresh random information set, rows split into two
//!   halves and combinations from each half joined on the window.
//! * [`Algorithm::CanteautChabaud`]: consecutive information sets differ
//!   by a few column swaps, each costing one pivot step instead of a full
//!   elimination. Pairs are joined on the window as in Leon's algorithm
//!   (p = 2) or with the Stern split (p = 4).

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolean::worker_rng;
use crate::codeword::{Codeword, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Leon,
    Stern,
    CanteautChabaud,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Leon => "leon",
            Algorithm::Stern => "stern",
            Algorithm::CanteautChabaud => "canteaut-chabaud",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        [
            Algorithm::Leon,
            Algorithm::Stern,
            Algorithm::CanteautChabaud,
        ]
        .into_iter()
        .find(|a| a.name() == norm || (norm == "cc" && *a == Algorithm::CanteautChabaud))
        .ok_or_else(|| Error::InvalidParams(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    pub algorithm: Algorithm,
    /// Total iterations, split evenly across workers.
    pub iterations: u64,
    /// Optional wall-clock cap; results are only reproducible when the
    /// iteration budget is reached first.
    pub time_budget: Option<Duration>,
    /// Weight of a candidate on the information set: 1 or 2 for Leon,
    /// 2 or 4 (split evenly over the halves) for the Stern join.
    pub p: usize,
    /// Window size in columns.
    pub l: usize,
    /// Information-set columns exchanged per Canteaut-Chabaud iteration.
    pub swaps: usize,
    pub seed: u64,
    pub workers: usize,
    /// Stop as soon as a word of at most this weight is found.
    pub target_weight: Option<u32>,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            algorithm: Algorithm::CanteautChabaud,
            iterations: 20_000,
            time_budget: None,
            p: 2,
            l: 10,
            swaps: 1,
            seed: 0,
            workers: 1,
            target_weight: None,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParams(
                "iteration budget must be positive".into(),
            ));
        }
        if self.time_budget.is_some_and(|t| t.is_zero()) {
            return Err(Error::InvalidParams("time budget must be positive".into()));
        }
        if self.swaps == 0 {
            return Err(Error::InvalidParams(
                "at least one column swap per iteration is required".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParams(
                "at least one worker is required".into(),
            ));
        }
        if self.l == 0 || self.l > 32 {
            return Err(Error::InvalidParams(format!(
                "window size {} outside 1..=32",
                self.l
            )));
        }
        let ok_p = match self.algorithm {
            Algorithm::Leon => matches!(self.p, 1 | 2),
            _ => matches!(self.p, 2 | 4),
        };
        if !ok_p {
            return Err(Error::InvalidParams(format!(
                "p = {} not supported by {}",
                self.p, self.algorithm
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best: Codeword,
    pub iterations: u64,
    /// Strictly decreasing best weights, by iteration of discovery.
    pub trace: Vec<TracePoint>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Systematic-form generator matrix plus bookkeeping for one worker.
struct Isd<'a> {
    m: BitMatrix,
    info: Vec<usize>,
    non_info: Vec<usize>,
    rng: ChaCha8Rng,
    shared_best: &'a AtomicU32,
    best_weight: u32,
    best: Option<BitVec>,
    trace: Vec<TracePoint>,
    iteration: u64,
    scratch: Vec<u64>,
}

impl<'a> Isd<'a> {
    fn new(g: &BitMatrix, rng: ChaCha8Rng, shared_best: &'a AtomicU32) -> Self {
        let stride = g.stride();
        Isd {
            m: g.clone(),
            info: Vec::new(),
            non_info: Vec::new(),
            rng,
            shared_best,
            best_weight: u32::MAX,
            best: None,
            trace: Vec::new(),
            iteration: 0,
            scratch: vec![0; stride],
        }
    }

    /// Gaussian elimination on a random column order.
    fn randomize(&mut self) {
        let k = self.m.rows();
        let mut cols: Vec<usize> = (0..self.m.cols()).collect();
        cols.shuffle(&mut self.rng);
        self.info.clear();
        self.non_info.clear();
        let mut r = 0;
        for &c in &cols {
            if r == k {
                self.non_info.push(c);
                continue;
            }
            let Some(p) = (r..k).find(|&i| self.m.get(i, c)) else {
                self.non_info.push(c);
                continue;
            };
            self.m.swap_rows(r, p);
            for i in 0..k {
                if i != r && self.m.get(i, c) {
                    self.m.xor_rows(i, r);
                }
            }
            self.info.push(c);
            r += 1;
        }
        assert_eq!(r, k, "generator matrix must have full row rank");
    }

    /// Exchanges one information-set column for an outside column and
    /// records the rows that changed.
    fn swap_column(&mut self, touched: &mut Vec<usize>) {
        let k = self.m.rows();
        if self.non_info.is_empty() {
            return;
        }
        loop {
            let j = self.rng.gen_range(0..self.non_info.len());
            let c = self.non_info[j];
            let rows: Vec<usize> = (0..k).filter(|&r| self.m.get(r, c)).collect();
            if rows.is_empty() {
                continue;
            }
            let r = rows[self.rng.gen_range(0..rows.len())];
            for &i in &rows {
                if i != r {
                    self.m.xor_rows(i, r);
                }
            }
            touched.extend(rows);
            self.non_info[j] = self.info[r];
            self.info[r] = c;
            return;
        }
    }

    fn window_keys(&mut self, l: usize) -> Vec<u32> {
        let window: Vec<usize> = self
            .non_info
            .choose_multiple(&mut self.rng, l)
            .copied()
            .collect();
        (0..self.m.rows())
            .map(|r| {
                window
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (b, &c)| acc | (self.m.get(r, c) as u32) << b)
            })
            .collect()
    }

    fn bound(&self) -> u32 {
        self.best_weight
            .min(self.shared_best.load(Ordering::Relaxed))
    }

    /// Weight of the sum of `rows`, or `None` once it reaches `bound`.
    fn weight_below(&mut self, rows: &[usize], bound: u32) -> Option<u32> {
        let stride = self.m.stride();
        let mut w = 0u32;
        for i in 0..stride {
            let mut x = 0u64;
            for &r in rows {
                x ^= self.m.row(r)[i];
            }
            self.scratch[i] = x;
            w += x.count_ones();
            if w >= bound {
                return None;
            }
        }
        (w > 0).then_some(w)
    }

    fn consider(&mut self, rows: &[usize]) {
        let bound = self.bound().saturating_add(1).min(self.best_weight);
        if let Some(w) = self.weight_below(rows, bound) {
            if w < self.best_weight {
                self.best_weight = w;
                self.best = Some(BitVec::from_words(self.m.cols(), self.scratch.clone()));
                self.trace.push(TracePoint {
                    iteration: self.iteration,
                    weight: w,
                });
                self.shared_best.fetch_min(w, Ordering::Relaxed);
            }
        }
    }

    fn singles(&mut self) {
        for r in 0..self.m.rows() {
            self.consider(&[r]);
        }
    }

    fn leon(&mut self, p: usize, l: usize) {
        if p < 2 {
            return;
        }
        let keys = self.window_keys(l);
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_unstable_by_key(|&r| keys[r]);
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && keys[order[end]] == keys[order[start]] {
                end += 1;
            }
            for a in start..end {
                for b in a + 1..end {
                    self.consider(&[order[a], order[b]]);
                }
            }
            start = end;
        }
    }

    fn stern(&mut self, p: usize, l: usize) {
        let keys = self.window_keys(l);
        let mut rows: Vec<usize> = (0..keys.len()).collect();
        rows.shuffle(&mut self.rng);
        let (x, y) = rows.split_at(rows.len() / 2);
        let combos = |half: &[usize]| -> Vec<(u32, [usize; 2])> {
            if p == 2 {
                half.iter().map(|&a| (keys[a], [a, usize::MAX])).collect()
            } else {
                let mut v = Vec::with_capacity(half.len() * half.len() / 2);
                for (i, &a) in half.iter().enumerate() {
                    for &b in &half[i + 1..] {
                        v.push((keys[a] ^ keys[b], [a, b]));
                    }
                }
                v
            }
        };
        let mut left = combos(x);
        left.sort_unstable_by_key(|e| e.0);
        let right = combos(y);
        let mut buf = Vec::with_capacity(4);
        for (key, rb) in right {
            let lo = left.partition_point(|e| e.0 < key);
            let mut i = lo;
            while i < left.len() && left[i].0 == key {
                buf.clear();
                buf.extend(
                    left[i]
                        .1
                        .iter()
                        .chain(&rb)
                        .copied()
                        .filter(|&r| r != usize::MAX),
                );
                let rows = buf.clone();
                self.consider(&rows);
                i += 1;
            }
        }
    }

    fn run(&mut self, params: &SearchParams, iterations: u64, deadline: Option<Instant>) {
        self.randomize();
        let mut touched = Vec::new();
        while self.iteration < iterations {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                break;
            }
            if params
                .target_weight
                .is_some_and(|t| self.shared_best.load(Ordering::Relaxed) <= t)
            {
                break;
            }
            if self.iteration == 0 {
                self.singles();
            } else if params.algorithm == Algorithm::CanteautChabaud {
                touched.clear();
                for _ in 0..params.swaps {
                    self.swap_column(&mut touched);
                }
                touched.sort_unstable();
                touched.dedup();
                for &r in &touched {
                    self.consider(&[r]);
                }
            } else {
                self.randomize();
                self.singles();
            }
            match (params.algorithm, params.p) {
                (Algorithm::Stern, _) | (_, 4) => self.stern(params.p, params.l),
                _ => self.leon(params.p, params.l),
            }
            self.iteration += 1;
        }
    }
}

/// Searches the code generated by `g` for a low-weight nonzero word.
pub fn low_weight_search(g: &GeneratorMatrix, params: &SearchParams) -> Result<SearchResult> {
    params.validate()?;
    let start = Instant::now();
    let deadline = params.time_budget.map(|t| start + t);
    let shared = AtomicU32::new(u32::MAX);
    let workers = params.workers;
    let per = |i: usize| {
        params.iterations / workers as u64
            + u64::from((i as u64) < params.iterations % workers as u64)
    };
    let results: Vec<(u32, Option<BitVec>, Vec<TracePoint>, u64)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|i| {
                let shared = &shared;
                scope.spawn(move || {
                    let mut isd = Isd::new(&g.matrix, worker_rng(params.seed, i), shared);
                    isd.run(params, per(i), deadline);
                    (isd.best_weight, isd.best, isd.trace, isd.iteration)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let iterations = results.iter().map(|r| r.3).sum();
    let mut points: Vec<TracePoint> = results.iter().flat_map(|r| r.2.iter().copied()).collect();
    points.sort_by_key(|p| (p.iteration, p.weight));
    let mut trace: Vec<TracePoint> = Vec::new();
    for p in points {
        if trace.last().is_none_or(|t| p.weight < t.weight) {
            trace.push(p);
        }
    }
    let best_bits = results
        .into_iter()
        .filter_map(|(w, b, _, _)| b.map(|b| (w, b)))
        .min_by_key(|(w, _)| *w)
        .map(|(_, b)| b)
        .ok_or_else(|| Error::InvalidParams("search produced no codeword".into()))?;
    Ok(SearchResult {
        best: Codeword::from_bits(&best_bits),
        iterations,
        trace,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codeword::{build_generator, verify_codeword};
    use crate::primitives::ExpansionKind;

    fn params(algorithm: Algorithm, iterations: u64) -> SearchParams {
        SearchParams {
            algorithm,
            iterations,
            ..SearchParams::default()
        }
    }

    #[test]
    fn sixteen_steps_gives_weight_one() {
        let g = build_generator(ExpansionKind::Sha256Xor, 16).unwrap();
        for alg in [
            Algorithm::Leon,
            Algorithm::Stern,
            Algorithm::CanteautChabaud,
        ] {
            let r = low_weight_search(&g, &params(alg, 3)).unwrap();
            assert_eq!(r.best.weight, 1);
        }
    }

    #[test]
    fn results_are_codewords_and_reproducible() {
        let g = build_generator(ExpansionKind::Sha256Xor, 24).unwrap();
        for alg in [
            Algorithm::Leon,
            Algorithm::Stern,
            Algorithm::CanteautChabaud,
        ] {
            let p = params(alg, 20);
            let a = low_weight_search(&g, &p).unwrap();
            let b = low_weight_search(&g, &p).unwrap();
            assert_eq!(a.best, b.best);
            assert_eq!(a.trace, b.trace);
            assert_eq!(
                verify_codeword(&a.best.words, ExpansionKind::Sha256Xor, 24).unwrap(),
                (true, a.best.weight)
            );
            assert!(a.trace.windows(2).all(|w| w[1].weight < w[0].weight));
        }
    }

    #[test]
    fn multiple_workers_are_deterministic() {
        let g = build_generator(ExpansionKind::Sha256Xor, 24).unwrap();
        let p = SearchParams {
            workers: 3,
            iterations: 30,
            ..SearchParams::default()
        };
        assert_eq!(
            low_weight_search(&g, &p).unwrap().best,
            low_weight_search(&g, &p).unwrap().best
        );
    }

    #[test]
    fn invalid_params_rejected() {
        let g = build_generator(ExpansionKind::Sha256Xor, 16).unwrap();
        for p in [
            SearchParams {
                iterations: 0,
                ..SearchParams::default()
            },
            SearchParams {
                workers: 0,
                ..SearchParams::default()
            },
            SearchParams {
                p: 3,
                ..SearchParams::default()
            },
            SearchParams {
                l: 0,
                ..SearchParams::default()
            },
        ] {
            assert!(low_weight_search(&g, &p).is_err());
        }
        assert_eq!(
            "cc".parse::<Algorithm>().unwrap(),
            Algorithm::CanteautChabaud
        );
        assert_eq!("stern".parse::<Algorithm>().unwrap(), Algorithm::Stern);
    }
}
