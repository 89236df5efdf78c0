//! Best codeword weight as a function of the number of expansion steps.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::codeword::{build_generator, extend_codeword, verify_codeword, Codeword};
use crate::error::{Error, Result};
use crate::isd::{low_weight_search, SearchParams};
use crate::primitives::ExpansionKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Found by the search at this step count, possibly as the prefix of a
    /// word found at a larger step count.
    Searched,
    /// Forward expansion of a word found at a smaller step count.
    Extended,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Searched => "searched",
            Method::Extended => "extended",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub steps: usize,
    pub weight: u32,
    pub method: Method,
    pub seed: u64,
    pub iterations: u64,
    pub word: Codeword,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub steps: RangeInclusive<usize>,
    /// Largest step count that is searched directly; larger ones are extended.
    pub horizon: usize,
    pub kind: ExpansionKind,
    /// Per-step-count search parameters.
    pub params: SearchParams,
}

pub fn fig2_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let (lo, hi) = (*cfg.steps.start(), *cfg.steps.end());
    if lo < 16 || hi > 64 || lo > hi {
        return Err(Error::InvalidParams(format!(
            "step range {lo}..={hi} outside 16..=64"
        )));
    }
    let mut rows: Vec<SweepRow> = Vec::new();
    for n in lo..=hi.min(cfg.horizon) {
        let g = build_generator(cfg.kind, n)?;
        let r = low_weight_search(&g, &cfg.params)?;
        rows.push(SweepRow {
            steps: n,
            weight: r.best.weight,
            method: Method::Searched,
            seed: cfg.params.seed,
            iterations: r.iterations,
            word: r.best,
        });
    }
    tighten_prefixes(&mut rows);
    let searched = rows.clone();
    for n in (hi.min(cfg.horizon) + 1).max(lo)..=hi {
        let best = searched
            .iter()
            .map(|r| {
                extend_codeword(&r.word.words, cfg.kind, n).map(|w| (Codeword::from_words(w), r))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min_by_key(|(w, _)| w.weight);
        let Some((word, src)) = best else {
            return Err(Error::InvalidParams(
                "no searched step count to extend from".into(),
            ));
        };
        rows.push(SweepRow {
            steps: n,
            weight: word.weight,
            method: Method::Extended,
            seed: src.seed,
            iterations: 0,
            word,
        });
    }
    tighten_prefixes(&mut rows);
    for r in &rows {
        debug_assert!(verify_codeword(&r.word.words, cfg.kind, r.steps)?.0);
    }
    Ok(rows)
}

/// A prefix of a valid word is valid, so a good word at `n + 1` bounds
/// the weight at `n`. Makes the reported weights non-decreasing.
fn tighten_prefixes(rows: &mut [SweepRow]) {
    for i in (0..rows.len().saturating_sub(1)).rev() {
        let prefix = Codeword::from_words(rows[i + 1].word.words[..rows[i].steps].to_vec());
        if !prefix.is_zero() && prefix.weight < rows[i].weight {
            rows[i].weight = prefix.weight;
            rows[i].word = prefix;
        }
    }
}

/// CSV with columns `steps,weight,method,seed,iterations`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("steps,weight,method,seed,iterations\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.steps,
            r.weight,
            r.method.as_str(),
            r.seed,
            r.iterations
        ));
    }
    out
}

/// Largest step count whose best weight is at most `bound`.
pub fn horizon_at_weight(rows: &[SweepRow], bound: u32) -> Option<usize> {
    rows.iter()
        .filter(|r| r.weight <= bound)
        .map(|r| r.steps)
        .max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isd::Algorithm;

    #[test]
    fn small_sweep_is_monotone_and_valid() {
        let cfg = SweepConfig {
            steps: 16..=22,
            horizon: 20,
            kind: ExpansionKind::Sha256Xor,
            params: SearchParams {
                algorithm: Algorithm::CanteautChabaud,
                iterations: 200,
                ..SearchParams::default()
            },
        };
        let rows = fig2_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[0].weight, 1);
        assert!(rows.windows(2).all(|w| w[0].weight <= w[1].weight));
        for r in &rows {
            assert_eq!(
                verify_codeword(&r.word.words, cfg.kind, r.steps).unwrap(),
                (true, r.weight)
            );
        }
        assert_eq!(rows[5].method, Method::Extended);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("steps,weight,method,seed,iterations\n16,1,searched,0,"));
        assert!(horizon_at_weight(&rows, 3).is_some());
    }

    #[test]
    fn range_checked() {
        let cfg = SweepConfig {
            steps: 10..=20,
            horizon: 20,
            kind: ExpansionKind::Sha256Xor,
            params: SearchParams::default(),
        };
        assert!(fig2_sweep(&cfg).is_err());
    }
}
