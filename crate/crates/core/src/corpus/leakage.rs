//! Exact-substring evaluation-leakage scanning.
//!
//! Detection is exact by design: a window-length substring of an eval item
//! occurring verbatim in a document is contamination, anything else is not.
//! Zero false positives, conservative recall.

use super::{Corpus, EvalSet};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::hash::{BuildHasher, Hasher, RandomState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContaminationMatch {
    pub doc_id: u64,
    pub eval_id: String,
    /// Byte offset of the match within the document.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ContaminationReport {
    pub window: usize,
    pub matches: Vec<ContaminationMatch>,
}

impl ContaminationReport {
    pub fn is_clean(&self) -> bool {
        self.matches.is_empty()
    }

    /// Distinct contaminated document ids.
    pub fn flagged_docs(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.matches.iter().map(|m| m.doc_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Report every exact `window`-byte substring shared between an eval item
/// and a corpus document.
pub fn scan_eval_leakage(corpus: &Corpus, eval: &EvalSet, window: usize) -> Result<ContaminationReport> {
    if window < 8 {
        return Err(Error::param("window", format!("must be ≥ 8 bytes, got {window}")));
    }
    if eval.items.iter().all(|i| i.len() < window) {
        return Err(Error::param(
            "window",
            format!("window {window} is longer than every eval item"),
        ));
    }

    // Index all eval windows once; hash → candidate (item, offset) pairs.
    let hasher = RandomState::new();
    let mut index: HashMap<u64, Vec<(usize, usize)>> = HashMap::new();
    for (item_idx, item) in eval.items.iter().enumerate() {
        if item.len() < window {
            continue;
        }
        for (off, w) in item.windows(window).enumerate() {
            index.entry(hash_window(&hasher, w)).or_default().push((item_idx, off));
        }
    }

    let mut matches: Vec<ContaminationMatch> = corpus
        .documents
        .par_iter()
        .flat_map_iter(|doc| {
            let hasher = &hasher;
            let index = &index;
            let eval_items = &eval.items;
            let eval_id = &eval.eval_id;
            doc.text
                .windows(window)
                .enumerate()
                .filter_map(move |(off, w)| {
                    let candidates = index.get(&hash_window(hasher, w))?;
                    // Hash hit: confirm bytes before reporting.
                    candidates
                        .iter()
                        .any(|&(item_idx, item_off)| {
                            &eval_items[item_idx][item_off..item_off + window] == w
                        })
                        .then(|| ContaminationMatch {
                            doc_id: doc.doc_id,
                            eval_id: eval_id.clone(),
                            offset: off,
                        })
                })
        })
        .collect();

    matches.sort_by_key(|m| (m.doc_id, m.offset));
    Ok(ContaminationReport { window, matches })
}

fn hash_window(hasher: &RandomState, w: &[u8]) -> u64 {
    let mut h = hasher.build_hasher();
    h.write(w);
    h.finish()
}
