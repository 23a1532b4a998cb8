//! Exact and near-duplicate removal.
//!
//! Exact duplicates are caught by content hash. Near-duplicates are scored
//! by Jaccard similarity over 8-byte shingles; candidate pairs come from
//! MinHash LSH banding so the pass stays near-linear, and every candidate is
//! confirmed against the exact shingle sets before removal. First occurrence
//! wins in both stages.

use super::Corpus;
use crate::config::SHINGLE_WIDTH;
use crate::error::{Error, Result};
use crate::hash::Digest;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

const NUM_PERMUTATIONS: usize = 128;
const NUM_BANDS: usize = 16; // 8 rows per band

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DedupStats {
    pub exact_removed: usize,
    pub near_removed: usize,
    pub jaccard_threshold: f64,
}

/// Remove exact and near-duplicate documents, keeping the first occurrence.
pub fn dedup(mut corpus: Corpus, jaccard_threshold: f64) -> Result<Corpus> {
    if !(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0) {
        return Err(Error::param(
            "jaccard_threshold",
            format!("must be in (0, 1], got {jaccard_threshold}"),
        ));
    }

    let docs = std::mem::take(&mut corpus.documents);
    let before = docs.len();

    // Stage 1: exact duplicates by content hash.
    let mut seen_hashes: HashSet<Digest> = HashSet::new();
    let mut unique = Vec::with_capacity(docs.len());
    for d in docs {
        if seen_hashes.insert(d.content_hash) {
            unique.push(d);
        }
    }
    let exact_removed = before - unique.len();

    // Stage 2: near-duplicates.
    let shingle_sets: Vec<Vec<u64>> = unique.iter().map(|d| shingle_hashes(&d.text)).collect();
    let signatures: Vec<[u64; NUM_PERMUTATIONS]> =
        shingle_sets.iter().map(|s| minhash(s)).collect();

    let mut buckets: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    let mut keep: Vec<bool> = vec![true; unique.len()];
    for i in 0..unique.len() {
        let mut duplicate_of = None;
        'bands: for band in 0..NUM_BANDS {
            let key = band_key(&signatures[i], band);
            if let Some(candidates) = buckets.get(&(band, key)) {
                for &j in candidates {
                    if keep[j]
                        && exact_jaccard(&shingle_sets[i], &shingle_sets[j]) >= jaccard_threshold
                    {
                        duplicate_of = Some(j);
                        break 'bands;
                    }
                }
            }
        }
        if duplicate_of.is_some() {
            keep[i] = false;
        } else {
            for band in 0..NUM_BANDS {
                let key = band_key(&signatures[i], band);
                buckets.entry((band, key)).or_default().push(i);
            }
        }
    }

    let near_removed = keep.iter().filter(|k| !**k).count();
    corpus.documents = unique
        .into_iter()
        .zip(keep)
        .filter_map(|(d, k)| k.then_some(d))
        .collect();

    let stats = DedupStats {
        exact_removed,
        near_removed,
        jaccard_threshold,
    };
    corpus.datasheet.dedup_stats = Some(stats);
    corpus.datasheet.record(
        format!(
            "deduplicated: removed {exact_removed} exact and {near_removed} near duplicates \
             of {before} documents"
        ),
        format!("shingle width {SHINGLE_WIDTH}, jaccard threshold {jaccard_threshold}"),
    );
    Ok(corpus)
}

/// Hashed shingle set of a document, sorted and deduplicated. Documents
/// shorter than the shingle width contribute a single whole-text shingle.
pub fn shingle_hashes(text: &[u8]) -> Vec<u64> {
    let mut hashes: Vec<u64> = if text.len() < SHINGLE_WIDTH {
        vec![fnv1a(text)]
    } else {
        text.windows(SHINGLE_WIDTH).map(fnv1a).collect()
    };
    hashes.sort_unstable();
    hashes.dedup();
    hashes
}

/// Exact Jaccard over two sorted shingle-hash sets.
pub fn exact_jaccard(a: &[u64], b: &[u64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut inter = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

fn minhash(shingles: &[u64]) -> [u64; NUM_PERMUTATIONS] {
    let mut sig = [u64::MAX; NUM_PERMUTATIONS];
    for &s in shingles {
        for (p, slot) in sig.iter_mut().enumerate() {
            // Distinct fixed permutations via multiply-xor mixing.
            let v = mix(s ^ PERM_SALTS[p]);
            if v < *slot {
                *slot = v;
            }
        }
    }
    sig
}

fn band_key(sig: &[u64; NUM_PERMUTATIONS], band: usize) -> u64 {
    let rows = NUM_PERMUTATIONS / NUM_BANDS;
    let mut acc = 0xcbf2_9ce4_8422_2325u64;
    for &v in &sig[band * rows..(band + 1) * rows] {
        acc = (acc ^ v).wrapping_mul(0x0000_0100_0000_01b3);
    }
    acc
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn mix(mut x: u64) -> u64 {
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

// Fixed salts defining the minhash permutations; generated once from the
// splitmix sequence so the pipeline is deterministic across runs and builds.
static PERM_SALTS: [u64; NUM_PERMUTATIONS] = {
    let mut salts = [0u64; NUM_PERMUTATIONS];
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut i = 0;
    while i < NUM_PERMUTATIONS {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        salts[i] = z ^ (z >> 31);
        i += 1;
    }
    salts
};
