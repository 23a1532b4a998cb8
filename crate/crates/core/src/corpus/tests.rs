use super::*;
use crate::hash::digest;
use std::io::Write;

fn write_temp(name: &str, contents: &[u8]) -> tempfile::TempPath {
    let mut f = tempfile::Builder::new()
        .suffix(name)
        .tempfile()
        .unwrap();
    f.write_all(contents).unwrap();
    f.into_temp_path()
}

fn corpus_from(texts: &[&[u8]]) -> Corpus {
    let records = texts
        .iter()
        .map(|t| (t.to_vec(), "test://".to_string()))
        .collect();
    ingest_records("test", records, "inline", LicenseTag::Entrusted).unwrap()
}

#[test]
fn ingest_single_plain_record() {
    let path = write_temp(".txt", b"abc\n");
    let corpus = ingest("c1", &[&path], "file://x", LicenseTag::Open).unwrap();
    assert_eq!(corpus.documents.len(), 1);
    assert_eq!(corpus.total_bytes(), 4);
    assert_eq!(corpus.documents[0].text, b"abc\n");
}

#[test]
fn ingest_is_deterministic_across_corpora() {
    let path = write_temp(".txt", b"one\ntwo\nthree\n");
    let a = ingest("a", &[&path], "file://x", LicenseTag::Open).unwrap();
    let b = ingest("b", &[&path], "file://x", LicenseTag::Open).unwrap();
    assert_eq!(a.merkle_root(), b.merkle_root());
}

#[test]
fn ingest_jsonl_hashes_match_reference() {
    let jsonl = "{\"text\":\"first record\",\"uri\":\"u1\"}\n\
                 {\"text\":\"second record\"}\n\
                 {\"text\":\"third \\u00e9 record\",\"uri\":\"u3\"}\n"
        .as_bytes();
    let path = write_temp(".jsonl", jsonl);
    let corpus = ingest("j", &[&path], "file://base", LicenseTag::AllRightsReserved).unwrap();
    assert_eq!(corpus.documents.len(), 3);

    // Independent re-hash of each text field.
    let expected = [
        digest("first record".as_bytes()),
        digest("second record".as_bytes()),
        digest("third é record".as_bytes()),
    ];
    for (doc, exp) in corpus.documents.iter().zip(expected) {
        assert_eq!(doc.content_hash, exp);
    }
    let ids: std::collections::HashSet<u64> = corpus.documents.iter().map(|d| d.doc_id).collect();
    assert_eq!(ids.len(), 3);
    assert_eq!(corpus.documents[0].source_uri, "u1");
    assert_eq!(corpus.documents[1].source_uri, "file://base");
}

#[test]
fn ingest_errors() {
    let missing = std::path::Path::new("/nonexistent/nowhere.txt");
    match ingest("x", &[missing], "f", LicenseTag::Open) {
        Err(Error::UnreadableInput { path, .. }) => assert!(path.contains("nowhere.txt")),
        other => panic!("expected UnreadableInput, got {other:?}"),
    }

    let empty = write_temp(".txt", b"");
    assert!(matches!(
        ingest("x", &[&empty], "f", LicenseTag::Open),
        Err(Error::EmptyCorpus)
    ));
}

#[test]
fn dedup_removes_exact_duplicates_keeping_first() {
    let corpus = corpus_from(&[b"same text here", b"same text here", b"different"]);
    let first_id = corpus.documents[0].doc_id;
    let out = dedup(corpus, 0.8).unwrap();
    assert_eq!(out.documents.len(), 2);
    assert_eq!(out.documents[0].doc_id, first_id);
    assert_eq!(out.datasheet.dedup_stats.unwrap().exact_removed, 1);
}

/// Brute-force Jaccard over all 8-byte shingles, the independent oracle.
fn brute_force_jaccard(a: &[u8], b: &[u8]) -> f64 {
    use std::collections::HashSet;
    let shingles = |t: &[u8]| -> HashSet<Vec<u8>> {
        if t.len() < SHINGLE_WIDTH_TEST {
            return std::iter::once(t.to_vec()).collect();
        }
        t.windows(SHINGLE_WIDTH_TEST).map(|w| w.to_vec()).collect()
    };
    let (sa, sb) = (shingles(a), shingles(b));
    let inter = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    inter as f64 / union as f64
}

const SHINGLE_WIDTH_TEST: usize = crate::config::SHINGLE_WIDTH;

#[test]
fn near_dup_decision_matches_brute_force() {
    let a: &[u8] = b"aaaaaaaaX";
    let b: &[u8] = b"aaaaaaaaY";
    let oracle = brute_force_jaccard(a, b); // 1/3: {aaaaaaaa} shared of 3 shingles
    assert!((oracle - 1.0 / 3.0).abs() < 1e-12);

    let corpus = corpus_from(&[a, b]);
    let out = dedup(corpus, 0.5).unwrap();
    let expect_removed = oracle >= 0.5;
    assert_eq!(out.documents.len(), if expect_removed { 1 } else { 2 });

    // And a pair the oracle says IS a near-duplicate at 0.5.
    let c = b"the quick brown fox jumps over the lazy dog again and again";
    let d = b"the quick brown fox jumps over the lazy dog again and agaiN";
    let oracle_cd = brute_force_jaccard(c, d);
    assert!(oracle_cd >= 0.5, "oracle jaccard = {oracle_cd}");
    let out = dedup(corpus_from(&[c, d]), 0.5).unwrap();
    assert_eq!(out.documents.len(), 1);
}

#[test]
fn disjoint_texts_survive_high_threshold() {
    let corpus = corpus_from(&[b"entirely one thing", b"QUITE ANOTHER MATTER"]);
    let out = dedup(corpus, 0.99).unwrap();
    assert_eq!(out.documents.len(), 2);
}

#[test]
fn dedup_is_idempotent() {
    let corpus = corpus_from(&[
        b"one common line of text here",
        b"one common line of text herE",
        b"one common line of text here",
        b"something else entirely different",
    ]);
    let once = dedup(corpus, 0.5).unwrap();
    let twice = dedup(once.clone(), 0.5).unwrap();
    let ids = |c: &Corpus| c.documents.iter().map(|d| d.doc_id).collect::<Vec<_>>();
    assert_eq!(ids(&once), ids(&twice));
}

#[test]
fn dedup_threshold_validation_and_empty_pass_through() {
    let corpus = corpus_from(&[b"solo"]);
    assert!(dedup(corpus.clone(), 0.0).is_err());
    assert!(dedup(corpus.clone(), 1.5).is_err());
    let out = dedup(corpus, 1.0).unwrap();
    assert_eq!(out.documents.len(), 1);
}

#[test]
fn scan_finds_planted_eval_item() {
    let evalset = EvalSet::new("ev", vec![b"THE-SECRET-EVAL-QUESTION".to_vec()]);
    let corpus = corpus_from(&[
        b"nothing of note in this document at all",
        b"prefix text THE-SECRET-EVAL-QUESTION suffix text",
        b"another clean document",
    ]);
    let report = scan_eval_leakage(&corpus, &evalset, 16).unwrap();
    assert!(!report.is_clean());
    assert_eq!(report.flagged_docs(), vec![corpus.documents[1].doc_id]);
    // First match offset = where the planted item begins.
    assert_eq!(report.matches[0].offset, "prefix text ".len());
}

#[test]
fn scan_disjoint_alphabets_is_clean() {
    let evalset = EvalSet::new("ev", vec![b"0123456789012345678901234".to_vec()]);
    let corpus = corpus_from(&[b"purely alphabetic words without digits anywhere"]);
    let report = scan_eval_leakage(&corpus, &evalset, 8).unwrap();
    assert!(report.is_clean());
}

#[test]
fn scan_parameter_errors() {
    let evalset = EvalSet::new("ev", vec![b"short item".to_vec()]);
    let corpus = corpus_from(&[b"whatever text"]);
    assert!(scan_eval_leakage(&corpus, &evalset, 4).is_err()); // window < 8
    assert!(scan_eval_leakage(&corpus, &evalset, 64).is_err()); // longer than every item
}

/// Naive O(n·m) substring oracle.
fn naive_scan(corpus: &Corpus, eval: &EvalSet, window: usize) -> Vec<(u64, usize)> {
    let mut hits = Vec::new();
    for doc in &corpus.documents {
        if doc.text.len() < window {
            continue;
        }
        for (off, w) in doc.text.windows(window).enumerate() {
            let matched = eval
                .items
                .iter()
                .any(|item| item.len() >= window && item.windows(window).any(|ew| ew == w));
            if matched {
                hits.push((doc.doc_id, off));
            }
        }
    }
    hits.sort_unstable();
    hits
}

#[test]
fn scan_agrees_with_naive_oracle() {
    // Overlapping repetitive text exercises multi-match and window overlap paths.
    let corpus = corpus_from(&[
        b"abcabcabcabcabcabc and then some other text",
        b"xyzxyzxyzxyz nothing relevant",
        b"the planted needle abcabcabcabc appears here too",
    ]);
    let evalset = EvalSet::new("ev", vec![b"abcabcabcabcabc".to_vec()]);
    let report = scan_eval_leakage(&corpus, &evalset, 9).unwrap();
    let got: Vec<(u64, usize)> = report.matches.iter().map(|m| (m.doc_id, m.offset)).collect();
    assert_eq!(got, naive_scan(&corpus, &evalset, 9));
    assert!(!got.is_empty());
}

#[test]
fn partition_safety_flows() {
    let corpus = corpus_from(&[b"doc one text", b"doc two text", b"doc three text"]);
    let decisions_before = corpus.datasheet.decisions.len();
    let flagged: BTreeSet<u64> = [corpus.documents[1].doc_id].into();
    let out = partition_safety(corpus, &flagged, "manual review").unwrap();
    assert_eq!(out.licensable_documents().count(), 2);
    assert_eq!(out.documents.len(), 3); // flagged doc kept, just partitioned
    assert_eq!(out.datasheet.decisions.len(), decisions_before + 1);

    // Flag none: unchanged view, one more datasheet entry.
    let n = out.datasheet.decisions.len();
    let out = partition_safety(out, &BTreeSet::new(), "routine audit").unwrap();
    assert_eq!(out.licensable_documents().count(), 2);
    assert_eq!(out.datasheet.decisions.len(), n + 1);

    // Flag all: empty licensable view plus a warning in the decision.
    let all = out.doc_ids();
    let out = partition_safety(out, &all, "total recall").unwrap();
    assert_eq!(out.licensable_documents().count(), 0);
    assert!(out
        .datasheet
        .decisions
        .last()
        .unwrap()
        .decision
        .contains("warning"));
}

#[test]
fn partition_unknown_id_errors() {
    let corpus = corpus_from(&[b"only doc"]);
    let bogus: BTreeSet<u64> = [0xdead_beefu64].into();
    assert!(matches!(
        partition_safety(corpus, &bogus, "oops"),
        Err(Error::UnknownDocument(0xdead_beef))
    ));
}

#[test]
fn datasheet_renders_for_all_sizes() {
    // Size 0 is unreachable through ingest (empty input errors), so build the
    // degenerate corpus directly.
    let empty = Corpus {
        corpus_id: "empty".into(),
        documents: vec![],
        datasheet: Datasheet::default(),
        safety_partition: BTreeSet::new(),
    };
    assert!(emit_datasheet(&empty).contains("documents: 0"));

    let one = corpus_from(&[b"single"]);
    assert!(emit_datasheet(&one).contains("documents: 1"));

    let texts: Vec<Vec<u8>> = (0..1000).map(|i| format!("document number {i}").into_bytes()).collect();
    let refs: Vec<&[u8]> = texts.iter().map(|t| t.as_slice()).collect();
    let big = corpus_from(&refs);
    let md = emit_datasheet(&big);
    assert!(md.contains("documents: 1000"));
    for e in &big.datasheet.decisions {
        assert!(md.contains(&e.decision));
    }
}

#[test]
fn merkle_root_changes_iff_any_byte_changes() {
    let corpus = corpus_from(&[b"alpha beta", b"gamma delta"]);
    let root = corpus.merkle_root();
    for doc_idx in 0..corpus.documents.len() {
        for byte_idx in 0..corpus.documents[doc_idx].text.len() {
            let mut mutated = corpus.clone();
            mutated.documents[doc_idx].text[byte_idx] ^= 0x01;
            mutated.documents[doc_idx].content_hash =
                digest(&mutated.documents[doc_idx].text);
            assert_ne!(mutated.merkle_root(), root, "flip at doc {doc_idx} byte {byte_idx}");
        }
    }
    // And unchanged content keeps the root.
    assert_eq!(corpus.clone().merkle_root(), root);
}

#[test]
fn eval_set_hash_binds_items() {
    let mut ev = EvalSet::new("e", vec![b"item-a".to_vec(), b"item-b".to_vec()]);
    assert!(ev.verify_binding());
    ev.items[0][0] ^= 1;
    assert!(!ev.verify_binding());
}

#[test]
fn manifest_round_trips_json() {
    let corpus = corpus_from(&[b"first doc", b"second doc"]);
    let manifest = corpus.manifest();
    let json = serde_json::to_string_pretty(&manifest).unwrap();
    let back: CorpusManifest = serde_json::from_str(&json).unwrap();
    assert_eq!(back.merkle_root, corpus.merkle_root());
    assert_eq!(back.documents.len(), 2);
}
