//! Deterministic natural-text synthesizer.
//!
//! Produces the bundled sample corpus: mostly English-like prose with a
//! web-scrape flavor (numbers, dates, URLs, identifiers, the occasional hex
//! or log line), generated as one record per line from a seed. Licensing-
//! clean by construction and byte-identical across runs, which keeps every
//! downstream hash reproducible.

use crate::prf::{key_from_secret, PrfStream};

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "a", "in", "that", "is", "was", "for", "it", "with", "as", "his",
    "on", "be", "at", "by", "had", "not", "are", "but", "from", "or", "have", "an", "they",
    "which", "one", "you", "were", "her", "all", "she", "there", "would", "their", "we", "him",
    "been", "has", "when", "who", "will", "more", "no", "if", "out", "so", "said", "what", "up",
    "its", "about", "into", "than", "them", "can", "only", "other", "new", "some", "could",
    "time", "these", "two", "may", "then", "do", "first", "any", "my", "now", "such", "like",
    "our", "over", "man", "me", "even", "most", "made", "after", "also", "did", "many", "before",
    "must", "through", "years", "where", "much", "your", "way", "well", "down", "should",
    "because", "each", "just", "those", "people", "how", "too", "little", "state", "good",
    "very", "make", "world", "still", "own", "see", "men", "work", "long", "get", "here",
    "between", "both", "life", "being", "under", "never", "day", "same", "another", "know",
    "while", "last", "might", "us", "great", "old", "year", "off", "come", "since", "against",
    "go", "came", "right", "used", "take", "three", "house", "whole", "place", "water", "system",
    "found", "thought", "light", "country", "order", "part", "early", "public", "however",
    "small", "large", "general", "always", "course", "different", "number", "until", "city",
    "group", "often", "given", "within", "present", "power", "point", "church", "among",
    "called", "became", "interest", "several", "change", "second", "case", "question", "value",
    "political", "history", "common", "across", "result", "development", "information",
    "certain", "example", "although", "others", "form", "once", "level", "important", "member",
    "national", "area", "research", "social", "company", "end", "turned", "set", "held",
    "though", "themselves", "rather", "less", "means", "knowledge", "process", "land", "few",
    "market", "period", "court", "human", "open", "hand", "nature", "language", "free",
    "action", "together", "book", "study", "american", "local", "best", "either", "effect",
    "report", "department", "university", "century", "society", "modern", "science", "field",
    "theory", "data", "model", "term", "method", "energy", "increase", "production", "problem",
    "economic", "per", "law", "line", "experience", "control", "government", "side", "members",
    "due", "section", "fact", "figure", "possible", "particular", "simple", "real", "toward",
    "need", "according", "table", "special", "known", "school", "program", "further", "taken",
    "required", "women", "children", "family", "home", "community", "service", "support",
    "total", "cost", "available", "surface", "himself", "percent", "million", "analysis",
    "music", "amount", "war", "force", "road", "town", "age", "young", "building", "personal",
    "kind", "design", "ground", "subject", "density", "moment", "complete", "position",
];

/// Generate `target_bytes` of text as records (one per line).
pub fn generate_records(seed: &str, target_bytes: usize) -> Vec<Vec<u8>> {
    let key = key_from_secret(format!("textgen:{seed}").as_bytes());
    let mut rng = PrfStream::new(&key, b"records");
    let mut records = Vec::new();
    let mut produced = 0usize;
    while produced < target_bytes {
        let record = generate_record(&mut rng);
        produced += record.len();
        records.push(record);
    }
    records
}

/// Generate the same records joined into a single newline-terminated blob,
/// suitable for writing a plain-text corpus file.
pub fn generate_text(seed: &str, target_bytes: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(target_bytes + 512);
    for r in generate_records(seed, target_bytes) {
        out.extend_from_slice(&r);
    }
    out
}

fn generate_record(rng: &mut PrfStream) -> Vec<u8> {
    // Mostly prose; a slice of structured/noisy lines so that the corpus has
    // a realistic high-perplexity tail.
    let roll = rng.next_usize_below(100);
    let mut line = match roll {
        0..=89 => prose_line(rng),
        90..=93 => reference_line(rng),
        94..=96 => log_line(rng),
        97..=98 => hex_line(rng),
        _ => code_line(rng),
    };
    line.push(b'\n');
    line
}

/// Zipf-ish word draw: heavy head, long tail.
fn word(rng: &mut PrfStream) -> &'static str {
    let u = rng.next_f64();
    // Inverse-CDF of a truncated zipf over the word list.
    let n = WORDS.len() as f64;
    let idx = ((n + 1.0).powf(u) - 1.0) as usize;
    WORDS[idx.min(WORDS.len() - 1)]
}

fn prose_line(rng: &mut PrfStream) -> Vec<u8> {
    let sentences = 1 + rng.next_usize_below(3);
    let mut out = String::new();
    for s in 0..sentences {
        if s > 0 {
            out.push(' ');
        }
        let words = 5 + rng.next_usize_below(12);
        for w in 0..words {
            let token = word(rng);
            if w == 0 {
                let mut chars = token.chars();
                let first = chars.next().unwrap().to_ascii_uppercase();
                out.push(first);
                out.push_str(chars.as_str());
            } else {
                out.push(' ');
                // Occasional inline number or comma.
                match rng.next_usize_below(24) {
                    0 => {
                        out.push_str(&format!("{}", 1 + rng.next_usize_below(2000)));
                        continue;
                    }
                    1 => {
                        out.pop();
                        out.push_str(", ");
                    }
                    _ => {}
                }
                out.push_str(token);
            }
        }
        out.push('.');
    }
    out.into_bytes()
}

fn reference_line(rng: &mut PrfStream) -> Vec<u8> {
    let year = 1900 + rng.next_usize_below(126);
    let page = 1 + rng.next_usize_below(900);
    format!(
        "See {} {} ({year}), section {}.{}, page {page}.",
        capitalize(word(rng)),
        capitalize(word(rng)),
        1 + rng.next_usize_below(12),
        1 + rng.next_usize_below(20),
    )
    .into_bytes()
}

fn log_line(rng: &mut PrfStream) -> Vec<u8> {
    let status = [200usize, 200, 200, 301, 404, 500][rng.next_usize_below(6)];
    format!(
        "{:02}:{:02}:{:02} GET /{}/{}?id={} HTTP/1.1 {status} {}",
        rng.next_usize_below(24),
        rng.next_usize_below(60),
        rng.next_usize_below(60),
        word(rng),
        word(rng),
        rng.next_usize_below(100_000),
        rng.next_usize_below(40_960),
    )
    .into_bytes()
}

fn hex_line(rng: &mut PrfStream) -> Vec<u8> {
    let n = 8 + rng.next_usize_below(24);
    let mut out = String::from("blob ");
    for b in rng.bytes(n) {
        out.push_str(&format!("{b:02x}"));
    }
    out.into_bytes()
}

fn code_line(rng: &mut PrfStream) -> Vec<u8> {
    format!(
        "{}_{} = {}({}_{}, {});",
        word(rng),
        word(rng),
        word(rng),
        word(rng),
        rng.next_usize_below(10),
        rng.next_usize_below(256),
    )
    .into_bytes()
}

fn capitalize(w: &str) -> String {
    let mut chars = w.chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(generate_text("s1", 10_000), generate_text("s1", 10_000));
        assert_ne!(generate_text("s1", 10_000), generate_text("s2", 10_000));
    }

    #[test]
    fn reaches_target_size_with_line_records() {
        let text = generate_text("size", 50_000);
        assert!(text.len() >= 50_000);
        assert!(text.len() < 51_000);
        assert_eq!(*text.last().unwrap(), b'\n');
        // Lines are plausibly sized.
        let lines: Vec<&[u8]> = text.split(|&b| b == b'\n').filter(|l| !l.is_empty()).collect();
        assert!(lines.len() > 200);
        assert!(lines.iter().all(|l| l.len() < 500));
    }

    #[test]
    fn is_mostly_printable_prose() {
        let text = generate_text("prose", 20_000);
        let printable = text
            .iter()
            .filter(|b| b.is_ascii_graphic() || **b == b' ' || **b == b'\n')
            .count();
        assert_eq!(printable, text.len());
        let spaces = text.iter().filter(|&&b| b == b' ').count();
        assert!(spaces > text.len() / 12);
    }
}
