//! Offline audit of a transcript file.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::Result;
use crate::transcript::{bad_trace, parse_transcript, Entry, ParsedTranscript};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Index,
    Alternation,
    ReplyMismatch,
    RepeatedQuery,
    Consistency,
    Budget,
    Domain,
    Monotonicity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// 1-based line in the source text.
    pub line: usize,
    /// Position of the move in the file, 1-based.
    pub position: usize,
    pub rule: Rule,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub moves: usize,
    pub e_queries: u64,
    pub cipher_queries: u64,
    /// Whether the crucial pair from the header was seen, when one is given.
    pub bad_event: Option<bool>,
    pub violations: Vec<Violation>,
}

impl ReplayReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Parses and audits transcript text. Malformed lines are a parse error;
/// well-formed lines that break a rule are reported as violations.
pub fn replay_text(text: &str) -> Result<ReplayReport> {
    Ok(validate(&parse_transcript(text)?))
}

#[derive(Default)]
struct Row {
    forward: FxHashMap<u64, u64>,
    inverse: FxHashMap<u64, u64>,
}

pub fn validate(parsed: &ParsedTranscript) -> ReplayReport {
    let moves = parsed.transcript.moves();
    let header = &parsed.header;
    let mut violations = Vec::new();
    let mut flag = |pos: usize, rule: Rule, message: String| {
        violations.push(Violation {
            line: parsed.lines.get(pos).copied().unwrap_or(0),
            position: pos + 1,
            rule,
            message,
        });
    };

    let limit = |bits: u32| 1u128.checked_shl(bits).unwrap_or(u128::MAX);
    let key_limit = header.kappa.map(limit);
    let block_limit = header.n.map(limit);
    let mut queries: FxHashSet<Entry> = FxHashSet::default();
    let mut e_map: FxHashMap<u64, u64> = FxHashMap::default();
    let mut e_inv: FxHashMap<u64, u64> = FxHashMap::default();
    let mut rows: FxHashMap<u64, Row> = FxHashMap::default();
    let (mut e_queries, mut cipher_queries) = (0u64, 0u64);
    let mut open_query: Option<Entry> = None;

    for (pos, mv) in moves.iter().enumerate() {
        let entry = mv.entry;
        if mv.index != pos + 1 {
            flag(
                pos,
                Rule::Index,
                format!("move index {} where {} was expected", mv.index, pos + 1),
            );
        }

        if let Some(limit) = key_limit {
            if entry.key().is_some_and(|k| u128::from(k) >= limit) {
                flag(
                    pos,
                    Rule::Domain,
                    format!("key out of range for kappa={}", header.kappa.unwrap_or(0)),
                );
            }
        }
        if let Some(limit) = block_limit {
            let blocks: Vec<u64> = match entry {
                Entry::EQuery { x } | Entry::FQuery { x, .. } => vec![x],
                Entry::FInvQuery { y, .. } => vec![y],
                Entry::EReply { x, y } | Entry::FReply { x, y, .. } | Entry::FInvReply { x, y, .. } => vec![x, y],
            };
            if blocks.iter().any(|&b| u128::from(b) >= limit) {
                flag(
                    pos,
                    Rule::Domain,
                    format!("block out of range for n={}", header.n.unwrap_or(0)),
                );
            }
        }

        let expect_query = pos % 2 == 0;
        if entry.is_query() != expect_query {
            let what = if expect_query { "a query" } else { "a reply" };
            flag(pos, Rule::Alternation, format!("expected {what} at move {}", pos + 1));
        }

        if entry.is_query() {
            if !queries.insert(entry) {
                flag(
                    pos,
                    Rule::RepeatedQuery,
                    format!("query `{entry}` repeats an earlier one"),
                );
            }
            match entry {
                Entry::EQuery { .. } => {
                    e_queries += 1;
                    if header.q.is_some_and(|q| e_queries > q) {
                        flag(
                            pos,
                            Rule::Budget,
                            format!("E query {e_queries} exceeds q={}", header.q.unwrap_or(0)),
                        );
                    }
                }
                _ => {
                    cipher_queries += 1;
                    if header.t.is_some_and(|t| cipher_queries > t) {
                        flag(
                            pos,
                            Rule::Budget,
                            format!("cipher query {cipher_queries} exceeds t={}", header.t.unwrap_or(0)),
                        );
                    }
                }
            }
            open_query = Some(entry);
            continue;
        }

        match open_query.take() {
            Some(q) if entry.answers(&q) => {}
            Some(q) => flag(pos, Rule::ReplyMismatch, format!("`{entry}` does not answer `{q}`")),
            None => {}
        }
        let clash = match entry {
            Entry::EReply { x, y } => {
                let a = *e_map.entry(x).or_insert(y);
                let b = *e_inv.entry(y).or_insert(x);
                a != y || b != x
            }
            Entry::FReply { k, x, y } | Entry::FInvReply { k, x, y } => {
                let row = rows.entry(k).or_default();
                let a = *row.forward.entry(x).or_insert(y);
                let b = *row.inverse.entry(y).or_insert(x);
                a != y || b != x
            }
            _ => false,
        };
        if clash {
            flag(
                pos,
                Rule::Consistency,
                format!("`{entry}` contradicts an earlier answer"),
            );
        }
    }

    let bad_event = match header.crucial.as_deref() {
        Some(keys) if keys.len() == 2 => match bad_trace(&parsed.transcript, keys) {
            Ok(trace) => {
                // trace[i] is the bad event after i moves; move i sits at position i - 1
                for i in 1..trace.len() {
                    if trace[i - 1] && !trace[i] {
                        flag(i - 1, Rule::Monotonicity, format!("bad event reverts at move {i}"));
                    } else if i % 2 == 0 && trace[i] != trace[i - 1] {
                        flag(
                            i - 1,
                            Rule::Monotonicity,
                            format!("a reply changed the bad event at move {i}"),
                        );
                    }
                }
                trace.last().copied()
            }
            Err(_) => None,
        },
        _ => None,
    };

    ReplayReport {
        moves: moves.len(),
        e_queries,
        cipher_queries,
        bad_event,
        violations,
    }
}
