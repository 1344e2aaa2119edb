//! The adversary's view: an alternating list of query and reply moves, plus
//! the seen-key-pair analysis built on top of it.
//!
//! Text format, one move per line, values in lowercase hex, `-` for the
//! field a query leaves open:
//!
//! ```text
//! # kappa=4 n=8 q=2 t=16
//! 1 E 0 -
//! 2 E 0 3a
//! 3 F 1 0 -
//! 4 F 1 0 7f
//! 5 I 2 - 3a
//! 6 I 2 11 3a
//! ```
//!
//! `E x y` is an `E` query/reply, `F k x y` a forward cipher query/reply and
//! `I k x y` an inverse one. Comment lines start with `#`; `key=value`
//! tokens on comment lines form the header.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    EQuery { x: u64 },
    EReply { x: u64, y: u64 },
    FQuery { k: u64, x: u64 },
    FReply { k: u64, x: u64, y: u64 },
    FInvQuery { k: u64, y: u64 },
    FInvReply { k: u64, x: u64, y: u64 },
}

impl Entry {
    pub fn is_query(&self) -> bool {
        matches!(
            self,
            Entry::EQuery { .. } | Entry::FQuery { .. } | Entry::FInvQuery { .. }
        )
    }

    /// Key of a cipher query or reply.
    pub fn key(&self) -> Option<u64> {
        match *self {
            Entry::FQuery { k, .. }
            | Entry::FReply { k, .. }
            | Entry::FInvQuery { k, .. }
            | Entry::FInvReply { k, .. } => Some(k),
            _ => None,
        }
    }

    /// Key of an `F`/`F^-1` query move; replies do not count.
    pub fn queried_key(&self) -> Option<u64> {
        match *self {
            Entry::FQuery { k, .. } | Entry::FInvQuery { k, .. } => Some(k),
            _ => None,
        }
    }

    /// Whether `self` (a reply) answers `query`.
    pub fn answers(&self, query: &Entry) -> bool {
        match (*query, *self) {
            (Entry::EQuery { x }, Entry::EReply { x: rx, .. }) => x == rx,
            (Entry::FQuery { k, x }, Entry::FReply { k: rk, x: rx, .. }) => k == rk && x == rx,
            (Entry::FInvQuery { k, y }, Entry::FInvReply { k: rk, y: ry, .. }) => k == rk && y == ry,
            _ => false,
        }
    }

    fn tag(&self) -> char {
        match self {
            Entry::EQuery { .. } | Entry::EReply { .. } => 'E',
            Entry::FQuery { .. } | Entry::FReply { .. } => 'F',
            Entry::FInvQuery { .. } | Entry::FInvReply { .. } => 'I',
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = self.tag();
        match *self {
            Entry::EQuery { x } => write!(f, "{tag} {x:x} -"),
            Entry::EReply { x, y } => write!(f, "{tag} {x:x} {y:x}"),
            Entry::FQuery { k, x } => write!(f, "{tag} {k:x} {x:x} -"),
            Entry::FInvQuery { k, y } => write!(f, "{tag} {k:x} - {y:x}"),
            Entry::FReply { k, x, y } | Entry::FInvReply { k, x, y } => write!(f, "{tag} {k:x} {x:x} {y:x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    /// 1-based; queries sit at odd indices, replies at even ones.
    pub index: usize,
    pub entry: Entry,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    moves: Vec<Move>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps moves as given, without checking alternation. Use
    /// [`crate::replay::validate`] to audit the result.
    pub fn from_moves(moves: Vec<Move>) -> Self {
        Self { moves }
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Number of moves (twice the number of rounds for a well-formed view).
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub(crate) fn push_round(&mut self, query: Entry, reply: Entry) {
        debug_assert!(query.is_query() && !reply.is_query() && reply.answers(&query));
        let next = self.moves.len() + 1;
        self.moves.push(Move {
            index: next,
            entry: query,
        });
        self.moves.push(Move {
            index: next + 1,
            entry: reply,
        });
    }

    fn check_upto(&self, upto: usize) -> Result<()> {
        if upto > self.moves.len() {
            Err(Error::MoveIndex {
                index: upto,
                len: self.moves.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Keys used by some `F`/`F^-1` query among the first `upto` moves.
    pub fn seen_keys(&self, upto: usize) -> Result<BTreeSet<u64>> {
        self.check_upto(upto)?;
        Ok(self.moves[..upto]
            .iter()
            .filter_map(|m| m.entry.queried_key())
            .collect())
    }

    pub fn e_queries(&self) -> usize {
        self.moves
            .iter()
            .filter(|m| matches!(m.entry, Entry::EQuery { .. }))
            .count()
    }

    pub fn cipher_queries(&self) -> usize {
        self.moves.iter().filter(|m| m.entry.queried_key().is_some()).count()
    }

    pub fn to_text(&self, header: &TranscriptHeader) -> String {
        let mut out = String::new();
        let head = header.to_string();
        if !head.is_empty() {
            writeln!(out, "# {head}").unwrap();
        }
        for m in &self.moves {
            writeln!(out, "{} {}", m.index, m.entry).unwrap();
        }
        out
    }
}

/// All `(k1, k2)` such that both keys appear in some `F`/`F^-1` query.
pub fn seen_key_pairs(tr: &Transcript) -> BTreeSet<(u64, u64)> {
    seen_key_pairs_upto(tr, tr.len()).expect("full length is in range")
}

pub fn seen_key_pairs_upto(tr: &Transcript, upto: usize) -> Result<BTreeSet<(u64, u64)>> {
    let keys = tr.seen_keys(upto)?;
    Ok(keys.iter().flat_map(|&a| keys.iter().map(move |&b| (a, b))).collect())
}

/// Tuple form of the seen test: every component of `keys` has been queried
/// within the first `upto` moves. Two components give SKP membership.
pub fn is_seen_tuple(tr: &Transcript, upto: usize, keys: &[u64]) -> Result<bool> {
    let seen = tr.seen_keys(upto)?;
    Ok(keys.iter().all(|k| seen.contains(k)))
}

/// Complement of [`seen_key_pairs_upto`] membership.
pub fn is_remaining_pair(tr: &Transcript, upto: usize, pair: (u64, u64)) -> Result<bool> {
    Ok(!is_seen_tuple(tr, upto, &[pair.0, pair.1])?)
}

/// Whether the crucial key pair has been seen after `upto` moves.
pub fn bad_event(tr: &Transcript, crucial: &[u64], upto: usize) -> Result<bool> {
    if crucial.len() != 2 {
        return Err(Error::config(format!(
            "bad event is defined for two crucial keys, got {}",
            crucial.len()
        )));
    }
    is_seen_tuple(tr, upto, crucial)
}

/// `bad_0, bad_1, ..., bad_len`.
pub fn bad_trace(tr: &Transcript, crucial: &[u64]) -> Result<Vec<bool>> {
    if crucial.len() != 2 {
        return Err(Error::config("bad event is defined for two crucial keys"));
    }
    let mut seen = BTreeSet::new();
    let mut trace = Vec::with_capacity(tr.len() + 1);
    trace.push(false);
    for m in tr.moves() {
        if let Some(k) = m.entry.queried_key() {
            seen.insert(k);
        }
        trace.push(seen.contains(&crucial[0]) && seen.contains(&crucial[1]));
    }
    Ok(trace)
}

/// Optional metadata carried in `#` lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranscriptHeader {
    pub kappa: Option<u32>,
    pub n: Option<u32>,
    pub q: Option<u64>,
    pub t: Option<u64>,
    pub crucial: Option<Vec<u64>>,
}

impl fmt::Display for TranscriptHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(v) = self.kappa {
            parts.push(format!("kappa={v}"));
        }
        if let Some(v) = self.n {
            parts.push(format!("n={v}"));
        }
        if let Some(v) = self.q {
            parts.push(format!("q={v}"));
        }
        if let Some(v) = self.t {
            parts.push(format!("t={v}"));
        }
        if let Some(keys) = &self.crucial {
            let hex: Vec<String> = keys.iter().map(|k| format!("{k:x}")).collect();
            parts.push(format!("crucial={}", hex.join(",")));
        }
        f.write_str(&parts.join(" "))
    }
}

/// A parsed transcript file; `lines[i]` is the 1-based source line of move `i`.
#[derive(Clone, Debug, Default)]
pub struct ParsedTranscript {
    pub header: TranscriptHeader,
    pub transcript: Transcript,
    pub lines: Vec<usize>,
}

fn parse_hex(tok: &str, line: usize) -> Result<u64> {
    let digits = tok.strip_prefix("0x").unwrap_or(tok);
    u64::from_str_radix(digits, 16).map_err(|_| Error::Parse {
        line,
        message: format!("bad hex value {tok:?}"),
    })
}

fn parse_opt_hex(tok: &str, line: usize) -> Result<Option<u64>> {
    if tok == "-" {
        Ok(None)
    } else {
        parse_hex(tok, line).map(Some)
    }
}

fn parse_header_tokens(body: &str, line: usize, header: &mut TranscriptHeader) -> Result<()> {
    let bad = |message: String| Error::Parse { line, message };
    for tok in body.split_whitespace() {
        let Some((key, value)) = tok.split_once('=') else {
            continue;
        };
        match key {
            "kappa" => header.kappa = Some(value.parse().map_err(|_| bad(format!("bad kappa {value:?}")))?),
            "n" => header.n = Some(value.parse().map_err(|_| bad(format!("bad n {value:?}")))?),
            "q" => header.q = Some(value.parse().map_err(|_| bad(format!("bad q {value:?}")))?),
            "t" => header.t = Some(value.parse().map_err(|_| bad(format!("bad t {value:?}")))?),
            "crucial" => {
                let keys = value
                    .split(',')
                    .map(|v| parse_hex(v, line))
                    .collect::<Result<Vec<_>>>()?;
                header.crucial = Some(keys);
            }
            _ => {}
        }
    }
    Ok(())
}

fn parse_move(body: &str, line: usize) -> Result<Move> {
    let toks: Vec<&str> = body.split_whitespace().collect();
    let bad = |message: String| Error::Parse { line, message };
    if toks.len() < 2 {
        return Err(bad(format!("expected `index tag fields...`, got {body:?}")));
    }
    let index: usize = toks[0]
        .parse()
        .map_err(|_| bad(format!("bad move index {:?}", toks[0])))?;
    let fields = &toks[2..];
    let arity = |want: usize| {
        if fields.len() == want {
            Ok(())
        } else {
            Err(bad(format!(
                "{} move needs {want} fields, got {}",
                toks[1],
                fields.len()
            )))
        }
    };
    let entry = match toks[1] {
        "E" => {
            arity(2)?;
            let x = parse_hex(fields[0], line)?;
            match parse_opt_hex(fields[1], line)? {
                None => Entry::EQuery { x },
                Some(y) => Entry::EReply { x, y },
            }
        }
        "F" => {
            arity(3)?;
            let k = parse_hex(fields[0], line)?;
            let x = parse_hex(fields[1], line)?;
            match parse_opt_hex(fields[2], line)? {
                None => Entry::FQuery { k, x },
                Some(y) => Entry::FReply { k, x, y },
            }
        }
        "I" => {
            arity(3)?;
            let k = parse_hex(fields[0], line)?;
            let y = parse_hex(fields[2], line)?;
            match parse_opt_hex(fields[1], line)? {
                None => Entry::FInvQuery { k, y },
                Some(x) => Entry::FInvReply { k, x, y },
            }
        }
        other => return Err(bad(format!("unknown oracle tag {other:?}"))),
    };
    Ok(Move { index, entry })
}

/// Parses the text format. Syntax errors carry their line number;
/// semantic problems (alternation, budgets) are left to replay validation.
pub fn parse_transcript(text: &str) -> Result<ParsedTranscript> {
    let mut parsed = ParsedTranscript::default();
    let mut moves = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(comment) = body.strip_prefix('#') {
            parse_header_tokens(comment, line, &mut parsed.header)?;
            continue;
        }
        moves.push(parse_move(body, line)?);
        parsed.lines.push(line);
    }
    parsed.transcript = Transcript::from_moves(moves);
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        let mut tr = Transcript::new();
        tr.push_round(Entry::EQuery { x: 0 }, Entry::EReply { x: 0, y: 0x3a });
        tr.push_round(Entry::FQuery { k: 1, x: 0 }, Entry::FReply { k: 1, x: 0, y: 0x7f });
        tr.push_round(
            Entry::FInvQuery { k: 2, y: 0x3a },
            Entry::FInvReply { k: 2, x: 0x11, y: 0x3a },
        );
        tr
    }

    #[test]
    fn empty_transcript_sees_nothing() {
        let tr = Transcript::new();
        assert!(seen_key_pairs(&tr).is_empty());
        assert!(!bad_event(&tr, &[0, 0], 0).unwrap());
    }

    #[test]
    fn single_key_pairs_with_itself() {
        let mut tr = Transcript::new();
        tr.push_round(Entry::FQuery { k: 3, x: 0 }, Entry::FReply { k: 3, x: 0, y: 1 });
        tr.push_round(Entry::FQuery { k: 3, x: 1 }, Entry::FReply { k: 3, x: 1, y: 0 });
        assert_eq!(seen_key_pairs(&tr), BTreeSet::from([(3, 3)]));
    }

    #[test]
    fn two_keys_give_four_pairs() {
        let tr = sample();
        assert_eq!(seen_key_pairs(&tr), BTreeSet::from([(1, 1), (1, 2), (2, 1), (2, 2)]));
        assert!(is_remaining_pair(&tr, tr.len(), (0, 1)).unwrap());
        assert!(!is_remaining_pair(&tr, tr.len(), (2, 1)).unwrap());
    }

    #[test]
    fn bad_event_follows_queries() {
        let tr = sample();
        let crucial = [2, 1];
        let trace = bad_trace(&tr, &crucial).unwrap();
        assert_eq!(trace, vec![false, false, false, false, false, true, true]);
        for (i, &b) in trace.iter().enumerate() {
            assert_eq!(bad_event(&tr, &crucial, i).unwrap(), b);
        }
        assert!(matches!(bad_event(&tr, &crucial, 7), Err(Error::MoveIndex { .. })));
        assert!(bad_event(&tr, &[1], 2).is_err());
    }

    #[test]
    fn text_round_trip() {
        let tr = sample();
        let header = TranscriptHeader {
            kappa: Some(4),
            n: Some(8),
            q: Some(2),
            t: Some(16),
            crucial: Some(vec![1, 0xa]),
        };
        let text = tr.to_text(&header);
        assert!(text.starts_with("# kappa=4 n=8 q=2 t=16 crucial=1,a\n1 E 0 -\n2 E 0 3a\n"));
        assert!(text.contains("5 I 2 - 3a\n6 I 2 11 3a\n"));
        let parsed = parse_transcript(&text).unwrap();
        assert_eq!(parsed.header, header);
        assert_eq!(parsed.transcript, tr);
        assert_eq!(parsed.lines, vec![2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn parse_errors_report_lines() {
        let err = parse_transcript("1 E 0 -\n2 E zz 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_transcript("\n\n1 Q 0 -\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_transcript("1 F 0 -\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_text_is_empty_view() {
        let p = parse_transcript("").unwrap();
        assert!(p.transcript.is_empty());
    }
}
