//! Controlled-language query parser.
//!
//! Recognized turns (case-insensitive, trailing punctuation ignored):
//!
//! ```text
//! is there a <TYPE> [from <CITY>] to <CITY> [before|after <TIME>]
//! which is the (earliest|latest) one
//! which is the (earliest|latest) <TYPE>
//! ```
//!
//! `<TIME>` is `7am`, `715am`, `1pm`, `1130pm` or bare 24-hour digits
//! (`0700`, `1330`).

use thiserror::Error;

use crate::dialogue::Selector;
use crate::kb::{ClockTime, KnowledgeBase, Symbol, Value};
use crate::query::{Constraint, QueryElement, QueryFrame, Relation};

/// Grammar summary shown to users.
pub const GRAMMAR: &str = "\
is there a <TYPE> [from <CITY>] to <CITY> [before|after <TIME>]
which is the (earliest|latest) one
which is the (earliest|latest) <TYPE>
<TIME>: 7am, 715am, 1pm, 130pm, 12am (midnight), 12pm (noon), or 24-hour digits such as 0715";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedTurn {
    Query {
        type_symbol: Symbol,
        destination: String,
        origin: Option<String>,
        time: Option<(Relation, ClockTime)>,
    },
    Elaborate(Selector),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("could not understand {text:?}; expected: {hint}")]
    Unparseable { text: String, hint: String },
    #[error("unknown city {0:?}")]
    UnknownCity(String),
}

const QUERY_PATTERN: &str = "is there a <TYPE> [from <CITY>] to <CITY> [before|after <TIME>]";
const ELABORATE_PATTERN: &str = "which is the (earliest|latest) one";

fn unparseable(text: &str, hint: &str) -> ParseError {
    ParseError::Unparseable {
        text: text.to_string(),
        hint: hint.to_string(),
    }
}

/// Nearest pattern by leading-word overlap.
fn nearest_hint(words: &[String]) -> &'static str {
    let overlap = |pattern: &str| {
        pattern
            .split_whitespace()
            .zip(words)
            .take_while(|(p, w)| *p == w.as_str())
            .count()
    };
    if overlap(ELABORATE_PATTERN) > overlap(QUERY_PATTERN) {
        ELABORATE_PATTERN
    } else {
        QUERY_PATTERN
    }
}

pub fn parse_turn(text: &str) -> Result<ParsedTurn, ParseError> {
    let trimmed = text
        .trim()
        .trim_end_matches(['?', '.', '!', ',', ';', ':'])
        .trim_end();
    let original: Vec<&str> = trimmed.split_whitespace().collect();
    let words: Vec<String> = original.iter().map(|w| w.to_lowercase()).collect();
    let fail = || unparseable(text, nearest_hint(&words));

    match words.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["which", "is", "the", sel, rest @ ..] if rest.len() == 1 => {
            let selector = match *sel {
                "earliest" => Selector::Earliest,
                "latest" => Selector::Latest,
                _ => return Err(fail()),
            };
            if crate::kb::is_identifier(rest[0]) {
                Ok(ParsedTurn::Elaborate(selector))
            } else {
                Err(fail())
            }
        }
        ["is", "there", "a" | "an", type_word, rest @ ..] => {
            if !crate::kb::is_identifier(type_word) {
                return Err(fail());
            }
            let tail = &original[4..];
            parse_query_tail(rest, tail)
                .map(|(origin, destination, time)| ParsedTurn::Query {
                    type_symbol: Symbol::new(*type_word),
                    destination,
                    origin,
                    time,
                })
                .ok_or_else(fail)
        }
        _ => Err(fail()),
    }
}

type QueryTail = (Option<String>, String, Option<(Relation, ClockTime)>);

/// `[from CITY] to CITY [before|after TIME]`, with `lower` the lowercased
/// words and `original` the same words as typed.
fn parse_query_tail(lower: &[&str], original: &[&str]) -> Option<QueryTail> {
    let keyword = |w: &str| matches!(w, "from" | "to" | "before" | "after");
    let city_end = |start: usize| {
        (start..lower.len())
            .find(|&i| keyword(lower[i]))
            .unwrap_or(lower.len())
    };
    let mut i = 0;
    let mut origin = None;
    if lower.first() == Some(&"from") {
        let end = city_end(1);
        if end == 1 {
            return None;
        }
        origin = Some(original[1..end].join(" "));
        i = end;
    }
    if lower.get(i) != Some(&"to") {
        return None;
    }
    let end = city_end(i + 1);
    if end == i + 1 {
        return None;
    }
    let destination = original[i + 1..end].join(" ");
    i = end;

    let time = match &lower[i..] {
        [] => None,
        [rel, time @ ..] if matches!(*rel, "before" | "after") && !time.is_empty() => {
            let relation = if *rel == "before" { Relation::Lt } else { Relation::Gt };
            Some((relation, parse_time(&time.concat())?))
        }
        _ => return None,
    };
    Some((origin, destination, time))
}

/// `7am` → 0700, `715am` → 0715, `12am` → 0000, `12pm` → 1200, `1330` → 1330.
pub fn parse_time(word: &str) -> Option<ClockTime> {
    let word = word.to_ascii_lowercase();
    let (digits, meridiem) = if let Some(d) = word.strip_suffix("am") {
        (d, Some(false))
    } else if let Some(d) = word.strip_suffix("pm") {
        (d, Some(true))
    } else {
        (word.as_str(), None)
    };
    if digits.is_empty() || digits.len() > 4 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u16 = digits.parse().ok()?;
    match meridiem {
        None if digits.len() >= 3 => ClockTime::from_hhmm(n),
        None => None,
        Some(pm) => {
            let (hour, minutes) = if digits.len() <= 2 { (n, 0) } else { (n / 100, n % 100) };
            if !(1..=12).contains(&hour) {
                return None;
            }
            let hour24 = match (hour, pm) {
                (12, false) => 0,
                (12, true) => 12,
                (h, false) => h,
                (h, true) => h + 12,
            };
            ClockTime::from_hm(hour24, minutes)
        }
    }
}

/// Session-level defaults the user may leave implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionDefaults {
    pub home_city: String,
}

impl Default for SessionDefaults {
    fn default() -> Self {
        SessionDefaults {
            home_city: "Sydney".to_string(),
        }
    }
}

fn resolve_city(kb: &KnowledgeBase, name: &str) -> Result<Value, ParseError> {
    kb.find_by_name(&Symbol::new("city"), name)
        .map(Value::EntityRef)
        .ok_or_else(|| ParseError::UnknownCity(name.to_string()))
}

/// Build the six-row frame: entity, type, startpoint, endpoint, starttime,
/// endtime. A missing origin defaults to the session's home city.
pub fn frame_from_parse(
    parsed: &ParsedTurn,
    kb: &KnowledgeBase,
    defaults: &SessionDefaults,
) -> Result<QueryFrame, ParseError> {
    let ParsedTurn::Query {
        type_symbol,
        destination,
        origin,
        time,
    } = parsed
    else {
        return Err(unparseable("", QUERY_PATTERN));
    };
    let origin = resolve_city(kb, origin.as_deref().unwrap_or(&defaults.home_city))?;
    let destination = resolve_city(kb, destination)?;
    let starttime = time.map(|(relation, t)| match relation {
        Relation::Gt => Constraint::after(t),
        _ => Constraint::before(t),
    });
    Ok(QueryFrame::new(vec![
        QueryElement::new("entity", "E", None),
        QueryElement::new("type", "T", Some(Constraint::eq(Value::Symbol(type_symbol.clone())))),
        QueryElement::new("startpoint", "C1", Some(Constraint::eq(origin))),
        QueryElement::new("endpoint", "C2", Some(Constraint::eq(destination))),
        QueryElement::new("starttime", "T1", starttime),
        QueryElement::new("endtime", "T2", None),
    ])
    .expect("six-row frame is well formed"))
}
