//! Entity/property knowledge base in the Prolog-style fact format.
//!
//! A knowledge base file is a sequence of lines, each either blank, a `%`
//! comment, an `entity(id).` declaration, or a `property(id, attr, value).`
//! fact:
//!
//! ```text
//! entity(qf400).
//! property(qf400, type, flight).
//! property(qf400, name, "QF400").
//! property(qf400, starttime, 0715).
//! ```
//!
//! Attributes are functional: each `(subject, attribute)` pair carries at most
//! one value. Declaration order is kept and used as the canonical iteration
//! order everywhere.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier token: ASCII letters, digits and underscore, starting with a letter.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        EntityId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId::new(s)
    }
}

/// An attribute name or an unquoted constant such as `flight`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(s: impl Into<String>) -> Self {
        Symbol(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl PartialEq<str> for Symbol {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Symbol {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Wall-clock time stored as the HHMM integer (`0715` is `715`).
///
/// Integer order on the HHMM value coincides with chronological order because
/// the minutes part is always below 60.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClockTime(u16);

impl ClockTime {
    pub fn from_hhmm(hhmm: u16) -> Option<Self> {
        (hhmm / 100 <= 23 && hhmm % 100 <= 59).then_some(ClockTime(hhmm))
    }

    pub fn from_hm(hours: u16, minutes: u16) -> Option<Self> {
        if hours > 23 || minutes > 59 {
            return None;
        }
        Some(ClockTime(hours * 100 + minutes))
    }

    pub fn hhmm(self) -> u16 {
        self.0
    }

    pub fn hours(self) -> u16 {
        self.0 / 100
    }

    pub fn minutes(self) -> u16 {
        self.0 % 100
    }

    pub fn minutes_since_midnight(self) -> u16 {
        self.hours() * 60 + self.minutes()
    }

    /// Four-digit zero-padded form, e.g. `0800`.
    pub fn padded(self) -> String {
        format!("{:04}", self.0)
    }
}

/// Prints the bare HHMM integer (`715`, `830`).
impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Value {
    EntityRef(EntityId),
    Text(String),
    ClockTime(ClockTime),
    Symbol(Symbol),
}

impl Value {
    pub fn symbol(s: &str) -> Self {
        Value::Symbol(Symbol::new(s))
    }

    pub fn entity(id: &str) -> Self {
        Value::EntityRef(EntityId::new(id))
    }

    pub fn text(s: &str) -> Self {
        Value::Text(s.to_string())
    }

    /// Panics on an invalid HHMM value; meant for literals.
    pub fn clock(hhmm: u16) -> Self {
        Value::ClockTime(ClockTime::from_hhmm(hhmm).expect("valid HHMM literal"))
    }

    pub fn as_clock(&self) -> Option<ClockTime> {
        match self {
            Value::ClockTime(t) => Some(*t),
            _ => None,
        }
    }

    pub fn as_entity(&self) -> Option<&EntityId> {
        match self {
            Value::EntityRef(e) => Some(e),
            _ => None,
        }
    }
}

/// Renders the value the way it would be written in a query:
/// entity ids and symbols bare, text quoted, times as the bare integer.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::EntityRef(e) => write!(f, "{e}"),
            Value::Text(s) => write!(f, "\"{s}\""),
            Value::ClockTime(t) => write!(f, "{t}"),
            Value::Symbol(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub subject: EntityId,
    pub attribute: Symbol,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: entity `{entity}` used as a subject before it is declared")]
    UndeclaredEntity { line: usize, entity: String },
    #[error("line {line}: entity `{entity}` declared twice")]
    DuplicateEntity { line: usize, entity: String },
    #[error("line {line}: duplicate fact for ({subject}, {attribute})")]
    DuplicateFact {
        line: usize,
        subject: String,
        attribute: String,
    },
    #[error("line {line}, column {column}: malformed clock time `{lexeme}`")]
    MalformedClockTime {
        line: usize,
        column: usize,
        lexeme: String,
    },
}

/// Immutable, validated fact store.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    entities: Vec<EntityId>,
    facts: Vec<Fact>,
    index: HashMap<(EntityId, Symbol), usize>,
    by_subject: HashMap<EntityId, Vec<usize>>,
}

impl KnowledgeBase {
    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn contains(&self, entity: &EntityId) -> bool {
        self.by_subject.contains_key(entity)
    }

    pub fn lookup(&self, subject: &EntityId, attribute: &Symbol) -> Option<&Value> {
        self.index
            .get(&(subject.clone(), attribute.clone()))
            .map(|&i| &self.facts[i].value)
    }

    pub fn lookup_str(&self, subject: &str, attribute: &str) -> Option<&Value> {
        self.lookup(&EntityId::new(subject), &Symbol::new(attribute))
    }

    /// Facts about `subject`, in file order.
    pub fn facts_of<'a>(&'a self, subject: &EntityId) -> impl Iterator<Item = &'a Fact> + 'a {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .map(move |&i| &self.facts[i])
    }

    pub fn type_of(&self, entity: &EntityId) -> Option<&Symbol> {
        match self.lookup(entity, &Symbol::new("type"))? {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn entities_of_type(&self, type_symbol: &Symbol) -> Vec<EntityId> {
        self.entities
            .iter()
            .filter(|e| self.type_of(e) == Some(type_symbol))
            .cloned()
            .collect()
    }

    /// Display name (the `name` text fact), if any.
    pub fn name_of(&self, entity: &EntityId) -> Option<&str> {
        match self.lookup(entity, &Symbol::new("name"))? {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// First entity of `type_symbol` whose name matches `name`, ignoring case.
    pub fn find_by_name(&self, type_symbol: &Symbol, name: &str) -> Option<EntityId> {
        self.entities
            .iter()
            .find(|e| {
                self.type_of(e) == Some(type_symbol)
                    && self
                        .name_of(e)
                        .is_some_and(|n| n.eq_ignore_ascii_case(name.trim()))
            })
            .cloned()
    }
}

pub fn load_kb(source: &str) -> Result<KnowledgeBase, KbError> {
    let mut raw = Vec::new();
    for (i, line) in source.lines().enumerate() {
        if let Some(item) = parse_line(line, i + 1)? {
            raw.push(item);
        }
    }

    // Values may refer to entities declared later in the file (`startpoint, s1`
    // may precede `entity(s1).`), so collect declarations first.
    let declared: HashSet<&str> = raw
        .iter()
        .filter_map(|item| match item {
            RawItem::Entity { id, .. } => Some(id.as_str()),
            RawItem::Property { .. } => None,
        })
        .collect();

    let mut kb = KnowledgeBase::default();
    for item in &raw {
        match item {
            RawItem::Entity { line, id } => {
                let entity = EntityId::new(id.as_str());
                if kb.by_subject.contains_key(&entity) {
                    return Err(KbError::DuplicateEntity {
                        line: *line,
                        entity: id.clone(),
                    });
                }
                kb.by_subject.insert(entity.clone(), Vec::new());
                kb.entities.push(entity);
            }
            RawItem::Property {
                line,
                subject,
                attribute,
                value,
            } => {
                let subject_id = EntityId::new(subject.as_str());
                if !kb.by_subject.contains_key(&subject_id) {
                    return Err(KbError::UndeclaredEntity {
                        line: *line,
                        entity: subject.clone(),
                    });
                }
                let value = match value {
                    RawValue::Quoted(s) => Value::Text(s.clone()),
                    RawValue::Digits { lexeme, column } => {
                        Value::ClockTime(parse_clock_lexeme(lexeme).ok_or_else(|| {
                            KbError::MalformedClockTime {
                                line: *line,
                                column: *column,
                                lexeme: lexeme.clone(),
                            }
                        })?)
                    }
                    RawValue::Ident(s) if declared.contains(s.as_str()) => {
                        Value::EntityRef(EntityId::new(s.as_str()))
                    }
                    RawValue::Ident(s) => Value::Symbol(Symbol::new(s.as_str())),
                };
                let attribute = Symbol::new(attribute.as_str());
                let key = (subject_id.clone(), attribute.clone());
                if kb.index.contains_key(&key) {
                    return Err(KbError::DuplicateFact {
                        line: *line,
                        subject: subject.clone(),
                        attribute: attribute.to_string(),
                    });
                }
                let slot = kb.facts.len();
                kb.index.insert(key, slot);
                kb.by_subject.entry(subject_id.clone()).or_default().push(slot);
                kb.facts.push(Fact {
                    subject: subject_id,
                    attribute,
                    value,
                });
            }
        }
    }
    Ok(kb)
}

fn parse_clock_lexeme(lexeme: &str) -> Option<ClockTime> {
    if lexeme.len() > 4 {
        return None;
    }
    ClockTime::from_hhmm(lexeme.parse().ok()?)
}

enum RawItem {
    Entity {
        line: usize,
        id: String,
    },
    Property {
        line: usize,
        subject: String,
        attribute: String,
        value: RawValue,
    },
}

enum RawValue {
    Ident(String),
    Quoted(String),
    Digits { lexeme: String, column: usize },
}

struct LineCursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineCursor {
    fn new(src: &str, line: usize) -> Self {
        LineCursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> KbError {
        KbError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, literal: &str) -> bool {
        let n = literal.chars().count();
        if self.chars.len() >= self.pos + n
            && self.chars[self.pos..self.pos + n].iter().copied().eq(literal.chars())
        {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, literal: &str) -> Result<(), KbError> {
        if self.eat(literal) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{literal}`")))
        }
    }

    fn identifier(&mut self) -> Result<String, KbError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return Err(self.error("expected an identifier")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn value(&mut self) -> Result<RawValue, KbError> {
        match self.peek() {
            Some('"') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c != '"') {
                    self.pos += 1;
                }
                if self.at_end() {
                    return Err(self.error("unterminated string"));
                }
                let text = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                Ok(RawValue::Quoted(text))
            }
            Some(c) if c.is_ascii_digit() => {
                let column = self.column();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                Ok(RawValue::Digits {
                    lexeme: self.chars[start..self.pos].iter().collect(),
                    column,
                })
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(RawValue::Ident(self.identifier()?)),
            _ => Err(self.error("expected an identifier, quoted string or digits")),
        }
    }
}

fn parse_line(src: &str, line: usize) -> Result<Option<RawItem>, KbError> {
    let mut cur = LineCursor::new(src, line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('%') {
        return Ok(None);
    }
    let item = if cur.eat("entity(") {
        let id = cur.identifier()?;
        cur.expect(").")?;
        RawItem::Entity { line, id }
    } else if cur.eat("property(") {
        let subject = cur.identifier()?;
        cur.expect(",")?;
        cur.skip_ws();
        let attribute = cur.identifier()?;
        cur.expect(",")?;
        cur.skip_ws();
        let value = cur.value()?;
        cur.expect(").")?;
        RawItem::Property {
            line,
            subject,
            attribute,
            value,
        }
    } else {
        return Err(cur.error("expected `entity(`, `property(` or a `%` comment"));
    };
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing characters"));
    }
    Ok(Some(item))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::FLIGHTS_KB;

    #[test]
    fn loads_flight_kb() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        assert_eq!(kb.entities().len(), 3);
        assert_eq!(kb.facts().len(), 10);
        assert_eq!(kb.lookup_str("qf400", "starttime"), Some(&Value::clock(715)));
        assert_eq!(kb.lookup_str("qf400", "startpoint"), Some(&Value::entity("s1")));
        assert_eq!(kb.lookup_str("qf400", "type"), Some(&Value::symbol("flight")));
        assert_eq!(kb.lookup_str("s1", "name"), Some(&Value::text("Sydney")));
        assert_eq!(kb.lookup_str("qf400", "gate"), None);
    }

    #[test]
    fn empty_input() {
        let kb = load_kb("").unwrap();
        assert!(kb.entities().is_empty());
        assert!(kb.facts().is_empty());
    }

    #[test]
    fn comments_and_blank_lines() {
        let kb = load_kb("% header\n\n  entity(a).  \n\t% indented comment\nproperty(a,type,bus).\n")
            .unwrap();
        assert_eq!(kb.entities(), &[EntityId::new("a")]);
        assert_eq!(kb.type_of(&EntityId::new("a")), Some(&Symbol::new("bus")));
    }

    #[test]
    fn undeclared_subject() {
        let err = load_kb("property(x, type, flight).").unwrap_err();
        assert_eq!(
            err,
            KbError::UndeclaredEntity {
                line: 1,
                entity: "x".into()
            }
        );
    }

    #[test]
    fn subject_must_be_declared_before_use() {
        let err = load_kb("property(x, type, flight).\nentity(x).").unwrap_err();
        assert!(matches!(err, KbError::UndeclaredEntity { line: 1, .. }));
    }

    #[test]
    fn duplicate_fact() {
        let err = load_kb("entity(x).\nproperty(x, type, a).\nproperty(x, type, b).").unwrap_err();
        assert!(matches!(err, KbError::DuplicateFact { line: 3, .. }));
    }

    #[test]
    fn duplicate_entity() {
        let err = load_kb("entity(x).\nentity(x).").unwrap_err();
        assert!(matches!(err, KbError::DuplicateEntity { line: 2, .. }));
    }

    #[test]
    fn malformed_clock_times() {
        for bad in ["0760", "2400", "12345", "9999"] {
            let src = format!("entity(x).\nproperty(x, starttime, {bad}).");
            let err = load_kb(&src).unwrap_err();
            assert_eq!(
                err,
                KbError::MalformedClockTime {
                    line: 2,
                    column: 24,
                    lexeme: bad.into()
                }
            );
        }
    }

    #[test]
    fn syntax_error_positions() {
        let err = load_kb("entity(x).\nproperty(x type, a).").unwrap_err();
        assert_eq!(
            err,
            KbError::Syntax {
                line: 2,
                column: 11,
                message: "expected `,`".into()
            }
        );
        let err = load_kb("entity(x). junk").unwrap_err();
        assert!(matches!(err, KbError::Syntax { line: 1, column: 12, .. }));
        let err = load_kb("fact(x).").unwrap_err();
        assert!(matches!(err, KbError::Syntax { line: 1, column: 1, .. }));
        let err = load_kb("entity(x).\nproperty(x, name, \"open).").unwrap_err();
        assert!(matches!(err, KbError::Syntax { line: 2, .. }));
        let err = load_kb("entity(1x).").unwrap_err();
        assert!(matches!(err, KbError::Syntax { line: 1, column: 8, .. }));
    }

    #[test]
    fn whitespace_only_after_commas() {
        assert!(load_kb("entity( x).").is_err());
        assert!(load_kb("entity(x).\nproperty(x ,type, a).").is_err());
        assert!(load_kb("entity(x).\nproperty(x,  type,\tb).").is_ok());
    }

    #[test]
    fn entities_of_type_in_declaration_order() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        assert_eq!(kb.entities_of_type(&"flight".into()), vec![EntityId::new("qf400")]);
        assert_eq!(
            kb.entities_of_type(&"city".into()),
            vec![EntityId::new("s1"), EntityId::new("m1")]
        );
        assert!(kb.entities_of_type(&"hotel".into()).is_empty());
    }

    #[test]
    fn find_city_by_name_ignores_case() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        assert_eq!(kb.find_by_name(&"city".into(), "melbourne"), Some("m1".into()));
        assert_eq!(kb.find_by_name(&"city".into(), "SYDNEY"), Some("s1".into()));
        assert_eq!(kb.find_by_name(&"city".into(), "Perth"), None);
        assert_eq!(kb.find_by_name(&"flight".into(), "Sydney"), None);
    }

    #[test]
    fn clock_time_bounds() {
        assert_eq!(ClockTime::from_hhmm(715).map(ClockTime::padded), Some("0715".into()));
        assert!(ClockTime::from_hhmm(2359).is_some());
        assert!(ClockTime::from_hhmm(2400).is_none());
        assert!(ClockTime::from_hhmm(760).is_none());
    }
}
