//! Attribute-value semantics for noun phrases.
//!
//! A [`SemanticNP`] carries a discourse index, a givenness flag, a head type
//! and an ordered property list. The head type may be the null type φ, which
//! the realizer turns into the pro-form *one*. φ only arises from
//! [`elide_shared`] (structure shared with an earlier NP is removed) or from
//! [`contrast_np`] (the dialogue manager keeps only the relaxed constraints).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discourse::DiscourseContext;
use crate::kb::{EntityId, KnowledgeBase, Symbol, Value};
use crate::query::{relaxed_deltas, ElementStatus, QueryFrame, Relation};

/// Attribute order used both for incremental description and for modifier
/// order on the surface. Attributes not listed follow in KB order.
pub const PREFERRED_ATTRIBUTES: [&str; 4] = ["colour", "size", "starttime", "endtime"];

const NOT_DESCRIPTIVE: [&str; 2] = ["type", "name"];

/// Attribute carrying `earliest` / `latest` in set-elaboration NPs.
pub const SUPERLATIVE_ATTRIBUTE: &str = "superlative";

/// Serialized form of the null type.
pub const NULL_TYPE_LITERAL: &str = "phi";

fn preferred_rank(attribute: &Symbol) -> usize {
    PREFERRED_ATTRIBUTES
        .iter()
        .position(|a| attribute == a)
        .unwrap_or(PREFERRED_ATTRIBUTES.len())
}

/// Stable sort into preferred attribute order.
pub fn in_preferred_order<T>(items: &mut [(Symbol, T)]) {
    items.sort_by_key(|(a, _)| preferred_rank(a));
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum HeadType {
    Type(Symbol),
    /// φ: equal to no symbol.
    Null,
}

impl HeadType {
    pub fn is_null(&self) -> bool {
        matches!(self, HeadType::Null)
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            HeadType::Type(s) => Some(s),
            HeadType::Null => None,
        }
    }
}

impl fmt::Display for HeadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadType::Type(s) => write!(f, "{s}"),
            HeadType::Null => f.write_str(NULL_TYPE_LITERAL),
        }
    }
}

impl From<HeadType> for String {
    fn from(h: HeadType) -> String {
        h.to_string()
    }
}

impl From<String> for HeadType {
    fn from(s: String) -> HeadType {
        if s == NULL_TYPE_LITERAL {
            HeadType::Null
        } else {
            HeadType::Type(Symbol::new(s))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticNP {
    index: Option<String>,
    given: bool,
    head_type: HeadType,
    properties: Vec<(Symbol, Value)>,
}

impl SemanticNP {
    pub fn new(head_type: Symbol, given: bool) -> Self {
        SemanticNP {
            index: None,
            given,
            head_type: HeadType::Type(head_type),
            properties: Vec::new(),
        }
    }

    /// φ-headed NP built by the planner (contrast or set elaboration).
    pub(crate) fn one_anaphoric(
        index: Option<String>,
        given: bool,
        properties: Vec<(Symbol, Value)>,
    ) -> Self {
        SemanticNP {
            index,
            given,
            head_type: HeadType::Null,
            properties,
        }
    }

    pub fn with_index(mut self, index: impl Into<String>) -> Self {
        self.index = Some(index.into());
        self
    }

    /// Adds a property, replacing any earlier value for the same attribute.
    pub fn with_property(mut self, attribute: impl Into<Symbol>, value: Value) -> Self {
        let attribute = attribute.into();
        match self.properties.iter_mut().find(|(a, _)| *a == attribute) {
            Some(slot) => slot.1 = value,
            None => self.properties.push((attribute, value)),
        }
        self
    }

    pub fn index(&self) -> Option<&str> {
        self.index.as_deref()
    }

    pub fn is_given(&self) -> bool {
        self.given
    }

    pub fn head_type(&self) -> &HeadType {
        &self.head_type
    }

    pub fn properties(&self) -> &[(Symbol, Value)] {
        &self.properties
    }

    pub fn property(&self, attribute: &str) -> Option<&Value> {
        self.properties
            .iter()
            .find(|(a, _)| a == attribute)
            .map(|(_, v)| v)
    }

    fn shares(&self, attribute: &Symbol, value: &Value) -> bool {
        self.properties.iter().any(|(a, v)| a == attribute && v == value)
    }

    /// True if `entity` fits this description in `kb`.
    pub fn describes(&self, kb: &KnowledgeBase, entity: &EntityId) -> bool {
        let head_ok = match &self.head_type {
            HeadType::Type(t) => kb.type_of(entity) == Some(t),
            HeadType::Null => true,
        };
        head_ok
            && self
                .properties
                .iter()
                .all(|(a, v)| kb.lookup(entity, a) == Some(v))
    }
}

impl From<&str> for SemanticNP {
    fn from(head_type: &str) -> Self {
        SemanticNP::new(Symbol::new(head_type), false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("entity `{0}` has no type fact")]
    MissingType(EntityId),
    #[error("no description distinguishes `{0}` from the other mentioned entities")]
    Indistinguishable(EntityId),
    #[error("one-anaphora is not licensed: the principal term was relaxed or never given")]
    Unlicensed,
    #[error("no relaxed constraint to contrast")]
    NothingRelaxed,
}

/// Properties that can serve as modifiers: symbols and clock times.
fn descriptive_facts(kb: &KnowledgeBase, referent: &EntityId) -> Vec<(Symbol, Value)> {
    let mut facts: Vec<(Symbol, Value)> = kb
        .facts_of(referent)
        .filter(|f| !NOT_DESCRIPTIVE.iter().any(|n| f.attribute == *n))
        .filter(|f| matches!(f.value, Value::Symbol(_) | Value::ClockTime(_)))
        .map(|f| (f.attribute.clone(), f.value.clone()))
        .collect();
    in_preferred_order(&mut facts);
    facts
}

/// Incrementally add properties until the description rules out every other
/// entity mentioned in the discourse.
pub fn build_distinguishing_sem(
    referent: &EntityId,
    context: &DiscourseContext,
    kb: &KnowledgeBase,
) -> Result<SemanticNP, SemanticsError> {
    let head = kb
        .type_of(referent)
        .ok_or_else(|| SemanticsError::MissingType(referent.clone()))?;
    let mut sem = SemanticNP::new(head.clone(), context.is_mentioned(referent))
        .with_index(referent.as_str());

    let mut distractors: Vec<&EntityId> = context
        .mentioned_entities()
        .into_iter()
        .filter(|e| *e != referent && kb.type_of(e) == Some(head))
        .collect();

    for (attribute, value) in descriptive_facts(kb, referent) {
        if distractors.is_empty() {
            break;
        }
        let before = distractors.len();
        distractors.retain(|d| kb.lookup(d, &attribute) == Some(&value));
        if distractors.len() < before {
            sem = sem.with_property(attribute, value);
        }
    }

    if distractors.is_empty() {
        Ok(sem)
    } else {
        Err(SemanticsError::Indistinguishable(referent.clone()))
    }
}

/// First-mention description: the type plus every descriptive property.
pub fn build_initial_sem(referent: &EntityId, kb: &KnowledgeBase) -> Result<SemanticNP, SemanticsError> {
    let head = kb
        .type_of(referent)
        .ok_or_else(|| SemanticsError::MissingType(referent.clone()))?;
    Ok(descriptive_facts(kb, referent)
        .into_iter()
        .fold(
            SemanticNP::new(head.clone(), false).with_index(referent.as_str()),
            |sem, (a, v)| sem.with_property(a, v),
        ))
}

/// Replace structure shared with an earlier NP of the same type by φ.
///
/// The most recent antecedent with the same head type that leaves at least one
/// unshared property wins; shared properties are dropped. With no such
/// antecedent the input comes back unchanged.
pub fn elide_shared(sem: &SemanticNP, antecedents: &[SemanticNP]) -> SemanticNP {
    if sem.head_type.is_null() {
        return sem.clone();
    }
    let antecedent = antecedents.iter().rev().find(|a| {
        a.head_type == sem.head_type && sem.properties.iter().any(|(k, v)| !a.shares(k, v))
    });
    match antecedent {
        Some(a) => SemanticNP {
            index: sem.index.clone(),
            given: sem.given,
            head_type: HeadType::Null,
            properties: sem
                .properties
                .iter()
                .filter(|(k, v)| !a.shares(k, v))
                .cloned()
                .collect(),
        },
        None => sem.clone(),
    }
}

/// One-anaphora needs the principal term to be the user's, unrelaxed.
pub fn license_one_anaphora(frame: &QueryFrame) -> bool {
    let element = frame.type_element();
    element.status() == ElementStatus::Initial
        && element.given().is_some_and(|c| c.relation() == Relation::Eq)
}

/// NP semantics that is empty except for the relaxed constraints.
pub fn contrast_np(frame: &QueryFrame) -> Result<SemanticNP, SemanticsError> {
    if !license_one_anaphora(frame) {
        return Err(SemanticsError::Unlicensed);
    }
    let properties = relaxed_deltas(frame);
    if properties.is_empty() {
        return Err(SemanticsError::NothingRelaxed);
    }
    Ok(SemanticNP::one_anaphoric(None, false, properties))
}
