//! Query frames: evaluation against the knowledge base, relaxation on
//! failure, and instantiation with the answer's values.
//!
//! A frame is a table of query elements. Each element names a KB attribute,
//! the variable it binds, whether its constraint is still as the user gave it
//! (`initial`) or has been widened (`relaxed`), the given constraint, and the
//! new value found in the database.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{ClockTime, EntityId, KnowledgeBase, Symbol, Value};

/// Attribute name of the solution-variable element.
pub const ENTITY_ATTRIBUTE: &str = "entity";
/// Attribute name of the principal term.
pub const TYPE_ATTRIBUTE: &str = "type";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Eq,
    Lt,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    relation: Relation,
    bound: Value,
}

impl Constraint {
    pub fn new(relation: Relation, bound: Value) -> Result<Self, QueryError> {
        if relation != Relation::Eq && bound.as_clock().is_none() {
            return Err(QueryError::OrderingOnNonTime {
                relation,
                bound: bound.to_string(),
            });
        }
        Ok(Constraint { relation, bound })
    }

    pub fn eq(bound: Value) -> Self {
        Constraint {
            relation: Relation::Eq,
            bound,
        }
    }

    pub fn before(t: ClockTime) -> Self {
        Constraint {
            relation: Relation::Lt,
            bound: Value::ClockTime(t),
        }
    }

    pub fn after(t: ClockTime) -> Self {
        Constraint {
            relation: Relation::Gt,
            bound: Value::ClockTime(t),
        }
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn bound(&self) -> &Value {
        &self.bound
    }

    pub fn is_satisfied_by(&self, value: &Value) -> bool {
        match self.relation {
            Relation::Eq => value == &self.bound,
            Relation::Lt => matches!(
                (value.as_clock(), self.bound.as_clock()),
                (Some(v), Some(b)) if v < b
            ),
            Relation::Gt => matches!(
                (value.as_clock(), self.bound.as_clock()),
                (Some(v), Some(b)) if v > b
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementStatus {
    Initial,
    Relaxed,
}

impl fmt::Display for ElementStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementStatus::Initial => "initial",
            ElementStatus::Relaxed => "relaxed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryElement {
    attribute: Symbol,
    variable: String,
    status: ElementStatus,
    given: Option<Constraint>,
    original_given: Option<Constraint>,
    new: Option<Value>,
}

impl QueryElement {
    pub fn new(attribute: &str, variable: &str, given: Option<Constraint>) -> Self {
        QueryElement {
            attribute: Symbol::new(attribute),
            variable: variable.to_string(),
            status: ElementStatus::Initial,
            original_given: given.clone(),
            given,
            new: None,
        }
    }

    /// Replace the given constraint, keeping the original for tracing.
    /// Status follows: relaxed iff the constraint differs from the original.
    pub fn with_given(mut self, given: Option<Constraint>) -> Self {
        self.status = if given == self.original_given {
            ElementStatus::Initial
        } else {
            ElementStatus::Relaxed
        };
        self.given = given;
        self
    }

    pub fn attribute(&self) -> &Symbol {
        &self.attribute
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn status(&self) -> ElementStatus {
        self.status
    }

    pub fn given(&self) -> Option<&Constraint> {
        self.given.as_ref()
    }

    pub fn original_given(&self) -> Option<&Constraint> {
        self.original_given.as_ref()
    }

    pub fn new_value(&self) -> Option<&Value> {
        self.new.as_ref()
    }

    pub fn is_entity(&self) -> bool {
        self.attribute == ENTITY_ATTRIBUTE
    }

    /// True when an `=` constraint already fixes the value.
    pub fn is_pinned(&self) -> bool {
        matches!(&self.given, Some(c) if c.relation == Relation::Eq)
    }

    /// `T1 < 700`, `C2 = m1`. A widened time bound prints as four-digit HHMM.
    pub fn given_cell(&self) -> Option<String> {
        let c = self.given.as_ref()?;
        let bound = match (&c.bound, self.status) {
            (Value::ClockTime(t), ElementStatus::Relaxed) => t.padded(),
            (v, _) => v.to_string(),
        };
        Some(format!("{} {} {}", self.variable, c.relation.symbol(), bound))
    }

    /// `E = qf400`, `T1 = 715`.
    pub fn new_cell(&self) -> Option<String> {
        self.new
            .as_ref()
            .map(|v| format!("{} = {}", self.variable, v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("`{relation:?}` needs a clock-time bound, got {bound}")]
    OrderingOnNonTime { relation: Relation, bound: String },
    #[error("malformed query frame: {0}")]
    MalformedFrame(String),
    #[error("no relaxable constraint remains")]
    RelaxationExhausted,
    #[error("binding violates the given constraint on `{variable}`")]
    BindingViolatesConstraint { variable: String },
    #[error("invalid relaxation policy: {0}")]
    InvalidPolicy(String),
}

/// An ordered table of query elements: the solution variable first, the
/// principal term (`type`) second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryFrame {
    elements: Vec<QueryElement>,
}

impl QueryFrame {
    pub fn new(elements: Vec<QueryElement>) -> Result<Self, QueryError> {
        let malformed = |m: &str| Err(QueryError::MalformedFrame(m.to_string()));
        match elements.first() {
            Some(e) if e.is_entity() => {}
            _ => return malformed("first element must be the `entity` element"),
        }
        if elements.iter().filter(|e| e.is_entity()).count() != 1 {
            return malformed("exactly one `entity` element allowed");
        }
        match elements.get(1) {
            Some(e) if e.attribute == TYPE_ATTRIBUTE => {}
            _ => return malformed("second element must be the `type` element"),
        }
        if elements.iter().filter(|e| e.attribute == TYPE_ATTRIBUTE).count() != 1 {
            return malformed("exactly one `type` element allowed");
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].iter().any(|p| p.variable == e.variable) {
                return Err(QueryError::MalformedFrame(format!(
                    "variable `{}` used twice",
                    e.variable
                )));
            }
            if let Some(c) = &e.given {
                Constraint::new(c.relation, c.bound.clone())?;
            }
        }
        Ok(QueryFrame { elements })
    }

    pub fn elements(&self) -> &[QueryElement] {
        &self.elements
    }

    pub fn entity_element(&self) -> &QueryElement {
        &self.elements[0]
    }

    pub fn type_element(&self) -> &QueryElement {
        &self.elements[1]
    }

    pub fn element(&self, attribute: &str) -> Option<&QueryElement> {
        self.elements.iter().find(|e| e.attribute == attribute)
    }
}

/// Variable name to value.
pub type Binding = BTreeMap<String, Value>;

/// The entity a binding selects, if the solution variable is bound.
pub fn binding_entity<'a>(frame: &QueryFrame, binding: &'a Binding) -> Option<&'a EntityId> {
    binding
        .get(frame.entity_element().variable())
        .and_then(Value::as_entity)
}

/// All bindings of the frame over `kb`, one per matching entity, in KB
/// declaration order. A constrained attribute with no fact excludes the entity.
pub fn evaluate(kb: &KnowledgeBase, frame: &QueryFrame) -> Vec<Binding> {
    kb.entities()
        .iter()
        .filter_map(|entity| bind_entity(kb, frame, entity))
        .collect()
}

fn bind_entity(kb: &KnowledgeBase, frame: &QueryFrame, entity: &EntityId) -> Option<Binding> {
    let mut binding = Binding::new();
    for element in &frame.elements {
        let value = if element.is_entity() {
            Some(Value::EntityRef(entity.clone()))
        } else {
            kb.lookup(entity, &element.attribute).cloned()
        };
        match (&element.given, value) {
            (Some(c), Some(v)) if c.is_satisfied_by(&v) => {
                binding.insert(element.variable.clone(), v);
            }
            (Some(_), _) => return None,
            (None, Some(v)) => {
                binding.insert(element.variable.clone(), v);
            }
            (None, None) => {}
        }
    }
    Some(binding)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxRule {
    pub attribute: Symbol,
    /// Widening step in HHMM units; whole hours only (`100` = one hour).
    pub step: u16,
    pub max_rounds: u8,
}

/// Which time constraints may be widened, in which order, and by how much.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationPolicy {
    relaxable: Vec<RelaxRule>,
    non_relaxable: Vec<Symbol>,
}

impl RelaxationPolicy {
    /// `type` is always added to the non-relaxable list.
    pub fn new(relaxable: Vec<RelaxRule>, non_relaxable: Vec<Symbol>) -> Result<Self, QueryError> {
        let mut non_relaxable = non_relaxable;
        if !non_relaxable.iter().any(|s| s == TYPE_ATTRIBUTE) {
            non_relaxable.push(Symbol::new(TYPE_ATTRIBUTE));
        }
        for rule in &relaxable {
            if non_relaxable.contains(&rule.attribute) {
                return Err(QueryError::InvalidPolicy(format!(
                    "`{}` is listed as both relaxable and non-relaxable",
                    rule.attribute
                )));
            }
            if rule.step == 0 || rule.step % 100 != 0 || rule.step >= 2400 {
                return Err(QueryError::InvalidPolicy(format!(
                    "step {} for `{}` is not a whole number of hours",
                    rule.step, rule.attribute
                )));
            }
        }
        Ok(RelaxationPolicy {
            relaxable,
            non_relaxable,
        })
    }

    pub fn relaxable(&self) -> &[RelaxRule] {
        &self.relaxable
    }

    pub fn non_relaxable(&self) -> &[Symbol] {
        &self.non_relaxable
    }
}

impl Default for RelaxationPolicy {
    fn default() -> Self {
        RelaxationPolicy::new(
            vec![RelaxRule {
                attribute: Symbol::new("starttime"),
                step: 100,
                max_rounds: 3,
            }],
            ["type", "startpoint", "endpoint", "endtime"]
                .into_iter()
                .map(Symbol::new)
                .collect(),
        )
        .expect("default policy is well formed")
    }
}

/// Bound widened by `step` hours, clamped to `0000..=2359`.
fn widen(relation: Relation, bound: ClockTime, step: u16) -> ClockTime {
    let hours = step / 100;
    match relation {
        Relation::Lt if bound.hours() + hours > 23 => ClockTime::from_hm(23, 59),
        Relation::Lt => ClockTime::from_hm(bound.hours() + hours, bound.minutes()),
        Relation::Gt if bound.hours() < hours => ClockTime::from_hm(0, 0),
        Relation::Gt => ClockTime::from_hm(bound.hours() - hours, bound.minutes()),
        Relation::Eq => Some(bound),
    }
    .expect("clamped bound is a valid time")
}

fn rounds_used(element: &QueryElement, step: u16) -> u16 {
    match (
        element.given.as_ref().and_then(|c| c.bound.as_clock()),
        element.original_given.as_ref().and_then(|c| c.bound.as_clock()),
    ) {
        (Some(now), Some(orig)) => {
            let moved = now.minutes_since_midnight().abs_diff(orig.minutes_since_midnight());
            let step_minutes = step / 100 * 60;
            moved.div_ceil(step_minutes)
        }
        _ => 0,
    }
}

/// Widen the first eligible constraint (in policy order) by one step.
pub fn relax(frame: &QueryFrame, policy: &RelaxationPolicy) -> Result<QueryFrame, QueryError> {
    for rule in &policy.relaxable {
        let Some(pos) = frame
            .elements
            .iter()
            .position(|e| e.attribute == rule.attribute)
        else {
            continue;
        };
        let element = &frame.elements[pos];
        let Some(c) = &element.given else { continue };
        let Some(bound) = c.bound.as_clock() else { continue };
        if c.relation == Relation::Eq || rounds_used(element, rule.step) >= u16::from(rule.max_rounds)
        {
            continue;
        }
        let widened = widen(c.relation, bound, rule.step);
        if widened == bound {
            continue;
        }
        let mut next = frame.clone();
        let target = &mut next.elements[pos];
        target.given = Some(Constraint {
            relation: c.relation,
            bound: Value::ClockTime(widened),
        });
        target.status = ElementStatus::Relaxed;
        return Ok(next);
    }
    Err(QueryError::RelaxationExhausted)
}

/// Record the binding's values in the New column of every element not already
/// pinned by an `=` constraint.
pub fn instantiate(frame: &QueryFrame, binding: &Binding) -> Result<QueryFrame, QueryError> {
    let mut next = frame.clone();
    for element in &mut next.elements {
        let Some(value) = binding.get(&element.variable) else {
            continue;
        };
        if let Some(c) = &element.given {
            if !c.is_satisfied_by(value) {
                return Err(QueryError::BindingViolatesConstraint {
                    variable: element.variable.clone(),
                });
            }
        }
        if !element.is_pinned() {
            element.new = Some(value.clone());
        }
    }
    Ok(next)
}

/// `(attribute, new value)` for every relaxed element, in frame order.
pub fn relaxed_deltas(frame: &QueryFrame) -> Vec<(Symbol, Value)> {
    frame
        .elements
        .iter()
        .filter(|e| e.status == ElementStatus::Relaxed)
        .filter_map(|e| Some((e.attribute.clone(), e.new.clone()?)))
        .collect()
}
