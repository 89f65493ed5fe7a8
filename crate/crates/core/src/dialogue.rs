//! The dialogue manager: evaluate the user's query, relax it on failure, and
//! plan a cooperative response.
//!
//! When a relaxed query succeeds and the principal term was not relaxed, the
//! response is a contrast whose noun phrase holds only the relaxed
//! constraints. That NP has the null head type, so one-anaphora is fixed at
//! planning time rather than discovered later by elision.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discourse::{decide_form, update_context, DiscourseContext, ReferringForm};
use crate::kb::{EntityId, KnowledgeBase, Symbol, Value};
use crate::query::{
    binding_entity, evaluate, instantiate, relax, relaxed_deltas, Binding, ElementStatus,
    QueryFrame, RelaxationPolicy,
};
use crate::realize::{realize_np, realize_response};
use crate::semantics::{
    build_initial_sem, contrast_np, license_one_anaphora, SemanticNP, SUPERLATIVE_ATTRIBUTE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscourseRelation {
    None,
    Contrast,
    Elaboration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Affirm,
    Deny,
    Inform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Earliest,
    Latest,
}

impl Selector {
    pub fn as_str(self) -> &'static str {
        match self {
            Selector::Earliest => "earliest",
            Selector::Latest => "latest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NpSpec {
    pub entity: Option<EntityId>,
    pub form: ReferringForm,
}

/// What the planner hands to the realizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpeechActSpec {
    pub polarity: Polarity,
    pub relation: DiscourseRelation,
    pub nps: Vec<NpSpec>,
    /// One-anaphora chosen during planning.
    pub preselect_one: bool,
    /// Extra facts for the template (name, departure time).
    pub payload: Vec<(Symbol, Value)>,
}

impl SpeechActSpec {
    /// `preselect_one` implies some NP has the null head type.
    pub fn is_consistent(&self) -> bool {
        !self.preselect_one
            || self
                .nps
                .iter()
                .any(|np| np.form.sem().is_some_and(|s| s.head_type().is_null()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnErrorKind {
    Unparseable,
    UnknownCity,
    NoActiveSet,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnError {
    pub kind: TurnErrorKind,
    pub message: String,
}

/// Everything that went into one answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnTrace {
    /// Initial frame, each relaxation, and the instantiated frame.
    pub frames: Vec<QueryFrame>,
    pub relation: DiscourseRelation,
    pub licensed: bool,
    pub sems: Vec<SemanticNP>,
    pub answer: String,
    /// Retrieved but deliberately not verbalized (e.g. arrival time).
    pub unverbalized: Vec<(Symbol, Value)>,
    pub error: Option<TurnError>,
}

impl TurnTrace {
    pub fn failed(kind: TurnErrorKind, message: impl Into<String>, answer: impl Into<String>) -> Self {
        TurnTrace {
            frames: Vec::new(),
            relation: DiscourseRelation::None,
            licensed: false,
            sems: Vec::new(),
            answer: answer.into(),
            unverbalized: Vec::new(),
            error: Some(TurnError {
                kind,
                message: message.into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnOutcome {
    pub spec: SpeechActSpec,
    pub trace: TurnTrace,
    pub context: DiscourseContext,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogueError {
    #[error("there is no set of answers to choose from")]
    NoActiveSet,
    #[error("none of the candidates has a departure time")]
    NoStartTime,
}

fn answer_entities(frame: &QueryFrame, bindings: &[Binding]) -> Vec<EntityId> {
    bindings
        .iter()
        .filter_map(|b| binding_entity(frame, b).cloned())
        .collect()
}

fn realize_or_name(form: &ReferringForm, kb: &KnowledgeBase, entity: &EntityId) -> String {
    realize_np(form).unwrap_or_else(|_| kb.name_of(entity).unwrap_or(entity.as_str()).to_string())
}

fn finish(spec: SpeechActSpec, mut trace: TurnTrace, context: DiscourseContext) -> TurnOutcome {
    debug_assert!(spec.is_consistent());
    match realize_response(&spec) {
        Ok(answer) => trace.answer = answer,
        Err(e) => {
            trace.answer = "Sorry, I can't put that into words.".to_string();
            trace.error = Some(TurnError {
                kind: TurnErrorKind::Internal,
                message: e.to_string(),
            });
        }
    }
    TurnOutcome {
        spec,
        trace,
        context,
    }
}

/// Answer a query frame cooperatively.
///
/// A direct hit is affirmed. Otherwise the frame is relaxed one step at a
/// time under `policy` and re-evaluated; the first hit yields a contrastive
/// denial, and exhaustion yields a plain denial.
pub fn answer_query(
    kb: &KnowledgeBase,
    frame: &QueryFrame,
    context: &DiscourseContext,
    policy: &RelaxationPolicy,
) -> TurnOutcome {
    let mut trace = TurnTrace {
        frames: vec![frame.clone()],
        relation: DiscourseRelation::None,
        licensed: false,
        sems: Vec::new(),
        answer: String::new(),
        unverbalized: Vec::new(),
        error: None,
    };

    let direct = evaluate(kb, frame);
    if !direct.is_empty() {
        return affirm(kb, frame, &direct, context, trace);
    }

    let mut current = frame.clone();
    loop {
        current = match relax(&current, policy) {
            Ok(next) => next,
            Err(_) => {
                let spec = SpeechActSpec {
                    polarity: Polarity::Deny,
                    relation: DiscourseRelation::None,
                    nps: Vec::new(),
                    preselect_one: false,
                    payload: Vec::new(),
                };
                let next = update_context(context, &[], Vec::new());
                return finish(spec, trace, next);
            }
        };
        trace.frames.push(current.clone());
        let bindings = evaluate(kb, &current);
        if !bindings.is_empty() {
            return contrast(kb, &current, &bindings, context, trace);
        }
    }
}

fn affirm(
    kb: &KnowledgeBase,
    frame: &QueryFrame,
    bindings: &[Binding],
    context: &DiscourseContext,
    mut trace: TurnTrace,
) -> TurnOutcome {
    let entities = answer_entities(frame, bindings);
    let Some(found) = entities.first().cloned() else {
        return finish(
            SpeechActSpec {
                polarity: Polarity::Affirm,
                relation: DiscourseRelation::None,
                nps: Vec::new(),
                preselect_one: false,
                payload: Vec::new(),
            },
            trace,
            update_context(context, &[], Vec::new()),
        );
    };

    let name = kb
        .name_of(&found)
        .map(Value::text)
        .unwrap_or_else(|| Value::text(found.as_str()));
    let mut payload = vec![(Symbol::new("name"), name)];
    if let Some(t) = kb.lookup(&found, &Symbol::new("starttime")) {
        payload.push((Symbol::new("starttime"), t.clone()));
    }

    let mut nps = Vec::new();
    let mut realized = Vec::new();
    let mention_sem = build_initial_sem(&found, kb)
        .unwrap_or_else(|_| SemanticNP::new(Symbol::new("thing"), false).with_index(found.as_str()));
    if let Ok(form) = decide_form(&found, context, kb) {
        if let Some(sem) = form.sem() {
            trace.sems.push(sem.clone());
        }
        realized.push((found.clone(), mention_sem, realize_or_name(&form, kb, &found)));
        nps.push(NpSpec {
            entity: Some(found.clone()),
            form,
        });
    } else {
        let surface = kb.name_of(&found).unwrap_or(found.as_str()).to_string();
        realized.push((found.clone(), mention_sem, surface));
    }

    let spec = SpeechActSpec {
        polarity: Polarity::Affirm,
        relation: DiscourseRelation::None,
        nps,
        preselect_one: false,
        payload,
    };
    let next = update_context(context, &entities, realized);
    finish(spec, trace, next)
}

fn contrast(
    kb: &KnowledgeBase,
    relaxed: &QueryFrame,
    bindings: &[Binding],
    context: &DiscourseContext,
    mut trace: TurnTrace,
) -> TurnOutcome {
    let instantiated =
        instantiate(relaxed, &bindings[0]).expect("evaluate only returns satisfying bindings");
    trace.frames.push(instantiated.clone());
    let entities = answer_entities(relaxed, bindings);
    let found = binding_entity(relaxed, &bindings[0]).cloned();

    trace.unverbalized = instantiated
        .elements()
        .iter()
        .filter(|e| !e.is_entity() && e.status() == ElementStatus::Initial)
        .filter_map(|e| Some((e.attribute().clone(), e.new_value()?.clone())))
        .collect();

    let deltas = relaxed_deltas(&instantiated);
    let head = found
        .as_ref()
        .and_then(|e| kb.type_of(e))
        .cloned()
        .unwrap_or_else(|| Symbol::new("thing"));
    let full = deltas.iter().fold(
        SemanticNP::new(head, false),
        |sem, (a, v)| sem.with_property(a.clone(), v.clone()),
    );
    let full = match &found {
        Some(e) => full.with_index(e.as_str()),
        None => full,
    };

    let licensed = license_one_anaphora(&instantiated);
    trace.licensed = licensed;
    trace.relation = DiscourseRelation::Contrast;

    let (form, preselect_one) = match contrast_np(&instantiated) {
        Ok(sem) if licensed => (
            ReferringForm::OneAnaphor {
                sem,
                definite: false,
            },
            true,
        ),
        _ => (ReferringForm::IndefiniteNP { sem: full.clone() }, false),
    };
    if let Some(sem) = form.sem() {
        trace.sems.push(sem.clone());
    }

    let mut realized = Vec::new();
    if let Some(e) = &found {
        realized.push((e.clone(), full, realize_or_name(&form, kb, e)));
    }
    let spec = SpeechActSpec {
        polarity: Polarity::Deny,
        relation: DiscourseRelation::Contrast,
        nps: vec![NpSpec {
            entity: found,
            form,
        }],
        preselect_one,
        payload: Vec::new(),
    };
    let next = update_context(context, &entities, realized);
    finish(spec, trace, next)
}

/// Pick the earliest or latest member of the set under discussion.
///
/// The set is the active set left by a plural answer; after a singular answer
/// it is the centre alone.
pub fn elaborate_set(
    kb: &KnowledgeBase,
    context: &DiscourseContext,
    selector: Selector,
) -> Result<TurnOutcome, DialogueError> {
    let members: Vec<EntityId> = match (context.active_set(), context.centre()) {
        (Some(set), _) => set.to_vec(),
        (None, Some(centre)) => vec![centre.clone()],
        (None, None) => Vec::new(),
    };
    if members.is_empty() {
        return Err(DialogueError::NoActiveSet);
    }

    let starttime = Symbol::new("starttime");
    let mut best: Option<(&EntityId, crate::kb::ClockTime)> = None;
    for member in &members {
        let Some(t) = kb.lookup(member, &starttime).and_then(Value::as_clock) else {
            continue;
        };
        let better = match (best, selector) {
            (None, _) => true,
            (Some((_, b)), Selector::Earliest) => t < b,
            (Some((_, b)), Selector::Latest) => t > b,
        };
        if better {
            best = Some((member, t));
        }
    }
    let (chosen, time) = best.ok_or(DialogueError::NoStartTime)?;
    let chosen = chosen.clone();

    let sem = SemanticNP::one_anaphoric(
        Some(chosen.to_string()),
        true,
        vec![(Symbol::new(SUPERLATIVE_ATTRIBUTE), Value::symbol(selector.as_str()))],
    );
    let form = ReferringForm::OneAnaphor {
        sem: sem.clone(),
        definite: true,
    };
    let surface = realize_or_name(&form, kb, &chosen);
    let spec = SpeechActSpec {
        polarity: Polarity::Inform,
        relation: DiscourseRelation::Elaboration,
        nps: vec![NpSpec {
            entity: Some(chosen.clone()),
            form,
        }],
        preselect_one: true,
        payload: vec![(starttime, Value::ClockTime(time))],
    };

    let mut next = context.clone();
    let mention_sem = build_initial_sem(&chosen, kb)
        .unwrap_or_else(|_| SemanticNP::new(Symbol::new("thing"), true).with_index(chosen.as_str()));
    next.record_mention(chosen.clone(), mention_sem, surface);
    next.focus(&chosen);
    next.advance_turn();

    let trace = TurnTrace {
        frames: Vec::new(),
        relation: DiscourseRelation::Elaboration,
        licensed: false,
        sems: vec![sem],
        answer: String::new(),
        unverbalized: Vec::new(),
        error: None,
    };
    Ok(finish(spec, trace, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{FLIGHTS_KB, TWO_FLIGHTS_KB};
    use crate::kb::{load_kb, ClockTime};
    use crate::query::{Constraint, QueryElement};
    use crate::semantics::HeadType;

    fn frame(origin: &str, dest: &str, before: Option<u16>) -> QueryFrame {
        QueryFrame::new(vec![
            QueryElement::new("entity", "E", None),
            QueryElement::new("type", "T", Some(Constraint::eq(Value::symbol("flight")))),
            QueryElement::new("startpoint", "C1", Some(Constraint::eq(Value::entity(origin)))),
            QueryElement::new("endpoint", "C2", Some(Constraint::eq(Value::entity(dest)))),
            QueryElement::new(
                "starttime",
                "T1",
                before.map(|t| Constraint::before(ClockTime::from_hhmm(t).unwrap())),
            ),
            QueryElement::new("endtime", "T2", None),
        ])
        .unwrap()
    }

    #[test]
    fn before_seven_gets_contrastive_one() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        let out = answer_query(&kb, &frame("s1", "m1", Some(700)), &DiscourseContext::new(), &RelaxationPolicy::default());
        assert_eq!(out.trace.answer, "No, but there is one at 715am.");
        assert_eq!(out.spec.polarity, Polarity::Deny);
        assert_eq!(out.spec.relation, DiscourseRelation::Contrast);
        assert!(out.spec.preselect_one);
        assert!(out.trace.licensed);
        assert_eq!(out.trace.frames.len(), 3);
        assert_eq!(out.trace.sems.len(), 1);
        assert_eq!(out.trace.sems[0].head_type(), &HeadType::Null);
        assert_eq!(out.trace.unverbalized, vec![(Symbol::new("endtime"), Value::clock(830))]);
        assert_eq!(out.context.centre(), Some(&"qf400".into()));
    }

    #[test]
    fn before_nine_affirms_without_relaxing() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        let out = answer_query(&kb, &frame("s1", "m1", Some(900)), &DiscourseContext::new(), &RelaxationPolicy::default());
        assert_eq!(out.spec.polarity, Polarity::Affirm);
        assert_eq!(out.trace.frames.len(), 1);
        assert_eq!(out.trace.answer, "Yes, QF400 leaves at 715am.");
        assert!(matches!(out.spec.nps[0].form, ReferringForm::IndefiniteNP { .. }));
    }

    #[test]
    fn wrong_direction_is_denied_after_exhaustion() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        let out = answer_query(&kb, &frame("m1", "s1", Some(700)), &DiscourseContext::new(), &RelaxationPolicy::default());
        assert_eq!(out.spec.polarity, Polarity::Deny);
        assert_eq!(out.spec.relation, DiscourseRelation::None);
        assert_eq!(out.trace.answer, "No.");
        // initial + three one-hour relaxations
        assert_eq!(out.trace.frames.len(), 4);
        assert_eq!(out.context.turn(), 1);
    }

    #[test]
    fn unlicensed_contrast_uses_full_np() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        let untyped = QueryFrame::new(vec![
            QueryElement::new("entity", "E", None),
            QueryElement::new("type", "T", None),
            QueryElement::new("starttime", "T1", Some(Constraint::before(ClockTime::from_hhmm(700).unwrap()))),
        ])
        .unwrap();
        let out = answer_query(&kb, &untyped, &DiscourseContext::new(), &RelaxationPolicy::default());
        assert!(!out.trace.licensed);
        assert!(!out.spec.preselect_one);
        assert_eq!(out.trace.answer, "No, but there is a flight at 715am.");
    }

    #[test]
    fn elaboration_over_two_flights() {
        let kb = load_kb(TWO_FLIGHTS_KB).unwrap();
        let asked = answer_query(&kb, &frame("s1", "m1", Some(1200)), &DiscourseContext::new(), &RelaxationPolicy::default());
        assert_eq!(asked.context.active_set().map(<[_]>::len), Some(2));

        let earliest = elaborate_set(&kb, &asked.context, Selector::Earliest).unwrap();
        assert_eq!(earliest.trace.answer, "The earliest one leaves at 715am.");
        assert_eq!(earliest.context.centre(), Some(&"qf400".into()));

        let latest = elaborate_set(&kb, &earliest.context, Selector::Latest).unwrap();
        assert_eq!(latest.trace.answer, "The latest one leaves at 930am.");
        assert_eq!(latest.context.centre(), Some(&"qf402".into()));
    }

    #[test]
    fn elaboration_over_singleton_and_empty() {
        let kb = load_kb(FLIGHTS_KB).unwrap();
        let ctx = DiscourseContext::from_parts(vec![], None, Some(vec!["qf400".into()]), 1);
        let out = elaborate_set(&kb, &ctx, Selector::Latest).unwrap();
        assert_eq!(out.trace.answer, "The latest one leaves at 715am.");
        assert!(matches!(out.spec.nps[0].form, ReferringForm::OneAnaphor { definite: true, .. }));

        assert_eq!(
            elaborate_set(&kb, &DiscourseContext::new(), Selector::Earliest),
            Err(DialogueError::NoActiveSet)
        );
        let empty = DiscourseContext::from_parts(vec![], None, Some(vec![]), 0);
        assert_eq!(elaborate_set(&kb, &empty, Selector::Earliest), Err(DialogueError::NoActiveSet));
    }
}
