//! Per-session discourse state and the referring-form decision.

use serde::Serialize;

use crate::kb::{EntityId, KnowledgeBase};
use crate::semantics::{
    build_distinguishing_sem, build_initial_sem, elide_shared, SemanticNP, SemanticsError,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mention {
    pub entity: EntityId,
    /// Full (unelided) semantics, so later NPs can compare against it.
    pub sem: SemanticNP,
    pub turn: u32,
    pub realized_as: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiscourseContext {
    history: Vec<Mention>,
    centre: Option<EntityId>,
    active_set: Option<Vec<EntityId>>,
    turn: u32,
}

impl DiscourseContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assemble a context directly, e.g. for scripted discourse. Unlike
    /// [`update_context`], this does not require the centre to have been
    /// mentioned.
    pub fn from_parts(
        history: Vec<Mention>,
        centre: Option<EntityId>,
        active_set: Option<Vec<EntityId>>,
        turn: u32,
    ) -> Self {
        DiscourseContext {
            history,
            centre,
            active_set,
            turn,
        }
    }

    pub fn history(&self) -> &[Mention] {
        &self.history
    }

    pub fn centre(&self) -> Option<&EntityId> {
        self.centre.as_ref()
    }

    pub fn active_set(&self) -> Option<&[EntityId]> {
        self.active_set.as_deref()
    }

    pub fn turn(&self) -> u32 {
        self.turn
    }

    pub fn is_mentioned(&self, entity: &EntityId) -> bool {
        self.history.iter().any(|m| &m.entity == entity)
    }

    /// Distinct mentioned entities, in order of first mention.
    pub fn mentioned_entities(&self) -> Vec<&EntityId> {
        let mut seen: Vec<&EntityId> = Vec::new();
        for m in &self.history {
            if !seen.contains(&&m.entity) {
                seen.push(&m.entity);
            }
        }
        seen
    }

    /// Semantics of every earlier NP, oldest first.
    pub fn antecedents(&self) -> Vec<SemanticNP> {
        self.history.iter().map(|m| m.sem.clone()).collect()
    }

    /// Append a mention in the current turn.
    pub fn record_mention(&mut self, entity: EntityId, sem: SemanticNP, surface: impl Into<String>) {
        self.history.push(Mention {
            entity,
            sem,
            turn: self.turn,
            realized_as: surface.into(),
        });
    }

    /// Make a mentioned entity the centre. Returns false (and changes nothing)
    /// if the entity has not been mentioned.
    pub fn focus(&mut self, entity: &EntityId) -> bool {
        if self.is_mentioned(entity) {
            self.centre = Some(entity.clone());
            true
        } else {
            false
        }
    }

    pub fn advance_turn(&mut self) {
        self.turn += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ReferringForm {
    Pronoun,
    DefiniteNP { sem: SemanticNP },
    IndefiniteNP { sem: SemanticNP },
    /// `sem` always has the null head type.
    OneAnaphor { sem: SemanticNP, definite: bool },
}

impl ReferringForm {
    pub fn sem(&self) -> Option<&SemanticNP> {
        match self {
            ReferringForm::Pronoun => None,
            ReferringForm::DefiniteNP { sem }
            | ReferringForm::IndefiniteNP { sem }
            | ReferringForm::OneAnaphor { sem, .. } => Some(sem),
        }
    }

    pub fn is_definite(&self) -> bool {
        match self {
            ReferringForm::Pronoun | ReferringForm::DefiniteNP { .. } => true,
            ReferringForm::IndefiniteNP { .. } => false,
            ReferringForm::OneAnaphor { definite, .. } => *definite,
        }
    }
}

/// Pronoun if in focus; otherwise a definite (if mentioned) or initial
/// indefinite description, with shared structure elided into a one-anaphor.
pub fn decide_form(
    referent: &EntityId,
    context: &DiscourseContext,
    kb: &KnowledgeBase,
) -> Result<ReferringForm, SemanticsError> {
    if context.centre() == Some(referent) {
        return Ok(ReferringForm::Pronoun);
    }
    let antecedents = context.antecedents();
    if context.is_mentioned(referent) {
        let sem = build_distinguishing_sem(referent, context, kb)?;
        let elided = elide_shared(&sem, &antecedents);
        Ok(if elided.head_type().is_null() {
            ReferringForm::OneAnaphor {
                sem: elided,
                definite: true,
            }
        } else {
            ReferringForm::DefiniteNP { sem }
        })
    } else {
        let sem = build_initial_sem(referent, kb)?;
        let elided = elide_shared(&sem, &antecedents);
        Ok(if elided.head_type().is_null() {
            ReferringForm::OneAnaphor {
                sem: elided,
                definite: false,
            }
        } else {
            ReferringForm::IndefiniteNP { sem }
        })
    }
}

/// Record a turn's answer: new mentions are appended, a single answer entity
/// becomes the centre, and several answer entities become the active set.
pub fn update_context(
    context: &DiscourseContext,
    answer_entities: &[EntityId],
    realized: Vec<(EntityId, SemanticNP, String)>,
) -> DiscourseContext {
    let mut next = context.clone();
    for (entity, sem, surface) in realized {
        next.record_mention(entity, sem, surface);
    }
    if let [single] = answer_entities {
        next.focus(single);
    }
    next.active_set = (answer_entities.len() > 1).then(|| answer_entities.to_vec());
    next.turn += 1;
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::WARDROBE_KB;
    use crate::kb::load_kb;

    fn ids(xs: &[&str]) -> Vec<EntityId> {
        xs.iter().map(|x| EntityId::new(*x)).collect()
    }

    #[test]
    fn singleton_answer_becomes_centre() {
        let ctx = DiscourseContext::new();
        let sem = SemanticNP::from("flight");
        let next = update_context(&ctx, &ids(&["qf400"]), vec![("qf400".into(), sem, "one at 715am".into())]);
        assert_eq!(next.centre(), Some(&"qf400".into()));
        assert_eq!(next.active_set(), None);
        assert_eq!(next.turn(), 1);
        assert_eq!(next.history().len(), 1);
        assert_eq!(next.history()[0].turn, 0);
    }

    #[test]
    fn plural_answer_becomes_active_set() {
        let ctx = DiscourseContext::new();
        let sem = SemanticNP::from("flight");
        let next = update_context(
            &ctx,
            &ids(&["qf400", "qf402"]),
            vec![("qf400".into(), sem, "a flight".into())],
        );
        assert_eq!(next.active_set(), Some(ids(&["qf400", "qf402"]).as_slice()));
        assert_eq!(next.centre(), None);
    }

    #[test]
    fn empty_answer_only_advances_turn() {
        let ctx = DiscourseContext::new();
        let next = update_context(&ctx, &[], vec![]);
        assert_eq!(next, DiscourseContext::from_parts(vec![], None, None, 1));
    }

    #[test]
    fn unmentioned_centre_is_not_set_by_update() {
        let next = update_context(&DiscourseContext::new(), &ids(&["qf400"]), vec![]);
        assert_eq!(next.centre(), None);
    }

    #[test]
    fn new_referent_in_empty_context_gets_full_indefinite() {
        let kb = load_kb(WARDROBE_KB).unwrap();
        let form = decide_form(&"x1".into(), &DiscourseContext::new(), &kb).unwrap();
        match form {
            ReferringForm::IndefiniteNP { sem } => {
                assert!(!sem.is_given());
                assert_eq!(sem.property("colour"), Some(&crate::kb::Value::symbol("red")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
