//! Template surface realization.
//!
//! The null head type is the cue for the pro-form *one*. Clock-time
//! properties become a trailing `at <time>` phrase; everything else is a
//! premodifier in preferred attribute order.

use thiserror::Error;

use crate::dialogue::{DiscourseRelation, Polarity, SpeechActSpec};
use crate::discourse::ReferringForm;
use crate::kb::{ClockTime, Value};
use crate::semantics::{in_preferred_order, HeadType, SemanticNP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("bare `one` with no modifiers cannot be realized")]
    BareOne,
    #[error("speech act {polarity:?}/{relation:?} has no template")]
    NoTemplate {
        polarity: Polarity,
        relation: DiscourseRelation,
    },
    #[error("speech act is missing `{0}`")]
    Missing(&'static str),
}

/// `715am`, `7am`, `12pm`, `12am`, `130pm`.
pub fn realize_time(t: ClockTime) -> String {
    let suffix = if t.hours() < 12 { "am" } else { "pm" };
    let hour = match t.hours() % 12 {
        0 => 12,
        h => h,
    };
    if t.minutes() == 0 {
        format!("{hour}{suffix}")
    } else {
        format!("{hour}{:02}{suffix}", t.minutes())
    }
}

/// Surface form of a property value.
pub fn realize_value(value: &Value) -> String {
    match value {
        Value::ClockTime(t) => realize_time(*t),
        Value::Symbol(s) => s.as_str().replace('_', "-"),
        Value::Text(s) => s.clone(),
        Value::EntityRef(e) => e.to_string(),
    }
}

fn starts_with_vowel(word: &str) -> bool {
    matches!(
        word.chars().next().map(|c| c.to_ascii_lowercase()),
        Some('a' | 'e' | 'i' | 'o' | 'u')
    )
}

pub fn realize_np(form: &ReferringForm) -> Result<String, RealizeError> {
    match form {
        ReferringForm::Pronoun => Ok("it".to_string()),
        ReferringForm::DefiniteNP { sem } => realize_sem(sem, true),
        ReferringForm::IndefiniteNP { sem } => realize_sem(sem, false),
        ReferringForm::OneAnaphor { sem, definite } => realize_sem(sem, *definite),
    }
}

/// Realize NP semantics with the given definiteness.
///
/// An indefinite one-anaphor takes no article unless it has a premodifier:
/// `one at 715am` but `a reef-green one`.
pub fn realize_sem(sem: &SemanticNP, definite: bool) -> Result<String, RealizeError> {
    let mut properties = sem.properties().to_vec();
    in_preferred_order(&mut properties);

    let (times, modifiers): (Vec<_>, Vec<_>) = properties
        .iter()
        .partition(|(_, v)| matches!(v, Value::ClockTime(_)));
    if sem.head_type().is_null() && properties.is_empty() {
        return Err(RealizeError::BareOne);
    }

    let mut words: Vec<String> = modifiers.iter().map(|(_, v)| realize_value(v)).collect();
    words.push(match sem.head_type() {
        HeadType::Type(t) => t.as_str().replace('_', "-"),
        HeadType::Null => "one".to_string(),
    });

    let determiner = if definite {
        Some("the")
    } else if sem.head_type().is_null() && modifiers.is_empty() {
        None
    } else if starts_with_vowel(&words[0]) {
        Some("an")
    } else {
        Some("a")
    };

    let mut out = Vec::with_capacity(words.len() + 2);
    out.extend(determiner.map(str::to_string));
    out.extend(words);
    if !times.is_empty() {
        let phrases: Vec<String> = times
            .iter()
            .map(|(_, v)| format!("at {}", realize_value(v)))
            .collect();
        out.push(phrases.join(" and "));
    }
    Ok(out.join(" "))
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn payload<'a>(spec: &'a SpeechActSpec, attribute: &str) -> Option<&'a Value> {
    spec.payload
        .iter()
        .find(|(a, _)| a == attribute)
        .map(|(_, v)| v)
}

pub fn realize_response(spec: &SpeechActSpec) -> Result<String, RealizeError> {
    let first_np = || {
        spec.nps
            .first()
            .ok_or(RealizeError::Missing("noun phrase"))
            .and_then(|np| realize_np(&np.form))
    };
    let time = |attribute| {
        payload(spec, attribute).and_then(Value::as_clock).map(realize_time)
    };
    let sentence = match (spec.polarity, spec.relation) {
        (Polarity::Deny, DiscourseRelation::Contrast) => {
            format!("No, but there is {}.", first_np()?)
        }
        (Polarity::Deny, DiscourseRelation::None) => "No.".to_string(),
        (Polarity::Affirm, _) => {
            let name = payload(spec, "name")
                .map(realize_value)
                .ok_or(RealizeError::Missing("name"))?;
            match time("starttime") {
                Some(t) => format!("Yes, {name} leaves at {t}."),
                None => format!("Yes, {name}."),
            }
        }
        (Polarity::Inform, DiscourseRelation::Elaboration) => {
            let t = time("starttime").ok_or(RealizeError::Missing("starttime"))?;
            format!("{} leaves at {t}.", first_np()?)
        }
        (polarity, relation) => return Err(RealizeError::NoTemplate { polarity, relation }),
    };
    Ok(capitalize(&sentence))
}
