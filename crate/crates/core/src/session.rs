//! One user's conversation: parse, answer, realize, remember.

use std::sync::Arc;

use serde::Serialize;

use crate::dialogue::{answer_query, elaborate_set, DialogueError, TurnErrorKind, TurnTrace};
use crate::discourse::DiscourseContext;
use crate::kb::{KnowledgeBase, Symbol};
use crate::parser::{frame_from_parse, parse_turn, ParseError, ParsedTurn, SessionDefaults};
use crate::query::RelaxationPolicy;

pub const NOT_UNDERSTOOD: &str = "Sorry, I didn't understand that.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub user: String,
    pub answer: String,
    pub trace: TurnTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown home city {0:?}")]
pub struct UnknownHomeCity(pub String);

#[derive(Debug, Clone)]
pub struct Session {
    kb: Arc<KnowledgeBase>,
    context: DiscourseContext,
    defaults: SessionDefaults,
    policy: RelaxationPolicy,
    transcript: Vec<TranscriptEntry>,
}

impl Session {
    /// Fails if the home city is not a city in the knowledge base.
    pub fn new(kb: Arc<KnowledgeBase>, defaults: SessionDefaults) -> Result<Self, UnknownHomeCity> {
        if kb.find_by_name(&Symbol::new("city"), &defaults.home_city).is_none() {
            return Err(UnknownHomeCity(defaults.home_city));
        }
        Ok(Session {
            kb,
            context: DiscourseContext::new(),
            defaults,
            policy: RelaxationPolicy::default(),
            transcript: Vec::new(),
        })
    }

    pub fn with_policy(mut self, policy: RelaxationPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn context(&self) -> &DiscourseContext {
        &self.context
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn defaults(&self) -> &SessionDefaults {
        &self.defaults
    }

    /// Answer one user turn. Failed turns still advance the turn counter and
    /// are recorded in the transcript.
    pub fn run_turn(&mut self, text: &str) -> (String, TurnTrace) {
        let outcome = match parse_turn(text) {
            Ok(parsed @ ParsedTurn::Query { .. }) => {
                match frame_from_parse(&parsed, &self.kb, &self.defaults) {
                    Ok(frame) => Ok(answer_query(&self.kb, &frame, &self.context, &self.policy)),
                    Err(ParseError::UnknownCity(city)) => Err(TurnTrace::failed(
                        TurnErrorKind::UnknownCity,
                        format!("unknown city {city:?}"),
                        format!("Sorry, I don't know a city called {city}."),
                    )),
                    Err(e) => Err(TurnTrace::failed(TurnErrorKind::Unparseable, e.to_string(), NOT_UNDERSTOOD)),
                }
            }
            Ok(ParsedTurn::Elaborate(selector)) => {
                elaborate_set(&self.kb, &self.context, selector).map_err(|e| match e {
                    DialogueError::NoActiveSet => TurnTrace::failed(
                        TurnErrorKind::NoActiveSet,
                        e.to_string(),
                        "Sorry, there is nothing to choose from yet.",
                    ),
                    DialogueError::NoStartTime => TurnTrace::failed(
                        TurnErrorKind::Internal,
                        e.to_string(),
                        "Sorry, I don't know when any of them leave.",
                    ),
                })
            }
            Err(e) => Err(TurnTrace::failed(TurnErrorKind::Unparseable, e.to_string(), NOT_UNDERSTOOD)),
        };
        let trace = match outcome {
            Ok(outcome) => {
                self.context = outcome.context;
                outcome.trace
            }
            Err(trace) => {
                self.context.advance_turn();
                trace
            }
        };
        self.transcript.push(TranscriptEntry {
            user: text.to_string(),
            answer: trace.answer.clone(),
            trace: trace.clone(),
        });
        (trace.answer.clone(), trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{FLIGHTS_KB, TWO_FLIGHTS_KB};
    use crate::kb::load_kb;

    fn session(src: &str) -> Session {
        Session::new(Arc::new(load_kb(src).unwrap()), SessionDefaults::default()).unwrap()
    }

    #[test]
    fn dialogue_then_elaboration() {
        let mut s = session(FLIGHTS_KB);
        let (answer, trace) = s.run_turn("Is there a flight to Melbourne before 7am?");
        assert_eq!(answer, "No, but there is one at 715am.");
        assert_eq!(trace.frames.len(), 3);
        let (answer, _) = s.run_turn("Which is the earliest one?");
        assert_eq!(answer, "The earliest one leaves at 715am.");
        assert_eq!(s.transcript().len(), 2);
        assert_eq!(s.context().turn(), 2);
    }

    #[test]
    fn errors_are_turns() {
        let mut s = session(TWO_FLIGHTS_KB);
        let (answer, trace) = s.run_turn("hello");
        assert_eq!(answer, NOT_UNDERSTOOD);
        assert_eq!(trace.error.unwrap().kind, TurnErrorKind::Unparseable);
        let (answer, trace) = s.run_turn("which is the latest one");
        assert_eq!(answer, "Sorry, there is nothing to choose from yet.");
        assert_eq!(trace.error.unwrap().kind, TurnErrorKind::NoActiveSet);
        let (answer, trace) = s.run_turn("is there a flight to Atlantis");
        assert_eq!(answer, "Sorry, I don't know a city called Atlantis.");
        assert_eq!(trace.error.unwrap().kind, TurnErrorKind::UnknownCity);
        assert_eq!(s.context().turn(), 3);
        assert!(s.context().history().is_empty());
    }

    #[test]
    fn home_city_must_exist() {
        let kb = Arc::new(load_kb(FLIGHTS_KB).unwrap());
        let err = Session::new(kb, SessionDefaults { home_city: "Perth".into() }).unwrap_err();
        assert_eq!(err, UnknownHomeCity("Perth".into()));
    }
}
