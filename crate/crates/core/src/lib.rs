//! Cooperative question answering over a small travel knowledge base.
//!
//! A turn is parsed into a query frame, evaluated and if necessary relaxed,
//! planned as a speech act, and realized with context-sensitive noun phrases
//! (pronouns, definite descriptions, and *one*-anaphora).

pub mod api;
pub mod dialogue;
pub mod discourse;
pub mod fixtures;
pub mod kb;
pub mod parser;
pub mod query;
pub mod realize;
pub mod semantics;
pub mod session;
pub mod trace;

pub use dialogue::{answer_query, elaborate_set, Selector, TurnTrace};
pub use discourse::{decide_form, update_context, DiscourseContext, ReferringForm};
pub use kb::{load_kb, ClockTime, EntityId, KbError, KnowledgeBase, Symbol, Value};
pub use parser::{parse_turn, SessionDefaults};
pub use query::{QueryFrame, RelaxationPolicy};
pub use semantics::{HeadType, SemanticNP};
pub use session::{Session, TranscriptEntry};
pub use trace::TraceDoc;
