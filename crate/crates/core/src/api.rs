//! Request and response bodies of the HTTP service.

use serde::{Deserialize, Serialize};

use crate::session::TranscriptEntry;
use crate::trace::TraceDoc;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home_city: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRequest {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnResponse {
    pub answer: String,
    pub trace: TraceDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptItem {
    pub user: String,
    pub answer: String,
    pub trace: TraceDoc,
}

impl From<&TranscriptEntry> for TranscriptItem {
    fn from(entry: &TranscriptEntry) -> Self {
        TranscriptItem {
            user: entry.user.clone(),
            answer: entry.answer.clone(),
            trace: TraceDoc::from(&entry.trace),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub transcript: Vec<TranscriptItem>,
}

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    /// Machine-readable code, e.g. `session_not_found`.
    pub error: String,
    pub message: String,
}
