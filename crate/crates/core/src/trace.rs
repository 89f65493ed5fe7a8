//! JSON shape of a turn trace, shared by the service, client and CLI.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::dialogue::{DiscourseRelation, TurnError, TurnTrace};
use crate::kb::Value;
use crate::query::{ElementStatus, QueryFrame};
use crate::semantics::{SemanticNP, NULL_TYPE_LITERAL};

/// One row of a query frame table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRow {
    pub attribute: String,
    pub variable: String,
    pub status: ElementStatus,
    pub given: Option<String>,
    pub new: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemStatus {
    /// `"+"` or `"-"`.
    pub given: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemBody {
    #[serde(rename = "type")]
    pub type_: String,
    pub properties: IndexMap<String, String>,
}

/// Attribute-value matrix for one noun phrase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemView {
    pub index: Option<String>,
    pub status: SemStatus,
    pub sem: SemBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub frames: Vec<Vec<FrameRow>>,
    pub relation: DiscourseRelation,
    pub licensed: bool,
    pub sems: Vec<SemView>,
    pub answer: String,
    pub unverbalized: IndexMap<String, String>,
    pub error: Option<TurnError>,
}

fn avm_value(value: &Value) -> String {
    match value {
        Value::ClockTime(t) => t.padded(),
        other => other.to_string(),
    }
}

pub fn frame_rows(frame: &QueryFrame) -> Vec<FrameRow> {
    frame
        .elements()
        .iter()
        .map(|e| FrameRow {
            attribute: e.attribute().to_string(),
            variable: e.variable().to_string(),
            status: e.status(),
            given: e.given_cell(),
            new: e.new_cell(),
        })
        .collect()
}

impl From<&SemanticNP> for SemView {
    fn from(sem: &SemanticNP) -> Self {
        SemView {
            index: sem.index().map(str::to_string),
            status: SemStatus {
                given: if sem.is_given() { "+" } else { "-" }.to_string(),
            },
            sem: SemBody {
                type_: sem
                    .head_type()
                    .as_symbol()
                    .map_or(NULL_TYPE_LITERAL.to_string(), ToString::to_string),
                properties: sem
                    .properties()
                    .iter()
                    .map(|(a, v)| (a.to_string(), avm_value(v)))
                    .collect(),
            },
        }
    }
}

impl From<&TurnTrace> for TraceDoc {
    fn from(trace: &TurnTrace) -> Self {
        TraceDoc {
            frames: trace.frames.iter().map(frame_rows).collect(),
            relation: trace.relation,
            licensed: trace.licensed,
            sems: trace.sems.iter().map(SemView::from).collect(),
            answer: trace.answer.clone(),
            unverbalized: trace
                .unverbalized
                .iter()
                .map(|(a, v)| (a.to_string(), avm_value(v)))
                .collect(),
            error: trace.error.clone(),
        }
    }
}

impl Serialize for TurnTrace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TraceDoc::from(self).serialize(serializer)
    }
}

/// Render frames as fixed-width five-column tables.
pub fn render_frames(frames: &[Vec<FrameRow>]) -> String {
    let mut out = String::new();
    for (i, rows) in frames.iter().enumerate() {
        let header = ["attribute", "variable", "status", "given", "new"];
        let cells: Vec<[String; 5]> = rows
            .iter()
            .map(|r| {
                [
                    r.attribute.clone(),
                    r.variable.clone(),
                    r.status.to_string(),
                    r.given.clone().unwrap_or_default(),
                    r.new.clone().unwrap_or_default(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cols: [&str; 5]| {
            let padded: Vec<String> = cols
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join(" | ").trim_end().to_string()
        };
        out.push_str(&format!("frame {}\n", i + 1));
        out.push_str(&line(header));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row.each_ref().map(String::as_str)));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Symbol;

    #[test]
    fn sem_view_pads_clock_values() {
        let sem = SemanticNP::new(Symbol::new("flight"), false)
            .with_index("qf400")
            .with_property("starttime", Value::clock(715));
        let view = SemView::from(&sem);
        assert_eq!(
            serde_json::to_value(&view).unwrap(),
            serde_json::json!({
                "index": "qf400",
                "status": {"given": "-"},
                "sem": {"type": "flight", "properties": {"starttime": "0715"}}
            })
        );
    }

    #[test]
    fn table_rendering() {
        let rows = vec![FrameRow {
            attribute: "starttime".into(),
            variable: "T1".into(),
            status: ElementStatus::Relaxed,
            given: Some("T1 < 0800".into()),
            new: None,
        }];
        assert_eq!(
            render_frames(&[rows]),
            "frame 1\nattribute | variable | status  | given     | new\nstarttime | T1       | relaxed | T1 < 0800 |\n"
        );
    }
}
