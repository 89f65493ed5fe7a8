//! Async client for the coopq HTTP service.

use coopq_core::api::{ApiError, CreateSession, SessionCreated, Transcript, TranscriptItem, TurnRequest, TurnResponse};
use reqwest::{Response, StatusCode};
use serde::de::DeserializeOwned;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    #[error("server returned {status}: {}", body.message)]
    Api { status: StatusCode, body: ApiError },
    #[error("server returned {status}: {text}")]
    Unexpected { status: StatusCode, text: String },
}

impl ClientError {
    /// The machine-readable error code, when the server sent one.
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Api { body, .. } => Some(&body.error),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    http: reqwest::Client,
    base: String,
}

async fn check(resp: Response) -> Result<Response, ClientError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp);
    }
    let text = resp.text().await?;
    Err(match serde_json::from_str::<ApiError>(&text) {
        Ok(body) => ClientError::Api { status, body },
        Err(_) => ClientError::Unexpected { status, text },
    })
}

async fn json<T: DeserializeOwned>(resp: Response) -> Result<T, ClientError> {
    Ok(check(resp).await?.json().await?)
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            http: reqwest::Client::new(),
            base: base.into().trim_end_matches('/').to_string(),
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub async fn create_session(&self, home_city: Option<&str>) -> Result<String, ClientError> {
        let body = CreateSession {
            home_city: home_city.map(str::to_string),
        };
        let resp = self.http.post(self.url("/api/sessions")).json(&body).send().await?;
        Ok(json::<SessionCreated>(resp).await?.session_id)
    }

    pub async fn send_turn(&self, session: &str, text: &str) -> Result<TurnResponse, ClientError> {
        let body = TurnRequest { text: text.to_string() };
        let resp = self
            .http
            .post(self.url(&format!("/api/sessions/{session}/turns")))
            .json(&body)
            .send()
            .await?;
        json(resp).await
    }

    pub async fn transcript(&self, session: &str) -> Result<Vec<TranscriptItem>, ClientError> {
        let resp = self.http.get(self.url(&format!("/api/sessions/{session}"))).send().await?;
        Ok(json::<Transcript>(resp).await?.transcript)
    }

    pub async fn delete_session(&self, session: &str) -> Result<(), ClientError> {
        let resp = self.http.delete(self.url(&format!("/api/sessions/{session}"))).send().await?;
        check(resp).await.map(drop)
    }
}
