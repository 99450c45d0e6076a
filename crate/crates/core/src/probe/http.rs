use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Backend, BackendConfig, ProbeError, Request, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// OpenAI-compatible chat-completions request body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatChoiceMessage {
    #[serde(default)]
    pub content: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatChoice {
    pub message: ChatChoiceMessage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub choices: Vec<ChatChoice>,
}

impl ChatResponse {
    pub fn text(&self) -> Option<&str> {
        self.choices.first()?.message.content.as_deref()
    }
}

pub struct HttpChatBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    token: String,
    token_env: String,
    temperature: f64,
    max_tokens: Option<u32>,
}

impl HttpChatBackend {
    /// Reads the bearer token from the configured environment variable.
    pub fn from_config(cfg: &BackendConfig) -> Result<Self> {
        let token = std::env::var(&cfg.token_env)
            .ok()
            .filter(|t| !t.trim().is_empty())
            .ok_or_else(|| ProbeError::MissingToken(cfg.token_env.clone()))?;
        Self::with_token(cfg, token)
    }

    pub fn with_token(cfg: &BackendConfig, token: String) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs.max(1)))
            .build()
            .map_err(|e| ProbeError::Transport(e.to_string()))?;
        Ok(HttpChatBackend {
            client,
            endpoint: cfg.endpoint.clone(),
            model: cfg.model.clone(),
            token,
            token_env: cfg.token_env.clone(),
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
        })
    }

    pub fn request_body(&self, req: &Request<'_>) -> ChatRequest {
        ChatRequest {
            model: self.model.clone(),
            messages: vec![ChatMessage { role: "user".into(), content: req.prompt.to_string() }],
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            seed: Some(req.seed),
        }
    }
}

impl Backend for HttpChatBackend {
    fn fingerprint(&self) -> String {
        let max = self.max_tokens.map_or("none".to_string(), |m| m.to_string());
        format!("http_chat:{}:temperature={}:max_tokens={max}", self.model, self.temperature)
    }

    fn complete(&self, req: &Request<'_>) -> Result<String> {
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.token)
            .json(&self.request_body(req))
            .send()
            .map_err(|e| ProbeError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        if status == 401 || status == 403 {
            return Err(ProbeError::Unauthorized { status, env_var: self.token_env.clone() });
        }
        let body = response.text().map_err(|e| ProbeError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            let body: String = body.chars().take(300).collect();
            return Err(ProbeError::Http { status, body });
        }
        let parsed: ChatResponse = serde_json::from_str(&body).map_err(|e| ProbeError::Malformed(e.to_string()))?;
        match parsed.text().map(str::trim) {
            Some(text) if !text.is_empty() => Ok(text.to_string()),
            _ => Err(ProbeError::EmptyResponse),
        }
    }
}
