//! Async HTTP client for the litgraph service.

use std::time::Duration;

use litgraph_core::wire::{
    ApiErrorBody, ArticleResponse, HealthResponse, IngestResponse, RecommendationView, SearchResult, SubgraphResponse,
};
use serde::de::DeserializeOwned;
use thiserror::Error;
use url::Url;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid server URL: {0}")]
    Url(#[from] url::ParseError),
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    /// The service answered with its JSON error body.
    #[error("server returned {}: {}", .0.http_status, .0.message)]
    Api(ApiErrorBody),
    /// A non-2xx response whose body was not the documented error shape.
    #[error("server returned {status}: {body}")]
    Unexpected { status: u16, body: String },
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone)]
pub struct Client {
    base: Url,
    http: reqwest::Client,
}

impl Client {
    /// `base_url` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base_url: &str) -> Result<Self, ClientError> {
        Self::with_timeout(base_url, DEFAULT_TIMEOUT)
    }

    /// Like [`Client::new`] with a per-request timeout.
    pub fn with_timeout(base_url: &str, timeout: Duration) -> Result<Self, ClientError> {
        let mut base = Url::parse(base_url)?;
        if !base.path().ends_with('/') {
            let path = format!("{}/", base.path());
            base.set_path(&path);
        }
        Ok(Client { base, http: reqwest::Client::builder().timeout(timeout).build()? })
    }

    fn url(&self, path: &str, params: &[(&str, String)]) -> Result<Url, ClientError> {
        let mut url = self.base.join(path)?;
        if !params.is_empty() {
            url.query_pairs_mut().extend_pairs(params.iter().map(|(k, v)| (k, v.as_str())));
        }
        Ok(url)
    }

    async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let body = resp.text().await?;
        match serde_json::from_str::<ApiErrorBody>(&body) {
            Ok(err) => Err(ClientError::Api(err)),
            Err(_) => Err(ClientError::Unexpected { status: status.as_u16(), body }),
        }
    }

    async fn get<T: DeserializeOwned>(&self, path: &str, params: &[(&str, String)]) -> Result<T, ClientError> {
        let resp = self.http.get(self.url(path, params)?).send().await?;
        Self::decode(resp).await
    }

    pub async fn search(&self, q: &str, limit: Option<usize>) -> Result<Vec<SearchResult>, ClientError> {
        let mut params = vec![("q", q.to_owned())];
        if let Some(l) = limit {
            params.push(("limit", l.to_string()));
        }
        self.get("api/search", &params).await
    }

    pub async fn subgraph(&self, q: &str, radius: Option<usize>, max_nodes: Option<usize>) -> Result<SubgraphResponse, ClientError> {
        let mut params = vec![("q", q.to_owned())];
        if let Some(r) = radius {
            params.push(("radius", r.to_string()));
        }
        if let Some(m) = max_nodes {
            params.push(("max_nodes", m.to_string()));
        }
        self.get("api/subgraph", &params).await
    }

    pub async fn article(&self, pmid: &str) -> Result<ArticleResponse, ClientError> {
        let mut url = self.url("api/article/", &[])?;
        url.path_segments_mut().map_err(|_| url::ParseError::RelativeUrlWithCannotBeABaseBase)?.pop_if_empty().push(pmid);
        Self::decode(self.http.get(url).send().await?).await
    }

    pub async fn recommend(&self, q: &str, k: Option<usize>) -> Result<Vec<RecommendationView>, ClientError> {
        let mut params = vec![("q", q.to_owned())];
        if let Some(k) = k {
            params.push(("k", k.to_string()));
        }
        self.get("api/recommend", &params).await
    }

    /// Posts a JSONL corpus body.
    pub async fn ingest(&self, corpus_jsonl: impl Into<String>) -> Result<IngestResponse, ClientError> {
        let resp = self
            .http
            .post(self.url("api/ingest", &[])?)
            .header(reqwest::header::CONTENT_TYPE, "application/x-ndjson")
            .body(corpus_jsonl.into())
            .send()
            .await?;
        Self::decode(resp).await
    }

    pub async fn health(&self) -> Result<HealthResponse, ClientError> {
        self.get("api/health", &[]).await
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn urls_join_under_base_path() {
        let c = Client::new("http://localhost:9000/prefix").unwrap();
        let u = c.url("api/search", &[("q", "a b&c".into())]).unwrap();
        assert_eq!(u.as_str(), "http://localhost:9000/prefix/api/search?q=a+b%26c");
        assert!(Client::new("not a url").is_err());
    }
}
