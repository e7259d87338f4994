//! Minimal GitHub REST v3 client for issue threads.

use serde::Deserialize;

use super::{AuthorAssociation, IssueComment, IssueThread};
use crate::error::{Error, Result};

pub const DEFAULT_API_BASE: &str = "https://api.github.com";
const PER_PAGE: usize = 100;
const MAX_PAGES: usize = 1000;

#[derive(Clone, Debug)]
pub struct HttpResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

/// Blocking GET transport. Non-2xx statuses are returned, not raised.
pub trait HttpTransport {
    fn get(&self, url: &str, headers: &[(&str, String)]) -> Result<HttpResponse>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl Default for UreqTransport {
    fn default() -> Self {
        UreqTransport {
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(60))
                .build(),
        }
    }
}

impl HttpTransport for UreqTransport {
    fn get(&self, url: &str, headers: &[(&str, String)]) -> Result<HttpResponse> {
        let mut req = self.agent.get(url);
        for (k, v) in headers {
            req = req.set(k, v);
        }
        let resp = match req.call() {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(e) => return Err(Error::Transport(e.to_string())),
        };
        let status = resp.status();
        let headers = resp
            .headers_names()
            .into_iter()
            .filter_map(|name| resp.header(&name).map(|v| (name.clone(), v.to_string())))
            .collect();
        let body = resp
            .into_string()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(HttpResponse {
            status,
            headers,
            body,
        })
    }
}

#[derive(Deserialize)]
struct GhUser {
    login: String,
}

#[derive(Deserialize)]
struct GhIssue {
    title: String,
    user: Option<GhUser>,
    author_association: String,
    created_at: String,
    body: Option<String>,
}

#[derive(Deserialize)]
struct GhComment {
    user: Option<GhUser>,
    author_association: String,
    created_at: String,
    body: Option<String>,
}

pub struct GitHubClient<T: HttpTransport = UreqTransport> {
    base_url: String,
    token: Option<String>,
    transport: T,
}

impl GitHubClient<UreqTransport> {
    pub fn new(token: Option<String>) -> Self {
        Self::with_transport(DEFAULT_API_BASE, token, UreqTransport::default())
    }
}

impl<T: HttpTransport> GitHubClient<T> {
    pub fn with_transport(
        base_url: impl Into<String>,
        token: Option<String>,
        transport: T,
    ) -> Self {
        GitHubClient {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            token,
            transport,
        }
    }

    fn get(&self, url: &str) -> Result<HttpResponse> {
        let mut headers = vec![
            ("Accept", "application/vnd.github+json".to_string()),
            ("User-Agent", "infotypes".to_string()),
        ];
        if let Some(token) = &self.token {
            headers.push(("Authorization", format!("Bearer {token}")));
        }
        let resp = self.transport.get(url, &headers)?;
        match resp.status {
            200..=299 => Ok(resp),
            404 => Err(Error::NotFound(url.to_string())),
            403 | 429 if resp.header("x-ratelimit-remaining") == Some("0") => {
                let reset = resp
                    .header("x-ratelimit-reset")
                    .and_then(|v| v.trim().parse().ok())
                    .unwrap_or(0);
                Err(Error::RateLimited { reset })
            }
            status => Err(Error::Http {
                status,
                url: url.to_string(),
            }),
        }
    }

    fn decode<D: for<'de> Deserialize<'de>>(url: &str, resp: &HttpResponse) -> Result<D> {
        serde_json::from_str(&resp.body)
            .map_err(|e| Error::Transport(format!("unexpected response body from {url}: {e}")))
    }

    /// Fetches an issue and all of its comments. Sentences are left empty.
    pub fn fetch_thread(&self, owner: &str, repo: &str, issue_number: u64) -> Result<IssueThread> {
        let issue_url = format!(
            "{}/repos/{owner}/{repo}/issues/{issue_number}",
            self.base_url
        );
        let issue: GhIssue = Self::decode(&issue_url, &self.get(&issue_url)?)?;

        let mut comments = vec![to_comment(
            issue.user,
            &issue.author_association,
            &issue.created_at,
            issue.body,
        )?];
        let mut next = Some(format!("{issue_url}/comments?per_page={PER_PAGE}&page=1"));
        let mut pages = 0;
        while let Some(url) = next.take() {
            pages += 1;
            if pages > MAX_PAGES {
                return Err(Error::Transport(format!(
                    "pagination did not terminate for {issue_url}"
                )));
            }
            let resp = self.get(&url)?;
            let page: Vec<GhComment> = Self::decode(&url, &resp)?;
            let full = page.len() == PER_PAGE;
            for c in page {
                comments.push(to_comment(
                    c.user,
                    &c.author_association,
                    &c.created_at,
                    c.body,
                )?);
            }
            next = match resp.header("link") {
                Some(link) => next_link(link),
                None if full => Some(format!(
                    "{issue_url}/comments?per_page={PER_PAGE}&page={}",
                    pages + 1
                )),
                None => None,
            };
        }
        comments.sort_by_key(|c| c.created_at);
        let opened_at = comments[0].created_at;
        IssueThread::new(
            format!("{owner}/{repo}"),
            issue_number,
            issue.title,
            opened_at,
            comments,
        )
    }
}

fn to_comment(
    user: Option<GhUser>,
    association: &str,
    created_at: &str,
    body: Option<String>,
) -> Result<IssueComment> {
    let created_at = super::jsonl::parse_timestamp(created_at).map_err(Error::Transport)?;
    Ok(IssueComment::new(
        user.map(|u| u.login).unwrap_or_else(|| "ghost".to_string()),
        AuthorAssociation::from_github(association),
        created_at,
        body.unwrap_or_default(),
    ))
}

/// Extracts the `rel="next"` target from an RFC 8288 Link header.
fn next_link(header: &str) -> Option<String> {
    header.split(',').find_map(|part| {
        let mut pieces = part.split(';');
        let target = pieces.next()?.trim();
        let is_next = pieces.any(|p| p.trim().replace(' ', "") == "rel=\"next\"");
        (is_next && target.starts_with('<') && target.ends_with('>'))
            .then(|| target[1..target.len() - 1].to_string())
    })
}

/// Fetches a thread from api.github.com.
pub fn fetch_thread(
    owner: &str,
    repo: &str,
    issue_number: u64,
    auth_token: Option<&str>,
) -> Result<IssueThread> {
    GitHubClient::new(auth_token.map(str::to_string)).fetch_thread(owner, repo, issue_number)
}
