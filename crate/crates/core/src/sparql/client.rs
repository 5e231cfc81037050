use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};

use super::endpoint::EndpointDescriptor;
use super::results::{QueryResult, RESULTS_JSON_MEDIA_TYPE};
use super::ClientError;

/// Queries at or above this length are sent as form-encoded POST.
pub const MAX_GET_QUERY_LEN: usize = 2_000;

const BODY_EXCERPT_LEN: usize = 300;

/// Exponential backoff between attempts: `base`, `2·base`, `4·base`, … up to `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub base: Duration,
    pub cap: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            base: Duration::from_secs(1),
            cap: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (0-based).
    pub fn delay(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry).unwrap_or(u32::MAX);
        self.base.saturating_mul(factor).min(self.cap)
    }
}

/// Serializes requests per endpoint and spaces them by the endpoint's
/// politeness delay, measured from the end of one request to the start of
/// the next.
#[derive(Debug, Default)]
pub struct PolitenessLimiter {
    slots: Mutex<HashMap<String, Arc<Mutex<Option<Instant>>>>>,
}

pub struct PolitenessPermit<'a> {
    last_done: MutexGuard<'a, Option<Instant>>,
}

impl Drop for PolitenessPermit<'_> {
    fn drop(&mut self) {
        *self.last_done = Some(Instant::now());
    }
}

impl PolitenessLimiter {
    fn slot(&self, endpoint_id: &str) -> Arc<Mutex<Option<Instant>>> {
        let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
        slots.entry(endpoint_id.to_string()).or_default().clone()
    }

    /// Runs `f` holding the endpoint's slot, after waiting out the delay.
    pub fn with_permit<T>(&self, endpoint_id: &str, delay: Duration, f: impl FnOnce() -> T) -> T {
        let slot = self.slot(endpoint_id);
        let guard = slot.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(last) = *guard {
            let ready = last + delay;
            let now = Instant::now();
            if ready > now {
                thread::sleep(ready - now);
            }
        }
        let _permit = PolitenessPermit { last_done: guard };
        f()
    }
}

/// Blocking SPARQL protocol client. Cheap to share by reference across
/// threads; the politeness limiter is the only mutable state.
#[derive(Debug)]
pub struct SparqlClient {
    agent: ureq::Agent,
    retry: RetryPolicy,
    limiter: PolitenessLimiter,
}

impl Default for SparqlClient {
    fn default() -> Self {
        SparqlClient::new()
    }
}

enum Attempt {
    Done(QueryResult),
    Retry(ClientError),
    Fail(ClientError),
}

impl SparqlClient {
    pub fn new() -> Self {
        SparqlClient::with_retry_policy(RetryPolicy::default())
    }

    pub fn with_retry_policy(retry: RetryPolicy) -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .user_agent(concat!("lodprof/", env!("CARGO_PKG_VERSION")))
            .build();
        SparqlClient {
            agent: config.into(),
            retry,
            limiter: PolitenessLimiter::default(),
        }
    }

    pub fn retry_policy(&self) -> RetryPolicy {
        self.retry
    }

    /// Runs one query, retrying timeouts and 5xx responses up to
    /// `max_retries` times.
    pub fn execute(
        &self,
        endpoint: &EndpointDescriptor,
        query: &str,
    ) -> Result<QueryResult, ClientError> {
        if query.trim().is_empty() {
            return Err(ClientError::EmptyQuery);
        }
        let attempts = endpoint.max_retries + 1;
        let mut last_err = None;
        for attempt in 0..attempts {
            if attempt > 0 {
                let pause = self.retry.delay(attempt - 1);
                debug!("{}: retry {attempt} in {pause:?}", endpoint.id);
                thread::sleep(pause);
            }
            let outcome = self
                .limiter
                .with_permit(&endpoint.id, endpoint.politeness_delay, || {
                    self.attempt(endpoint, query)
                });
            match outcome {
                Attempt::Done(result) => return Ok(result),
                Attempt::Fail(err) => return Err(err),
                Attempt::Retry(err) => {
                    warn!("{}: attempt {} failed: {err}", endpoint.id, attempt + 1);
                    last_err = Some(err);
                }
            }
        }
        Err(match last_err {
            Some(ClientError::QueryTimeout { endpoint: id, .. }) => ClientError::QueryTimeout {
                endpoint: id,
                attempts,
            },
            Some(err) => err,
            None => unreachable!("at least one attempt is made"),
        })
    }

    fn attempt(&self, endpoint: &EndpointDescriptor, query: &str) -> Attempt {
        let response = if query.len() < MAX_GET_QUERY_LEN {
            self.agent
                .get(&endpoint.url)
                .query("query", query)
                .header("Accept", RESULTS_JSON_MEDIA_TYPE)
                .config()
                .timeout_global(Some(endpoint.timeout))
                .build()
                .call()
        } else {
            self.agent
                .post(&endpoint.url)
                .header("Accept", RESULTS_JSON_MEDIA_TYPE)
                .config()
                .timeout_global(Some(endpoint.timeout))
                .build()
                .send_form([("query", query)])
        };
        let mut response = match response {
            Ok(r) => r,
            Err(err) => return classify_transport_error(endpoint, err),
        };
        let status = response.status().as_u16();
        let body = match response.body_mut().read_to_string() {
            Ok(body) => body,
            Err(err) => return classify_transport_error(endpoint, err),
        };
        if (200..300).contains(&status) {
            match QueryResult::parse_json(&body) {
                Ok(result) => Attempt::Done(result),
                Err(err) => Attempt::Fail(err),
            }
        } else {
            let err = ClientError::EndpointError {
                status,
                body: excerpt(&body),
            };
            if status >= 500 {
                Attempt::Retry(err)
            } else {
                Attempt::Fail(err)
            }
        }
    }
}

fn classify_transport_error(endpoint: &EndpointDescriptor, err: ureq::Error) -> Attempt {
    let timeout = || ClientError::QueryTimeout {
        endpoint: endpoint.id.clone(),
        attempts: 1,
    };
    match err {
        ureq::Error::Timeout(_) => Attempt::Retry(timeout()),
        ureq::Error::Io(io)
            if matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            ) =>
        {
            Attempt::Retry(timeout())
        }
        ureq::Error::ConnectionFailed | ureq::Error::HostNotFound => {
            Attempt::Fail(ClientError::NetworkUnreachable {
                endpoint: endpoint.id.clone(),
                detail: err.to_string(),
            })
        }
        ureq::Error::Io(io)
            if matches!(
                io.kind(),
                std::io::ErrorKind::ConnectionRefused
                    | std::io::ErrorKind::NotFound
                    | std::io::ErrorKind::AddrNotAvailable
            ) =>
        {
            Attempt::Fail(ClientError::NetworkUnreachable {
                endpoint: endpoint.id.clone(),
                detail: io.to_string(),
            })
        }
        // Resets and truncated bodies are transient on busy endpoints.
        ureq::Error::Io(io) => Attempt::Retry(ClientError::EndpointError {
            status: 0,
            body: io.to_string(),
        }),
        other => Attempt::Fail(ClientError::MalformedResponse(other.to_string())),
    }
}

fn excerpt(body: &str) -> String {
    let mut end = body.len().min(BODY_EXCERPT_LEN);
    while !body.is_char_boundary(end) {
        end -= 1;
    }
    body[..end].to_string()
}
