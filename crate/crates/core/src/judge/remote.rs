//! Remote judge: delegates each directional evaluation to an HTTP endpoint.
//!
//! One POST is made per presentation order. Timeouts and HTTP error statuses
//! are retried with exponential backoff (500 ms base, doubling, a configured
//! number of attempts); a well-formed reply that fails to parse is a protocol
//! error and is not retried. In-flight requests are bounded by a concurrency
//! limit so tournament rounds cannot stampede the endpoint.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Rubric, Step, Trajectory};

use super::{Judge, ScorePair};

const BACKOFF_BASE: Duration = Duration::from_millis(500);
const BACKOFF_FACTOR: u32 = 2;

/// Counting semaphore bounding concurrent HTTP calls.
struct Permits {
    available: Mutex<usize>,
    freed: Condvar,
}

impl Permits {
    fn new(count: usize) -> Self {
        Permits {
            available: Mutex::new(count),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> PermitGuard<'_> {
        let mut available = self.available.lock().expect("permit lock");
        while *available == 0 {
            available = self.freed.wait(available).expect("permit lock");
        }
        *available -= 1;
        PermitGuard { permits: self }
    }
}

struct PermitGuard<'a> {
    permits: &'a Permits,
}

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        let mut available = self.permits.available.lock().expect("permit lock");
        *available += 1;
        self.permits.freed.notify_one();
    }
}

#[derive(Serialize)]
struct WireTrajectory<'a> {
    steps: &'a [Step],
    answer: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    query: &'a str,
    rubric: &'a str,
    trajectory_a: WireTrajectory<'a>,
    trajectory_b: WireTrajectory<'a>,
}

#[derive(Deserialize)]
struct WireResponse {
    score_a: f64,
    score_b: f64,
}

/// Judge that calls an external scoring service.
pub struct RemoteJudge {
    endpoint: String,
    client: reqwest::blocking::Client,
    max_attempts: u32,
    permits: Permits,
}

impl RemoteJudge {
    pub fn new(
        endpoint: String,
        timeout: Duration,
        max_attempts: u32,
        concurrency: usize,
    ) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Config(format!("http client: {e}")))?;
        Ok(RemoteJudge {
            endpoint,
            client,
            max_attempts: max_attempts.max(1),
            permits: Permits::new(concurrency.max(1)),
        })
    }

    /// One directional call, first presented as `trajectory_a` on the wire.
    fn call_direction(
        &self,
        query: &str,
        rubric: &Rubric,
        first: &Trajectory,
        second: &Trajectory,
        match_key: &str,
        direction: &str,
    ) -> Result<(f64, f64)> {
        let request = WireRequest {
            query,
            rubric: &rubric.text,
            trajectory_a: WireTrajectory {
                steps: &first.steps,
                answer: &first.answer,
            },
            trajectory_b: WireTrajectory {
                steps: &second.steps,
                answer: &second.answer,
            },
        };
        let mut last_failure = String::new();
        for attempt in 0..self.max_attempts {
            if attempt > 0 {
                std::thread::sleep(BACKOFF_BASE * BACKOFF_FACTOR.pow(attempt - 1));
            }
            let _permit = self.permits.acquire();
            let sent = self.client.post(&self.endpoint).json(&request).send();
            match sent {
                Ok(response) if response.status().is_success() => {
                    // A malformed success body is a protocol defect, not a
                    // transient fault; retrying would not help.
                    let body: WireResponse = response.json().map_err(|e| Error::Transport {
                        match_key: match_key.to_string(),
                        direction: direction.to_string(),
                        detail: format!("protocol: {e}"),
                    })?;
                    return Ok((body.score_a, body.score_b));
                }
                Ok(response) => {
                    last_failure = format!("http status {}", response.status());
                }
                Err(e) => {
                    last_failure = e.to_string();
                }
            }
        }
        Err(Error::Transport {
            match_key: match_key.to_string(),
            direction: direction.to_string(),
            detail: format!("{} attempts exhausted: {last_failure}", self.max_attempts),
        })
    }
}

impl Judge for RemoteJudge {
    fn evaluate_pair(
        &self,
        query: &str,
        a: &Trajectory,
        b: &Trajectory,
        rubric: &Rubric,
        match_key: &str,
    ) -> Result<ScorePair> {
        let forward = self.call_direction(query, rubric, a, b, match_key, "forward")?;
        let reverse = self.call_direction(query, rubric, b, a, match_key, "reverse")?;
        Ok(ScorePair::from_directions(forward, reverse))
    }

    fn pointwise_score(
        &self,
        _query: &str,
        _trajectory: &Trajectory,
        _rubric: &Rubric,
        _call_key: &str,
    ) -> Result<f64> {
        Err(Error::Config(
            "the remote wire protocol is pairwise only".to_string(),
        ))
    }
}
