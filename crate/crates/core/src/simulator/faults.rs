//! Scripted misbehavior for robustness tests.

use std::str::FromStr;
use std::time::Duration;

use super::shapes::ShapeKind;
use super::SimulatorError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Behavior {
    Ok,
    /// The first `n` matching requests stall and are then dropped unanswered.
    TimeoutNTimes(u32),
    HttpError(u16),
    /// Answer 400 when the query contains the keyword (case-insensitive).
    RejectKeyword(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultTarget {
    Any,
    Shape(ShapeKind),
}

impl FaultTarget {
    pub fn matches(self, kind: Option<ShapeKind>) -> bool {
        match self {
            FaultTarget::Any => true,
            FaultTarget::Shape(k) => kind == Some(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultRule {
    pub target: FaultTarget,
    pub behavior: Behavior,
}

/// Rules are checked in order; the first matching rule that is still
/// active decides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultScript {
    pub rules: Vec<FaultRule>,
    /// Added before every answer.
    pub latency: Duration,
    /// How long a "timed out" request is held before the connection drops.
    pub stall: Duration,
    /// Seeds `ORDER BY RAND()`.
    pub seed: u64,
}

impl Default for FaultScript {
    fn default() -> Self {
        FaultScript {
            rules: Vec::new(),
            latency: Duration::ZERO,
            stall: Duration::from_secs(5),
            seed: 0,
        }
    }
}

impl FaultScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rule(mut self, target: FaultTarget, behavior: Behavior) -> Result<Self, SimulatorError> {
        if let Behavior::HttpError(code) = behavior {
            if !(400..=599).contains(&code) {
                return Err(SimulatorError::InvalidFault(format!(
                    "HTTP status {code} outside 400-599"
                )));
            }
        }
        if let Behavior::RejectKeyword(kw) = &behavior {
            if kw.trim().is_empty() {
                return Err(SimulatorError::InvalidFault("empty keyword".into()));
            }
        }
        self.rules.push(FaultRule { target, behavior });
        Ok(self)
    }

    /// Shorthand for rejecting every query that uses `keyword`.
    pub fn reject(self, keyword: &str) -> Result<Self, SimulatorError> {
        self.rule(
            FaultTarget::Any,
            Behavior::RejectKeyword(keyword.to_string()),
        )
    }

    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.latency = latency;
        self
    }

    pub fn with_stall(mut self, stall: Duration) -> Self {
        self.stall = stall;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Parses `TARGET=BEHAVIOR`, e.g. `SQ2=timeout:2`, `any=http:503`,
    /// `probe-bind=reject:BIND`, `SQ3=ok`.
    pub fn parse_rule(spec: &str) -> Result<FaultRule, SimulatorError> {
        let bad = |why: &str| SimulatorError::InvalidFault(format!("{spec:?}: {why}"));
        let (target, behavior) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected TARGET=BEHAVIOR"))?;
        let target = match target.trim() {
            t if t.eq_ignore_ascii_case("any") => FaultTarget::Any,
            t => FaultTarget::Shape(ShapeKind::from_str(t).map_err(|e| bad(&e))?),
        };
        let (name, arg) = match behavior.trim().split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (behavior.trim(), None),
        };
        let behavior = match (name.to_ascii_lowercase().as_str(), arg) {
            ("ok", None) => Behavior::Ok,
            ("timeout", Some(n)) => {
                Behavior::TimeoutNTimes(n.parse().map_err(|_| bad("bad count"))?)
            }
            ("http", Some(code)) => {
                Behavior::HttpError(code.parse().map_err(|_| bad("bad status"))?)
            }
            ("reject", Some(kw)) => Behavior::RejectKeyword(kw.to_string()),
            _ => return Err(bad("unknown behavior")),
        };
        let script = FaultScript::new().rule(target, behavior)?;
        Ok(script.rules.into_iter().next().unwrap())
    }
}

/// What the server does with one request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Action {
    Answer,
    Stall,
    Status(u16, String),
}

/// Mutable per-server view of a script: remembers how many timeouts each
/// rule has already served.
#[derive(Debug)]
pub(crate) struct FaultState {
    rules: Vec<FaultRule>,
    served: Vec<u32>,
}

impl FaultState {
    pub fn new(script: &FaultScript) -> Self {
        FaultState {
            rules: script.rules.clone(),
            served: vec![0; script.rules.len()],
        }
    }

    pub fn decide(&mut self, kind: Option<ShapeKind>, query: &str) -> Action {
        let upper = query.to_uppercase();
        for (i, rule) in self.rules.iter().enumerate() {
            if !rule.target.matches(kind) {
                continue;
            }
            match &rule.behavior {
                Behavior::Ok => return Action::Answer,
                Behavior::TimeoutNTimes(n) => {
                    if self.served[i] < *n {
                        self.served[i] += 1;
                        return Action::Stall;
                    }
                }
                Behavior::HttpError(code) => {
                    return Action::Status(*code, format!("scripted HTTP {code}"));
                }
                Behavior::RejectKeyword(kw) => {
                    if upper.contains(&kw.to_uppercase()) {
                        return Action::Status(
                            400,
                            format!("keyword {kw} is not supported by this endpoint"),
                        );
                    }
                }
            }
        }
        Action::Answer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timeouts_run_out() {
        let script = FaultScript::new()
            .rule(
                FaultTarget::Shape(ShapeKind::Sq2),
                Behavior::TimeoutNTimes(2),
            )
            .unwrap();
        let mut st = FaultState::new(&script);
        assert_eq!(st.decide(Some(ShapeKind::Sq1), ""), Action::Answer);
        assert_eq!(st.decide(Some(ShapeKind::Sq2), ""), Action::Stall);
        assert_eq!(st.decide(Some(ShapeKind::Sq2), ""), Action::Stall);
        assert_eq!(st.decide(Some(ShapeKind::Sq2), ""), Action::Answer);
    }

    #[test]
    fn reject_mentions_keyword() {
        let mut st = FaultState::new(&FaultScript::new().reject("group by").unwrap());
        match st.decide(None, "SELECT ... GROUP BY ?p") {
            Action::Status(400, body) => assert!(body.contains("group by")),
            other => panic!("{other:?}"),
        }
        assert_eq!(st.decide(None, "SELECT ?s"), Action::Answer);
    }

    #[test]
    fn status_codes_are_validated() {
        assert!(FaultScript::new()
            .rule(FaultTarget::Any, Behavior::HttpError(200))
            .is_err());
        assert!(FaultScript::new()
            .rule(FaultTarget::Any, Behavior::HttpError(503))
            .is_ok());
    }

    #[test]
    fn parses_rule_specs() {
        assert_eq!(
            FaultScript::parse_rule("SQ2=timeout:2").unwrap(),
            FaultRule {
                target: FaultTarget::Shape(ShapeKind::Sq2),
                behavior: Behavior::TimeoutNTimes(2)
            }
        );
        assert_eq!(
            FaultScript::parse_rule("any=reject:BIND").unwrap().behavior,
            Behavior::RejectKeyword("BIND".into())
        );
        assert!(FaultScript::parse_rule("any=http:99").is_err());
        assert!(FaultScript::parse_rule("SQ9=ok").is_err());
    }
}
