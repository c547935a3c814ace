//! Finite, eventually periodic descriptions of a failure model: a status per
//! node and directed link at every discrete time.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::NodeId;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum HealthStatus {
    Up,
    Down,
    Slow,
}

impl fmt::Display for HealthStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HealthStatus::Up => "up",
            HealthStatus::Down => "down",
            HealthStatus::Slow => "slow",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Subject {
    Node(NodeId),
    /// Directed: `Link(a, b)` and `Link(b, a)` are independent.
    Link(NodeId, NodeId),
}

impl Subject {
    pub fn node(id: impl Into<NodeId>) -> Self {
        Subject::Node(id.into())
    }

    pub fn link(src: impl Into<NodeId>, dst: impl Into<NodeId>) -> Self {
        Subject::Link(src.into(), dst.into())
    }

    pub fn ids(&self) -> Vec<&NodeId> {
        match self {
            Subject::Node(n) => vec![n],
            Subject::Link(a, b) => vec![a, b],
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Node(n) => write!(f, "node {n}"),
            Subject::Link(a, b) => write!(f, "link {a} -> {b}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TimeWindow {
    /// Inclusive on both ends.
    Interval {
        from: u64,
        to: u64,
    },
    From(u64),
    /// Active at `t >= starting_at` whose phase `(t - starting_at) mod period`
    /// lies in `[offset, offset + active_len)` (cyclically).
    Periodic {
        offset: u64,
        active_len: u64,
        period: u64,
        starting_at: u64,
    },
}

impl TimeWindow {
    pub fn contains(&self, t: u64) -> bool {
        match *self {
            TimeWindow::Interval { from, to } => from <= t && t <= to,
            TimeWindow::From(s) => t >= s,
            TimeWindow::Periodic {
                offset,
                active_len,
                period,
                starting_at,
            } => {
                if t < starting_at {
                    return false;
                }
                let phase = (t - starting_at) % period;
                (phase + period - offset % period) % period < active_len
            }
        }
    }

    /// Earliest time from which the window is periodic with its own period.
    fn stable_from(&self) -> u64 {
        match *self {
            TimeWindow::Interval { to, .. } => to + 1,
            TimeWindow::From(s) => s,
            TimeWindow::Periodic { starting_at, .. } => starting_at,
        }
    }

    fn period(&self) -> u64 {
        match *self {
            TimeWindow::Periodic { period, .. } => period,
            _ => 1,
        }
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TimeWindow::Interval { from, to } => write!(f, "[{from},{to}]"),
            TimeWindow::From(s) => write!(f, "from {s}"),
            TimeWindow::Periodic {
                offset,
                active_len,
                period,
                starting_at,
            } => write!(
                f,
                "every {period} active {active_len} offset {offset} from {starting_at}"
            ),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CurseRule {
    pub subject: Subject,
    pub status: HealthStatus,
    pub window: TimeWindow,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurseError {
    #[error("rules for {subject} overlap at time {time}")]
    Overlap { subject: Subject, time: u64 },
    #[error("periodic window needs a positive period")]
    ZeroPeriod,
    #[error("active length {active_len} exceeds period {period}")]
    ActiveTooLong { active_len: u64, period: u64 },
    #[error("offset {offset} must be smaller than period {period}")]
    OffsetTooLarge { offset: u64, period: u64 },
    #[error("interval [{from},{to}] is empty")]
    EmptyInterval { from: u64, to: u64 },
    #[error("rule status must be down or slow; up is the default")]
    UpRule,
    #[error("unknown node `{0}` in curse")]
    UnknownNode(NodeId),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CurseHorizon {
    pub stable_time: u64,
    pub period: u64,
}

impl CurseHorizon {
    /// Maps an absolute time to its representative in `[0, stable + period)`.
    pub fn normalize(&self, t: u64) -> u64 {
        if t < self.stable_time {
            t
        } else {
            self.stable_time + (t - self.stable_time) % self.period
        }
    }
}

/// A failure model. Every query not covered by a rule answers `Up`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CurseSpec {
    pub rules: Vec<CurseRule>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl CurseSpec {
    pub fn uncursed() -> Self {
        CurseSpec::default()
    }

    pub fn is_uncursed(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn with_rule(mut self, subject: Subject, status: HealthStatus, window: TimeWindow) -> Self {
        self.rules.push(CurseRule {
            subject,
            status,
            window,
        });
        self
    }

    pub fn status_at(&self, t: u64, s: &Subject) -> HealthStatus {
        self.rules
            .iter()
            .find(|r| &r.subject == s && r.window.contains(t))
            .map_or(HealthStatus::Up, |r| r.status)
    }

    pub fn node_status(&self, t: u64, n: &NodeId) -> HealthStatus {
        self.rules
            .iter()
            .find(|r| matches!(&r.subject, Subject::Node(m) if m == n) && r.window.contains(t))
            .map_or(HealthStatus::Up, |r| r.status)
    }

    pub fn link_status(&self, t: u64, src: &NodeId, dst: &NodeId) -> HealthStatus {
        self.rules
            .iter()
            .find(|r| {
                matches!(&r.subject, Subject::Link(a, b) if a == src && b == dst)
                    && r.window.contains(t)
            })
            .map_or(HealthStatus::Up, |r| r.status)
    }

    pub fn horizon(&self) -> CurseHorizon {
        let stable_time = self
            .rules
            .iter()
            .map(|r| r.window.stable_from())
            .max()
            .unwrap_or(0);
        let period = self
            .rules
            .iter()
            .map(|r| r.window.period())
            .fold(1, |acc, p| acc / gcd(acc, p) * p);
        CurseHorizon {
            stable_time,
            period,
        }
    }

    /// Checks well-formedness and, when `nodes` is given, that subjects
    /// refer to known nodes.
    pub fn validate(&self, nodes: Option<&BTreeSet<NodeId>>) -> Result<(), CurseError> {
        for r in &self.rules {
            if r.status == HealthStatus::Up {
                return Err(CurseError::UpRule);
            }
            match r.window {
                TimeWindow::Interval { from, to } if from > to => {
                    return Err(CurseError::EmptyInterval { from, to })
                }
                TimeWindow::Periodic { period: 0, .. } => return Err(CurseError::ZeroPeriod),
                TimeWindow::Periodic {
                    active_len, period, ..
                } if active_len > period => {
                    return Err(CurseError::ActiveTooLong { active_len, period })
                }
                TimeWindow::Periodic { offset, period, .. } if offset >= period => {
                    return Err(CurseError::OffsetTooLarge { offset, period })
                }
                _ => {}
            }
            if let Some(nodes) = nodes {
                if let Some(bad) = r.subject.ids().into_iter().find(|n| !nodes.contains(*n)) {
                    return Err(CurseError::UnknownNode(bad.clone()));
                }
            }
        }
        // Past the horizon every window repeats, so one extra period covers
        // every possible overlap.
        let h = self.horizon();
        let end = h.stable_time + h.period;
        for (i, a) in self.rules.iter().enumerate() {
            for b in &self.rules[i + 1..] {
                if a.subject != b.subject {
                    continue;
                }
                if let Some(t) = (0..end).find(|&t| a.window.contains(t) && b.window.contains(t)) {
                    return Err(CurseError::Overlap {
                        subject: a.subject.clone(),
                        time: t,
                    });
                }
            }
        }
        Ok(())
    }

    /// Nodes and links mentioned by some rule.
    pub fn subjects(&self) -> BTreeSet<Subject> {
        self.rules.iter().map(|r| r.subject.clone()).collect()
    }
}

impl fmt::Display for CurseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "curse {{")?;
        for r in &self.rules {
            writeln!(f, "  {} : {} @ {};", r.subject, r.status, r.window)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta1() -> CurseSpec {
        CurseSpec::uncursed().with_rule(
            Subject::node("n"),
            HealthStatus::Down,
            TimeWindow::From(10),
        )
    }

    fn delta2() -> CurseSpec {
        CurseSpec::uncursed().with_rule(
            Subject::node("n"),
            HealthStatus::Down,
            TimeWindow::Periodic {
                offset: 100,
                active_len: 100,
                period: 200,
                starting_at: 0,
            },
        )
    }

    fn linkdown() -> CurseSpec {
        CurseSpec::uncursed().with_rule(
            Subject::link("p", "c"),
            HealthStatus::Down,
            TimeWindow::Interval { from: 1, to: 1 },
        )
    }

    #[test]
    fn permanent_failure() {
        let n = Subject::node("n");
        assert_eq!(delta1().status_at(9, &n), HealthStatus::Up);
        assert_eq!(delta1().status_at(10, &n), HealthStatus::Down);
        assert_eq!(
            delta1().horizon(),
            CurseHorizon {
                stable_time: 10,
                period: 1
            }
        );
    }

    #[test]
    fn periodic_failure() {
        let n = Subject::node("n");
        assert_eq!(delta2().status_at(50, &n), HealthStatus::Up);
        assert_eq!(delta2().status_at(150, &n), HealthStatus::Down);
        let h = delta2().horizon();
        assert_eq!(
            h,
            CurseHorizon {
                stable_time: 0,
                period: 200
            }
        );
        // brute-force periodicity
        for t in 0..=1000 {
            assert_eq!(delta2().status_at(t, &n), delta2().status_at(t + 200, &n));
        }
    }

    #[test]
    fn linkdown_horizon_by_enumeration() {
        let d = linkdown();
        let l = Subject::link("p", "c");
        let table: Vec<_> = (0..=10).map(|t| d.status_at(t, &l)).collect();
        // the last change in the table happens entering t = 2; period 1 after
        let last_change = (1..table.len())
            .filter(|&i| table[i] != table[i - 1])
            .max()
            .unwrap();
        assert_eq!(last_change, 2);
        assert_eq!(
            d.horizon(),
            CurseHorizon {
                stable_time: 2,
                period: 1
            }
        );
        // the reverse link is independent
        assert_eq!(d.status_at(1, &Subject::link("c", "p")), HealthStatus::Up);
    }

    #[test]
    fn uncursed_is_up() {
        let u = CurseSpec::uncursed();
        assert_eq!(u.status_at(0, &Subject::node("x")), HealthStatus::Up);
        assert_eq!(
            u.horizon(),
            CurseHorizon {
                stable_time: 0,
                period: 1
            }
        );
    }

    #[test]
    fn overlap_rejected() {
        let bad = linkdown().with_rule(
            Subject::link("p", "c"),
            HealthStatus::Slow,
            TimeWindow::From(0),
        );
        assert!(matches!(
            bad.validate(None),
            Err(CurseError::Overlap { time: 1, .. })
        ));
        let periodic_overlap = delta2().with_rule(
            Subject::node("n"),
            HealthStatus::Slow,
            TimeWindow::Interval { from: 120, to: 130 },
        );
        assert!(periodic_overlap.validate(None).is_err());
        let fine = delta2().with_rule(
            Subject::node("n"),
            HealthStatus::Slow,
            TimeWindow::Interval { from: 20, to: 30 },
        );
        assert!(fine.validate(None).is_ok());
    }

    #[test]
    fn bad_windows_rejected() {
        let w = |window| {
            CurseSpec::uncursed()
                .with_rule(Subject::node("n"), HealthStatus::Down, window)
                .validate(None)
        };
        assert_eq!(
            w(TimeWindow::Periodic {
                offset: 0,
                active_len: 3,
                period: 2,
                starting_at: 0
            }),
            Err(CurseError::ActiveTooLong {
                active_len: 3,
                period: 2
            })
        );
        assert_eq!(
            w(TimeWindow::Periodic {
                offset: 0,
                active_len: 0,
                period: 0,
                starting_at: 0
            }),
            Err(CurseError::ZeroPeriod)
        );
        assert!(w(TimeWindow::Interval { from: 3, to: 2 }).is_err());
    }

    #[test]
    fn normalization() {
        let h = CurseHorizon {
            stable_time: 2,
            period: 3,
        };
        assert_eq!(h.normalize(1), 1);
        assert_eq!(h.normalize(2), 2);
        assert_eq!(h.normalize(5), 2);
        assert_eq!(h.normalize(7), 4);
    }
}
