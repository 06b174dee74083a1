//! Runner for the acceptance criteria in `tests/acceptance.rs`.

use std::time::{Duration, Instant};

/// Outcome of one criterion before its time limit is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, detail: detail.into() }
    }

    /// Passes when `failures` is empty; otherwise reports the count and the first failure.
    pub fn from_failures(failures: &[String], cases: usize) -> Self {
        match failures.first() {
            None => Verdict::new(true, format!("{cases} cases")),
            Some(first) => Verdict::new(false, format!("{} of {cases} cases failed; first: {first}", failures.len())),
        }
    }
}

/// A criterion's final line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub number: usize,
    pub passed: bool,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
    pub detail: String,
}

impl std::fmt::Display for Line {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2}: {status} [{:.2?}", self.number, self.elapsed)?;
        if let Some(limit) = self.limit {
            write!(f, " / {:.0?}", limit)?;
        }
        write!(f, "] {}", self.detail)
    }
}

/// Runs `body`, times it, and fails it if it errors or overruns `limit`.
pub fn run<E: std::fmt::Display>(
    number: usize,
    limit: Option<Duration>,
    body: impl FnOnce() -> Result<Verdict, E>,
) -> Line {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(v) => (v.passed, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail = format!("{detail}; over the time limit");
        }
    }
    Line { number, passed, elapsed, limit, detail }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_make_a_failing_verdict() {
        assert!(Verdict::from_failures(&[], 3).passed);
        let v = Verdict::from_failures(&["a".into(), "b".into()], 3);
        assert!(!v.passed);
        assert_eq!(v.detail, "2 of 3 cases failed; first: a");
    }

    #[test]
    fn overrun_fails() {
        let line = run::<String>(1, Some(Duration::ZERO), || {
            std::thread::sleep(Duration::from_millis(2));
            Ok(Verdict::new(true, "ok"))
        });
        assert!(!line.passed);
        let line = run::<String>(2, None, || Err("boom".into()));
        assert!(!line.passed && line.detail.contains("boom"));
    }
}
