//! Reporting for the acceptance run: one line per criterion, binding
//! failures turn the exit status red, soft checks are only reported.

use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Binding,
    Soft,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub kind: Kind,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        let verdict = match (self.kind, self.passed) {
            (Kind::Binding, true) => "PASS",
            (Kind::Binding, false) => "FAIL",
            (Kind::Soft, true) => "SOFT-PASS",
            (Kind::Soft, false) => "SOFT-MISS",
        };
        format!(
            "criterion {:>2} {:<9} {} [{:.1}s]: {}",
            self.id,
            verdict,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

#[derive(Debug, Default)]
pub struct Report {
    outcomes: Vec<Outcome>,
}

impl Report {
    /// Runs `check`, which returns `(passed, detail)`, and prints its line.
    /// A panic inside the check counts as a failure.
    pub fn run<F>(&mut self, id: u32, title: &'static str, kind: Kind, check: F)
    where
        F: FnOnce() -> (bool, String) + std::panic::UnwindSafe,
    {
        let start = Instant::now();
        let (passed, detail) = match std::panic::catch_unwind(check) {
            Ok(r) => r,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                (false, format!("panicked: {msg}"))
            }
        };
        let outcome = Outcome {
            id,
            title,
            kind,
            passed,
            detail,
            elapsed: start.elapsed(),
        };
        println!("{}", outcome.line());
        self.outcomes.push(outcome);
    }

    pub fn binding_failures(&self) -> Vec<&Outcome> {
        self.outcomes
            .iter()
            .filter(|o| o.kind == Kind::Binding && !o.passed)
            .collect()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_count_as_failures_and_soft_misses_do_not() {
        let mut r = Report::default();
        r.run(1, "ok", Kind::Binding, || (true, "fine".into()));
        r.run(2, "boom", Kind::Binding, || panic!("nope"));
        r.run(3, "soft", Kind::Soft, || (false, "outside".into()));
        let failed: Vec<u32> = r.binding_failures().iter().map(|o| o.id).collect();
        assert_eq!(failed, vec![2]);
        assert!(r.outcomes()[1].detail.contains("nope"));
        assert!(r.outcomes()[2].line().contains("SOFT-MISS"));
    }
}
