//! Checklist used by the acceptance tests: one PASS/FAIL line per check
//! and one per criterion.

use std::fmt::Display;

#[derive(Debug, Default)]
pub struct Checklist {
    failures: Vec<String>,
}

impl Checklist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, label: &str, ok: bool, detail: impl Display) -> bool {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {label}: {detail}");
        if !ok {
            self.failures.push(label.to_string());
        }
        ok
    }

    /// `|got - want| <= tol`.
    pub fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) -> bool {
        let ok = (got - want).abs() <= tol;
        self.check(label, ok, format!("computed {got:.9e}, reference {want} ± {tol:e}"))
    }

    pub fn at_least(&mut self, label: &str, got: f64, floor: f64) -> bool {
        self.check(label, got >= floor, format!("computed {got:.9e} >= {floor:.9e}"))
    }

    pub fn at_most(&mut self, label: &str, got: f64, ceiling: f64) -> bool {
        self.check(label, got <= ceiling, format!("computed {got:.9e} <= {ceiling:.9e}"))
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }
}

/// A named acceptance criterion.
pub type Criterion = (&'static str, fn(&mut Checklist));

/// Run each criterion, print one summary line per criterion and return the
/// number that failed. A panic inside a criterion counts as a failure.
pub fn run_criteria(criteria: &[Criterion]) -> usize {
    let mut failed = 0;
    for (name, f) in criteria {
        println!("-- {name}");
        let mut c = Checklist::new();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut c)));
        let ok = outcome.is_ok() && c.failures.is_empty();
        if ok {
            println!("PASS criterion {name}");
        } else {
            failed += 1;
            match outcome {
                Err(_) => println!("FAIL criterion {name}: panicked"),
                Ok(()) => println!("FAIL criterion {name}: {:?}", c.failures),
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    failed
}
