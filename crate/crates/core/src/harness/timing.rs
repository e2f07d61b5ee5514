use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Nested wall-clock probes. Durations accumulate per slash-joined path,
/// e.g. `iteration/learn`.
#[derive(Debug, Default)]
pub struct Profiler {
    stack: Vec<(&'static str, Instant)>,
    totals: BTreeMap<String, Duration>,
}

impl Profiler {
    pub fn new() -> Self {
        Self::default()
    }

    fn path(&self) -> String {
        self.stack.iter().map(|(n, _)| *n).collect::<Vec<_>>().join("/")
    }

    pub fn enter(&mut self, section: &'static str) {
        self.stack.push((section, Instant::now()));
    }

    /// Closes the innermost section, which must be `section`.
    pub fn exit(&mut self, section: &'static str) -> Result<Duration> {
        let path = self.path();
        match self.stack.pop() {
            Some((name, start)) if name == section => {
                let d = start.elapsed();
                *self.totals.entry(path).or_default() += d;
                Ok(d)
            }
            Some((name, start)) => {
                self.stack.push((name, start));
                Err(Error::Timing(format!("exit {section:?} while {name:?} is open")))
            }
            None => Err(Error::Timing(format!("exit {section:?} with no open section"))),
        }
    }

    /// Runs `f` inside `section`.
    pub fn time<R>(&mut self, section: &'static str, f: impl FnOnce(&mut Self) -> R) -> Result<R> {
        self.enter(section);
        let r = f(self);
        self.exit(section)?;
        Ok(r)
    }

    pub fn total(&self, path: &str) -> Duration {
        self.totals.get(path).copied().unwrap_or_default()
    }

    pub fn totals(&self) -> &BTreeMap<String, Duration> {
        &self.totals
    }

    /// Errors if any section is still open.
    pub fn finish(&self) -> Result<()> {
        if self.stack.is_empty() {
            Ok(())
        } else {
            Err(Error::Timing(format!("unclosed section {:?}", self.path())))
        }
    }
}
