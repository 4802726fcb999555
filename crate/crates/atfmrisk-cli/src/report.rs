//! Run reporting: per-stage counts and timings, printed to stderr so stdout
//! stays reserved for the results a script would consume.

use std::time::Instant;

/// Accumulates what happened during a command run.
pub struct RunReport {
    command: &'static str,
    lines: Vec<String>,
    started: Instant,
    stage_started: Instant,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        let now = Instant::now();
        RunReport {
            command,
            lines: Vec::new(),
            started: now,
            stage_started: now,
        }
    }

    /// Records parse totals for one input file; rejected rows are echoed
    /// with their line numbers.
    pub fn parsed<T>(&mut self, name: &str, parsed: &atfmrisk::ingest::Parsed<T>) {
        self.lines.push(format!(
            "{name}: {} records, {} rejected rows",
            parsed.records.len(),
            parsed.rejected.len()
        ));
        for row in &parsed.rejected {
            eprintln!("{name}: rejected {row}");
        }
        for warning in &parsed.warnings {
            eprintln!("{name}: warning: {warning}");
        }
    }

    pub fn note(&mut self, line: String) {
        self.lines.push(line);
    }

    /// Closes the current stage, recording its wall time.
    pub fn stage_done(&mut self, stage: &str) {
        let elapsed = self.stage_started.elapsed();
        self.lines
            .push(format!("stage {stage}: {} ms", elapsed.as_millis()));
        self.stage_started = Instant::now();
    }

    /// Prints the collected report to stderr.
    pub fn finish(self) {
        eprintln!("-- {} report --", self.command);
        for line in &self.lines {
            eprintln!("  {line}");
        }
        eprintln!("  total: {} ms", self.started.elapsed().as_millis());
    }
}
