//! Holds the acceptance test target; see `tests/acceptance.rs`.

use std::io::Write;

/// Writes a line straight to stderr. The test harness only captures the print
/// macros, so these lines show up for passing tests too.
pub fn line(text: impl std::fmt::Display) {
    let _ = writeln!(std::io::stderr().lock(), "{text}");
}

/// Writes the one-line verdict for a criterion and returns whether it passed.
pub fn report(criterion: u32, ok: bool, detail: impl std::fmt::Display) -> bool {
    line(format!("criterion {criterion}: {} {detail}", if ok { "PASS" } else { "FAIL" }));
    ok
}
