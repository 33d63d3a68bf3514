use std::io::Write;

use super::IterRecord;
use crate::error::Result;

pub const HISTORY_HEADER: &str = "iter,t,objective,eta,gamma,ms";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

/// CSV export of a run's history; quality columns stay empty when absent.
pub fn write_history_csv<W: Write>(mut w: W, history: &[IterRecord]) -> Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for r in history {
        writeln!(
            w,
            "{},{:.17e},{:.17e},{},{},{:.3}",
            r.iter,
            r.t,
            r.objective,
            opt(r.eta),
            opt(r.gamma),
            r.ms
        )?;
    }
    Ok(())
}
