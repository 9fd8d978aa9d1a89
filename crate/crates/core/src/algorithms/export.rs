//! CSV and JSON views of a trajectory.

use std::io::Write;

use serde::Serialize;

use super::Trajectory;
use crate::error::Result;

pub const CSV_COLUMNS: [&str; 6] = ["k", "gap", "step", "support", "conv_resid", "span_resid"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub k: usize,
    pub gap: f64,
    pub step: Option<f64>,
    pub support: usize,
    pub conv_resid: f64,
    pub span_resid: Option<f64>,
}

pub fn rows(trajectory: &Trajectory) -> Vec<TrajectoryRow> {
    trajectory
        .records
        .iter()
        .map(|r| TrajectoryRow {
            k: r.k,
            gap: r.gap,
            step: r.step,
            support: r.support(),
            conv_resid: trajectory.convex_residual(r.k),
            span_resid: trajectory.span_residual(r.k),
        })
        .collect()
}

pub fn write_csv<W: Write>(trajectory: &Trajectory, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows(trajectory) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(trajectory: &Trajectory) -> Result<String> {
    Ok(serde_json::to_string_pretty(trajectory)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{run_method, Method};
    use crate::instances::build_hard_instance;

    #[test]
    fn csv_has_the_documented_header() {
        let inst = build_hard_instance(4, 1.0, 1.0).unwrap();
        let mut set = inst.set.clone();
        let tr = run_method(&inst.objective, &mut set, Method::LineSearch, 3, 0.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&tr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.count(), 4);
        assert!(text.lines().last().unwrap().starts_with("3,"));

        let back: Trajectory = serde_json::from_str(&to_json(&tr).unwrap()).unwrap();
        assert_eq!(back, tr);
    }
}
