//! Trajectory CSV: a `# schema: nonholo/1` comment, a header row
//! `s, state columns…, monitors…`, one row per sample and a
//! `# termination: <reason>` footer.

use std::io::Write;

use nonholo_core::ode::{Termination, Trajectory};

use crate::error::{Error, Result};
use crate::SCHEMA;

pub fn write_trajectory<W: Write>(out: &mut W, t: &Trajectory) -> Result<()> {
    let io = |e: std::io::Error| Error::io("<output>", e);
    writeln!(out, "# schema: {SCHEMA}").map_err(io)?;
    {
        let mut w = csv::Writer::from_writer(&mut *out);
        let mut header = vec!["s".to_string()];
        header.extend(t.columns.iter().cloned());
        header.extend(t.monitors.iter().map(|m| m.name.clone()));
        w.write_record(&header).map_err(|e| io(e.into()))?;
        for (i, (s, y)) in t.s.iter().zip(&t.states).enumerate() {
            let mut row = Vec::with_capacity(header.len());
            row.push(format_f64(*s));
            row.extend(y.iter().map(|v| format_f64(*v)));
            row.extend(t.monitors.iter().map(|m| format_f64(m.values[i])));
            w.write_record(&row).map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)?;
    }
    writeln!(out, "# termination: {}", t.termination).map_err(io)?;
    Ok(())
}

/// Shortest text that reads back to the same binary64.
fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Reads a trajectory written by [`write_trajectory`].
pub fn read_trajectory(text: &str) -> Result<Trajectory> {
    let bad = |m: &str| Error::Usage(format!("malformed trajectory CSV: {m}"));
    let mut termination = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# termination:") {
            termination = Some(match rest.trim() {
                "completed" => Termination::Completed,
                "singular_point" => Termination::SingularPoint,
                "step_limit" => Termination::StepLimit,
                "branch_loss" => Termination::BranchLoss,
                other => return Err(bad(other)),
            });
        } else if !line.starts_with('#') {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| bad(&e.to_string()))?.iter().map(String::from).collect();
    if header.first().map(String::as_str) != Some("s") {
        return Err(bad("first column must be s"));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e.to_string()))?;
        let row = rec
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| bad(v)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Trajectory {
        columns: header[1..].to_vec(),
        s: rows.iter().map(|r| r[0]).collect(),
        states: rows.iter().map(|r| r[1..].to_vec()).collect(),
        monitors: Vec::new(),
        termination: termination.ok_or_else(|| bad("missing termination footer"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nonholo_core::ode::Monitor;

    #[test]
    fn round_trip() {
        let t = Trajectory {
            columns: vec!["x".into(), "y".into()],
            s: vec![0.0, 0.1],
            states: vec![vec![1.0, -2.5], vec![1.0 / 3.0, 1e-300]],
            monitors: vec![Monitor {
                name: "m".into(),
                values: vec![0.5, f64::NAN],
            }],
            termination: Termination::BranchLoss,
        };
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# schema: nonholo/1\ns,x,y,m\n"));
        assert!(text.ends_with("# termination: branch_loss\n"));
        let back = read_trajectory(&text).unwrap();
        assert_eq!(back.columns, ["x", "y", "m"]);
        assert_eq!(back.s, t.s);
        assert_eq!(back.states[1][1], 1e-300);
        assert_eq!(back.termination, Termination::BranchLoss);
    }
}
