//! CSV and JSON writers. Floats in CSV carry 17 significant digits so the
//! files round-trip to the same doubles.

use std::io::Write;

use crate::analysis::ChaosReport;
use crate::error::Result;
use crate::integrator::Trajectory;

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

/// `t,x1,x2,x3,region`, one row per sample.
pub fn write_trajectory_csv(traj: &Trajectory, mut w: impl Write) -> Result<()> {
    writeln!(w, "t,x1,x2,x3,region")?;
    for ((t, x), r) in traj.times.iter().zip(&traj.states).zip(&traj.regions) {
        writeln!(w, "{},{},{},{},{r}", f(*t), f(x.x1()), f(x.x2()), f(x.x3()))?;
    }
    Ok(())
}

/// `t,from,to`, one row per label change.
pub fn write_transitions_csv(traj: &Trajectory, mut w: impl Write) -> Result<()> {
    writeln!(w, "t,from,to")?;
    for tr in &traj.transitions {
        writeln!(w, "{},{},{}", f(tr.time), tr.from, tr.to)?;
    }
    Ok(())
}

/// `c,Kc`, sorted by `c`.
pub fn write_kc_csv(report: &ChaosReport, mut w: impl Write) -> Result<()> {
    writeln!(w, "c,Kc")?;
    for p in &report.k_per_c {
        writeln!(w, "{},{}", f(p.c), f(p.kc))?;
    }
    Ok(())
}

pub fn write_report_json(report: &ChaosReport, mut w: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Transition;
    use crate::linalg::Vec3;

    fn sample() -> Trajectory {
        Trajectory {
            times: vec![0.0, 0.1],
            states: vec![Vec3::new(0.1, -2.0, 1.0 / 3.0), Vec3::new(1.0, 2.0, 3.0)],
            regions: vec![1, 3],
            transitions: vec![Transition {
                time: 0.1,
                from: 1,
                to: 3,
            }],
        }
    }

    #[test]
    fn trajectory_csv_round_trips_doubles() {
        let mut buf = Vec::new();
        write_trajectory_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x1,x2,x3,region"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 5);
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(row[3].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(row[4], "1");
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn transitions_and_kc() {
        let mut buf = Vec::new();
        write_transitions_csv(&sample(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,from,to\n1.0000000000000001e-1,1,3\n"
        );
        let mut report = ChaosReport::default();
        report.set_k(0.5, &[(1.0, 0.5)]);
        let mut buf = Vec::new();
        write_kc_csv(&report, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "c,Kc\n1.0000000000000000e0,5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn report_json_omits_missing_lle() {
        let mut buf = Vec::new();
        write_report_json(&ChaosReport::default(), &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v.get("lle").is_none());
        assert!(v.get("symbols").is_some());
    }
}
