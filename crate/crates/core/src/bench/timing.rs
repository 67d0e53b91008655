//! Per-stage timing medians and the log-log growth rate of total time in N.

use std::collections::BTreeMap;
use std::io::Write;

use super::config::Method;
use super::records::{median, Record, RowKind, Status};
use crate::error::{invalid, Result};

/// Median stage timings of one (method, N, n) group.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMedians {
    pub method: Method,
    pub nodes: usize,
    pub n: usize,
    pub trials: usize,
    pub sampling: f64,
    pub laplacian: f64,
    pub eig: f64,
    pub kmeans: f64,
    pub total: f64,
}

/// Least-squares slope of `ln(total)` against `ln(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    /// Fixed sample size of the fit; `None` for full clustering, which
    /// always uses every node.
    pub n: Option<usize>,
    pub points: usize,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimingReport {
    pub medians: Vec<StageMedians>,
    pub slopes: Vec<SlopeFit>,
    /// Why no slope could be fitted, when none was.
    pub note: Option<String>,
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return invalid("slope fit needs paired samples");
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return invalid("slope fit needs positive finite values");
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("slope fit needs at least two distinct x values");
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Medians per stage for each (method, N, n), and a slope of median total
/// time against N for every method and fixed n with at least two N.
pub fn timing_report(records: &[Record]) -> TimingReport {
    let mut groups: BTreeMap<(Method, usize, usize), Vec<&Record>> = BTreeMap::new();
    for r in records {
        if r.kind == RowKind::Trial && r.status == Status::Ok && r.degenerate == 0 && r.timings.is_some() {
            groups.entry((r.method, r.n, r.nodes)).or_default().push(r);
        }
    }
    let medians: Vec<StageMedians> = groups
        .iter()
        .map(|(&(method, n, nodes), rows)| {
            let stage = |f: fn(&Record) -> f64| median(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            StageMedians {
                method,
                nodes,
                n,
                trials: rows.len(),
                sampling: stage(|r| r.timings.unwrap().sampling),
                laplacian: stage(|r| r.timings.unwrap().laplacian),
                eig: stage(|r| r.timings.unwrap().eig),
                kmeans: stage(|r| r.timings.unwrap().kmeans),
                total: stage(|r| r.timings.unwrap().total()),
            }
        })
        .collect();

    let mut series: BTreeMap<(Method, Option<usize>), Vec<(f64, f64)>> = BTreeMap::new();
    for m in &medians {
        let key = (m.method, (m.method != Method::Full).then_some(m.n));
        series.entry(key).or_default().push((m.nodes as f64, m.total));
    }
    let mut slopes = Vec::new();
    for ((method, n), pts) in series {
        if pts.len() < 2 {
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        match loglog_slope(&xs, &ys) {
            Ok(slope) => slopes.push(SlopeFit {
                method,
                n,
                points: xs.len(),
                slope,
            }),
            Err(e) => log::warn!("no slope for {method}: {e}"),
        }
    }
    let note = slopes
        .is_empty()
        .then(|| "no method has two or more network sizes at a fixed sample size; slope omitted".to_string());
    TimingReport { medians, slopes, note }
}

impl TimingReport {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# ssc-timing v1")?;
        if let Some(note) = &self.note {
            writeln!(w, "# note: {note}")?;
        }
        writeln!(
            w,
            "kind,method,nodes,n,trials,t_sampling,t_laplacian,t_eig,t_kmeans,t_total,slope"
        )?;
        for m in &self.medians {
            writeln!(
                w,
                "MEDIAN,{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},",
                m.method, m.nodes, m.n, m.trials, m.sampling, m.laplacian, m.eig, m.kmeans, m.total
            )?;
        }
        for s in &self.slopes {
            writeln!(
                w,
                "SLOPE,{},,{},{},,,,,,{:.4}",
                s.method,
                s.n.map_or_else(|| "all".to_string(), |n| n.to_string()),
                s.points,
                s.slope
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::Scenario;
    use crate::pipeline::StageTimings;

    fn rec(method: Method, nodes: usize, n: usize, total: f64) -> Record {
        Record {
            kind: RowKind::Trial,
            scenario: Scenario::Timing,
            cell: 0,
            nodes,
            n,
            k: 3,
            beta: 0.02,
            zeta: 0.05,
            delta: 0.0,
            pi: vec![1.0 / 3.0; 3],
            method,
            trial: Some(0),
            seed: Some(0),
            rate: Some(0.0),
            se: None,
            median: None,
            timings: Some(StageTimings {
                sampling: 0.0,
                laplacian: total / 2.0,
                eig: total / 2.0,
                kmeans: 0.0,
            }),
            coverage: Some(1.0),
            degenerate: 0,
            status: Status::Ok,
            trend: None,
        }
    }

    #[test]
    fn two_point_slope() {
        assert!((loglog_slope(&[1.0, 10.0], &[2.0, 200.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[5.0, 5.0], &[1.0, 2.0]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 2.0]).is_err());
    }

    #[test]
    fn constant_stage_has_zero_slope() {
        let recs = vec![rec(Method::Srs, 1000, 100, 0.5), rec(Method::Srs, 4000, 100, 0.5)];
        let rep = timing_report(&recs);
        assert_eq!(rep.slopes.len(), 1);
        assert!(rep.slopes[0].slope.abs() < 1e-12);
    }

    #[test]
    fn recovers_known_linear_slope() {
        // total = c N with ±2% deterministic jitter
        let jitter = [1.02, 0.98, 1.01, 0.99, 1.0];
        let mut recs = Vec::new();
        for (i, &nodes) in [1000, 2000, 4000, 8000, 16000].iter().enumerate() {
            for t in 0..3 {
                recs.push(rec(Method::Dcs, nodes, 100, 1e-4 * nodes as f64 * jitter[(i + t) % 5]));
            }
        }
        let rep = timing_report(&recs);
        assert!((rep.slopes[0].slope - 1.0).abs() < 0.05);
        assert_eq!(rep.medians.len(), 5);
    }

    #[test]
    fn varying_n_gives_note() {
        let recs = vec![rec(Method::Srs, 1000, 96, 0.5), rec(Method::Srs, 2000, 116, 0.7)];
        let rep = timing_report(&recs);
        assert!(rep.slopes.is_empty());
        assert!(rep.note.is_some());
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("# note:"));
    }
}
