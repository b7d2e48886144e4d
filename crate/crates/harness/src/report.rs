//! Comparison tables and SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use vmp_core::evaluation::{detection_timeline, inter_pose_intervals, mean, median, std_dev};

use crate::config::PlannerKind;
use crate::runner::RunRecord;

pub const RUNS_HEADER: &str =
    "planner,seed,fruits_detected,poses_executed,mean_interval,median_interval,replans,collision_aborts";

pub fn runs_csv(runs: &[RunRecord]) -> String {
    let mut s = format!("{RUNS_HEADER}\n");
    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:.6}"));
    for r in runs {
        let m = r.summary();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.planner.name(),
            r.seed,
            m.fruits_detected_final,
            m.poses_executed,
            opt(m.mean_interval),
            opt(m.median_interval),
            m.replans,
            m.collision_aborts
        );
    }
    s
}

pub fn timelines_csv(runs: &[RunRecord]) -> String {
    let mut s = String::from("planner,seed,sim_time,detected\n");
    for r in runs {
        for (t, n) in detection_timeline(&r.log) {
            let _ = writeln!(s, "{},{},{t:.6},{n}", r.planner.name(), r.seed);
        }
    }
    s
}

pub fn intervals_csv(runs: &[RunRecord]) -> String {
    let mut s = String::from("planner,seed,interval\n");
    for r in runs {
        for dt in inter_pose_intervals(&r.log) {
            let _ = writeln!(s, "{},{},{dt:.6}", r.planner.name(), r.seed);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub n: usize,
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn box_stats(xs: &[f64]) -> Option<BoxStats> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Some(BoxStats {
        min: v[0],
        q1: quantile(&v, 0.25),
        median: median(&v)?,
        q3: quantile(&v, 0.75),
        max: v[v.len() - 1],
        n: v.len(),
    })
}

pub fn pooled_intervals(runs: &[RunRecord], planner: PlannerKind) -> Vec<f64> {
    runs.iter()
        .filter(|r| r.planner == planner)
        .flat_map(|r| inter_pose_intervals(&r.log))
        .collect()
}

pub fn final_detections(runs: &[RunRecord], planner: PlannerKind) -> Vec<f64> {
    runs.iter()
        .filter(|r| r.planner == planner)
        .map(|r| r.summary().fruits_detected_final as f64)
        .collect()
}

const PLANNERS: [PlannerKind; 2] = [PlannerKind::Vmp, PlannerKind::Rvp];

pub fn box_csv(runs: &[RunRecord]) -> String {
    let mut s = String::from("planner,n,min,q1,median,q3,max\n");
    for p in PLANNERS {
        if let Some(b) = box_stats(&pooled_intervals(runs, p)) {
            let _ = writeln!(
                s,
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                p.name(),
                b.n,
                b.min,
                b.q1,
                b.median,
                b.q3,
                b.max
            );
        }
    }
    s
}

pub fn summary_text(runs: &[RunRecord], total_fruits: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fruits in scene: {total_fruits}");
    for p in PLANNERS {
        let det = final_detections(runs, p);
        if det.is_empty() {
            continue;
        }
        let iv = pooled_intervals(runs, p);
        let _ = writeln!(
            s,
            "{}: runs {}, detected {:.2} ± {:.2}, median interval {}",
            p.name(),
            det.len(),
            mean(&det).unwrap_or(0.0),
            std_dev(&det),
            median(&iv).map_or_else(|| "none".to_string(), |m| format!("{m:.3} s")),
        );
    }
    s
}

fn color(p: PlannerKind) -> &'static str {
    match p {
        PlannerKind::Vmp => "#1f77b4",
        PlannerKind::Rvp => "#d62728",
    }
}

const W: f64 = 800.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;

/// Detection-vs-time step curves, one per run, with dashed lines at every
/// segment change.
pub fn detections_svg(runs: &[RunRecord], time_budget: f64, n_segments: usize, total_fruits: usize) -> String {
    let t_max = (time_budget * n_segments as f64).max(1e-9);
    let y_max = total_fruits.max(1) as f64;
    let x = |t: f64| PAD + (W - 2.0 * PAD) * t / t_max;
    let y = |n: f64| H - PAD - (H - 2.0 * PAD) * n / y_max;
    let mut s = svg_open();
    for k in 0..=n_segments {
        let xx = x(k as f64 * time_budget);
        let _ = writeln!(
            s,
            r##"<line class="segment" x1="{xx:.2}" y1="{:.2}" x2="{xx:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 4"/>"##,
            PAD,
            H - PAD
        );
    }
    axes(&mut s, "simulated time [s]", "fruits detected", t_max, y_max);
    for r in runs {
        let mut pts = format!("{:.2},{:.2}", x(0.0), y(0.0));
        let mut last = 0usize;
        for (t, n) in detection_timeline(&r.log) {
            let _ = write!(pts, " {:.2},{:.2} {:.2},{:.2}", x(t), y(last as f64), x(t), y(n as f64));
            last = n;
        }
        let _ = write!(pts, " {:.2},{:.2}", x(t_max), y(last as f64));
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{pts}"><title>{} seed {}</title></polyline>"#,
            color(r.planner),
            r.planner.name(),
            r.seed
        );
    }
    legend(&mut s);
    s.push_str("</svg>\n");
    s
}

/// Box plot of pooled inter-pose intervals per planner.
pub fn intervals_svg(runs: &[RunRecord]) -> String {
    let stats: Vec<_> = PLANNERS
        .iter()
        .filter_map(|&p| box_stats(&pooled_intervals(runs, p)).map(|b| (p, b)))
        .collect();
    let y_max = stats.iter().map(|(_, b)| b.max).fold(1e-9, f64::max);
    let y = |v: f64| H - PAD - (H - 2.0 * PAD) * v / y_max;
    let mut s = svg_open();
    axes(&mut s, "planner", "inter-pose interval [s]", 0.0, y_max);
    for (i, (p, b)) in stats.iter().enumerate() {
        let cx = PAD + (W - 2.0 * PAD) * (i as f64 + 0.5) / PLANNERS.len() as f64;
        let c = color(*p);
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{c}"/>"#,
            y(b.min),
            y(b.max)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="80" height="{:.2}" fill="white" stroke="{c}"/>"#,
            cx - 40.0,
            y(b.q3),
            (y(b.q1) - y(b.q3)).max(0.5)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-width="2"/>"#,
            cx - 40.0,
            y(b.median),
            cx + 40.0,
            y(b.median)
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{} (n={})</text>"#,
            H - PAD + 20.0,
            p.name(),
            b.n
        );
    }
    s.push_str("</svg>\n");
    s
}

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn axes(s: &mut String, xlabel: &str, ylabel: &str, x_max: f64, y_max: f64) {
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#,
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        W / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{y_max:.0}</text>"#,
        PAD - 5.0,
        PAD + 4.0
    );
    if x_max > 0.0 {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{x_max:.0}</text>"#,
            W - PAD,
            H - PAD + 16.0
        );
    }
}

fn legend(s: &mut String) {
    for (i, p) in PLANNERS.iter().enumerate() {
        let yy = PAD + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{yy}" x2="{}" y2="{yy}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            PAD + 10.0,
            PAD + 30.0,
            color(*p),
            PAD + 35.0,
            yy + 4.0,
            p.name()
        );
    }
}

/// Writes every comparison artifact into `dir`.
pub fn write_comparison(
    dir: &Path,
    runs: &[RunRecord],
    time_budget: f64,
    n_segments: usize,
    total_fruits: usize,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("runs.csv"), runs_csv(runs))?;
    std::fs::write(dir.join("summary.txt"), summary_text(runs, total_fruits))?;
    std::fs::write(dir.join("timelines.csv"), timelines_csv(runs))?;
    std::fs::write(dir.join("intervals.csv"), intervals_csv(runs))?;
    std::fs::write(dir.join("intervals_box.csv"), box_csv(runs))?;
    std::fs::write(
        dir.join("detections.svg"),
        detections_svg(runs, time_budget, n_segments, total_fruits),
    )?;
    std::fs::write(dir.join("intervals.svg"), intervals_svg(runs))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles() {
        let b = box_stats(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((b.min, b.q1, b.median, b.q3, b.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let b = box_stats(&[1.0, 2.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (1.25, 1.5, 1.75));
        assert!(box_stats(&[]).is_none());
    }

    #[test]
    fn segment_markers_at_budget_multiples() {
        let svg = detections_svg(&[], 60.0, 4, 94);
        let xs: Vec<f64> = svg
            .lines()
            .filter(|l| l.contains("class=\"segment\""))
            .map(|l| {
                l.split("x1=\"")
                    .nth(1)
                    .unwrap()
                    .split('"')
                    .next()
                    .unwrap()
                    .parse()
                    .unwrap()
            })
            .collect();
        assert_eq!(xs.len(), 5);
        let step = (W - 2.0 * PAD) / 4.0;
        for (k, x) in xs.iter().enumerate() {
            assert!((x - (PAD + step * k as f64)).abs() < 0.01);
        }
    }
}
