use std::fmt::Write;

use crate::error::CliError;
use crate::io::LogRow;

pub const TRAJECTORY_SCHEMA: &str = "gaitmatrix/trajectory/v1";

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 300.0;
const TRACK_TOP: f64 = 330.0;
const TRACK_BOTTOM: f64 = 360.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if hi > lo {
        out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
    } else {
        (out_lo + out_hi) / 2.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Centre-of-mass displacement against time, with the robot state drawn as a
/// coloured track underneath. Output depends only on `rows`.
pub fn render_trajectory(rows: &[LogRow]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::input("session log is empty"));
    }
    if let Some(w) = rows
        .windows(2)
        .find(|w| w[1].t_ms.partial_cmp(&w[0].t_ms).is_none_or(|o| o.is_lt()))
    {
        return Err(CliError::input(format!(
            "session log timestamps decrease at {} ms",
            w[1].t_ms
        )));
    }
    if let Some(r) = rows.iter().find(|r| !r.t_ms.is_finite() || !r.com_mm.is_finite()) {
        return Err(CliError::input(format!(
            "non-finite value in session log at {} ms",
            r.t_ms
        )));
    }

    let t0 = rows[0].t_ms;
    let t1 = rows[rows.len() - 1].t_ms;
    let (mut y0, mut y1) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
        (a.min(r.com_mm), b.max(r.com_mm))
    });
    if y1 - y0 < 1e-9 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let x = |t: f64| scale(t, t0, t1, LEFT, RIGHT);
    let y = |c: f64| scale(c, y0, y1, BOTTOM, TOP);

    let mut states: Vec<&str> = rows.iter().map(|r| r.state.as_str()).collect();
    states.sort_unstable();
    states.dedup();
    let colour = |s: &str| PALETTE[states.binary_search(&s).expect("listed state") % PALETTE.len()];

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(svg, "<!-- {} -->", TRAJECTORY_SCHEMA);
    let _ = writeln!(svg, r#"<rect width="{}" height="{}" fill="white"/>"#, WIDTH, HEIGHT);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">centre of mass displacement</text>"#,
        WIDTH / 2.0
    );

    // Axes and range labels.
    let _ = writeln!(
        svg,
        r#"<path d="M{l:.2} {t:.2} L{l:.2} {b:.2} L{r:.2} {b:.2}" fill="none" stroke="black"/>"#,
        l = LEFT,
        t = TOP,
        b = BOTTOM,
        r = RIGHT
    );
    for (v, label) in [(y1, y1), (y0, y0)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3} mm</text>"#,
            LEFT - 6.0,
            y(v) + 4.0,
            label
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
            LEFT,
            RIGHT,
            y = y(0.0)
        );
    }
    for (t, anchor) in [(t0, "start"), (t1, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{}">{:.1} ms</text>"#,
            x(t),
            BOTTOM + 16.0,
            anchor,
            t
        );
    }

    // Trajectory.
    if rows.len() == 1 {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#1f3b73"/>"##,
            x(rows[0].t_ms),
            y(rows[0].com_mm)
        );
    } else {
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x(r.t_ms), y(r.com_mm)))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="#1f3b73" stroke-width="1.5"/>"##,
            points.join(" ")
        );
    }

    // State track: each row's state holds until the next row.
    for (k, r) in rows.iter().enumerate() {
        let start = x(r.t_ms);
        let end = rows.get(k + 1).map_or(RIGHT, |n| x(n.t_ms));
        let width = (end - start).max(if rows.len() == 1 { RIGHT - LEFT } else { 0.0 });
        if width <= 0.0 {
            continue;
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            if rows.len() == 1 { LEFT } else { start },
            TRACK_TOP,
            width,
            TRACK_BOTTOM - TRACK_TOP,
            colour(&r.state)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">state</text>"#,
        LEFT - 6.0,
        (TRACK_TOP + TRACK_BOTTOM) / 2.0 + 4.0
    );
    for (k, s) in states.iter().enumerate() {
        let lx = LEFT + 110.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx,
            TRACK_BOTTOM + 16.0,
            colour(s),
            lx + 14.0,
            TRACK_BOTTOM + 25.0,
            escape(s)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, state: &str, com: f64) -> LogRow {
        LogRow {
            t_ms: t,
            state: state.into(),
            com_mm: com,
        }
    }

    #[test]
    fn single_row_gives_one_marker() {
        let svg = render_trajectory(&[row(0.0, "0:(00)", 0.0)]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("<polyline"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn deterministic() {
        let rows = vec![
            row(0.0, "0:(00)", 0.0),
            row(50.0, "2:(10)", 0.1),
            row(100.0, "1:(01)", 0.15),
        ];
        assert_eq!(render_trajectory(&rows).unwrap(), render_trajectory(&rows).unwrap());
    }

    #[test]
    fn rejects_empty_and_unordered() {
        assert!(render_trajectory(&[]).is_err());
        assert!(render_trajectory(&[row(10.0, "a", 0.0), row(5.0, "a", 0.0)]).is_err());
    }

    #[test]
    fn escapes_labels() {
        let svg = render_trajectory(&[row(0.0, "<x>", 0.0)]).unwrap();
        assert!(svg.contains("&lt;x&gt;"));
    }
}
