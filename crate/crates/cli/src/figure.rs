//! Threshold-vs-dimension series and a hand-written SVG rendering.

use crate::commands::{ThresholdRow, CONJECTURE, LIT_78, LIT_EVEN};
use crate::output::{fmt_num, Csv};

pub struct Series {
    pub name: &'static str,
    pub colour: &'static str,
    pub points: Vec<(usize, f64)>,
}

pub fn series(rows: &[ThresholdRow]) -> Vec<Series> {
    let literature = rows
        .iter()
        .map(|r| {
            let v = match r.n {
                7 | 8 => LIT_78,
                n if n % 2 == 0 => LIT_EVEN,
                _ => 0.0,
            };
            (r.n, v)
        })
        .collect();
    vec![
        Series { name: "literature", colour: "#2e8b57", points: literature },
        Series { name: "new", colour: "#e67e22", points: rows.iter().map(|r| (r.n, r.delta)).collect() },
        Series { name: "conjecture", colour: "#1f77b4", points: rows.iter().map(|r| (r.n, CONJECTURE)).collect() },
    ]
}

/// Long format: one row per (series, n).
pub fn csv(series: &[Series]) -> String {
    let mut csv = Csv::new(&["series", "n", "delta"]);
    for s in series {
        for &(n, v) in &s.points {
            csv.row(&[s.name.to_string(), n.to_string(), fmt_num(v)]);
        }
    }
    csv.finish()
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

pub fn svg(series: &[Series], n_min: usize, n_max: usize) -> String {
    let span = (n_max - n_min).max(1) as f64;
    let x = |n: usize| MARGIN + (n - n_min) as f64 / span * (WIDTH - 2.0 * MARGIN);
    let y = |d: f64| HEIGHT - MARGIN - d * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += &format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    out += &format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n  \
         <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n  \
         <line x1=\"{m}\" y1=\"{b}\" x2=\"{m}\" y2=\"{m}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
    );
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        out += &format!(
            "  <text x=\"{}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">{tick}</text>\n",
            MARGIN - 4.0,
            y(tick) + 3.0
        );
    }
    out += &format!(
        "  <text x=\"{:.2}\" y=\"{}\" font-size=\"10\">n = {n_min}</text>\n  \
         <text x=\"{:.2}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">n = {n_max}</text>\n",
        x(n_min),
        HEIGHT - MARGIN + 14.0,
        x(n_max),
        HEIGHT - MARGIN + 14.0,
    );
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s.points.iter().map(|&(n, d)| format!("{:.2},{:.2}", x(n), y(d))).collect();
        out += &format!(
            "  <polyline id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            s.name,
            s.colour,
            pts.join(" ")
        );
        out += &format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            WIDTH - MARGIN - 80.0,
            MARGIN + 14.0 * i as f64,
            s.colour,
            s.name
        );
    }
    out += "</svg>\n";
    out
}
