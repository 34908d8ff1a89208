//! Standalone SVG line plots of sweep tables.

use std::fmt::Write as _;

use strauss_core::{Error, Result, SweepTable};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;

const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 6;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

/// One polyline: `column` of `tables[table]` times `scale`, against the plot's x column.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub table: usize,
    pub column: String,
    pub label: String,
    pub scale: f64,
}

impl Series {
    pub fn new(table: usize, column: &str) -> Self {
        Series {
            table,
            column: column.to_string(),
            label: column.to_string(),
            scale: 1.0,
        }
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Scales by the power of ten that brings the largest magnitude into `[1, 10)`.
    pub fn fitted(mut self, table: &SweepTable) -> Result<Self> {
        let peak = table
            .column(&self.column)?
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m: f64, v| m.max(v.abs()));
        if peak > 0.0 {
            let k = -peak.log10().floor() as i32;
            self.scale = 10f64.powi(k);
            if k != 0 {
                self.label = format!("{} ×1e{k}", self.label);
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub series: Vec<Series>,
    /// Dashed vertical line at this x, with its legend label.
    pub marker: Option<(f64, String)>,
}

type Segment = Vec<(f64, f64)>;

/// Splits a series at non-finite points.
fn segments(xs: &[f64], ys: &[f64], scale: f64) -> Vec<Segment> {
    let mut out = vec![Vec::new()];
    for (&x, &y) in xs.iter().zip(ys) {
        let y = y * scale;
        if x.is_finite() && y.is_finite() {
            out.last_mut().unwrap().push((x, y));
        } else if !out.last().unwrap().is_empty() {
            out.push(Vec::new());
        }
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Tick positions on a 1, 2, 5 ladder covering `[lo, hi]`, and the tick step.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let raw = (hi - lo) / TICKS as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    if step < 1e-4 || v.abs() >= 1e5 {
        format!("{v:.1e}")
    } else {
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        format!("{v:.decimals$}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Renders `spec` over `tables` as an 800×500 SVG document.
pub fn emit_svg(tables: &[&SweepTable], spec: &PlotSpec) -> Result<String> {
    if spec.series.is_empty() {
        return Err(Error::Data("plot has no series".into()));
    }
    let mut lines = Vec::new();
    for s in &spec.series {
        let table = tables.get(s.table).ok_or_else(|| {
            Error::Data(format!(
                "series {} refers to missing table {}",
                s.label, s.table
            ))
        })?;
        if table.rows.is_empty() {
            return Err(Error::Data(format!("table {} is empty", table.kind)));
        }
        lines.push(segments(
            &table.column(&spec.x)?,
            &table.column(&s.column)?,
            s.scale,
        ));
    }
    let points: Vec<(f64, f64)> = lines.iter().flatten().flatten().copied().collect();
    if points.is_empty() {
        return Err(Error::Data("no finite points to plot".into()));
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        points
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let (mut x_lo, mut x_hi) = fold(|p| p.0);
    if let Some((m, _)) = &spec.marker {
        x_lo = x_lo.min(*m);
        x_hi = x_hi.max(*m);
    }
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = {
        let (lo, hi) = fold(|p| p.1);
        padded(lo, hi)
    };
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let (xt, xstep) = ticks(x_lo, x_hi);
    for x in xt {
        let px = sx(x);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            tick_label(x, xstep)
        );
    }
    let (yt, ystep) = ticks(y_lo, y_hi);
    for y in yt {
        let py = sy(y);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(y, ystep)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&spec.x)
    );

    let legend_x = LEFT + pw + 15.0;
    for (k, (s, segs)) in spec.series.iter().zip(&lines).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        for seg in segs {
            let pts: Vec<String> = seg
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{legend_x:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 20.0,
            legend_x + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    if let Some((m, label)) = &spec.marker {
        let px = sx(*m);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="black" stroke-dasharray="4 4"/>"#,
            TOP + ph
        );
        let ly = TOP + 10.0 + 20.0 * spec.series.len() as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{legend_x:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="black" stroke-dasharray="4 4"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 20.0,
            legend_x + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[[f64; 2]]) -> SweepTable {
        let mut t = SweepTable::new("demo", &["x", "y"], "{}");
        for r in rows {
            t.push(r.to_vec()).unwrap();
        }
        t
    }

    fn spec(series: Vec<Series>) -> PlotSpec {
        PlotSpec {
            title: "demo".into(),
            x: "x".into(),
            series,
            marker: None,
        }
    }

    #[test]
    fn two_columns_make_one_polyline() {
        let t = table(&[[0.0, 1.0], [1.0, 2.0], [2.0, 0.5]]);
        let svg = emit_svg(&[&t], &spec(vec![Series::new(0, "y")])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(r#"viewBox="0 0 800 500""#));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn gaps_split_lines_and_markers_are_dashed() {
        let mut t = table(&[[0.0, 1.0], [1.0, 2.0]]);
        t.push_gap(2.0);
        t.push(vec![3.0, 1.0]).unwrap();
        t.push(vec![4.0, 0.0]).unwrap();
        let mut s = spec(vec![Series::new(0, "y")]);
        s.marker = Some((2.5, "boundary".into()));
        let svg = emit_svg(&[&t], &s).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
    }

    #[test]
    fn overlays_use_distinct_colours() {
        let (a, b) = (
            table(&[[0.0, 1.0], [1.0, 2.0]]),
            table(&[[0.0, 2.0], [1.0, 3.0]]),
        );
        let s = spec(vec![
            Series::new(0, "y").labelled("a"),
            Series::new(1, "y").labelled("b"),
        ]);
        let svg = emit_svg(&[&a, &b], &s).unwrap();
        assert!(svg.contains(PALETTE[0]) && svg.contains(PALETTE[1]));
    }

    #[test]
    fn fitted_scale_is_a_power_of_ten() {
        let t = table(&[[0.0, 0.003], [1.0, -0.0042]]);
        let s = Series::new(0, "y").fitted(&t).unwrap();
        assert_eq!(s.scale, 1000.0);
        assert_eq!(s.label, "y ×1e3");
    }

    #[test]
    fn empty_inputs_are_data_errors() {
        let empty = table(&[]);
        assert!(matches!(
            emit_svg(&[&empty], &spec(vec![Series::new(0, "y")])),
            Err(Error::Data(_))
        ));
        let t = table(&[[0.0, 1.0]]);
        assert!(emit_svg(&[&t], &spec(vec![])).is_err());
        assert!(emit_svg(&[&t], &spec(vec![Series::new(0, "z")])).is_err());
        assert!(emit_svg(&[&t], &spec(vec![Series::new(1, "y")])).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let t = table(&[[0.1, 0.2], [0.3, 0.25]]);
        let s = spec(vec![Series::new(0, "y")]);
        assert_eq!(emit_svg(&[&t], &s).unwrap(), emit_svg(&[&t], &s).unwrap());
    }
}
