//! Standalone SVG scatterplots of 2-D coordinates coloured by class.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use ndarray::Array2;

use crate::error::{Error, Result};

pub const PALETTE: [&str; 8] = [
    "#e41a1c", "#4daf4a", "#377eb8", "#00bcd4", "#984ea3", "#ff7f00", "#a65628", "#f781bf",
];
pub const DEFAULT_COLOR: &str = "#808080";

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PLOT_LEFT: f64 = 60.0;
const PLOT_TOP: f64 = 20.0;
const PLOT_W: f64 = 440.0;
const PLOT_H: f64 = 420.0;
const LEGEND_X: f64 = 520.0;

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Render an SVG scatterplot.
///
/// Each item is drawn as one circle. Labels are sorted and assigned palette
/// colours in order, cycling after eight; an item with several labels takes
/// the colour of its smallest one and unlabeled items are grey. Label rows
/// naming an id absent from `ids` are an error.
pub fn render_svg(
    ids: &[String],
    coords: &Array2<f64>,
    labels: &[(String, String)],
) -> Result<String> {
    if coords.ncols() != 2 || coords.nrows() != ids.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} x 2 coordinates, got {:?}",
            ids.len(),
            coords.dim()
        )));
    }
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut item_label: Vec<Option<&str>> = vec![None; ids.len()];
    for (id, label) in labels {
        let i = *index
            .get(id.as_str())
            .ok_or_else(|| Error::InvalidInput(format!("label for unknown item id {id:?}")))?;
        let slot = &mut item_label[i];
        if slot.is_none_or(|cur| label.as_str() < cur) {
            *slot = Some(label.as_str());
        }
    }
    let legend: Vec<&str> = labels
        .iter()
        .map(|(_, l)| l.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let color_of: HashMap<&str, &str> = legend
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, PALETTE[i % PALETTE.len()]))
        .collect();

    let (x0, x1) = padded_range(coords.column(0).iter().copied());
    let (y0, y1) = padded_range(coords.column(1).iter().copied());
    let sx = |x: f64| PLOT_LEFT + (x - x0) / (x1 - x0) * PLOT_W;
    let sy = |y: f64| PLOT_TOP + PLOT_H - (y - y0) / (y1 - y0) * PLOT_H;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#000000"/>"##
    );
    let bottom = PLOT_TOP + PLOT_H;
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="11"><text x="{PLOT_LEFT}" y="{:.1}">{x0:.3}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{x1:.3}</text><text x="{:.1}" y="{bottom}" text-anchor="end">{y0:.3}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{y1:.3}</text></g>"#,
        bottom + 14.0,
        PLOT_LEFT + PLOT_W,
        bottom + 14.0,
        PLOT_LEFT - 4.0,
        PLOT_LEFT - 4.0,
        PLOT_TOP + 10.0,
    );

    let _ = writeln!(svg, r#"<g stroke="none" fill-opacity="0.85">"#);
    for (i, row) in coords.rows().into_iter().enumerate() {
        let fill = item_label[i].map_or(DEFAULT_COLOR, |l| color_of[l]);
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{fill}"/>"#,
            sx(row[0]),
            sy(row[1])
        );
    }
    let _ = writeln!(svg, "</g>");

    if !legend.is_empty() {
        let _ = writeln!(
            svg,
            r#"<g class="legend" font-family="sans-serif" font-size="12">"#
        );
        for (n, label) in legend.iter().enumerate() {
            let y = PLOT_TOP + 18.0 * n as f64;
            let _ = writeln!(
                svg,
                r#"<rect x="{LEGEND_X}" y="{y}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                color_of[label],
                LEGEND_X + 16.0,
                y + 9.0,
                escape(label)
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn rows(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn one_circle_per_item_and_legend_per_label() {
        let coords = array![[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]];
        let svg = render_svg(
            &ids(3),
            &coords,
            &rows(&[("p0", "b"), ("p1", "a"), ("p2", "b")]),
        )
        .unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<text x=\"536\"").count(), 2);
        // "a" sorts first and takes the first palette colour
        assert!(svg.contains(&format!(
            r#"fill="{}"/><text x="536" y="29">a<"#,
            PALETTE[0]
        )));
    }

    #[test]
    fn without_labels_points_are_grey() {
        let coords = array![[0.0, 0.0], [1.0, 1.0]];
        let svg = render_svg(&ids(2), &coords, &[]).unwrap();
        assert_eq!(svg.matches(DEFAULT_COLOR).count(), 2);
        assert!(!svg.contains("legend"));
    }

    #[test]
    fn points_stay_inside_the_plot_area() {
        let coords = array![[-5.0, 10.0], [5.0, 20.0], [0.0, 15.0]];
        let svg = render_svg(&ids(3), &coords, &[]).unwrap();
        // 5% margin: x = -5 maps to 60 + 440 * 0.5 / 11
        assert!(svg.contains(r#"cx="80.00""#));
        assert!(svg.contains(r#"cx="480.00""#));
    }

    #[test]
    fn deterministic_and_rejects_unknown_ids() {
        let coords = array![[0.0, 0.0], [1.0, 1.0]];
        let labels = rows(&[("p0", "x"), ("p1", "y")]);
        assert_eq!(
            render_svg(&ids(2), &coords, &labels).unwrap(),
            render_svg(&ids(2), &coords, &labels).unwrap()
        );
        assert!(render_svg(&ids(2), &coords, &rows(&[("q", "x")])).is_err());
    }
}
