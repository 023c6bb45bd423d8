//! Static SVG renderings of ROC curves and confusion matrices.
//!
//! Charts are built as plain strings with fixed layout and formatting, so
//! the same inputs always produce byte-identical files.

use std::fmt::Write;

use crate::data::LoadClass;
use crate::eval::{ConfusionMatrix, MulticlassRoc};

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 470.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 50.0;
const PLOT_SIZE: f64 = 330.0;

const COLOR_AXIS: &str = "#333333";
const COLOR_GRID: &str = "#dddddd";
const CLASS_COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];
const COLOR_MICRO: &str = "#d62728";
const FONT: &str = "Helvetica, Arial, sans-serif";

fn x_pixel(fraction: f64) -> f64 {
    MARGIN_LEFT + fraction * PLOT_SIZE
}

fn y_pixel(fraction: f64) -> f64 {
    MARGIN_TOP + (1.0 - fraction) * PLOT_SIZE
}

fn open_svg(out: &mut String, title: &str) {
    write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    )
    .unwrap();
    write!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    write!(
        out,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-family="{FONT}" font-size="16" font-weight="bold" fill="{COLOR_AXIS}">{}</text>"#,
        MARGIN_LEFT + PLOT_SIZE / 2.0,
        escape(title)
    )
    .unwrap();
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, xs: &[f64], ys: &[f64], color: &str, dashed: bool) {
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", x_pixel(x), y_pixel(y)))
        .collect();
    let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
    write!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
        points.join(" ")
    )
    .unwrap();
}

fn unit_axes(out: &mut String, x_label: &str, y_label: &str) {
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        // grid
        write!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{COLOR_GRID}" stroke-width="1"/>"#,
            x_pixel(f),
            y_pixel(0.0),
            x_pixel(f),
            y_pixel(1.0)
        )
        .unwrap();
        write!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{COLOR_GRID}" stroke-width="1"/>"#,
            x_pixel(0.0),
            y_pixel(f),
            x_pixel(1.0),
            y_pixel(f)
        )
        .unwrap();
        // tick labels
        write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="11" fill="{COLOR_AXIS}">{f:.1}</text>"#,
            x_pixel(f),
            y_pixel(0.0) + 18.0
        )
        .unwrap();
        write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="{FONT}" font-size="11" fill="{COLOR_AXIS}">{f:.1}</text>"#,
            x_pixel(0.0) - 8.0,
            y_pixel(f) + 4.0
        )
        .unwrap();
    }
    // axis frame
    write!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{PLOT_SIZE}" height="{PLOT_SIZE}" fill="none" stroke="{COLOR_AXIS}" stroke-width="1.2"/>"#,
        x_pixel(0.0),
        y_pixel(1.0)
    )
    .unwrap();
    write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="13" fill="{COLOR_AXIS}">{x_label}</text>"#,
        MARGIN_LEFT + PLOT_SIZE / 2.0,
        y_pixel(0.0) + 40.0
    )
    .unwrap();
    write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="13" fill="{COLOR_AXIS}" transform="rotate(-90 {:.2} {:.2})">{y_label}</text>"#,
        x_pixel(0.0) - 45.0,
        MARGIN_TOP + PLOT_SIZE / 2.0,
        x_pixel(0.0) - 45.0,
        MARGIN_TOP + PLOT_SIZE / 2.0
    )
    .unwrap();
}

/// One-vs-rest curves for the three classes plus the micro-average curve,
/// with AUC values in the legend.
pub fn roc_svg(roc: &MulticlassRoc, title: &str) -> String {
    let mut out = String::new();
    open_svg(&mut out, title);
    unit_axes(&mut out, "False positive rate", "True positive rate");

    // chance diagonal
    polyline(&mut out, &[0.0, 1.0], &[0.0, 1.0], "#999999", true);

    for class in LoadClass::ALL {
        let curve = &roc.per_class[class.index()];
        polyline(&mut out, &curve.fpr, &curve.tpr, CLASS_COLORS[class.index()], false);
    }
    polyline(&mut out, &roc.micro.fpr, &roc.micro.tpr, COLOR_MICRO, true);

    // legend
    let legend_x = MARGIN_LEFT + PLOT_SIZE + 20.0;
    let mut legend_y = MARGIN_TOP + 20.0;
    let mut legend_line = |out: &mut String, color: &str, dashed: bool, label: &str| {
        let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
        write!(
            out,
            r#"<line x1="{legend_x:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="1.8"{dash}/>"#,
            legend_x + 26.0
        )
        .unwrap();
        write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="{FONT}" font-size="12" fill="{COLOR_AXIS}">{label}</text>"#,
            legend_x + 32.0,
            legend_y + 4.0
        )
        .unwrap();
        legend_y += 22.0;
    };
    for class in LoadClass::ALL {
        let label = format!(
            "{} (AUC {:.3})",
            class,
            roc.report.auc_per_class[class.index()]
        );
        legend_line(&mut out, CLASS_COLORS[class.index()], false, &label);
    }
    legend_line(
        &mut out,
        COLOR_MICRO,
        true,
        &format!("micro (AUC {:.3})", roc.report.auc_micro),
    );
    write!(
        &mut out,
        r#"<text x="{legend_x:.2}" y="{:.2}" font-family="{FONT}" font-size="12" fill="{COLOR_AXIS}">macro AUC {:.3}</text>"#,
        legend_y + 4.0,
        roc.report.auc_macro
    )
    .unwrap();

    out.push_str("</svg>\n");
    out
}

/// Linear interpolation between a near-white and a deep blue.
fn heat_color(fraction: f64) -> String {
    let lerp = |a: u8, b: u8| (a as f64 + fraction * (b as f64 - a as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(0xf7, 0x08), lerp(0xfb, 0x30), lerp(0xff, 0x6b))
}

/// 3×3 heatmap; rows are the true class, columns the predicted class.
pub fn confusion_svg(cm: &ConfusionMatrix, title: &str) -> String {
    let cell = PLOT_SIZE / 3.0;
    let max = cm.counts.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;

    let mut out = String::new();
    open_svg(&mut out, title);
    for (i, row) in cm.counts.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            let x = MARGIN_LEFT + j as f64 * cell;
            let y = MARGIN_TOP + i as f64 * cell;
            let fraction = count as f64 / max;
            write!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}" stroke="white" stroke-width="2"/>"#,
                heat_color(fraction)
            )
            .unwrap();
            let text_color = if fraction > 0.55 { "white" } else { COLOR_AXIS };
            write!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="18" fill="{text_color}">{count}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0 + 6.0
            )
            .unwrap();
        }
    }
    for class in LoadClass::ALL {
        let offset = (class.index() as f64 + 0.5) * cell;
        write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="12" fill="{COLOR_AXIS}">{class}</text>"#,
            MARGIN_LEFT + offset,
            MARGIN_TOP - 8.0
        )
        .unwrap();
        write!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="{FONT}" font-size="12" fill="{COLOR_AXIS}">{class}</text>"#,
            MARGIN_LEFT - 10.0,
            MARGIN_TOP + offset + 4.0
        )
        .unwrap();
    }
    write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="13" fill="{COLOR_AXIS}">Predicted class</text>"#,
        MARGIN_LEFT + PLOT_SIZE / 2.0,
        MARGIN_TOP + PLOT_SIZE + 30.0
    )
    .unwrap();
    write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="13" fill="{COLOR_AXIS}" transform="rotate(-90 {:.2} {:.2})">True class</text>"#,
        MARGIN_LEFT - 48.0,
        MARGIN_TOP + PLOT_SIZE / 2.0,
        MARGIN_LEFT - 48.0,
        MARGIN_TOP + PLOT_SIZE / 2.0
    )
    .unwrap();
    write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="{FONT}" font-size="12" fill="{COLOR_AXIS}">accuracy {:.3}</text>"#,
        MARGIN_LEFT + PLOT_SIZE / 2.0,
        MARGIN_TOP + PLOT_SIZE + 50.0,
        cm.accuracy()
    )
    .unwrap();

    out.push_str("</svg>\n");
    out
}
