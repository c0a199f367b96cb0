use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::Instance;

use super::WalkTrace;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Ternary plot of a walk over three types: the first type at the bottom left, the second
/// at the bottom right, the third at the top.
pub fn ternary_svg(instance: &Instance, walk: &WalkTrace) -> Result<String> {
    if instance.num_types() != 3 {
        return Err(Error::InvalidArgument(format!(
            "ternary plot needs exactly 3 types, instance has {}",
            instance.num_types()
        )));
    }
    let side = SIZE - 2.0 * MARGIN;
    let height = side * 3f64.sqrt() / 2.0;
    let corners = [
        (MARGIN, MARGIN + height),
        (MARGIN + side, MARGIN + height),
        (MARGIN + side / 2.0, MARGIN),
    ];
    let project = |b: &[f64]| {
        let x: f64 = b.iter().zip(&corners).map(|(w, c)| w * c.0).sum();
        let y: f64 = b.iter().zip(&corners).map(|(w, c)| w * c.1).sum();
        (x, y)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        svg,
        r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="black"/>"#,
        corners[0].0, corners[0].1, corners[1].0, corners[1].1, corners[2].0, corners[2].1
    );
    let offsets = [(-24.0, 16.0), (8.0, 16.0), (-8.0, -10.0)];
    for ((corner, name), off) in corners.iter().zip(instance.type_names()).zip(offsets) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="14">{}</text>"#,
            corner.0 + off.0,
            corner.1 + off.1,
            name
        );
    }

    let mut points: Vec<(f64, f64)> = walk.records.iter().map(|r| project(r.belief.as_slice())).collect();
    points.push(project(walk.end.as_slice()));
    let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        path.join(" ")
    );
    for (t, (x, y)) in points.iter().enumerate() {
        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="steelblue"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="9">{t}</text>"#,
            x + 4.0,
            y - 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
