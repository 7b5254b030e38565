use std::fmt::Write;

use super::TrajectorySegment;
use crate::ComplexValue;

const VIEW: f64 = 1000.0;

/// A point drawn on top of the trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvgMarker {
    Zero(ComplexValue),
    Pole(ComplexValue),
    Seed(ComplexValue),
}

fn to_view(z: ComplexValue) -> (f64, f64) {
    let half = VIEW / 2.0;
    (half + half * z.re, half - half * z.im)
}

/// `index,re,im` rows with a header, 17 significant digits, LF endings.
pub fn segment_to_csv(segment: &TrajectorySegment) -> String {
    let mut out = String::from("index,re,im\n");
    for (k, z) in segment.points.iter().enumerate() {
        writeln!(out, "{k},{:.16e},{:.16e}", z.re, z.im).unwrap();
    }
    out
}

/// An SVG 1.1 document on a 1000×1000 viewport with the unit circle
/// inscribed, one `path` per segment and markers for singular points.
pub fn segments_to_svg(segments: &[TrajectorySegment], markers: &[SvgMarker]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{v}\" height=\"{v}\" viewBox=\"0 0 {v} {v}\">",
        v = VIEW
    )
    .unwrap();
    writeln!(
        out,
        "<circle cx=\"500\" cy=\"500\" r=\"500\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>"
    )
    .unwrap();
    for seg in segments {
        if seg.points.len() < 2 {
            continue;
        }
        let mut d = String::new();
        for (k, z) in seg.points.iter().enumerate() {
            let (x, y) = to_view(*z);
            write!(d, "{}{:.3},{:.3}", if k == 0 { "M" } else { " L" }, x, y).unwrap();
        }
        writeln!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" data-end=\"{}\"/>",
            seg.terminal_event
        )
        .unwrap();
    }
    for m in markers {
        let (z, color, kind) = match m {
            SvgMarker::Zero(z) => (z, "green", "zero"),
            SvgMarker::Pole(z) => (z, "red", "pole"),
            SvgMarker::Seed(z) => (z, "gray", "seed"),
        };
        let (x, y) = to_view(*z);
        writeln!(
            out,
            "<circle class=\"{kind}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{}\" fill=\"{color}\"/>",
            if kind == "seed" { 2 } else { 6 }
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
