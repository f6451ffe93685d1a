//! Disc pictures: unit circle, points, Carleson boxes and boundary bands.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use hplus_core::arcs::ArcSet;
use hplus_core::geometry::{CarlesonBox, DiscPoint};

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn arc_path(r: f64, a: f64, b: f64) -> String {
    let large = if b - a > PI { 1 } else { 0 };
    format!(
        "M {:.6} {:.6} A {r:.6} {r:.6} 0 {large} 1 {:.6} {:.6}",
        r * a.cos(),
        r * a.sin(),
        r * b.cos(),
        r * b.sin()
    )
}

fn box_path(b: &CarlesonBox) -> Option<String> {
    if b.side() >= 1.0 {
        return None;
    }
    let (a0, a1) = (b.center_angle() - PI * b.side(), b.center_angle() + PI * b.side());
    let inner = 1.0 - b.side();
    let large = if a1 - a0 > PI { 1 } else { 0 };
    Some(format!(
        "M {:.6} {:.6} A 1 1 0 {large} 1 {:.6} {:.6} L {:.6} {:.6} A {inner:.6} {inner:.6} 0 {large} 0 {:.6} {:.6} Z",
        a0.cos(),
        a0.sin(),
        a1.cos(),
        a1.sin(),
        inner * a1.cos(),
        inner * a1.sin(),
        inner * a0.cos(),
        inner * a0.sin()
    ))
}

pub struct DiscPicture<'a> {
    pub points: &'a [DiscPoint],
    pub boxes: Vec<CarlesonBox>,
    /// `(node, set)`; empty sets are skipped.
    pub bands: Vec<(usize, &'a ArcSet)>,
}

impl DiscPicture<'_> {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"-1.3 -1.3 2.6 2.6\">\n",
        );
        s.push_str("<g transform=\"scale(1,-1)\">\n");
        s.push_str("<circle class=\"unit-circle\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" stroke-width=\"0.004\"/>\n");

        s.push_str("<g class=\"boxes\" fill=\"#4477aa\" fill-opacity=\"0.08\" stroke=\"#4477aa\" stroke-width=\"0.002\">\n");
        for b in &self.boxes {
            if let Some(d) = box_path(b) {
                let _ = writeln!(s, "<path d=\"{d}\"/>");
            }
        }
        s.push_str("</g>\n");

        s.push_str("<g class=\"bands\" fill=\"none\" stroke-width=\"0.015\">\n");
        for (rank, (node, set)) in self.bands.iter().filter(|(_, g)| !g.is_empty()).enumerate() {
            let r = 1.04 + 0.025 * (rank % 8) as f64;
            let colour = PALETTE[rank % PALETTE.len()];
            let _ = writeln!(s, "<g class=\"band\" data-node=\"{node}\" stroke=\"{colour}\">");
            for &(a, b) in set.pieces() {
                if b - a >= TAU - 1e-12 {
                    let _ = writeln!(s, "<circle cx=\"0\" cy=\"0\" r=\"{r:.6}\"/>");
                } else {
                    let _ = writeln!(s, "<path d=\"{}\"/>", arc_path(r, a, b));
                }
            }
            s.push_str("</g>\n");
        }
        s.push_str("</g>\n");

        s.push_str("<g class=\"points\" fill=\"#cc3311\">\n");
        for z in self.points {
            let _ = writeln!(s, "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"0.012\"/>", z.x(), z.y());
        }
        s.push_str("</g>\n</g>\n</svg>\n");
        s
    }
}
