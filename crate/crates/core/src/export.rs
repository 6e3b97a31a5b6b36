//! SVG (planar) and OBJ (spatial) renderings of covers and paths.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::geom::Point;
use crate::jointcover::JointCover;
use crate::scene::Scene;

const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
];
const PATH_COLORS: [&str; 4] = ["#111111", "#c2185b", "#1565c0", "#2e7d32"];

/// Palette entry for a region label; labels that agree get the same colour.
pub fn label_color(label: &BigInt) -> &'static str {
    let m = (label % BigInt::from(PALETTE.len()))
        .to_i64()
        .expect("small");
    PALETTE[m.rem_euclid(PALETTE.len() as i64) as usize]
}

/// Planar picture: free regions filled by label colour, obstacles in grey,
/// one polyline per path.
pub fn svg(scene: &Scene, jc: &JointCover, paths: &[Vec<Point>]) -> String {
    let (lo, hi) = scene.bounds();
    let scale = 600.0 / (hi.x() - lo.x()).max(hi.y() - lo.y());
    let (w, h) = ((hi.x() - lo.x()) * scale, (hi.y() - lo.y()) * scale);
    let px = |p: &Point| ((p.x() - lo.x()) * scale, (hi.y() - p.y()) * scale);
    let poly = |pts: &[Point]| {
        pts.iter()
            .map(px)
            .map(|(x, y)| format!("{x:.3},{y:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="{w:.3}" height="{h:.3}" fill="#ffffff" stroke="#000000"/>"##
    );
    let t = jc.triangulation();
    for r in jc.regions() {
        let c = label_color(&r.label);
        let _ = writeln!(
            out,
            r#"<g id="region-{}" fill="{c}" fill-opacity="0.55" stroke="{c}" stroke-width="0.5">"#,
            r.id
        );
        for &s in &r.simplices {
            let _ = writeln!(out, r#"<polygon points="{}"/>"#, poly(&t.simplex_points(s)));
        }
        let _ = writeln!(out, "</g>");
    }
    for o in scene.obstacles() {
        for piece in &o.pieces {
            let _ = writeln!(
                out,
                r##"<polygon id="obstacle-{}" points="{}" fill="#555555"/>"##,
                o.id,
                poly(&piece.vertices)
            );
        }
    }
    for (i, p) in paths.iter().enumerate() {
        let c = PATH_COLORS[i % PATH_COLORS.len()];
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
            poly(p)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Wavefront OBJ: one group per region (its simplices' boundary faces in 3D,
/// its triangles in 2D), one group per obstacle piece, paths as lines.
pub fn obj(scene: &Scene, jc: &JointCover, paths: &[Vec<Point>]) -> String {
    let t = jc.triangulation();
    let mut out = String::new();
    let v3 = |p: &Point| {
        if p.dim() == 3 {
            (p.x(), p.y(), p.z())
        } else {
            (p.x(), p.y(), 0.0)
        }
    };
    for p in t.points() {
        let (x, y, z) = v3(p);
        let _ = writeln!(out, "v {x} {y} {z}");
    }
    let mut next = t.points().len() + 1;
    for r in jc.regions() {
        let _ = writeln!(out, "g region_{}", r.id);
        for &s in &r.simplices {
            if t.dim() == 2 {
                let f: Vec<String> = t.simplex(s).iter().map(|v| (v + 1).to_string()).collect();
                let _ = writeln!(out, "f {}", f.join(" "));
                continue;
            }
            for (k, n) in t.neighbors(s).iter().enumerate() {
                if n.is_some_and(|n| jc.region_of_simplex(n) == Some(r.id)) {
                    continue;
                }
                let f: Vec<String> = t.facet(s, k).iter().map(|v| (v + 1).to_string()).collect();
                let _ = writeln!(out, "f {}", f.join(" "));
            }
        }
    }
    for o in scene.obstacles() {
        for (i, piece) in o.pieces.iter().enumerate() {
            let _ = writeln!(out, "g obstacle_{}_{}", o.id, i);
            for p in &piece.vertices {
                let (x, y, z) = v3(p);
                let _ = writeln!(out, "v {x} {y} {z}");
            }
            if piece.faces.is_empty() {
                let f: Vec<String> = (0..piece.vertices.len())
                    .map(|j| (next + j).to_string())
                    .collect();
                let _ = writeln!(out, "f {}", f.join(" "));
            } else {
                for f in &piece.faces {
                    let _ = writeln!(out, "f {} {} {}", next + f[0], next + f[1], next + f[2]);
                }
            }
            next += piece.vertices.len();
        }
    }
    for (i, p) in paths.iter().enumerate() {
        let _ = writeln!(out, "g path_{i}");
        for q in p {
            let (x, y, z) = v3(q);
            let _ = writeln!(out, "v {x} {y} {z}");
        }
        let l: Vec<String> = (0..p.len()).map(|j| (next + j).to_string()).collect();
        let _ = writeln!(out, "l {}", l.join(" "));
        next += p.len();
    }
    out
}
