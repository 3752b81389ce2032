//! SVG drawing of the constraint graph over the input graph: blue vertex
//! clauses sit on their vertices, each face's clauses cluster inside the
//! face, and every variable is a line from its red clause to its blue one.

use std::f64::consts::TAU;
use std::fmt::Write;

use graphfold::{Color, Decision, FaceId, Instance, VarId};

const SIZE: f64 = 640.0;
const RADIUS: f64 = 240.0;

type Point = (f64, f64);

fn fmt_point((x, y): Point) -> (String, String) {
    (format!("{x:.1}"), format!("{y:.1}"))
}

/// Best-effort layout: graph vertices on a circle, face clauses around the
/// mean of their face's corners (exterior faces pushed outside the circle).
pub fn emit_diagram(instance: &Instance, decision: &Decision) -> String {
    let g = &instance.graph;
    let clause_count: usize = decision
        .artifacts
        .iter()
        .map(|a| a.assembly.csp.clauses().len())
        .sum();
    if g.vertex_count() == 0 && clause_count == 0 {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"></svg>\n"
            .to_string();
    }
    let center = (SIZE / 2.0, SIZE / 2.0);
    let n = g.vertex_count().max(1) as f64;
    let vertex_at: Vec<Point> = g
        .vertices()
        .map(|v| {
            if g.vertex_count() == 1 {
                return center;
            }
            let t = TAU * v.index() as f64 / n - TAU / 4.0;
            (center.0 + RADIUS * t.cos(), center.1 + RADIUS * t.sin())
        })
        .collect();
    let face_anchor = |f: FaceId, exterior: bool| -> Point {
        let pts: Vec<Point> = g.face_vertices(f).map(|v| vertex_at[v.index()]).collect();
        let k = pts.len().max(1) as f64;
        let mean = (
            pts.iter().map(|p| p.0).sum::<f64>() / k,
            pts.iter().map(|p| p.1).sum::<f64>() / k,
        );
        if !exterior {
            return mean;
        }
        let (dx, dy) = (mean.0 - center.0, mean.1 - center.1);
        let norm = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = if norm < 1e-9 {
            (-1.0, -1.0)
        } else {
            (dx / norm, dy / norm)
        };
        let out = RADIUS + 45.0;
        (
            center.0 + out * ux / ux.abs().max(uy.abs()).max(1.0),
            center.1 + out * uy / ux.abs().max(uy.abs()).max(1.0),
        )
    };

    let mut positions: Vec<Point> = Vec::with_capacity(clause_count);
    let mut colors: Vec<Color> = Vec::with_capacity(clause_count);
    let mut titles: Vec<String> = Vec::with_capacity(clause_count);
    for art in &decision.artifacts {
        let clauses = art.assembly.csp.clauses();
        let mut owner: Vec<Option<FaceId>> = vec![None; clauses.len()];
        for (fc, &offset) in art.assembly.faces.iter().zip(&art.assembly.face_offsets) {
            for slot in &mut owner[offset..offset + fc.clauses.len()] {
                *slot = Some(fc.face);
            }
        }
        let mut ring_index = std::collections::BTreeMap::<FaceId, usize>::new();
        for (clause, face) in clauses.iter().zip(&owner) {
            let p = match face {
                Some(f) => {
                    let i = ring_index.entry(*f).or_insert(0);
                    let anchor = face_anchor(*f, *f == art.exterior);
                    let r = if *i == 0 { 0.0 } else { 10.0 + 3.0 * *i as f64 };
                    let t = 2.4 * *i as f64;
                    *i += 1;
                    (anchor.0 + r * t.cos(), anchor.1 + r * t.sin())
                }
                None => {
                    let a = clause.vars.first().and_then(|v| v.as_angle(g));
                    a.map(|a| vertex_at[g.angle_vertex(a).index()])
                        .unwrap_or(center)
                }
            };
            positions.push(p);
            colors.push(clause.color);
            titles.push(format!(
                "{} {} of {}",
                clause.color.as_str(),
                clause.target,
                clause.vars.len()
            ));
        }
    }

    let mut variables: Vec<(VarId, usize, usize)> = Vec::new();
    let mut base = 0;
    for art in &decision.artifacts {
        for (&v, occ) in art.assembly.csp.occurrences() {
            variables.push((v, base + occ.red, base + occ.blue));
        }
        base += art.assembly.csp.clauses().len();
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        svg,
        "<style>.edge{{stroke:#ccc;stroke-width:6}}.vertex{{fill:#999}}.variable{{stroke:#222;stroke-width:1.2}}\
         .clause.red{{fill:#d62728}}.clause.blue{{fill:#1f77b4}}</style>"
    );
    for e in g.edges() {
        let [a, b] = g.ends(e);
        let ((x1, y1), (x2, y2)) = (
            fmt_point(vertex_at[a.index()]),
            fmt_point(vertex_at[b.index()]),
        );
        let _ = writeln!(
            svg,
            "<line class=\"edge\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>"
        );
    }
    for v in g.vertices() {
        let (x, y) = fmt_point(vertex_at[v.index()]);
        let _ = writeln!(
            svg,
            "<circle class=\"vertex\" cx=\"{x}\" cy=\"{y}\" r=\"3\"><title>{}</title></circle>",
            escape(g.vertex_name(v))
        );
    }
    for (v, r, b) in variables {
        let ((x1, y1), (x2, y2)) = (fmt_point(positions[r]), fmt_point(positions[b]));
        let _ = writeln!(svg, "<line class=\"variable\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"><title>{v}</title></line>");
    }
    for ((p, color), title) in positions.iter().zip(&colors).zip(&titles) {
        let (x, y) = fmt_point(*p);
        let _ = writeln!(
            svg,
            "<circle class=\"clause {}\" cx=\"{x}\" cy=\"{y}\" r=\"6\"><title>{title}</title></circle>",
            color.as_str()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
