//! Static SVG rendering of a hull: `Ĥ` columns, the convex hull outline and
//! the filled hull, in the (p, q) plane with q pointing up.

use std::fmt::Write;

use crate::hull::HullResult;
use crate::region::Region;

/// Runs of consecutive defined columns as closed polygons down to `q = 0`.
fn fill_paths(r: &Region) -> Vec<String> {
    let mut out = vec![];
    let mut cur = String::new();
    let mut last_p = 0.0;
    for (i, v) in r.psi.iter().enumerate() {
        let p = r.grid.node(i);
        match v {
            Some(q) => {
                if cur.is_empty() {
                    write!(cur, "M{p:.6} 0").unwrap();
                }
                write!(cur, " L{p:.6} {:.6}", -q).unwrap();
                last_p = p;
            }
            None if !cur.is_empty() => {
                write!(cur, " L{last_p:.6} 0 Z").unwrap();
                out.push(std::mem::take(&mut cur));
            }
            None => {}
        }
    }
    if !cur.is_empty() {
        write!(cur, " L{last_p:.6} 0 Z").unwrap();
        out.push(cur);
    }
    out
}

fn columns_path(r: &Region) -> String {
    let mut s = String::new();
    for (i, v) in r.psi.iter().enumerate() {
        if let Some(q) = v {
            write!(s, "M{:.6} 0 V{:.6} ", r.grid.node(i), -q).unwrap();
        }
    }
    s.trim_end().to_string()
}

pub fn render(hull: &HullResult, title: &str) -> String {
    let (p0, p1) = hull.conv.p_extent().unwrap_or((hull.conv.grid.pmin, hull.conv.grid.pmax));
    let qmax = hull.conv.q_max();
    let span = (p1 - p0).max(qmax).max(1e-9);
    let m = 0.1 * span;
    let (x, y, w, h) = (p0 - m, -qmax - m, p1 - p0 + 2.0 * m, qmax + 2.0 * m);
    let fs = 0.04 * span;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x:.6} {y:.6} {w:.6} {h:.6}" width="800" height="{:.0}">"#,
        800.0 * h / w
    )
    .unwrap();
    writeln!(s, "<title>{title}</title>").unwrap();
    writeln!(s, r#"<g id="hull" fill="steelblue" fill-opacity="0.35" stroke="none">"#).unwrap();
    for d in fill_paths(&hull.region) {
        writeln!(s, r#"<path d="{d}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(
        s,
        r#"<g id="conv" fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke">"#
    )
    .unwrap();
    for d in fill_paths(&hull.conv) {
        writeln!(s, r#"<path d="{d}" vector-effect="non-scaling-stroke"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(
        s,
        r#"<g id="hhat" stroke="darkred" stroke-width="1"><path d="{}" vector-effect="non-scaling-stroke"/></g>"#,
        columns_path(&hull.hhat)
    )
    .unwrap();
    writeln!(
        s,
        r#"<g id="axes" stroke="gray" stroke-width="1"><path d="M{x:.6} 0 H{:.6}" vector-effect="non-scaling-stroke"/></g>"#,
        x + w
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{:.6}" y="{:.6}" font-size="{fs:.6}">p</text>"#,
        x + w - 1.5 * fs,
        -0.5 * fs
    )
    .unwrap();
    writeln!(s, r#"<text x="{:.6}" y="{:.6}" font-size="{fs:.6}">q</text>"#, x + 0.5 * fs, y + 1.5 * fs)
        .unwrap();
    s.push_str("</svg>\n");
    s
}
