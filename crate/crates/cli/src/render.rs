//! Text and SVG renderings of a lattice diagram.

use std::fmt::Write as _;

use hgamma::LatticeDiagram;

const CELL: f64 = 36.0;
const MARGIN: f64 = 48.0;

fn x_of(a1: f64) -> f64 {
    MARGIN + a1 * CELL
}

fn y_of(a2: f64) -> f64 {
    MARGIN + (-a2) * CELL
}

/// SVG drawing of the window: grey dots for excluded points, filled dots for
/// allowable ones, rings around column floors, the boundary line, and shaded
/// critical-class columns. Identical input gives byte-identical output.
pub fn render_lattice_svg(d: &LatticeDiagram) -> String {
    let width = 2.0 * MARGIN + d.a1_max as f64 * CELL;
    let height = 2.0 * MARGIN + (-d.a2_min) as f64 * CELL;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, "<title>allowable indices for gamma = {}</title>", d.gamma);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for a1 in (0..=d.a1_max).filter(|&a| (a as u64) % d.gamma.m() == d.critical_residue) {
        let _ = writeln!(
            s,
            r##"<rect class="critical" x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#fdf1d6"/>"##,
            x_of(a1 as f64 - 0.5),
            y_of(0.5),
            CELL,
            height - 2.0 * MARGIN + CELL
        );
    }
    let (x0, x1) = (x_of(-0.5), x_of(d.a1_max as f64 + 0.5));
    let _ = writeln!(
        s,
        r##"<g stroke="#888" stroke-width="1"><line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}"/><line x1="{x:.1}" y1="{ya:.1}" x2="{x:.1}" y2="{yb:.1}"/></g>"##,
        y = y_of(0.0),
        x = x_of(0.0),
        ya = y_of(0.5),
        yb = y_of(d.a2_min as f64 - 0.5),
    );
    let line = &d.boundary_line;
    let _ = writeln!(
        s,
        r##"<line class="boundary" data-slope="{}" data-intercept="{}" x1="{x0:.3}" y1="{:.3}" x2="{x1:.3}" y2="{:.3}" stroke="#c0392b" stroke-width="1.5"/>"##,
        line.slope,
        line.intercept,
        y_of(line.at(-0.5)),
        y_of(line.at(d.a1_max as f64 + 0.5)),
    );
    for p in &d.points {
        let (cx, cy) = (x_of(p.a1 as f64), y_of(p.a2 as f64));
        if p.allowable {
            let _ = writeln!(s, r##"<circle class="allowable" cx="{cx:.1}" cy="{cy:.1}" r="4" fill="#1f2d3d"/>"##);
        } else {
            let _ = writeln!(s, r##"<circle class="excluded" cx="{cx:.1}" cy="{cy:.1}" r="2" fill="#bbb"/>"##);
        }
        if p.floor {
            let _ = writeln!(
                s,
                r##"<circle class="floor" cx="{cx:.1}" cy="{cy:.1}" r="9" fill="none" stroke="#1f6feb" stroke-width="1.5"/>"##
            );
        }
    }
    for a1 in 0..=d.a1_max {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{a1}</text>"#,
            x_of(a1 as f64),
            y_of(0.0) - 14.0
        );
    }
    for a2 in d.a2_min..=0 {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{a2}</text>"#,
            x_of(0.0) - 14.0,
            y_of(a2 as f64) + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Character grid, `a2 = 0` on top: `O` column floor, `*` allowable, `.` excluded.
pub fn render_lattice_ascii(d: &LatticeDiagram) -> String {
    let mut s = format!("gamma = {}  (O floor, * allowable, . excluded; ^ critical class)\n", d.gamma);
    for a2 in (d.a2_min..=0).rev() {
        let _ = write!(s, "{a2:>4} ");
        for a1 in 0..=d.a1_max {
            let p = d.point(a1, a2).expect("point inside window");
            s.push(' ');
            s.push(if p.floor {
                'O'
            } else if p.allowable {
                '*'
            } else {
                '.'
            });
        }
        s.push('\n');
    }
    s.push_str("     ");
    for a1 in 0..=d.a1_max {
        s.push(' ');
        s.push(if (a1 as u64) % d.gamma.m() == d.critical_residue { '^' } else { ' ' });
    }
    s.push('\n');
    s
}
