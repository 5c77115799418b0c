//! SVG pictures of the star atlas.

use std::fmt::Write as _;
use std::path::Path;

use crate::cyclo::PlanePoint;
use crate::epe::{EpeChain, RhoAssignment};
use crate::tiling::{tau_of, PlacedTile, StarAtlas, TilingSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvgDoc {
    pub name: String,
    pub content: String,
}

const SIZE: f64 = 320.0;
const PALETTE: [&str; 6] = ["#f2c14e", "#5b8e7d", "#8cb8d8", "#e07a5f", "#b39cd0", "#c9c9c9"];

struct Canvas {
    scale: f64,
    cx: f64,
    cy: f64,
    body: String,
}

impl Canvas {
    fn new(tiles: &[PlacedTile], center: (f64, f64)) -> Self {
        let mut r: f64 = 1e-9;
        for t in tiles {
            for v in &t.vertices {
                let (x, y) = v.real_embed();
                r = r.max((x - center.0).hypot(y - center.1));
            }
        }
        Canvas { scale: 0.42 * SIZE / r, cx: center.0, cy: center.1, body: String::new() }
    }

    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        (SIZE / 2.0 + (p.0 - self.cx) * self.scale, SIZE / 2.0 - (p.1 - self.cy) * self.scale)
    }

    fn polygon(&mut self, pts: &[PlanePoint], fill: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.map(p.real_embed());
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r##"<polygon points="{}" fill="{fill}" stroke="#222" stroke-width="1.5"/>"##,
            coords.join(" ")
        );
    }

    fn arrow(&mut self, from: (f64, f64), to: (f64, f64), colour: &str, width: f64) {
        let (x1, y1) = self.map(from);
        let (x2, y2) = self.map(to);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{colour}" stroke-width="{width:.1}" marker-end="url(#head)"/>"#
        );
    }

    fn dot(&mut self, p: (f64, f64), colour: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{colour}"/>"#);
    }

    fn text(&mut self, x: f64, y: f64, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="13">{s}</text>"#);
    }

    fn finish(self) -> String {
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
                "\n",
                r##"<defs><marker id="head" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#222"/></marker></defs>"##,
                "\n",
                r#"<rect width="{s}" height="{s}" fill="white"/>"#,
                "\n{body}</svg>\n"
            ),
            s = SIZE,
            body = self.body
        )
    }
}

fn centroid(t: &PlacedTile) -> (f64, f64) {
    let n = t.vertices.len() as f64;
    let (mut x, mut y) = (0.0, 0.0);
    for v in &t.vertices {
        let p = v.real_embed();
        x += p.0;
        y += p.1;
    }
    (x / n, y / n)
}

fn draw_tiles(c: &mut Canvas, sys: &TilingSystem, tiles: &[PlacedTile]) {
    for t in tiles {
        c.polygon(&t.vertices, PALETTE[t.kind % PALETTE.len()]);
    }
    // orientation arrows: the reference direction turned by τ
    for t in tiles {
        let (x, y) = centroid(t);
        let tau = tau_of(sys, t) as f64;
        let a = std::f64::consts::TAU * tau / sys.ring_order as f64 + std::f64::consts::FRAC_PI_2;
        let len = 0.25;
        c.arrow((x - 0.5 * len * a.cos(), y - 0.5 * len * a.sin()), (x + 0.5 * len * a.cos(), y + 0.5 * len * a.sin()), "#222", 1.2);
    }
}

/// One document per tile class, edge star and vertex star.
pub fn render_star_svgs(
    sys: &TilingSystem,
    atlas: &StarAtlas,
    rho: Option<&RhoAssignment>,
    omega: Option<&EpeChain>,
) -> Vec<SvgDoc> {
    let mut out = Vec::new();
    for t in &atlas.tiles {
        let tiles = std::slice::from_ref(&t.representative);
        let mut c = Canvas::new(tiles, centroid(&t.representative));
        draw_tiles(&mut c, sys, tiles);
        c.text(8.0, 18.0, &format!("tile {} ({}) sym {} count {}", t.id, t.label, t.symmetry_order, t.count));
        out.push(SvgDoc { name: format!("tile_{}.svg", t.id), content: c.finish() });
    }
    for e in &atlas.edges {
        let (a, b) = (e.tail.real_embed(), e.head.real_embed());
        let mut c = Canvas::new(&e.representative, ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0));
        draw_tiles(&mut c, sys, &e.representative);
        c.arrow(a, b, "#c0392b", 3.0);
        let label = match rho {
            Some(r) => format!("edge {} rho {}/{}", e.id, r.values[e.id], r.denominator),
            None => format!("edge {}", e.id),
        };
        c.text(8.0, 18.0, &label);
        out.push(SvgDoc { name: format!("edge_star_{}.svg", e.id), content: c.finish() });
    }
    for v in &atlas.vertices {
        let p = v.point.real_embed();
        let mut c = Canvas::new(&v.representative, p);
        draw_tiles(&mut c, sys, &v.representative);
        c.dot(p, "#c0392b");
        let label = match omega {
            Some(w) => format!("vertex {} omega {:+} sym {}", v.id, w.values[v.id], v.symmetry_order),
            None => format!("vertex {} sym {}", v.id, v.symmetry_order),
        };
        c.text(8.0, 18.0, &label);
        out.push(SvgDoc { name: format!("vertex_star_{}.svg", v.id), content: c.finish() });
    }
    out
}

/// Writes through a temporary file in the same directory and renames.
pub fn write_atomic(path: &Path, content: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{}.tmp", path.file_name().and_then(|n| n.to_str()).unwrap_or("out")));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}
