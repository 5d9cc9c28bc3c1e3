//! Deterministic SVG rendering of environments, embeddings, curves, and
//! square families. Identical inputs produce identical bytes.

use crate::environment::CellConfiguration;
use crate::geometry::{Point, Square};
use crate::harmonic::Embedding;

#[derive(Debug, Clone)]
pub struct Style {
    pub stroke: String,
    pub stroke_width: f64,
    pub fill: String,
}

impl Default for Style {
    fn default() -> Self {
        Style { stroke: "#333333".into(), stroke_width: 0.02, fill: "none".into() }
    }
}

#[derive(Debug, Clone)]
pub enum SceneItem {
    Polygon { points: Vec<Point>, style: Style },
    Polyline { points: Vec<Point>, style: Style },
    SquareOutline { square: Square, style: Style },
    Segment { a: Point, b: Point, style: Style },
}

/// An ordered list of drawables; order is z-order.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub items: Vec<SceneItem>,
}

impl Scene {
    pub fn new() -> Scene {
        Scene::default()
    }

    /// Cell outlines of an environment.
    pub fn add_environment(&mut self, config: &CellConfiguration, style: &Style) {
        for id in config.ids() {
            for ring in config.region(id).rings() {
                self.items.push(SceneItem::Polygon {
                    points: ring.clone(),
                    style: style.clone(),
                });
            }
        }
    }

    /// Graph drawing of an embedding: one segment per adjacency, endpoints
    /// at the embedded cell positions.
    pub fn add_embedding(
        &mut self,
        config: &CellConfiguration,
        embedding: &Embedding,
        style: &Style,
    ) {
        for (a, b, _) in config.edges() {
            self.items.push(SceneItem::Segment {
                a: embedding.value(a),
                b: embedding.value(b),
                style: style.clone(),
            });
        }
    }

    pub fn add_curve(&mut self, points: Vec<Point>, style: &Style) {
        self.items.push(SceneItem::Polyline { points, style: style.clone() });
    }

    pub fn add_squares(&mut self, squares: &[Square], style: &Style) {
        for s in squares {
            self.items.push(SceneItem::SquareOutline { square: *s, style: style.clone() });
        }
    }
}

fn fmt(v: f64) -> String {
    // fixed precision keeps output bytes stable
    format!("{v:.6}")
}

/// Renders the scene to an SVG document. The viewBox is the bounding box of
/// all items, padded by 2%.
pub fn render_svg(scene: &Scene) -> String {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut visit = |p: &Point| {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    };
    for item in &scene.items {
        match item {
            SceneItem::Polygon { points, .. } | SceneItem::Polyline { points, .. } => {
                points.iter().for_each(&mut visit)
            }
            SceneItem::SquareOutline { square, .. } => {
                visit(&square.anchor);
                visit(&square.max_corner());
            }
            SceneItem::Segment { a, b, .. } => {
                visit(a);
                visit(b);
            }
        }
    }
    if scene.items.is_empty() {
        lo = Point::new(0.0, 0.0);
        hi = Point::new(1.0, 1.0);
    }
    let pad = 0.02 * ((hi.x - lo.x).max(hi.y - lo.y)).max(1e-9);
    let (x0, y0) = (lo.x - pad, lo.y - pad);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        fmt(x0),
        fmt(y0),
        fmt(w),
        fmt(h)
    ));
    // flip the y axis so the plane draws in math orientation
    out.push_str(&format!(
        "<g transform=\"translate(0,{}) scale(1,-1)\">\n",
        fmt(y0 + h + y0)
    ));
    for item in &scene.items {
        match item {
            SceneItem::Polygon { points, style } => {
                let pts: Vec<String> =
                    points.iter().map(|p| format!("{},{}", fmt(p.x), fmt(p.y))).collect();
                out.push_str(&format!(
                    "<polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                    pts.join(" "),
                    style.fill,
                    style.stroke,
                    fmt(style.stroke_width)
                ));
            }
            SceneItem::Polyline { points, style } => {
                let pts: Vec<String> =
                    points.iter().map(|p| format!("{},{}", fmt(p.x), fmt(p.y))).collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                    pts.join(" "),
                    style.stroke,
                    fmt(style.stroke_width)
                ));
            }
            SceneItem::SquareOutline { square, style } => {
                out.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                    fmt(square.anchor.x),
                    fmt(square.anchor.y),
                    fmt(square.side),
                    fmt(square.side),
                    style.stroke,
                    fmt(style.stroke_width)
                ));
            }
            SceneItem::Segment { a, b, style } => {
                out.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                    fmt(a.x),
                    fmt(a.y),
                    fmt(b.x),
                    fmt(b.y),
                    style.stroke,
                    fmt(style.stroke_width)
                ));
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}
