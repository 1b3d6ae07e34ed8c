//! SVG drawings of scenes and plans.
//!
//! Every scene entity is one top-level `<g class="entity ...">`; every plan
//! step is one `<g class="step">` holding its corridors, arrows and number.
//! Output depends only on the inputs.

use std::fmt::Write as _;

use collab_tamp::validate::replay;
use collab_tamp::{Aabb, Plan, Pose, Scene, Shape, Vec2};

const SCALE: f64 = 400.0;
const MARGIN: f64 = 0.1;

struct Frame {
    min: Vec2,
    max: Vec2,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        (x - self.min.x) * SCALE
    }

    fn y(&self, y: f64) -> f64 {
        (self.max.y - y) * SCALE
    }

    fn len(&self, l: f64) -> f64 {
        l * SCALE
    }
}

fn bounds(scene: &Scene) -> Frame {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut add = |p: Vec2, r: f64| {
        lo = Vec2::new(lo.x.min(p.x - r), lo.y.min(p.y - r));
        hi = Vec2::new(hi.x.max(p.x + r), hi.y.max(p.y + r));
    };
    for re in &scene.regions {
        add(re.rect.min, 0.0);
        add(re.rect.max, 0.0);
    }
    for f in &scene.fixed {
        add(f.pose.position(), f.shape.bounding_radius());
    }
    for m in &scene.movables {
        add(m.pose.position(), m.shape.bounding_radius());
    }
    for r in &scene.robots {
        add(r.base, r.reach_max);
    }
    Frame { min: Vec2::new(lo.x - MARGIN, lo.y - MARGIN), max: Vec2::new(hi.x + MARGIN, hi.y + MARGIN) }
}

fn shape_svg(out: &mut String, f: &Frame, shape: &Shape, pose: &Pose, style: &str) {
    match shape {
        Shape::Disc { radius } => {
            let _ = writeln!(
                out,
                "    <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" {style}/>",
                f.x(pose.x),
                f.y(pose.y),
                f.len(*radius)
            );
        }
        Shape::Rect { half_w, half_h } => {
            let pts: Vec<String> = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                .iter()
                .map(|(sx, sy)| {
                    let p = pose.to_world(Vec2::new(sx * half_w, sy * half_h));
                    format!("{:.2},{:.2}", f.x(p.x), f.y(p.y))
                })
                .collect();
            let _ = writeln!(out, "    <polygon points=\"{}\" {style}/>", pts.join(" "));
        }
    }
}

fn rect_svg(out: &mut String, f: &Frame, r: &Aabb, style: &str) {
    let _ = writeln!(
        out,
        "    <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" {style}/>",
        f.x(r.min.x),
        f.y(r.max.y),
        f.len(r.width()),
        f.len(r.height())
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(scene: &Scene, plan: Option<&Plan>) -> String {
    let f = bounds(scene);
    let (w, h) = (f.len(f.max.x - f.min.x), f.len(f.max.y - f.min.y));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">"
    );
    let _ = writeln!(
        out,
        "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>"
    );
    for re in &scene.regions {
        let _ = writeln!(out, "  <g class=\"entity region\" data-name=\"{}\">", escape(&re.name));
        rect_svg(&mut out, &f, &re.rect, "fill=\"none\" stroke=\"#2a7\" stroke-dasharray=\"6 3\"");
        let _ = writeln!(
            out,
            "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{}</text>",
            f.x(re.rect.min.x) + 2.0,
            f.y(re.rect.max.y) + 11.0,
            escape(&re.name)
        );
        out.push_str("  </g>\n");
    }
    for (i, o) in scene.fixed.iter().enumerate() {
        let _ = writeln!(out, "  <g class=\"entity fixed\" data-name=\"{}\">", escape(&scene.fixed_label(i)));
        shape_svg(&mut out, &f, &o.shape, &o.pose, "fill=\"#555\"");
        out.push_str("  </g>\n");
    }
    for (i, m) in scene.movables.iter().enumerate() {
        let goal = scene.is_goal(collab_tamp::ObjectId(i));
        let _ = writeln!(out, "  <g class=\"entity movable\" data-name=\"{}\">", escape(&m.name));
        let fill = if goal { "#d33" } else { "#48c" };
        shape_svg(&mut out, &f, &m.shape, &m.pose, &format!("fill=\"{fill}\" fill-opacity=\"0.8\""));
        let _ = writeln!(
            out,
            "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
            f.x(m.pose.x),
            f.y(m.pose.y) + 3.0,
            escape(&m.name)
        );
        out.push_str("  </g>\n");
    }
    for r in &scene.robots {
        let _ = writeln!(out, "  <g class=\"entity robot\" data-name=\"{}\">", escape(&r.name));
        let (cx, cy) = (f.x(r.base.x), f.y(r.base.y));
        let (ro, ri) = (f.len(r.reach_max), f.len(r.reach_min));
        // Annulus as one even-odd path.
        let _ = writeln!(
            out,
            "    <path d=\"M{:.2},{cy:.2} a{ro:.2},{ro:.2} 0 1,0 {:.2},0 a{ro:.2},{ro:.2} 0 1,0 {:.2},0 M{:.2},{cy:.2} a{ri:.2},{ri:.2} 0 1,0 {:.2},0 a{ri:.2},{ri:.2} 0 1,0 {:.2},0\" fill=\"#fa0\" fill-opacity=\"0.08\" fill-rule=\"evenodd\" stroke=\"#fa0\"/>",
            cx - ro,
            2.0 * ro,
            -2.0 * ro,
            cx - ri,
            2.0 * ri,
            -2.0 * ri
        );
        let _ = writeln!(out, "    <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"6\" fill=\"#fa0\"/>");
        let _ = writeln!(
            out,
            "    <text x=\"{cx:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            cy + 18.0,
            escape(&r.name)
        );
        out.push_str("  </g>\n");
    }
    if let Some(plan) = plan {
        let mut poses: Vec<Pose> = scene.movables.iter().map(|m| m.pose).collect();
        for (k, step) in plan.steps.iter().enumerate() {
            let _ = writeln!(out, "  <g class=\"step\" data-step=\"{}\">", k + 1);
            for (_, c) in step.corridors() {
                let _ = writeln!(
                    out,
                    "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-opacity=\"0.25\" stroke-width=\"{:.2}\" stroke-linecap=\"round\"/>",
                    f.x(c.a.x),
                    f.y(c.a.y),
                    f.x(c.b.x),
                    f.y(c.b.y),
                    f.len(c.width)
                );
            }
            for (a, p) in step.actions() {
                let from = poses[a.object.0];
                shape_svg(
                    &mut out,
                    &f,
                    &scene.object(a.object).shape,
                    &p,
                    "fill=\"none\" stroke=\"#333\" stroke-dasharray=\"2 2\"",
                );
                let _ = writeln!(
                    out,
                    "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\" marker-end=\"url(#arrow)\"/>",
                    f.x(from.x),
                    f.y(from.y),
                    f.x(p.x),
                    f.y(p.y)
                );
                let mid = from.position().lerp(p.position(), 0.5);
                let _ = writeln!(
                    out,
                    "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-weight=\"bold\">{}</text>",
                    f.x(mid.x),
                    f.y(mid.y) - 4.0,
                    k + 1
                );
                poses[a.object.0] = p;
            }
            out.push_str("  </g>\n");
        }
        debug_assert_eq!(poses, replay(scene, plan));
    }
    out.push_str("</svg>\n");
    out
}
