//! Minimal static SVG plots: profile line plots with zero markers, spectrum
//! rug plots with cluster highlights, and parameter-sweep curves.
//!
//! Self-contained output, no external assets; floats are printed with fixed
//! precision so identical inputs give identical bytes.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 48.0;

struct Frame {
    svg: String,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, title: &str) -> Self {
        let mut svg = String::new();
        let _ = write!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
             <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
             <text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n",
            W / 2.0
        );
        // axes
        let _ = write!(
            svg,
            "<line x1=\"{m:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n\
             <line x1=\"{m:.1}\" y1=\"{t:.1}\" x2=\"{m:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
            m = MARGIN,
            r = W - MARGIN,
            t = MARGIN,
            b = H - MARGIN
        );
        Self { svg, xmin, xmax, ymin, ymax }
    }

    fn sx(&self, x: f64) -> f64 {
        let span = (self.xmax - self.xmin).max(f64::MIN_POSITIVE);
        MARGIN + (x - self.xmin) / span * (W - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        let span = (self.ymax - self.ymin).max(f64::MIN_POSITIVE);
        H - MARGIN - (y - self.ymin) / span * (H - 2.0 * MARGIN)
    }

    fn polyline(&mut self, xs: &[f64], ys: &[f64], color: &str) {
        if xs.is_empty() {
            return;
        }
        let mut pts = String::new();
        for (x, y) in xs.iter().zip(ys) {
            let _ = write!(pts, "{:.2},{:.2} ", self.sx(*x), self.sy(*y));
        }
        let _ = write!(
            self.svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.trim_end()
        );
    }

    fn marker(&mut self, x: f64, y: f64, color: &str) {
        let _ = write!(
            self.svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
            self.sx(x),
            self.sy(y)
        );
    }

    fn tick(&mut self, x: f64, color: &str, tall: bool) {
        let y0 = H - MARGIN;
        let len = if tall { 60.0 } else { 30.0 };
        let _ = write!(
            self.svg,
            "<line x1=\"{x:.2}\" y1=\"{y0:.1}\" x2=\"{x:.2}\" y2=\"{:.1}\" stroke=\"{color}\"/>\n",
            y0 - len,
            x = self.sx(x)
        );
    }

    fn label(&mut self, x: f64, y: f64, text: &str) {
        let _ = write!(
            self.svg,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"11\">{text}</text>\n"
        );
    }

    fn finish(mut self) -> String {
        let _ = write!(
            self.svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{:.4} .. {:.4}</text>\n",
            MARGIN,
            H - MARGIN / 3.0,
            self.xmin,
            self.xmax
        );
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line plot of a radial profile `u(rho)` with markers on the interior zeros.
pub fn profile_svg(rho: &[f64], u: &[f64], zeros: &[f64], title: &str) -> String {
    let (xmin, xmax) = bounds(rho);
    let (ymin, ymax) = bounds(u);
    let mut f = Frame::new(xmin, xmax, ymin.min(0.0), ymax.max(0.0), title);
    f.polyline(rho, u, "steelblue");
    for &z in zeros {
        f.marker(z, 0.0, "crimson");
    }
    f.finish()
}

/// Rug plot of spectrum values; highlighted values get tall red ticks.
pub fn spectrum_svg(values: &[f64], highlights: &[f64], title: &str) -> String {
    let all: Vec<f64> = values.iter().chain(highlights).copied().collect();
    let (xmin, xmax) = bounds(&all);
    let mut f = Frame::new(xmin, xmax, 0.0, 1.0, title);
    for &v in values {
        f.tick(v, "black", false);
    }
    for &v in highlights {
        f.tick(v, "crimson", true);
        f.label(f.sx(v), MARGIN + 14.0, &format!("{v:.6}"));
    }
    f.finish()
}

/// Parameter-sweep curve: eigenvalue against the swept parameter.
pub fn sweep_svg(param: &[f64], lambda: &[f64], title: &str) -> String {
    let (xmin, xmax) = bounds(param);
    let (ymin, ymax) = bounds(lambda);
    let mut f = Frame::new(xmin, xmax, ymin, ymax, title);
    f.polyline(param, lambda, "steelblue");
    for (&x, &y) in param.iter().zip(lambda) {
        f.marker(x, y, "steelblue");
    }
    f.finish()
}
