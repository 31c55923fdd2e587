//! Scatter export and SVG rendering of a catalog: terrain ordinal on a
//! linear x-axis, maximum kinetic energy on a log-scale y-axis, shaded risk
//! levels behind the markers.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::csvio;
use crate::io::write_atomic;
use crate::scalar::Real;

use super::{Catalog, RiskLevel, RiskZoning, TerrainScale};

const MAP_COLUMNS: [&str; 4] = ["label", "terrain_ordinal", "kinetic_energy", "model_type"];
const ZONE_FILLS: [&str; 5] = ["#e4f2e1", "#fdf0c2", "#f7d3cd", "#eebcc8", "#d9b3d9"];
const MARKER_FILLS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One row of the scatter CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapRow<T> {
    pub label: String,
    pub terrain_ordinal: u32,
    pub kinetic_energy: T,
    pub model_type: String,
}

pub fn write_map_csv<T: Real, W: Write>(writer: W, rows: &[MapRow<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(MAP_COLUMNS).map_err(csvio::write_err)?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.terrain_ordinal.to_string(),
            r.kinetic_energy.to_string(),
            r.model_type.clone(),
        ])
        .map_err(csvio::write_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))
}

pub fn read_map_csv<T: Real, R: Read>(reader: R) -> Result<Vec<MapRow<T>>> {
    let mut rdr = csvio::reader(reader);
    if csvio::is_empty(&mut rdr)? {
        return Ok(Vec::new());
    }
    let cols = csvio::columns(&mut rdr, &MAP_COLUMNS)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let (rec, line) = csvio::record(rec)?;
        let raw = rec.get(cols[1]).unwrap_or("");
        rows.push(MapRow {
            label: rec.get(cols[0]).unwrap_or("").to_string(),
            terrain_ordinal: raw
                .parse()
                .map_err(|_| Error::parse(line, format!("terrain_ordinal '{raw}' is not an integer")))?,
            kinetic_energy: csvio::number(&rec, cols[2], "kinetic_energy", line)?,
            model_type: rec.get(cols[3]).unwrap_or("").to_string(),
        });
    }
    Ok(rows)
}

/// A plotted deployment. `x`, `y` are SVG user units, so a larger kinetic
/// energy gives a smaller `y` (closer to the top of the image).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapPoint {
    pub label: String,
    pub terrain_ordinal: u32,
    pub kinetic_energy: f64,
    pub model_type: String,
    pub risk: RiskLevel,
    pub x: f64,
    pub y: f64,
}

/// Plot geometry shared by the projection and the drawing code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapLayout {
    pub width: f64,
    pub height: f64,
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
    /// Highest ordinal on the x-axis; columns span `[o − ½, o + ½]`.
    pub max_ordinal: u32,
    /// Decades covered by the y-axis: `10^lo .. 10^hi`.
    pub decade_lo: i32,
    pub decade_hi: i32,
}

impl MapLayout {
    fn fit(max_ordinal: u32, ke_min: f64, ke_max: f64) -> Self {
        let lo = ke_min.log10().floor() as i32;
        let mut hi = ke_max.log10().ceil() as i32;
        if hi <= lo {
            hi = lo + 1;
        }
        Self {
            width: 760.0,
            height: 480.0,
            left: 90.0,
            right: 200.0,
            top: 40.0,
            bottom: 110.0,
            max_ordinal: max_ordinal.max(1),
            decade_lo: lo,
            decade_hi: hi,
        }
    }

    pub fn plot_width(&self) -> f64 {
        self.width - self.left - self.right
    }

    pub fn plot_height(&self) -> f64 {
        self.height - self.top - self.bottom
    }

    fn column_left(&self, ordinal: u32) -> f64 {
        self.left + f64::from(ordinal - 1) / f64::from(self.max_ordinal) * self.plot_width()
    }

    pub fn x(&self, ordinal: f64) -> f64 {
        self.left + (ordinal - 0.5) / f64::from(self.max_ordinal) * self.plot_width()
    }

    pub fn y(&self, ke: f64) -> f64 {
        let span = f64::from(self.decade_hi - self.decade_lo);
        let frac = (f64::from(self.decade_hi) - ke.log10()) / span;
        self.top + self.plot_height() * frac.clamp(0.0, 1.0)
    }
}

fn xml_escape(s: &str) -> String {
    s.chars().fold(String::with_capacity(s.len()), |mut out, c| {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
        out
    })
}

fn marker_shape(index: usize, fill: &str) -> String {
    let style = format!(r##"fill="{fill}" stroke="#000" stroke-width="1""##);
    match index % 6 {
        0 => format!(r#"<circle r="6" {style}/>"#),
        1 => format!(r#"<rect x="-5.5" y="-5.5" width="11" height="11" {style}/>"#),
        2 => format!(r#"<polygon points="0,-7 6.5,5 -6.5,5" {style}/>"#),
        3 => format!(r#"<polygon points="0,-7 7,0 0,7 -7,0" {style}/>"#),
        4 => format!(r#"<polygon points="0,7 6.5,-5 -6.5,-5" {style}/>"#),
        _ => format!(r#"<path d="M-6,-6 L6,6 M-6,6 L6,-6" stroke="{fill}" stroke-width="2.5" fill="none"/>"#),
    }
}

/// Projects every record and renders the SVG document.
pub fn render_svg<T: Real>(
    catalog: &Catalog<T>,
    zoning: &RiskZoning<T>,
    scale: &TerrainScale,
) -> Result<(Vec<MapPoint>, String)> {
    if catalog.is_empty() {
        return Err(Error::Validation("cannot render an empty catalog".into()));
    }
    for r in catalog.records() {
        if !(r.max_kinetic_energy > T::zero() && r.max_kinetic_energy.is_finite()) {
            return Err(Error::Validation(format!(
                "'{}': kinetic energy {} J cannot be placed on a log axis",
                r.label, r.max_kinetic_energy
            )));
        }
    }
    let kes: Vec<f64> = catalog.records().iter().map(|r| r.max_kinetic_energy.to_f64_lossy()).collect();
    let ke_min = kes.iter().copied().fold(f64::INFINITY, f64::min);
    let ke_max = kes.iter().copied().fold(0.0, f64::max);
    let max_ordinal = catalog
        .records()
        .iter()
        .map(|r| r.terrain.ordinal)
        .chain([scale.max_ordinal()])
        .max()
        .unwrap_or(1);
    let layout = MapLayout::fit(max_ordinal, ke_min, ke_max);
    let model_types: Vec<&str> = catalog
        .records()
        .iter()
        .map(|r| r.model_type.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let points: Vec<MapPoint> = catalog
        .records()
        .iter()
        .zip(&kes)
        .map(|(r, &ke)| MapPoint {
            label: r.label.clone(),
            terrain_ordinal: r.terrain.ordinal,
            kinetic_energy: ke,
            model_type: r.model_type.clone(),
            risk: zoning.level(r.max_kinetic_energy, r.terrain.ordinal),
            x: layout.x(f64::from(r.terrain.ordinal)),
            y: layout.y(ke),
        })
        .collect();

    let mut svg = String::new();
    let l = &layout;
    let (pw, ph) = (l.plot_width(), l.plot_height());
    let bottom = l.top + ph;
    // writing into a String cannot fail
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = l.width,
        h = l.height
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    // risk levels, nested so later levels paint over earlier ones
    let _ = writeln!(svg, r#"<g class="risk-zones">"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
        l.left, l.top, pw, ph, ZONE_FILLS[0]
    );
    for (k, th) in zoning.thresholds().iter().enumerate() {
        let fill = ZONE_FILLS[(k + 1).min(ZONE_FILLS.len() - 1)];
        for o in 1..=l.max_ordinal {
            let Some(onset) = th.ke_onset(o) else { continue };
            let onset = onset.to_f64_lossy();
            let y0 = if onset <= 0.0 { bottom } else { l.y(onset) };
            if y0 <= l.top {
                continue;
            }
            let x0 = l.column_left(o);
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                x0,
                l.top,
                pw / f64::from(l.max_ordinal),
                y0 - l.top
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    // axes
    let _ = writeln!(svg, r##"<g class="axes" stroke="#444" stroke-width="1">"##);
    for d in l.decade_lo..=l.decade_hi {
        let y = l.y(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#bbbbbb" stroke-dasharray="3,3"/>"##,
            l.left,
            l.left + pw
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none"/>"#,
        l.left, l.top, pw, ph
    );
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g class="tick-labels" font-size="11" fill="#222">"##);
    for d in l.decade_lo..=l.decade_hi {
        let y = l.y(10f64.powi(d));
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">10<tspan dy="-5" font-size="8">{d}</tspan></text>"#,
            l.left - 8.0,
            y + 4.0
        );
    }
    for o in 1..=l.max_ordinal {
        let x = l.x(f64::from(o));
        let name = scale.by_ordinal(o).map_or_else(|| o.to_string(), |c| c.short_name().to_string());
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="end" transform="rotate(-35 {x:.2} {:.2})">{}</text>"#,
            bottom + 16.0,
            bottom + 16.0,
            xml_escape(&name)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">Terrain complexity (most complex terrain)</text>"#,
        l.left + pw / 2.0,
        l.height - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {:.2})">Maximum kinetic energy [J] (log scale)</text>"#,
        l.top + ph / 2.0,
        l.top + ph / 2.0
    );

    // markers
    let _ = writeln!(svg, r#"<g class="markers">"#);
    for p in &points {
        let idx = model_types.iter().position(|m| *m == p.model_type).unwrap_or(0);
        let _ = writeln!(
            svg,
            r#"<g class="marker" transform="translate({:.2},{:.2})"><title>{}</title>{}<text x="9" y="4" font-size="10">{}</text></g>"#,
            p.x,
            p.y,
            xml_escape(&p.label),
            marker_shape(idx, MARKER_FILLS[idx % MARKER_FILLS.len()]),
            xml_escape(&p.label)
        );
    }
    let _ = writeln!(svg, "</g>");

    // legend
    let lx = l.left + pw + 20.0;
    let _ = writeln!(svg, r#"<g class="legend" font-size="11">"#);
    let _ = writeln!(svg, r#"<text x="{lx:.2}" y="{:.2}" font-weight="bold">Motion model</text>"#, l.top + 4.0);
    for (i, m) in model_types.iter().enumerate() {
        let y = l.top + 22.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<g transform="translate({:.2},{y:.2})">{}</g><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 6.0,
            marker_shape(i, MARKER_FILLS[i % MARKER_FILLS.len()]),
            lx + 18.0,
            y + 4.0,
            xml_escape(m)
        );
    }
    let y_risk = l.top + 40.0 + 18.0 * model_types.len() as f64;
    let _ = writeln!(svg, r#"<text x="{lx:.2}" y="{y_risk:.2}" font-weight="bold">Deployment risk</text>"#);
    for k in 0..zoning.levels() {
        let y = y_risk + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            svg,
            r##"<rect x="{lx:.2}" y="{y:.2}" width="12" height="12" fill="{}" stroke="#444"/><text x="{:.2}" y="{:.2}">{}</text>"##,
            ZONE_FILLS[k.min(ZONE_FILLS.len() - 1)],
            lx + 18.0,
            y + 10.0,
            RiskLevel(k).name(zoning.levels())
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok((points, svg))
}

/// Writes the scatter CSV and the SVG map. Returns the plotted points.
pub fn render_map<T: Real>(
    catalog: &Catalog<T>,
    zoning: &RiskZoning<T>,
    scale: &TerrainScale,
    csv_path: &Path,
    svg_path: &Path,
) -> Result<Vec<MapPoint>> {
    let (points, svg) = render_svg(catalog, zoning, scale)?;
    let rows: Vec<MapRow<T>> = catalog
        .records()
        .iter()
        .map(|r| MapRow {
            label: r.label.clone(),
            terrain_ordinal: r.terrain.ordinal,
            kinetic_energy: r.max_kinetic_energy,
            model_type: r.model_type.clone(),
        })
        .collect();
    let mut buf = Vec::new();
    write_map_csv(&mut buf, &rows)?;
    write_atomic(csv_path, &buf)?;
    write_atomic(svg_path, svg.as_bytes())?;
    Ok(points)
}
