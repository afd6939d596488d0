//! CSV tables and SVG figures.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geometry::{lines_cross_in_closed_square, ConvexRegion, IndiffLine};
use crate::model::ScreeningInstance;
use crate::solver::{RefinementTable, SolutionBundle};

/// Seventeen significant digits: parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// `i,t_i,v_i,mass_i,vertex_count`; `t_i` is empty for the top good.
pub fn write_solution_csv<W: Write>(w: W, bundle: &SolutionBundle) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["i", "t_i", "v_i", "mass_i", "vertex_count"]).map_err(csv_err)?;
    let ts = bundle.breakpoints.ts();
    for (i, (v, r)) in bundle.tariff.vs.iter().zip(&bundle.regions.regions).enumerate() {
        let t = ts.get(i).map(|t| num(*t)).unwrap_or_default();
        let row = [i.to_string(), t, num(*v), num(bundle.regions.masses[i]), r.vertices().len().to_string()];
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub ts: Vec<f64>,
    pub vs: Vec<f64>,
    pub masses: Vec<f64>,
}

pub fn read_solution_csv<R: Read>(r: R) -> Result<SolutionTable> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let mut table = SolutionTable { ts: Vec::new(), vs: Vec::new(), masses: Vec::new() };
    let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Config(format!("bad number '{s}': {e}")));
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 5 {
            return Err(Error::Config(format!("expected 5 columns, found {}", rec.len())));
        }
        if !rec[1].is_empty() {
            table.ts.push(parse(&rec[1])?);
        }
        table.vs.push(parse(&rec[2])?);
        table.masses.push(parse(&rec[3])?);
    }
    Ok(table)
}

/// One row per vertex: `region_index,x1,x2`.
pub fn write_regions_csv<W: Write>(w: W, bundle: &SolutionBundle) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["region_index", "x1", "x2"]).map_err(csv_err)?;
    for (i, r) in bundle.regions.regions.iter().enumerate() {
        for p in r.vertices() {
            out.write_record([i.to_string(), num(p.x1), num(p.x2)]).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `N,y_iN,t_iN,t_y,abs_err`.
pub fn write_refine_csv<W: Write>(w: W, table: &RefinementTable) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["N", "y_iN", "t_iN", "t_y", "abs_err"]).map_err(csv_err)?;
    for r in &table.rows {
        out.write_record([r.n.to_string(), num(r.y_i), num(r.t_i), num(r.t_y), num(r.abs_err)]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

const SIZE: f64 = 1000.0;

fn sx(x1: f64) -> f64 {
    x1 * SIZE
}

fn sy(x2: f64) -> f64 {
    (1.0 - x2) * SIZE
}

/// Sequential blue ramp from light (`k = 0`) to dark (`k = 1`).
fn ramp(k: f64) -> String {
    let (lo, hi) = ([222.0, 235.0, 247.0], [8.0, 48.0, 107.0]);
    let c: Vec<u8> = lo.iter().zip(hi).map(|(a, b)| (a + (b - a) * k.clamp(0.0, 1.0)).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn header(s: &mut String) {
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n");
}

fn polygon(s: &mut String, r: &ConvexRegion, fill: &str) {
    if r.is_empty() {
        return;
    }
    let pts: Vec<String> = r.vertices().iter().map(|p| format!("{:.3},{:.3}", sx(p.x1), sy(p.x2))).collect();
    let _ = writeln!(s, "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"none\"/>", pts.join(" "));
}

fn segment(l: &IndiffLine) -> ((f64, f64), (f64, f64)) {
    let r = l.exit_x2();
    ((l.anchor_t, 1.0), (l.anchor_t + l.chord() * (1.0 - r), r))
}

fn line(s: &mut String, l: &IndiffLine, stroke: &str) {
    let ((a1, a2), (b1, b2)) = segment(l);
    let _ = writeln!(
        s,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{stroke}\" stroke-width=\"1\"/>",
        sx(a1),
        sy(a2),
        sx(b1),
        sy(b2)
    );
}

fn frame(s: &mut String) {
    s.push_str("<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n");
}

/// Regions filled by index on the blue ramp, indifference lines as hairlines.
pub fn regions_svg(instance: &ScreeningInstance, bundle: &SolutionBundle) -> String {
    let mut s = String::new();
    header(&mut s);
    let m = bundle.regions.regions.len().saturating_sub(1).max(1) as f64;
    for (i, r) in bundle.regions.regions.iter().enumerate() {
        polygon(&mut s, r, &ramp(i as f64 / m));
    }
    for l in bundle.breakpoints.lines(instance) {
        line(&mut s, &l, "#000000");
    }
    frame(&mut s);
    s.push_str("</svg>\n");
    s
}

/// Every indifference line of a candidate, with crossings inside the square
/// marked.
pub fn levels_svg(instance: &ScreeningInstance, bundle: &SolutionBundle) -> String {
    let mut s = String::new();
    header(&mut s);
    s.push_str("<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n");
    let lines = bundle.breakpoints.lines(instance);
    let m = lines.len().saturating_sub(1).max(1) as f64;
    for (i, l) in lines.iter().enumerate() {
        line(&mut s, l, &ramp(0.25 + 0.75 * i as f64 / m));
    }
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let c = lines_cross_in_closed_square(a, b);
            if let (true, Some(p)) = (c.crosses, c.point) {
                let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#d62728\"/>", sx(p.x1), sy(p.x2));
            }
        }
    }
    frame(&mut s);
    s.push_str("</svg>\n");
    s
}
