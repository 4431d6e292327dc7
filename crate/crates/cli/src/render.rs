//! SVG emission for rank-2 complexes.
//!
//! Geometry stays exact to the last step: cells are clipped to the
//! viewport as polyhedra and coordinates are rounded to a fixed number
//! of digits only while printing. Every visible cell becomes one SVG
//! element; unbounded one-cells are dashed to signal the cut ends.

use serde_json::json;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use trop_core::error::{Error, Result};
use trop_core::polyhedra::{Constraint, PolyhedralComplex, Polyhedron};
use trop_core::rat::{fmt_q_fixed, parse_q, qi, Q};

const DIGITS: u32 = 6;

pub struct Viewport {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl Viewport {
    pub fn parse(s: &str) -> Result<Viewport> {
        let parts: Vec<Q> = s
            .split(',')
            .map(|t| parse_q(t.trim()))
            .collect::<Result<_>>()?;
        let [x0, x1, y0, y1] = parts.as_slice() else {
            return Err(Error::InvalidInput("viewport must be x0,x1,y0,y1".into()));
        };
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidInput("viewport must be nonempty".into()));
        }
        Ok(Viewport {
            x0: x0.clone(),
            x1: x1.clone(),
            y0: y0.clone(),
            y1: y1.clone(),
        })
    }

    fn clip_region(&self) -> Polyhedron {
        Polyhedron::new(
            2,
            vec![
                Constraint::new(vec![qi(-1), qi(0)], -self.x0.clone()),
                Constraint::new(vec![qi(1), qi(0)], self.x1.clone()),
                Constraint::new(vec![qi(0), qi(-1)], -self.y0.clone()),
                Constraint::new(vec![qi(0), qi(1)], self.y1.clone()),
            ],
            vec![],
        )
    }
}

fn fmt(q: &Q) -> String {
    fmt_q_fixed(q, DIGITS)
}

/// SVG y grows downward; the world is flipped at print time only.
fn flip(q: &Q) -> Q {
    -q.clone()
}

/// Counterclockwise order around the vertex average, exactly: points are
/// split into upper and lower half-turns and compared by cross product.
fn angular_sort(points: &mut [Vec<Q>]) {
    let n = qi(points.len() as i64);
    let cx = points.iter().fold(qi(0), |acc, p| acc + &p[0]) / &n;
    let cy = points.iter().fold(qi(0), |acc, p| acc + &p[1]) / &n;
    let zero = qi(0);
    let half = |p: &Vec<Q>| -> u8 {
        let dx = &p[0] - &cx;
        let dy = &p[1] - &cy;
        if dy > zero || (dy == zero && dx > zero) {
            0
        } else {
            1
        }
    };
    points.sort_by(|a, b| {
        half(a).cmp(&half(b)).then_with(|| {
            let cross = (&a[0] - &cx) * (&b[1] - &cy) - (&a[1] - &cy) * (&b[0] - &cx);
            cross.cmp(&qi(0)).reverse().then_with(|| a.cmp(b))
        })
    });
}

/// Renders the complex into an SVG document plus a metadata value that
/// echoes the input cell counts by dimension.
pub fn render_complex(
    complex: &PolyhedralComplex,
    vp: &Viewport,
) -> Result<(String, serde_json::Value)> {
    if complex.rank() != 2 {
        return Err(Error::InvalidInput("render supports rank 2 only".into()));
    }
    let dims: Vec<usize> = complex
        .cells()
        .iter()
        .map(|c| c.dimension())
        .collect::<Result<_>>()?;
    let mut by_dim: BTreeMap<String, usize> = BTreeMap::new();
    for &d in &dims {
        *by_dim.entry(d.to_string()).or_insert(0) += 1;
    }
    let metadata = json!({
        "rank": 2,
        "cells": dims.len(),
        "cells_by_dimension": by_dim,
    });

    let clip = vp.clip_region();
    let width = &vp.x1 - &vp.x0;
    let height = &vp.y1 - &vp.y0;
    let span = (&width + &height) / qi(2);
    let stroke = &span / qi(150);
    let dot = &span / qi(60);
    let dash_on = &span / qi(50);
    let dash_off = &span / qi(90);

    let mut body = String::new();
    // Filled regions first, then edges, then dots on top.
    for (cell, &d) in complex.cells().iter().zip(&dims) {
        if d != 2 {
            continue;
        }
        let clipped = cell.intersect(&clip);
        if clipped.is_empty() {
            continue;
        }
        let mut vs = clipped.generators()?.vertices;
        if vs.len() < 3 {
            continue;
        }
        angular_sort(&mut vs);
        let mut path = String::new();
        for (i, v) in vs.iter().enumerate() {
            let op = if i == 0 { 'M' } else { 'L' };
            write!(path, "{op} {} {} ", fmt(&v[0]), fmt(&flip(&v[1]))).unwrap();
        }
        path.push('Z');
        writeln!(
            body,
            "  <path d=\"{path}\" fill=\"#9ec9e2\" fill-opacity=\"0.35\" stroke=\"none\"/>"
        )
        .unwrap();
    }
    for (cell, &d) in complex.cells().iter().zip(&dims) {
        if d != 1 {
            continue;
        }
        let clipped = cell.intersect(&clip);
        if clipped.is_empty() {
            continue;
        }
        let mut vs = clipped.generators()?.vertices;
        if vs.len() < 2 {
            continue;
        }
        vs.sort();
        let (a, b) = (&vs[0], &vs[vs.len() - 1]);
        let dashes = if cell.is_bounded()? {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{} {}\"", fmt(&dash_on), fmt(&dash_off))
        };
        writeln!(
            body,
            "  <path d=\"M {} {} L {} {}\"{dashes}/>",
            fmt(&a[0]),
            fmt(&flip(&a[1])),
            fmt(&b[0]),
            fmt(&flip(&b[1]))
        )
        .unwrap();
    }
    for (cell, &d) in complex.cells().iter().zip(&dims) {
        if d != 0 {
            continue;
        }
        let p = cell.relative_interior_point()?;
        if !clip.contains(&p) {
            continue;
        }
        writeln!(
            body,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#16324f\" stroke=\"none\"/>",
            fmt(&p[0]),
            fmt(&flip(&p[1])),
            fmt(&dot)
        )
        .unwrap();
    }

    let document = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n\
         <metadata>{metadata}</metadata>\n\
         <g fill=\"none\" stroke=\"#16324f\" stroke-width=\"{}\" stroke-linecap=\"round\">\n\
         {body}</g>\n\
         </svg>\n",
        fmt(&vp.x0),
        fmt(&flip(&vp.y1)),
        fmt(&width),
        fmt(&height),
        fmt(&stroke),
    );
    Ok((document, metadata))
}
