//! Plain-text mesh and matrix files.
//!
//! ```text
//! stratovar-mesh 1
//! nodes <n>
//! <x> <y> <z>
//! regions <r>
//! <name> <solid|fluid|vacuum>
//! cells <c>
//! <hex8|tet4> <region> <node>...
//! patches <p>
//! sphere <cx> <cy> <cz> <R> <s0> <s1> <t0> <t1>
//! plane <origin> <e1> <e2> <s0> <s1> <t0> <t1>
//! cylinder <origin> <axis> <e1> <R> <s0> <s1> <t0> <t1>
//! faces <f>
//! <SS|FS|EXT|FAULT> <minus region> <plus region|-> <patch|-> <k> <minus nodes>... <plus nodes>...
//! ```
//!
//! Blank lines and text after `#` are ignored. Floats are written in
//! shortest round-trip form, so write then read reproduces the mesh exactly.

use crate::assembly::{Cell, CellKind, CompositeMesh, Face, FaceTag, Region, RegionKind};
use crate::error::{Error, Result};
use crate::numerics::Vec3;
use crate::surface::{Geometry, SurfacePatch};
use nalgebra::DMatrix;
use std::fmt::Write as _;

const HEADER: &str = "stratovar-mesh 1";

fn kind_name(k: RegionKind) -> &'static str {
    match k {
        RegionKind::Solid => "solid",
        RegionKind::Fluid => "fluid",
        RegionKind::Vacuum => "vacuum",
    }
}

fn vec3(v: &Vec3) -> String {
    format!("{:?} {:?} {:?}", v.x, v.y, v.z)
}

pub fn write_mesh(mesh: &CompositeMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "nodes {}", mesh.nodes.len());
    for x in &mesh.nodes {
        let _ = writeln!(s, "{}", vec3(x));
    }
    let _ = writeln!(s, "regions {}", mesh.regions.len());
    for r in &mesh.regions {
        let _ = writeln!(s, "{} {}", r.name, kind_name(r.kind));
    }
    let _ = writeln!(s, "cells {}", mesh.cells.len());
    for c in &mesh.cells {
        let kind = match c.kind {
            CellKind::Hex8 => "hex8",
            CellKind::Tet4 => "tet4",
        };
        let nodes: Vec<String> = c.nodes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "{kind} {} {}", c.region, nodes.join(" "));
    }
    let _ = writeln!(s, "patches {}", mesh.patches.len());
    for p in &mesh.patches {
        let ranges = format!("{:?} {:?} {:?} {:?}", p.s_range.0, p.s_range.1, p.t_range.0, p.t_range.1);
        let _ = match p.geometry {
            Geometry::Sphere { centre, radius } => writeln!(s, "sphere {} {radius:?} {ranges}", vec3(&centre)),
            Geometry::Plane { origin, e1, e2 } => writeln!(s, "plane {} {} {} {ranges}", vec3(&origin), vec3(&e1), vec3(&e2)),
            Geometry::Cylinder { origin, axis, e1, radius } => {
                writeln!(s, "cylinder {} {} {} {radius:?} {ranges}", vec3(&origin), vec3(&axis), vec3(&e1))
            }
        };
    }
    let _ = writeln!(s, "faces {}", mesh.faces.len());
    for f in &mesh.faces {
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
        let nodes: Vec<String> = f.minus.iter().chain(&f.plus).map(|n| n.to_string()).collect();
        let _ = writeln!(
            s,
            "{} {} {} {} {} {}",
            f.tag.name(),
            f.minus_region,
            opt(f.plus_region),
            opt(f.patch),
            f.minus.len(),
            nodes.join(" ")
        );
    }
    s
}

/// Token stream over significant lines, tracking positions for errors.
struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
    next: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        Self { lines, at: 0 }
    }

    fn next(&mut self, what: &str) -> Result<Line<'a>> {
        let last = self.lines.last().map_or(1, |l| l.0);
        let &(number, text) = self.lines.get(self.at).ok_or_else(|| err(last, 1, format!("unexpected end of file, expected {what}")))?;
        self.at += 1;
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push((s + 1, &text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        Ok(Line { number, tokens, next: 0 })
    }

    /// Reads a `<keyword> <count>` section header.
    fn section(&mut self, keyword: &str) -> Result<usize> {
        let mut l = self.next(keyword)?;
        let (col, word) = l.word(keyword)?;
        if word != keyword {
            return Err(err(l.number, col, format!("expected `{keyword}`, found `{word}`")));
        }
        let n = l.parse::<usize>("count")?;
        l.end()?;
        Ok(n)
    }
}

impl<'a> Line<'a> {
    fn word(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let end = self.tokens.last().map_or(1, |(c, t)| c + t.len());
        let t = *self.tokens.get(self.next).ok_or_else(|| err(self.number, end, format!("missing {what}")))?;
        self.next += 1;
        Ok(t)
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (col, t) = self.word(what)?;
        t.parse().map_err(|_| err(self.number, col, format!("invalid {what} `{t}`")))
    }

    fn index(&mut self, what: &str, bound: usize) -> Result<usize> {
        let col = self.tokens.get(self.next).map_or(1, |t| t.0);
        let v: usize = self.parse(what)?;
        if v >= bound {
            return Err(err(self.number, col, format!("{what} {v} out of range (< {bound})")));
        }
        Ok(v)
    }

    fn optional_index(&mut self, what: &str, bound: usize) -> Result<Option<usize>> {
        if self.tokens.get(self.next).is_some_and(|t| t.1 == "-") {
            self.next += 1;
            return Ok(None);
        }
        self.index(what, bound).map(Some)
    }

    fn vec3(&mut self, what: &str) -> Result<Vec3> {
        Ok(Vec3::new(self.parse(what)?, self.parse(what)?, self.parse(what)?))
    }

    fn end(&self) -> Result<()> {
        match self.tokens.get(self.next) {
            Some((col, t)) => Err(err(self.number, *col, format!("unexpected trailing `{t}`"))),
            None => Ok(()),
        }
    }
}

/// Parses a mesh file and validates the result.
pub fn read_mesh(text: &str) -> Result<CompositeMesh> {
    let mut lines = Lines::new(text);
    let head = lines.next("header")?;
    let joined: Vec<&str> = head.tokens.iter().map(|t| t.1).collect();
    if joined.join(" ") != HEADER {
        return Err(err(head.number, 1, format!("expected header `{HEADER}`")));
    }
    let nn = lines.section("nodes")?;
    let mut nodes = Vec::with_capacity(nn);
    for _ in 0..nn {
        let mut l = lines.next("node")?;
        nodes.push(l.vec3("coordinate")?);
        l.end()?;
    }
    let nr = lines.section("regions")?;
    let mut regions = Vec::with_capacity(nr);
    for _ in 0..nr {
        let mut l = lines.next("region")?;
        let (_, name) = l.word("region name")?;
        let (col, k) = l.word("region kind")?;
        let kind = match k {
            "solid" => RegionKind::Solid,
            "fluid" => RegionKind::Fluid,
            "vacuum" => RegionKind::Vacuum,
            _ => return Err(err(l.number, col, format!("unknown region kind `{k}`"))),
        };
        l.end()?;
        regions.push(Region { name: name.to_string(), kind });
    }
    let nc = lines.section("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let mut l = lines.next("cell")?;
        let (col, k) = l.word("cell kind")?;
        let kind = match k {
            "hex8" => CellKind::Hex8,
            "tet4" => CellKind::Tet4,
            _ => return Err(err(l.number, col, format!("unknown cell kind `{k}`"))),
        };
        let region = l.index("region", nr)?;
        let cn = (0..kind.node_count()).map(|_| l.index("node", nn)).collect::<Result<Vec<_>>>()?;
        l.end()?;
        cells.push(Cell { kind, nodes: cn, region });
    }
    let np = lines.section("patches")?;
    let mut patches = Vec::with_capacity(np);
    for _ in 0..np {
        let mut l = lines.next("patch")?;
        let (col, k) = l.word("patch kind")?;
        let geometry = match k {
            "sphere" => Geometry::Sphere { centre: l.vec3("centre")?, radius: l.parse("radius")? },
            "plane" => Geometry::Plane { origin: l.vec3("origin")?, e1: l.vec3("e1")?, e2: l.vec3("e2")? },
            "cylinder" => Geometry::Cylinder {
                origin: l.vec3("origin")?,
                axis: l.vec3("axis")?,
                e1: l.vec3("e1")?,
                radius: l.parse("radius")?,
            },
            _ => return Err(err(l.number, col, format!("unknown patch kind `{k}`"))),
        };
        let s_range = (l.parse("parameter range")?, l.parse("parameter range")?);
        let t_range = (l.parse("parameter range")?, l.parse("parameter range")?);
        l.end()?;
        patches.push(SurfacePatch { geometry, s_range, t_range });
    }
    let nf = lines.section("faces")?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let mut l = lines.next("face")?;
        let (col, t) = l.word("face tag")?;
        let tag = FaceTag::parse(t).ok_or_else(|| err(l.number, col, format!("unknown face tag `{t}`")))?;
        let minus_region = l.index("region", nr)?;
        let plus_region = l.optional_index("region", nr)?;
        let patch = l.optional_index("patch", np)?;
        let k: usize = l.parse("face node count")?;
        let minus = (0..k).map(|_| l.index("node", nn)).collect::<Result<Vec<_>>>()?;
        let plus = (0..k).map(|_| l.index("node", nn)).collect::<Result<Vec<_>>>()?;
        l.end()?;
        faces.push(Face { tag, minus, plus, minus_region, plus_region, patch });
    }
    if lines.at < lines.lines.len() {
        let (number, _) = lines.lines[lines.at];
        return Err(err(number, 1, "unexpected content after the face list"));
    }
    let mesh = CompositeMesh { nodes, cells, regions, faces, patches };
    mesh.validate()?;
    Ok(mesh)
}

/// Coordinate-format text: a `rows cols nnz` line, then `i j value` per
/// nonzero entry in row-major order.
pub fn write_matrix(m: &DMatrix<f64>) -> String {
    let mut body = String::new();
    let mut nnz = 0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v != 0.0 {
                nnz += 1;
                let _ = writeln!(body, "{i} {j} {v:?}");
            }
        }
    }
    format!("{} {} {nnz}\n{body}", m.nrows(), m.ncols())
}

pub fn read_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = Lines::new(text);
    let mut h = lines.next("matrix header")?;
    let (rows, cols, nnz): (usize, usize, usize) = (h.parse("rows")?, h.parse("cols")?, h.parse("nnz")?);
    h.end()?;
    let mut m = DMatrix::zeros(rows, cols);
    for _ in 0..nnz {
        let mut l = lines.next("matrix entry")?;
        let i = l.index("row", rows)?;
        let j = l.index("column", cols)?;
        m[(i, j)] = l.parse("value")?;
        l.end()?;
    }
    Ok(m)
}
