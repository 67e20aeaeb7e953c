use crate::error::{invalid, Error, Result};
use crate::numerics::Vec3;
use crate::surface::SurfacePatch;
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Hex8,
    Tet4,
}

impl CellKind {
    pub fn node_count(self) -> usize {
        match self {
            CellKind::Hex8 => 8,
            CellKind::Tet4 => 4,
        }
    }

    /// Local faces with outward orientation.
    pub fn local_faces(self) -> &'static [&'static [usize]] {
        match self {
            CellKind::Hex8 => &[
                &[0, 3, 2, 1],
                &[4, 5, 6, 7],
                &[0, 1, 5, 4],
                &[1, 2, 6, 5],
                &[2, 3, 7, 6],
                &[3, 0, 4, 7],
            ],
            CellKind::Tet4 => &[&[1, 2, 3], &[0, 3, 2], &[0, 1, 3], &[0, 2, 1]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    Solid,
    Fluid,
    /// Empty space carrying only the potential perturbation.
    Vacuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub kind: RegionKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub kind: CellKind,
    pub nodes: Vec<usize>,
    pub region: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceTag {
    /// Welded solid–solid interface.
    SolidSolid,
    /// Slipping fluid–solid interface.
    FluidSolid,
    /// Outer boundary of the body.
    Exterior,
    /// Frictional fault between solids.
    Fault,
}

impl FaceTag {
    pub fn name(self) -> &'static str {
        match self {
            FaceTag::SolidSolid => "SS",
            FaceTag::FluidSolid => "FS",
            FaceTag::Exterior => "EXT",
            FaceTag::Fault => "FAULT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "SS" => Some(FaceTag::SolidSolid),
            "FS" => Some(FaceTag::FluidSolid),
            "EXT" => Some(FaceTag::Exterior),
            "FAULT" => Some(FaceTag::Fault),
            _ => None,
        }
    }

    /// Faces whose two sides carry separate displacement nodes.
    pub fn is_split(self) -> bool {
        matches!(self, FaceTag::FluidSolid | FaceTag::Fault)
    }
}

/// Interface or boundary face. `minus` and `plus` list the same geometric
/// vertices from each side; they coincide for welded and exterior faces. The
/// facet normal of `minus` points into the `+` side.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub tag: FaceTag,
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
    pub minus_region: usize,
    pub plus_region: Option<usize>,
    pub patch: Option<usize>,
}

/// A split node pair across a slipping face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPair {
    pub minus: usize,
    pub plus: usize,
    pub patch: usize,
    pub tag: FaceTag,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompositeMesh {
    pub nodes: Vec<Vec3>,
    pub cells: Vec<Cell>,
    pub regions: Vec<Region>,
    pub faces: Vec<Face>,
    pub patches: Vec<SurfacePatch>,
}

impl CompositeMesh {
    pub fn cell_coords(&self, cell: &Cell) -> Vec<Vec3> {
        cell.nodes.iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn region_kind(&self, region: usize) -> RegionKind {
        self.regions[region].kind
    }

    pub fn faces_with(&self, tag: FaceTag) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.tag == tag)
    }

    /// Distinct split pairs, ordered by plus node.
    pub fn split_pairs(&self) -> Vec<SplitPair> {
        let mut pairs: BTreeMap<usize, SplitPair> = BTreeMap::new();
        for f in self.faces.iter().filter(|f| f.tag.is_split()) {
            for (&m, &p) in f.minus.iter().zip(&f.plus) {
                if m != p {
                    pairs.entry(p).or_insert(SplitPair { minus: m, plus: p, patch: f.patch.unwrap_or(usize::MAX), tag: f.tag });
                }
            }
        }
        pairs.into_values().collect()
    }

    /// Map from every node to its representative after merging split pairs.
    pub fn merged_node(&self) -> Vec<usize> {
        let mut rep: Vec<usize> = (0..self.nodes.len()).collect();
        for p in self.split_pairs() {
            rep[p.plus] = p.minus;
        }
        rep
    }

    /// Nodes carrying displacement: those of non-vacuum cells.
    pub fn body_nodes(&self) -> Vec<bool> {
        let mut body = vec![false; self.nodes.len()];
        for c in &self.cells {
            if self.regions[c.region].kind != RegionKind::Vacuum {
                for &n in &c.nodes {
                    body[n] = true;
                }
            }
        }
        body
    }

    /// Nodes on the outer boundary of the whole mesh, with split pairs merged.
    pub fn outer_boundary_nodes(&self) -> Vec<bool> {
        let rep = self.merged_node();
        let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
        for c in &self.cells {
            for lf in c.kind.local_faces() {
                let mut key: Vec<usize> = lf.iter().map(|&i| rep[c.nodes[i]]).collect();
                key.sort_unstable();
                *count.entry(key).or_default() += 1;
            }
        }
        let mut out = vec![false; self.nodes.len()];
        for (key, n) in count {
            if n == 1 {
                for k in key {
                    out[k] = true;
                }
            }
        }
        for i in 0..self.nodes.len() {
            out[i] = out[rep[i]];
        }
        out
    }

    /// Structural checks: indices, orientation, face pairing and patches.
    pub fn validate(&self) -> Result<()> {
        let nn = self.nodes.len();
        if self.regions.is_empty() {
            return Err(validation("regions", "mesh has no regions"));
        }
        for (ci, c) in self.cells.iter().enumerate() {
            if c.nodes.len() != c.kind.node_count() {
                return Err(validation("cell arity", format!("cell {ci} has {} nodes", c.nodes.len())));
            }
            if c.nodes.iter().any(|&n| n >= nn) || c.region >= self.regions.len() {
                return Err(validation("cell indices", format!("cell {ci} references missing nodes or region")));
            }
            let x = self.cell_coords(c);
            let vol = match c.kind {
                CellKind::Tet4 => (x[1] - x[0]).cross(&(x[2] - x[0])).dot(&(x[3] - x[0])),
                CellKind::Hex8 => (x[1] - x[0]).cross(&(x[3] - x[0])).dot(&(x[4] - x[0])),
            };
            if !(vol > 0.0) {
                return Err(validation("orientation", format!("cell {ci} is inverted or degenerate")));
            }
        }
        for (fi, f) in self.faces.iter().enumerate() {
            if f.minus.len() != f.plus.len() || !(3..=4).contains(&f.minus.len()) {
                return Err(validation("face arity", format!("face {fi} is malformed")));
            }
            if f.minus.iter().chain(&f.plus).any(|&n| n >= nn) {
                return Err(validation("face indices", format!("face {fi} references missing nodes")));
            }
            if f.patch.is_some_and(|p| p >= self.patches.len()) {
                return Err(validation("face patch", format!("face {fi} references a missing patch")));
            }
            if f.minus_region >= self.regions.len() || f.plus_region.is_some_and(|r| r >= self.regions.len()) {
                return Err(validation("face regions", format!("face {fi} references a missing region")));
            }
            match f.tag {
                FaceTag::FluidSolid | FaceTag::Fault => {
                    if f.minus.iter().zip(&f.plus).any(|(a, b)| a == b) {
                        return Err(validation("split nodes", format!("face {fi} must carry duplicated nodes")));
                    }
                    if f.patch.is_none() {
                        return Err(validation("face patch", format!("{} face {fi} has no patch geometry", f.tag.name())));
                    }
                    if f.plus_region.is_none() {
                        return Err(validation("face regions", format!("face {fi} has no + side")));
                    }
                }
                FaceTag::SolidSolid | FaceTag::Exterior => {
                    if f.minus != f.plus {
                        return Err(validation("welded nodes", format!("face {fi} must share its nodes")));
                    }
                }
            }
            if f.tag == FaceTag::FluidSolid {
                let kinds = [Some(f.minus_region), f.plus_region].map(|r| r.map(|r| self.regions[r].kind));
                let fluid = kinds.iter().filter(|k| **k == Some(RegionKind::Fluid)).count();
                let solid = kinds.iter().filter(|k| **k == Some(RegionKind::Solid)).count();
                if fluid != 1 || solid != 1 {
                    return Err(validation("FS sides", format!("face {fi} must separate a fluid from a solid")));
                }
            }
            // facet normal must point from − to +
            if let Some(pid) = f.patch {
                let x: Vec<Vec3> = f.minus.iter().map(|&n| self.nodes[n]).collect();
                let centre = x.iter().sum::<Vec3>() / x.len() as f64;
                let facet = (x[1] - x[0]).cross(&(x[x.len() - 1] - x[0]));
                if facet.dot(&self.patches[pid].normal_at(&centre)) <= 0.0 {
                    return Err(validation("normal orientation", format!("face {fi} disagrees with its patch normal")));
                }
            }
        }
        let pairs = self.split_pairs();
        let mut minus_seen = HashMap::new();
        for p in &pairs {
            if pairs.iter().any(|q| q.plus == p.minus) {
                return Err(Error::Unsupported(format!("node {} is split more than once", p.minus)));
            }
            if let Some(prev) = minus_seen.insert(p.minus, p.plus) {
                if prev != p.plus {
                    return Err(Error::Unsupported(format!("node {} has several split partners", p.minus)));
                }
            }
            if (self.nodes[p.minus] - self.nodes[p.plus]).norm() > 1e-12 {
                return Err(validation("split nodes", format!("split pair {}/{} is not coincident", p.minus, p.plus)));
            }
        }
        Ok(())
    }

    /// Splits a hex mesh into tetrahedra: each hex face gets a centre node
    /// (projected onto its patch on the exterior boundary) and
    /// each hex a centroid, giving 24 tetrahedra per hex. Quad faces become
    /// four triangles.
    pub fn tetrahedralize(&self) -> Result<CompositeMesh> {
        if self.cells.iter().any(|c| c.kind != CellKind::Hex8) {
            return Err(invalid("tetrahedralize expects a pure hex mesh"));
        }
        let mut out = CompositeMesh {
            nodes: self.nodes.clone(),
            cells: Vec::with_capacity(self.cells.len() * 24),
            regions: self.regions.clone(),
            faces: Vec::new(),
            patches: self.patches.clone(),
        };
        // face centre lookup keyed by the sorted node ids of each side
        let mut centre_of: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut patch_of: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in &self.faces {
            if f.minus.len() != 4 {
                return Err(invalid("tetrahedralize expects quad faces"));
            }
            // interior centres stay at the corner average: on coarse curved
            // meshes a projected centre can pass the cell centroid
            if let (Some(p), FaceTag::Exterior) = (f.patch, f.tag) {
                for side in [&f.minus, &f.plus] {
                    let mut k = side.clone();
                    k.sort_unstable();
                    patch_of.insert(k, p);
                }
            }
        }
        let mut face_centre = |nodes: &[usize], out: &mut CompositeMesh| -> usize {
            let mut key = nodes.to_vec();
            key.sort_unstable();
            if let Some(&c) = centre_of.get(&key) {
                return c;
            }
            let mut x = nodes.iter().map(|&n| out.nodes[n]).sum::<Vec3>() / nodes.len() as f64;
            if let Some(&p) = patch_of.get(&key) {
                x = out.patches[p].project(&x);
            }
            out.nodes.push(x);
            centre_of.insert(key, out.nodes.len() - 1);
            out.nodes.len() - 1
        };
        for c in &self.cells {
            let centroid = c.nodes.iter().map(|&n| self.nodes[n]).sum::<Vec3>() / 8.0;
            out.nodes.push(centroid);
            let cc = out.nodes.len() - 1;
            for lf in CellKind::Hex8.local_faces() {
                let fnodes: Vec<usize> = lf.iter().map(|&i| c.nodes[i]).collect();
                let fc = face_centre(&fnodes, &mut out);
                for e in 0..4 {
                    let a = fnodes[e];
                    let b = fnodes[(e + 1) % 4];
                    // outward face (a, b, fc) seen from the centroid
                    out.cells.push(Cell { kind: CellKind::Tet4, nodes: vec![a, fc, b, cc], region: c.region });
                }
            }
        }
        for f in &self.faces {
            let cm = face_centre(&f.minus, &mut out);
            let cp = if f.plus == f.minus { cm } else { face_centre(&f.plus, &mut out) };
            for e in 0..4 {
                let (m0, m1) = (f.minus[e], f.minus[(e + 1) % 4]);
                let (p0, p1) = (f.plus[e], f.plus[(e + 1) % 4]);
                out.faces.push(Face {
                    tag: f.tag,
                    minus: vec![m0, m1, cm],
                    plus: vec![p0, p1, cp],
                    minus_region: f.minus_region,
                    plus_region: f.plus_region,
                    patch: f.patch,
                });
            }
        }
        for cell in &mut out.cells {
            let x: Vec<Vec3> = cell.nodes.iter().map(|&n| out.nodes[n]).collect();
            if (x[1] - x[0]).cross(&(x[2] - x[0])).dot(&(x[3] - x[0])) < 0.0 {
                cell.nodes.swap(1, 2);
            }
        }
        out.validate()?;
        Ok(out)
    }
}

fn validation(invariant: &'static str, detail: impl Into<String>) -> Error {
    Error::Validation { invariant, detail: detail.into() }
}
