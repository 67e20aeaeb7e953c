use crate::assembly::{Cell, CellKind, CompositeMesh, Face, FaceTag, Region, RegionKind};
use crate::error::{invalid, Result};
use crate::numerics::Vec3;
use crate::surface::SurfacePatch;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpec {
    /// Cells per edge of the body.
    pub n: usize,
    /// Edge length; the body is centred at the origin.
    pub size: f64,
    /// Optional interface on the plane `x = 0` with the region kinds on
    /// the `−` and `+` sides.
    pub interface: Option<(FaceTag, RegionKind, RegionKind)>,
    /// Body kind when there is no interface.
    pub kind: RegionKind,
    /// Layers of vacuum cells around the body.
    pub padding: usize,
}

impl Default for BoxSpec {
    fn default() -> Self {
        Self { n: 2, size: 1.0, interface: None, kind: RegionKind::Solid, padding: 0 }
    }
}

fn kind_name(k: RegionKind) -> &'static str {
    match k {
        RegionKind::Solid => "solid",
        RegionKind::Fluid => "fluid",
        RegionKind::Vacuum => "vacuum",
    }
}

/// Axis-aligned hex box with an optional interface on the mid-x plane.
pub fn box_mesh(spec: &BoxSpec) -> Result<CompositeMesh> {
    let n = spec.n;
    if n == 0 || !(spec.size > 0.0) {
        return Err(invalid("box needs n ≥ 1 and a positive size"));
    }
    if spec.interface.is_some() && n % 2 == 1 {
        return Err(invalid("box with an interface needs an even n"));
    }
    if let Some((tag, _, _)) = spec.interface {
        if tag == FaceTag::Exterior {
            return Err(invalid("interior interface cannot be exterior"));
        }
    }
    let pad = spec.padding;
    let total = n + 2 * pad;
    let h = spec.size / n as f64;
    let lo = -0.5 * spec.size - pad as f64 * h;
    let idx = |i: usize, j: usize, k: usize| (i * (total + 1) + j) * (total + 1) + k;
    let mut nodes = Vec::with_capacity((total + 1).pow(3));
    for i in 0..=total {
        for j in 0..=total {
            for k in 0..=total {
                nodes.push(Vec3::new(lo + i as f64 * h, lo + j as f64 * h, lo + k as f64 * h));
            }
        }
    }
    let mut regions = Vec::new();
    match spec.interface {
        Some((_, a, b)) => {
            regions.push(Region { name: format!("{}_minus", kind_name(a)), kind: a });
            regions.push(Region { name: format!("{}_plus", kind_name(b)), kind: b });
        }
        None => regions.push(Region { name: kind_name(spec.kind).into(), kind: spec.kind }),
    }
    let vacuum = if pad > 0 {
        regions.push(Region { name: "vacuum".into(), kind: RegionKind::Vacuum });
        Some(regions.len() - 1)
    } else {
        None
    };
    let body = |i: usize| i >= pad && i < pad + n;
    let mid = pad + n / 2;
    let split = matches!(spec.interface, Some((t, _, _)) if t.is_split());
    // duplicates of the split-plane nodes for the + side
    let mut dup: HashMap<usize, usize> = HashMap::new();
    if split {
        for j in pad..=pad + n {
            for k in pad..=pad + n {
                let a = idx(mid, j, k);
                dup.insert(a, nodes.len());
                nodes.push(nodes[a]);
            }
        }
    }
    let mut cells = Vec::new();
    for i in 0..total {
        for j in 0..total {
            for k in 0..total {
                let inside = body(i) && body(j) && body(k);
                let region = if !inside {
                    vacuum.expect("padding present")
                } else if spec.interface.is_some() && i >= mid {
                    1
                } else {
                    0
                };
                let mut c = vec![
                    idx(i, j, k),
                    idx(i + 1, j, k),
                    idx(i + 1, j + 1, k),
                    idx(i, j + 1, k),
                    idx(i, j, k + 1),
                    idx(i + 1, j, k + 1),
                    idx(i + 1, j + 1, k + 1),
                    idx(i, j + 1, k + 1),
                ];
                if inside && split && i >= mid {
                    for v in &mut c {
                        if let Some(&d) = dup.get(v) {
                            *v = d;
                        }
                    }
                }
                cells.push(Cell { kind: CellKind::Hex8, nodes: c, region });
            }
        }
    }
    let mut patches = Vec::new();
    let mut faces = Vec::new();
    if let Some((tag, _, _)) = spec.interface {
        let half = 0.5 * spec.size;
        patches.push(SurfacePatch::plane(Vec3::zeros(), Vec3::y(), Vec3::z(), (-half, half), (-half, half))?);
        for j in pad..pad + n {
            for k in pad..pad + n {
                let minus = vec![idx(mid, j, k), idx(mid, j + 1, k), idx(mid, j + 1, k + 1), idx(mid, j, k + 1)];
                let plus = if split { minus.iter().map(|v| dup[v]).collect() } else { minus.clone() };
                faces.push(Face { tag, minus, plus, minus_region: 0, plus_region: Some(1), patch: Some(0) });
            }
        }
    }
    // exterior faces of the body, oriented outward
    for (ci, c) in cells.iter().enumerate() {
        if c.region == vacuum.unwrap_or(usize::MAX) {
            continue;
        }
        let (i, j, k) = (ci / (total * total), (ci / total) % total, ci % total);
        let outside = [
            k == pad,
            k + 1 == pad + n,
            j == pad,
            i + 1 == pad + n,
            j + 1 == pad + n,
            i == pad,
        ];
        for (lf, out) in CellKind::Hex8.local_faces().iter().zip(outside) {
            if out {
                let nodes: Vec<usize> = lf.iter().map(|&a| c.nodes[a]).collect();
                faces.push(Face {
                    tag: FaceTag::Exterior,
                    minus: nodes.clone(),
                    plus: nodes,
                    minus_region: c.region,
                    plus_region: vacuum,
                    patch: None,
                });
            }
        }
    }
    let mesh = CompositeMesh { nodes, cells, regions, faces, patches };
    mesh.validate()?;
    Ok(mesh)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec {
    /// Outer radius of every layer, increasing.
    pub radii: Vec<f64>,
    pub kinds: Vec<RegionKind>,
    /// Tag of each internal interface (`SS` or `FS`).
    pub interfaces: Vec<FaceTag>,
    /// Cells per edge of each cube face.
    pub m: usize,
    /// Radial cells per layer.
    pub shells: Vec<usize>,
}

impl BallSpec {
    /// One radial cell per layer with the given interface tags.
    pub fn new(radii: Vec<f64>, kinds: Vec<RegionKind>, interfaces: Vec<FaceTag>) -> Self {
        let shells = vec![1; radii.len()];
        Self { radii, kinds, interfaces, m: 2, shells }
    }
}

/// Cubed-sphere ball: a core cube inside the first layer, then radial hex
/// shells whose nodes on interface radii lie on the sphere.
pub fn layered_ball(spec: &BallSpec) -> Result<CompositeMesh> {
    let nl = spec.radii.len();
    if nl == 0 || spec.kinds.len() != nl || spec.shells.len() != nl || spec.interfaces.len() + 1 != nl {
        return Err(invalid("layered ball needs matching radii, kinds, shells and interfaces"));
    }
    if spec.radii.windows(2).any(|w| !(w[1] > w[0])) || !(spec.radii[0] > 0.0) {
        return Err(invalid("layered ball radii must be positive and increasing"));
    }
    if spec.m == 0 || spec.shells.contains(&0) {
        return Err(invalid("layered ball needs m ≥ 1 and at least one shell per layer"));
    }
    if spec.kinds.contains(&RegionKind::Vacuum) {
        return Err(invalid("layered ball layers cannot be vacuum"));
    }
    for (k, t) in spec.interfaces.iter().enumerate() {
        match t {
            FaceTag::SolidSolid => {}
            FaceTag::FluidSolid => {
                let (a, b) = (spec.kinds[k], spec.kinds[k + 1]);
                if a == b {
                    return Err(invalid(format!("FS interface {k} must separate a fluid from a solid")));
                }
            }
            _ => return Err(invalid("ball interfaces must be SS or FS")),
        }
    }
    let m = spec.m;
    let a = 0.5 * spec.radii[0];
    // radial levels: 0 is the cube surface
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut r_in = 0.0;
    for (l, &r) in spec.radii.iter().enumerate() {
        for s in 1..=spec.shells[l] {
            let t = s as f64 / spec.shells[l] as f64;
            levels.push((if l == 0 { t } else { r_in + t * (r - r_in) }, l));
        }
        r_in = r;
    }
    let r0 = spec.radii[0];
    let place = |p: &Vec3, level: usize| -> Vec3 {
        if level == 0 {
            return *p;
        }
        let (v, l) = levels[level - 1];
        if l == 0 {
            (1.0 - v) * p + v * r0 * p.normalize()
        } else {
            v * p.normalize()
        }
    };
    let mut nodes: Vec<Vec3> = Vec::new();
    let mut lookup: HashMap<[i64; 3], usize> = HashMap::new();
    let mut node = |x: Vec3, nodes: &mut Vec<Vec3>| -> usize {
        let key = [(x.x * 1e9).round() as i64, (x.y * 1e9).round() as i64, (x.z * 1e9).round() as i64];
        *lookup.entry(key).or_insert_with(|| {
            nodes.push(x);
            nodes.len() - 1
        })
    };
    let mut cells = Vec::new();
    let grid = |i: usize| -a + 2.0 * a * i as f64 / m as f64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let c = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]
                    .map(|(di, dj, dk)| node(Vec3::new(grid(i + di), grid(j + dj), grid(k + dk)), &mut nodes));
                cells.push(Cell { kind: CellKind::Hex8, nodes: c.to_vec(), region: 0 });
            }
        }
    }
    // the six cube faces as (normal axis, sign)
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let (u_ax, v_ax) = ((axis + 1) % 3, (axis + 2) % 3);
            let face_point = |i: usize, j: usize| {
                let mut p = Vec3::zeros();
                p[axis] = sign * a;
                p[u_ax] = grid(i);
                p[v_ax] = grid(j);
                p
            };
            for (lv, &(_, layer)) in levels.iter().enumerate() {
                for i in 0..m {
                    for j in 0..m {
                        let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                        let bottom: Vec<usize> = corners.iter().map(|&(x, y)| node(place(&face_point(x, y), lv), &mut nodes)).collect();
                        let top: Vec<usize> = corners.iter().map(|&(x, y)| node(place(&face_point(x, y), lv + 1), &mut nodes)).collect();
                        let mut c: Vec<usize> = bottom.iter().chain(&top).copied().collect();
                        let x: Vec<Vec3> = c.iter().map(|&v| nodes[v]).collect();
                        if (x[1] - x[0]).cross(&(x[3] - x[0])).dot(&(x[4] - x[0])) < 0.0 {
                            c = top.iter().chain(&bottom).copied().collect();
                        }
                        cells.push(Cell { kind: CellKind::Hex8, nodes: c, region: layer });
                    }
                }
            }
        }
    }
    let regions: Vec<Region> =
        spec.kinds.iter().enumerate().map(|(l, &k)| Region { name: format!("{}_{l}", kind_name(k)), kind: k }).collect();
    let mut patches = Vec::new();
    for &r in &spec.radii {
        patches.push(SurfacePatch::sphere(Vec3::zeros(), r)?);
    }
    let on_sphere = |x: &Vec3, r: f64| (x.norm() - r).abs() < 1e-9 * r;
    // split FS spheres: outer-layer cells take duplicates
    let mut dup: HashMap<usize, usize> = HashMap::new();
    for (k, tag) in spec.interfaces.iter().enumerate() {
        if *tag != FaceTag::FluidSolid {
            continue;
        }
        let r = spec.radii[k];
        for c in cells.iter_mut().filter(|c| c.region == k + 1) {
            for v in &mut c.nodes {
                if on_sphere(&nodes[*v], r) {
                    let d = *dup.entry(*v).or_insert_with(|| {
                        nodes.push(nodes[*v]);
                        nodes.len() - 1
                    });
                    *v = d;
                }
            }
        }
    }
    let mut faces = Vec::new();
    for c in &cells {
        let l = c.region;
        let r = spec.radii[l];
        for lf in CellKind::Hex8.local_faces() {
            let fnodes: Vec<usize> = lf.iter().map(|&i| c.nodes[i]).collect();
            if !fnodes.iter().all(|&v| on_sphere(&nodes[v], r)) {
                continue;
            }
            let (tag, plus, plus_region) = if l + 1 == nl {
                (FaceTag::Exterior, fnodes.clone(), None)
            } else {
                let tag = spec.interfaces[l];
                let plus = if tag == FaceTag::FluidSolid { fnodes.iter().map(|v| dup[v]).collect() } else { fnodes.clone() };
                (tag, plus, Some(l + 1))
            };
            faces.push(Face { tag, minus: fnodes, plus, minus_region: l, plus_region, patch: Some(l) });
        }
    }
    let mesh = CompositeMesh { nodes, cells, regions, faces, patches };
    mesh.validate()?;
    Ok(mesh)
}
