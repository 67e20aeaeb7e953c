//! TOML model configuration.

use super::generate::{box_mesh, layered_ball, BallSpec, BoxSpec};
use super::meshio::read_mesh;
use crate::assembly::{Background, CompositeMesh, Density, EarthModel, FaceTag, ForcePotential, Material, PrestressField, RegionKind};
use crate::elastica::PrestressParams;
use crate::error::{invalid, Error, Result};
use crate::gravity::{RadialDensityModel, G_SI};
use crate::numerics::{Mat3, Vec3};
use crate::rupture::{FrictionLaw, NormalCoupling, StateLaw};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Nondimensional,
    /// `G` defaults to its SI value.
    Si,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub units: Units,
    /// Gravitational constant; defaults to 1, or the SI value with `units = "si"`.
    #[serde(rename = "G")]
    pub g: Option<f64>,
    /// Couple the mass-redistribution potential.
    #[serde(default)]
    pub self_gravitation: bool,
    #[serde(default)]
    pub omega: [f64; 3],
    #[serde(default)]
    pub prestress_params: ParamsConfig,
    pub mesh: MeshConfig,
    #[serde(default)]
    pub regions: Vec<RegionConfig>,
    #[serde(default)]
    pub prestress: PrestressConfig,
    #[serde(default)]
    pub background: BackgroundConfig,
    pub force: Option<ForceConfig>,
    pub friction: Option<FrictionConfig>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub slider: SliderConfig,
    #[serde(default)]
    pub gravity: GravityConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = PrestressParams::default();
        Self { a: p.a, b: p.b }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshConfig {
    Box {
        n: usize,
        #[serde(default = "one")]
        size: f64,
        /// Tag of the interface on `x = 0`: `SS`, `FS` or `FAULT`.
        interface: Option<String>,
        /// Region kinds on the `−` and `+` sides of the interface.
        sides: Option<[String; 2]>,
        #[serde(default = "solid")]
        body: String,
        #[serde(default)]
        padding: usize,
    },
    LayeredBall {
        radii: Vec<f64>,
        kinds: Vec<String>,
        interfaces: Vec<String>,
        #[serde(default = "two")]
        m: usize,
        shells: Option<Vec<usize>>,
        #[serde(default)]
        tetrahedralize: bool,
    },
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}
fn two() -> usize {
    2
}
fn solid() -> String {
    "solid".into()
}

/// A constant or a named built-in field.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(f64),
    Named(NamedField),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedField {
    Uniform { value: f64 },
    /// Piecewise-linear in `|x|`, constant beyond the ends.
    RadialTable { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub name: String,
    pub kind: String,
    pub rho: Option<FieldSpec>,
    pub kappa: Option<f64>,
    #[serde(default)]
    pub mu: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PrestressConfig {
    #[default]
    Zero,
    /// `T⁰ = −pI + tensor`.
    Uniform {
        #[serde(default)]
        pressure: f64,
        tensor: Option<[[f64; 3]; 3]>,
    },
    /// Pressure of the radial background model at every node.
    Hydrostatic,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundConfig {
    #[default]
    None,
    Radial { radii: Vec<f64>, densities: Vec<f64> },
}

/// `Fˢ = ½xᵀAx + g·x`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceConfig {
    #[serde(default)]
    pub gradient: [f64; 3],
    pub hessian: Option<[[f64; 3]; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Constant(f64),
    Mode(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionConfig {
    pub f0: f64,
    pub a: f64,
    pub b: f64,
    pub l_c: f64,
    pub v0: f64,
    #[serde(default)]
    pub v_creep: f64,
    #[serde(default = "aging")]
    pub state_law: String,
    pub gamma_ld: Option<GammaSpec>,
    /// Initial state on the fault; defaults to steady state at a slow rate.
    pub psi: Option<f64>,
    pub nucleation: Option<NucleationConfig>,
}

fn aging() -> String {
    "aging".into()
}

/// Ball of fault points started at a lower state (weaker contact).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleationConfig {
    pub centre: [f64; 3],
    pub radius: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dt: f64,
    pub steps: usize,
    pub eigencount: usize,
    pub seed: u64,
    /// Reduced dofs recorded in the trajectory CSV.
    pub probes: Vec<usize>,
    /// Amplitude of the random initial state of `evolve`.
    pub amplitude: f64,
    pub tensor_instances: usize,
    pub energy_tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            steps: 200,
            eigencount: 6,
            seed: 1,
            probes: vec![0, 1, 2],
            amplitude: 0.01,
            tensor_instances: 1000,
            energy_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SliderConfig {
    pub k: Vec<f64>,
    pub mass: f64,
    pub v_load: f64,
    pub sigma_n: f64,
    pub perturbation: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Default for SliderConfig {
    fn default() -> Self {
        Self { k: vec![0.25, 0.5, 0.75, 1.0], mass: 0.0, v_load: 1.0, sigma_n: 1.0, perturbation: 0.002, dt: 1e-3, steps: 3000 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityConfig {
    /// Cells per edge of the quadrature grid.
    pub grid: usize,
    pub supersample: usize,
    /// Radial profile samples.
    pub samples: usize,
}

impl Default for GravityConfig {
    fn default() -> Self {
        Self { grid: 42, supersample: 6, samples: 41 }
    }
}

/// A validated model and its mesh.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub config: ModelConfig,
    pub model: EarthModel,
    pub mesh: CompositeMesh,
    /// Radial model behind the background potential, if any.
    pub radial: Option<RadialDensityModel>,
    pub friction: Option<FrictionLaw>,
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
            Error::Parse { line, column, message: e.message().to_string() }
        })
    }

    pub fn gravitational_constant(&self) -> f64 {
        self.g.unwrap_or(match self.units {
            Units::Nondimensional => 1.0,
            Units::Si => G_SI,
        })
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, column)
}

fn region_kind(s: &str) -> Result<RegionKind> {
    match s {
        "solid" => Ok(RegionKind::Solid),
        "fluid" => Ok(RegionKind::Fluid),
        "vacuum" => Ok(RegionKind::Vacuum),
        _ => Err(invalid(format!("unknown region kind `{s}`"))),
    }
}

fn face_tag(s: &str) -> Result<FaceTag> {
    FaceTag::parse(s).filter(|t| *t != FaceTag::Exterior).ok_or_else(|| invalid(format!("unknown interface tag `{s}`")))
}

fn mat3(m: &[[f64; 3]; 3]) -> Mat3 {
    Mat3::from_fn(|i, j| m[i][j])
}

fn density(spec: &FieldSpec, region: &str) -> Result<Density> {
    match spec {
        FieldSpec::Constant(v) | FieldSpec::Named(NamedField::Uniform { value: v }) => Ok(Density::Constant(*v)),
        FieldSpec::Named(NamedField::RadialTable { radii, values }) => {
            if radii.is_empty() || radii.len() != values.len() || radii.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Validation {
                    invariant: "radial table",
                    detail: format!("region '{region}': radii must increase and match the values"),
                });
            }
            let (r, v) = (radii.clone(), values.clone());
            Ok(Density::Field(Arc::new(move |x: &Vec3| {
                let s = x.norm();
                let k = r.partition_point(|&ri| ri <= s);
                if k == 0 {
                    v[0]
                } else if k == r.len() {
                    v[r.len() - 1]
                } else {
                    let t = (s - r[k - 1]) / (r[k] - r[k - 1]);
                    (1.0 - t) * v[k - 1] + t * v[k]
                }
            })))
        }
    }
}

fn build_mesh(cfg: &MeshConfig, base: &Path) -> Result<CompositeMesh> {
    match cfg {
        MeshConfig::Box { n, size, interface, sides, body, padding } => {
            let interface = match interface {
                None => None,
                Some(tag) => {
                    let tag = face_tag(tag)?;
                    let [a, b] = match sides {
                        Some([a, b]) => [region_kind(a)?, region_kind(b)?],
                        None if tag == FaceTag::FluidSolid => [RegionKind::Solid, RegionKind::Fluid],
                        None => [RegionKind::Solid, RegionKind::Solid],
                    };
                    Some((tag, a, b))
                }
            };
            box_mesh(&BoxSpec { n: *n, size: *size, interface, kind: region_kind(body)?, padding: *padding })
        }
        MeshConfig::LayeredBall { radii, kinds, interfaces, m, shells, tetrahedralize } => {
            let kinds = kinds.iter().map(|k| region_kind(k)).collect::<Result<Vec<_>>>()?;
            let tags = interfaces.iter().map(|t| face_tag(t)).collect::<Result<Vec<_>>>()?;
            let mut spec = BallSpec::new(radii.clone(), kinds, tags);
            spec.m = *m;
            if let Some(s) = shells {
                spec.shells = s.clone();
            }
            let mesh = layered_ball(&spec)?;
            if *tetrahedralize {
                mesh.tetrahedralize()
            } else {
                Ok(mesh)
            }
        }
        MeshConfig::File { path } => read_mesh(&std::fs::read_to_string(base.join(path))?),
    }
}

/// The mesh described by a configuration, relative paths resolved against `base`.
pub fn generate_mesh(cfg: &ModelConfig, base: &Path) -> Result<CompositeMesh> {
    build_mesh(&cfg.mesh, base)
}

fn friction_law(f: &FrictionConfig) -> Result<FrictionLaw> {
    let state_law = match f.state_law.as_str() {
        "aging" => StateLaw::Aging,
        "slip" => StateLaw::Slip,
        s => return Err(invalid(format!("unknown state law `{s}`"))),
    };
    let gamma_ld = match &f.gamma_ld {
        None => NormalCoupling::Constant(0.0),
        Some(GammaSpec::Constant(g)) => NormalCoupling::Constant(*g),
        Some(GammaSpec::Mode(m)) if m == "friction" => NormalCoupling::Friction,
        Some(GammaSpec::Mode(m)) => return Err(invalid(format!("unknown gamma_ld mode `{m}`"))),
    };
    let law = FrictionLaw { f0: f.f0, a: f.a, b: f.b, l_c: f.l_c, v0: f.v0, v_creep: f.v_creep, state_law, gamma_ld };
    law.validate()?;
    Ok(law)
}

/// Builds and validates the model and mesh of a parsed configuration.
pub fn build_model(config: ModelConfig, base: &Path) -> Result<LoadedModel> {
    let mesh = build_mesh(&config.mesh, base)?;
    let g = config.gravitational_constant();
    if !(g > 0.0) {
        return Err(Error::Validation { invariant: "G > 0", detail: format!("G = {g}") });
    }
    for rc in &config.regions {
        if !mesh.regions.iter().any(|r| r.name == rc.name) {
            let names: Vec<&str> = mesh.regions.iter().map(|r| r.name.as_str()).collect();
            return Err(Error::Validation {
                invariant: "referenced regions exist",
                detail: format!("region '{}' is not in the mesh (mesh regions: {})", rc.name, names.join(", ")),
            });
        }
    }
    let mut materials = Vec::with_capacity(mesh.regions.len());
    for region in &mesh.regions {
        let rc = config.regions.iter().find(|r| r.name == region.name);
        let Some(rc) = rc else {
            if region.kind == RegionKind::Vacuum {
                materials.push(Material::Vacuum);
                continue;
            }
            return Err(Error::Validation {
                invariant: "every region is configured",
                detail: format!("region '{}' has no [[regions]] entry", region.name),
            });
        };
        let kind = region_kind(&rc.kind)?;
        if kind != region.kind {
            return Err(Error::Validation {
                invariant: "region kinds match the mesh",
                detail: format!("region '{}' is configured as {} but the mesh has {:?}", rc.name, rc.kind, region.kind),
            });
        }
        if kind == RegionKind::Vacuum {
            materials.push(Material::Vacuum);
            continue;
        }
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::Validation { invariant: "moduli given", detail: format!("region '{}' needs {what}", rc.name) })
        };
        let rho = density(rc.rho.as_ref().ok_or_else(|| Error::Validation {
            invariant: "density given",
            detail: format!("region '{}' needs rho", rc.name),
        })?, &rc.name)?;
        let kappa = need(rc.kappa, "kappa")?;
        let material = if kind == RegionKind::Fluid {
            if rc.mu != 0.0 {
                return Err(Error::Validation {
                    invariant: "fluid regions carry kappa and p0 only",
                    detail: format!("fluid region '{}' has shear modulus mu = {}", rc.name, rc.mu),
                });
            }
            Material::Fluid { rho, kappa, mu: 0.0 }
        } else {
            Material::Solid { rho, kappa, mu: rc.mu, aniso: None }
        };
        material.gamma().map_err(|e| Error::Validation { invariant: "moduli admissible", detail: format!("region '{}': {e}", rc.name) })?;
        materials.push(material);
    }

    let mut model = EarthModel::new(materials);
    model.params = PrestressParams { a: config.prestress_params.a, b: config.prestress_params.b };
    model.omega = Vec3::from(config.omega);
    model.g = config.self_gravitation.then_some(g);
    let radial = match &config.background {
        BackgroundConfig::None => None,
        BackgroundConfig::Radial { radii, densities } => Some(RadialDensityModel::new(radii.clone(), densities.clone(), g)?),
    };
    if let Some(r) = &radial {
        model.background = Background::Radial(r.clone());
    }
    model.prestress = match &config.prestress {
        PrestressConfig::Zero => PrestressField::Zero,
        PrestressConfig::Uniform { pressure, tensor } => {
            let t = tensor.as_ref().map(mat3).unwrap_or_else(Mat3::zeros);
            if (t - t.transpose()).amax() != 0.0 {
                return Err(Error::Validation { invariant: "prestress symmetric", detail: "prestress tensor is not symmetric".into() });
            }
            PrestressField::Uniform(t - *pressure * Mat3::identity())
        }
        PrestressConfig::Hydrostatic => {
            let r = radial.as_ref().ok_or_else(|| Error::Validation {
                invariant: "hydrostatic prestress needs a radial background",
                detail: "set [background] kind = \"radial\"".into(),
            })?;
            PrestressField::NodalPressure(mesh.nodes.iter().map(|x| r.pressure(x.norm())).collect())
        }
    };
    if let Some(f) = &config.force {
        let g = Vec3::from(f.gradient);
        model.force = Some(match &f.hessian {
            Some(h) => ForcePotential::quadratic(mat3(h), g),
            None => ForcePotential::linear(g),
        });
    }
    let friction = config.friction.as_ref().map(friction_law).transpose()?;
    if friction.is_some() && mesh.faces_with(FaceTag::Fault).next().is_none() {
        return Err(Error::Validation { invariant: "friction needs a fault", detail: "[friction] given but the mesh has no FAULT faces".into() });
    }
    model.check_regions(mesh.regions.len())?;
    Ok(LoadedModel { config, model, mesh, radial, friction })
}

/// Reads, parses and validates a configuration file.
pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    build_model(ModelConfig::parse(&text)?, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE: &str = r#"
        [mesh]
        kind = "box"
        n = 2

        [[regions]]
        name = "solid"
        kind = "solid"
        rho = 1.0
        kappa = 2.0
        mu = 1.0
    "#;

    #[test]
    fn single_cube() {
        let m = build_model(ModelConfig::parse(CUBE).unwrap(), Path::new(".")).unwrap();
        assert_eq!(m.mesh.regions.len(), 1);
        assert_eq!(m.mesh.faces.iter().filter(|f| f.tag != FaceTag::Exterior).count(), 0);
        assert_eq!(m.model.g, None);
        assert_eq!(m.config.gravitational_constant(), 1.0);
    }

    #[test]
    fn fluid_shear_names_the_region() {
        let text = r#"
            [mesh]
            kind = "box"
            n = 2
            interface = "FS"

            [[regions]]
            name = "solid_minus"
            kind = "solid"
            rho = 1.0
            kappa = 2.0
            mu = 1.0

            [[regions]]
            name = "fluid_plus"
            kind = "fluid"
            rho = 1.0
            kappa = 2.0
            mu = 0.3
        "#;
        let e = build_model(ModelConfig::parse(text).unwrap(), Path::new(".")).unwrap_err();
        assert!(matches!(e, Error::Validation { .. }));
        assert!(e.to_string().contains("'fluid_plus'"), "{e}");
    }

    #[test]
    fn unknown_regions_and_bad_syntax() {
        let text = CUBE.replace("name = \"solid\"", "name = \"mantle\"");
        let e = build_model(ModelConfig::parse(&text).unwrap(), Path::new(".")).unwrap_err();
        assert!(e.to_string().contains("'mantle'"));
        match ModelConfig::parse("[mesh]\nkind = \"box\"\nn = = 2\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn si_preset_and_radial_table() {
        let text = format!("units = \"si\"\n{}", CUBE.replace("rho = 1.0", "rho = { field = \"radial_table\", radii = [0.0, 1.0], values = [2.0, 1.0] }"));
        let m = build_model(ModelConfig::parse(&text).unwrap(), Path::new(".")).unwrap();
        assert_eq!(m.config.gravitational_constant(), G_SI);
        let rho = m.model.materials[0].density(&Vec3::new(0.5, 0.0, 0.0));
        assert!((rho - 1.5).abs() < 1e-15);
    }
}
