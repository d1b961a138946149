//! JSON report types shared by the CLI subcommands.  Field order is fixed by
//! struct declaration and all containers are vectors, so identical runs
//! serialize byte-identically.

use crate::conformal::{EksReport, Thm2Report, Thm3Report};
use crate::error::{Error, Result};
use crate::graph::{CriticalGraph, DomainConfiguration, FaceKind};
use crate::poly::Polynomial;
use crate::qd::{InfinityKind, Properness, QuadraticDifferential, SpherePoint};
use crate::teich::FaceCheck;
use crate::tol::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Input specification: either ascending coefficients or roots plus a
/// leading coefficient, optionally the same for a denominator q.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Box<InputSpec>>,
}

impl InputSpec {
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        match (&self.coeffs, &self.roots) {
            (Some(coeffs), None) => {
                let v: Vec<Complex64> = coeffs
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                let p = Polynomial::new(v);
                if p.is_zero() {
                    return Err(Error::Input("polynomial is zero".into()));
                }
                Ok(p)
            }
            (None, Some(roots)) => {
                let lead = self
                    .leading
                    .map(|[re, im]| Complex64::new(re, im))
                    .unwrap_or(Complex64::new(1.0, 0.0));
                if lead.norm() == 0.0 {
                    return Err(Error::Input("leading coefficient is zero".into()));
                }
                let rs: Vec<Complex64> = roots
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                Ok(Polynomial::from_roots(&rs, lead))
            }
            (Some(_), Some(_)) => Err(Error::Input(
                "give either coeffs or roots, not both".into(),
            )),
            (None, None) => Err(Error::Input("input needs coeffs or roots".into())),
        }
    }

    pub fn to_rational_map(&self) -> Result<crate::rational::RationalMap> {
        let p = self.to_polynomial()?;
        let q = match &self.q {
            Some(spec) => spec.to_polynomial()?,
            None => Polynomial::constant(Complex64::new(1.0, 0.0)),
        };
        crate::rational::RationalMap::new(p, q)
    }

    pub fn parse(json: &str) -> Result<InputSpec> {
        serde_json::from_str(json).map_err(|e| Error::Input(format!("malformed input: {}", e)))
    }

    pub fn from_polynomial(p: &Polynomial) -> InputSpec {
        InputSpec {
            coeffs: Some(p.coeffs().iter().map(|&c| c2(c)).collect()),
            roots: None,
            leading: None,
            q: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointJson {
    pub at_infinity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<[f64; 2]>,
}

impl From<SpherePoint> for PointJson {
    fn from(p: SpherePoint) -> Self {
        match p {
            SpherePoint::Finite(z) => PointJson {
                at_infinity: false,
                location: Some(c2(z)),
            },
            SpherePoint::Infinity => PointJson {
                at_infinity: true,
                location: None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroJson {
    pub location: [f64; 2],
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleJson {
    pub location: [f64; 2],
    pub signed_multiplicity: i32,
    pub residue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DifferentialJson {
    pub zeros: Vec<ZeroJson>,
    pub poles: Vec<PoleJson>,
    pub infinity: InfinityKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalValueJson {
    pub point: PointJson,
    pub value: [f64; 2],
    pub modulus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityJson {
    pub connected: bool,
    pub max_modulus_pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexJson {
    pub point: PointJson,
    pub multiplicity: usize,
    pub rays: Vec<f64>,
    pub level: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeJson {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphJson {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole: Option<PointJson>,
    pub walks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FacesJson {
    pub circle: usize,
    pub ring: usize,
    pub faces: Vec<FaceJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TeichCheckJson {
    pub face: usize,
    pub walk: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TeichmullerJson {
    pub checks: Vec<TeichCheckJson>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub tolerances: Tolerances,
    pub input: InputSpec,
    pub degree: usize,
    pub differential: DifferentialJson,
    pub critical_values: Vec<CriticalValueJson>,
    pub connectivity: ConnectivityJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properness: Option<Properness>,
    pub graph: GraphJson,
    pub faces: FacesJson,
    pub teichmuller: TeichmullerJson,
}

impl AnalysisReport {
    pub fn verification_passed(&self) -> bool {
        self.teichmuller.all_pass
    }
}

pub fn differential_json(qd: &QuadraticDifferential) -> DifferentialJson {
    DifferentialJson {
        zeros: qd
            .zeros()
            .iter()
            .map(|z| ZeroJson {
                location: c2(z.location),
                multiplicity: z.multiplicity,
            })
            .collect(),
        poles: qd
            .poles()
            .iter()
            .map(|p| PoleJson {
                location: c2(p.location),
                signed_multiplicity: p.signed_multiplicity,
                residue: p.residue,
            })
            .collect(),
        infinity: qd.infinity(),
    }
}

pub fn critical_values_json(qd: &QuadraticDifferential) -> Vec<CriticalValueJson> {
    qd.critical_values()
        .entries
        .iter()
        .map(|e| CriticalValueJson {
            point: e.point.into(),
            value: c2(e.value),
            modulus: e.modulus,
        })
        .collect()
}

pub fn graph_json(g: &CriticalGraph, with_polylines: bool) -> GraphJson {
    GraphJson {
        vertex_count: g.vertices.len(),
        edge_count: g.edges.len(),
        component_count: g.component_count,
        vertices: g
            .vertices
            .iter()
            .map(|v| VertexJson {
                point: v.point.into(),
                multiplicity: v.multiplicity,
                rays: v.rays.clone(),
                level: v.level,
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeJson {
                from: [e.a.vertex, e.a.ray],
                to: [e.b.vertex, e.b.ray],
                level: e.level,
                points: if with_polylines {
                    Some(e.points.iter().map(|&z| c2(z)).collect())
                } else {
                    None
                },
            })
            .collect(),
    }
}

pub fn faces_json(cfg: &DomainConfiguration) -> FacesJson {
    FacesJson {
        circle: cfg.circle_count(),
        ring: cfg.ring_count(),
        faces: cfg
            .faces
            .iter()
            .map(|f| match &f.kind {
                FaceKind::Circle { pole } => FaceJson {
                    kind: "circle",
                    pole: Some((*pole).into()),
                    walks: f.walks.clone(),
                },
                FaceKind::Ring => FaceJson {
                    kind: "ring",
                    pole: None,
                    walks: f.walks.clone(),
                },
            })
            .collect(),
    }
}

pub fn teichmuller_json(checks: &[FaceCheck]) -> TeichmullerJson {
    let list: Vec<TeichCheckJson> = checks
        .iter()
        .map(|c| TeichCheckJson {
            face: c.face,
            walk: c.walk,
            lhs: c.sum.lhs,
            rhs: c.sum.rhs,
            pass: c.sum.holds(),
        })
        .collect();
    let all = list.iter().all(|c| c.pass);
    TeichmullerJson {
        checks: list,
        all_pass: all,
    }
}

/// Which fingerprint identity applied, with its residuals.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum FingerprintCase {
    AllRootsInside { report: EksReport },
    OneRootInside { report: Thm2Report },
    TwoRootsInside { report: Thm3Report },
    OutOfTheoremScope { roots_inside: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct FingerprintReport {
    pub tool: ToolInfo,
    pub input: InputSpec,
    pub level: f64,
    /// True when the polynomial was rescaled so the requested level became 1.
    pub level_normalized: bool,
    pub samples: usize,
    pub dispatch: FingerprintCase,
    pub residual: f64,
    pub residual_ok: bool,
    pub fingerprint: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tool: ToolInfo,
    pub input: InputSpec,
    pub items: Vec<VerifyItem>,
    pub all_pass: bool,
}
