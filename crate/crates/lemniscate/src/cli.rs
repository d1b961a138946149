//! Pipeline orchestration behind the `analyze`, `render`, `fingerprint` and
//! `verify` subcommands.  The binary itself only parses arguments and maps
//! results to exit codes: 0 success, 2 a verification failed, 1 numeric
//! failure, 64 malformed input.

use crate::conformal::{
    level_polisher, riemann_map_disk, verify_eks, verify_thm2, verify_thm3, CurveSamples,
    ExteriorMap,
};
use crate::error::{Error, Result};

use crate::graph::{build_graph, domain_configurations, verify_pole_census_by_winding};
use crate::oracle;
use crate::qd::{QuadraticDifferential, SpherePoint};
use crate::report::*;
use crate::svg::{render, SvgOptions};
use crate::teich::verify_configuration;
use crate::tol::Tolerances;
use crate::trace::{arg_monotonicity_check, level_components, trace_level, vertex_geometry};
use num_complex::Complex64;

pub struct Analysis {
    pub report: AnalysisReport,
    pub qd: QuadraticDifferential,
    pub graph: crate::graph::CriticalGraph,
    pub config: crate::graph::DomainConfiguration,
}

/// Runs the full pipeline: differential, critical graph, domain
/// configuration, angle-count verification.
pub fn run_analyze(
    input: &InputSpec,
    tol: &Tolerances,
    with_polylines: bool,
) -> Result<Analysis> {
    let map = input.to_rational_map()?;
    let qd = QuadraticDifferential::build(map, tol)?;
    let geometry = vertex_geometry(&qd, tol)?;
    let graph = build_graph(&qd, &geometry, tol)?;
    let config = domain_configurations(&graph, &qd)?;
    let checks = verify_configuration(&graph, &qd, &config, tol)?;

    let connected = qd.connectivity_predicate(tol)?;
    let pairs: Vec<[usize; 2]> = qd
        .max_modulus_pairs(tol)
        .into_iter()
        .map(|(i, j)| [i, j])
        .collect();
    let properness = if qd.map().is_polynomial() {
        Some(qd.properness_test(1.0, tol)?)
    } else {
        None
    };

    let report = AnalysisReport {
        tool: ToolInfo::default(),
        tolerances: tol.clone(),
        input: input.clone(),
        degree: qd.map().degree(),
        differential: differential_json(&qd),
        critical_values: critical_values_json(&qd),
        connectivity: ConnectivityJson {
            connected,
            max_modulus_pairs: pairs,
        },
        properness,
        graph: graph_json(&graph, with_polylines),
        faces: faces_json(&config),
        teichmuller: teichmuller_json(&checks),
    };
    Ok(Analysis {
        report,
        qd,
        graph,
        config,
    })
}

/// Renders the critical graph plus requested lemniscate levels as SVG.
pub fn run_render(input: &InputSpec, levels: &[f64], tol: &Tolerances) -> Result<String> {
    let analysis = run_analyze(input, tol, false)?;
    let window = oracle::default_window(analysis.qd.map())?;
    let mut overlays = Vec::new();
    for &c in levels {
        let comps = level_components(&analysis.qd, c, &window, tol)?;
        overlays.push((c, comps));
    }
    Ok(render(
        &analysis.qd,
        &analysis.graph,
        &overlays,
        analysis.report.connectivity.connected,
        analysis.config.circle_count(),
        analysis.config.ring_count(),
        &SvgOptions::for_window(window),
    ))
}

/// Dispatches the fingerprint identity by the census of roots inside the
/// requested level-curve component and reports the residual.
pub fn run_fingerprint(
    input: &InputSpec,
    level: f64,
    around: Option<Complex64>,
    m_samples: usize,
    tol: &Tolerances,
) -> Result<FingerprintReport> {
    let map = input.to_rational_map()?;
    if !map.is_polynomial() {
        return Err(Error::Input(
            "fingerprints are defined for polynomial lemniscates; q must be constant".into(),
        ));
    }
    // normalize the level to 1 by rescaling p
    let level_normalized = (level - 1.0).abs() > 1e-15;
    let p = if level_normalized {
        map.p().scale(Complex64::new(1.0 / level, 0.0))
    } else {
        map.p().clone()
    };
    let map = crate::rational::RationalMap::polynomial(p.clone())?;
    let qd = QuadraticDifferential::build(map, tol)?;

    // smoothness: no critical modulus on the (normalized) level
    for e in &qd.critical_values().entries {
        if crate::qd::moduli_equal(e.modulus, 1.0, 1e-9) {
            return Err(Error::CriticalLevel {
                level: 1.0,
                critical: e.modulus,
            });
        }
    }

    let window = oracle::default_window(qd.map())?;
    let components = level_components(&qd, 1.0, &window, tol)?;
    if components.is_empty() {
        return Err(Error::Input("the level set is empty in the window".into()));
    }
    let chosen = match around {
        Some(z) => components
            .into_iter()
            .find(|t| {
                oracle::winding_number(&t.points, z)
                    .map(|w| w == 1)
                    .unwrap_or(false)
            })
            .ok_or(Error::Input(
                "no level component encloses the requested point".into(),
            ))?,
        None => {
            if components.len() > 1 {
                return Err(Error::Input(format!(
                    "the level set has {} components; pick one with --around",
                    components.len()
                )));
            }
            components.into_iter().next().unwrap()
        }
    };

    // census of roots inside the component
    let roots = p.roots(tol.root_residual)?;
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for r in &roots.roots {
        if oracle::winding_number(&chosen.points, r.location)? == 1 {
            inside.push(*r);
        } else {
            outside.push(*r);
        }
    }

    let polish = level_polisher(&qd, 1.0);
    let interior_point = {
        let mean = inside
            .iter()
            .map(|r| r.location)
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
            / inside.len().max(1) as f64;
        mean
    };

    let (dispatch, residual, fp_samples) = if outside.is_empty() && !inside.is_empty() {
        let dm = riemann_map_disk(&chosen.points, interior_point, tol, Some(&polish))?;
        let rep = verify_eks(&p, &dm, tol)?;
        let fp = crate::conformal::fingerprint(&p, &dm, m_samples)?;
        let samples: Vec<[f64; 2]> = fp.samples.iter().map(|(_, k)| c2(*k)).collect();
        (
            FingerprintCase::AllRootsInside {
                report: rep.clone(),
            },
            rep.residual,
            samples,
        )
    } else if inside.len() == 1 {
        let curve = CurveSamples::from_closed_polyline(&chosen.points, tol.szego_nodes, Some(&polish))?;
        let em = ExteriorMap::build(&curve, inside[0].location)?;
        let rep = verify_thm2(&p, inside[0].location, &curve, &em, tol)?;
        (
            FingerprintCase::OneRootInside {
                report: rep.clone(),
            },
            rep.residual,
            Vec::new(),
        )
    } else if inside.len() == 2 {
        let curve = CurveSamples::from_closed_polyline(&chosen.points, tol.szego_nodes, Some(&polish))?;
        let dm = riemann_map_disk(&chosen.points, interior_point, tol, Some(&polish))?;
        let em = ExteriorMap::build(&curve, interior_point)?;
        let rep = verify_thm3(
            &p,
            inside[0].location,
            inside[1].location,
            &curve,
            &dm,
            &em,
            tol,
        )?;
        let fp = crate::conformal::fingerprint_ring(&dm, &em, m_samples)?;
        let samples: Vec<[f64; 2]> = fp.samples.iter().map(|(_, k)| c2(*k)).collect();
        (
            FingerprintCase::TwoRootsInside {
                report: rep.clone(),
            },
            rep.residual,
            samples,
        )
    } else {
        (
            FingerprintCase::OutOfTheoremScope {
                roots_inside: inside.len(),
            },
            f64::NAN,
            Vec::new(),
        )
    };

    let residual_ok = residual.is_nan() || residual <= tol.fingerprint_tol;
    Ok(FingerprintReport {
        tool: ToolInfo::default(),
        input: input.clone(),
        level,
        level_normalized,
        samples: m_samples,
        dispatch,
        residual,
        residual_ok,
        fingerprint: fp_samples,
    })
}

/// Runs the verification battery: ray handshake, Euler count, pole census by
/// winding, the angle-count identity on every face, argument monotonicity of
/// every edge, and the residue probes.
pub fn run_verify(input: &InputSpec, tol: &Tolerances) -> Result<VerifyReport> {
    let analysis = run_analyze(input, tol, false)?;
    let qd = &analysis.qd;
    let g = &analysis.graph;
    let cfg = &analysis.config;
    let mut items = Vec::new();

    let rays: usize = g.vertices.iter().map(|v| v.rays.len()).sum();
    items.push(VerifyItem {
        name: "ray handshake".into(),
        pass: 2 * g.edges.len() == rays,
        detail: format!("2E = {} vs rays = {}", 2 * g.edges.len(), rays),
    });

    let expected_faces = 1 + g.component_count + g.edges.len() - g.vertices.len();
    items.push(VerifyItem {
        name: "sphere Euler count".into(),
        pass: cfg.faces.len() == expected_faces,
        detail: format!("faces {} vs 1 + C + E - V = {}", cfg.faces.len(), expected_faces),
    });

    items.push(VerifyItem {
        name: "circle faces match double poles".into(),
        pass: cfg.circle_count() == qd.sphere_poles().len(),
        detail: format!(
            "{} circle faces, {} double poles",
            cfg.circle_count(),
            qd.sphere_poles().len()
        ),
    });

    let winding_ok = verify_pole_census_by_winding(cfg, qd);
    items.push(VerifyItem {
        name: "pole census by winding".into(),
        pass: winding_ok.is_ok(),
        detail: winding_ok.err().map(|e| e.to_string()).unwrap_or_else(|| "ok".into()),
    });

    for check in &analysis.report.teichmuller.checks {
        items.push(VerifyItem {
            name: format!("angle count, face {} walk {}", check.face, check.walk),
            pass: check.pass,
            detail: format!("lhs {} rhs {}", check.lhs, check.rhs),
        });
    }

    for (ei, e) in g.edges.iter().enumerate() {
        let t = crate::trace::Trajectory {
            points: e.points.clone(),
            level: e.level,
            start_tag: crate::trace::EndTag::ClosedLoop,
            end_tag: crate::trace::EndTag::ClosedLoop,
            total_arg_change: e.arg_change,
        };
        let rep = arg_monotonicity_check(&t, qd.map());
        items.push(VerifyItem {
            name: format!("monotone argument, edge {}", ei),
            pass: rep.monotone,
            detail: format!("total change {:.6}", rep.total_change),
        });
    }

    for pole in qd.poles() {
        let err = crate::qd::residue_probe(qd, pole, 1e-6);
        items.push(VerifyItem {
            name: format!("residue at {}", pole.location),
            pass: err < 1e-4,
            detail: format!("relative deviation {:.3e}", err),
        });
    }

    // cross-module: the modulus predicate agrees with the traced components
    let connected = analysis.report.connectivity.connected;
    items.push(VerifyItem {
        name: "connectivity predicate vs traced components".into(),
        pass: connected == (g.component_count == 1),
        detail: format!(
            "predicate {}, components {}",
            connected, g.component_count
        ),
    });

    // every maximal-modulus pair is joined by an edge
    for [i, j] in &analysis.report.connectivity.max_modulus_pairs {
        let entry_point = |k: usize| qd.critical_values().entries[k].point;
        let vi = vertex_index_of(g, entry_point(*i));
        let vj = vertex_index_of(g, entry_point(*j));
        let pass = match (vi, vj) {
            (Some(a), Some(b)) => g.connecting_trajectory(a, b).is_some(),
            _ => false,
        };
        items.push(VerifyItem {
            name: format!("maximal pair ({}, {}) joined", i, j),
            pass,
            detail: String::new(),
        });
    }

    let all_pass = items.iter().all(|i| i.pass);
    Ok(VerifyReport {
        tool: ToolInfo::default(),
        input: input.clone(),
        items,
        all_pass,
    })
}

fn vertex_index_of(g: &crate::graph::CriticalGraph, p: SpherePoint) -> Option<usize> {
    g.vertices.iter().position(|v| match (v.point, p) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => true,
        (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
            (a - b).norm() < 1e-9 * (1.0 + a.norm())
        }
        _ => false,
    })
}

/// Stable serialization used by all subcommands.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

/// Traces one level set and reports seeds; used by the examples.
pub fn trace_one_level(
    qd: &QuadraticDifferential,
    c: f64,
    seed: Complex64,
    tol: &Tolerances,
) -> Result<crate::trace::Trajectory> {
    trace_level(qd, c, seed, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_spec_forms() {
        let spec = InputSpec::parse(r#"{"coeffs": [[4,0],[0,0],[-5,0],[0,0],[1,0]]}"#).unwrap();
        let p = spec.to_polynomial().unwrap();
        assert_eq!(p.degree(), Some(4));

        let spec = InputSpec::parse(r#"{"roots": [[1,0],[-1,0]], "leading": [2,0]}"#).unwrap();
        let p = spec.to_polynomial().unwrap();
        assert_eq!(p.degree(), Some(2));
        assert!((p.coeff(0) - Complex64::new(-2.0, 0.0)).norm() < 1e-15);

        assert!(InputSpec::parse("{}").unwrap().to_polynomial().is_err());
        assert!(InputSpec::parse("not json").is_err());
    }

    #[test]
    fn analyze_quartic_summary() {
        let tol = Tolerances::default();
        let spec = InputSpec::parse(r#"{"coeffs": [[4,0],[0,0],[-5,0],[0,0],[1,0]]}"#).unwrap();
        let a = run_analyze(&spec, &tol, false).unwrap();
        assert_eq!(a.report.graph.vertex_count, 3);
        assert!(!a.report.connectivity.connected);
        assert_eq!(a.report.faces.circle, 5);
        assert_eq!(a.report.faces.ring, 2);
        assert!(a.report.teichmuller.all_pass);
    }

    #[test]
    fn analyze_rejects_constant() {
        let tol = Tolerances::default();
        let spec = InputSpec::parse(r#"{"coeffs": [[3,0]]}"#).unwrap();
        assert!(matches!(
            run_analyze(&spec, &tol, false),
            Err(Error::DegreeTooSmall) | Err(Error::Input(_))
        ));
    }

    #[test]
    fn deterministic_serialization() {
        let tol = Tolerances::default();
        let spec = InputSpec::parse(r#"{"coeffs": [[-1,0],[0,0],[1,0]]}"#).unwrap();
        let a = to_json_string(&run_analyze(&spec, &tol, true).unwrap().report);
        let b = to_json_string(&run_analyze(&spec, &tol, true).unwrap().report);
        assert_eq!(a, b);
    }

    #[test]
    fn verify_passes_on_fig1() {
        let tol = Tolerances::default();
        let spec = InputSpec::parse(
            r#"{"coeffs": [[-1,0],[0,0],[1,0]], "q": {"coeffs": [[1,0],[0,0],[1,0]]}}"#,
        )
        .unwrap();
        let rep = run_verify(&spec, &tol).unwrap();
        assert!(rep.all_pass);
    }
}
