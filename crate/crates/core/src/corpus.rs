//! The builtin curves and scenario families.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use crate::curve::{standard_curve, ClosedPath, Curve, CurveDocument, FourierPath, Polyline};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::halfint::HalfInt;
use crate::homotopy::{Event, EventKind, FamilyPath, Scenario, Slot};

fn fourier(ax: &[f64], bx: &[f64], ay: &[f64], by: &[f64]) -> ClosedPath {
    ClosedPath::Fourier(FourierPath::new(ax.to_vec(), bx.to_vec(), ay.to_vec(), by.to_vec()))
}

fn polyline(points: &[(f64, f64)]) -> ClosedPath {
    ClosedPath::Polyline(Polyline::new(
        points.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
    ))
}

fn doc(name: &str, standard_index: Option<i64>, components: Vec<ClosedPath>) -> CurveDocument {
    CurveDocument {
        name: Some(name.into()),
        standard_index,
        components,
    }
}

/// The builtin corpus, each curve named and the standard curves tagged.
pub fn builtin_curves() -> Vec<CurveDocument> {
    let mut out: Vec<CurveDocument> = (-3..=3)
        .map(|i| {
            let name = if i < 0 { format!("k_minus_{}", -i) } else { format!("k_{i}") };
            doc(&name, Some(i), standard_curve(i).components().to_vec())
        })
        .collect();
    // r = 1/2 + cos θ
    out.push(doc("limacon", None, vec![fourier(&[0.5, 0.5, 0.5], &[], &[], &[0.0, 0.5, 0.5])]));
    out.push(doc(
        "trefoil",
        None,
        vec![fourier(&[0.0, 1.0, 2.0], &[], &[], &[0.0, 1.0, -2.0])],
    ));
    out.push(doc(
        "hypotrochoid_rose",
        None,
        vec![fourier(&[0.0, 1.0, 0.0, 0.0, 0.4], &[], &[], &[0.0, 1.0, 0.0, 0.0, -0.4])],
    ));
    out.push(doc(
        "lissajous_3_2",
        None,
        vec![fourier(&[], &[0.0, 0.0, 0.0, 1.0], &[], &[0.0, 0.0, 1.0])],
    ));
    out.push(doc(
        "two_circles",
        None,
        vec![
            ClosedPath::Fourier(FourierPath::circle(Vec2::ZERO, 1.0, true)),
            ClosedPath::Fourier(FourierPath::circle(Vec2::new(1.0, 0.2), 0.8, false)),
        ],
    ));
    out.push(doc(
        "two_component_random",
        None,
        vec![
            fourier(
                &[0.12, 1.03, -0.21, 0.08],
                &[0.0, 0.17, 0.11, -0.05],
                &[-0.07, 0.09, 0.14, 0.03],
                &[0.0, 0.96, -0.18, 0.06],
            ),
            fourier(
                &[0.71, 0.52, 0.09],
                &[0.0, -0.06, 0.04],
                &[0.35, 0.11, -0.07],
                &[0.0, -0.58, 0.05],
            ),
        ],
    ));
    out.push(doc(
        "square",
        None,
        vec![polyline(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])],
    ));
    let star: Vec<(f64, f64)> = (0..5)
        .map(|k| {
            let a = TAU / 4.0 + 2.0 * TAU * k as f64 / 5.0;
            (a.cos(), a.sin())
        })
        .collect();
    out.push(doc("pentagram", None, vec![polyline(&star)]));
    out.push(doc(
        "bowtie",
        None,
        vec![polyline(&[(-1.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0)])],
    ));
    out
}

pub fn builtin_curve(name: &str) -> Option<Curve> {
    builtin_curves()
        .into_iter()
        .find(|d| d.name.as_deref() == Some(name))
        .map(|d| Curve::try_from(d).expect("builtin curves are valid"))
}

/// A circle whose center moves with velocity `velocity` in `s`.
fn moving_circle(center: Vec2, radius: f64, ccw: bool, velocity: Vec2) -> FamilyPath {
    FamilyPath::fixed(&FourierPath::circle(center, radius, ccw))
        .with_term(Slot::Ax, 0, 1, velocity.x)
        .with_term(Slot::Ay, 0, 1, velocity.y)
}

fn fixed_circle(center: Vec2, radius: f64, ccw: bool) -> FamilyPath {
    moving_circle(center, radius, ccw, Vec2::ZERO)
}

fn scenario(name: &str, kind: EventKind, index: i64, family: Vec<FamilyPath>) -> Scenario {
    Scenario {
        name: name.into(),
        family,
        event: Event {
            kind,
            index: HalfInt::from_int(index),
            s_event: 0.0,
        },
        probes: [-0.2, 0.2],
    }
}

/// Three unit circles through the origin with tangent lines 60° apart; the
/// first one slides off the origin as `s` varies.
fn triple_circles(orientations: [bool; 3], slide: f64) -> Vec<FamilyPath> {
    (0..3)
        .map(|k| {
            let a = TAU / 4.0 + TAU * k as f64 / 3.0;
            let u = Vec2::new(a.cos(), a.sin());
            let velocity = if k == 0 { u * slide } else { Vec2::ZERO };
            moving_circle(-u, 1.0, orientations[k], velocity)
        })
        .collect()
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    use EventKind::*;
    let o = Vec2::ZERO;
    let x = |v: f64| Vec2::new(v, 0.0);
    let mut out = vec![
        scenario(
            "direct_tangency_index_0",
            DirectTangency,
            0,
            vec![fixed_circle(o, 1.0, true), moving_circle(x(1.5), 0.5, false, x(-0.5))],
        ),
        scenario(
            "direct_tangency_index_1",
            DirectTangency,
            1,
            vec![fixed_circle(o, 1.0, true), moving_circle(x(0.5), 0.5, true, x(0.25))],
        ),
        scenario(
            "direct_tangency_index_minus_1",
            DirectTangency,
            -1,
            vec![fixed_circle(o, 1.0, false), moving_circle(x(0.5), 0.5, false, x(0.25))],
        ),
        scenario(
            "opposite_tangency_index_0",
            OppositeTangency,
            0,
            vec![fixed_circle(o, 1.0, true), moving_circle(x(0.5), 0.5, false, x(0.25))],
        ),
        scenario(
            "opposite_tangency_index_1",
            OppositeTangency,
            1,
            vec![fixed_circle(o, 1.0, true), moving_circle(x(1.5), 0.5, true, x(-0.5))],
        ),
    ];
    out.extend(triple_scenarios());
    out.extend(one_component_scenarios());
    out
}

/// Single-component events: `e^{it} + b e^{3it}` meets itself at the origin
/// with opposite tangents at `b = 1`, and `e^{2it} + b e^{-it}` has a triple
/// point there at `b = 1`.
fn one_component_scenarios() -> Vec<Scenario> {
    let tangency = FamilyPath::default()
        .with_term(Slot::Ax, 1, 0, 1.0)
        .with_term(Slot::By, 1, 0, 1.0)
        .with_term(Slot::Ax, 3, 0, 1.0)
        .with_term(Slot::Ax, 3, 1, 0.5)
        .with_term(Slot::By, 3, 0, 1.0)
        .with_term(Slot::By, 3, 1, 0.5);
    let triple = FamilyPath::default()
        .with_term(Slot::Ax, 2, 0, 1.0)
        .with_term(Slot::By, 2, 0, 1.0)
        .with_term(Slot::Ax, 1, 0, 1.0)
        .with_term(Slot::Ax, 1, 1, -0.5)
        .with_term(Slot::By, 1, 0, -1.0)
        .with_term(Slot::By, 1, 1, 0.5);
    vec![
        scenario(
            "opposite_tangency_one_component_index_2",
            EventKind::OppositeTangency,
            2,
            vec![tangency],
        ),
        scenario(
            "strong_triple_point_one_component_index_0",
            EventKind::TripleStrong,
            0,
            vec![triple],
        ),
    ]
}

fn triple_scenarios() -> Vec<Scenario> {
    use EventKind::*;
    // a large circle around everything shifts every index by its winding
    let around = |ccw: bool| fixed_circle(Vec2::ZERO, 4.0, ccw);
    let with = |mut family: Vec<FamilyPath>, extra: FamilyPath| {
        family.push(extra);
        family
    };
    vec![
        scenario(
            "strong_triple_point_index_0",
            TripleStrong,
            0,
            with(triple_circles([true; 3], 0.3), around(false)),
        ),
        scenario("strong_triple_point_index_1", TripleStrong, 1, triple_circles([true; 3], 0.3)),
        scenario(
            "weak_triple_point_index_0",
            TripleWeak,
            0,
            triple_circles([true, true, false], 0.3),
        ),
        scenario(
            "weak_triple_point_index_1",
            TripleWeak,
            1,
            with(triple_circles([true, true, false], 0.3), around(true)),
        ),
    ]
}

/// Writes every builtin curve to `dir/curves` and every scenario to
/// `dir/scenarios`, one JSON file each.
pub fn export(dir: &Path) -> Result<()> {
    let curves = dir.join("curves");
    let scenarios = dir.join("scenarios");
    fs::create_dir_all(&curves)?;
    fs::create_dir_all(&scenarios)?;
    for d in builtin_curves() {
        let name = d.name.clone().expect("builtin curves are named");
        let text = serde_json::to_string_pretty(&d).map_err(Error::Parse)?;
        fs::write(curves.join(format!("{name}.json")), text + "\n")?;
    }
    for s in builtin_scenarios() {
        fs::write(scenarios.join(format!("{}.json", s.name)), s.to_json() + "\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::crossings::certify_generic;
    use std::collections::HashSet;

    fn data_dir() -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
    }

    #[test]
    fn names_are_unique() {
        let curves: HashSet<_> = builtin_curves().into_iter().map(|d| d.name.unwrap()).collect();
        assert_eq!(curves.len(), builtin_curves().len());
        let scenarios: HashSet<_> = builtin_scenarios().into_iter().map(|s| s.name).collect();
        assert_eq!(scenarios.len(), builtin_scenarios().len());
    }

    #[test]
    fn corpus_is_generic_and_varied() {
        let docs = builtin_curves();
        assert!(docs.len() >= 12);
        assert!(docs.iter().any(|d| d.components.len() == 2));
        for d in docs {
            let name = d.name.clone().unwrap();
            let c = Curve::try_from(d).unwrap();
            let report = certify_generic(&c, &Tolerances::default());
            assert!(report.is_generic(), "{name}: {report}");
        }
    }

    #[test]
    fn shipped_files_match_builtins() {
        for d in builtin_curves() {
            let path = data_dir().join("curves").join(format!("{}.json", d.name.as_ref().unwrap()));
            let text = fs::read_to_string(&path).unwrap();
            let shipped: CurveDocument = serde_json::from_str(&text).unwrap();
            assert_eq!(shipped, d, "{path:?}");
        }
        for s in builtin_scenarios() {
            let path = data_dir().join("scenarios").join(format!("{}.json", s.name));
            let shipped = Scenario::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
            assert_eq!(shipped, s, "{path:?}");
        }
    }

    #[test]
    fn export_writes_every_file() {
        let dir = tempfile::tempdir().unwrap();
        export(dir.path()).unwrap();
        assert_eq!(fs::read_dir(dir.path().join("curves")).unwrap().count(), builtin_curves().len());
        assert_eq!(
            fs::read_dir(dir.path().join("scenarios")).unwrap().count(),
            builtin_scenarios().len()
        );
    }
}
