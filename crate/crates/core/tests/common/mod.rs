#![allow(dead_code)]

use qcurve::crossings::certify_generic;
use qcurve::curve::{ClosedPath, Curve, FourierPath, Polyline};
use qcurve::geom::Vec2;
use qcurve::indexing::index_curve;
use qcurve::Tolerances;
use rand::Rng;

fn shake(v: &[f64], len: usize, amount: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..len)
        .map(|k| v.get(k).copied().unwrap_or(0.0) + rng.gen_range(-amount..=amount))
        .collect()
}

/// Adds uniform noise of relative size `magnitude` to every coefficient or vertex.
pub fn perturb(curve: &Curve, magnitude: f64, rng: &mut impl Rng) -> Curve {
    let components = curve
        .components()
        .iter()
        .map(|c| match c {
            ClosedPath::Fourier(f) => {
                let len = f.len();
                let scale = [&f.ax, &f.bx, &f.ay, &f.by]
                    .iter()
                    .flat_map(|v| v.iter())
                    .fold(0.0f64, |m, x| m.max(x.abs()));
                let a = magnitude * scale;
                ClosedPath::Fourier(FourierPath::new(
                    shake(&f.ax, len, a, rng),
                    shake(&f.bx, len, a, rng),
                    shake(&f.ay, len, a, rng),
                    shake(&f.by, len, a, rng),
                ))
            }
            ClosedPath::Polyline(p) => {
                let a = magnitude * curve.bounds().diagonal();
                ClosedPath::Polyline(Polyline::new(
                    p.vertices
                        .iter()
                        .map(|v| *v + Vec2::new(rng.gen_range(-a..=a), rng.gen_range(-a..=a)))
                        .collect(),
                ))
            }
        })
        .collect();
    Curve::new(components).expect("perturbed curves stay valid")
}

/// A perturbation that keeps the curve generic with the same number of
/// double points, shrinking the noise until one is found.
pub fn generic_jitter(curve: &Curve, magnitude: f64, rng: &mut impl Rng) -> Curve {
    let tol = Tolerances::default();
    let crossings = index_curve(curve, &tol).expect("input is generic").crossing_count();
    let mut m = magnitude;
    for _ in 0..20 {
        let candidate = perturb(curve, m, rng);
        if certify_generic(&candidate, &tol).is_generic()
            && index_curve(&candidate, &tol).is_ok_and(|ic| ic.crossing_count() == crossings)
        {
            return candidate;
        }
        m *= 0.5;
    }
    panic!("no generic perturbation found");
}
