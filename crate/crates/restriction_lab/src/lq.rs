use eigenfunction_bases::ClusterBasis;
use num_complex::Complex64;
use serde::Serialize;

use contact_order::CurveModel;

use crate::norms::RestrictionMap;
use crate::quadrature::QuadratureRule;

/// `‖f‖_{L^q(γ)}` from values on the rule's nodes (finite `q`).
pub fn lq_from_values(values: &[Complex64], quad: &QuadratureRule, q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let s: f64 = values.iter().zip(&quad.weights).map(|(f, w)| w * f.norm().powf(q)).sum();
    s.powf(1.0 / q)
}

/// `(Σ_i w_i |f(γ(t_i))|^q)^{1/q}` for `f = Σ c_a φ_a`; `q = ∞` takes the
/// maximum over a 4× refined node set.
pub fn lq_restriction_norm(coeffs: &[Complex64], basis: &ClusterBasis, curve: &CurveModel, q: f64, quad: &QuadratureRule) -> f64 {
    let rule = if q.is_infinite() { quad.refined(curve, 4) } else { quad.clone() };
    let map = RestrictionMap::new(basis, &rule);
    lq_from_values(&map.values(coeffs, &rule), &rule, q)
}

#[derive(Clone, Debug, Serialize)]
pub struct Ascent {
    #[serde(skip)]
    pub coeffs: Vec<Complex64>,
    pub ratio: f64,
    pub initial_ratio: f64,
    /// Ratio after every accepted step, starting with the initial one.
    pub history: Vec<f64>,
    pub steps: usize,
}

fn normalize(c: &mut [Complex64]) {
    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|z| *z /= n);
}

/// Projected gradient ascent of `c ↦ ‖Σ c_a φ_a‖_{L^q(γ)}` on the unit
/// sphere. Fixed step 0.1 along the normalized tangent gradient, halved on
/// every rejection; stops after `steps` trials or when an accepted step
/// gains less than `1e-6` relative. The result is a lower bound for the
/// operator norm.
pub fn lower_bound_search(map: &RestrictionMap, quad: &QuadratureRule, q: f64, init: &[Complex64], steps: usize) -> Ascent {
    assert!(q > 2.0 && q.is_finite(), "ascent needs 2 < q < ∞");
    let mut c = init.to_vec();
    normalize(&mut c);
    let ratio_of = |c: &[Complex64]| {
        let f = map.values(c, quad);
        (lq_from_values(&f, quad, q), f)
    };
    let (mut ratio, mut f) = ratio_of(&c);
    let initial_ratio = ratio;
    let mut history = vec![ratio];
    let mut eta = 0.1;
    let mut taken = 0;
    while taken < steps && eta > 1e-10 {
        taken += 1;
        // ∂/∂c̄ Σ w|f|^q = (q/2) B*(w |f|^{q−2} f); the factor q/2 is dropped
        let v: Vec<Complex64> = f.iter().zip(&quad.weights).map(|(f, w)| f * (w * f.norm().powf(q - 2.0))).collect();
        let mut g = map.adjoint(&v);
        let proj: Complex64 = c.iter().zip(&g).map(|(a, b)| a.conj() * b).sum();
        g.iter_mut().zip(&c).for_each(|(gi, ci)| *gi -= proj * ci);
        let gn = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gn == 0.0 {
            break;
        }
        let mut trial: Vec<Complex64> = c.iter().zip(&g).map(|(a, b)| a + b * (eta / gn)).collect();
        normalize(&mut trial);
        let (r, ft) = ratio_of(&trial);
        if r > ratio {
            let gain = (r - ratio) / ratio;
            c = trial;
            f = ft;
            ratio = r;
            history.push(r);
            if gain < 1e-6 {
                break;
            }
        } else {
            eta *= 0.5;
        }
    }
    Ascent { coeffs: c, ratio, initial_ratio, history, steps: taken }
}
