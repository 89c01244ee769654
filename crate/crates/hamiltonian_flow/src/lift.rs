use symbol_core::{AffineMap, PhaseSpacePoint};

use crate::error::FlowError;

/// A chart change `τ` with its Jacobian.
pub trait Diffeomorphism {
    fn map(&self, x: [f64; 2]) -> [f64; 2];
    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2];
}

impl Diffeomorphism for AffineMap {
    fn map(&self, x: [f64; 2]) -> [f64; 2] {
        self.apply(&x)
    }
    fn jacobian(&self, _: [f64; 2]) -> [[f64; 2]; 2] {
        self.a
    }
}

/// `(τ(x), (τ'(x)ᵀ)⁻¹ ξ)`.
pub fn cotangent_lift(diffeo: &dyn Diffeomorphism, pt: &PhaseSpacePoint) -> Result<PhaseSpacePoint, FlowError> {
    let j = diffeo.jacobian(pt.x);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det.abs() < 1e-8 {
        return Err(FlowError::Singular(det));
    }
    // (Jᵀ)⁻¹ = (J⁻¹)ᵀ
    let xi = [
        (j[1][1] * pt.xi[0] - j[1][0] * pt.xi[1]) / det,
        (-j[0][1] * pt.xi[0] + j[0][0] * pt.xi[1]) / det,
    ];
    Ok(PhaseSpacePoint::new(diffeo.map(pt.x), xi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_trivial() {
        let p = PhaseSpacePoint::new([0.3, -1.0], [2.0, 0.5]);
        assert_eq!(cotangent_lift(&AffineMap::identity(), &p).unwrap(), p);
    }

    #[test]
    fn pairing_preserved() {
        let m = AffineMap { a: [[2.0, 1.0], [0.5, 3.0]], c: [1.0, 1.0] };
        let p = PhaseSpacePoint::new([0.3, -1.0], [2.0, 0.5]);
        let v = [0.7, -0.2];
        let q = cotangent_lift(&m, &p).unwrap();
        let av = [m.a[0][0] * v[0] + m.a[0][1] * v[1], m.a[1][0] * v[0] + m.a[1][1] * v[1]];
        let before = p.xi[0] * v[0] + p.xi[1] * v[1];
        let after = q.xi[0] * av[0] + q.xi[1] * av[1];
        assert!((before - after).abs() < 1e-14);
    }

    #[test]
    fn rotation_keeps_length() {
        let th: f64 = 0.9;
        let m = AffineMap { a: [[th.cos(), -th.sin()], [th.sin(), th.cos()]], c: [0.0, 0.0] };
        let p = PhaseSpacePoint::new([0.3, -1.0], [2.0, 0.5]);
        let q = cotangent_lift(&m, &p).unwrap();
        assert!((q.xi[0].hypot(q.xi[1]) - 2f64.hypot(0.5)).abs() < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = AffineMap { a: [[1.0, 2.0], [0.5, 1.0]], c: [0.0, 0.0] };
        let p = PhaseSpacePoint::new([0.0; 2], [1.0, 0.0]);
        assert!(matches!(cotangent_lift(&m, &p), Err(FlowError::Singular(_))));
    }
}
