//! Pseudometrics with a relaxed triangle inequality.
//!
//! A pseudometric here is a symmetric nonnegative pairing that vanishes on
//! the diagonal and satisfies the chain inequality governed by a
//! [`RhoSequence`]. Unlike a metric, two distinct states may be at distance
//! zero (the shipped examples depend only on the first coordinate), and the
//! triangle inequality holds only up to `rho(2)`.
//!
//! Claimed `rho` sequences of user-built pseudometrics are taken on trust at
//! construction; `stability::audit_pseudometric` falsifies wrong claims by
//! seeded sampling.

use std::fmt;
use std::sync::Arc;

use crate::domain::DomainDescriptor;
use crate::dynamics::{CouplingFunction, WeightVector};
use crate::error::{Error, Result};
use crate::rho::RhoSequence;

type EvalFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// A pseudometric: evaluation rule, chain constants, and validity domain.
#[derive(Clone)]
pub struct Pseudometric {
    name: String,
    rho: RhoSequence,
    domain: DomainDescriptor,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Pseudometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pseudometric")
            .field("name", &self.name)
            .field("rho", &self.rho.describe())
            .field("domain", &self.domain)
            .finish()
    }
}

impl Pseudometric {
    /// Wraps a user-supplied evaluation rule with a claimed `rho` and domain.
    pub fn custom(
        name: impl Into<String>,
        rho: RhoSequence,
        domain: DomainDescriptor,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Pseudometric { name: name.into(), rho, domain, eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> &RhoSequence {
        &self.rho
    }

    pub fn domain(&self) -> &DomainDescriptor {
        &self.domain
    }

    /// Replaces the claimed chain constants; the replacement is validated
    /// only by sampling audits.
    pub fn with_claimed_rho(mut self, rho: RhoSequence) -> Self {
        self.rho = rho;
        self
    }

    /// Evaluates the pairing, rejecting points outside the validity domain.
    pub fn evaluate(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let d = self.domain.dim();
        if a.len() != d || b.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "pseudometric '{}' expects dimension {}, got {} and {}",
                self.name,
                d,
                a.len(),
                b.len()
            )));
        }
        if !(self.domain.contains(a) && self.domain.contains(b)) {
            return Err(Error::InvalidDomain(format!(
                "pseudometric '{}' evaluated outside its validity domain",
                self.name
            )));
        }
        Ok((self.eval)(a, b))
    }

    /// Evaluates without dimension or domain checks; callers must guarantee
    /// both points lie in the validity domain.
    pub fn evaluate_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        (self.eval)(a, b)
    }
}

/// `phi((x1, y1, ..), (x2, y2, ..)) = ((x1 - x2)^2)^alpha` on all of
/// 2-space, with `rho(m) = m^(2*alpha - 1)`. Requires `alpha >= 1/2`; below
/// that the relaxed triangle inequality is not guaranteed.
pub fn power_pseudometric(alpha: f64) -> Result<Pseudometric> {
    power_pseudometric_in_dim(alpha, 2)
}

/// The power pseudometric acting on coordinate 1 of d-dimensional states.
pub fn power_pseudometric_in_dim(alpha: f64, dim: usize) -> Result<Pseudometric> {
    let rho = RhoSequence::from_alpha(alpha)?;
    let domain = DomainDescriptor::all(dim)?;
    let eval = move |a: &[f64], b: &[f64]| -> f64 {
        let u = a[0] - b[0];
        if alpha == 1.0 {
            u * u
        } else if alpha == 0.5 {
            u.abs()
        } else {
            (u * u).powf(alpha)
        }
    };
    Ok(Pseudometric::custom(format!("power({alpha})"), rho, domain, eval))
}

/// Radius of the validity ball of [`exp_damped_pseudometric`]: `2 - sqrt(2)`.
pub const EXP_DAMPED_RADIUS: f64 = 2.0 - std::f64::consts::SQRT_2;

/// `phi = (x1 - x2)^2 * e^(1 - |x1 - x2|)` on the closed ball of radius
/// `2 - sqrt(2)` around the origin in 3-space, with `rho(m) = m`.
///
/// The chain inequality with linear `rho` is tied to the curvature of
/// `u^2 e^(1 - |u|)` near the origin, so evaluation outside the ball is
/// rejected.
pub fn exp_damped_pseudometric() -> Pseudometric {
    let domain = DomainDescriptor::ball(vec![0.0, 0.0, 0.0], EXP_DAMPED_RADIUS)
        .expect("static domain is valid");
    Pseudometric::custom("exp_damped", RhoSequence::linear(), domain, |a, b| {
        let u = a[0] - b[0];
        u * u * (1.0 - u.abs()).exp()
    })
}

/// Positive combination `alpha*phi1 + beta*phi2`.
///
/// The result lives on the intersection of the operands' domains and carries
/// the pointwise maximum of their chain constants.
pub fn combine(
    phi1: &Pseudometric,
    phi2: &Pseudometric,
    alpha: f64,
    beta: f64,
) -> Result<Pseudometric> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "combination coefficients must be strictly positive, got {alpha} and {beta}"
        )));
    }
    let domain = phi1.domain().intersect(phi2.domain())?;
    let rho = phi1.rho().max_with(phi2.rho());
    let e1 = Arc::clone(&phi1.eval);
    let e2 = Arc::clone(&phi2.eval);
    let name = format!("{}*{} + {}*{}", alpha, phi1.name(), beta, phi2.name());
    Ok(Pseudometric::custom(name, rho, domain, move |a, b| {
        alpha * e1(a, b) + beta * e2(a, b)
    }))
}

/// The pairing induced by a coupling function and coordinate weights:
///
/// ```text
/// phi(X, Y) = sum_k a_k * (X^k - Y^k) * h^k(X, Y)
/// ```
///
/// This is the quantity that appears in the Lyapunov derivative; whether it
/// is a pseudometric with the claimed `rho` depends on `h` (antisymmetry is
/// necessary for symmetry of `phi`) and is checked by the sampling audits.
pub fn induced_pseudometric(
    h: &CouplingFunction,
    weights: &WeightVector,
    rho: RhoSequence,
    domain: DomainDescriptor,
) -> Result<Pseudometric> {
    let d = h.dim();
    if weights.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "coupling has dimension {d} but weight vector has {}",
            weights.len()
        )));
    }
    if domain.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "coupling has dimension {d} but domain has {}",
            domain.dim()
        )));
    }
    let w = weights.as_slice().to_vec();
    let name = format!("induced({})", h.name());
    let h = h.clone();
    Ok(Pseudometric::custom(name, rho, domain, move |a, b| {
        let mut hv = vec![0.0; d];
        h.eval_into(a, b, &mut hv);
        let mut acc = 0.0;
        for k in 0..d {
            acc += w[k] * (a[k] - b[k]) * hv[k];
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{chua_coupling, chua_weights, fhn_coupling, fhn_weights};

    #[test]
    fn power_one_matches_squared_difference() {
        let phi = power_pseudometric(1.0).unwrap();
        assert_eq!(phi.evaluate(&[1.0, 5.0], &[3.0, 9.0]).unwrap(), 4.0);
        assert_eq!(phi.rho().eval(3), 3.0);
        assert_eq!(phi.evaluate(&[2.0, -1.0], &[2.0, -1.0]).unwrap(), 0.0);
    }

    #[test]
    fn power_half_is_absolute_difference() {
        let phi = power_pseudometric(0.5).unwrap();
        assert_eq!(phi.evaluate(&[0.0, 0.0], &[2.0, 7.0]).unwrap(), 2.0);
        for m in 1..=8 {
            assert_eq!(phi.rho().eval(m), 1.0);
        }
    }

    #[test]
    fn power_below_half_rejected() {
        assert!(power_pseudometric(0.4).is_err());
    }

    #[test]
    fn exp_damped_values_and_domain() {
        let phi = exp_damped_pseudometric();
        let a = [0.25, 0.0, 0.0];
        let b = [-0.25, 0.0, 0.0];
        let got = phi.evaluate(&a, &b).unwrap();
        assert!((got - 0.25 * 0.5_f64.exp()).abs() < 1e-12);
        let c = [0.5, 0.0, 0.0];
        let d = [-0.5, 0.0, 0.0];
        assert!((phi.evaluate(&c, &d).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(phi.evaluate(&a, &a).unwrap(), 0.0);
        // outside the validity ball
        assert!(phi.evaluate(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn combine_takes_max_rho_and_sums() {
        let p1 = power_pseudometric(1.0).unwrap();
        let p2 = power_pseudometric(4.0 / 3.0).unwrap();
        let phi = combine(&p1, &p2, 1.0, 1.0).unwrap();
        for m in 1..=10 {
            let expect = (m as f64).max((m as f64).powf(5.0 / 3.0));
            assert!((phi.rho().eval(m) - expect).abs() <= 1e-12 * expect);
        }
        // doubling a pseudometric keeps its rho
        let twice = combine(&p1, &p1, 1.0, 1.0).unwrap();
        assert_eq!(twice.evaluate(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 2.0);
        assert_eq!(twice.rho().eval(4), 4.0);
        // 2*power(1/2) + 3*power(1) at x-difference 1
        let ph = power_pseudometric(0.5).unwrap();
        let mix = combine(&ph, &p1, 2.0, 3.0).unwrap();
        assert_eq!(mix.evaluate(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert_eq!(mix.rho().eval(7), 7.0);
    }

    #[test]
    fn combine_rejects_nonpositive_coefficients() {
        let p = power_pseudometric(1.0).unwrap();
        assert!(combine(&p, &p, 0.0, 1.0).is_err());
        assert!(combine(&p, &p, 1.0, -2.0).is_err());
    }

    #[test]
    fn induced_fhn_matches_closed_form() {
        let b = 2.0;
        let h = fhn_coupling(1.0, 1.0, b, b).unwrap(); // gamma = b
        let w = fhn_weights(b).unwrap();
        let phi = induced_pseudometric(
            &h,
            &w,
            RhoSequence::power(5.0 / 3.0).unwrap(),
            DomainDescriptor::all(2).unwrap(),
        )
        .unwrap();
        // u = 1, v = 1: alpha*u^2 + beta*|u|^(8/3) + (gamma/b)*v^2 = 3
        let got = phi.evaluate(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!((got - 3.0).abs() < 1e-12);
        assert_eq!(phi.evaluate(&[0.3, -0.7], &[0.3, -0.7]).unwrap(), 0.0);
    }

    #[test]
    fn induced_chua_matches_closed_form() {
        let (a, bpar, delta) = (9.0, 14.0, 0.1);
        let h = chua_coupling(a, delta).unwrap();
        let w = chua_weights(a, bpar).unwrap();
        let phi = induced_pseudometric(
            &h,
            &w,
            RhoSequence::linear(),
            DomainDescriptor::ball(vec![0.0; 3], EXP_DAMPED_RADIUS).unwrap(),
        )
        .unwrap();
        let u: f64 = 0.4;
        let got = phi.evaluate(&[u, 0.1, -0.1], &[0.0, 0.2, 0.3]).unwrap();
        let expect = delta * u * u * (1.0 - u.abs()).exp();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn induced_rejects_dimension_mismatch() {
        let h = chua_coupling(1.0, 1.0).unwrap();
        let w = fhn_weights(1.0).unwrap(); // length 2, coupling dim 3
        assert!(induced_pseudometric(
            &h,
            &w,
            RhoSequence::linear(),
            DomainDescriptor::all(3).unwrap()
        )
        .is_err());
    }
}
