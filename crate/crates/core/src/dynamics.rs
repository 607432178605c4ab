//! Oscillator vector fields, coupling functions, and coordinate weights.
//!
//! The shipped models are the FitzHugh-Nagumo neuron (dimension 2) and the
//! piecewise-linear Chua oscillator (dimension 3), each with its matching
//! coupling function. User-supplied fields and couplings plug in through the
//! `custom` constructors.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Parameters of one FitzHugh-Nagumo node:
/// `F(x, y) = (-x^3 + x - y + a, b*x - c*y - d)` with `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FhnParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Parameters of the Chua oscillator:
/// `F(x, y, z) = (a*[y - x - f(x)], x - y + z, -b*y - c*z)` with the
/// piecewise-linear `f(x) = d*x + (d - e)/2 * (|x + 1| - |x - 1|)`.
/// Requires `a > 0`, `b > 0`, `c > 0`, and `2d < e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChuaParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

type FieldFn = dyn Fn(usize, &[f64], f64, &mut [f64]) + Send + Sync;

#[derive(Clone)]
enum FieldKind {
    Fhn(Vec<FhnParams>),
    Chua(ChuaParams),
    Zero,
    Custom(Arc<FieldFn>),
}

/// Per-node vector field `F_i(X, t)`.
///
/// Heterogeneity is expressed by per-node parameter records on a shared
/// functional form; a single record means every node shares it.
#[derive(Clone)]
pub struct OscillatorModel {
    name: String,
    dim: usize,
    time_dependent: bool,
    kind: FieldKind,
}

impl fmt::Debug for OscillatorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OscillatorModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl OscillatorModel {
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        time_dependent: bool,
        field: impl Fn(usize, &[f64], f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("model dimension must be positive".into()));
        }
        Ok(OscillatorModel {
            name: name.into(),
            dim,
            time_dependent,
            kind: FieldKind::Custom(Arc::new(field)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    /// `Some(k)` when the model carries per-node parameters and therefore
    /// requires exactly `k` nodes; `None` when any node count is accepted.
    pub fn required_nodes(&self) -> Option<usize> {
        match &self.kind {
            FieldKind::Fhn(params) if params.len() > 1 => Some(params.len()),
            _ => None,
        }
    }

    /// Number of distinct parameter records (1 for homogeneous models).
    pub fn node_variants(&self) -> usize {
        match &self.kind {
            FieldKind::Fhn(params) => params.len(),
            _ => 1,
        }
    }

    /// Evaluates `F_node(x, t)` into `out`.
    pub fn eval_into(&self, node: usize, x: &[f64], t: f64, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        match &self.kind {
            FieldKind::Fhn(params) => {
                let p = if params.len() == 1 { &params[0] } else { &params[node] };
                let (x0, y0) = (x[0], x[1]);
                out[0] = -x0 * x0 * x0 + x0 - y0 + p.a;
                out[1] = p.b * x0 - p.c * y0 - p.d;
            }
            FieldKind::Chua(p) => {
                let (x0, y0, z0) = (x[0], x[1], x[2]);
                out[0] = p.a * (y0 - x0 - chua_nonlinearity(x0, p.d, p.e));
                out[1] = x0 - y0 + z0;
                out[2] = -p.b * y0 - p.c * z0;
            }
            FieldKind::Zero => out.fill(0.0),
            FieldKind::Custom(f) => f(node, x, t, out),
        }
    }

    pub fn eval(&self, node: usize, x: &[f64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(node, x, t, &mut out);
        out
    }
}

/// FitzHugh-Nagumo model; one parameter record per node, or a single shared
/// record. Every node must have `b > 0`.
pub fn fhn_field(params: &[FhnParams]) -> Result<OscillatorModel> {
    if params.is_empty() {
        return Err(Error::InvalidParameter("at least one FHN parameter record required".into()));
    }
    for (idx, p) in params.iter().enumerate() {
        if !(p.b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "FHN requires b > 0, node {} has b = {}",
                idx + 1,
                p.b
            )));
        }
    }
    Ok(OscillatorModel {
        name: "fitzhugh_nagumo".into(),
        dim: 2,
        time_dependent: false,
        kind: FieldKind::Fhn(params.to_vec()),
    })
}

/// Chua oscillator with shared parameters.
pub fn chua_field(params: ChuaParams) -> Result<OscillatorModel> {
    if !(params.a > 0.0) {
        return Err(Error::InvalidParameter(format!("Chua requires a > 0, got {}", params.a)));
    }
    if !(params.b > 0.0) {
        return Err(Error::InvalidParameter(format!("Chua requires b > 0, got {}", params.b)));
    }
    if !(params.c > 0.0) {
        return Err(Error::InvalidParameter(format!("Chua requires c > 0, got {}", params.c)));
    }
    if !(2.0 * params.d < params.e) {
        return Err(Error::InvalidParameter(format!(
            "Chua requires 2d < e, got d = {}, e = {}",
            params.d, params.e
        )));
    }
    Ok(OscillatorModel {
        name: "chua".into(),
        dim: 3,
        time_dependent: false,
        kind: FieldKind::Chua(params),
    })
}

/// Identically zero field; useful for consensus-style reference systems.
pub fn zero_field(dim: usize) -> Result<OscillatorModel> {
    if dim == 0 {
        return Err(Error::InvalidParameter("model dimension must be positive".into()));
    }
    Ok(OscillatorModel {
        name: "zero".into(),
        dim,
        time_dependent: false,
        kind: FieldKind::Zero,
    })
}

/// The Chua piecewise-linear characteristic
/// `f(x) = d*x + (d - e)/2 * (|x + 1| - |x - 1|)`.
pub fn chua_nonlinearity(x: f64, d: f64, e: f64) -> f64 {
    d * x + 0.5 * (d - e) * ((x + 1.0).abs() - (x - 1.0).abs())
}

/// A valid upper bound for the secant slopes of the Chua characteristic over
/// `0 < |x - y| <= 1`.
///
/// The characteristic is piecewise linear with segment slopes `d` (outer)
/// and `2d - e` (inner); every secant slope is a convex combination of the
/// two, so `max(0, d, 2d - e)` bounds the whole slope set.
pub fn chua_slope_bound(d: f64, e: f64) -> Result<f64> {
    if !(2.0 * d < e) {
        return Err(Error::InvalidParameter(format!(
            "slope bound requires 2d < e, got d = {d}, e = {e}"
        )));
    }
    Ok(0.0_f64.max(d).max(2.0 * d - e))
}

type CouplingFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
enum CouplingKind {
    Fhn { alpha: f64, beta: f64, gamma: f64 },
    Chua { a: f64, delta: f64 },
    LinearDifference,
    Custom(Arc<CouplingFn>),
}

/// Pairwise coupling `h(X, Y)`; enters the network as
/// `-epsilon * sum_{j adjacent to i} h(X_i, X_j)`.
#[derive(Clone)]
pub struct CouplingFunction {
    name: String,
    dim: usize,
    kind: CouplingKind,
    suggested_weights: Option<Vec<f64>>,
}

impl fmt::Debug for CouplingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CouplingFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl CouplingFunction {
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        h: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("coupling dimension must be positive".into()));
        }
        Ok(CouplingFunction {
            name: name.into(),
            dim,
            kind: CouplingKind::Custom(Arc::new(h)),
            suggested_weights: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinate weights that make the induced pairing of this coupling a
    /// pseudometric, when the construction ships one.
    pub fn suggested_weights(&self) -> Option<&[f64]> {
        self.suggested_weights.as_deref()
    }

    pub fn eval_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        match &self.kind {
            CouplingKind::Fhn { alpha, beta, gamma } => {
                let u = x[0] - y[0];
                let v = x[1] - y[1];
                out[0] = alpha * u + beta * odd_five_thirds(u);
                out[1] = gamma * v;
            }
            CouplingKind::Chua { a, delta } => {
                let u = x[0] - y[0];
                out[0] = a * delta * u * (1.0 - u.abs()).exp();
                out[1] = 0.0;
                out[2] = 0.0;
            }
            CouplingKind::LinearDifference => {
                for k in 0..self.dim {
                    out[k] = x[k] - y[k];
                }
            }
            CouplingKind::Custom(h) => h(x, y, out),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, y, &mut out);
        out
    }
}

/// Odd real extension of the 5/3 power: `sign(u) * |u|^(5/3)`.
fn odd_five_thirds(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * u.abs().powf(5.0 / 3.0)
    }
}

/// FitzHugh-Nagumo coupling
/// `h(X_i, X_j) = (alpha*u + beta*sign(u)*|u|^(5/3), gamma*v)` with
/// `u = x_i - x_j`, `v = y_i - y_j`.
///
/// Requires `alpha >= 1`, `beta >= 0`, `gamma >= 0`, and `b > 0`. `b` is the
/// recovery gain of the paired model; it fixes the suggested weights
/// `(1, 1/b)`. The cross constraint `gamma >= -c` against the model's decay
/// parameter is not knowable here and is left to the dissipativity audit.
pub fn fhn_coupling(alpha: f64, beta: f64, gamma: f64, b: f64) -> Result<CouplingFunction> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "FHN coupling requires alpha >= 1, got {alpha}"
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "FHN coupling requires beta >= 0, got {beta}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "FHN coupling requires gamma >= 0, got {gamma}"
        )));
    }
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("FHN coupling requires b > 0, got {b}")));
    }
    Ok(CouplingFunction {
        name: "fhn_coupling".into(),
        dim: 2,
        kind: CouplingKind::Fhn { alpha, beta, gamma },
        suggested_weights: Some(vec![1.0, 1.0 / b]),
    })
}

/// Chua coupling `h = (a*delta*u*e^(1 - |u|), 0, 0)` with `u = x_i - x_j`.
/// Requires `a > 0` and `delta >= 0`.
pub fn chua_coupling(a: f64, delta: f64) -> Result<CouplingFunction> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("Chua coupling requires a > 0, got {a}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Chua coupling requires delta >= 0, got {delta}"
        )));
    }
    Ok(CouplingFunction {
        name: "chua_coupling".into(),
        dim: 3,
        kind: CouplingKind::Chua { a, delta },
        suggested_weights: None,
    })
}

/// Plain consensus coupling `h(X, Y) = X - Y`.
pub fn linear_difference_coupling(dim: usize) -> Result<CouplingFunction> {
    if dim == 0 {
        return Err(Error::InvalidParameter("coupling dimension must be positive".into()));
    }
    Ok(CouplingFunction {
        name: "linear_difference".into(),
        dim,
        kind: CouplingKind::LinearDifference,
        suggested_weights: Some(vec![1.0; dim]),
    })
}

/// Strictly positive per-coordinate weights `a_1..a_d`.
///
/// Positivity (not mere nonnegativity) keeps the weighted pairing a norm:
/// a zero weight would let distinct states have zero distance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("weight vector is empty".into()));
        }
        for (k, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "weights must be finite and strictly positive, entry {} is {}",
                    k + 1,
                    v
                )));
            }
        }
        Ok(WeightVector(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Weights `(1, 1/b)` pairing the FHN coupling with its induced pseudometric.
pub fn fhn_weights(b: f64) -> Result<WeightVector> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("FHN weights require b > 0, got {b}")));
    }
    WeightVector::new(vec![1.0, 1.0 / b])
}

/// Weights `(1/a, 1, 1/b)` pairing the Chua coupling with its induced
/// pseudometric.
pub fn chua_weights(a: f64, b: f64) -> Result<WeightVector> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Chua weights require a > 0 and b > 0, got a = {a}, b = {b}"
        )));
    }
    WeightVector::new(vec![1.0 / a, 1.0, 1.0 / b])
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0: FhnParams = FhnParams { a: 0.0, b: 1.0, c: 0.0, d: 0.0 };

    #[test]
    fn fhn_field_values() {
        let model = fhn_field(&[P0]).unwrap();
        assert_eq!(model.eval(0, &[0.0, 0.0], 0.0), vec![0.0, 0.0]);
        assert_eq!(model.eval(0, &[1.0, 0.0], 0.0), vec![0.0, 1.0]);
        let model = fhn_field(&[FhnParams { a: 1.0, b: 2.0, c: 3.0, d: 4.0 }]).unwrap();
        assert_eq!(model.eval(0, &[2.0, 1.0], 0.0), vec![-6.0, -3.0]);
    }

    #[test]
    fn fhn_requires_positive_b() {
        assert!(fhn_field(&[FhnParams { a: 0.0, b: 0.0, c: 0.0, d: 0.0 }]).is_err());
        assert!(fhn_field(&[P0, FhnParams { a: 0.0, b: -1.0, c: 0.0, d: 0.0 }]).is_err());
    }

    #[test]
    fn chua_field_values() {
        let p = ChuaParams { a: 2.0, b: 1.0, c: 1.0, d: 0.1, e: 0.5 };
        let model = chua_field(p).unwrap();
        assert_eq!(model.eval(0, &[0.0, 0.0, 0.0], 0.0), vec![0.0, 0.0, 0.0]);
        assert_eq!(model.eval(0, &[0.0, 1.0, 0.0], 0.0), vec![2.0, -1.0, -1.0]);
    }

    #[test]
    fn chua_nonlinearity_piecewise() {
        // inner segment slope 2d - e, outer segment slope d
        let f1 = chua_nonlinearity(1.0, 0.1, 0.5);
        assert!((f1 - (-0.3)).abs() < 1e-15);
        assert_eq!(chua_nonlinearity(0.0, 0.1, 0.5), 0.0);
    }

    #[test]
    fn chua_constraints_enforced() {
        let ok = ChuaParams { a: 9.0, b: 14.0, c: 0.5, d: 0.1, e: 0.5 };
        assert!(chua_field(ok).is_ok());
        assert!(chua_field(ChuaParams { a: -1.0, ..ok }).is_err());
        assert!(chua_field(ChuaParams { d: 1.0, e: 1.0, ..ok }).is_err());
    }

    #[test]
    fn slope_bound_values() {
        assert_eq!(chua_slope_bound(0.1, 0.5).unwrap(), 0.1);
        assert_eq!(chua_slope_bound(-0.5, 0.0).unwrap(), 0.0);
        assert_eq!(chua_slope_bound(1.0, 3.0).unwrap(), 1.0);
        assert!(chua_slope_bound(1.0, 1.0).is_err());
    }

    #[test]
    fn fhn_coupling_values() {
        let h = fhn_coupling(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(h.eval(&[1.0, 0.0], &[0.0, 0.0]), vec![2.0, 0.0]);
        assert_eq!(h.eval(&[0.5, 1.0], &[0.5, 1.0]), vec![0.0, 0.0]);
        let h = fhn_coupling(1.0, 1.0, 3.0, 1.0).unwrap();
        let out = h.eval(&[-1.0, 2.0], &[0.0, 0.0]);
        assert!((out[0] - (-2.0)).abs() < 1e-15);
        assert!((out[1] - 6.0).abs() < 1e-15);
    }

    #[test]
    fn fhn_coupling_constraints() {
        assert!(fhn_coupling(0.5, 0.0, 0.0, 1.0).is_err());
        assert!(fhn_coupling(1.0, -0.1, 0.0, 1.0).is_err());
        assert!(fhn_coupling(1.0, 0.0, -0.1, 1.0).is_err());
        assert!(fhn_coupling(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn chua_coupling_values() {
        let h = chua_coupling(1.0, 1.0).unwrap();
        assert_eq!(h.eval(&[0.0; 3], &[0.0; 3]), vec![0.0, 0.0, 0.0]);
        assert_eq!(h.eval(&[1.0, 0.0, 0.0], &[0.0; 3]), vec![1.0, 0.0, 0.0]);
        let h = chua_coupling(2.0, 0.5).unwrap();
        let out = h.eval(&[-0.5, 0.0, 0.0], &[0.0; 3]);
        assert!((out[0] - (2.0 * 0.5 * (-0.5) * 0.5_f64.exp())).abs() < 1e-12);
    }

    #[test]
    fn weights_must_be_strictly_positive() {
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![1.0, 0.5]).is_ok());
        assert_eq!(fhn_weights(2.0).unwrap().as_slice(), &[1.0, 0.5]);
        assert_eq!(chua_weights(2.0, 4.0).unwrap().as_slice(), &[0.5, 1.0, 0.25]);
    }

    #[test]
    fn heterogeneous_fhn_requires_matching_node_count() {
        let model = fhn_field(&[P0, FhnParams { a: 0.5, ..P0 }]).unwrap();
        assert_eq!(model.required_nodes(), Some(2));
        assert_eq!(fhn_field(&[P0]).unwrap().required_nodes(), None);
    }
}
