//! Sufficient coupling thresholds and sampling audits of the hypotheses
//! behind them.
//!
//! The synchronization guarantee rests on four hypotheses: the weighted
//! pairing of the coupling is a pseudometric with its claimed chain
//! constants, the weighted field-difference form is dominated by that
//! pseudometric (dissipativity), joint vanishing of both forms separates
//! states, and the coupling is antisymmetric. A growth envelope on `X . F`
//! supports global existence of trajectories.
//!
//! Every audit here *falsifies* rather than proves: it draws a deterministic
//! seeded sample from a configured region and searches for a concrete
//! counterexample. A pass means no witness was found in the sample, nothing
//! stronger — in particular, passing on a bounded region says nothing about
//! the hypothesis outside it.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{DomainDescriptor, DomainSampler};
use crate::dynamics::{CouplingFunction, OscillatorModel, WeightVector};
use crate::error::{Error, Result};
use crate::pseudometric::Pseudometric;

/// Sufficient coupling strength `c / (2n)` for a valid pair-sum/edge-sum
/// constant `c`; strengths strictly above it synchronize the network when
/// the hypotheses hold. Sufficient, not necessary.
pub fn epsilon_star(c: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs at least two nodes, got {n}"
        )));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound constant must be nonnegative, got {c}"
        )));
    }
    Ok(c / (2.0 * n as f64))
}

/// Closed-form threshold `(n-1) * diam^(8/3) / 4` for FitzHugh-Nagumo
/// networks on any connected graph; equals `epsilon_star` applied to the
/// generic bound with `rho(m) = m^(5/3)`.
pub fn fhn_generic_threshold(n: usize, diam: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs at least two nodes, got {n}"
        )));
    }
    if diam < 1 {
        return Err(Error::InvalidParameter("diameter must be at least 1".into()));
    }
    Ok((n as f64 - 1.0) * (diam as f64).powf(8.0 / 3.0) / 4.0)
}

/// Closed-form threshold `(2n-3) / (2n)` for star networks with a coupling
/// whose induced pseudometric has linear chain constants.
pub fn chua_star_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs at least two nodes, got {n}"
        )));
    }
    Ok((2.0 * n as f64 - 3.0) / (2.0 * n as f64))
}

/// Which hypothesis an audit checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    PseudometricAxioms,
    Dissipativity,
    Separation,
    Antisymmetry,
    WintnerGrowth,
}

impl Hypothesis {
    pub fn label(&self) -> &'static str {
        match self {
            Hypothesis::PseudometricAxioms => "pseudometric-axioms",
            Hypothesis::Dissipativity => "dissipativity",
            Hypothesis::Separation => "separation",
            Hypothesis::Antisymmetry => "antisymmetry",
            Hypothesis::WintnerGrowth => "wintner-growth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Vacuous => "vacuous",
        }
    }
}

/// A concrete counterexample: the sampled inputs and the two sides of the
/// violated inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub sample: u64,
    pub inputs: Vec<Vec<f64>>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

const WITNESS_CAP: usize = 8;

/// Outcome of one audit. Deterministic given `(seed, count)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub hypothesis: Hypothesis,
    pub samples: usize,
    pub seed: u64,
    pub violation_count: usize,
    /// First few witnesses in sample order (capped); `violation_count` holds
    /// the full tally.
    pub violations: Vec<Witness>,
    pub verdict: Verdict,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Witness with the largest gap among the retained ones.
    pub fn worst(&self) -> Option<&Witness> {
        self.violations
            .iter()
            .max_by(|a, b| a.gap.partial_cmp(&b.gap).expect("gaps are finite"))
    }

    /// Structured text block: verdict, samples, worst witness.
    pub fn to_text_block(&self) -> String {
        let mut out = String::new();
        writeln!(out, "hypothesis: {}", self.hypothesis.label()).unwrap();
        writeln!(out, "verdict: {}", self.verdict.label()).unwrap();
        writeln!(out, "samples: {}", self.samples).unwrap();
        writeln!(out, "seed: {}", self.seed).unwrap();
        writeln!(out, "violations: {}", self.violation_count).unwrap();
        if let Some(w) = self.worst() {
            writeln!(out, "worst_witness:").unwrap();
            writeln!(out, "  sample: {}", w.sample).unwrap();
            writeln!(out, "  lhs: {:.16e}", w.lhs).unwrap();
            writeln!(out, "  rhs: {:.16e}", w.rhs).unwrap();
            writeln!(out, "  gap: {:.16e}", w.gap).unwrap();
            for (idx, input) in w.inputs.iter().enumerate() {
                let coords: Vec<String> = input.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(out, "  input_{}: [{}]", idx + 1, coords.join(", ")).unwrap();
            }
        }
        out
    }

    fn from_outcomes(
        hypothesis: Hypothesis,
        samples: usize,
        seed: u64,
        outcomes: Vec<Option<Witness>>,
    ) -> Self {
        let mut violations = Vec::new();
        let mut violation_count = 0;
        for w in outcomes.into_iter().flatten() {
            violation_count += 1;
            if violations.len() < WITNESS_CAP {
                violations.push(w);
            }
        }
        let verdict = if samples == 0 {
            Verdict::Vacuous
        } else if violation_count == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        AuditReport { hypothesis, samples, seed, violation_count, violations, verdict }
    }
}

/// Shared audit configuration.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Number of samples to draw.
    pub count: usize,
    /// Base seed; sample `i` uses a deterministic stream derived from
    /// `(seed, i)`.
    pub seed: u64,
    /// Bounded sampling region. Audits that evaluate a pseudometric require
    /// it to be contained in the pseudometric's domain.
    pub region: DomainDescriptor,
    /// Sampling interval for the time argument of time-dependent fields.
    pub time_interval: (f64, f64),
    /// Longest chain checked against the claimed chain constants.
    pub chain_max: usize,
    /// Threshold below which a quantity counts as zero (separation audit).
    pub zero_tolerance: f64,
    /// Minimum coordinate-wise state difference for a separation witness.
    pub distinct_tolerance: f64,
    /// Maximum tolerated antisymmetry residual.
    pub antisymmetry_tolerance: f64,
}

impl AuditConfig {
    pub fn new(region: DomainDescriptor, seed: u64, count: usize) -> Self {
        AuditConfig {
            count,
            seed,
            region,
            time_interval: (0.0, 100.0),
            chain_max: 4,
            zero_tolerance: 1e-9,
            distinct_tolerance: 1e-6,
            antisymmetry_tolerance: 1e-12,
        }
    }
}

fn rel_slack(lhs: f64, rhs: f64) -> f64 {
    1e-12 * lhs.abs().max(rhs.abs()).max(1.0)
}

fn sampler_for(cfg: &AuditConfig) -> Result<DomainSampler> {
    DomainSampler::new(cfg.region.clone(), cfg.seed)
}

fn require_phi_compatible(sampler: &DomainSampler, phi: &Pseudometric) -> Result<()> {
    if !sampler.compatible_with(phi.domain()) {
        return Err(Error::IncompatibleSampler(format!(
            "audit region {:?} is not contained in the domain of '{}'",
            sampler.region(),
            phi.name()
        )));
    }
    Ok(())
}

fn draw_time(rng: &mut ChaCha8Rng, cfg: &AuditConfig) -> f64 {
    let (t0, t1) = cfg.time_interval;
    if t1 > t0 {
        rng.random_range(t0..=t1)
    } else {
        t0
    }
}

/// Weighted field-difference form
/// `sum_k a_k (X^k - Y^k) (F_i^k(X, t) - F_j^k(Y, t))`.
fn field_difference_form(
    model: &OscillatorModel,
    weights: &WeightVector,
    node_i: usize,
    node_j: usize,
    x: &[f64],
    y: &[f64],
    t: f64,
) -> f64 {
    let d = model.dim();
    let mut fx = vec![0.0; d];
    let mut fy = vec![0.0; d];
    model.eval_into(node_i, x, t, &mut fx);
    model.eval_into(node_j, y, t, &mut fy);
    let w = weights.as_slice();
    let mut acc = 0.0;
    for k in 0..d {
        acc += w[k] * (x[k] - y[k]) * (fx[k] - fy[k]);
    }
    acc
}

/// Checks the pseudometric axioms — vanishing on the diagonal, symmetry,
/// nonnegativity — plus the chain inequality for chain lengths
/// `2..=chain_max` with the claimed constants.
pub fn audit_pseudometric(phi: &Pseudometric, cfg: &AuditConfig) -> Result<AuditReport> {
    let sampler = sampler_for(cfg)?;
    require_phi_compatible(&sampler, phi)?;
    let chain_max = cfg.chain_max.max(2);
    let outcomes: Vec<Option<Witness>> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = sampler.rng_for(sample);
            let chain: Vec<Vec<f64>> =
                (0..=chain_max).map(|_| sampler.draw(&mut rng)).collect();
            let z1 = &chain[0];
            let z2 = &chain[1];

            let self_distance = phi.evaluate_unchecked(z1, z1);
            if self_distance.abs() > 1e-12 {
                return Some(Witness {
                    sample,
                    inputs: vec![z1.clone()],
                    lhs: self_distance,
                    rhs: 0.0,
                    gap: self_distance.abs(),
                });
            }
            let forward = phi.evaluate_unchecked(z1, z2);
            let backward = phi.evaluate_unchecked(z2, z1);
            if (forward - backward).abs() > rel_slack(forward, backward) {
                return Some(Witness {
                    sample,
                    inputs: vec![z1.clone(), z2.clone()],
                    lhs: forward,
                    rhs: backward,
                    gap: (forward - backward).abs(),
                });
            }
            if forward < -1e-12 {
                return Some(Witness {
                    sample,
                    inputs: vec![z1.clone(), z2.clone()],
                    lhs: forward,
                    rhs: 0.0,
                    gap: -forward,
                });
            }
            for m in 2..=chain_max {
                let lhs = phi.evaluate_unchecked(&chain[0], &chain[m]);
                let hops: f64 = (0..m)
                    .map(|l| phi.evaluate_unchecked(&chain[l], &chain[l + 1]))
                    .sum();
                let rhs = phi.rho().eval(m) * hops;
                if lhs > rhs + rel_slack(lhs, rhs) {
                    return Some(Witness {
                        sample,
                        inputs: chain[..=m].to_vec(),
                        lhs,
                        rhs,
                        gap: lhs - rhs,
                    });
                }
            }
            None
        })
        .collect();
    Ok(AuditReport::from_outcomes(
        Hypothesis::PseudometricAxioms,
        cfg.count,
        cfg.seed,
        outcomes,
    ))
}

/// Checks that the weighted field-difference form is dominated by the
/// pseudometric on sampled state pairs (and node pairs, for heterogeneous
/// models).
pub fn audit_dissipativity(
    model: &OscillatorModel,
    phi: &Pseudometric,
    weights: &WeightVector,
    cfg: &AuditConfig,
) -> Result<AuditReport> {
    let sampler = sampler_for(cfg)?;
    require_phi_compatible(&sampler, phi)?;
    check_model_dims(model, weights, &cfg.region)?;
    let variants = model.node_variants();
    let outcomes: Vec<Option<Witness>> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = sampler.rng_for(sample);
            let x = sampler.draw(&mut rng);
            let y = sampler.draw(&mut rng);
            let node_i = rng.random_range(0..variants);
            let node_j = rng.random_range(0..variants);
            let t = draw_time(&mut rng, cfg);
            let lhs = field_difference_form(model, weights, node_i, node_j, &x, &y, t);
            let rhs = phi.evaluate_unchecked(&x, &y);
            if lhs > rhs + rel_slack(lhs, rhs) {
                Some(Witness { sample, inputs: vec![x, y], lhs, rhs, gap: lhs - rhs })
            } else {
                None
            }
        })
        .collect();
    Ok(AuditReport::from_outcomes(
        Hypothesis::Dissipativity,
        cfg.count,
        cfg.seed,
        outcomes,
    ))
}

/// Searches for state pairs where the pseudometric and the field-difference
/// form both vanish while the states differ: such a pair refutes the
/// separation hypothesis. Falsification-only; the implication itself cannot
/// be proven by sampling.
///
/// Besides fully random pairs, half of the samples copy a random strict
/// subset of coordinates from the first state into the second, which finds
/// degenerate coordinate directions that random pairs almost surely miss.
/// A candidate pair is confirmed by stretching its difference vector to
/// macroscopic scale inside the region and re-testing there: a genuine
/// degenerate direction stays at zero under stretching, while a pair that
/// merely sits close to the diagonal (both quantities small by continuity,
/// not identically zero) blows past the tolerance and is discarded.
/// Reported witnesses therefore have macroscopic state differences.
pub fn audit_separation(
    model: &OscillatorModel,
    phi: &Pseudometric,
    weights: &WeightVector,
    cfg: &AuditConfig,
) -> Result<AuditReport> {
    let sampler = sampler_for(cfg)?;
    require_phi_compatible(&sampler, phi)?;
    check_model_dims(model, weights, &cfg.region)?;
    let d = model.dim();
    let variants = model.node_variants();
    // A witness must separate states at a scale comparable to the region,
    // not merely past the distinctness floor.
    let macro_spread = {
        let (lo, hi) = cfg.region.bounding_box().expect("audit region is bounded");
        let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0_f64, f64::max);
        (0.05 * extent).max(100.0 * cfg.distinct_tolerance)
    };
    let outcomes: Vec<Option<Witness>> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = sampler.rng_for(sample);
            let x = sampler.draw(&mut rng);
            let mut y = sampler.draw(&mut rng);
            let hybridize = d >= 2 && rng.random_bool(0.5);
            if hybridize {
                let mask: usize = rng.random_range(1..((1usize << d) - 1));
                let mut candidate = y.clone();
                for k in 0..d {
                    if mask & (1 << k) != 0 {
                        candidate[k] = x[k];
                    }
                }
                if cfg.region.contains(&candidate) {
                    y = candidate;
                }
            }
            let node_i = rng.random_range(0..variants);
            let node_j = rng.random_range(0..variants);
            let t = draw_time(&mut rng, cfg);

            let qualifies = |other: &[f64]| -> Option<(f64, f64, f64)> {
                let phi_value = phi.evaluate_unchecked(&x, other);
                let form = field_difference_form(model, weights, node_i, node_j, &x, other, t);
                let spread = x
                    .iter()
                    .zip(other)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                (phi_value.abs() <= cfg.zero_tolerance
                    && form.abs() <= cfg.zero_tolerance
                    && spread > cfg.distinct_tolerance)
                    .then_some((phi_value, form, spread))
            };

            let (_, _, spread) = qualifies(&y)?;
            let stretched = if spread >= macro_spread {
                Some(y.clone())
            } else {
                stretch_to_macro(&x, &y, &cfg.region, macro_spread, spread)
            };
            let witness_state = stretched?;
            qualifies(&witness_state).map(|(phi_value, form, spread)| Witness {
                sample,
                inputs: vec![x.clone(), witness_state.clone()],
                lhs: phi_value,
                rhs: form,
                gap: spread,
            })
        })
        .collect();
    Ok(AuditReport::from_outcomes(
        Hypothesis::Separation,
        cfg.count,
        cfg.seed,
        outcomes,
    ))
}

/// Scales the difference `y - x` by powers of two (either orientation) until
/// the pair separates at `macro_spread` while staying in the region. Returns
/// `None` when no contained stretch reaches that scale.
fn stretch_to_macro(
    x: &[f64],
    y: &[f64],
    region: &DomainDescriptor,
    macro_spread: f64,
    base_spread: f64,
) -> Option<Vec<f64>> {
    if base_spread <= 0.0 {
        return None;
    }
    for sign in [1.0, -1.0] {
        let mut scale: f64 = 1.0;
        for _ in 0..60 {
            scale *= 2.0;
            let candidate: Vec<f64> = x
                .iter()
                .zip(y)
                .map(|(a, b)| a + sign * scale * (b - a))
                .collect();
            if !region.contains(&candidate) {
                break;
            }
            if scale * base_spread >= macro_spread {
                return Some(candidate);
            }
        }
    }
    None
}

/// Checks `h(X, Y) + h(Y, X) = 0` on sampled pairs, within the configured
/// residual tolerance.
pub fn audit_antisymmetry(h: &CouplingFunction, cfg: &AuditConfig) -> Result<AuditReport> {
    let sampler = sampler_for(cfg)?;
    if cfg.region.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "audit region has dimension {}, coupling has {}",
            cfg.region.dim(),
            h.dim()
        )));
    }
    let d = h.dim();
    let outcomes: Vec<Option<Witness>> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = sampler.rng_for(sample);
            let x = sampler.draw(&mut rng);
            let y = sampler.draw(&mut rng);
            let mut forward = vec![0.0; d];
            let mut backward = vec![0.0; d];
            h.eval_into(&x, &y, &mut forward);
            h.eval_into(&y, &x, &mut backward);
            let residual = forward
                .iter()
                .zip(&backward)
                .map(|(a, b)| (a + b).abs())
                .fold(0.0_f64, f64::max);
            if residual > cfg.antisymmetry_tolerance {
                Some(Witness {
                    sample,
                    inputs: vec![x, y],
                    lhs: residual,
                    rhs: cfg.antisymmetry_tolerance,
                    gap: residual - cfg.antisymmetry_tolerance,
                })
            } else {
                None
            }
        })
        .collect();
    Ok(AuditReport::from_outcomes(
        Hypothesis::Antisymmetry,
        cfg.count,
        cfg.seed,
        outcomes,
    ))
}

type EnvelopeFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Growth envelope `Psi` for the existence check `X . F(X, t) <= Psi(|X|)`.
///
/// Global existence additionally needs `Psi > 0` beyond some radius and a
/// divergent integral of `1/Psi`; the affine form satisfies both
/// automatically, custom envelopes must assert it.
#[derive(Clone)]
pub enum GrowthEnvelope {
    /// `Psi(s) = offset + slope * s` with nonnegative coefficients, not both
    /// zero.
    Affine { offset: f64, slope: f64 },
    /// Caller-supplied envelope; `divergence_declared` asserts the integral
    /// condition, which is not checked symbolically.
    Custom { name: String, psi: Arc<EnvelopeFn>, divergence_declared: bool },
}

impl std::fmt::Debug for GrowthEnvelope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthEnvelope::Affine { offset, slope } => f
                .debug_struct("Affine")
                .field("offset", offset)
                .field("slope", slope)
                .finish(),
            GrowthEnvelope::Custom { name, .. } => {
                f.debug_struct("Custom").field("name", name).finish()
            }
        }
    }
}

impl GrowthEnvelope {
    pub fn affine(offset: f64, slope: f64) -> Result<Self> {
        if !(offset >= 0.0 && slope >= 0.0 && offset + slope > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "affine envelope needs offset >= 0, slope >= 0, not both zero; got {offset}, {slope}"
            )));
        }
        Ok(GrowthEnvelope::Affine { offset, slope })
    }

    pub fn evaluate(&self, s: f64) -> f64 {
        match self {
            GrowthEnvelope::Affine { offset, slope } => offset + slope * s,
            GrowthEnvelope::Custom { psi, .. } => psi(s),
        }
    }

    fn divergence_ok(&self) -> bool {
        match self {
            GrowthEnvelope::Affine { .. } => true,
            GrowthEnvelope::Custom { divergence_declared, .. } => *divergence_declared,
        }
    }
}

/// Checks `X . F_i(X, t) <= Psi(|X|)` on sampled states for every node
/// variant. A pass supports (does not prove) global existence of
/// trajectories through the standard growth-condition argument.
pub fn audit_wintner(
    model: &OscillatorModel,
    envelope: &GrowthEnvelope,
    cfg: &AuditConfig,
) -> Result<AuditReport> {
    if !envelope.divergence_ok() {
        return Err(Error::InvalidParameter(
            "custom growth envelope must declare the divergence condition".into(),
        ));
    }
    if cfg.region.dim() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "audit region has dimension {}, model has {}",
            cfg.region.dim(),
            model.dim()
        )));
    }
    let sampler = sampler_for(cfg)?;
    let d = model.dim();
    let variants = model.node_variants();
    let outcomes: Vec<Option<Witness>> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = sampler.rng_for(sample);
            let x = sampler.draw(&mut rng);
            let node = rng.random_range(0..variants);
            let t = draw_time(&mut rng, cfg);
            let mut fx = vec![0.0; d];
            model.eval_into(node, &x, t, &mut fx);
            let lhs: f64 = x.iter().zip(&fx).map(|(a, b)| a * b).sum();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let rhs = envelope.evaluate(norm);
            if lhs > rhs + rel_slack(lhs, rhs) {
                Some(Witness { sample, inputs: vec![x], lhs, rhs, gap: lhs - rhs })
            } else {
                None
            }
        })
        .collect();
    Ok(AuditReport::from_outcomes(
        Hypothesis::WintnerGrowth,
        cfg.count,
        cfg.seed,
        outcomes,
    ))
}

/// Fits an affine envelope to a model on a region: fixes the slope and sets
/// the offset to the sampled supremum of `X . F - slope * |X|` plus a
/// proportional margin. The sampled supremum is a lower estimate of the true
/// one, so the margin matters; audit with a different seed than the fit.
pub fn fit_affine_envelope(
    model: &OscillatorModel,
    region: &DomainDescriptor,
    slope: f64,
    seed: u64,
    count: usize,
) -> Result<GrowthEnvelope> {
    if !(slope >= 0.0) {
        return Err(Error::InvalidParameter(format!("slope must be nonnegative, got {slope}")));
    }
    let sampler = DomainSampler::new(region.clone(), seed)?;
    let d = model.dim();
    let variants = model.node_variants();
    let sup = (0..count as u64)
        .into_par_iter()
        .map(|sample| {
            let mut rng = sampler.rng_for(sample);
            let x = sampler.draw(&mut rng);
            let node = rng.random_range(0..variants);
            let mut fx = vec![0.0; d];
            model.eval_into(node, &x, 0.0, &mut fx);
            let dot: f64 = x.iter().zip(&fx).map(|(a, b)| a * b).sum();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            dot - slope * norm
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let offset = (sup.max(0.0) * 1.25 + 0.1).max(0.1);
    GrowthEnvelope::affine(offset, slope)
}

fn check_model_dims(
    model: &OscillatorModel,
    weights: &WeightVector,
    region: &DomainDescriptor,
) -> Result<()> {
    if model.dim() != weights.len() || model.dim() != region.dim() {
        return Err(Error::DimensionMismatch(format!(
            "model dimension {}, weights {}, audit region {}",
            model.dim(),
            weights.len(),
            region.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        fhn_coupling, fhn_field, fhn_weights, linear_difference_coupling, zero_field, FhnParams,
    };
    use crate::pseudometric::{exp_damped_pseudometric, power_pseudometric};
    use crate::rho::RhoSequence;

    #[test]
    fn threshold_values() {
        assert_eq!(epsilon_star(7.0, 5).unwrap(), 0.7);
        assert_eq!(epsilon_star(0.0, 4).unwrap(), 0.0);
        assert_eq!(epsilon_star(6.0, 4).unwrap(), 0.75);
        assert!(epsilon_star(1.0, 1).is_err());
        assert!(epsilon_star(-1.0, 3).is_err());
    }

    #[test]
    fn fhn_threshold_values() {
        assert_eq!(fhn_generic_threshold(4, 1).unwrap(), 0.75);
        assert_eq!(fhn_generic_threshold(2, 1).unwrap(), 0.25);
        let v = fhn_generic_threshold(5, 2).unwrap();
        assert!((v - 2.0_f64.powf(8.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn chua_star_threshold_values() {
        assert_eq!(chua_star_threshold(3).unwrap(), 0.5);
        assert_eq!(chua_star_threshold(5).unwrap(), 0.7);
        assert_eq!(chua_star_threshold(10).unwrap(), 0.85);
    }

    fn box_cfg(dim: usize, half: f64, seed: u64, count: usize) -> AuditConfig {
        AuditConfig::new(DomainDescriptor::centered_box(dim, half).unwrap(), seed, count)
    }

    #[test]
    fn pseudometric_audit_passes_for_builtins() {
        let cfg = box_cfg(2, 5.0, 41, 5_000);
        assert!(audit_pseudometric(&power_pseudometric(1.0).unwrap(), &cfg)
            .unwrap()
            .passed());
        let ball = exp_damped_pseudometric();
        let cfg = AuditConfig::new(ball.domain().clone(), 41, 5_000);
        assert!(audit_pseudometric(&ball, &cfg).unwrap().passed());
    }

    #[test]
    fn pseudometric_audit_catches_wrong_rho() {
        let phi = power_pseudometric(1.0)
            .unwrap()
            .with_claimed_rho(RhoSequence::constant_one());
        let cfg = box_cfg(2, 5.0, 17, 10_000);
        let report = audit_pseudometric(&phi, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.violation_count > 0);
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn audits_are_deterministic() {
        let phi = power_pseudometric(1.0).unwrap();
        let cfg = box_cfg(2, 5.0, 99, 2_000);
        let a = audit_pseudometric(&phi, &cfg).unwrap();
        let b = audit_pseudometric(&phi, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dissipativity_negative_control_fails() {
        // gamma = 0 with c = -1 breaks domination: the recovery term is
        // positive and unmatched.
        let model = fhn_field(&[FhnParams { a: 0.0, b: 1.0, c: -1.0, d: 0.0 }]).unwrap();
        let h = fhn_coupling(1.0, 1.0, 0.0, 1.0).unwrap();
        let w = fhn_weights(1.0).unwrap();
        let phi = crate::pseudometric::induced_pseudometric(
            &h,
            &w,
            RhoSequence::power(5.0 / 3.0).unwrap(),
            DomainDescriptor::all(2).unwrap(),
        )
        .unwrap();
        let cfg = box_cfg(2, 5.0, 3, 10_000);
        let report = audit_dissipativity(&model, &phi, &w, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn separation_negative_control_fails() {
        // A zero field with a pseudometric that ignores coordinate 2 leaves
        // a whole line of indistinguishable unequal states.
        let model = zero_field(2).unwrap();
        let phi = power_pseudometric(1.0).unwrap();
        let w = crate::dynamics::WeightVector::new(vec![1.0, 1.0]).unwrap();
        let cfg = box_cfg(2, 1.0, 5, 5_000);
        let report = audit_separation(&model, &phi, &w, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let w0 = &report.violations[0];
        assert!((w0.inputs[0][1] - w0.inputs[1][1]).abs() > 1e-6);
    }

    #[test]
    fn antisymmetry_negative_control_fails() {
        let bad = CouplingFunction::custom("identity-of-first", 2, |x, _y, out| {
            out.copy_from_slice(x);
        })
        .unwrap();
        let cfg = box_cfg(2, 2.0, 8, 1_000);
        let report = audit_antisymmetry(&bad, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let good = linear_difference_coupling(2).unwrap();
        assert!(audit_antisymmetry(&good, &cfg).unwrap().passed());
    }

    #[test]
    fn wintner_trivial_and_negative_control() {
        // F(x) = -x: x * F = -x^2 <= 1.
        let decay = OscillatorModel::custom("decay", 1, false, |_, x, _, out| {
            out[0] = -x[0];
        })
        .unwrap();
        let cfg = box_cfg(1, 20.0, 2, 5_000);
        let env = GrowthEnvelope::affine(1.0, 0.0).unwrap();
        assert!(audit_wintner(&decay, &env, &cfg).unwrap().passed());

        // F(x) = x^3 outgrows every affine envelope once |x| is large.
        let cubic = OscillatorModel::custom("cubic", 1, false, |_, x, _, out| {
            out[0] = x[0] * x[0] * x[0];
        })
        .unwrap();
        let env = GrowthEnvelope::affine(10.0, 1.0).unwrap();
        let report = audit_wintner(&cubic, &env, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn fitted_envelope_passes_fhn() {
        let model = fhn_field(&[FhnParams { a: 0.0, b: 5.0, c: 0.5, d: 0.0 }]).unwrap();
        let region = DomainDescriptor::centered_box(2, 5.0).unwrap();
        let env = fit_affine_envelope(&model, &region, 1.0, 1234, 50_000).unwrap();
        let cfg = AuditConfig::new(region, 4321, 50_000);
        assert!(audit_wintner(&model, &env, &cfg).unwrap().passed());
    }

    #[test]
    fn vacuous_report_for_zero_samples() {
        let phi = power_pseudometric(1.0).unwrap();
        let cfg = box_cfg(2, 1.0, 1, 0);
        let report = audit_pseudometric(&phi, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Vacuous);
    }

    #[test]
    fn text_block_contains_verdict() {
        let phi = power_pseudometric(1.0).unwrap();
        let cfg = box_cfg(2, 1.0, 1, 100);
        let block = audit_pseudometric(&phi, &cfg).unwrap().to_text_block();
        assert!(block.contains("hypothesis: pseudometric-axioms"));
        assert!(block.contains("verdict: pass"));
    }
}
