//! State-space domains and seeded uniform samplers.
//!
//! A `DomainDescriptor` names the region where a pseudometric (or an audited
//! inequality) is valid: all of d-space, an axis-aligned box, a closed ball,
//! or an intersection of those. Samplers draw uniformly from a bounded
//! region with a deterministic per-index stream derivation, so every audit
//! and verification is reproducible from `(seed, index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Region of d-dimensional state space.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainDescriptor {
    /// All of d-space.
    All { dim: usize },
    /// Axis-aligned box, `lower[k] <= x[k] <= upper[k]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Intersection of primitive regions of equal dimension.
    Intersection { members: Vec<DomainDescriptor> },
}

impl DomainDescriptor {
    pub fn all(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be positive".into()));
        }
        Ok(DomainDescriptor::All { dim })
    }

    pub fn bounded_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidDomain(
                "box bounds must be nonempty and of equal length".into(),
            ));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidDomain(format!(
                    "box requires finite lower < upper per coordinate, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(DomainDescriptor::Box { lower, upper })
    }

    /// Symmetric box `[-half, half]^dim`.
    pub fn centered_box(dim: usize, half_width: f64) -> Result<Self> {
        Self::bounded_box(vec![-half_width; dim.max(1)], vec![half_width; dim.max(1)])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidDomain("ball center must be nonempty".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "ball radius must be finite and positive, got {radius}"
            )));
        }
        Ok(DomainDescriptor::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainDescriptor::All { dim } => *dim,
            DomainDescriptor::Box { lower, .. } => lower.len(),
            DomainDescriptor::Ball { center, .. } => center.len(),
            DomainDescriptor::Intersection { members } => {
                members.first().map_or(0, DomainDescriptor::dim)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            DomainDescriptor::All { .. } => true,
            DomainDescriptor::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi),
            DomainDescriptor::Ball { center, radius } => {
                let d2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(v, c)| (v - c) * (v - c))
                    .sum();
                d2 <= radius * radius * (1.0 + 1e-12)
            }
            DomainDescriptor::Intersection { members } => {
                members.iter().all(|m| m.contains(x))
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            DomainDescriptor::All { .. } => false,
            DomainDescriptor::Box { .. } | DomainDescriptor::Ball { .. } => true,
            DomainDescriptor::Intersection { members } => {
                members.iter().any(DomainDescriptor::is_bounded)
            }
        }
    }

    /// Smallest axis-aligned box containing the region, when bounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            DomainDescriptor::All { .. } => None,
            DomainDescriptor::Box { lower, upper } => Some((lower.clone(), upper.clone())),
            DomainDescriptor::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            DomainDescriptor::Intersection { members } => {
                let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
                for m in members {
                    if let Some((lo, hi)) = m.bounding_box() {
                        best = Some(match best {
                            None => (lo, hi),
                            Some((mut blo, mut bhi)) => {
                                for k in 0..blo.len() {
                                    blo[k] = blo[k].max(lo[k]);
                                    bhi[k] = bhi[k].min(hi[k]);
                                }
                                (blo, bhi)
                            }
                        });
                    }
                }
                best
            }
        }
    }

    /// Intersection of two regions. Collapses to a primitive form where
    /// possible; otherwise keeps an explicit intersection. Provably empty
    /// intersections are rejected (emptiness is detected pairwise for the
    /// primitive shapes).
    pub fn intersect(&self, other: &DomainDescriptor) -> Result<DomainDescriptor> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot intersect domains of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        match (self, other) {
            (DomainDescriptor::All { .. }, _) => Ok(other.clone()),
            (_, DomainDescriptor::All { .. }) => Ok(self.clone()),
            (
                DomainDescriptor::Box { lower: l1, upper: u1 },
                DomainDescriptor::Box { lower: l2, upper: u2 },
            ) => {
                let lower: Vec<f64> = l1.iter().zip(l2).map(|(a, b)| a.max(*b)).collect();
                let upper: Vec<f64> = u1.iter().zip(u2).map(|(a, b)| a.min(*b)).collect();
                if lower.iter().zip(&upper).any(|(lo, hi)| lo >= hi) {
                    return Err(Error::InvalidDomain("box intersection is empty".into()));
                }
                Ok(DomainDescriptor::Box { lower, upper })
            }
            (
                DomainDescriptor::Ball { center: c1, radius: r1 },
                DomainDescriptor::Ball { center: c2, radius: r2 },
            ) => {
                let dist = euclidean(c1, c2);
                if dist > r1 + r2 {
                    return Err(Error::InvalidDomain("ball intersection is empty".into()));
                }
                if dist + r1 <= *r2 {
                    Ok(self.clone())
                } else if dist + r2 <= *r1 {
                    Ok(other.clone())
                } else {
                    Ok(DomainDescriptor::Intersection {
                        members: vec![self.clone(), other.clone()],
                    })
                }
            }
            (DomainDescriptor::Ball { center, radius }, DomainDescriptor::Box { lower, upper })
            | (DomainDescriptor::Box { lower, upper }, DomainDescriptor::Ball { center, radius }) => {
                // Distance from the ball center to the box.
                let d2: f64 = center
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(c, (lo, hi))| {
                        let p = c.clamp(*lo, *hi);
                        (c - p) * (c - p)
                    })
                    .sum();
                if d2 > radius * radius {
                    return Err(Error::InvalidDomain("ball/box intersection is empty".into()));
                }
                let ball = DomainDescriptor::Ball { center: center.clone(), radius: *radius };
                let bx = DomainDescriptor::Box { lower: lower.clone(), upper: upper.clone() };
                if bx.is_subset_of(&ball) {
                    Ok(bx)
                } else if ball.is_subset_of(&bx) {
                    Ok(ball)
                } else {
                    Ok(DomainDescriptor::Intersection { members: vec![ball, bx] })
                }
            }
            (DomainDescriptor::Intersection { members }, _) => {
                let mut ms = members.clone();
                match other {
                    DomainDescriptor::Intersection { members: other_ms } => {
                        ms.extend(other_ms.iter().cloned())
                    }
                    _ => ms.push(other.clone()),
                }
                Ok(DomainDescriptor::Intersection { members: ms })
            }
            (_, DomainDescriptor::Intersection { members }) => {
                let mut ms = vec![self.clone()];
                ms.extend(members.iter().cloned());
                Ok(DomainDescriptor::Intersection { members: ms })
            }
        }
    }

    /// Conservative containment test: `true` means every point of `self`
    /// provably lies in `other`; `false` means containment could not be
    /// established.
    pub fn is_subset_of(&self, other: &DomainDescriptor) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        match (self, other) {
            (_, DomainDescriptor::All { .. }) => true,
            (DomainDescriptor::All { .. }, _) => false,
            (_, DomainDescriptor::Intersection { members }) => {
                members.iter().all(|m| self.is_subset_of(m))
            }
            (DomainDescriptor::Intersection { members }, _) => {
                members.iter().any(|m| m.is_subset_of(other))
            }
            (
                DomainDescriptor::Box { lower: l1, upper: u1 },
                DomainDescriptor::Box { lower: l2, upper: u2 },
            ) => l1
                .iter()
                .zip(u1)
                .zip(l2.iter().zip(u2))
                .all(|((a_lo, a_hi), (b_lo, b_hi))| a_lo >= b_lo && a_hi <= b_hi),
            (DomainDescriptor::Box { lower, upper }, DomainDescriptor::Ball { center, radius }) => {
                // The farthest point of a box from a point is a corner.
                let d2: f64 = lower
                    .iter()
                    .zip(upper)
                    .zip(center)
                    .map(|((lo, hi), c)| {
                        let m = (lo - c).abs().max((hi - c).abs());
                        m * m
                    })
                    .sum();
                d2 <= radius * radius * (1.0 + 1e-12)
            }
            (DomainDescriptor::Ball { center, radius }, DomainDescriptor::Box { lower, upper }) => {
                center
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .all(|(c, (lo, hi))| c - radius >= *lo && c + radius <= *hi)
            }
            (
                DomainDescriptor::Ball { center: c1, radius: r1 },
                DomainDescriptor::Ball { center: c2, radius: r2 },
            ) => euclidean(c1, c2) + r1 <= r2 * (1.0 + 1e-12),
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Seeded uniform sampler over a bounded region.
///
/// Sample `index` draws from an RNG seeded by a fixed mix of `(seed, index)`,
/// so batches can be generated independently and in parallel while staying
/// byte-reproducible.
#[derive(Debug, Clone)]
pub struct DomainSampler {
    region: DomainDescriptor,
    seed: u64,
}

const MAX_REJECTIONS: usize = 100_000;

impl DomainSampler {
    pub fn new(region: DomainDescriptor, seed: u64) -> Result<Self> {
        if region.bounding_box().is_none() {
            return Err(Error::InvalidDomain(
                "sampler requires a bounded region; unbounded domains need an explicit sampling box"
                    .into(),
            ));
        }
        Ok(DomainSampler { region, seed })
    }

    pub fn region(&self) -> &DomainDescriptor {
        &self.region
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True when every sampled point is guaranteed to lie in `domain`.
    pub fn compatible_with(&self, domain: &DomainDescriptor) -> bool {
        self.region.is_subset_of(domain)
    }

    /// Deterministic RNG for the given sample index.
    pub fn rng_for(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix_seed(self.seed, index))
    }

    /// Draws one point uniformly from the region.
    ///
    /// Non-box regions use rejection from the bounding box; panics if the
    /// region is so thin that rejection fails pathologically often.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let (lower, upper) = self
            .region
            .bounding_box()
            .expect("sampler region is bounded by construction");
        if let DomainDescriptor::Box { .. } = self.region {
            return lower
                .iter()
                .zip(&upper)
                .map(|(lo, hi)| rng.random_range(*lo..=*hi))
                .collect();
        }
        for _ in 0..MAX_REJECTIONS {
            let candidate: Vec<f64> = lower
                .iter()
                .zip(&upper)
                .map(|(lo, hi)| rng.random_range(*lo..=*hi))
                .collect();
            if self.region.contains(&candidate) {
                return candidate;
            }
        }
        panic!(
            "rejection sampling failed after {MAX_REJECTIONS} draws; the region has negligible volume"
        );
    }
}

/// SplitMix64-style mix of a base seed and a sample index.
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_contains_and_bounds() {
        let b = DomainDescriptor::bounded_box(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(b.contains(&[0.0, 1.0]));
        assert!(!b.contains(&[0.0, 3.0]));
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn ball_subset_checks() {
        let ball = DomainDescriptor::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let small = DomainDescriptor::ball(vec![0.0, 0.0, 0.0], 0.5).unwrap();
        let cube = DomainDescriptor::centered_box(3, 0.5).unwrap();
        assert!(small.is_subset_of(&ball));
        assert!(!ball.is_subset_of(&small));
        // corner norm sqrt(3)/2 < 1
        assert!(cube.is_subset_of(&ball));
        let big_cube = DomainDescriptor::centered_box(3, 0.9).unwrap();
        assert!(!big_cube.is_subset_of(&ball));
    }

    #[test]
    fn intersect_all_and_box() {
        let all = DomainDescriptor::all(2).unwrap();
        let b = DomainDescriptor::centered_box(2, 1.0).unwrap();
        assert_eq!(all.intersect(&b).unwrap(), b);
        assert_eq!(b.intersect(&all).unwrap(), b);
    }

    #[test]
    fn empty_intersections_rejected() {
        let a = DomainDescriptor::bounded_box(vec![0.0], vec![1.0]).unwrap();
        let b = DomainDescriptor::bounded_box(vec![2.0], vec![3.0]).unwrap();
        assert!(a.intersect(&b).is_err());
        let b1 = DomainDescriptor::ball(vec![0.0], 0.5).unwrap();
        let b2 = DomainDescriptor::ball(vec![2.0], 0.5).unwrap();
        assert!(b1.intersect(&b2).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_in_region() {
        let ball = DomainDescriptor::ball(vec![0.0, 0.0, 0.0], 0.6).unwrap();
        let s = DomainSampler::new(ball.clone(), 99).unwrap();
        let mut r1 = s.rng_for(3);
        let mut r2 = s.rng_for(3);
        for _ in 0..32 {
            let a = s.draw(&mut r1);
            let b = s.draw(&mut r2);
            assert_eq!(a, b);
            assert!(ball.contains(&a));
        }
    }

    #[test]
    fn sampler_requires_bounded_region() {
        let all = DomainDescriptor::all(2).unwrap();
        assert!(DomainSampler::new(all, 1).is_err());
    }
}
