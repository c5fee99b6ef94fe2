//! Finite gap sets — finite unions of disjoint compact intervals — and the
//! metrics used to compare them: Hausdorff distance h, Lebesgue measure of the
//! symmetric difference, and their sum δ = h + |·Δ·|.
//!
//! All endpoint arithmetic is plain binary floating point. Disjointness is
//! checked with tolerance `SEPARATION_EPS`; bands closer than that are
//! rejected rather than merged, since silent merging would change the gap
//! structure and with it the dimension of the torus parametrization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum allowed separation between consecutive bands.
pub const SEPARATION_EPS: f64 = 1e-9;

/// Tolerance for endpoint comparisons on user-supplied sets.
pub const ENDPOINT_EPS: f64 = 1e-12;

/// A closed interval `[lo, hi]`. Degenerate point intervals are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to this interval (0 inside).
    pub fn dist(&self, x: f64) -> f64 {
        (self.lo - x).max(x - self.hi).max(0.0)
    }
}

/// A finite union of disjoint compact intervals inside `(-r, r)`.
///
/// Bands are kept sorted by left endpoint with strictly positive separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiniteGapSetRepr", into = "FiniteGapSetRepr")]
pub struct FiniteGapSet {
    bands: Vec<Interval>,
    radius: f64,
}

/// On-disk form: `{"radius": R, "bands": [[lo,hi],...]}`.
#[derive(Serialize, Deserialize)]
struct FiniteGapSetRepr {
    radius: f64,
    bands: Vec<[f64; 2]>,
}

impl TryFrom<FiniteGapSetRepr> for FiniteGapSet {
    type Error = Error;
    fn try_from(r: FiniteGapSetRepr) -> Result<Self> {
        let bands = r
            .bands
            .iter()
            .map(|&[lo, hi]| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        FiniteGapSet::new(bands, r.radius)
    }
}

impl From<FiniteGapSet> for FiniteGapSetRepr {
    fn from(k: FiniteGapSet) -> Self {
        FiniteGapSetRepr {
            radius: k.radius,
            bands: k.bands.iter().map(|b| [b.lo, b.hi]).collect(),
        }
    }
}

impl FiniteGapSet {
    pub fn new(mut bands: Vec<Interval>, radius: f64) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidSet("at least one band is required".into()));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidSet(format!("radius {radius} must be positive")));
        }
        bands.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in bands.windows(2) {
            let sep = w[1].lo - w[0].hi;
            if sep < SEPARATION_EPS {
                return Err(Error::InvalidSet(format!(
                    "bands [{},{}] and [{},{}] are separated by {sep} < {SEPARATION_EPS}",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        let lo = bands[0].lo;
        let hi = bands[bands.len() - 1].hi;
        if lo <= -radius || hi >= radius {
            return Err(Error::InvalidSet(format!(
                "bands must lie strictly inside (-{radius}, {radius}); got [{lo}, {hi}]"
            )));
        }
        Ok(FiniteGapSet { bands, radius })
    }

    /// Single interval `[lo, hi]` inside `(-radius, radius)`.
    pub fn single(lo: f64, hi: f64, radius: f64) -> Result<Self> {
        FiniteGapSet::new(vec![Interval::new(lo, hi)?], radius)
    }

    pub fn bands(&self) -> &[Interval] {
        &self.bands
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn min(&self) -> f64 {
        self.bands[0].lo
    }

    pub fn max(&self) -> f64 {
        self.bands[self.bands.len() - 1].hi
    }

    /// Total Lebesgue measure of the set.
    pub fn measure(&self) -> f64 {
        self.bands.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bands.iter().any(|b| b.contains(x))
    }

    pub fn dist(&self, x: f64) -> f64 {
        self.bands
            .iter()
            .map(|b| b.dist(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Bounded open components of the complement, in increasing order.
    pub fn gaps(&self) -> Vec<Interval> {
        self.bands
            .windows(2)
            .map(|w| Interval {
                lo: w[0].hi,
                hi: w[1].lo,
            })
            .collect()
    }
}

/// Hausdorff distance between two finite gap sets, computed exactly.
///
/// `dist(·, k2)` is piecewise linear with breakpoints at the endpoints and gap
/// midpoints of `k2`, so the supremum over `k1` is attained at one of finitely
/// many candidates: endpoints of `k1`, plus breakpoints of `dist(·, k2)` that
/// land inside `k1`.
pub fn hausdorff(k1: &FiniteGapSet, k2: &FiniteGapSet) -> f64 {
    fn one_sided(a: &FiniteGapSet, b: &FiniteGapSet) -> f64 {
        let mut cands: Vec<f64> = Vec::new();
        for band in a.bands() {
            cands.push(band.lo);
            cands.push(band.hi);
        }
        for band in b.bands() {
            if a.contains(band.lo) {
                cands.push(band.lo);
            }
            if a.contains(band.hi) {
                cands.push(band.hi);
            }
        }
        for gap in b.gaps() {
            let m = gap.midpoint();
            if a.contains(m) {
                cands.push(m);
            }
        }
        cands.iter().map(|&x| b.dist(x)).fold(0.0, f64::max)
    }
    one_sided(k1, k2).max(one_sided(k2, k1))
}

/// Lebesgue measure of the symmetric difference, by an endpoint sweep.
pub fn lebesgue_symmdiff(k1: &FiniteGapSet, k2: &FiniteGapSet) -> f64 {
    let mut pts: Vec<f64> = Vec::new();
    for k in [k1, k2] {
        for b in k.bands() {
            pts.push(b.lo);
            pts.push(b.hi);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if k1.contains(mid) != k2.contains(mid) {
            total += w[1] - w[0];
        }
    }
    total
}

/// δ(K, K') = h(K, K') + |K Δ K'|.
pub fn delta_metric(k1: &FiniteGapSet, k2: &FiniteGapSet) -> f64 {
    hausdorff(k1, k2) + lebesgue_symmdiff(k1, k2)
}
