//! Spectral measures as atoms plus per-band absolutely continuous densities,
//! their Stieltjes transforms, the Herglotz assembly `z + A + ∫dρ/(t-z)`, the
//! ν₊/ν₋ splitting, and a weak-* metric.
//!
//! Band densities are stored at the canonical Chebyshev nodes of their band
//! (see [`crate::chebyshev`]); this makes the total mass a plain weighted sum
//! and the Stieltjes transform a closed-form series that remains accurate for
//! `z` arbitrarily close to the support.
//!
//! The weak-* metric D is the L¹ distance of cumulative mass functions,
//! evaluated exactly on the piecewise-linear-plus-jumps structure of the
//! stored measures. On uniformly bounded measures with common compact support
//! this metrizes weak-* convergence.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev;
use crate::error::{Error, Result};
use crate::sets::{FiniteGapSet, Interval};

/// Absolutely continuous piece on one band, sampled at Chebyshev nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AcBandRepr", into = "AcBandRepr")]
pub struct AcBand {
    band: Interval,
    nodes: Vec<f64>,
    density: Vec<f64>,
    #[serde(skip)]
    cos_coef: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AcBandRepr {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    density: Vec<f64>,
}

impl TryFrom<AcBandRepr> for AcBand {
    type Error = Error;
    fn try_from(r: AcBandRepr) -> Result<Self> {
        AcBand::new(Interval::new(r.lo, r.hi)?, r.nodes, r.density)
    }
}

impl From<AcBand> for AcBandRepr {
    fn from(b: AcBand) -> Self {
        AcBandRepr {
            lo: b.band.lo,
            hi: b.band.hi,
            nodes: b.nodes,
            density: b.density,
        }
    }
}

impl AcBand {
    pub fn new(band: Interval, nodes: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != density.len() {
            return Err(Error::InvalidMeasure(format!(
                "band [{}, {}]: {} nodes vs {} density values",
                band.lo,
                band.hi,
                nodes.len(),
                density.len()
            )));
        }
        if !chebyshev::is_canonical(band.lo, band.hi, &nodes, 1e-9) {
            return Err(Error::InvalidMeasure(format!(
                "band [{}, {}]: nodes are not the canonical Chebyshev grid",
                band.lo, band.hi
            )));
        }
        if density.iter().any(|&d| d < 0.0 || !d.is_finite()) {
            return Err(Error::InvalidMeasure("negative or non-finite density".into()));
        }
        let cos_coef = chebyshev::integrand_cosine_coefficients(band.lo, band.hi, &density);
        Ok(AcBand {
            band,
            nodes,
            density,
            cos_coef,
        })
    }

    /// Band with density given by a function of t.
    pub fn from_fn(band: Interval, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = chebyshev::nodes(band.lo, band.hi, n);
        let density = nodes.iter().map(|&t| f(t)).collect();
        AcBand::new(band, nodes, density)
    }

    pub fn band(&self) -> Interval {
        self.band
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Quadrature masses carried by each node.
    pub fn node_masses(&self) -> Vec<f64> {
        chebyshev::weights(self.band.lo, self.band.hi, self.nodes.len())
            .iter()
            .zip(&self.density)
            .map(|(w, d)| w * d)
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.node_masses().iter().sum()
    }

    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        chebyshev::stieltjes_from_coefficients(self.band.lo, self.band.hi, &self.cos_coef, z)
    }

    /// Same band with density scaled by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> AcBand {
        AcBand {
            band: self.band,
            nodes: self.nodes.clone(),
            density: self.density.iter().map(|d| c * d).collect(),
            cos_coef: self.cos_coef.iter().map(|s| c * s).collect(),
        }
    }
}

/// A positive measure: point masses plus absolutely continuous band pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    /// `(position, weight)` pairs, strictly increasing positions.
    atoms: Vec<(f64, f64)>,
    bands: Vec<AcBand>,
}

impl SpectralMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>, bands: Vec<AcBand>) -> Result<Self> {
        atoms.sort_by(|p, q| p.0.total_cmp(&q.0));
        if atoms.windows(2).any(|w| w[1].0 - w[0].0 <= 0.0) {
            return Err(Error::InvalidMeasure("atom positions must be distinct".into()));
        }
        if atoms.iter().any(|&(_, w)| w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidMeasure("atom weights must be positive".into()));
        }
        Ok(SpectralMeasure { atoms, bands })
    }

    pub fn zero() -> Self {
        SpectralMeasure {
            atoms: Vec::new(),
            bands: Vec::new(),
        }
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        SpectralMeasure::new(atoms, Vec::new())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn bands(&self) -> &[AcBand] {
        &self.bands
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.bands.iter().all(|b| b.mass() == 0.0)
    }

    /// Total mass: atom weights plus band quadrature.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum::<f64>()
            + self.bands.iter().map(AcBand::mass).sum::<f64>()
    }

    /// `∫ dm(t)/(t - z)` for `z` off the real axis.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Err(Error::InvalidMeasure(
                "stieltjes transform needs Im z != 0".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in &self.atoms {
            acc += w / (Complex64::new(x, 0.0) - z);
        }
        for b in &self.bands {
            acc += b.stieltjes(z);
        }
        Ok(acc)
    }

    /// Discretization as weighted points: atoms exactly, bands by quadrature.
    pub fn discretize(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pts: Vec<f64> = self.atoms.iter().map(|&(x, _)| x).collect();
        let mut wts: Vec<f64> = self.atoms.iter().map(|&(_, w)| w).collect();
        for b in &self.bands {
            pts.extend_from_slice(b.nodes());
            wts.extend(b.node_masses());
        }
        (pts, wts)
    }

    /// Number of quadrature nodes backing the ac part.
    pub fn ac_node_count(&self) -> usize {
        self.bands.iter().map(|b| b.nodes().len()).sum()
    }
}

/// Per-atom splitting data for ν₊ = ½·(ac part) + Σ σ_j w_j δ + g-weighted
/// on-set atoms. `sigma[j]` applies to the j-th atom lying in a gap of K
/// (all-or-nothing); `g[j]`, when present, applies to the j-th atom lying on
/// K itself (fractional).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSpec {
    pub sigma: Vec<u8>,
    #[serde(default)]
    pub g: Option<Vec<f64>>,
}

impl SplitSpec {
    pub fn all_plus(n: usize) -> Self {
        SplitSpec {
            sigma: vec![1; n],
            g: None,
        }
    }
}

/// Splits `m` into `(ν₊, ν₋)`: the ac part on K is halved, each gap atom goes
/// wholly to one side by its σ flag, and any atom sitting on K is divided by
/// its g weight. Both parts are non-negative by construction; mass is
/// conserved exactly.
pub fn split_nu(
    m: &SpectralMeasure,
    k: &FiniteGapSet,
    spec: &SplitSpec,
) -> Result<(SpectralMeasure, SpectralMeasure)> {
    let on_k: Vec<bool> = m.atoms().iter().map(|&(x, _)| k.contains(x)).collect();
    let n_gap = on_k.iter().filter(|&&b| !b).count();
    let n_on = on_k.len() - n_gap;
    if spec.sigma.len() != n_gap {
        return Err(Error::InvalidSplit(format!(
            "{} sigma flags for {} gap atoms",
            spec.sigma.len(),
            n_gap
        )));
    }
    if spec.sigma.iter().any(|&s| s > 1) {
        return Err(Error::InvalidSplit("sigma entries must be 0 or 1".into()));
    }
    match &spec.g {
        Some(g) => {
            if g.len() != n_on {
                return Err(Error::InvalidSplit(format!(
                    "{} g weights for {} on-set atoms",
                    g.len(),
                    n_on
                )));
            }
            if g.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::InvalidSplit("g entries must lie in [0, 1]".into()));
            }
        }
        None => {
            if n_on > 0 {
                return Err(Error::InvalidSplit(format!(
                    "{n_on} atoms lie on K but no g weights were given"
                )));
            }
        }
    }

    let mut plus_atoms = Vec::new();
    let mut minus_atoms = Vec::new();
    let (mut ig, mut io) = (0usize, 0usize);
    for (&(x, w), &on) in m.atoms().iter().zip(&on_k) {
        if on {
            let gj = spec.g.as_ref().unwrap()[io];
            io += 1;
            if gj > 0.0 {
                plus_atoms.push((x, gj * w));
            }
            if gj < 1.0 {
                minus_atoms.push((x, (1.0 - gj) * w));
            }
        } else {
            if spec.sigma[ig] == 1 {
                plus_atoms.push((x, w));
            } else {
                minus_atoms.push((x, w));
            }
            ig += 1;
        }
    }
    let half_bands: Vec<AcBand> = m.bands().iter().map(|b| b.scaled(0.5)).collect();
    let plus = SpectralMeasure::new(plus_atoms, half_bands.clone())?;
    let minus = SpectralMeasure::new(minus_atoms, half_bands)?;
    Ok((plus, minus))
}

/// `H(z) = z + A + ∫ dm(t)/(t-z)`.
pub fn herglotz_assemble(a: f64, m: &SpectralMeasure, z: Complex64) -> Result<Complex64> {
    Ok(z + a + m.stieltjes(z)?)
}

/// L¹ distance of cumulative mass functions over `[-radius-1, radius+1]`,
/// for measures supported in `[-radius, radius]`. The padding interval makes
/// total-mass differences count: past both supports the integrand is the
/// constant `|m1(ℝ) - m2(ℝ)|`.
///
/// Atoms contribute jumps; each band node's quadrature mass ramps linearly
/// across its cell (midpoints between neighboring nodes, clipped to the
/// band). The difference of two such CDFs is piecewise linear, so the
/// integral is evaluated exactly segment by segment.
pub fn weak_star_distance(m1: &SpectralMeasure, m2: &SpectralMeasure, radius: f64) -> f64 {
    // events: (x, jump, slope-change) — F(t) = Σ jumps at x ≤ t + ∫ slopes
    #[derive(Clone, Copy)]
    struct Ev {
        x: f64,
        jump: f64,
        dslope: f64,
    }
    fn events(m: &SpectralMeasure, sign: f64) -> Vec<Ev> {
        let mut evs = Vec::new();
        for &(x, w) in m.atoms() {
            evs.push(Ev {
                x,
                jump: sign * w,
                dslope: 0.0,
            });
        }
        for b in m.bands() {
            let nodes = b.nodes();
            let masses = b.node_masses();
            let n = nodes.len();
            for i in 0..n {
                let lo = if i == 0 {
                    b.band().lo
                } else {
                    0.5 * (nodes[i - 1] + nodes[i])
                };
                let hi = if i + 1 == n {
                    b.band().hi
                } else {
                    0.5 * (nodes[i] + nodes[i + 1])
                };
                if hi > lo {
                    let s = sign * masses[i] / (hi - lo);
                    evs.push(Ev {
                        x: lo,
                        jump: 0.0,
                        dslope: s,
                    });
                    evs.push(Ev {
                        x: hi,
                        jump: 0.0,
                        dslope: -s,
                    });
                }
            }
        }
        evs
    }
    let mut evs = events(m1, 1.0);
    evs.extend(events(m2, -1.0));
    // sentinel closing the integration domain at R+1
    evs.push(Ev {
        x: radius + 1.0,
        jump: 0.0,
        dslope: 0.0,
    });
    evs.sort_by(|p, q| p.x.total_cmp(&q.x));

    let mut total = 0.0;
    let mut f = 0.0; // F1 - F2 just after the previous event
    let mut slope = 0.0;
    let mut prev_x = f64::NEG_INFINITY;
    for ev in evs {
        if prev_x > f64::NEG_INFINITY && ev.x > prev_x {
            let dx = ev.x - prev_x;
            let f_end = f + slope * dx;
            // ∫ |f + slope·s| ds over [0, dx], splitting at a sign change
            if f == 0.0 && slope == 0.0 {
                // nothing
            } else if f * f_end >= 0.0 {
                total += 0.5 * (f.abs() + f_end.abs()) * dx;
            } else {
                let s0 = -f / slope;
                total += 0.5 * f.abs() * s0 + 0.5 * f_end.abs() * (dx - s0);
            }
            f = f_end;
        }
        if prev_x < ev.x {
            prev_x = ev.x;
        }
        f += ev.jump;
        slope += ev.dslope;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn semicircle_probability() -> SpectralMeasure {
        let b = AcBand::from_fn(Interval { lo: -2.0, hi: 2.0 }, 256, |t| {
            (4.0 - t * t).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
        })
        .unwrap();
        SpectralMeasure::new(vec![], vec![b]).unwrap()
    }

    #[test]
    fn mass_examples() {
        assert_eq!(SpectralMeasure::zero().mass(), 0.0);
        let single = SpectralMeasure::from_atoms(vec![(0.0, 0.7)]).unwrap();
        assert_eq!(single.mass(), 0.7);
        // quadrature oracle: ∫ (1/(2π))√(4-t²) dt = 1
        assert_relative_eq!(semicircle_probability().mass(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn stieltjes_examples() {
        let d0 = SpectralMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap();
        let z = Complex64::new(0.0, 1.0);
        assert!((d0.stieltjes(z).unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);

        let two = SpectralMeasure::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let z2 = Complex64::new(0.0, 2.0);
        let want = 0.5 / (Complex64::new(1.0, 0.0) - z2) + 0.5 / (Complex64::new(-1.0, 0.0) - z2);
        assert!((two.stieltjes(z2).unwrap() - want).norm() < 1e-15);

        // semicircle closed form at 3i, cross-checked by direct quadrature
        let sc = semicircle_probability();
        let z3 = Complex64::new(0.0, 3.0);
        let got = sc.stieltjes(z3).unwrap();
        let want3 = Complex64::new(0.0, (13.0f64.sqrt() - 3.0) / 2.0);
        assert!((got - want3).norm() < 1e-12);
        let (pts, wts) = sc.discretize();
        let direct: Complex64 = pts
            .iter()
            .zip(&wts)
            .map(|(&t, &w)| w / (Complex64::new(t, 0.0) - z3))
            .sum();
        assert!((got - direct).norm() < 1e-12);
    }

    #[test]
    fn stieltjes_herglotz_sign() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let sc = semicircle_probability();
        for _ in 0..50 {
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(1e-4..2.0));
            assert!(sc.stieltjes(z).unwrap().im > 0.0);
        }
    }

    #[test]
    fn herglotz_assemble_zero_measure() {
        let m = SpectralMeasure::zero();
        let z = Complex64::new(0.3, 1.0);
        let h = herglotz_assemble(-0.5, &m, z).unwrap();
        assert!((h - (z - 0.5)).norm() < 1e-15);
        assert!(h.im > 0.0);
    }

    #[test]
    fn split_conserves_mass_and_positivity() {
        let k = FiniteGapSet::new(
            vec![
                Interval { lo: -2.0, hi: -1.0 },
                Interval { lo: 1.0, hi: 2.0 },
            ],
            3.0,
        )
        .unwrap();
        let band = AcBand::from_fn(Interval { lo: 1.0, hi: 2.0 }, 64, |t| {
            ((t - 1.0) * (2.0 - t)).max(0.0).sqrt()
        })
        .unwrap();
        let m = SpectralMeasure::new(vec![(0.0, 0.8), (-1.5, 0.2)], vec![band]).unwrap();
        // one gap atom (0.0), one atom on K (-1.5)
        let spec = SplitSpec {
            sigma: vec![1],
            g: Some(vec![0.25]),
        };
        let (p, mns) = split_nu(&m, &k, &spec).unwrap();
        assert_relative_eq!(p.mass() + mns.mass(), m.mass(), epsilon = 1e-12);
        assert_eq!(p.atoms().len(), 2); // gap atom + quarter of the on-K atom
        assert!(p.atoms().iter().all(|&(_, w)| w > 0.0));
        assert!(mns.atoms().iter().all(|&(_, w)| w > 0.0));

        // sigma = 0 sends the gap atom to the minus side
        let spec0 = SplitSpec {
            sigma: vec![0],
            g: Some(vec![0.25]),
        };
        let (p0, m0) = split_nu(&m, &k, &spec0).unwrap();
        assert!(p0.atoms().iter().all(|&(x, _)| x != 0.0));
        assert!(m0.atoms().iter().any(|&(x, _)| x == 0.0));
    }

    #[test]
    fn split_all_sigma_one() {
        let k = FiniteGapSet::new(
            vec![
                Interval { lo: -2.0, hi: -1.0 },
                Interval { lo: 1.0, hi: 2.0 },
            ],
            3.0,
        )
        .unwrap();
        let m = SpectralMeasure::from_atoms(vec![(-0.5, 0.3), (0.5, 0.4)]).unwrap();
        let (p, mns) = split_nu(&m, &k, &SplitSpec::all_plus(2)).unwrap();
        assert_eq!(p.atoms().len(), 2);
        assert!(mns.atoms().is_empty());
    }

    #[test]
    fn split_rejects_bad_spec() {
        let k = FiniteGapSet::single(-1.0, 1.0, 2.0).unwrap();
        let m = SpectralMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap();
        // atom at 0 lies on K; needs g
        assert!(split_nu(&m, &k, &SplitSpec::all_plus(0)).is_err());
        let bad = SplitSpec {
            sigma: vec![],
            g: Some(vec![1.5]),
        };
        assert!(split_nu(&m, &k, &bad).is_err());
    }

    #[test]
    fn weak_star_examples() {
        let d0 = SpectralMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(weak_star_distance(&d0, &d0, 2.0), 0.0);
        for &eps in &[0.5, 0.01, 1e-4] {
            let de = SpectralMeasure::from_atoms(vec![(eps, 1.0)]).unwrap();
            assert_relative_eq!(weak_star_distance(&d0, &de, 2.0), eps, epsilon = 1e-14);
            // split pair: CDFs differ by ½ on (-ε, 0) ∪ (0, ε)
            let pair = SpectralMeasure::from_atoms(vec![(-eps, 0.5), (eps, 0.5)]).unwrap();
            assert_relative_eq!(weak_star_distance(&d0, &pair, 2.0), eps, epsilon = 1e-14);
        }
    }

    #[test]
    fn weak_star_metric_axioms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let n = rng.gen_range(1..4);
            let atoms: Vec<(f64, f64)> = (0..n)
                .map(|i| (rng.gen_range(-2.0..2.0) + 5.0 * i as f64 * 1e-9, rng.gen_range(0.1..1.0)))
                .collect();
            SpectralMeasure::from_atoms(atoms).unwrap()
        };
        for _ in 0..100 {
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let c = mk(&mut rng);
            let ab = weak_star_distance(&a, &b, 3.0);
            let ba = weak_star_distance(&b, &a, 3.0);
            assert!((ab - ba).abs() < 1e-13);
            assert!(
                weak_star_distance(&a, &c, 3.0) <= ab + weak_star_distance(&b, &c, 3.0) + 1e-12
            );
            assert_eq!(weak_star_distance(&a, &a, 3.0), 0.0);
        }
    }

    #[test]
    fn weak_star_continuity() {
        let d0 = SpectralMeasure::from_atoms(vec![(0.0, 1.0)]).unwrap();
        let mut prev = f64::INFINITY;
        for n in [2.0, 8.0, 64.0, 1024.0] {
            let dn = SpectralMeasure::from_atoms(vec![(1.0 / n, 1.0)]).unwrap();
            let d = weak_star_distance(&d0, &dn, 2.0);
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn json_round_trip() {
        let sc = semicircle_probability();
        let s = serde_json::to_string(&sc).unwrap();
        let sc2: SpectralMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(sc.atoms(), sc2.atoms());
        assert_relative_eq!(sc.mass(), sc2.mass(), epsilon = 1e-15);
        // non-canonical nodes are rejected on load
        let bad = r#"{"atoms":[],"bands":[{"lo":0.0,"hi":1.0,"nodes":[0.25,0.5,0.75],"density":[1.0,1.0,1.0]}]}"#;
        assert!(serde_json::from_str::<SpectralMeasure>(bad).is_err());
    }
}
