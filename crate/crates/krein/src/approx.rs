//! The finite-gap approximation pipeline: subdivide each gap into n equal
//! sub-gaps separated by n-1 bands of width δ, average the Krein function
//! over each sub-gap so every gap carries a single 0→1 jump, split point
//! masses with fractional targets into σ-assignable twins by inserting a tiny
//! ½-band, and reconstruct. Refining the schedule drives the output operators
//! toward the input in the coefficient metric while `|PΔB| → 0`.

use serde::{Deserialize, Serialize};

use crate::chebyshev;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::krein::{self, KreinFunction};
use crate::measures::{weak_star_distance, SpectralMeasure};
use crate::sets::{lebesgue_symmdiff, FiniteGapSet, Interval};
use crate::spectral::{
    is_reflectionless, jacobi_distance, reconstruct_from_halfline, ReflectionlessReport,
    Reconstruction, SpectralDataResolvent, TorusPoint,
};

/// Per-gap subdivision: `n` sub-gaps of equal length separated by `n-1`
/// bands of width `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionPlan {
    pub n: usize,
    pub delta: f64,
}

impl SubdivisionPlan {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n < 1 || !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidSet(format!(
                "subdivision needs n >= 1 and delta > 0, got n={n}, delta={delta}"
            )));
        }
        Ok(SubdivisionPlan { n, delta })
    }
}

/// Replaces every gap of `a0` by `n` equal sub-gaps separated by `n-1` bands
/// of width δ. The new bands become components of the returned set.
pub fn subdivide(a0: &FiniteGapSet, plan: &SubdivisionPlan) -> Result<FiniteGapSet> {
    if plan.n == 1 {
        return Ok(a0.clone());
    }
    let mut bands: Vec<Interval> = a0.bands().to_vec();
    for gap in a0.gaps() {
        let total_band = (plan.n - 1) as f64 * plan.delta;
        if total_band >= gap.length() {
            return Err(Error::BandsTooWide {
                total: total_band,
                gap_len: gap.length(),
            });
        }
        let sub_len = (gap.length() - total_band) / plan.n as f64;
        let mut x = gap.lo;
        for _ in 0..plan.n - 1 {
            x += sub_len;
            bands.push(Interval {
                lo: x,
                hi: x + plan.delta,
            });
            x += plan.delta;
        }
    }
    FiniteGapSet::new(bands, a0.radius())
}

/// Integral of ξ over `[lo, hi]`.
fn integral_over(xi: &KreinFunction, lo: f64, hi: f64) -> f64 {
    xi.pieces()
        .map(|(a, b, v)| v * (b.min(hi) - a.max(lo)).max(0.0))
        .sum()
}

/// Averages ξ over each gap of `an`: on a gap `(a, b)` the result is
/// `χ_{(μ, b)}` with `μ = b - ∫_a^b ξ`, preserving the integral. When the
/// jump lands exactly on the endpoint of an inserted band (width at most
/// `deletable_width`) that band would sit with ξ ≡ 0 on its left or ξ ≡ 1 on
/// its right — outside the arrangement whose weight the band bound controls —
/// so it is deleted and the neighboring gaps merge. Wider bands are genuine
/// components of the base set and are never deleted. Returns the averaged
/// function together with the possibly shrunk set.
pub fn averaged_xi(
    xi: &KreinFunction,
    an: &FiniteGapSet,
    deletable_width: f64,
) -> Result<(KreinFunction, FiniteGapSet)> {
    let eps = 1e-12 * (1.0 + an.radius());
    let gaps = an.gaps();
    let mut mus = Vec::with_capacity(gaps.len());
    for gap in &gaps {
        let avg = integral_over(xi, gap.lo, gap.hi);
        mus.push(gap.hi - avg);
    }
    // deleting the same band from both sides at once is the unresolved
    // collision case
    let bands = an.bands();
    let mut keep = vec![true; bands.len()];
    for (i, gap) in gaps.iter().enumerate() {
        let mu = mus[i];
        if (mu - gap.hi).abs() < eps && bands[i + 1].length() <= deletable_width {
            // ξ ≡ 0 on the gap; right endpoint is the left edge of band i+1
            if !keep[i + 1] {
                return Err(Error::DeletionCollision {
                    lo: gap.lo,
                    hi: gap.hi,
                });
            }
            keep[i + 1] = false;
        } else if (mu - gap.lo).abs() < eps && bands[i].length() <= deletable_width {
            // ξ ≡ 1 on the gap; left endpoint is the right edge of band i
            if !keep[i] {
                return Err(Error::DeletionCollision {
                    lo: gap.lo,
                    hi: gap.hi,
                });
            }
            keep[i] = false;
        }
    }
    if keep.iter().all(|k| !k) {
        return Err(Error::InvalidSet(
            "averaging deleted every band of the set".into(),
        ));
    }
    // never delete the outermost original structure silently: deletion can
    // only remove bands introduced by a subdivision or genuinely redundant
    // components, and the caller's set decides that; here we just apply it.
    let kept: Vec<Interval> = bands
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(b, _)| *b)
        .collect();
    let shrunk = FiniteGapSet::new(kept, an.radius())?;
    // rebuild ξ on the shrunk set's gaps from the preserved integrals
    let mut new_mus = Vec::new();
    for gap in shrunk.gaps() {
        let avg = integral_over(xi, gap.lo, gap.hi);
        new_mus.push(gap.hi - avg);
    }
    let sigmas = vec![1u8; new_mus.len()];
    let p = TorusPoint {
        mus: new_mus.clone(),
        sigmas,
    };
    // clamp: averaging can land within eps of an endpoint
    let mut p = p;
    for (mu, gap) in p.mus.iter_mut().zip(shrunk.gaps()) {
        if (*mu - gap.lo).abs() < eps {
            *mu = gap.lo;
        }
        if (*mu - gap.hi).abs() < eps {
            *mu = gap.hi;
        }
    }
    let xin = crate::spectral::xi_from_torus(&shrunk, &p)?;
    Ok((xin, shrunk))
}

/// Extremal density of the band-weight bound: with ξ = 1 on (-A, 0), ½ on
/// (0, δ), 0 on (δ, B) inside a gap, and the mass-maximizing outer
/// arrangement ξ = 0 on (-R, -A), ξ = 1 on (B, R), the ac density on the
/// band is `(1/π)(x+R)·√(x(δ-x))/(A+x)·(R-x)/(B-x)`, shifted so the band
/// is `[0, δ]`.
pub fn lemma32_density(a: f64, b: f64, delta: f64, r: f64, x: f64) -> f64 {
    let h = (x * (delta - x)).max(0.0).sqrt() / (a + x);
    (x + r) / std::f64::consts::PI * h * (r - x) / (b - x)
}

/// Upper bound for the measure a band of width δ can carry: the integral of
/// [`lemma32_density`] over `[0, δ]`. Tends to 0 as δ → 0.
pub fn lemma32_band_weight(a: f64, b: f64, delta: f64, r: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < b && a > 0.0 && a < r && b < r) {
        return Err(Error::Numerical(format!(
            "need 0 < delta << A,B < R; got A={a}, B={b}, delta={delta}, R={r}"
        )));
    }
    // the integrand vanishes like √ at both band ends, which the Chebyshev
    // substitution integrates spectrally
    let n = 200;
    let nodes = chebyshev::nodes(0.0, delta, n);
    let weights = chebyshev::weights(0.0, delta, n);
    let total: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| lemma32_density(a, b, delta, r, x) * w)
        .sum();
    Ok(total)
}

/// ξ with the point mass at a 0→1 jump μ split into two nearby masses of
/// ratio g : (1-g), realized by the arrangement 1 on (μ-gδ, μ), ½ on
/// (μ, μ+δ²), 0 on (μ+δ², μ+(1-g)δ). The ½-band `[μ, μ+δ²]` becomes a new
/// spectral band; the twins sit at its flanks.
pub fn split_point_mass(
    xi: &KreinFunction,
    mu: f64,
    g: f64,
    delta: f64,
) -> Result<KreinFunction> {
    if !(0.0 < g && g < 1.0) {
        return Err(Error::InvalidSplit(format!("g must lie in (0,1), got {g}")));
    }
    if !(delta > 0.0 && delta < 1.0 - g) {
        return Err(Error::InvalidSplit(format!(
            "delta must lie in (0, 1-g), got {delta}"
        )));
    }
    // locate the 0->1 jump at mu and check clearance inside the 0/1 pieces
    let bps = xi.breakpoints();
    let vals = xi.values();
    let j = bps
        .iter()
        .position(|&t| (t - mu).abs() < 1e-12 * (1.0 + xi.radius()))
        .ok_or(Error::NoAtomAt(mu))?;
    if j == 0 || j + 1 >= bps.len() || vals[j - 1] != 0.0 || vals[j] != 1.0 {
        return Err(Error::NoAtomAt(mu));
    }
    let left_clear = mu - bps[j - 1];
    let right_clear = bps[j + 1] - mu;
    let needed = delta;
    if left_clear <= g * delta || right_clear <= (1.0 - g) * delta {
        return Err(Error::InsufficientClearance {
            mu,
            needed,
            available: left_clear.min(right_clear),
        });
    }
    xi.overwrite(
        mu - g * delta,
        mu + (1.0 - g) * delta,
        &[
            (mu - g * delta, mu, 1.0),
            (mu, mu + delta * delta, 0.5),
            (mu + delta * delta, mu + (1.0 - g) * delta, 0.0),
        ],
    )
}

/// Closed-form weight of the left twin in the normalized splitting
/// arrangement: `g^{1/2}(g+δ)^{1/2}(B+gδ)·h(-gδ)` where `h` collects every
/// contribution from outside `(-A, B)`.
pub fn splitting_left_weight(g: f64, delta: f64, b: f64, h_at: f64) -> f64 {
    g.sqrt() * (g + delta).sqrt() * (b + g * delta) * h_at
}

/// Input data for the approximation pipeline: a finite gap set B, a Krein
/// function that is ½ on B and {0,1}-valued with at most one 0→1 jump per
/// gap, and the fractional ν₊ target for each jump atom.
#[derive(Debug, Clone)]
pub struct PipelineInput {
    pub set: FiniteGapSet,
    pub xi: KreinFunction,
    /// One entry per gap atom (0→1 jump interior to a gap), in position order.
    pub g_targets: Vec<f64>,
}

/// Diagnostics for one schedule stage.
#[derive(Debug, Clone, Serialize)]
pub struct StageDiagnostics {
    pub n: usize,
    pub delta: f64,
    pub coefficient_distance: f64,
    pub symmdiff: f64,
    pub nu_plus_distance: f64,
    pub reflectionless: ReflectionlessReport,
}

/// One completed stage: the working set P, the reconstructed operator, and
/// the measured diagnostics.
pub struct StageOutput {
    pub set: FiniteGapSet,
    pub xi: KreinFunction,
    pub reconstruction: Reconstruction,
    pub nu_plus: SpectralMeasure,
    pub nu_minus: SpectralMeasure,
    pub diagnostics: StageDiagnostics,
}

fn gap_atoms(xi: &KreinFunction, set: &FiniteGapSet) -> Vec<f64> {
    krein::jump_points(xi)
        .into_iter()
        .filter(|&x| !set.contains(x) && x > set.min() && x < set.max())
        .collect()
}

/// Reference operator for the input data: ν₊ = ½·(ac on B) + Σ g_j w_j δ_{x_j}
/// with the fractional targets applied directly (this is the operator the
/// stages approximate; it is reflectionless on B but its atoms need not be
/// σ-assignable).
pub fn reference_operator(
    input: &PipelineInput,
    depth: usize,
    cfg: &Config,
) -> Result<(Reconstruction, SpectralMeasure)> {
    let atoms = gap_atoms(&input.xi, &input.set);
    if atoms.len() != input.g_targets.len() {
        return Err(Error::InvalidSplit(format!(
            "{} g targets for {} gap atoms",
            input.g_targets.len(),
            atoms.len()
        )));
    }
    for gap in input.set.gaps() {
        if atoms.iter().filter(|&&x| gap.contains(x)).count() > 1 {
            return Err(Error::InvalidSplit(format!(
                "gap ({}, {}) carries more than one jump; one atom per gap is supported",
                gap.lo, gap.hi
            )));
        }
    }
    let rho = extract_measure_general(&input.xi, &input.set, cfg)?;
    let mut plus_atoms = Vec::new();
    let mut minus_atoms = Vec::new();
    for (&x, &g) in atoms.iter().zip(&input.g_targets) {
        let w = krein::atom_weight(&input.xi, x)?;
        if g > 0.0 {
            plus_atoms.push((x, g * w));
        }
        if g < 1.0 {
            minus_atoms.push((x, (1.0 - g) * w));
        }
    }
    let half: Vec<_> = rho.bands().iter().map(|b| b.scaled(0.5)).collect();
    let nu_plus = SpectralMeasure::new(plus_atoms, half.clone())?;
    let nu_minus = SpectralMeasure::new(minus_atoms, half)?;
    let a_const = krein::constant_a(&input.xi);
    let rec = reconstruct_from_halfline(&nu_plus, &nu_minus, a_const, depth)?;
    Ok((rec, nu_plus))
}

/// Measure of H for a ξ that is ½ on the bands of `set` and {0,1} off it:
/// ac density `(1/π)|H|` on each band plus one atom per 0→1 jump. The {0,1}
/// requirement keeps the off-set part purely atomic.
fn extract_measure_general(
    xi: &KreinFunction,
    set: &FiniteGapSet,
    cfg: &Config,
) -> Result<SpectralMeasure> {
    for (lo, hi, v) in xi.pieces() {
        let mid = 0.5 * (lo + hi);
        if set.contains(mid) {
            if (v - 0.5).abs() > 1e-12 {
                return Err(Error::NotInXk(format!(
                    "value {v} on band piece ({lo}, {hi})"
                )));
            }
        } else if v != 0.0 && v != 1.0 && (v - 0.5).abs() > 1e-12 {
            return Err(Error::NotInXk(format!(
                "off-set piece ({lo}, {hi}) carries {v}; the pipeline needs {{0,1}} there"
            )));
        }
    }
    let mut atoms = Vec::new();
    for x in krein::jump_points(xi) {
        if !set.contains(x) {
            atoms.push((x, krein::atom_weight(xi, x)?));
        }
    }
    let mut bands = Vec::new();
    for band in set.bands() {
        let n = krein::band_node_count(cfg.nodes_per_band, band, set.radius());
        let ts = chebyshev::nodes(band.lo, band.hi, n);
        let density = ts
            .iter()
            .map(|&t| Ok(krein::boundary_h(xi, t)?.norm() / std::f64::consts::PI))
            .collect::<Result<Vec<f64>>>()?;
        bands.push(crate::measures::AcBand::new(*band, ts, density)?);
    }
    SpectralMeasure::new(atoms, bands)
}

/// Runs the full pipeline for each plan in the schedule: subdivide, average,
/// split every fractional atom into a σ-assignable twin pair (σ = 1 on the
/// g-weighted twin), reconstruct, and measure the distance to the reference.
pub fn approximate_reflectionless(
    input: &PipelineInput,
    schedule: &[SubdivisionPlan],
    depth: usize,
    cfg: &Config,
) -> Result<Vec<StageOutput>> {
    let (reference, nu_plus_ref) = reference_operator(input, depth, cfg)?;
    let mut out = Vec::new();
    for plan in schedule {
        let an = subdivide(&input.set, plan)?;
        let (xi_avg, an) = averaged_xi(&input.xi, &an, 1.5 * plan.delta)?;

        // fractional atoms inherit the g target of the input gap they lie in
        let input_gaps = input.set.gaps();
        let input_atoms = gap_atoms(&input.xi, &input.set);
        let mut xi_n = xi_avg.clone();
        let mut twins: Vec<(f64, f64)> = Vec::new(); // (plus twin, minus twin)
        for x in gap_atoms(&xi_avg, &input.set) {
            let gap_idx = input_gaps
                .iter()
                .position(|g| g.contains(x))
                .ok_or_else(|| Error::Numerical(format!("atom {x} escaped every gap")))?;
            let g_target = input_atoms
                .iter()
                .position(|&ax| input_gaps[gap_idx].contains(ax))
                .map(|i| input.g_targets[i])
                .unwrap_or(0.5);
            if g_target == 0.0 || g_target == 1.0 {
                // whole atom goes to one side; nothing to split
                continue;
            }
            let split_delta = plan.delta.min(0.5 * (1.0 - g_target));
            xi_n = split_point_mass(&xi_n, x, g_target, split_delta)?;
            twins.push((x - g_target * split_delta, x + (1.0 - g_target) * split_delta));
        }

        // the ½-slivers inserted by the splits are new spectral bands
        let mut bands = an.bands().to_vec();
        for (lo, hi, v) in xi_n.pieces() {
            if (v - 0.5).abs() < 1e-15 && !an.contains(0.5 * (lo + hi)) {
                bands.push(Interval { lo, hi });
            }
        }
        let pn = FiniteGapSet::new(bands, an.radius())?;

        let rho_n = extract_measure_general(&xi_n, &pn, cfg)?;
        let mut plus_atoms = Vec::new();
        let mut minus_atoms = Vec::new();
        for &(x, w) in rho_n.atoms() {
            let is_plus_twin = twins.iter().any(|&(p, _)| (x - p).abs() < 1e-10);
            let is_minus_twin = twins.iter().any(|&(_, m)| (x - m).abs() < 1e-10);
            if is_plus_twin {
                plus_atoms.push((x, w));
            } else if is_minus_twin {
                minus_atoms.push((x, w));
            } else {
                // untouched atom: its g target is 0 or 1
                let gap_idx = input_gaps.iter().position(|g| g.contains(x));
                let g_target = gap_idx
                    .and_then(|gi| {
                        input_atoms
                            .iter()
                            .position(|&ax| input_gaps[gi].contains(ax))
                            .map(|i| input.g_targets[i])
                    })
                    .unwrap_or(1.0);
                if g_target >= 0.5 {
                    plus_atoms.push((x, w));
                } else {
                    minus_atoms.push((x, w));
                }
            }
        }
        let half: Vec<_> = rho_n.bands().iter().map(|b| b.scaled(0.5)).collect();
        let nu_plus_n = SpectralMeasure::new(plus_atoms, half.clone())?;
        let nu_minus_n = SpectralMeasure::new(minus_atoms, half)?;
        let a_const = krein::constant_a(&xi_n);
        let rec = reconstruct_from_halfline(&nu_plus_n, &nu_minus_n, a_const, depth)?;

        let refl = {
            let src = SpectralDataResolvent {
                xi: &xi_n,
                nu_plus: &nu_plus_n,
                nu_minus: &nu_minus_n,
                jacobi: &rec.jacobi,
            };
            is_reflectionless(&src, &pn, 1e-3, -2..=2, 1e-2, 24, cfg)?
        };

        let diagnostics = StageDiagnostics {
            n: plan.n,
            delta: plan.delta,
            coefficient_distance: jacobi_distance(&rec.jacobi, &reference.jacobi, depth - 1),
            symmdiff: lebesgue_symmdiff(&pn, &input.set),
            nu_plus_distance: weak_star_distance(&nu_plus_n, &nu_plus_ref, input.set.radius()),
            reflectionless: refl,
        };
        out.push(StageOutput {
            set: pn,
            xi: xi_n,
            reconstruction: rec,
            nu_plus: nu_plus_n,
            nu_minus: nu_minus_n,
            diagnostics,
        });
    }
    Ok(out)
}

/// Carries torus data from K to a nearby set K': each gap of K above the
/// length floor must have a gap of K' within the 1/10 clearance rule; the
/// matched gap keeps μ (clamped to the moved endpoint when μ sits at an
/// endpoint) and σ. Unmatched gaps of K' get μ at the right endpoint (ξ = 0).
pub fn transport_torus_data(
    k: &FiniteGapSet,
    k2: &FiniteGapSet,
    p: &TorusPoint,
    length_floor: f64,
) -> Result<TorusPoint> {
    p.validate(k)?;
    let gaps2 = k2.gaps();
    let mut mus2: Vec<f64> = gaps2.iter().map(|g| g.hi).collect();
    let mut sig2: Vec<u8> = vec![1; gaps2.len()];
    let mut used = vec![false; gaps2.len()];
    for (gap, (&mu, &s)) in k.gaps().iter().zip(p.mus.iter().zip(&p.sigmas)) {
        if gap.length() < length_floor {
            continue;
        }
        let clearance = if mu > gap.lo && mu < gap.hi {
            0.1 * (gap.hi - mu).min(mu - gap.lo)
        } else {
            0.1 * gap.length()
        };
        let candidate = gaps2.iter().enumerate().find(|(i, g)| {
            !used[*i] && (g.lo - gap.lo).abs() + (g.hi - gap.hi).abs() < clearance
        });
        let (idx, g2) = candidate.ok_or(Error::GapMatchingFailed {
            lo: gap.lo,
            hi: gap.hi,
        })?;
        used[idx] = true;
        mus2[idx] = if (mu - gap.lo).abs() == 0.0 {
            g2.lo
        } else if (mu - gap.hi).abs() == 0.0 {
            g2.hi
        } else {
            mu.clamp(g2.lo, g2.hi)
        };
        sig2[idx] = s;
    }
    let out = TorusPoint {
        mus: mus2,
        sigmas: sig2,
    };
    out.validate(k2)?;
    Ok(out)
}
