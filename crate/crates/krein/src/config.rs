//! Numerical knobs shared across the forward map, reconstruction, and the
//! reflectionless verifier. Everything here is a default that callers (and
//! the CLI profile) may override; nothing is baked into the algorithms.

/// Tunable resolution and tolerance settings.
#[derive(Debug, Clone)]
pub struct Config {
    /// Chebyshev nodes per band when extracting measures.
    pub nodes_per_band: usize,
    /// Window size (sites) for whole-line operator representations.
    pub window: usize,
    /// Minimum distance (sites) from a window edge for resolvent evaluation.
    pub edge_margin: usize,
    /// Snap tolerance for fitting step functions to sampled ξ values.
    pub snap_tol: f64,
    /// Height used when sampling boundary values for ξ fits.
    pub xi_probe_y: f64,
    /// Height ladder for numeric y→0+ limits (used by oracles/diagnostics).
    pub limit_ladder: [f64; 3],
    /// Fraction of each band excluded at both ends by the reflectionless
    /// verifier; the y-regularized boundary layer dominates closer in.
    pub edge_exclusion_frac: f64,
    /// Imaginary offset for locating gap zeros of the Green function.
    pub bisection_y: f64,
    /// Height used for residue probes when assigning σ flags.
    pub residue_y: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            nodes_per_band: 256,
            window: 400,
            edge_margin: 50,
            snap_tol: 0.02,
            xi_probe_y: 1e-5,
            limit_ladder: [1e-4, 1e-5, 1e-6],
            edge_exclusion_frac: 0.15,
            bisection_y: 1e-9,
            residue_y: 1e-6,
        }
    }
}

impl Config {
    /// Higher-resolution profile (more nodes, larger windows).
    pub fn strict() -> Self {
        Config {
            nodes_per_band: 512,
            window: 800,
            ..Config::default()
        }
    }

    /// Profile by name; `KREIN_PROFILE=strict` selects [`Config::strict`].
    pub fn from_profile(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Config::default()),
            "strict" => Some(Config::strict()),
            _ => None,
        }
    }

    /// Reads the profile from the `KREIN_PROFILE` environment variable.
    pub fn from_env() -> Self {
        std::env::var("KREIN_PROFILE")
            .ok()
            .and_then(|s| Config::from_profile(&s))
            .unwrap_or_default()
    }
}
