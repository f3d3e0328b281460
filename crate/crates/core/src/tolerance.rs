/// Numerical thresholds used across the crate. Defaults are the documented
/// library defaults; every field may be overridden by callers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermitian-symmetry check for eigensolver inputs.
    pub hermitian: f64,
    /// Negative eigenvalues above `-psd` are clamped to zero.
    pub psd: f64,
    /// Relative rank cutoff (times the largest eigenvalue).
    pub rank_rel: f64,
    /// Absolute floor of the rank cutoff.
    pub rank_abs: f64,
    /// Relative residual below which a target counts as in range.
    pub residual: f64,
    /// Norm-equality tolerance for exact solves.
    pub norm: f64,
    /// Identity ‖Tx‖² = [𝐓♯x, 𝐓♯x] deviation bound.
    pub isometry: f64,
    /// Tolerance of the two-sided pull-back norm equality on 𝔐_ε.
    pub equality: f64,
    /// Slack allowed in monotonicity checks.
    pub monotone: f64,
    /// δ* at or below this is reported as not uniformly positive.
    pub positivity: f64,
    /// Slack on the uniform positivity lower bound.
    pub lemma: f64,
    /// Eigenvalues within this distance of ε count as ≤ ε.
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            psd: 1e-9,
            rank_rel: 1e-10,
            rank_abs: 1e-14,
            residual: 1e-8,
            norm: 1e-8,
            isometry: 1e-9,
            equality: 1e-7,
            monotone: 1e-10,
            positivity: 1e-12,
            lemma: 1e-9,
            tie: 1e-12,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 12] = [
        "hermitian",
        "psd",
        "rank_rel",
        "rank_abs",
        "residual",
        "norm",
        "isometry",
        "equality",
        "monotone",
        "positivity",
        "lemma",
        "tie",
    ];

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "hermitian" => self.hermitian,
            "psd" => self.psd,
            "rank_rel" => self.rank_rel,
            "rank_abs" => self.rank_abs,
            "residual" => self.residual,
            "norm" => self.norm,
            "isometry" => self.isometry,
            "equality" => self.equality,
            "monotone" => self.monotone,
            "positivity" => self.positivity,
            "lemma" => self.lemma,
            "tie" => self.tie,
            _ => return None,
        })
    }

    /// Sets one named threshold; returns `false` for an unknown key.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "hermitian" => &mut self.hermitian,
            "psd" => &mut self.psd,
            "rank_rel" => &mut self.rank_rel,
            "rank_abs" => &mut self.rank_abs,
            "residual" => &mut self.residual,
            "norm" => &mut self.norm,
            "isometry" => &mut self.isometry,
            "equality" => &mut self.equality,
            "monotone" => &mut self.monotone,
            "positivity" => &mut self.positivity,
            "lemma" => &mut self.lemma,
            "tie" => &mut self.tie,
            _ => return false,
        };
        *slot = value;
        true
    }

    /// Rank cutoff for a PSD spectrum whose largest eigenvalue is `lambda_max`.
    pub fn rank_cutoff(&self, lambda_max: f64) -> f64 {
        (self.rank_rel * lambda_max).max(self.rank_abs)
    }

    /// Uniformly scales every threshold; useful for single precision.
    pub fn relaxed(mut self, factor: f64) -> Self {
        for key in Self::KEYS {
            let v = self.get(key).unwrap();
            self.set(key, v * factor);
        }
        self
    }
}
