//! Experiment configuration: a flat TOML file with decimal scalars and
//! string enums, validated into field-level diagnostics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub domain: DomainSection,
    #[serde(default)]
    pub integrand: IntegrandSection,
    #[serde(default)]
    pub regularization: RegularizationSection,
    #[serde(default)]
    pub boundary: BoundarySection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Prop2Sharpness,
    Prop2Bound,
    Counterexample,
    Theorem1Sweep,
    CaccioppoliRefinement,
    Lemma21Suite,
    HolefillingSuite,
    SlicePickSuite,
    MinimizeSingle,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Prop2Sharpness => "prop2-sharpness",
            ExperimentKind::Prop2Bound => "prop2-bound",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::Theorem1Sweep => "theorem1-sweep",
            ExperimentKind::CaccioppoliRefinement => "caccioppoli-refinement",
            ExperimentKind::Lemma21Suite => "lemma21-suite",
            ExperimentKind::HolefillingSuite => "holefilling-suite",
            ExperimentKind::SlicePickSuite => "slice-pick-suite",
            ExperimentKind::MinimizeSingle => "minimize-single",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub resolution: usize,
}

impl Default for DomainSection {
    fn default() -> Self {
        DomainSection { resolution: 64 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrandSection {
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    pub nu: f64,
    pub nu_tilde: f64,
}

impl Default for IntegrandSection {
    fn default() -> Self {
        IntegrandSection { p: 2.0, q: 4.0, mu: 1.0, nu: 1.0, nu_tilde: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationSection {
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
}

impl Default for RegularizationSection {
    fn default() -> Self {
        // eps_k = delta_k = 0.1 * 2^{-k}
        let sched: Vec<f64> = (0..4).map(|k| 0.1 * 0.5_f64.powi(k)).collect();
        RegularizationSection { eps: sched.clone(), delta: sched }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub family: String,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub scale: f64,
    #[serde(default)]
    pub xi: Vec<f64>,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub kmax: u32,
}

impl Default for BoundarySection {
    fn default() -> Self {
        BoundarySection {
            family: "smooth-bump".into(),
            amplitude: 1.0,
            scale: 0.1,
            xi: vec![1.0, 0.0],
            lambda: 100.0,
            seed: 1,
            kmax: 3,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub qs: Vec<f64>,
    #[serde(default)]
    pub resolutions: Vec<usize>,
    #[serde(default)]
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub const BOUNDARY_FAMILIES: &[&str] = &[
    "affine",
    "quadratic-harmonic",
    "counterexample",
    "smooth-bump",
    "random-bandlimited",
];

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Non-throwing validation; returns field-level diagnostics.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |field: &str, message: String| {
            out.push(Diagnostic { field: field.into(), message });
        };
        let ig = &self.integrand;
        if !(ig.p > 1.0) {
            diag("integrand.p", format!("p = {} must exceed 1", ig.p));
        }
        if ig.q < ig.p {
            diag("integrand.q", format!("q = {} must be >= p = {}", ig.q, ig.p));
        }
        let theorem_mode = matches!(
            self.experiment.kind,
            ExperimentKind::Theorem1Sweep | ExperimentKind::MinimizeSingle | ExperimentKind::CaccioppoliRefinement
        );
        if theorem_mode {
            let qs: Vec<f64> = if self.sweep.qs.is_empty() { vec![ig.q] } else { self.sweep.qs.clone() };
            for q in qs {
                if q >= 3.0 * ig.p {
                    diag(
                        "integrand.q",
                        format!("q = {q} >= 3p = {}; the Lipschitz exponent relation requires q < 3p", 3.0 * ig.p),
                    );
                }
            }
        }
        if ig.nu_tilde > 0.0 {
            if !(ig.mu > 0.0 && ig.mu <= 2.0) {
                diag("integrand.mu", format!("mu = {} out of (0, 2] for the q-floor mode", ig.mu));
            }
        } else if !(0.0..=1.0).contains(&ig.mu) {
            diag("integrand.mu", format!("mu = {} out of [0, 1]", ig.mu));
        }
        for (name, seq) in [("regularization.eps", &self.regularization.eps), ("regularization.delta", &self.regularization.delta)] {
            if seq.is_empty() {
                diag(name, "schedule is empty".into());
            }
            if seq.windows(2).any(|w| w[1] >= w[0]) {
                diag(name, format!("schedule not strictly decreasing: {seq:?}"));
            }
            if seq.iter().any(|&v| !(0.0..1.0).contains(&v) || v == 0.0) {
                diag(name, format!("schedule values must lie in (0, 1): {seq:?}"));
            }
        }
        if self.regularization.eps.len() != self.regularization.delta.len() {
            diag("regularization", "eps and delta schedules must have equal length".into());
        }
        if !BOUNDARY_FAMILIES.contains(&self.boundary.family.as_str()) {
            diag(
                "boundary.family",
                format!("unknown boundary family '{}'; known: {:?}", self.boundary.family, BOUNDARY_FAMILIES),
            );
        }
        if self.domain.resolution < 8 {
            diag("domain.resolution", format!("resolution {} below the minimum 8", self.domain.resolution));
        }
        if matches!(self.experiment.kind, ExperimentKind::Prop2Sharpness) && self.sweep.lambdas.len() < 3 {
            diag("sweep.lambdas", "sharpness scan needs at least 3 contrast values".into());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[experiment]
name = "t"
kind = "counterexample"
seed = 1

[sweep]
lambdas = [1.0, 10.0, 100.0]
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.experiment.kind, ExperimentKind::Counterexample);
        assert!(cfg.validate().is_empty());
    }

    #[test]
    fn diagnostics_for_bad_schedule_and_family() {
        let mut cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        cfg.regularization.delta = vec![0.1, 0.2];
        cfg.boundary.family = "sawtooth".into();
        let diags = cfg.validate();
        assert!(diags.iter().any(|d| d.field == "regularization.delta" && d.message.contains("not strictly decreasing")));
        assert!(diags.iter().any(|d| d.field == "boundary.family"));
    }

    #[test]
    fn diagnostics_for_exponent_relation() {
        let mut cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        cfg.experiment.kind = ExperimentKind::Theorem1Sweep;
        cfg.integrand.q = 6.0; // q = 3p excluded
        let diags = cfg.validate();
        assert!(diags.iter().any(|d| d.field == "integrand.q" && d.message.contains("q < 3p")));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ExperimentConfig::parse("[experiment]\nname = \"x\"\nkind = \"counterexample\"\nbogus = 1\n").is_err());
    }
}
