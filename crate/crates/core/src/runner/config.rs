use serde::{Deserialize, Serialize};

use super::RunError;
use crate::ict::{Budget, SearchMode};
use crate::qe::Rule;
use crate::vc::Recipe;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    IctSearch,
    InpCheck,
    Breakpoints,
    VcProfile,
    Qe,
    HahnVerify,
    PadicVerify,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::IctSearch => "ict-search",
            Kind::InpCheck => "inp-check",
            Kind::Breakpoints => "breakpoints",
            Kind::VcProfile => "vc-profile",
            Kind::Qe => "qe",
            Kind::HahnVerify => "hahn-verify",
            Kind::PadicVerify => "padic-verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ict: Option<IctConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inp: Option<InpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<BreakpointConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vc: Option<VcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qe: Option<QeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hahn: Option<HahnConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padic: Option<PadicConfig>,
}

fn x() -> String {
    "x".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Present,
    Absent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IctConfig {
    #[serde(default = "x")]
    pub element_var: String,
    pub phi: String,
    pub phi_params: Vec<String>,
    pub psi: String,
    pub psi_params: Vec<String>,
    /// Explicit pools of parameter tuples.
    #[serde(default)]
    pub pool_a: Vec<Vec<String>>,
    #[serde(default)]
    pub pool_b: Vec<Vec<String>>,
    /// Alternatively every ordered pair of grid points feeds both pools.
    #[serde(default)]
    pub endpoint_grid: Vec<String>,
    pub m: usize,
    pub n: usize,
    #[serde(default = "exhaustive")]
    pub mode: String,
    #[serde(default)]
    pub tries: u64,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
}

fn exhaustive() -> String {
    "exhaustive".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InpConfig {
    #[serde(default = "x")]
    pub element_var: String,
    pub phi: String,
    pub phi_params: Vec<String>,
    pub psi: String,
    pub psi_params: Vec<String>,
    pub k0: usize,
    pub k1: usize,
    pub a_params: Vec<Vec<String>>,
    pub b_params: Vec<Vec<String>>,
    pub witnesses: Vec<Vec<String>>,
    #[serde(default = "max_subsets")]
    pub max_subsets: u64,
    #[serde(default = "yes")]
    pub expect_valid: bool,
}

fn max_subsets() -> u64 {
    100_000
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakpointConfig {
    #[serde(default = "x")]
    pub element_var: String,
    pub deltas: Vec<String>,
    pub tuple_vars: Vec<String>,
    pub c: String,
    pub sequence: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_blocks: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSpec {
    pub formula: String,
    #[serde(default)]
    pub params: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VcConfig {
    #[serde(default = "x")]
    pub element_var: String,
    #[serde(default)]
    pub deltas: Vec<DeltaSpec>,
    #[serde(default = "delta_id")]
    pub delta_id: String,
    pub recipe: Recipe,
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_tolerance: Option<f64>,
}

fn delta_id() -> String {
    "delta".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QeConfig {
    pub rule: Rule,
    #[serde(default = "oracle_grid")]
    pub oracle_grid: usize,
    /// Eliminate this formula instead of running the block corpus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default)]
    pub blocks: usize,
    #[serde(default = "yes")]
    pub include_regression: bool,
    /// Expect agreement with the oracle (true) or a non-empty disagreement
    /// report that flags the regression block (false).
    #[serde(default = "yes")]
    pub expect_agreement: bool,
}

fn oracle_grid() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HahnConfig {
    pub samples: usize,
    #[serde(default = "required_axioms")]
    pub axioms: Vec<String>,
}

fn required_axioms() -> Vec<String> {
    ["3", "5", "5'", "6", "7", "8", "8'"].iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadicConfig {
    pub primes: Vec<u64>,
    #[serde(default)]
    pub ks: Vec<u32>,
    #[serde(default = "precision")]
    pub precision: u32,
    #[serde(default)]
    pub triples: usize,
    #[serde(default)]
    pub ns: Vec<u32>,
    #[serde(default = "bound")]
    pub bound: u32,
    /// Expected least k as [p, n, k] triples.
    #[serde(default)]
    pub expect_k: Vec<[u64; 3]>,
}

fn precision() -> u32 {
    12
}

fn bound() -> u32 {
    8
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, RunError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        let needs_structure = matches!(self.kind, Kind::IctSearch | Kind::InpCheck | Kind::Breakpoints | Kind::VcProfile);
        if needs_structure {
            match &self.structure {
                None => return bad(format!("{} needs `structure`", self.kind.as_str())),
                Some(s) if crate::structures::by_name(s).is_none() => return bad(format!("unknown structure `{s}`")),
                _ => {}
            }
        }
        let section = match self.kind {
            Kind::IctSearch => self.ict.is_some(),
            Kind::InpCheck => self.inp.is_some(),
            Kind::Breakpoints => self.breakpoints.is_some(),
            Kind::VcProfile => self.vc.is_some(),
            Kind::Qe => self.qe.is_some(),
            Kind::HahnVerify => self.hahn.is_some(),
            Kind::PadicVerify => self.padic.is_some(),
        };
        if !section {
            return bad(format!("{} needs its [{}] table", self.kind.as_str(), self.section_name()));
        }
        if self.randomized() && self.seed.is_none() {
            return bad(format!("{} draws random data and needs `seed`", self.kind.as_str()));
        }
        if let Some(ict) = &self.ict {
            if ict.mode != "exhaustive" && ict.mode != "random" {
                return bad(format!("ict.mode must be exhaustive or random, not `{}`", ict.mode));
            }
            if ict.endpoint_grid.is_empty() && (ict.pool_a.is_empty() || ict.pool_b.is_empty()) {
                return bad("ict needs pool_a and pool_b or an endpoint_grid".into());
            }
        }
        if let Some(vc) = &self.vc {
            if vc.sizes.len() < 2 || vc.sizes.windows(2).any(|w| w[0] >= w[1]) {
                return bad("vc.sizes must be strictly increasing with at least two entries".into());
            }
        }
        if let Some(qe) = &self.qe {
            if qe.formula.is_none() && qe.blocks == 0 && !qe.include_regression {
                return bad("qe needs a formula or a block corpus".into());
            }
        }
        Ok(())
    }

    fn section_name(&self) -> &'static str {
        match self.kind {
            Kind::IctSearch => "ict",
            Kind::InpCheck => "inp",
            Kind::Breakpoints => "breakpoints",
            Kind::VcProfile => "vc",
            Kind::Qe => "qe",
            Kind::HahnVerify => "hahn",
            Kind::PadicVerify => "padic",
        }
    }

    /// Whether the run draws seeded random data.
    pub fn randomized(&self) -> bool {
        match self.kind {
            Kind::IctSearch => self.ict.as_ref().is_some_and(|c| c.mode == "random"),
            Kind::VcProfile => self.vc.as_ref().is_some_and(|c| c.recipe == Recipe::Random),
            Kind::Qe => self.qe.as_ref().is_some_and(|c| c.formula.is_none() && c.blocks > 0),
            Kind::HahnVerify => true,
            Kind::PadicVerify => self.padic.as_ref().is_some_and(|c| c.triples > 0),
            Kind::InpCheck | Kind::Breakpoints => false,
        }
    }

    pub(crate) fn search_mode(&self) -> SearchMode {
        match self.ict.as_ref().map(|c| c.mode.as_str()) {
            Some("random") => SearchMode::Random {
                seed: self.seed.unwrap_or(0),
                tries: self.ict.as_ref().map_or(0, |c| c.tries),
            },
            _ => SearchMode::Exhaustive,
        }
    }
}
