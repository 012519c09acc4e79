use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::order::BranchSelectConfig;
use crate::saabf::{OffsetPolicy, SaabfAdaptation};
use crate::uwb::SystemConfig;

/// Run-time order adaptation attached to a SAABF receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderSearch {
    Rank { d_min: usize, d_max: usize, lambda: f64 },
    BlockLen { q_min: usize, q_max: usize, lambda: f64 },
}

/// Tolerance of the branch search, either as a squared error or in dB above
/// the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Linear(f64),
    Db(f64),
}

/// Early-stopping branch search. A missing target means "use the exact
/// Wiener MMSE of the trial".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSearch {
    pub c_min: usize,
    pub c_max: usize,
    pub gamma: Tolerance,
    pub e_target_sq: Option<f64>,
}

impl BranchSearch {
    pub fn resolve(&self, mmse: f64) -> BranchSelectConfig {
        let target = self.e_target_sq.unwrap_or(mmse);
        let gamma = match self.gamma {
            Tolerance::Linear(g) => g,
            // target + γ = target · 10^(γ_dB / 10)
            Tolerance::Db(db) => target * (10f64.powf(db / 10.0) - 1.0),
        };
        BranchSelectConfig {
            c_min: self.c_min,
            c_max: self.c_max,
            gamma,
            e_target_sq: target,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaabfParams {
    pub branches: usize,
    pub rank: usize,
    /// `None` means `q = M` with a single unconstrained branch.
    pub q: Option<usize>,
    pub adaptation: SaabfAdaptation,
    pub freeze_psi: bool,
    pub branch_search: Option<BranchSearch>,
    pub order: Option<OrderSearch>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    FullLms {
        mu: f64,
    },
    FullRls {
        lambda: f64,
        delta: f64,
    },
    GenericLms {
        rank: usize,
        mu_w: f64,
        mu_t: f64,
        n_iter: usize,
    },
    GenericRls {
        rank: usize,
        lambda: f64,
        delta_w: f64,
        delta_t: f64,
        n_iter: usize,
    },
    Saabf(SaabfParams),
    Wiener,
}

/// One receiver of an experiment with its display label.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub label: String,
    pub algorithm: Algorithm,
}

struct Params<'a> {
    tag: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
    used: Vec<bool>,
}

impl<'a> Params<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        let idx = self.pairs.iter().position(|(k, _)| *k == key)?;
        self.used[idx] = true;
        Some(self.pairs[idx].1)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(format!("{}: cannot parse {key}={v}", self.tag))),
        }
    }

    fn get<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::config(format!("{}: missing required parameter {key}", self.tag)))
    }

    fn finish(self) -> Result<()> {
        match self.pairs.iter().zip(&self.used).find(|(_, used)| !**used) {
            Some(((k, _), _)) => Err(Error::config(format!("{}: unknown parameter {k}", self.tag))),
            None => Ok(()),
        }
    }
}

const LAMBDA: f64 = 0.998;
const DELTA: f64 = 10.0;

fn parse_saabf(p: &mut Params, rls: bool) -> Result<SaabfParams> {
    let branches = p.get("C", 1)?;
    let rank = p.require("D")?;
    let q = match p.take("q") {
        None => return Err(Error::config(format!("{}: missing required parameter q", p.tag))),
        Some("M") => None,
        Some(v) => Some(
            v.parse()
                .map_err(|_| Error::config(format!("{}: cannot parse q={v}", p.tag)))?,
        ),
    };
    let adaptation = if rls {
        SaabfAdaptation::Rls {
            lambda: p.get("lambda", LAMBDA)?,
            delta_w: p.get("delta_w", DELTA)?,
            delta_psi: p.get("delta_psi", DELTA)?,
        }
    } else {
        SaabfAdaptation::Lms {
            mu_w: p.get("mu_w", 0.15)?,
            mu_psi: p.get("mu_psi", 0.15)?,
        }
    };
    let freeze_psi = p.get("freeze_psi", false)?;
    let branch_search = match p.parse::<usize>("c_min")? {
        None => None,
        Some(c_min) => {
            let c_max = p.get("c_max", branches)?;
            let gamma = match (p.parse::<f64>("gamma")?, p.parse::<f64>("gamma_db")?) {
                (Some(g), None) => Tolerance::Linear(g),
                (None, Some(db)) => Tolerance::Db(db),
                _ => return Err(Error::config(format!("{}: give exactly one of gamma, gamma_db", p.tag))),
            };
            Some(BranchSearch {
                c_min,
                c_max,
                gamma,
                e_target_sq: p.parse("target")?,
            })
        }
    };
    let rank_search = p.parse::<usize>("d_min")?;
    let q_search = p.parse::<usize>("q_min")?;
    let order = match (rank_search, q_search) {
        (Some(_), Some(_)) => {
            return Err(Error::config(format!(
                "{}: adapt either the rank or q, not both",
                p.tag
            )));
        }
        (Some(d_min), None) => Some(OrderSearch::Rank {
            d_min,
            d_max: p.require("d_max")?,
            lambda: p.get("lambda_d", LAMBDA)?,
        }),
        (None, Some(q_min)) => Some(OrderSearch::BlockLen {
            q_min,
            q_max: p.require("q_max")?,
            lambda: p.get("lambda_q", LAMBDA)?,
        }),
        (None, None) => None,
    };
    if order.is_some() && branch_search.is_some() {
        return Err(Error::config(format!(
            "{}: branch-count search and order adaptation are exclusive",
            p.tag
        )));
    }
    Ok(SaabfParams {
        branches,
        rank,
        q,
        adaptation,
        freeze_psi,
        branch_search,
        order,
    })
}

impl AlgorithmSpec {
    /// Parses `"<tag> key=value ..."`, for instance
    /// `"saabf-rls C=8 D=3 q=3 lambda=0.998"` or `"full-lms mu=0.075"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let tag = words
            .next()
            .ok_or_else(|| Error::config("empty algorithm description"))?;
        let mut pairs = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::config(format!("{tag}: expected key=value, got `{w}`")))?;
            pairs.push((k, v));
        }
        let used = vec![false; pairs.len()];
        let mut p = Params { tag, pairs, used };
        let label = p.take("label").map(str::to_string);
        let algorithm = match tag {
            "full-lms" => Algorithm::FullLms {
                mu: p.get("mu", 0.075)?,
            },
            "full-rls" => Algorithm::FullRls {
                lambda: p.get("lambda", LAMBDA)?,
                delta: p.get("delta", DELTA)?,
            },
            "generic-lms" => Algorithm::GenericLms {
                rank: p.require("D")?,
                mu_w: p.get("mu_w", 0.15)?,
                mu_t: p.get("mu_t", 0.15)?,
                n_iter: p.get("iters", 1)?,
            },
            "generic-rls" => Algorithm::GenericRls {
                rank: p.require("D")?,
                lambda: p.get("lambda", LAMBDA)?,
                delta_w: p.get("delta_w", DELTA)?,
                delta_t: p.get("delta_t", DELTA)?,
                n_iter: p.get("iters", 1)?,
            },
            "saabf-lms" => Algorithm::Saabf(parse_saabf(&mut p, false)?),
            "saabf-rls" => Algorithm::Saabf(parse_saabf(&mut p, true)?),
            "wiener" => Algorithm::Wiener,
            other => return Err(Error::UnknownAlgorithm(other.to_string())),
        };
        p.finish()?;
        let label = label.unwrap_or_else(|| text.split_whitespace().collect::<Vec<_>>().join(" "));
        if label.contains(',') || label.contains(':') {
            return Err(Error::config(format!("label `{label}` may not contain ',' or ':'")));
        }
        Ok(AlgorithmSpec { label, algorithm })
    }

    /// Complexity tag and `(M, D, q, C)` for the cost table; `None` for the
    /// oracle. Iterative generic schemes scale by their iteration count.
    pub fn complexity_args(&self, m: usize) -> Option<(&'static str, usize, usize, usize, usize, u64)> {
        match &self.algorithm {
            Algorithm::FullLms { .. } => Some(("full-lms", m, 1, 1, 1, 1)),
            Algorithm::FullRls { .. } => Some(("full-rls", m, 1, 1, 1, 1)),
            Algorithm::GenericLms { rank, n_iter, .. } => Some(("generic-lms", m, *rank, m, 1, *n_iter as u64)),
            Algorithm::GenericRls { rank, n_iter, .. } => Some(("generic-rls", m, *rank, m, 1, *n_iter as u64)),
            Algorithm::Saabf(s) => {
                let tag = match s.adaptation {
                    SaabfAdaptation::Lms { .. } => "saabf-lms",
                    SaabfAdaptation::Rls { .. } => "saabf-rls",
                };
                let (rank, q) = match s.order {
                    Some(OrderSearch::Rank { d_max, .. }) => (d_max, s.q.unwrap_or(m)),
                    Some(OrderSearch::BlockLen { q_max, .. }) => (s.rank, q_max),
                    None => (s.rank, s.q.unwrap_or(m)),
                };
                Some((tag, m, rank, q, s.branches, 1))
            }
            Algorithm::Wiener => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DataMode {
    /// Adaptation continues on detected symbols.
    #[default]
    DecisionDirected,
    /// Filters are frozen after training.
    Frozen,
    /// Adaptation continues on the true symbols.
    Training,
}

/// How switched receivers pick the branch they detect with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BranchDetection {
    /// Branch nearest the constellation; needs no reference.
    #[default]
    Blind,
    /// Branch selected against the reference symbol whenever the receiver is
    /// given one (training, or `data_mode = "training"`). Optimistic: the
    /// decision sees the symbol it is scored against.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    NumUsers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Desk,
    Full,
}

/// The on-disk schema: a flat TOML table.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    #[serde(default = "default_preset")]
    preset: Preset,
    num_users: usize,
    snr_db: f64,
    spreading_gain: Option<usize>,
    symbol_duration: Option<f64>,
    chip_duration: Option<f64>,
    tap_spacing: Option<f64>,
    delay_spread: Option<f64>,
    rrc_rolloff: Option<f64>,
    user_energies: Option<Vec<f64>>,
    #[serde(default)]
    cir_files: Vec<PathBuf>,
    #[serde(default = "default_trials")]
    num_trials: usize,
    #[serde(default = "default_symbols")]
    num_training_symbols: usize,
    #[serde(default)]
    num_data_symbols: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_window")]
    window: usize,
    #[serde(default)]
    data_mode: DataMode,
    #[serde(default)]
    branch_detection: BranchDetection,
    #[serde(default)]
    offset_policy: OffsetPolicy,
    sweep: Option<SweepAxis>,
    #[serde(default)]
    sweep_values: Vec<f64>,
    algorithms: Vec<String>,
}

fn default_preset() -> Preset {
    Preset::Desk
}
fn default_trials() -> usize {
    200
}
fn default_symbols() -> usize {
    500
}
fn default_seed() -> u64 {
    1
}
fn default_window() -> usize {
    50
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub system: SystemConfig,
    pub cir_files: Vec<PathBuf>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub num_trials: usize,
    pub num_training_symbols: usize,
    pub num_data_symbols: usize,
    pub seed: u64,
    /// Length of the window that closes the training phase and defines the
    /// final MSE.
    pub window: usize,
    pub data_mode: DataMode,
    pub branch_detection: BranchDetection,
    pub offset_policy: OffsetPolicy,
    pub sweep: Option<Sweep>,
    /// SHA-256 of the source text, hex encoded.
    pub source_hash: String,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| Error::config(e.message().to_string()))?;
        let mut system = match raw.preset {
            Preset::Desk => SystemConfig::desk(raw.num_users, raw.snr_db),
            Preset::Full => SystemConfig::full_scale(raw.num_users, raw.snr_db),
        };
        if let Some(n) = raw.spreading_gain {
            system.spreading_gain = n;
            system.user_energies = vec![1.0 / n as f64; raw.num_users];
        }
        macro_rules! apply {
            ($($field:ident),*) => {$(if let Some(v) = raw.$field { system.$field = v; })*};
        }
        apply!(
            symbol_duration,
            chip_duration,
            tap_spacing,
            delay_spread,
            rrc_rolloff,
            user_energies
        );
        system.seed = raw.seed;
        let algorithms = raw
            .algorithms
            .iter()
            .map(|s| AlgorithmSpec::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let sweep = match raw.sweep {
            Some(axis) => Some(Sweep {
                axis,
                values: raw.sweep_values,
            }),
            None if raw.sweep_values.is_empty() => None,
            None => return Err(Error::config("sweep_values given without a sweep axis")),
        };
        let spec = ExperimentSpec {
            name: raw.name,
            system,
            cir_files: raw.cir_files,
            algorithms,
            num_trials: raw.num_trials,
            num_training_symbols: raw.num_training_symbols,
            num_data_symbols: raw.num_data_symbols,
            seed: raw.seed,
            window: raw.window,
            data_mode: raw.data_mode,
            branch_detection: raw.branch_detection,
            offset_policy: raw.offset_policy,
            sweep,
            source_hash: hex(&Sha256::digest(text.as_bytes())),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut spec = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(message) => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for f in &mut spec.cir_files {
            if f.is_relative() {
                *f = base.join(&*f);
            }
        }
        Ok(spec)
    }

    /// System configuration at one sweep point.
    pub fn system_at(&self, value: Option<f64>) -> Result<SystemConfig> {
        let mut cfg = self.system.clone();
        if let (Some(sweep), Some(v)) = (&self.sweep, value) {
            match sweep.axis {
                SweepAxis::SnrDb => cfg.snr_db = v,
                SweepAxis::NumUsers => {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(Error::config(format!("user count {v} is not a positive integer")));
                    }
                    let energy = cfg
                        .user_energies
                        .first()
                        .copied()
                        .unwrap_or(1.0 / cfg.spreading_gain as f64);
                    cfg.num_users = v as usize;
                    cfg.user_energies = vec![energy; cfg.num_users];
                }
            }
        }
        Ok(cfg)
    }

    /// Sweep points; a single `None` when there is no sweep.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(Error::config("num_trials must be at least 1"));
        }
        if self.num_training_symbols == 0 {
            return Err(Error::config("num_training_symbols must be at least 1"));
        }
        if self.window == 0 || self.window > self.num_training_symbols {
            return Err(Error::config(format!(
                "window {} must lie in 1..={}",
                self.window, self.num_training_symbols
            )));
        }
        if self.sweep.is_some() && self.num_data_symbols == 0 {
            return Err(Error::config(
                "sweeps report data-phase BER: num_data_symbols must be positive",
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("no algorithms listed"));
        }
        let mut labels: Vec<&str> = self.algorithms.iter().map(|a| a.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("algorithm labels must be distinct"));
        }
        for point in self.points() {
            let cfg = self.system_at(point)?;
            let dims = cfg.dims()?;
            if !self.cir_files.is_empty() && self.cir_files.len() != dims.k {
                return Err(Error::config(format!(
                    "{} CIR files for {} users",
                    self.cir_files.len(),
                    dims.k
                )));
            }
            for a in &self.algorithms {
                // Building one instance checks every module precondition.
                super::receiver::Receiver::build(
                    a,
                    dims.m,
                    self.offset_policy,
                    &super::receiver::TrialOracle::placeholder(dims.m),
                )?;
            }
        }
        Ok(())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
