//! Run configuration files.
//!
//! Flat `key = value` text (see [`crate::kv`]) with at most one level of `include`.
//! Keys in the including file win over included ones; relative paths resolve against
//! the directory of the file that names them.
//!
//! ```text
//! include = base.cfg
//! model = bilinear        # aklt | aklt-prime | bilinear
//! n = 6
//! theta = 0.15
//! plan.site.3 = z 0.7 adaptive
//! seed = 7
//! rounds = 100000
//! sweep.theta = -0.6:0.6:7
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kv;
use crate::mbqc::MeasurementPlan;
use crate::qcore::spin::Axis;
use crate::states::HamiltonianParams;

/// Environment variable that overrides the output directory named in a config file.
pub const OUT_ENV: &str = "SPTMBQC_OUT";
pub const DEFAULT_OUT: &str = "sptmbqc-out";

const KNOWN_KEYS: &[&str] = &[
    "include",
    "model",
    "n",
    "theta",
    "d_x",
    "d_z",
    "j_left",
    "j_right",
    "state_file",
    "plan",
    "seed",
    "rounds",
    "out",
    "jobs",
    "tolerance.exact",
    "tolerance.sigmas",
    "bundle",
    "verify.sequences",
    "sweep.theta",
    "sweep.d_x",
    "sweep.d_z",
    "sweep.k",
    "sweep.phi",
    "sweep.cache",
    "teleport.axis",
    "teleport.theta",
    "teleport.inputs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Ground state of the AKLT Hamiltonian with boundary couplings.
    Aklt,
    /// The valence-bond construction, no diagonalization.
    AkltPrime,
    /// Ground state of `cos θ S·S + sin θ (S·S)²` with anisotropies.
    Bilinear,
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "aklt" => Ok(Model::Aklt),
            "aklt-prime" => Ok(Model::AkltPrime),
            "bilinear" => Ok(Model::Bilinear),
            other => Err(format!("unknown model '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateParams {
    pub model: Model,
    pub n_bulk: usize,
    pub theta: f64,
    pub d_x: f64,
    pub d_z: f64,
    pub j_left: f64,
    pub j_right: f64,
}

impl StateParams {
    pub fn hamiltonian(&self) -> HamiltonianParams {
        let base = match self.model {
            Model::Aklt | Model::AkltPrime => HamiltonianParams::aklt(self.n_bulk),
            Model::Bilinear => HamiltonianParams::bilinear(self.n_bulk, self.theta),
        };
        base.with_anisotropy(self.d_x, self.d_z).with_boundary(self.j_left, self.j_right)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateSource {
    Build(StateParams),
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BundleSource {
    Spin1,
    File { path: PathBuf },
}

/// Cross-check thresholds used by `run` and `teleport-demo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceOverrides {
    /// Exact-vs-closed-form agreement.
    pub exact: f64,
    /// Allowed Monte Carlo deviation in standard errors.
    pub sigmas: f64,
}

impl Default for ToleranceOverrides {
    fn default() -> Self {
        ToleranceOverrides { exact: crate::tolerances::PHYSICS, sigmas: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub theta: Vec<f64>,
    pub d_x: Vec<f64>,
    pub d_z: Vec<f64>,
    /// Rotation site for ν; defaults to the middle of the chain.
    pub k: Option<usize>,
    /// Bare angle whose renormalized value `ν_z φ` is tabulated.
    pub phi: f64,
    #[serde(skip)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportSpec {
    pub axis: Axis,
    pub theta: Vec<f64>,
    pub inputs: usize,
}

/// Everything a command needs. Output location and worker count do not affect results
/// and are left out of the reproducibility hash.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub state: StateSource,
    pub plan: Option<MeasurementPlan>,
    pub seed: Option<u64>,
    pub rounds: u64,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub jobs: Option<usize>,
    pub tolerances: ToleranceOverrides,
    pub bundle: BundleSource,
    pub verify_sequences: usize,
    pub sweep: SweepGrid,
    pub teleport: TeleportSpec,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rounds: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    /// Value of [`OUT_ENV`], consulted when `out` is unset.
    pub out_env: Option<PathBuf>,
}

impl Overrides {
    pub fn with_env(mut self) -> Self {
        self.out_env = std::env::var_os(OUT_ENV).map(PathBuf::from);
        self
    }
}

struct Value {
    text: String,
    source: String,
    line: usize,
    dir: PathBuf,
}

impl Value {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.source.clone(), self.line, message)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.text.parse().map_err(|_| self.err(format!("invalid value '{}' for '{key}'", self.text)))
    }

    fn path(&self) -> PathBuf {
        let p = Path::new(&self.text);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    /// `a:b:count` (inclusive, evenly spaced) or a comma-separated list.
    fn grid(&self, key: &str) -> Result<Vec<f64>> {
        let parts: Vec<&str> = self.text.split(':').map(str::trim).collect();
        let bad = || self.err(format!("invalid grid '{}' for '{key}'", self.text));
        let values = if parts.len() == 3 {
            let a: f64 = parts[0].parse().map_err(|_| bad())?;
            let b: f64 = parts[1].parse().map_err(|_| bad())?;
            let count: usize = parts[2].parse().map_err(|_| bad())?;
            match count {
                0 => return Err(bad()),
                1 => vec![a],
                _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
            }
        } else if parts.len() == 1 {
            self.text.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
        } else {
            return Err(bad());
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad());
        }
        Ok(values)
    }
}

fn read_entries(path: &Path) -> Result<(String, Vec<kv::Entry>)> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let entries = kv::parse(&source, &text)?;
    Ok((source, entries))
}

fn directory_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn collect(path: &Path) -> Result<BTreeMap<String, Value>> {
    let (source, entries) = read_entries(path)?;
    let dir = directory_of(path);
    let mut values = BTreeMap::new();
    if let Some(inc) = entries.iter().find(|e| e.key == "include") {
        let inc_path = Value { text: inc.value.clone(), source: source.clone(), line: inc.line, dir: dir.clone() }.path();
        let (inc_source, inc_entries) = read_entries(&inc_path)?;
        if let Some(nested) = inc_entries.iter().find(|e| e.key == "include") {
            return Err(Error::parse(inc_source, nested.line, "includes may not be nested"));
        }
        let inc_dir = directory_of(&inc_path);
        for e in inc_entries {
            values.insert(e.key, Value { text: e.value, source: inc_source.clone(), line: e.line, dir: inc_dir.clone() });
        }
    }
    for e in entries {
        if e.key != "include" {
            values.insert(e.key, Value { text: e.value, source: source.clone(), line: e.line, dir: dir.clone() });
        }
    }
    Ok(values)
}

impl RunConfig {
    /// Reads `path` (or uses defaults when `None`) and applies the overrides.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let values = match path {
            Some(p) => collect(p)?,
            None => BTreeMap::new(),
        };
        RunConfig::from_values(values, overrides)
    }

    pub fn parse(source: &str, text: &str, overrides: &Overrides) -> Result<Self> {
        let mut values = BTreeMap::new();
        for e in kv::parse(source, text)? {
            if e.key == "include" {
                return Err(Error::parse(source, e.line, "include is only allowed in config files"));
            }
            values.insert(e.key, Value { text: e.value, source: source.to_string(), line: e.line, dir: PathBuf::new() });
        }
        RunConfig::from_values(values, overrides)
    }

    fn from_values(values: BTreeMap<String, Value>, overrides: &Overrides) -> Result<Self> {
        for (key, v) in &values {
            if !KNOWN_KEYS.contains(&key.as_str()) && !key.starts_with("plan.") {
                return Err(v.err(format!("unknown key '{key}'")));
            }
        }
        let get = |key: &str| values.get(key);
        fn or<T: std::str::FromStr>(v: Option<&Value>, key: &str, default: T) -> Result<T> {
            v.map_or(Ok(default), |v| v.parse(key))
        }

        let model: Model = match get("model") {
            Some(v) => v.text.parse().map_err(|m: String| v.err(m))?,
            None => Model::Aklt,
        };
        let params = StateParams {
            model,
            n_bulk: or(get("n"), "n", 4)?,
            theta: or(get("theta"), "theta", 0.0)?,
            d_x: or(get("d_x"), "d_x", 0.0)?,
            d_z: or(get("d_z"), "d_z", 0.0)?,
            j_left: or(get("j_left"), "j_left", 1.0)?,
            j_right: or(get("j_right"), "j_right", 1.0)?,
        };
        if params.model != Model::Bilinear && get("theta").is_some() {
            return Err(get("theta").map(|v| v.err("'theta' needs model = bilinear")).expect("present"));
        }
        params.hamiltonian().validate().map_err(|e| match get("n") {
            Some(v) => v.err(e.to_string()),
            None => e,
        })?;
        let state = match get("state_file") {
            Some(v) => StateSource::File { path: v.path() },
            None => StateSource::Build(params.clone()),
        };

        let plan = load_plan(&values, params.n_bulk)?;

        let bundle = match get("bundle") {
            None => BundleSource::Spin1,
            Some(v) if v.text == "spin1" => BundleSource::Spin1,
            Some(v) => BundleSource::File { path: v.path() },
        };

        let sweep = SweepGrid {
            theta: get("sweep.theta").map_or(Ok(vec![params.theta]), |v| v.grid("sweep.theta"))?,
            d_x: get("sweep.d_x").map_or(Ok(vec![params.d_x]), |v| v.grid("sweep.d_x"))?,
            d_z: get("sweep.d_z").map_or(Ok(vec![params.d_z]), |v| v.grid("sweep.d_z"))?,
            k: get("sweep.k").map(|v| v.parse("sweep.k")).transpose()?,
            phi: or(get("sweep.phi"), "sweep.phi", 0.1)?,
            cache: get("sweep.cache").map(Value::path),
        };
        let teleport = TeleportSpec {
            axis: or(get("teleport.axis"), "teleport.axis", Axis::Z)?,
            theta: get("teleport.theta")
                .map_or(Ok((0..8).map(|i| i as f64 * std::f64::consts::PI / 8.0).collect()), |v| v.grid("teleport.theta"))?,
            inputs: or(get("teleport.inputs"), "teleport.inputs", 50)?,
        };

        let out = overrides
            .out
            .clone()
            .or_else(|| overrides.out_env.clone())
            .or_else(|| get("out").map(Value::path))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let jobs = match overrides.jobs {
            Some(j) => Some(j),
            None => get("jobs").map(|v| v.parse("jobs")).transpose()?,
        };
        if jobs == Some(0) {
            return Err(Error::InvalidParameter("jobs must be positive".into()));
        }

        Ok(RunConfig {
            state,
            plan,
            seed: match overrides.seed {
                Some(s) => Some(s),
                None => get("seed").map(|v| v.parse("seed")).transpose()?,
            },
            rounds: match overrides.rounds {
                Some(r) => r,
                None => or(get("rounds"), "rounds", 0)?,
            },
            out,
            jobs,
            tolerances: ToleranceOverrides {
                exact: or(get("tolerance.exact"), "tolerance.exact", ToleranceOverrides::default().exact)?,
                sigmas: or(get("tolerance.sigmas"), "tolerance.sigmas", ToleranceOverrides::default().sigmas)?,
            },
            bundle,
            verify_sequences: or(get("verify.sequences"), "verify.sequences", 6)?,
            sweep,
            teleport,
        })
    }

    /// The seed, or an error naming the command that needs one.
    pub fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Precondition(format!("{command} is stochastic and needs a seed (--seed or 'seed =')")))
    }

    /// SHA-256 of the canonical serialization of every result-affecting field.
    pub fn hash(&self) -> String {
        super::output::sha256_hex(&super::output::to_json_compact(self).expect("config serializes"))
    }
}

/// `plan = file` or inline `plan.<key>` entries in the plan text format; inline `n`
/// defaults to the chain length.
fn load_plan(values: &BTreeMap<String, Value>, n_bulk: usize) -> Result<Option<MeasurementPlan>> {
    let inline: Vec<(&String, &Value)> = values.iter().filter(|(k, _)| k.starts_with("plan.")).collect();
    match (values.get("plan"), inline.is_empty()) {
        (Some(v), true) => MeasurementPlan::load(&v.path()).map(Some),
        (Some(v), false) => Err(v.err("use either 'plan = <file>' or inline 'plan.*' keys, not both")),
        (None, true) => Ok(None),
        (None, false) => {
            let mut text = String::new();
            if !inline.iter().any(|(k, _)| k.as_str() == "plan.n") {
                text.push_str(&format!("n = {n_bulk}\n"));
            }
            for (k, v) in &inline {
                text.push_str(&format!("{} = {}\n", &k["plan.".len()..], v.text));
            }
            let (source, line) = (&inline[0].1.source, inline[0].1.line);
            MeasurementPlan::parse(source, &text).map(Some).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(source.clone(), line, format!("inline plan: {message}")),
                other => other,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse("t.cfg", text, &Overrides::default())
    }

    #[test]
    fn defaults_and_grids() {
        let c = parse("model = bilinear\nn = 6\nsweep.theta = -0.6:0.6:7\nsweep.d_z = 0, 1").unwrap();
        assert_eq!(c.sweep.theta.len(), 7);
        assert!((c.sweep.theta[3]).abs() < 1e-15);
        assert_eq!(c.sweep.d_z, vec![0.0, 1.0]);
        assert_eq!(c.rounds, 0);
        assert!(c.seed.is_none());
        assert!(c.require_seed("run").is_err());
    }

    #[test]
    fn inline_plan_uses_chain_length() {
        let c = parse("n = 6\nplan.site.3 = z 0.7 adaptive\nplan.readout = y").unwrap();
        let plan = c.plan.unwrap();
        assert_eq!(plan.n_bulk(), 6);
        assert_eq!(plan.rotation_sites(), vec![3]);
        assert_eq!(plan.readout, Axis::Y);
    }

    #[test]
    fn unknown_keys_report_their_line() {
        match parse("n = 4\n\nbogus = 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse("theta = 0.1").is_err());
        assert!(parse("n = 0").is_err());
    }

    #[test]
    fn overrides_win_and_stay_out_of_the_hash() {
        let text = "n = 4\nseed = 1\nrounds = 10\nout = a";
        let base = parse(text).unwrap();
        let o = Overrides { seed: Some(9), out: Some("b".into()), jobs: Some(3), ..Overrides::default() };
        let c = RunConfig::parse("t.cfg", text, &o).unwrap();
        assert_eq!((c.seed, c.rounds, c.jobs), (Some(9), 10, Some(3)));
        assert_eq!(c.out, PathBuf::from("b"));
        assert_ne!(base.hash(), c.hash());
        let only_out = Overrides { out: Some("elsewhere".into()), ..Overrides::default() };
        assert_eq!(base.hash(), RunConfig::parse("t.cfg", text, &only_out).unwrap().hash());
    }

    #[test]
    fn env_override_sits_between_flag_and_file() {
        let o = Overrides { out_env: Some("env".into()), ..Overrides::default() };
        assert_eq!(RunConfig::parse("t", "out = file", &o).unwrap().out, PathBuf::from("env"));
        let o = Overrides { out: Some("flag".into()), out_env: Some("env".into()), ..Overrides::default() };
        assert_eq!(RunConfig::parse("t", "out = file", &o).unwrap().out, PathBuf::from("flag"));
    }

    #[test]
    fn one_include_level() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("base.cfg"), "n = 5\nseed = 3\n").unwrap();
        std::fs::write(dir.path().join("main.cfg"), "include = base.cfg\nseed = 4\n").unwrap();
        let c = RunConfig::load(Some(&dir.path().join("main.cfg")), &Overrides::default()).unwrap();
        assert_eq!(c.seed, Some(4));
        assert!(matches!(&c.state, StateSource::Build(p) if p.n_bulk == 5));

        std::fs::write(dir.path().join("deep.cfg"), "include = main.cfg\n").unwrap();
        std::fs::write(dir.path().join("top.cfg"), "include = deep.cfg\n").unwrap();
        assert!(RunConfig::load(Some(&dir.path().join("top.cfg")), &Overrides::default()).is_err());
    }
}
