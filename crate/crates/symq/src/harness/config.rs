//! Experiment configuration: schema, parser, and content hash.
//!
//! Configs are line-oriented `key = value` text grouped into sections.
//! Unknown sections and keys are rejected with their line number — a typo
//! in an experiment file should fail loudly, not silently fall back to a
//! default. The full schema:
//!
//! ```text
//! [circuit]
//! source = bell | qft-adder | random | file
//! path = adder.circ        # file only
//! bits = 5                 # qft-adder: operand width
//! a = 11                   # qft-adder: classical addend
//! b = 9                    # qft-adder: register operand
//! qubits = 4               # random: register size
//! xx_gates = 6             # random: entangler count
//!
//! [symmetry]
//! n_physical = 8           # physical ions available
//! variants = 25            # m
//! mode = random-maps | dissimilar-maps | maps+decomposition
//! stride = 2               # decomposition mask stride (default 2)
//! pool = 200               # dissimilar candidate pool (default 200)
//!
//! [noise]
//! source = ideal | uniform | file     # default ideal
//! path = device.noise      # file only
//! delta_min = 0.02         # uniform only
//! delta_max = 0.10
//! depolarizing = 0.0       # default 0
//! calibrate_low = 0.01     # optional band on the unsymmetrized
//! calibrate_high = 0.05    # target probability; scales pair deltas
//!
//! [aggregation]
//! strategy = average | vote | both    # default both
//! threshold = 14           # vote t0 (default: majority, ceil(m/2)+1)
//! scrambles = 10           # vote passes R (default 10)
//!
//! [run]
//! seed = 42                # required
//! shots = 100              # s, required
//! infinite_shots = false   # aggregate exact histograms instead of shots
//! synthetic_shots = 10000  # shots voting draws internally in that mode
//!
//! [output]
//! dir = out                # default "."
//! ```

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::circuit::{fmt_significant, serialize_circuit, Circuit};
use crate::error::{Error, Result};
use crate::symmetry::DEFAULT_DISSIMILAR_POOL;

/// Where the experiment circuit comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitSource {
    /// Parse a circuit file.
    File(PathBuf),
    /// The built-in Bell-state preparation.
    Bell,
    /// The quantum adder: `bits`-bit register computing `a + b`.
    QftAdder { bits: usize, a: u64, b: u64 },
    /// A seeded random entangling circuit (seeded from the master seed).
    Random { qubits: usize, xx_gates: usize },
    /// A circuit supplied directly through the API (tests, training sets);
    /// not expressible in config text.
    Inline(Circuit),
}

/// How variant realizations are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryMode {
    /// Independent uniform injections.
    RandomMaps,
    /// Greedy pair-reuse-minimizing injections.
    DissimilarMaps,
    /// Random injections plus alternating sign-flip decompositions.
    MapsWithDecomposition,
}

impl fmt::Display for SymmetryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryMode::RandomMaps => "random-maps",
            SymmetryMode::DissimilarMaps => "dissimilar-maps",
            SymmetryMode::MapsWithDecomposition => "maps+decomposition",
        })
    }
}

/// Device noise selection.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSource {
    /// No coherent errors.
    Ideal,
    /// Independent per-pair deltas drawn uniformly from the interval.
    Uniform { delta_min: f64, delta_max: f64 },
    /// Parse a noise-model file.
    File(PathBuf),
}

/// Which aggregation strategies the run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Average,
    Vote,
    Both,
}

impl Strategy {
    pub fn includes_average(self) -> bool {
        matches!(self, Strategy::Average | Strategy::Both)
    }

    pub fn includes_vote(self) -> bool {
        matches!(self, Strategy::Vote | Strategy::Both)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Average => "average",
            Strategy::Vote => "vote",
            Strategy::Both => "both",
        })
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub circuit: CircuitSource,
    pub n_physical: usize,
    /// Variant count `m`.
    pub variants: usize,
    /// Shots per variant `s`.
    pub shots: usize,
    pub symmetry_mode: SymmetryMode,
    /// Decomposition mask stride for `maps+decomposition`.
    pub stride: usize,
    /// Candidate pool size for `dissimilar-maps`.
    pub pool: usize,
    pub noise: NoiseSource,
    /// Output-level depolarizing strength in `[0, 1]`.
    pub depolarizing: f64,
    /// When set, pair deltas are scaled until the unsymmetrized target
    /// probability lands in `[low, high]`.
    pub calibration: Option<(f64, f64)>,
    pub strategy: Strategy,
    /// Vote threshold `t0`; `None` selects the majority default.
    pub threshold: Option<usize>,
    /// Vote scramble passes `R`.
    pub scrambles: usize,
    pub seed: u64,
    /// Aggregate exact noisy histograms instead of sampled shots.
    pub infinite_shots: bool,
    /// Synthetic shots drawn per variant for voting in infinite-shot mode.
    pub synthetic_shots: usize,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// A minimal valid config for the given circuit source; callers adjust
    /// fields from here.
    pub fn new(circuit: CircuitSource, n_physical: usize, variants: usize, shots: usize, seed: u64) -> Self {
        ExperimentConfig {
            circuit,
            n_physical,
            variants,
            shots,
            symmetry_mode: SymmetryMode::RandomMaps,
            stride: 2,
            pool: DEFAULT_DISSIMILAR_POOL,
            noise: NoiseSource::Ideal,
            depolarizing: 0.0,
            calibration: None,
            strategy: Strategy::Both,
            threshold: None,
            scrambles: crate::aggregate::DEFAULT_SCRAMBLES,
            seed,
            infinite_shots: false,
            synthetic_shots: 10_000,
            out_dir: PathBuf::from("."),
        }
    }

    /// Cross-field validation shared by the parser and by programmatic
    /// construction.
    pub fn validate(&self) -> Result<()> {
        if self.variants == 0 {
            return Err(Error::Config("variant count must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shot count must be at least 1".into()));
        }
        if self.synthetic_shots == 0 {
            return Err(Error::Config("synthetic shot count must be at least 1".into()));
        }
        if self.n_physical == 0 {
            return Err(Error::Config("physical register must be at least 1 ion".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("decomposition stride must be at least 1".into()));
        }
        if self.pool == 0 {
            return Err(Error::Config("dissimilar candidate pool must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.depolarizing) {
            return Err(Error::Config(format!(
                "depolarizing strength {} outside [0, 1]",
                self.depolarizing
            )));
        }
        if let Some((lo, hi)) = self.calibration {
            if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && hi < 1.0) {
                return Err(Error::Config(format!(
                    "calibration band [{lo}, {hi}] must satisfy 0 < low < high < 1"
                )));
            }
        }
        if let Some(t) = self.threshold {
            if t < 2 || t > self.variants {
                return Err(Error::Config(format!(
                    "vote threshold {t} must be between 2 and the variant count {}",
                    self.variants
                )));
            }
        }
        if self.scrambles == 0 {
            return Err(Error::Config("at least one scramble pass is required".into()));
        }
        if let NoiseSource::Uniform { delta_min, delta_max } = self.noise {
            if !(delta_min.is_finite() && delta_max.is_finite() && delta_min <= delta_max) {
                return Err(Error::Config(format!(
                    "uniform noise interval [{delta_min}, {delta_max}] is not ordered"
                )));
            }
            if !(-1.0..=1.0).contains(&delta_min) || !(-1.0..=1.0).contains(&delta_max) {
                return Err(Error::Config(format!(
                    "uniform noise interval [{delta_min}, {delta_max}] leaves [-1, 1]"
                )));
            }
        }
        for path in [self.circuit_path(), self.noise_path()].into_iter().flatten() {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "referenced file does not exist: {}",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    fn circuit_path(&self) -> Option<&Path> {
        match &self.circuit {
            CircuitSource::File(p) => Some(p),
            _ => None,
        }
    }

    fn noise_path(&self) -> Option<&Path> {
        match &self.noise {
            NoiseSource::File(p) => Some(p),
            _ => None,
        }
    }

    /// A canonical rendering of every result-affecting field, defaults
    /// included. Two configs describe the same experiment exactly when
    /// their canonical texts match; the content hash is taken over this
    /// text. The output directory is excluded because it does not affect
    /// any computed result.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[circuit]\n");
        match &self.circuit {
            CircuitSource::File(p) => {
                out.push_str("source = file\n");
                out.push_str(&format!("path = {}\n", p.display()));
            }
            CircuitSource::Bell => out.push_str("source = bell\n"),
            CircuitSource::QftAdder { bits, a, b } => {
                out.push_str("source = qft-adder\n");
                out.push_str(&format!("bits = {bits}\na = {a}\nb = {b}\n"));
            }
            CircuitSource::Random { qubits, xx_gates } => {
                out.push_str("source = random\n");
                out.push_str(&format!("qubits = {qubits}\nxx_gates = {xx_gates}\n"));
            }
            CircuitSource::Inline(c) => {
                // Inline circuits are hashed by content so the config hash
                // still identifies the experiment.
                let digest = Sha256::digest(serialize_circuit(c).as_bytes());
                out.push_str("source = inline\n");
                out.push_str(&format!("content_sha256 = {digest:x}\n"));
            }
        }
        out.push_str("\n[symmetry]\n");
        out.push_str(&format!(
            "n_physical = {}\nvariants = {}\nmode = {}\nstride = {}\npool = {}\n",
            self.n_physical, self.variants, self.symmetry_mode, self.stride, self.pool
        ));
        out.push_str("\n[noise]\n");
        match &self.noise {
            NoiseSource::Ideal => out.push_str("source = ideal\n"),
            NoiseSource::Uniform { delta_min, delta_max } => {
                out.push_str("source = uniform\n");
                out.push_str(&format!(
                    "delta_min = {}\ndelta_max = {}\n",
                    fmt_significant(*delta_min, 17),
                    fmt_significant(*delta_max, 17)
                ));
            }
            NoiseSource::File(p) => {
                out.push_str("source = file\n");
                out.push_str(&format!("path = {}\n", p.display()));
            }
        }
        out.push_str(&format!("depolarizing = {}\n", fmt_significant(self.depolarizing, 17)));
        if let Some((lo, hi)) = self.calibration {
            out.push_str(&format!(
                "calibrate_low = {}\ncalibrate_high = {}\n",
                fmt_significant(lo, 17),
                fmt_significant(hi, 17)
            ));
        }
        out.push_str("\n[aggregation]\n");
        out.push_str(&format!("strategy = {}\n", self.strategy));
        match self.threshold {
            Some(t) => out.push_str(&format!("threshold = {t}\n")),
            None => out.push_str("threshold = default\n"),
        }
        out.push_str(&format!("scrambles = {}\n", self.scrambles));
        out.push_str("\n[run]\n");
        out.push_str(&format!(
            "seed = {}\nshots = {}\ninfinite_shots = {}\nsynthetic_shots = {}\n",
            self.seed, self.shots, self.infinite_shots, self.synthetic_shots
        ));
        // The output directory is deliberately omitted: it is a sink, not an
        // experiment input, so two runs of the same experiment share a hash
        // no matter where their reports land.
        out
    }

    /// Hex SHA-256 of the canonical text; identifies the experiment inputs
    /// in reports.
    pub fn config_hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical_text().as_bytes()))
    }
}

/// One parsed `key = value` with its source line, grouped by section.
struct RawConfig {
    entries: BTreeMap<(String, String), (String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        const SECTIONS: [&str; 6] =
            ["circuit", "symmetry", "noise", "aggregation", "run", "output"];
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown section [{name}]"),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `key = value`, got {content:?}"),
                });
            };
            let Some(section) = section.clone() else {
                return Err(Error::Parse {
                    line,
                    message: "key before any [section] header".into(),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if value.is_empty() {
                return Err(Error::Parse { line, message: format!("key {key} has no value") });
            }
            if entries.insert((section.clone(), key.clone()), (value, line)).is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key {key} in section [{section}]"),
                });
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn require(&mut self, section: &str, key: &str) -> Result<(String, usize)> {
        self.take(section, key).ok_or_else(|| {
            Error::Config(format!("missing required key {key} in section [{section}]"))
        })
    }

    fn finish(self) -> Result<()> {
        if let Some(((section, key), (_, line))) = self.entries.into_iter().next() {
            return Err(Error::Parse {
                line,
                message: format!("unknown key {key} in section [{section}]"),
            });
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(what: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{what} must be a {}, got {value:?}", std::any::type_name::<T>()),
    })
}

fn take_parsed<T: std::str::FromStr>(
    raw: &mut RawConfig,
    section: &str,
    key: &str,
) -> Result<Option<T>> {
    match raw.take(section, key) {
        Some((value, line)) => Ok(Some(parse_value(key, &value, line)?)),
        None => Ok(None),
    }
}

/// Parses config text. Relative paths are taken as written; use
/// [`load_config`] to resolve them against the config file's directory.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg = parse_fields(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Field extraction without the cross-field validation pass, so
/// [`load_config`] can resolve relative paths before checking they exist.
fn parse_fields(text: &str) -> Result<ExperimentConfig> {
    let mut raw = RawConfig::parse(text)?;

    let circuit = {
        let (source, line) = raw.require("circuit", "source")?;
        match source.as_str() {
            "file" => {
                let (path, _) = raw.require("circuit", "path")?;
                CircuitSource::File(PathBuf::from(path))
            }
            "bell" => CircuitSource::Bell,
            "qft-adder" => CircuitSource::QftAdder {
                bits: take_parsed(&mut raw, "circuit", "bits")?
                    .ok_or_else(|| Error::Config("qft-adder needs bits".into()))?,
                a: take_parsed(&mut raw, "circuit", "a")?
                    .ok_or_else(|| Error::Config("qft-adder needs a".into()))?,
                b: take_parsed(&mut raw, "circuit", "b")?
                    .ok_or_else(|| Error::Config("qft-adder needs b".into()))?,
            },
            "random" => CircuitSource::Random {
                qubits: take_parsed(&mut raw, "circuit", "qubits")?
                    .ok_or_else(|| Error::Config("random circuit needs qubits".into()))?,
                xx_gates: take_parsed(&mut raw, "circuit", "xx_gates")?
                    .ok_or_else(|| Error::Config("random circuit needs xx_gates".into()))?,
            },
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "unknown circuit source {other:?} (expected bell, qft-adder, random, or file)"
                    ),
                })
            }
        }
    };

    let n_physical = take_parsed(&mut raw, "symmetry", "n_physical")?
        .ok_or_else(|| Error::Config("missing required key n_physical in section [symmetry]".into()))?;
    let variants = take_parsed(&mut raw, "symmetry", "variants")?
        .ok_or_else(|| Error::Config("missing required key variants in section [symmetry]".into()))?;
    let symmetry_mode = match raw.take("symmetry", "mode") {
        None => SymmetryMode::RandomMaps,
        Some((value, line)) => match value.as_str() {
            "random-maps" => SymmetryMode::RandomMaps,
            "dissimilar-maps" => SymmetryMode::DissimilarMaps,
            "maps+decomposition" => SymmetryMode::MapsWithDecomposition,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "unknown symmetry mode {other:?} (expected random-maps, dissimilar-maps, or maps+decomposition)"
                    ),
                })
            }
        },
    };
    let stride = take_parsed(&mut raw, "symmetry", "stride")?.unwrap_or(2);
    let pool = take_parsed(&mut raw, "symmetry", "pool")?.unwrap_or(DEFAULT_DISSIMILAR_POOL);

    let noise = match raw.take("noise", "source") {
        None => NoiseSource::Ideal,
        Some((value, line)) => match value.as_str() {
            "ideal" => NoiseSource::Ideal,
            "uniform" => NoiseSource::Uniform {
                delta_min: take_parsed(&mut raw, "noise", "delta_min")?
                    .ok_or_else(|| Error::Config("uniform noise needs delta_min".into()))?,
                delta_max: take_parsed(&mut raw, "noise", "delta_max")?
                    .ok_or_else(|| Error::Config("uniform noise needs delta_max".into()))?,
            },
            "file" => {
                let (path, _) = raw.require("noise", "path")?;
                NoiseSource::File(PathBuf::from(path))
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "unknown noise source {other:?} (expected ideal, uniform, or file)"
                    ),
                })
            }
        },
    };
    let depolarizing = take_parsed(&mut raw, "noise", "depolarizing")?.unwrap_or(0.0);
    let calibration = {
        let lo: Option<f64> = take_parsed(&mut raw, "noise", "calibrate_low")?;
        let hi: Option<f64> = take_parsed(&mut raw, "noise", "calibrate_high")?;
        match (lo, hi) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            (None, None) => None,
            _ => {
                return Err(Error::Config(
                    "calibrate_low and calibrate_high must be given together".into(),
                ))
            }
        }
    };

    let strategy = match raw.take("aggregation", "strategy") {
        None => Strategy::Both,
        Some((value, line)) => match value.as_str() {
            "average" => Strategy::Average,
            "vote" => Strategy::Vote,
            "both" => Strategy::Both,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "unknown strategy {other:?} (expected average, vote, or both)"
                    ),
                })
            }
        },
    };
    let threshold = match raw.take("aggregation", "threshold") {
        None => None,
        Some((value, _)) if value == "default" => None,
        Some((value, line)) => Some(parse_value("threshold", &value, line)?),
    };
    let scrambles =
        take_parsed(&mut raw, "aggregation", "scrambles")?.unwrap_or(crate::aggregate::DEFAULT_SCRAMBLES);

    let seed = take_parsed(&mut raw, "run", "seed")?
        .ok_or_else(|| Error::Config("missing required key seed in section [run]".into()))?;
    let shots = take_parsed(&mut raw, "run", "shots")?
        .ok_or_else(|| Error::Config("missing required key shots in section [run]".into()))?;
    let infinite_shots = match raw.take("run", "infinite_shots") {
        None => false,
        Some((value, line)) => match value.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("infinite_shots must be true or false, got {other:?}"),
                })
            }
        },
    };
    let synthetic_shots = take_parsed(&mut raw, "run", "synthetic_shots")?.unwrap_or(10_000);

    let out_dir = raw
        .take("output", "dir")
        .map(|(value, _)| PathBuf::from(value))
        .unwrap_or_else(|| PathBuf::from("."));

    raw.finish()?;

    Ok(ExperimentConfig {
        circuit,
        n_physical,
        variants,
        shots,
        symmetry_mode,
        stride,
        pool,
        noise,
        depolarizing,
        calibration,
        strategy,
        threshold,
        scrambles,
        seed,
        infinite_shots,
        synthetic_shots,
        out_dir,
    })
}

/// Reads and parses a config file, resolving relative circuit, noise, and
/// output paths against the file's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };

    let mut cfg = parse_fields(&text)?;
    if let CircuitSource::File(p) = cfg.circuit {
        cfg.circuit = CircuitSource::File(resolve(p));
    }
    if let NoiseSource::File(p) = cfg.noise {
        cfg.noise = NoiseSource::File(resolve(p));
    }
    cfg.out_dir = resolve(cfg.out_dir);
    cfg.validate()?;
    Ok(cfg)
}
