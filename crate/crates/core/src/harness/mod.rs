//! Sweep configuration, execution and curve output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::code::{build_code, CodeSpec, Family};
use crate::decoders::{
    bd_logical_rate, evaluate_bd_genie, evaluate_decoder, exhaustive_map_table, BlockMapDecoder,
    CachedDecoder, Decoder, EvalResult, MdDecoder,
};
use crate::error::{Error, Result};
use crate::nn::{load_model_for, MlpSpec};

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "SMHC_WORKERS";
pub const CSV_HEADER: &str =
    "level,family,decoder,p,shots,errors,rate,ci_low,ci_high,bd_reference,seed,wall_time_s";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DecoderId {
    /// Closed-form bounded-distance rate, no sampling.
    Bd,
    /// Monte Carlo of a decoder that fails exactly at weight `2^{r−1}`.
    BdGenie,
    Oracle,
    BlockMap,
    Md,
    Nn(PathBuf),
}

impl fmt::Display for DecoderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bd => f.write_str("bd"),
            Self::BdGenie => f.write_str("bd-genie"),
            Self::Oracle => f.write_str("oracle"),
            Self::BlockMap => f.write_str("blockmap"),
            Self::Md => f.write_str("md"),
            Self::Nn(path) => write!(f, "nn:{}", path.display()),
        }
    }
}

impl FromStr for DecoderId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bd" => Self::Bd,
            "bd-genie" => Self::BdGenie,
            "oracle" => Self::Oracle,
            "blockmap" => Self::BlockMap,
            "md" => Self::Md,
            _ => match s.strip_prefix("nn:") {
                Some(path) if !path.is_empty() => Self::Nn(PathBuf::from(path)),
                _ => {
                    return Err(Error::Usage(format!(
                        "unknown decoder {s:?}; expected bd, bd-genie, oracle, blockmap, md or nn:<model>"
                    )))
                }
            },
        })
    }
}

impl TryFrom<String> for DecoderId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DecoderId> for String {
    fn from(d: DecoderId) -> String {
        d.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PGrid {
    List(Vec<f64>),
    LogSpaced { start: f64, stop: f64, points: usize },
}

impl PGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::LogSpaced { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*points)
                    .map(|i| {
                        let t = i as f64 / (*points - 1) as f64;
                        (start.ln() + t * (stop.ln() - start.ln())).exp()
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Usage(format!("unknown output format {s:?}; expected csv or json"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub schema_version: u32,
    pub family: Family,
    pub level: usize,
    pub decoder: DecoderId,
    pub p: PGrid,
    pub shots: u64,
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Everything that can be checked before sampling starts.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(1..=crate::code::MAX_LEVEL).contains(&self.level) {
            return bad(format!("level must be in 1..={}, got {}", crate::code::MAX_LEVEL, self.level));
        }
        let grid = self.p.values();
        if grid.is_empty() {
            return bad("p grid is empty".into());
        }
        if let Some(p) = grid.iter().find(|p| !(0.0..=0.5).contains(*p)) {
            return bad(format!("p value {p} lies outside [0, 0.5]"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("p grid must be strictly increasing".into());
        }
        if self.decoder != DecoderId::Bd && self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        match &self.decoder {
            DecoderId::Md if self.family != Family::Original => {
                bad("the md decoder needs family = \"original\"".into())
            }
            DecoderId::Md if self.level > MdDecoder::MAX_LEVEL => {
                bad(format!("the md decoder supports levels up to {}", MdDecoder::MAX_LEVEL))
            }
            DecoderId::BlockMap if self.level > BlockMapDecoder::MAX_LEVEL => bad(format!(
                "the blockmap decoder supports levels up to {}",
                BlockMapDecoder::MAX_LEVEL
            )),
            DecoderId::Oracle if self.level > 2 => {
                bad("the oracle decoder enumerates 2^n patterns and supports levels up to 2".into())
            }
            DecoderId::Nn(path) => {
                if self.family != Family::Subsystem {
                    return bad("nn models decode the subsystem family".into());
                }
                if !path.is_file() {
                    return bad(format!("model file {} does not exist", path.display()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// One point of a logical-error-rate curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub level: usize,
    pub family: Family,
    pub decoder: String,
    pub p: f64,
    pub shots: u64,
    pub errors: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bd_reference: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl CurvePoint {
    /// Rate relative to the bounded-distance reference.
    pub fn relative_rate(&self) -> f64 {
        self.rate / self.bd_reference
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.9e},{:.9e},{:.9e},{:.9e},{},{:.3}",
            self.level,
            self.family,
            self.decoder,
            self.p,
            self.shots,
            self.errors,
            self.rate,
            self.ci_low,
            self.ci_high,
            self.bd_reference,
            self.seed,
            self.wall_time_s
        )
    }
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

pub fn to_json(points: &[CurvePoint]) -> Result<String> {
    #[derive(Serialize)]
    struct Row<'a> {
        #[serde(flatten)]
        point: &'a CurvePoint,
        relative_rate: f64,
    }
    let rows: Vec<Row> = points
        .iter()
        .map(|point| Row {
            point,
            relative_rate: point.relative_rate(),
        })
        .collect();
    serde_json::to_string_pretty(&rows).map_err(|e| Error::Format(e.to_string()))
}

/// Worker count from `SMHC_WORKERS`, else the available cores.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Decoder for one grid point. Wrapped in a syndrome cache.
pub fn make_decoder(
    id: &DecoderId,
    code: &CodeSpec,
    p: f64,
    model: Option<&MlpSpec>,
) -> Result<Box<dyn Decoder>> {
    Ok(match id {
        DecoderId::Oracle => Box::new(exhaustive_map_table(code, p)?),
        DecoderId::BlockMap => Box::new(CachedDecoder::new(BlockMapDecoder::new(code, p)?)),
        DecoderId::Md => Box::new(CachedDecoder::new(MdDecoder::new(code)?)),
        DecoderId::Nn(path) => {
            let net = match model {
                Some(m) => m.clone(),
                None => load_model_for(code, path)?,
            };
            Box::new(CachedDecoder::new(net))
        }
        DecoderId::Bd | DecoderId::BdGenie => {
            return Err(Error::Usage(format!("{id} is not a syndrome decoder")))
        }
    })
}

/// Evaluates one point of the curve.
pub fn run_point(
    id: &DecoderId,
    code: &CodeSpec,
    p: f64,
    shots: u64,
    seed: u64,
    model: Option<&MlpSpec>,
) -> Result<CurvePoint> {
    let start = Instant::now();
    let bd = bd_logical_rate(code.level(), p);
    let result = match id {
        DecoderId::Bd => EvalResult {
            shots: 0,
            errors: 0,
            rate: bd,
            ci_low: bd,
            ci_high: bd,
        },
        DecoderId::BdGenie => evaluate_bd_genie(code, p, shots, seed)?,
        _ => {
            let decoder = make_decoder(id, code, p, model)?;
            evaluate_decoder(decoder.as_ref(), code, p, shots, seed)?
        }
    };
    Ok(CurvePoint {
        level: code.level(),
        family: code.family(),
        decoder: id.to_string(),
        p,
        shots: result.shots,
        errors: result.errors,
        rate: result.rate,
        ci_low: result.ci_low,
        ci_high: result.ci_high,
        bd_reference: bd,
        seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs every grid point of a validated configuration.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let code = build_code(cfg.family, cfg.level)?;
    let model = match &cfg.decoder {
        DecoderId::Nn(path) => Some(load_model_for(&code, path)?),
        _ => None,
    };
    let workers = cfg.workers.unwrap_or_else(default_workers);
    with_workers(workers, || {
        cfg.p
            .values()
            .into_iter()
            .map(|p| run_point(&cfg.decoder, &code, p, cfg.shots, cfg.seed, model.as_ref()))
            .collect()
    })?
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub schema_version: u32,
    pub config_sha256: String,
    pub seed: u64,
    pub tool_version: String,
    pub workers: usize,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_sha256: Option<String>,
}

/// `<output>.meta.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the curve in the configured format and its metadata sidecar.
pub fn write_sweep(cfg: &SweepConfig, points: &[CurvePoint]) -> Result<PathBuf> {
    let body = match cfg.format {
        OutputFormat::Csv => to_csv(points),
        OutputFormat::Json => to_json(points)?,
    };
    fs::write(&cfg.output, body)?;
    let model_sha256 = match &cfg.decoder {
        DecoderId::Nn(path) => Some(hex::encode(Sha256::digest(fs::read(path)?))),
        _ => None,
    };
    let meta = SweepMetadata {
        schema_version: SCHEMA_VERSION,
        config_sha256: cfg.hash()?,
        seed: cfg.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        workers: cfg.workers.unwrap_or_else(default_workers),
        points: points.len(),
        model_sha256,
    };
    let path = sidecar_path(&cfg.output);
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&path, json)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SweepConfig {
        SweepConfig {
            schema_version: SCHEMA_VERSION,
            family: Family::Subsystem,
            level: 2,
            decoder: DecoderId::BlockMap,
            p: PGrid::List(vec![0.01, 0.02]),
            shots: 1000,
            seed: 5,
            output: "curve.csv".into(),
            format: OutputFormat::Csv,
            workers: None,
        }
    }

    #[test]
    fn decoder_ids_parse() {
        for s in ["bd", "bd-genie", "oracle", "blockmap", "md", "nn:models/r2.bin"] {
            assert_eq!(s.parse::<DecoderId>().unwrap().to_string(), s);
        }
        assert!("nn:".parse::<DecoderId>().is_err());
        assert!("bp-osd".parse::<DecoderId>().is_err());
    }

    #[test]
    fn log_grid() {
        let v = PGrid::LogSpaced { start: 1e-3, stop: 1e-1, points: 3 }.values();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut cfg = config();
        cfg.validate().unwrap();
        cfg.p = PGrid::List(vec![0.02, 0.01]);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.p = PGrid::List(vec![0.1, 0.6]);
        assert!(cfg.validate().is_err());
        cfg.p = PGrid::List(vec![0.1, 0.1]);
        assert!(cfg.validate().is_err());
        let mut cfg = config();
        cfg.decoder = DecoderId::Md;
        assert!(cfg.validate().is_err());
        cfg.decoder = DecoderId::Nn("/nonexistent/model.bin".into());
        assert!(cfg.validate().is_err());
        let mut cfg = config();
        cfg.schema_version = 99;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/c.csv")), PathBuf::from("out/c.csv.meta.json"));
    }
}
