//! The `regmap` command line.
//!
//! Exit codes: 0 success (reflexible / is a cover), 1 usage, 2 parse or
//! validation failure, 3 search exhausted or no suitable cover base,
//! 4 internal anomaly or failed certificate verification, 10 negative
//! verdict (`chiral` found a chiral map, `cover` found no smooth cover).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::exceptional::{exceptional_report, theta_chain, try_theta, GammaType};
use crate::io::{self, MapFileError, MapStorage};
use crate::map::{is_reflexible, is_smooth_cover, Chirality, MapType, OrientedMap};
use crate::pipeline::{
    self, certificate_from_value, certificate_to_value, chiral_cover, many_chiral_covers, verify_certificate,
    CoverBounds, PipelineError,
};
use crate::product::{goursat_classify_product, parallel_product_with_limit, DEFAULT_PRODUCT_LIMIT};
use crate::seed::{self, catalog_get, catalog_manifest, find_chiral_seed, SearchBudget, SeedError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_ANOMALY: i32 = 4;
pub const EXIT_NEGATIVE: i32 = 10;

#[derive(Parser, Debug)]
#[command(
    name = "regmap",
    version,
    about = "Orientably-regular maps: chirality, products, chiral covers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GammaArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "dualA")]
    DualA,
}

impl From<GammaArg> for GammaType {
    fn from(g: GammaArg) -> GammaType {
        match g {
            GammaArg::A => GammaType::A,
            GammaArg::B => GammaType::B,
            GammaArg::DualA => GammaType::DualA,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TorusKind {
    #[value(name = "44")]
    Square,
    #[value(name = "36")]
    Triangular,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type, census and chirality of a map file
    Info { file: PathBuf },
    /// Swap x and y
    Dual {
        file: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Invert x and y
    Mirror {
        file: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Exit 0 if reflexible, 10 if chiral
    Chiral { file: PathBuf },
    /// Parallel product of two maps of the same type
    Parallel {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
        /// Lift the 10^7 pair-space guard
        #[arg(long)]
        allow_large: bool,
    },
    /// Exit 0 iff BIG is a smooth cover of SMALL
    Cover { big: PathBuf, small: PathBuf },
    /// Index-2 subgroup report and the θ-extension test
    Exceptional {
        file: PathBuf,
        #[arg(long = "type", value_enum)]
        gamma: GammaArg,
    },
    /// Search for a chiral map with alternating or symmetric group
    Seed {
        #[arg(long = "type", value_parser = parse_type)]
        map_type: MapType,
        #[arg(long)]
        rmax: usize,
        #[arg(long)]
        budget: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Build verified chiral smooth covers and write a certificate
    ChiralCover {
        file: PathBuf,
        #[arg(long)]
        rmax: usize,
        #[arg(long)]
        budget: u64,
        #[arg(short = 'o')]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Same-type maps used to enlarge the cover base when orders collide
        #[arg(long = "aux")]
        aux: Vec<PathBuf>,
    },
    /// Re-run every check recorded in a certificate
    Verify { cert: PathBuf },
    /// Shipped named maps
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Torus map of type {4,4} or {3,6}
    Torus {
        #[arg(long, value_enum)]
        kind: TorusKind,
        b: u64,
        c: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Get {
        name: String,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

fn parse_type(s: &str) -> Result<MapType, String> {
    let (m, n) = s
        .trim_matches(|c| c == '{' || c == '}')
        .split_once(',')
        .ok_or_else(|| format!("expected m,n, got {s:?}"))?;
    let m = m.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let n = n.trim().parse::<u64>().map_err(|e| e.to_string())?;
    Ok(MapType::new(m, n))
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<MapFileError> for Failure {
    fn from(e: MapFileError) -> Failure {
        match e {
            MapFileError::Io { .. } => Failure::new(EXIT_PARSE, e.to_string()),
            other => Failure::new(EXIT_PARSE, other.to_string()),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        let code = match &e {
            PipelineError::Exhausted { .. } | PipelineError::NoSuitableBase(_) => EXIT_EXHAUSTED,
            PipelineError::Seed(SeedError::Exhausted { .. }) => EXIT_EXHAUSTED,
            PipelineError::NonHyperbolicType(_) => EXIT_PARSE,
            PipelineError::Seed(_) => EXIT_PARSE,
            PipelineError::Product(crate::product::ProductError::TypeMismatch { .. }) => EXIT_PARSE,
            PipelineError::Product(crate::product::ProductError::TooLarge { .. }) => EXIT_EXHAUSTED,
            PipelineError::Product(_) => EXIT_ANOMALY,
        };
        Failure::new(code, e.to_string())
    }
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn json(&mut self, v: &Value) -> Result<(), Failure> {
        self.stdout
            .write_all(pipeline::to_pretty(v).as_bytes())
            .map_err(|e| Failure::new(EXIT_ANOMALY, e.to_string()))
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.stderr, "{msg}");
    }

    fn emit_map(&mut self, m: &OrientedMap, out: Option<&Path>) -> Result<(), Failure> {
        match out {
            Some(p) => io::emit_map(m, p).map_err(Failure::from),
            None => self
                .stdout
                .write_all(io::emit_map_string(m).as_bytes())
                .map_err(|e| Failure::new(EXIT_ANOMALY, e.to_string())),
        }
    }
}

fn info_value(m: &OrientedMap) -> Value {
    let t = m.map_type();
    let c = m.census();
    json!({
        "label": m.label(),
        "darts": m.darts(),
        "type": {"m": t.m, "n": t.n, "geometry": t.geometry()},
        "census": c,
        "chirality": is_reflexible(m).verdict,
    })
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// status. Machine output goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            io.note(&format!("error: {}", f.message));
            f.code
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Result<i32, Failure> {
    match cmd {
        Command::Info { file } => {
            let m = io::parse_map(&file)?;
            io.json(&info_value(&m))?;
            Ok(EXIT_OK)
        }
        Command::Dual { file, out } => {
            let m = io::parse_map(&file)?;
            io.emit_map(&m.dual(), out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Mirror { file, out } => {
            let m = io::parse_map(&file)?;
            io.emit_map(&m.mirror(), out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Chiral { file } => {
            let m = io::parse_map(&file)?;
            let report = is_reflexible(&m);
            io.json(&json!({
                "chirality": report.verdict,
                "type": m.map_type(),
                "darts": m.darts(),
            }))?;
            Ok(match report.verdict {
                Chirality::Reflexible => EXIT_OK,
                Chirality::Chiral => EXIT_NEGATIVE,
            })
        }
        Command::Parallel { a, b, out, allow_large } => {
            let ma = io::parse_map(&a)?;
            let mb = io::parse_map(&b)?;
            let limit = if allow_large { u64::MAX } else { DEFAULT_PRODUCT_LIMIT };
            let p = parallel_product_with_limit(&ma, &mb, limit)
                .map_err(PipelineError::Product)
                .map_err(Failure::from)?;
            let report =
                goursat_classify_product(&ma, &mb, &p).map_err(|e| Failure::new(EXIT_ANOMALY, e.to_string()))?;
            match out {
                Some(path) => {
                    io::emit_map(&p, &path)?;
                    io.json(&serde_json::to_value(&report).expect("report serializes"))?;
                }
                None => {
                    io.emit_map(&p, None)?;
                    io.note(&serde_json::to_string(&report).expect("report serializes"));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Cover { big, small } => {
            let mb = io::parse_map(&big)?;
            let ms = io::parse_map(&small)?;
            let covers = is_smooth_cover(&mb, &ms);
            io.json(&json!({ "smooth_cover": covers }))?;
            Ok(if covers { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Exceptional { file, gamma } => {
            let m = io::parse_map(&file)?;
            let t: GammaType = gamma.into();
            let r = exceptional_report(&m, t).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
            let (theta, extension) = if r.exceptional {
                let th = try_theta(&m, t).map_err(|e| Failure::new(EXIT_ANOMALY, e.to_string()))?;
                let ext = theta_chain(&m, t).map_err(|e| Failure::new(EXIT_ANOMALY, e.to_string()))?;
                (Some(th.is_some()), Some(ext.is_some()))
            } else {
                (None, None)
            };
            let verdict = is_reflexible(&m).verdict;
            if extension == Some(true) && verdict != Chirality::Reflexible {
                return Err(Failure::new(
                    EXIT_ANOMALY,
                    "θ extended to a reflection of a map that tests chiral",
                ));
            }
            io.json(&json!({
                "gamma_type": t,
                "exceptional": r.exceptional,
                "index": r.index,
                "h_order": r.h_order(),
                "u": r.u,
                "v": r.v,
                "w": r.w,
                "presentation_ok": r.presentation_ok,
                "theta_found": theta,
                "theta_extends": extension,
                "chirality": verdict,
            }))?;
            Ok(EXIT_OK)
        }
        Command::Seed {
            map_type,
            rmax,
            budget,
            out,
        } => {
            let s = find_chiral_seed(map_type, rmax, SearchBudget::candidates(budget)).map_err(|e| {
                let code = match e {
                    SeedError::Exhausted { .. } => EXIT_EXHAUSTED,
                    _ => EXIT_PARSE,
                };
                Failure::new(code, e.to_string())
            })?;
            let summary = json!({
                "degree": s.degree,
                "group_tag": s.group_tag,
                "stream_position": s.stream_position,
                "pair_x": s.pair.x.images(),
                "pair_y": s.pair.y.images(),
                "darts": s.map.darts(),
                "type": s.map.map_type(),
                "genus": s.map.census().genus,
                "chirality": Chirality::Chiral,
                "oracle_confirmed": s.oracle_confirmed,
            });
            if let Some(p) = out {
                io::emit_map(&s.map, &p)?;
            }
            io.json(&summary)?;
            Ok(EXIT_OK)
        }
        Command::ChiralCover {
            file,
            rmax,
            budget,
            out,
            count,
            aux,
        } => {
            if count == 0 {
                return Err(Failure::new(EXIT_USAGE, "--count must be at least 1"));
            }
            let m = io::parse_map(&file)?;
            let aux: Vec<OrientedMap> = aux.iter().map(|p| io::parse_map(p)).collect::<Result<_, _>>()?;
            let bounds = CoverBounds::new(rmax, budget);
            let dir = out.parent().map(Path::to_path_buf).unwrap_or_default();
            let stem = out
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "certificate".into());
            let storage_for = |i: usize, darts: usize| {
                if darts > io::INLINE_DART_LIMIT {
                    MapStorage::External(PathBuf::from(format!("{stem}.product{i}.json")))
                } else {
                    MapStorage::Inline
                }
            };
            let doc = if count == 1 {
                let cert = chiral_cover(&m, &bounds, &aux)?;
                if !cert.anomalies.is_empty() {
                    io.note(&format!("{} anomalies recorded before success", cert.anomalies.len()));
                }
                certificate_to_value(&cert, &storage_for(0, cert.product.darts()), &dir)?
            } else {
                let batch = many_chiral_covers(&m, count, &bounds, &aux)?;
                let certs = batch
                    .certificates
                    .iter()
                    .enumerate()
                    .map(|(i, c)| certificate_to_value(c, &storage_for(i, c.product.darts()), &dir))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(why) = &batch.exhausted {
                    io.note(why);
                }
                json!({
                    "format": io::CERT_BATCH_FORMAT,
                    "requested": count,
                    "exhausted": batch.exhausted,
                    "certificates": certs,
                    "non_isomorphism": batch.witnesses,
                })
            };
            std::fs::write(&out, pipeline::to_pretty(&doc))
                .map_err(|e| Failure::new(EXIT_ANOMALY, format!("{}: {e}", out.display())))?;
            let n = doc["certificates"].as_array().map_or(1, Vec::len);
            io.json(&json!({ "certificates": n, "output": out.display().to_string() }))?;
            let anomalous = doc["anomalies"].as_array().is_some_and(|a| !a.is_empty());
            Ok(if anomalous { EXIT_ANOMALY } else { EXIT_OK })
        }
        Command::Verify { cert } => {
            let text = std::fs::read_to_string(&cert)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", cert.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
            let dir = cert.parent().map(Path::to_path_buf).unwrap_or_default();
            let docs: Vec<&Value> = if v["format"] == io::CERT_BATCH_FORMAT {
                v["certificates"]
                    .as_array()
                    .map(|a| a.iter().collect())
                    .unwrap_or_default()
            } else {
                vec![&v]
            };
            for (i, d) in docs.iter().enumerate() {
                let c = certificate_from_value(d, &dir).map_err(|e| match e {
                    pipeline::VerifyError::File(f) => Failure::from(f),
                    pipeline::VerifyError::Schema(s) => Failure::new(EXIT_PARSE, s),
                    pipeline::VerifyError::Failed(s) => Failure::new(EXIT_ANOMALY, s),
                })?;
                verify_certificate(&c).map_err(|e| Failure::new(EXIT_ANOMALY, format!("certificate {i}: {e}")))?;
            }
            io.json(&json!({ "verified": docs.len() }))?;
            Ok(EXIT_OK)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let list: Vec<Value> = catalog_manifest()
                    .into_iter()
                    .map(|e| json!({"name": e.name, "provenance": e.provenance, "expected": e.expected}))
                    .collect();
                io.json(&Value::Array(list))?;
                Ok(EXIT_OK)
            }
            CatalogAction::Get { name, out } => {
                let e = catalog_get(&name).map_err(|e| match e {
                    SeedError::UnknownName(_) => Failure::new(EXIT_USAGE, e.to_string()),
                    other => Failure::new(EXIT_ANOMALY, other.to_string()),
                })?;
                io.emit_map(&e.map, out.as_deref())?;
                Ok(EXIT_OK)
            }
        },
        Command::Torus { kind, b, c, out } => {
            let m = match kind {
                TorusKind::Square => seed::torus_map_44(b, c),
                TorusKind::Triangular => seed::torus_map_36(b, c),
            }
            .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
            io.emit_map(&m, out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}
