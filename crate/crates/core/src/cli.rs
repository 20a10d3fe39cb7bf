//! Command-line front end. Every invocation prints one JSON document.
//!
//! Exit codes: 0 on success, 1 on a domain error (the input is well formed but
//! the requested object does not exist or the computation is refused), 2 on
//! malformed input.

use std::ffi::OsString;
use std::fmt::Debug;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::complex::ComplexSpec;
use crate::estimates::{self, BoundReport, EstimateError};
use crate::gcomplex::{ActionSpec, GComplex, GComplexError};
use crate::graphct::graph_covering_type;
use crate::group::{GroupError, GroupSpec, PermGroup, DEFAULT_GROUP_CAP};
use crate::surface::{self, BranchingData, GeneratingVector, GeneratingVectorSpec};

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable overriding the group size cap.
pub const GROUP_CAP_ENV: &str = "GCOVER_GROUP_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "gcover",
    version,
    about = "Finite group actions on simplicial complexes"
)]
struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the regularity conditions R1, R2, R3 of an action.
    CheckRegular { action: PathBuf },
    /// Subdivide an action until it is strictly regular.
    Regularize { action: PathBuf },
    /// Orbit complex of a regular action.
    Quotient { action: PathBuf },
    /// Ordinary and equivariant f-vectors.
    Fvector { action: PathBuf },
    /// Equivariant covering type of a connected regular G-graph.
    CtGraph { action: PathBuf },
    /// Orbit-count and covering-type bounds for a surface with given branching data.
    SurfaceBounds {
        #[arg(long)]
        g_prime: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',')]
        periods: Vec<usize>,
    },
    /// Search for a generating vector.
    GvSearch {
        group: PathBuf,
        #[arg(long)]
        g_prime: usize,
        #[arg(long, value_delimiter = ',')]
        periods: Vec<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Lift a quotient triangulation to a regular G-triangulation of the branched cover.
    Lift {
        k2: PathBuf,
        group: PathBuf,
        gv: PathBuf,
        /// Branch vertices of the quotient, in the order of the elliptic elements.
        #[arg(long, value_delimiter = ',')]
        branch: Vec<usize>,
    },
    /// Minimal vertex count of a triangulated closed surface.
    #[command(group(ArgGroup::new("kind").required(true).args(["orientable", "non_orientable"])))]
    Jr {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        orientable: bool,
        #[arg(long)]
        non_orientable: bool,
    },
    /// Riemann-Hurwitz: total genus from --g-prime, or quotient genus from --genus.
    #[command(group(ArgGroup::new("side").required(true).args(["g_prime", "genus"])))]
    Rh {
        #[arg(long)]
        g_prime: Option<usize>,
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',')]
        periods: Vec<usize>,
    },
    /// Closed-form lower bounds on the equivariant covering type.
    #[command(subcommand)]
    Bound(BoundCommand),
}

#[derive(Subcommand, Debug)]
enum BoundCommand {
    Genus {
        #[arg(long)]
        gamma: u64,
    },
    Arithmetic {
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u64>,
    },
    Projective {
        #[arg(long)]
        n: u64,
    },
    SphereZpk {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    CohomSphere {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        /// Dimension of the fixed sphere; omit for a fixed-point-free action.
        #[arg(long)]
        r: Option<u64>,
    },
}

#[derive(Debug)]
enum Failure {
    Domain { kind: String, message: String },
    Malformed { kind: String, message: String },
}

impl Failure {
    fn domain(e: impl Debug + ToString) -> Self {
        Failure::Domain {
            kind: variant_name(&e),
            message: e.to_string(),
        }
    }

    fn malformed(e: impl Debug + ToString) -> Self {
        Failure::Malformed {
            kind: variant_name(&e),
            message: e.to_string(),
        }
    }
}

fn variant_name(e: &impl Debug) -> String {
    let s = format!("{e:?}");
    let end = s
        .find(|c: char| !c.is_alphanumeric() && c != '_')
        .unwrap_or(s.len());
    s[..end].to_string()
}

fn group_error(e: GroupError) -> Failure {
    match e {
        GroupError::GroupTooLarge { .. } => Failure::domain(e),
        _ => Failure::malformed(e),
    }
}

fn action_error(e: GComplexError) -> Failure {
    match e {
        GComplexError::Group(g) => group_error(g),
        GComplexError::NotRegular { .. } | GComplexError::MultiEdge { .. } => Failure::domain(e),
        _ => Failure::malformed(e),
    }
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

struct Context {
    cap: usize,
    files: Vec<FileDigest>,
    warnings: Vec<String>,
}

impl Context {
    fn read<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Malformed {
            kind: "ReadError".into(),
            message: format!("{}: {e}", path.display()),
        })?;
        self.files.push(FileDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        serde_json::from_slice(&bytes).map_err(|e| Failure::Malformed {
            kind: "ParseError".into(),
            message: format!("{}: {e}", path.display()),
        })
    }

    /// Reads an action; `complex` and `group` may be inline objects or paths
    /// relative to the action file.
    fn action(&mut self, path: &Path) -> Result<GComplex, Failure> {
        let mut raw: Value = self.read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for field in ["complex", "group"] {
            if let Some(rel) = raw.get(field).and_then(Value::as_str).map(str::to_owned) {
                raw[field] = self.read(&base.join(rel))?;
            }
        }
        let spec: ActionSpec = serde_json::from_value(raw).map_err(|e| Failure::Malformed {
            kind: "ParseError".into(),
            message: format!("{}: {e}", path.display()),
        })?;
        spec.build(self.cap).map_err(action_error)
    }

    fn group(&mut self, path: &Path) -> Result<Arc<PermGroup>, Failure> {
        let spec: GroupSpec = self.read(path)?;
        spec.build(self.cap).map(Arc::new).map_err(group_error)
    }
}

fn group_cap() -> Result<usize, Failure> {
    match std::env::var(GROUP_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Malformed {
            kind: "ParseError".into(),
            message: format!("{GROUP_CAP_ENV} must be a positive integer, got {v:?}"),
        }),
        Err(_) => Ok(DEFAULT_GROUP_CAP),
    }
}

fn bound(r: Result<BoundReport, EstimateError>) -> Result<Value, Failure> {
    r.map(|b| json!(b)).map_err(Failure::domain)
}

fn execute(cmd: &Command, cx: &mut Context) -> Result<Value, Failure> {
    match cmd {
        Command::CheckRegular { action } => {
            let x = cx.action(action)?;
            let r = x.regularity();
            Ok(json!({
                "r1": r.r1.holds,
                "r2": r.r2.holds,
                "r3": r.r3.holds,
                "regular": r.is_regular(),
                "strictly_regular": r.is_strictly_regular(),
                "witnesses": { "r1": r.r1.witness, "r2": r.r2.witness, "r3": r.r3.witness },
            }))
        }
        Command::Regularize { action } => {
            let x = cx.action(action)?;
            let (y, rounds) = x.regularize();
            Ok(json!({
                "subdivisions": rounds,
                "f_vector": y.complex().f_vector(),
                "action": y.spec(),
            }))
        }
        Command::Quotient { action } => {
            let x = cx.action(action)?;
            let q = x.quotient().map_err(action_error)?;
            Ok(json!({
                "complex": q.complex.spec(),
                "f_vector": q.complex.f_vector(),
                "vertex_projection": q.vertex_projection,
            }))
        }
        Command::Fvector { action } => {
            let x = cx.action(action)?;
            let f = x.equivariant_f_vector();
            Ok(json!({
                "f_vector": x.complex().f_vector(),
                "orbit_counts": f.orbit_counts,
                "stabilizer_orders": f.stabilizer_orders,
                "expanded": f.expanded(x.group().order()),
            }))
        }
        Command::CtGraph { action } => {
            let x = cx.action(action)?;
            let r = graph_covering_type(&x).map_err(Failure::domain)?;
            for s in r.strata.iter().filter(|s| s.no_loops) {
                cx.warnings.push(format!(
                    "stratum with isotropy order {} has no loops; it contributes the formula value 2",
                    s.isotropy_order
                ));
            }
            Ok(json!(r))
        }
        Command::SurfaceBounds {
            g_prime,
            order,
            periods,
        } => {
            let data =
                BranchingData::new(*g_prime, *order, periods.clone()).map_err(Failure::domain)?;
            let b = surface::surface_orbit_bounds(&data).map_err(Failure::domain)?;
            let genus = data.genus();
            if let Err(e) = &genus {
                cx.warnings.push(e.to_string());
            }
            let mut v = json!(b);
            v["genus"] = json!(genus.ok());
            Ok(v)
        }
        Command::GvSearch {
            group,
            g_prime,
            periods,
            budget,
        } => {
            let g = cx.group(group)?;
            let gv = surface::find_generating_vector(&g, *g_prime, periods, *budget)
                .map_err(Failure::domain)?;
            Ok(json!({
                "found": gv.is_some(),
                "generating_vector": gv.map(|v| v.to_spec(&g)),
            }))
        }
        Command::Lift {
            k2,
            group,
            gv,
            branch,
        } => {
            let k: ComplexSpec = cx.read(k2)?;
            let k = k.build().map_err(Failure::malformed)?;
            let k = surface::expand_for_lift(&k, branch).map_err(Failure::domain)?;
            let g = cx.group(group)?;
            let spec: GeneratingVectorSpec = cx.read(gv)?;
            let gv = GeneratingVector::from_spec(&spec, &g)
                .map_err(|v| Failure::domain(surface::SurfaceError::InvalidGeneratingVector(v)))?;
            let periods: Vec<usize> = gv.elliptic.iter().map(|&c| g.element_order(c)).collect();
            let data = BranchingData::new(gv.hyperbolic.len() / 2, g.order(), periods)
                .map_err(Failure::domain)?;
            let lift =
                surface::lift_triangulation(&k, branch, &data, &gv, &g).map_err(Failure::domain)?;
            Ok(json!({
                "quotient": k.spec(),
                "genus": lift.genus,
                "f_vector": lift.total.complex().f_vector(),
                "orbit_counts": lift.total.equivariant_f_vector().orbit_counts,
                "action": lift.total.spec(),
                "projection": lift.projection,
                "branch_vertex_orbits": lift.branch_vertex_orbits,
                "holonomy": lift.holonomy.iter().map(|&h| g.element(h).clone()).collect::<Vec<_>>(),
            }))
        }
        Command::Jr {
            genus, orientable, ..
        } => {
            let n = surface::jungerman_ringel(*genus, *orientable).map_err(Failure::domain)?;
            Ok(json!({ "n": n }))
        }
        Command::Rh {
            g_prime,
            genus,
            order,
            periods,
        } => {
            let (key, value) = match (g_prime, genus) {
                (Some(gp), _) => {
                    let data = BranchingData::new(*gp, *order, periods.clone())
                        .map_err(Failure::domain)?;
                    ("g", surface::rh_genus(&data))
                }
                (None, Some(g)) => {
                    BranchingData::new(0, *order, periods.clone()).map_err(Failure::domain)?;
                    ("g_prime", surface::rh_quotient_genus(*g, *order, periods))
                }
                (None, None) => unreachable!("clap requires one side"),
            };
            let realizable = value.is_integer() && *value.numer() >= 0;
            if !realizable {
                cx.warnings
                    .push(format!("{key} = {value} is not a non-negative integer"));
            }
            let shown = if value.is_integer() {
                json!(value.numer())
            } else {
                json!(value.to_string())
            };
            Ok(json!({ key: shown, "realizable": realizable }))
        }
        Command::Bound(b) => match b {
            BoundCommand::Genus { gamma } => bound(estimates::genus_lower_bound(*gamma)),
            BoundCommand::Arithmetic { degrees } => bound(estimates::arithmetic_bound(degrees)),
            BoundCommand::Projective { n } => Ok(json!(estimates::projective_bound(*n))),
            BoundCommand::SphereZpk { d, m, n } => bound(estimates::sphere_zpk_bound(*d, *m, *n)),
            BoundCommand::CohomSphere { n, p, r } => {
                bound(estimates::cohomology_sphere_bound(*n, *p, *r))
            }
        },
    }
}

fn command_name(argv: &[OsString]) -> String {
    argv.iter()
        .skip(1)
        .map(|a| a.to_string_lossy())
        .find(|a| !a.starts_with('-'))
        .map(|a| a.into_owned())
        .unwrap_or_default()
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Runs one invocation. Returns the exit code and the text for standard output.
pub fn run<I, T>(argv: I) -> (u8, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(
                e.kind(),
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                return (0, e.to_string());
            }
            let kind = match e.kind() {
                InvalidSubcommand => "UnknownCommand",
                _ => "UsageError",
            };
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command_name(&argv),
                "error": { "kind": kind, "message": e.to_string() },
            });
            return (2, render(&report));
        }
    };
    let name = command_name(&argv);
    let outcome = group_cap().and_then(|cap| {
        let mut cx = Context {
            cap,
            files: Vec::new(),
            warnings: Vec::new(),
        };
        let result = execute(&cli.command, &mut cx);
        result.map(|r| (r, cx))
    });
    let (code, report) = match outcome {
        Ok((result, cx)) => (
            0,
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "inputs": { "args": argv.iter().skip(1).map(|a| a.to_string_lossy()).collect::<Vec<_>>(), "files": cx.files },
                "result": result,
                "warnings": cx.warnings,
            }),
        ),
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Domain { kind, message } => (1, kind, message),
                Failure::Malformed { kind, message } => (2, kind, message),
            };
            (
                code,
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "error": { "kind": kind, "message": message },
                }),
            )
        }
    };
    let text = render(&report);
    match &cli.output {
        Some(path) => match fs::write(path, &text) {
            Ok(()) => (code, String::new()),
            Err(e) => {
                let err = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "error": { "kind": "WriteError", "message": format!("{}: {e}", path.display()) },
                });
                (1, render(&err))
            }
        },
        None => (code, text),
    }
}
