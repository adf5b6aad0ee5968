//! `latmed`: medians, total orderizations and TOI checks from the command line.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use latmed::io::{parse_lattice, parse_map, parse_tuple};
use latmed::maps::{enumerate_homs, is_n_homomorphism, is_symmetric, HomFilter};
use latmed::theorems::{self, MapSource, Target, TheoremId, VerifyConfig};
use latmed::toi::{self, Condition};
use latmed::{Codomain, Domain, Error};
use serde_json::json;

use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "latmed", version, about = "k-th medians and total orderization invariance on finite distributive lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for every sampled or randomised check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Samples per check on the implicit real chain.
    #[arg(long, global = true, default_value_t = latmed::lattice::DEFAULT_SAMPLES)]
    samples: usize,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    parallelism: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Toi,
    Symmetric,
    Hom,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Checks the lattice axioms and distributivity of a lattice file.
    LatticeValidate {
        #[arg(long)]
        lattice: PathBuf,
    },
    /// The k-th median of a tuple, or of its first m entries with --m.
    Median {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        elements: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// The total orderization (M_1, ..., M_n) of a tuple.
    To {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        elements: String,
    },
    /// Checks a map for TOI, symmetry or the n-homomorphism laws.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long)]
        map: PathBuf,
        /// Domain for map files without one.
        #[arg(long, alias = "domain")]
        lattice: Option<PathBuf>,
        #[arg(long, default_value = "all", value_parser = parse_condition)]
        condition: Condition,
    },
    /// Enumerates the lattice n-homomorphisms between two finite lattices.
    EnumerateHoms {
        #[arg(long)]
        domain: PathBuf,
        /// Defaults to the domain.
        #[arg(long)]
        codomain: Option<PathBuf>,
        #[arg(long)]
        arity: usize,
        /// Keep only the symmetric homomorphisms.
        #[arg(long)]
        symmetric: bool,
    },
    /// Mechanically verifies a result over its default matrix or given inputs.
    Verify {
        /// A theorem id or `all`.
        id: String,
        /// Lattice for the median identities.
        #[arg(long, conflicts_with_all = ["domain", "codomain"])]
        lattice: Option<PathBuf>,
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, requires = "domain")]
        codomain: Option<PathBuf>,
        /// Map arity, or the longest tuple for the median identities.
        #[arg(long)]
        arity: Option<usize>,
        /// Verify this map instead of an enumerated family.
        #[arg(long)]
        map: Option<PathBuf>,
    },
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// An error with the exit status it maps to.
#[derive(Debug)]
struct Failure {
    status: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Capacity(_) | Error::Precondition(_) | Error::Internal(_) => 3,
            _ => 2,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        status: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load_lattice(path: &Path) -> Result<Domain, Failure> {
    Ok(parse_lattice(&read(path)?)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(p) = cli.parallelism {
        pool = pool.num_threads(p);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(Failure {
            status: 2,
            message: format!("cannot start worker pool: {e}"),
        }),
    };
    match result {
        Ok(report) => {
            report.emit(cli.format);
            ExitCode::from(if report.verdict.is_pass() { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("latmed: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let cfg = VerifyConfig {
        seed: cli.seed,
        samples: cli.samples,
        ..VerifyConfig::default()
    };
    match &cli.command {
        Command::LatticeValidate { lattice } => lattice_validate(lattice, &cfg),
        Command::Median {
            lattice,
            elements,
            k,
            m,
        } => median(lattice, elements, *k, *m, &cfg),
        Command::To { lattice, elements } => total_orderization(lattice, elements, &cfg),
        Command::Check {
            kind,
            map,
            lattice,
            condition,
        } => check(*kind, map, lattice.as_deref(), *condition, &cfg),
        Command::EnumerateHoms {
            domain,
            codomain,
            arity,
            symmetric,
        } => enumerate(domain, codomain.as_deref(), *arity, *symmetric, &cfg),
        Command::Verify {
            id,
            lattice,
            domain,
            codomain,
            arity,
            map,
        } => verify(id, lattice.as_deref(), domain.as_deref(), codomain.as_deref(), *arity, map.as_deref(), cfg),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Largest triple scan `lattice-validate` runs.
const BRUTE_FORCE_TRIPLES: u64 = 1 << 30;

fn lattice_validate(path: &Path, cfg: &VerifyConfig) -> Result<Report, Failure> {
    let mut report = Report::new("lattice-validate", cfg.seed);
    report.input("lattice", path_str(path));
    let lattice = match load_lattice(path)? {
        Domain::Finite(l) => l,
        Domain::Chain(_) => {
            report.line("implicit chain: a total order, checked by sampling only");
            return Ok(report);
        }
    };
    report.count("elements", lattice.size() as u64);
    let triples = (lattice.size() as u64).saturating_pow(3);
    if triples > BRUTE_FORCE_TRIPLES {
        let b = lattice.birkhoff().ok_or_else(|| {
            Error::Capacity(format!(
                "{} has {} elements; brute-force validation stops at {BRUTE_FORCE_TRIPLES} triples",
                lattice.name(),
                lattice.size()
            ))
        })?;
        report.line(format!(
            "{}: distributive by construction, Birkhoff embedding verified",
            lattice.name()
        ));
        report.count("join_irreducibles", b.irreducibles().len() as u64);
        return Ok(report);
    }
    let axioms = lattice.validate_lattice()?;
    report.check(&axioms);
    if axioms.passed() {
        let dist = lattice.check_distributive()?;
        report.check(&dist);
        if let Some(b) = lattice.birkhoff() {
            report.count("join_irreducibles", b.irreducibles().len() as u64);
        }
    }
    Ok(report)
}

fn tuple_of(domain: &Domain, elements: &str) -> Result<Vec<latmed::Value>, Failure> {
    domain.require_distributive()?;
    Ok(parse_tuple(domain, elements)?)
}

fn median(path: &Path, elements: &str, k: usize, m: Option<usize>, cfg: &VerifyConfig) -> Result<Report, Failure> {
    let domain = load_lattice(path)?;
    let xs = tuple_of(&domain, elements)?;
    let value = match m {
        Some(m) => domain.median_relative(&xs, k, m)?,
        None => domain.median(&xs, k)?,
    };
    let mut report = Report::new("median", cfg.seed);
    report.input("lattice", path_str(path));
    report.input("elements", elements.to_string());
    report.input("k", k.to_string());
    if let Some(m) = m {
        report.input("m", m.to_string());
    }
    report.set_result(json!(domain.render(value)), domain.render(value));
    Ok(report)
}

fn total_orderization(path: &Path, elements: &str, cfg: &VerifyConfig) -> Result<Report, Failure> {
    let domain = load_lattice(path)?;
    let xs = tuple_of(&domain, elements)?;
    let to: Vec<String> = domain.total_orderization(&xs)?.into_iter().map(|v| domain.render(v)).collect();
    let mut report = Report::new("to", cfg.seed);
    report.input("lattice", path_str(path));
    report.input("elements", elements.to_string());
    let text = to.join(",");
    report.set_result(json!(to), text);
    Ok(report)
}

fn check(
    kind: CheckKind,
    map_path: &Path,
    lattice: Option<&Path>,
    condition: Condition,
    cfg: &VerifyConfig,
) -> Result<Report, Failure> {
    let default_domain = lattice.map(load_lattice).transpose()?;
    let map = parse_map(&read(map_path)?, default_domain.as_ref())?;
    let plan = cfg.plan();
    let name = match kind {
        CheckKind::Toi => "check toi",
        CheckKind::Symmetric => "check symmetric",
        CheckKind::Hom => "check hom",
    };
    let mut report = Report::new(name, cfg.seed);
    if let Some(l) = lattice {
        report.input("lattice", path_str(l));
    }
    report.input("map", path_str(map_path));
    match kind {
        CheckKind::Toi => {
            report.input("condition", condition.to_string());
            map.domain().require_distributive()?;
            for r in toi::check(&map, condition, &plan)? {
                report.check(&r);
            }
        }
        CheckKind::Symmetric => report.check(&is_symmetric(&map, &plan)?),
        CheckKind::Hom => report.check(&is_n_homomorphism(&map, &plan)?),
    }
    Ok(report)
}

fn enumerate(
    domain_path: &Path,
    codomain_path: Option<&Path>,
    arity: usize,
    symmetric: bool,
    cfg: &VerifyConfig,
) -> Result<Report, Failure> {
    let finite = |p: &Path| -> Result<_, Failure> {
        load_lattice(p)?
            .finite()
            .cloned()
            .ok_or_else(|| Error::Precondition("enumeration needs finite lattices".into()).into())
    };
    let domain = finite(domain_path)?;
    let codomain = match codomain_path {
        Some(p) => finite(p)?,
        None => domain.clone(),
    };
    domain.require_distributive()?;
    codomain.require_distributive()?;
    let filter = if symmetric { HomFilter::SymmetricOnly } else { HomFilter::All };
    let e = enumerate_homs(&domain, &codomain, arity, filter)?;

    let mut report = Report::new("enumerate-homs", cfg.seed);
    report.input("domain", path_str(domain_path));
    if let Some(p) = codomain_path {
        report.input("codomain", path_str(p));
    }
    report.input("arity", arity.to_string());
    report.input("symmetric", symmetric.to_string());
    report.count("table_space", e.table_space);
    report.count("search_nodes", e.nodes);
    report.count("homs", e.homs as u64);
    report.count("kept", e.maps.len() as u64);
    let tables: Vec<_> = e.maps.iter().map(|m| m.table_values().unwrap_or_default().to_vec()).collect();
    for m in &e.maps {
        report.line(m.to_string());
    }
    report.set_result(json!(tables), format!("{} maps", e.maps.len()));
    Ok(report)
}

fn verify(
    id: &str,
    lattice: Option<&Path>,
    domain: Option<&Path>,
    codomain: Option<&Path>,
    arity: Option<usize>,
    map: Option<&Path>,
    mut cfg: VerifyConfig,
) -> Result<Report, Failure> {
    let mut report = Report::new("verify", cfg.seed);
    report.input("theorem", id.to_string());
    report.input("samples", cfg.samples.to_string());
    let ids: Vec<TheoremId> = if id == "all" {
        TheoremId::ALL.to_vec()
    } else {
        vec![id.parse()?]
    };
    let custom = lattice.is_some() || domain.is_some() || map.is_some();
    if custom && ids.len() > 1 {
        return Err(Error::Format("verify all runs the default matrices only".into()).into());
    }

    let runs = if !custom {
        if let Some(n) = arity {
            cfg.n_max = n;
            report.input("arity", n.to_string());
        }
        let mut runs = Vec::new();
        for id in ids {
            runs.extend(theorems::verify_default(id, &cfg)?);
        }
        runs
    } else {
        let id = ids[0];
        if id.is_median_law() {
            let path = lattice
                .or(domain)
                .ok_or_else(|| Failure::from(Error::Format(format!("{id} needs --lattice"))))?;
            report.input("lattice", path_str(path));
            if let Some(n) = arity {
                cfg.n_max = n;
                report.input("arity", n.to_string());
            }
            let lat = load_lattice(path)?
                .finite()
                .cloned()
                .ok_or_else(|| Failure::from(Error::Precondition(format!("{id} needs a finite lattice"))))?;
            vec![theorems::verify_median_law(id, &lat, &cfg)?]
        } else {
            let dom = match domain.or(lattice) {
                Some(p) => {
                    report.input("domain", path_str(p));
                    Some(load_lattice(p)?)
                }
                None => None,
            };
            let (target, source) = match map {
                Some(p) => {
                    report.input("map", path_str(p));
                    let m = parse_map(&read(p)?, dom.as_ref())?;
                    let target = Target {
                        domain: m.domain().clone(),
                        codomain: m.codomain().clone(),
                        arity: m.arity(),
                    };
                    (target, MapSource::Given(vec![m]))
                }
                None => {
                    let dom = dom.ok_or_else(|| Failure::from(Error::Format(format!("{id} needs --domain"))))?;
                    let cod = match codomain {
                        Some(p) => {
                            report.input("codomain", path_str(p));
                            load_lattice(p)?.as_codomain()
                        }
                        None => dom.as_codomain(),
                    };
                    let arity = arity.ok_or_else(|| Failure::from(Error::Format(format!("{id} needs --arity"))))?;
                    report.input("arity", arity.to_string());
                    let target = Target {
                        domain: dom,
                        codomain: cod,
                        arity,
                    };
                    let source = default_source(id, &target, &cfg);
                    (target, source)
                }
            };
            vec![theorems::verify_map_theorem(id, &target, &source, &cfg)?]
        }
    };

    let single = runs.len() == 1;
    for run in &runs {
        report.line(format!(
            "{} on {} [{}] {}: {} instances",
            run.theorem, run.matrix, run.source, run.verdict, run.instances
        ));
        report.absorb(run.verdict, &run.witnesses);
        let prefix = if single {
            String::new()
        } else {
            format!("{} {} [{}] ", run.theorem, run.matrix, run.source)
        };
        report.count(&format!("{prefix}instances"), run.instances);
        for (k, v) in &run.counts {
            report.count(&format!("{prefix}{k}"), *v);
        }
    }
    report.count("runs", runs.len() as u64);
    Ok(report)
}

/// Largest table space `verify charsoftoi` walks exhaustively.
const ALL_TABLES_LIMIT: u64 = 1 << 16;

fn default_source(id: TheoremId, target: &Target, cfg: &VerifyConfig) -> MapSource {
    match id {
        TheoremId::Charsoftoi => {
            let space = match (&target.domain, &target.codomain) {
                (Domain::Finite(l), Codomain::Lattice(m)) => u32::try_from(target.arity)
                    .ok()
                    .and_then(|n| (l.size() as u64).checked_pow(n))
                    .and_then(|cells| u32::try_from(cells).ok())
                    .and_then(|cells| (m.size() as u64).checked_pow(cells)),
                _ => None,
            };
            match space {
                Some(s) if s <= ALL_TABLES_LIMIT => MapSource::AllTables,
                _ => MapSource::RandomTables {
                    count: 500,
                    seed: cfg.seed,
                },
            }
        }
        TheoremId::MultihomToi => MapSource::Enumerated(HomFilter::All),
        _ => MapSource::Enumerated(HomFilter::SymmetricOnly),
    }
}
