//! Command-line frontend: manifests in, reports out.
//!
//! Exit codes are 0 on success, 2 for domain errors (invalid manifests,
//! incompatible pairs, bad contact data) and 3 for parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sympsum_core::enumerate::{
    enumerate_sphere_classes, is_relatively_minimal, reproduce_rational_table, reproduce_ruled_table,
    RelativeMinimality, DEFAULT_BOUND,
};
use sympsum_core::fibersum::{decide_minimality, decide_minimality_as, decide_minimality_with_cap};
use sympsum_core::gw::{purely_relative_vanishes, relative_constraint_degree, ContactVector, VanishingVerdict};
use sympsum_core::StandardCap;

pub mod manifest;
pub mod report;

use report::{
    render_text, Body, EnumerateBody, GwdimBody, MinimalityBody, RationalTableBody, RationalTableRow, Report,
    RuledTableBody, ValidateBody, CANDIDATE_CERTAINTY,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl From<sympsum_core::Error> for CliError {
    fn from(e: sympsum_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Rational,
    Ruled,
}

#[derive(Parser, Debug)]
#[command(name = "sympsum", version, about = "Minimality of symplectic sphere sums from lattice data")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BoundArg {
    /// Coefficient bound for searches.
    #[arg(long, env = "SYMPSUM_BOUND", value_parser = clap::value_parser!(i64).range(1..))]
    pub bound: Option<i64>,
}

impl BoundArg {
    pub fn get(self) -> i64 {
        self.bound.unwrap_or(DEFAULT_BOUND)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a manifest against the model and pair invariants.
    Validate { path: PathBuf },
    /// List sphere classes of a given square, or reproduce a table.
    Enumerate {
        #[arg(required_unless_present = "table")]
        path: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "table")]
        square: Option<i64>,
        #[command(flatten)]
        bound: BoundArg,
        /// Drop non-primitive and negative-degree classes.
        #[arg(long)]
        geometric: bool,
        #[arg(long, value_enum, conflicts_with_all = ["path", "square"])]
        table: Option<Table>,
        /// Base genus for the ruled table.
        #[arg(long, default_value_t = 1)]
        genus: u32,
    },
    /// Decide minimality of the sum of X with a cap.
    Minimality {
        x: PathBuf,
        /// `cp2_h`, `cp2_2h`, `bundle_fiber:g[:twisted]` or `bundle_section:n`.
        #[arg(long, conflicts_with = "y")]
        cap: Option<String>,
        #[arg(required_unless_present = "cap")]
        y: Option<PathBuf>,
        #[command(flatten)]
        bound: BoundArg,
    },
    /// Constraint degree and vanishing verdict of a purely relative invariant.
    Gwdim {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        class: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        /// Contact orders; all simple when omitted.
        #[arg(long, value_delimiter = ',')]
        contacts: Option<Vec<i64>>,
        #[arg(long, default_value_t = 0)]
        insertions: u32,
    },
    /// Print a library manifest.
    Generate {
        #[command(subcommand)]
        which: Generate,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Generate {
    /// `CP^2` blown up `k` times.
    Cp2Blowup { k: usize },
    /// `S^2`-bundle over a genus-`g` surface, with the fiber as divisor.
    S2Bundle {
        genus: u32,
        #[arg(long)]
        twisted: bool,
    },
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_PARSE
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(Output::Report(r)) => {
            let code = match &r.body {
                Body::Validate(b) if !b.valid => EXIT_DOMAIN,
                _ => EXIT_OK,
            };
            let text = match cli.format {
                Format::Text => render_text(&r),
                Format::Json => serde_json::to_string_pretty(&r).expect("reports serialize") + "\n",
            };
            let _ = write!(out, "{text}");
            code
        }
        Ok(Output::Manifest(m)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&m).expect("manifests serialize"));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub enum Output {
    Report(Report),
    Manifest(manifest::Manifest),
}

pub fn execute(cmd: &Command) -> Result<Output, CliError> {
    Ok(match cmd {
        Command::Validate { path } => Output::Report(validate(path)?),
        Command::Enumerate { path, square, bound, geometric, table, genus } => {
            let b = bound.get();
            Output::Report(match table {
                Some(Table::Rational) => rational_table(b)?,
                Some(Table::Ruled) => ruled_table(*genus)?,
                None => {
                    let path = path.as_ref().expect("clap requires a path");
                    enumerate(path, square.expect("clap requires a square"), b, *geometric)?
                }
            })
        }
        Command::Minimality { x, cap, y, bound } => {
            Output::Report(minimality(x, cap.as_deref(), y.as_deref(), bound.get())?)
        }
        Command::Gwdim { path, class, genus, contacts, insertions } => {
            Output::Report(gwdim(path, class, *genus, contacts.as_deref(), *insertions)?)
        }
        Command::Generate { which } => Output::Manifest(match which {
            Generate::Cp2Blowup { k } => manifest::generate_cp2_blowup(*k),
            Generate::S2Bundle { genus, twisted } => manifest::generate_s2_bundle(*genus, *twisted),
        }),
    })
}

pub fn validate(path: &Path) -> Result<Report, CliError> {
    let m = manifest::read(path)?;
    let violations = match manifest::build_model(&m) {
        Ok(model) => manifest::violations(&m, &model),
        Err(CliError::Domain(e)) => vec![e],
        Err(e) => return Err(e),
    };
    let body = ValidateBody { name: m.name, valid: violations.is_empty(), violations };
    Ok(Report::new("validate", None, Body::Validate(body)))
}

pub fn enumerate(path: &Path, square: i64, bound: i64, geometric: bool) -> Result<Report, CliError> {
    let loaded = manifest::load(path)?;
    let rows = enumerate_sphere_classes(&loaded.model, square, bound, geometric)?;
    let body = EnumerateBody {
        model: loaded.model.name.clone(),
        square,
        geometric,
        certainty: CANDIDATE_CERTAINTY.into(),
        rows,
    };
    Ok(Report::new("enumerate", Some(bound), Body::Enumerate(body)))
}

pub fn rational_table(bound: i64) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    for row in reproduce_rational_table()? {
        let p = row.pair()?;
        let relative = is_relatively_minimal(&p, bound)?;
        let relatively_minimal = match &relative {
            RelativeMinimality::Minimal { .. } => Some(true),
            RelativeMinimality::NotMinimal { .. } => Some(false),
            RelativeMinimality::Unknown { .. } => None,
        };
        let witness_label = relative.witness().map(|e| p.model.format_class(e));
        rows.push(RationalTableRow { row, relative, relatively_minimal, witness_label });
    }
    let body = RationalTableBody { certainty: CANDIDATE_CERTAINTY.into(), rows };
    Ok(Report::new("enumerate --table rational", Some(bound), Body::RationalTable(body)))
}

pub fn ruled_table(genus: u32) -> Result<Report, CliError> {
    let rows = reproduce_ruled_table(genus)?;
    Ok(Report::new("enumerate --table ruled", Some(DEFAULT_BOUND), Body::RuledTable(RuledTableBody { genus, rows })))
}

pub fn minimality(x: &Path, cap: Option<&str>, y: Option<&Path>, bound: i64) -> Result<Report, CliError> {
    let lx = manifest::load(x)?;
    let px = lx.require_pair()?;
    let (verdict, cap_label) = match (cap, y) {
        (Some(name), _) => {
            let kind = manifest::parse_cap(name)?;
            let cap = StandardCap::new(kind)?;
            (decide_minimality_with_cap(px, &cap, bound)?, manifest::cap_name(kind))
        }
        (None, Some(y)) => {
            let ly = manifest::load(y)?;
            let py = ly.require_pair()?;
            let v = match ly.cap {
                Some(kind) => decide_minimality_as(px, py, kind, bound)?,
                None => decide_minimality(px, py, bound)?,
            };
            let label = format!("{} ({})", ly.manifest.name, manifest::cap_name(v.case));
            (v, label)
        }
        (None, None) => return Err(CliError::Parse("either --cap or a Y manifest is required".into())),
    };
    let body = MinimalityBody {
        x: lx.manifest.name.clone(),
        cap: cap_label,
        summary: verdict.summary(),
        rule: verdict.rule.tag().into(),
        certainty: CANDIDATE_CERTAINTY.into(),
        verdict,
    };
    Ok(Report::new("minimality", Some(bound), Body::Minimality(body)))
}

pub fn gwdim(
    path: &Path,
    class: &[i64],
    genus: u32,
    contacts: Option<&[i64]>,
    insertions: u32,
) -> Result<Report, CliError> {
    let loaded = manifest::load(path)?;
    let p = loaded.require_pair()?;
    let a = p.model.class(class.to_vec())?;
    let contacts = match contacts {
        Some(s) => ContactVector::new(s.to_vec())?,
        None => {
            let av = p.divisor_pairing(&a)?;
            if av < 0 {
                return Err(CliError::Domain(format!("A.V = {av} is negative, no contact vector")));
            }
            ContactVector::new(vec![1; av as usize])?
        }
    };
    let degree = relative_constraint_degree(p, &a, genus, &contacts, insertions)?;
    let vanishing = purely_relative_vanishes(p, &a, genus)?;
    let tag = match vanishing {
        VanishingVerdict::Vanishes(rule) => Some(rule.tag().to_string()),
        VanishingVerdict::NotExcluded => None,
    };
    let body = GwdimBody {
        model: loaded.model.name.clone(),
        label: p.model.format_class(&a),
        class: class.to_vec(),
        genus,
        contacts,
        insertions,
        degree,
        vanishing,
        tag,
    };
    Ok(Report::new("gwdim", None, Body::Gwdim(body)))
}
