//! `m3`: extract, combine, query and measure source-code fact models.

use std::fs;
use std::io::Write;
use std::path::{Component, Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use m3::ast::{AstError, AstService};
use m3::extract::extract_directory;
use m3::metrics::{self, MetricError};
use m3::model::ModelError;
use m3::serial::{read_model, write_model};
use m3::source::FsResolver;
use m3::{M3Model, SourceLocation};

const EXIT_FAILURE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "m3",
    version,
    about = "Extract, combine, query and measure source-code fact models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Extract a model from every `.java` file below a directory.
    Extract {
        src_root: PathBuf,
        /// Authority of the logical locations, e.g. the project name.
        #[arg(long)]
        authority: String,
        /// Name physical locations `project://NAME/...` instead of absolute `file` paths.
        #[arg(long)]
        project: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fuse models by pointwise union.
    Compose {
        #[arg(required = true, num_args = 2..)]
        models: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fuse models after rebinding uses to the declaring model's authority.
    Link {
        #[arg(required = true, num_args = 2..)]
        models: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the image of a location under a relation.
    Query {
        model: PathBuf,
        relation: String,
        subject: String,
        #[arg(long)]
        inverse: bool,
        #[arg(long)]
        closure: bool,
    },
    /// Compute a metric report.
    Metric {
        model: PathBuf,
        metric: Metric,
        /// Directory that `project://` locations resolve against.
        #[arg(long)]
        src: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dump the annotated tree of a declaration.
    Ast {
        model: PathBuf,
        subject: String,
        #[arg(long)]
        src: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Volume,
    Cc,
    Dit,
    Fanout,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        fail(EXIT_FAILURE, e.to_string())
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        let code = match &e {
            MetricError::SourceUnavailable(_) | MetricError::Ast(AstError::SourceUnavailable(_)) => EXIT_IO,
            _ => EXIT_FAILURE,
        };
        fail(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("m3: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn absolute(path: &Path) -> Result<PathBuf, Failure> {
    std::path::absolute(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

/// `file` location of an absolute path.
fn file_location(path: &Path) -> SourceLocation {
    let segments = path.components().filter_map(|c| match c {
        Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
        _ => None,
    });
    SourceLocation::new("file", "", segments).expect("valid scheme")
}

fn read(path: &Path) -> Result<M3Model, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
    read_model(&text).map_err(|e| fail(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

fn output_id(out: &Option<PathBuf>) -> Result<SourceLocation, Failure> {
    Ok(match out {
        Some(p) => file_location(&absolute(p)?),
        None => SourceLocation::parse("|unknown:///|").expect("valid literal"),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| fail(EXIT_IO, format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| fail(EXIT_IO, e.to_string())),
    }
}

fn subject(literal: &str) -> Result<SourceLocation, Failure> {
    SourceLocation::parse(literal).map_err(|e| fail(EXIT_USAGE, e.to_string()))
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Extract {
            src_root,
            authority,
            project,
            out,
        } => {
            let dir = absolute(&src_root)?;
            let (root, resolver) = match project {
                Some(name) => (
                    SourceLocation::new("project", &name, Vec::<String>::new()).expect("valid scheme"),
                    FsResolver::new(Some(dir)),
                ),
                None => (file_location(&dir), FsResolver::new(None)),
            };
            let result = extract_directory(&root, &authority, &resolver).map_err(|e| fail(EXIT_IO, e.to_string()))?;
            for d in &result.diagnostics {
                eprintln!("{d}");
            }
            emit(&out, &write_model(&result.model))?;
            Ok(if result.has_errors() { EXIT_FAILURE } else { 0 })
        }
        Cmd::Compose { models, out } => {
            let id = output_id(&out)?;
            let mut acc = read(&models[0])?;
            for p in &models[1..] {
                acc = acc.compose(&read(p)?, id.clone())?;
            }
            acc.id = id;
            emit(&out, &write_model(&acc))?;
            Ok(0)
        }
        Cmd::Link { models, out } => {
            let id = output_id(&out)?;
            let mut acc = read(&models[0])?;
            for p in &models[1..] {
                acc = acc.link(&read(p)?, id.clone())?;
            }
            acc.id = id;
            emit(&out, &write_model(&acc))?;
            Ok(0)
        }
        Cmd::Query {
            model,
            relation,
            subject: s,
            inverse,
            closure,
        } => {
            let x = subject(&s)?;
            let m = read(&model)?;
            let mut r = m.relation(&relation)?.clone();
            if inverse {
                r = r.inverse();
            }
            if closure {
                r = r.transitive_closure();
            }
            let mut lines: Vec<String> = r.image(&x).iter().map(|l| l.to_string()).collect();
            lines.sort();
            let mut text = lines.join("\n");
            if !text.is_empty() {
                text.push('\n');
            }
            emit(&None, &text)?;
            Ok(0)
        }
        Cmd::Metric {
            model,
            metric,
            src,
            format,
        } => {
            let m = read(&model)?;
            let resolver = FsResolver::new(src.map(|s| absolute(&s)).transpose()?);
            let report = match metric {
                Metric::Volume => metrics::volume(&m, &resolver).map_err(MetricError::from)?,
                Metric::Cc => metrics::cc_report(&m, &resolver)?,
                Metric::Fanout => metrics::fan_out_report(&m),
                Metric::Dit => {
                    let (report, warnings) = metrics::dit_report(&m)?;
                    for w in warnings {
                        eprintln!("{w}");
                    }
                    report
                }
            };
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Table => report.to_table(),
            };
            emit(&None, &text)?;
            Ok(0)
        }
        Cmd::Ast { model, subject: s, src } => {
            let x = subject(&s)?;
            let m = read(&model)?;
            let resolver = FsResolver::new(Some(absolute(&src)?));
            let tree = AstService::new(&m, &resolver)
                .get(&x)
                .map_err(|e| Failure::from(MetricError::from(e)))?;
            emit(&None, &tree.dump())?;
            Ok(0)
        }
    }
}
