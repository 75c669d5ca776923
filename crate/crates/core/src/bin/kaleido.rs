use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use kaleido::cli::{self, SpectrumSource, System, EXIT_DOMAIN, EXIT_OK, EXIT_VERIFY_FAILED};
use kaleido::group::{CountingReport, GroupSummary, DEFAULT_MAX_ORDER};
use kaleido::masses::{limiting_spectrum, Family, MassSpectrum, SpectrumLabel, Wall};
use kaleido::roots::{CoxeterDiagram, RootSet, DEFAULT_DIAGRAM_TOL};
use kaleido::states::{angular_density_grid, AntiInvariantState, Wavevector};
use kaleido::{Error, JacobiFrame};

/// Hard-core few-body systems with H3 and H4 reflection symmetry.
///
/// Exit codes: 0 ok, 1 verification failure, 2 domain or input error,
/// 3 mirror arrangement not kaleidoscopic or group closure overflow.
#[derive(Parser)]
#[command(name = "kaleido", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a member of the H3 or H4 mass family.
    Family {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        m2: f64,
    },
    /// Print the half-line spectra at the ends of the family intervals.
    Limits {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, value_enum)]
        end: Option<EndArg>,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        m2: f64,
    },
    /// Print simple roots and the inferred Coxeter diagram.
    Roots {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Generate the reflection group and print its summary.
    Group {
        #[command(flatten)]
        source: SourceArgs,
        /// Include every group matrix in the output.
        #[arg(long)]
        dump_matrices: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
    /// Run the invariant suite. JSON report on stdout, table on stderr.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        /// Incident wavevector, comma separated (default: seeded random).
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
        #[arg(long, default_value_t = cli::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the angular density of the zero-energy state as CSV.
    Density {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Fixed hyperspherical angle(s) for relative spaces above 3D.
        #[arg(long, allow_hyphen_values = true)]
        slice: Option<String>,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    H3,
    H4,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::H3 => Family::H3,
            FamilyArg::H4 => Family::H4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EndArg {
    Left,
    Right,
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, value_enum, conflicts_with_all = ["masses_json", "masses"])]
    family: Option<FamilyArg>,
    #[arg(long, requires = "family", allow_hyphen_values = true)]
    xi: Option<f64>,
    #[arg(long, requires = "family", allow_hyphen_values = true)]
    m2: Option<f64>,
    /// JSON file {"label": "H3"|"H4"|"Custom", "masses": [...]}.
    #[arg(long, conflicts_with = "masses")]
    masses_json: Option<PathBuf>,
    /// Comma-separated masses m1,...,mN.
    #[arg(long, allow_hyphen_values = true)]
    masses: Option<String>,
}

impl SourceArgs {
    fn source(&self) -> Result<SpectrumSource, Error> {
        if let Some(family) = self.family {
            let xi = self
                .xi
                .ok_or_else(|| Error::Domain("--family needs --xi".into()))?;
            return Ok(SpectrumSource::Family {
                family: family.into(),
                xi,
                m2: self.m2.unwrap_or(1.0),
            });
        }
        if let Some(path) = &self.masses_json {
            return Ok(SpectrumSource::MassesJson(path.clone()));
        }
        if let Some(list) = &self.masses {
            return Ok(SpectrumSource::Masses(cli::parse_real_list(list)?));
        }
        Err(Error::Domain(
            "give a spectrum with --family/--xi, --masses-json or --masses".into(),
        ))
    }

    fn system(&self, max_order: usize) -> Result<System, Error> {
        System::build(self.source()?.resolve()?, max_order)
    }
}

#[derive(Serialize)]
struct GroupReport {
    #[serde(flatten)]
    summary: GroupSummary,
    counting_check: CountingReport,
}

#[derive(Serialize)]
struct LimitReport {
    family: SpectrumLabel,
    end: &'static str,
    wall_particle: usize,
    #[serde(serialize_with = "kaleido::numfmt::real")]
    wall_position: f64,
    half_line: &'static str,
    spectrum: MassSpectrum,
}

#[derive(Serialize)]
struct RootsReport<'a> {
    spectrum: &'a MassSpectrum,
    roots: &'a RootSet,
    diagram: Option<CoxeterDiagram>,
}

fn print_json(value: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    // A closed pipe is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Family { family, xi, m2 } => {
            let spectrum = Family::from(family).spectrum(xi, m2)?;
            print_json(&spectrum);
        }
        Command::Limits { family, end, m2 } => {
            let families = match family {
                Some(f) => vec![Family::from(f)],
                None => vec![Family::H3, Family::H4],
            };
            let ends = match end {
                Some(EndArg::Left) => vec![Wall::LeftWall],
                Some(EndArg::Right) => vec![Wall::RightWall],
                None => vec![Wall::LeftWall, Wall::RightWall],
            };
            let mut out = Vec::new();
            for &f in &families {
                for &e in &ends {
                    let l = limiting_spectrum(f, e, m2)?;
                    let (end, half_line) = match e {
                        Wall::LeftWall => ("left", "x > 0"),
                        Wall::RightWall => ("right", "x < 0"),
                    };
                    out.push(LimitReport {
                        family: f.label(),
                        end,
                        wall_particle: l.wall_particle,
                        wall_position: l.wall_position,
                        half_line,
                        spectrum: l.spectrum,
                    });
                }
            }
            print_json(&out);
        }
        Command::Roots { source } => {
            let spectrum = source.source()?.resolve()?;
            let frame = JacobiFrame::new(spectrum);
            let roots = RootSet::simple_roots(&frame);
            match roots.infer_diagram(DEFAULT_DIAGRAM_TOL) {
                Ok(diagram) => print_json(&RootsReport {
                    spectrum: frame.spectrum(),
                    roots: &roots,
                    diagram: Some(diagram),
                }),
                Err(e) => {
                    print_json(&RootsReport {
                        spectrum: frame.spectrum(),
                        roots: &roots,
                        diagram: None,
                    });
                    return Err(e);
                }
            }
        }
        Command::Group {
            source,
            dump_matrices,
            max_order,
        } => {
            let system = source.system(max_order)?;
            print_json(&GroupReport {
                summary: system.group.summary(&system.diagram, dump_matrices),
                counting_check: system.counting(),
            });
        }
        Command::Verify {
            source,
            k,
            seed,
            threads,
        } => {
            let system = source.system(DEFAULT_MAX_ORDER)?;
            let k = match k {
                Some(text) => Some(Wavevector(DVector::from_vec(cli::parse_real_list(&text)?))),
                None => None,
            };
            let report = with_threads(threads, || cli::verify(&system, k, seed))??;
            let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
            eprint!("{}", report.table());
            return Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            });
        }
        Command::Density {
            source,
            resolution,
            slice,
            output,
            threads,
        } => {
            let system = source.system(DEFAULT_MAX_ORDER)?;
            let slice = slice.map(|s| cli::parse_real_list(&s)).transpose()?;
            let state = AntiInvariantState::new(&system.group);
            let grid = with_threads(threads, || {
                angular_density_grid(&state, &system.frame, resolution, slice.as_deref())
            })??;
            let file = File::create(&output)
                .map_err(|e| Error::Domain(format!("cannot create {}: {e}", output.display())))?;
            let mut w = BufWriter::new(file);
            grid.write_csv(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::Domain(format!("cannot write {}: {e}", output.display())))?;
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = cli::exit_code(&e);
            debug_assert!(code == EXIT_DOMAIN || code == cli::EXIT_NOT_KALEIDOSCOPIC);
            code
        }
    };
    ExitCode::from(code as u8)
}
