//! Command-line front end. Every subcommand writes machine-readable output
//! (`plain`, `csv` or `json`) to the data stream; progress and errors go to
//! the diagnostic stream.
//!
//! Exit codes: 0 on success, 2 on usage or parse errors, 1 when a
//! computation cap is exceeded.
//!
//! Exact quantities are printed as decimal integers or reduced fractions;
//! floating point appears only in experiment statistics and the lemma grid
//! checks, with 12 significant digits. Stochastic subcommands take `--seed`
//! and print a fresh seed in the output header when it is omitted.

use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use crate::counting::{
    caterpillar_liminf, count_induced, even_constant, even_inducibility, format_rational, gamma,
    verify_lemma_functions, GridExtremum, LEMMA_GRID_STEP,
};
use crate::extremal::{conjecture_report, max_gamma_exact, max_gamma_search, SearchConfig};
use crate::rng::RNG_ID;
use crate::tanglegram::{
    classify_size4, enumerate_tanglegrams, expectation_experiment, no6_lower_bound,
    parse_tanglegram, tangle_crossing_exact, tanglegram_automorphism_order, ExperimentConfig,
    DEFAULT_THETA, MAX_AUT_LEAVES,
};
use crate::tree::{enumerate_shapes_limited, parse_shape, DEFAULT_ENUM_LIMIT};
use crate::Error;

#[derive(Parser)]
#[command(
    name = "inducibility",
    version,
    about = "Induced subtrees of rooted binary trees: exact counts, density maximisation and tanglegram crossing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Plain,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List all tree shapes with a given number of leaves
    Shapes {
        /// Number of leaves
        #[arg(long)]
        n: u64,
        /// Print only how many shapes there are
        #[arg(long)]
        count: bool,
        /// Cap on exhaustive enumeration sizes
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        exact_limit: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Exact number of pattern copies induced by leaf subsets of the host
    Count {
        /// Pattern tree (grammar or alias)
        #[arg(long)]
        pattern: String,
        /// Host tree (grammar or alias)
        #[arg(long)]
        host: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Exact density: copies divided by the number of leaf subsets
    Gamma {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        host: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Inducibility of the even tree with k leaves
    EvenInducibility {
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Limiting lower caterpillar density over growing hosts
    CaterLiminf {
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Grid checks of the three split-weight extremum facts
    LemmaCheck {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Maximise the pattern density over hosts of a given size
    MaxGamma {
        #[arg(long)]
        pattern: String,
        /// Host size; exact enumeration up to --exact-limit, search beyond
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        exact_limit: u64,
        /// Beam width for the heuristic search
        #[arg(long, default_value_t = 64)]
        beam: usize,
        /// Local-search restarts for the heuristic search
        #[arg(long, default_value_t = 32)]
        restarts: u32,
        /// Seed for the heuristic search; drawn fresh when omitted
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Per-size checks of the even-tree maximiser conjecture
    Conjectures {
        /// Pattern is the even tree with k leaves
        #[arg(long)]
        k: u64,
        /// Largest host size to check
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        exact_limit: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Exact tangle crossing number of a tanglegram (small sizes)
    TangleCrt {
        /// Tanglegram as <left>|<right>|<sigma>
        tanglegram: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Quadruple lower bound on the tangle crossing number
    TangleBound {
        /// Tanglegram as <left>|<right>|<sigma>
        tanglegram: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Enumerate all tanglegrams of a small size up to equivalence
    TangleEnumerate {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Sample random layouts and summarise the crossing lower bound
    TangleExperiment {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u32,
        /// Seed; drawn fresh and printed in the header when omitted
        #[arg(long)]
        seed: Option<u64>,
        /// Threshold coefficient for the frac_ge_theta column
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        /// Worker threads; output does not depend on the count
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Reweight samples by tanglegram automorphism order (n <= 12)
        #[arg(long)]
        weighted: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
}

// One table cell: strings are quoted in JSON, raw cells (numbers, booleans)
// are not.
#[derive(Clone, Debug)]
enum Cell {
    Str(String),
    Raw(String),
}

impl Cell {
    fn num<T: std::fmt::Display>(v: T) -> Cell {
        Cell::Raw(v.to_string())
    }

    fn float(v: f64) -> Cell {
        Cell::Raw(format_float(v))
    }

    fn text(&self) -> &str {
        match self {
            Cell::Str(s) | Cell::Raw(s) => s,
        }
    }
}

/// 12 significant digits, scientific notation.
fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

struct Output {
    meta: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    /// What `plain` mode prints: a single value or one line per item;
    /// falls back to space-separated rows when absent.
    plain: Option<Vec<String>>,
}

impl Output {
    fn scalar(columns: Vec<&'static str>, row: Vec<Cell>, value: String) -> Output {
        Output {
            meta: Vec::new(),
            columns,
            rows: vec![row],
            plain: Some(vec![value]),
        }
    }

    fn table(columns: Vec<&'static str>, rows: Vec<Vec<Cell>>) -> Output {
        Output {
            meta: Vec::new(),
            columns,
            rows,
            plain: None,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn emit(out: &mut dyn Write, format: OutputFormat, output: &Output) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            for (k, v) in &output.meta {
                writeln!(out, "# {k}={v}")?;
            }
            writeln!(out, "{}", output.columns.join(","))?;
            for row in &output.rows {
                let line: Vec<String> = row.iter().map(|c| csv_field(c.text())).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        OutputFormat::Json => {
            writeln!(out, "[")?;
            for (i, row) in output.rows.iter().enumerate() {
                let fields: Vec<String> = output
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(col, cell)| {
                        let value = match cell {
                            Cell::Str(s) => json_string(s),
                            Cell::Raw(s) => s.clone(),
                        };
                        format!("{}: {}", json_string(col), value)
                    })
                    .collect();
                let comma = if i + 1 < output.rows.len() { "," } else { "" };
                writeln!(out, "  {{{}}}{comma}", fields.join(", "))?;
            }
            writeln!(out, "]")?;
        }
        OutputFormat::Plain => {
            for (k, v) in &output.meta {
                writeln!(out, "# {k}={v}")?;
            }
            match &output.plain {
                Some(lines) => {
                    for line in lines {
                        writeln!(out, "{line}")?;
                    }
                }
                None => {
                    writeln!(out, "# {}", output.columns.join(" "))?;
                    for row in &output.rows {
                        let line: Vec<&str> = row.iter().map(Cell::text).collect();
                        writeln!(out, "{}", line.join(" "))?;
                    }
                }
            }
        }
    }
    Ok(())
}

enum RunError {
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Domain(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Run the CLI against explicit argument and output streams; returns the
/// process exit code.
pub fn run<O: Write, E: Write>(
    args: impl IntoIterator<Item = String>,
    out: &mut O,
    err: &mut E,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        // a closed downstream pipe is not an error worth reporting
        Err(RunError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(RunError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(RunError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::SizeLimit { .. } | Error::BudgetExceeded { .. } => 1,
                _ => 2,
            }
        }
    }
}

fn fresh_seed() -> u64 {
    rand::rng().random()
}

use rand::Rng as _;

fn execute(command: Command, out: &mut dyn Write) -> Result<(), RunError> {
    match command {
        Command::Shapes {
            n,
            count,
            exact_limit,
            format,
        } => {
            let shapes = enumerate_shapes_limited(n, exact_limit)?;
            if count {
                let output = Output::scalar(
                    vec!["n", "count"],
                    vec![Cell::num(n), Cell::num(shapes.len())],
                    shapes.len().to_string(),
                );
                emit(out, format, &output)?;
            } else {
                let rows: Vec<Vec<Cell>> = shapes
                    .iter()
                    .enumerate()
                    .map(|(i, s)| vec![Cell::num(n), Cell::num(i), Cell::Str(s.encoding())])
                    .collect();
                let mut output = Output::table(vec!["n", "index", "encoding"], rows);
                output.plain = Some(shapes.iter().map(|s| s.encoding()).collect());
                emit(out, format, &output)?;
            }
        }
        Command::Count {
            pattern,
            host,
            format,
        } => {
            let pattern_tree = parse_shape(&pattern)?;
            let host_tree = parse_shape(&host)?;
            let c = count_induced(&pattern_tree, &host_tree);
            let output = Output::scalar(
                vec!["pattern", "host", "count"],
                vec![
                    Cell::Str(pattern_tree.encoding()),
                    Cell::Str(host_tree.encoding()),
                    Cell::Str(c.to_string()),
                ],
                c.to_string(),
            );
            emit(out, format, &output)?;
        }
        Command::Gamma {
            pattern,
            host,
            format,
        } => {
            let pattern_tree = parse_shape(&pattern)?;
            let host_tree = parse_shape(&host)?;
            let g = gamma(&pattern_tree, &host_tree)?;
            let text = format_rational(&g);
            let output = Output::scalar(
                vec!["pattern", "host", "gamma"],
                vec![
                    Cell::Str(pattern_tree.encoding()),
                    Cell::Str(host_tree.encoding()),
                    Cell::Str(text.clone()),
                ],
                text,
            );
            emit(out, format, &output)?;
        }
        Command::EvenInducibility { k, format } => {
            let constant = even_constant(k)?;
            let value = even_inducibility(k)?;
            let text = format_rational(&value);
            let output = Output::scalar(
                vec!["k", "constant", "inducibility"],
                vec![
                    Cell::num(k),
                    Cell::Str(format_rational(&constant)),
                    Cell::Str(text.clone()),
                ],
                text,
            );
            emit(out, format, &output)?;
        }
        Command::CaterLiminf { k, format } => {
            let value = caterpillar_liminf(k)?;
            let text = format_rational(&value);
            let output = Output::scalar(
                vec!["k", "liminf"],
                vec![Cell::num(k), Cell::Str(text.clone())],
                text,
            );
            emit(out, format, &output)?;
        }
        Command::LemmaCheck { k, format } => {
            let report = verify_lemma_functions(k, LEMMA_GRID_STEP)?;
            let row = |name: &str, e: &GridExtremum| -> Vec<Cell> {
                vec![
                    Cell::Str(name.to_string()),
                    Cell::num(k),
                    Cell::float(report.grid_step),
                    Cell::float(e.x),
                    Cell::float(e.value),
                    Cell::float(e.reference),
                    Cell::float(e.margin),
                    Cell::num(e.bound_ok),
                    Cell::num(e.at_half),
                ]
            };
            let mut rows = vec![
                row("even-split-max", &report.even_max),
                row("odd-split-max", &report.odd_max),
            ];
            if let Some(cm) = &report.caterpillar_min {
                rows.push(row("caterpillar-split-min", cm));
            }
            let output = Output::table(
                vec![
                    "function",
                    "k",
                    "grid_step",
                    "extremum_x",
                    "extremum_value",
                    "reference",
                    "margin",
                    "bound_ok",
                    "at_half",
                ],
                rows,
            );
            emit(out, format, &output)?;
        }
        Command::MaxGamma {
            pattern,
            n,
            exact_limit,
            beam,
            restarts,
            seed,
            format,
        } => {
            let pattern_tree = parse_shape(&pattern)?;
            let mut meta = Vec::new();
            let report = if n <= exact_limit {
                max_gamma_exact(&pattern_tree, n, exact_limit)?
            } else {
                let seed = seed.unwrap_or_else(|| {
                    let s = fresh_seed();
                    meta.push(("seed".to_string(), s.to_string()));
                    s
                });
                let cfg = SearchConfig {
                    exact_limit,
                    beam_width: beam,
                    restarts,
                    seed,
                    ..SearchConfig::default()
                };
                max_gamma_search(&pattern_tree, n, &cfg)?
            };
            let argmax_joined = report
                .argmax
                .iter()
                .map(|t| t.encoding())
                .collect::<Vec<_>>()
                .join(";");
            let row = vec![
                Cell::Str(report.pattern.encoding()),
                Cell::num(report.n),
                Cell::Str(report.method.as_str().to_string()),
                Cell::Str(report.best_value.numer().to_string()),
                Cell::Str(report.best_value.denom().to_string()),
                Cell::Str(argmax_joined),
                match report.seed {
                    Some(s) => Cell::num(s),
                    None => Cell::Str(String::new()),
                },
            ];
            let mut plain = vec![format_rational(&report.best_value)];
            plain.extend(report.argmax.iter().map(|t| t.encoding()));
            let mut output = Output::table(
                vec![
                    "pattern",
                    "n",
                    "method",
                    "best_value_num",
                    "best_value_den",
                    "argmax_encodings",
                    "seed",
                ],
                vec![row],
            );
            output.meta = meta;
            output.plain = Some(plain);
            emit(out, format, &output)?;
        }
        Command::Conjectures {
            k,
            n,
            exact_limit,
            format,
        } => {
            let rows = conjecture_report(k, n, exact_limit)?;
            let table: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::num(r.k),
                        Cell::num(r.n),
                        Cell::num(r.even_is_max),
                        Cell::Str(format_rational(&r.max_gamma)),
                        Cell::Str(format_rational(&r.inducibility)),
                        Cell::Str(format_rational(&r.gap)),
                        Cell::Str(format_rational(&r.scaled_gap)),
                    ]
                })
                .collect();
            let output = Output::table(
                vec![
                    "k",
                    "n",
                    "even_is_max",
                    "max_gamma",
                    "inducibility",
                    "gap",
                    "n_gap",
                ],
                table,
            );
            emit(out, format, &output)?;
        }
        Command::TangleCrt { tanglegram, format } => {
            let t = parse_tanglegram(&tanglegram)?;
            let crt = tangle_crossing_exact(&t)?;
            let output = Output::scalar(
                vec!["tanglegram", "crt"],
                vec![Cell::Str(t.to_string()), Cell::num(crt)],
                crt.to_string(),
            );
            emit(out, format, &output)?;
        }
        Command::TangleBound { tanglegram, format } => {
            let t = parse_tanglegram(&tanglegram)?;
            let bound = no6_lower_bound(&t)?;
            let text = format_rational(&bound);
            let output = Output::scalar(
                vec!["tanglegram", "bound"],
                vec![Cell::Str(t.to_string()), Cell::Str(text.clone())],
                text,
            );
            emit(out, format, &output)?;
        }
        Command::TangleEnumerate { n, format } => {
            let classes = enumerate_tanglegrams(n)?;
            let mut rows = Vec::new();
            for (i, t) in classes.iter().enumerate() {
                let crt = tangle_crossing_exact(t)?;
                let aut = if n <= MAX_AUT_LEAVES {
                    Cell::num(tanglegram_automorphism_order(t)?)
                } else {
                    Cell::Str(String::new())
                };
                let (is_no6, is_no13) = if n == 4 {
                    let class = classify_size4(t)?;
                    (Cell::num(class.is_no6), Cell::num(class.is_no13))
                } else {
                    (Cell::num(false), Cell::num(false))
                };
                rows.push(vec![
                    Cell::num(i),
                    Cell::Str(t.to_string()),
                    Cell::Str(t.left().shape().encoding()),
                    Cell::Str(t.right().shape().encoding()),
                    Cell::num(crt),
                    aut,
                    is_no6,
                    is_no13,
                ]);
            }
            let mut output = Output::table(
                vec![
                    "index",
                    "encoding",
                    "left_shape",
                    "right_shape",
                    "crt",
                    "aut_order",
                    "is_no6",
                    "is_no13",
                ],
                rows,
            );
            output.plain = Some(classes.iter().map(|t| t.to_string()).collect());
            emit(out, format, &output)?;
        }
        Command::TangleExperiment {
            n,
            trials,
            seed,
            theta,
            jobs,
            weighted,
            format,
        } => {
            let mut meta = vec![("rng".to_string(), RNG_ID.to_string())];
            let seed = seed.unwrap_or_else(|| {
                let s = fresh_seed();
                meta.insert(0, ("seed".to_string(), s.to_string()));
                s
            });
            meta.push((
                "mode".to_string(),
                if weighted { "aut-weighted" } else { "layout-uniform" }.to_string(),
            ));
            let cfg = ExperimentConfig {
                n,
                trials,
                seed,
                theta,
                jobs,
                weighted,
            };
            let r = expectation_experiment(&cfg)?;
            let row = vec![
                Cell::num(r.n),
                Cell::num(r.trials),
                Cell::num(r.seed),
                Cell::float(r.mean_bound),
                Cell::float(r.var_bound),
                Cell::float(r.q10),
                Cell::float(r.q50),
                Cell::float(r.q90),
                Cell::float(r.frac_ge_theta),
                Cell::float(r.theta),
            ];
            let mut output = Output::table(
                vec![
                    "n",
                    "trials",
                    "seed",
                    "mean_bound",
                    "var_bound",
                    "q10",
                    "q50",
                    "q90",
                    "frac_ge_theta",
                    "theta",
                ],
                vec![row],
            );
            output.meta = meta;
            emit(out, format, &output)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("inducibility".to_string())
            .chain(args.iter().map(|s| s.to_string()));
        let code = run(argv, &mut out, &mut err);
        assert_eq!(
            code,
            0,
            "stderr: {}",
            String::from_utf8_lossy(&err)
        );
        String::from_utf8(out).unwrap()
    }

    fn run_code(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("inducibility".to_string())
            .chain(args.iter().map(|s| s.to_string()));
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn shapes_count_is_scalar() {
        assert_eq!(run_ok(&["shapes", "--n", "6", "--count"]), "6\n");
    }

    #[test]
    fn gamma_prints_reduced_fraction() {
        assert_eq!(
            run_ok(&["gamma", "--pattern", "cb:2", "--host", "cb:3"]),
            "19/35\n"
        );
    }

    #[test]
    fn count_prints_integer() {
        assert_eq!(
            run_ok(&["count", "--pattern", "cb:2", "--host", "cb:3"]),
            "38\n"
        );
    }

    #[test]
    fn scalar_csv_and_json_forms() {
        let csv = run_ok(&["gamma", "--pattern", "cb:2", "--host", "cb:3", "--format", "csv"]);
        assert_eq!(csv, "pattern,host,gamma\n((L L) (L L)),(((L L) (L L)) ((L L) (L L))),19/35\n");
        let json = run_ok(&["even-inducibility", "--k", "4", "--format", "json"]);
        assert!(json.contains("\"inducibility\": \"3/7\""));
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run_code(&["shapes", "--frobnicate"]);
        assert_eq!(code, 2, "{err}");
        let (code, _, err) = run_code(&["gamma", "--pattern", "(L", "--host", "L"]);
        assert_eq!(code, 2);
        assert!(err.contains("parse error"), "{err}");
        let (code, _, _) = run_code(&["nonsense"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn limit_errors_exit_one() {
        let (code, _, err) = run_code(&["shapes", "--n", "20"]);
        assert_eq!(code, 1);
        assert!(err.contains("--exact-limit"), "{err}");
        let (code, _, _) = run_code(&["tangle-enumerate", "--n", "6"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn raising_the_limit_works() {
        let out = run_ok(&["shapes", "--n", "15", "--count", "--exact-limit", "15"]);
        assert_eq!(out, "4850\n");
    }

    #[test]
    fn tangle_commands_round_trip() {
        let crt = run_ok(&["tangle-crt", "(((L L) L) L)|(((L L) L) L)|1,4,3,2"]);
        assert_eq!(crt, "1\n");
        let bound = run_ok(&["tangle-bound", "(((L L) L) L)|(((L L) L) L)|1,4,3,2"]);
        assert_eq!(bound, "1\n");
        let list = run_ok(&["tangle-enumerate", "--n", "4"]);
        assert_eq!(list.lines().count(), 14); // header + 13 classes
    }

    #[test]
    fn experiment_output_is_byte_identical_for_fixed_seed() {
        let args = [
            "tangle-experiment",
            "--n",
            "16",
            "--trials",
            "30",
            "--seed",
            "7",
        ];
        let a = run_ok(&args);
        let b = run_ok(&args);
        assert_eq!(a, b);
        assert!(a.starts_with("# rng="));
        assert!(a.contains("n,trials,seed,mean_bound,var_bound,q10,q50,q90,frac_ge_theta,theta"));
    }

    #[test]
    fn experiment_draws_and_reports_fresh_seed() {
        let (code, out, _) = run_code(&[
            "tangle-experiment",
            "--n",
            "16",
            "--trials",
            "5",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("# seed="), "{out}");
    }

    #[test]
    fn max_gamma_exact_csv_row() {
        let out = run_ok(&["max-gamma", "--pattern", "cb:2", "--n", "8"]);
        let mut lines = out.lines();
        assert_eq!(
            lines.next().unwrap(),
            "pattern,n,method,best_value_num,best_value_den,argmax_encodings,seed"
        );
        let row = lines.next().unwrap();
        assert!(row.contains("exact"), "{row}");
        assert!(row.contains("19,35"), "{row}");
        assert!(row.contains("(((L L) (L L)) ((L L) (L L)))"), "{row}");
    }

    #[test]
    fn max_gamma_search_is_reproducible() {
        let args = [
            "max-gamma",
            "--pattern",
            "a52",
            "--n",
            "20",
            "--seed",
            "3",
            "--beam",
            "16",
            "--restarts",
            "6",
        ];
        let a = run_ok(&args);
        assert_eq!(a, run_ok(&args));
        assert!(a.contains("heuristic"));
    }

    #[test]
    fn max_gamma_search_draws_a_seed_when_missing() {
        let (code, out, _) = run_code(&[
            "max-gamma",
            "--pattern",
            "a52",
            "--n",
            "16",
            "--beam",
            "8",
            "--restarts",
            "4",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# seed="), "{out}");
    }

    #[test]
    fn lemma_check_reports_all_functions() {
        let out = run_ok(&["lemma-check", "--k", "3"]);
        assert!(out.contains("even-split-max"));
        assert!(out.contains("odd-split-max"));
        assert!(out.contains("caterpillar-split-min"));
        assert!(out.contains("true"));
    }

    #[test]
    fn conjectures_table() {
        let out = run_ok(&["conjectures", "--k", "4", "--n", "9"]);
        assert!(out.starts_with("k,n,even_is_max,max_gamma,inducibility,gap,n_gap"));
        assert!(out.contains("4,8,true,19/35,3/7,"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_code(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("Usage"));
    }
}
