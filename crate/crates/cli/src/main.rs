use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use chowbench_core::action::{analyze, critical_values, ActionError, ActionInput};
use chowbench_core::examples;
use chowbench_core::exactnum::{parse_integer, parse_rational, Rational};
use chowbench_core::polytope::{hull, slice_at, AffineChart};
use chowbench_core::quotient::{
    build_diagram, chow_fiber_polytope, chow_minkowski_polytope, pruning, pruning_between, DiagramOptions,
    QuotientError,
};
use chowbench_core::report::{
    analysis_json, diagram_json, polytope_json, quotient_json, to_pretty, z_vec, PolytopeDocument, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(name = "chowbench", version, about = "Exact GIT and Chow quotients of toric C*-actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Polytope document (JSON); `-` or nothing reads standard input.
    file: Option<PathBuf>,
    /// Covector overriding the document's, e.g. `--nu 1,1,1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    nu: Option<Vec<String>>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Weights, critical values, fixed faces, BB cells and equalization.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Exit with status 2 if the action is not equalized.
        #[arg(long)]
        require_equalized: bool,
    },
    /// The full diagram of GIT and Chow quotients.
    Diagram {
        #[command(flatten)]
        input: Input,
        /// Build the diagram even for non-equalized actions.
        #[arg(long)]
        force: bool,
        /// Include facets, chart coordinates and fans of every node.
        #[arg(long)]
        emit_polytopes: bool,
        /// Verify every rhombus against the common refinement of its children.
        #[arg(long)]
        check_squares: bool,
        /// Compare the fiber-polytope and Minkowski-sum constructions.
        #[arg(long)]
        cross_validate: bool,
    },
    /// Emit a built-in polytope document: cube, brus, segment or square.
    Example {
        name: String,
        /// Dimension of the cube.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The slice at a weight (normalized so the minimum weight is 0), in
    /// quotient-chart coordinates.
    Slice {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        level: String,
    },
    /// A pruning: either chamber `--i/--j` or explicit `--lower/--upper`.
    Prune {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lower: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        upper: Option<String>,
    },
    /// Chow quotient of pruning (i, j), by both constructions; defaults to
    /// the full quotient (0, r).
    Chow {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn hypothesis(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ActionError> for Failure {
    fn from(e: ActionError) -> Failure {
        match e {
            ActionError::TrivialAction | ActionError::NotEqualized(_) => Failure::hypothesis(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<QuotientError> for Failure {
    fn from(e: QuotientError) -> Failure {
        match e {
            QuotientError::NotEqualized(_) => Failure::hypothesis(format!("{e} (use --force to build anyway)")),
            QuotientError::Action(a) => a.into(),
            _ => Failure::usage(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

struct Loaded {
    name: Option<String>,
    input: ActionInput,
}

fn read_source(file: &Option<PathBuf>) -> Result<String, Failure> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let text = read_source(&input.file)?;
    let doc = PolytopeDocument::from_json(&text).map_err(|e| Failure::usage(e.to_string()))?;
    let parsed = doc.parse().map_err(|e| Failure::usage(e.to_string()))?;
    let nu = match &input.nu {
        Some(v) => v
            .iter()
            .map(|s| parse_integer(s).map_err(|_| Failure::usage(format!("--nu: not an integer: {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => parsed.nu,
    };
    let polytope = hull(&parsed.vertices).map_err(|e| Failure::usage(e.to_string()))?;
    let input = ActionInput::new(polytope, nu)?;
    for w in input.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(Loaded {
        name: parsed.name,
        input,
    })
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<(), Failure> {
    let text = to_pretty(v);
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

fn rational_arg(flag: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|_| Failure::usage(format!("{flag}: not a rational: {s:?}")))
}

fn cmd_analyze(input: &Input, require_equalized: bool) -> Outcome {
    let l = load(input)?;
    let an = analyze(&l.input)?;
    let mut v = analysis_json(l.input.polytope(), &an);
    v["name"] = json!(l.name);
    v["schema_version"] = json!(SCHEMA_VERSION);
    emit(&input.out, &v)?;
    if require_equalized && !an.equalization.equalized {
        eprintln!(
            "error: action is not equalized ({} offending edges)",
            an.equalization.offending.len()
        );
        return Ok(2);
    }
    Ok(0)
}

fn cmd_diagram(input: &Input, opts: DiagramOptions, emit_polytopes: bool) -> Outcome {
    let l = load(input)?;
    let an = analyze(&l.input)?;
    let d = build_diagram(&l.input, &opts)?;
    for w in d.warnings.iter().skip(l.input.warnings().len()) {
        eprintln!("warning: {w}");
    }
    emit(
        &input.out,
        &diagram_json(l.name.as_deref(), l.input.polytope(), &an, &d, emit_polytopes),
    )?;
    let mut failed = false;
    if opts.check_squares && !d.squares_hold() {
        eprintln!("error: {} square(s) fail", d.squares.iter().filter(|s| !s.holds).count());
        failed = true;
    }
    if opts.cross_validate && !d.cross_validation_holds() {
        eprintln!("error: fiber and Minkowski constructions disagree at some node");
        failed = true;
    }
    Ok(if failed { 3 } else { 0 })
}

fn cmd_example(name: &str, n: usize, out: &Option<PathBuf>) -> Outcome {
    let ex = examples::by_name(name, n).ok_or_else(|| {
        if name == "cube" {
            Failure::usage(format!("cube needs 1 <= n <= 20, got {n}"))
        } else {
            Failure::usage(format!("unknown example {name:?}; known: {}", examples::NAMES.join(", ")))
        }
    })?;
    let doc = PolytopeDocument::from_example(&ex);
    emit(out, &serde_json::to_value(&doc).expect("document serializes"))?;
    Ok(0)
}

fn cmd_slice(input: &Input, level: &str) -> Outcome {
    let l = load(input)?;
    let a = rational_arg("--level", level)?;
    let chart = AffineChart::new(l.input.nu()).map_err(|e| Failure::usage(e.to_string()))?;
    let s = slice_at(l.input.polytope(), l.input.nu(), &l.input.level(&a)).map_err(|e| Failure::usage(e.to_string()))?;
    emit(
        &input.out,
        &json!({
            "level": chowbench_core::report::q(&a),
            "chart": {
                "basepoint": z_vec(chart.basepoint()),
                "kernel_basis": chart.kernel_basis().iter().map(|b| z_vec(b)).collect::<Vec<_>>(),
            },
            "slice": polytope_json(&s),
        }),
    )?;
    Ok(0)
}

fn cmd_prune(
    input: &Input,
    i: Option<usize>,
    j: Option<usize>,
    lower: &Option<String>,
    upper: &Option<String>,
) -> Outcome {
    let l = load(input)?;
    let p = match (i, j, lower, upper) {
        (Some(i), Some(j), None, None) => pruning(&l.input, i, j)?,
        (None, None, Some(lo), Some(hi)) => {
            pruning_between(&l.input, &rational_arg("--lower", lo)?, &rational_arg("--upper", hi)?)?
        }
        _ => return Err(Failure::usage("prune needs either --i and --j, or --lower and --upper")),
    };
    emit(&input.out, &json!({ "pruning": polytope_json(&p) }))?;
    Ok(0)
}

fn cmd_chow(input: &Input, i: Option<usize>, j: Option<usize>) -> Outcome {
    let l = load(input)?;
    let r = critical_values(&l.input).len() - 1;
    let (i, j) = (i.unwrap_or(0), j.unwrap_or(r));
    let fiber = chow_fiber_polytope(&l.input, i, j)?;
    let mink = chow_minkowski_polytope(&l.input, i, j)?;
    emit(
        &input.out,
        &json!({
            "i": i,
            "j": j,
            "fiber": quotient_json(&fiber, true),
            "minkowski": quotient_json(&mink, true),
            "fans_equal": fiber.fan.is_some() && fiber.fan == mink.fan,
        }),
    )?;
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CHOWBENCH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("CHOWBENCH_THREADS must be a nonnegative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Analyze {
            input,
            require_equalized,
        } => cmd_analyze(input, *require_equalized),
        Command::Diagram {
            input,
            force,
            emit_polytopes,
            check_squares,
            cross_validate,
        } => cmd_diagram(
            input,
            DiagramOptions {
                check_squares: *check_squares,
                cross_validate: *cross_validate,
                force: *force,
            },
            *emit_polytopes,
        ),
        Command::Example { name, n, out } => cmd_example(name, *n, out),
        Command::Slice { input, level } => cmd_slice(input, level),
        Command::Prune {
            input,
            i,
            j,
            lower,
            upper,
        } => cmd_prune(input, *i, *j, lower, upper),
        Command::Chow { input, i, j } => cmd_chow(input, *i, *j),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
