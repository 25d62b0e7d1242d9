//! Command-line entry point.
//!
//! Every command prints one JSON document on stdout (census prints one JSON
//! line per n) and diagnostics on stderr. Exit codes: 0 success or yes,
//! 1 a negative decision, 2 invalid input, 3 internal error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::classify::{aru_class, find_windmill, is_one_sided, is_sliceable};
use crate::dualgraph::PlaneGraph;
use crate::enumerate::{census, DEFAULT_CAP};
use crate::error::Error;
use crate::exec::Exec;
use crate::geometry::{rat, Layout};
use crate::realize::{brick_witness, strong_realizability, windmill_witness, AspectAssignment, Mode};
use crate::recognize::recognize_dual;
use crate::render::{render_svg, Highlight, RenderOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "aru", version, about = "Aspect-ratio universality of rectangular layouts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MarkArg {
    /// Arms of a windmill, or the segments that are not a full rect side.
    Auto,
    None,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sliceable, one-sided and aspect-ratio class, with a witness.
    Classify { layout: PathBuf },
    /// Realize an aspect-ratio assignment on a sliceable layout.
    Realize {
        layout: PathBuf,
        /// Assignment JSON; without it a random one is drawn from --seed.
        assignment: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "strong")]
        mode: ModeArg,
        /// Write the realized layout here.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether a plane graph is the dual of a one-sided sliceable layout.
    Recognize { graph: PathBuf },
    /// An assignment that no strongly equivalent layout realizes.
    Witness { layout: PathBuf },
    /// Counts of sliceable, one-sided sliceable and dual classes for 1..=N.
    Census {
        n: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Run sweeps sequentially.
        #[arg(long)]
        sequential: bool,
    },
    /// Draw a layout as SVG.
    Render {
        layout: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        width: u32,
        #[arg(long)]
        label: bool,
        #[arg(long, value_enum, default_value = "auto")]
        mark: MarkArg,
        #[arg(long, default_value = "pastel")]
        palette: String,
    },
}

/// Failure with its exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::InternalVerification(_)) { EXIT_INTERNAL } else { EXIT_INPUT };
        Fail(code, e.to_string())
    }
}

/// What a command produced: stdout text and exit code.
struct Done(String, i32);

fn doc(v: Value, code: i32) -> Done {
    Done(format!("{}\n", serde_json::to_string(&v).expect("json serializes")), code)
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn write(path: &Path, body: &str) -> Result<(), Fail> {
    std::fs::write(path, body).map_err(|e| Fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load_layout(path: &Path) -> Result<Layout, Fail> {
    Ok(Layout::from_json_str(&read(path)?)?)
}

fn random_assignment(layout: &Layout, seed: u64) -> AspectAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AspectAssignment::new(layout.ids().map(|id| (id.to_string(), rat(rng.gen_range(1..=9), rng.gen_range(1..=9)))).collect::<Vec<_>>())
}

fn classify(path: &Path) -> Result<Done, Fail> {
    let l = load_layout(path)?;
    l.require_generic()?;
    let sliceable = is_sliceable(&l);
    let sided = is_one_sided(&l);
    let witness = if !sliceable {
        json!({ "windmill": find_windmill(&l) })
    } else if let Some(s) = sided.violating.first() {
        json!({ "segment": s })
    } else {
        Value::Null
    };
    Ok(doc(
        json!({
            "sliceable": sliceable,
            "one_sided": sided.one_sided,
            "aru_class": aru_class(&l),
            "witness_segment_or_windmill": witness,
        }),
        EXIT_OK,
    ))
}

fn realize(layout: &Path, assignment: Option<&Path>, mode: ModeArg, output: Option<&Path>, seed: u64) -> Result<Done, Fail> {
    let l = load_layout(layout)?;
    let alpha = match assignment {
        Some(p) => AspectAssignment::from_json_str(&read(p)?)?,
        None => random_assignment(&l, seed),
    };
    let mode = match mode {
        ModeArg::Strong => Mode::Strong,
        ModeArg::Weak => Mode::Weak,
    };
    let report = strong_realizability(&l, &alpha, mode)?;
    if let Some(out) = output {
        write(out, &format!("{}\n", report.layout.to_json()))?;
    }
    let mut v = report.to_json();
    v["assignment"] = serde_json::to_value(&alpha).expect("assignment serializes");
    Ok(doc(v, if report.equivalent { EXIT_OK } else { EXIT_NO }))
}

fn recognize(path: &Path) -> Result<Done, Fail> {
    let g = PlaneGraph::from_json_str(&read(path)?)?;
    Ok(match recognize_dual(&g)? {
        Some(found) => {
            let mut v = found.to_json();
            v["realizable"] = json!(true);
            doc(v, EXIT_OK)
        }
        None => doc(json!({ "realizable": false }), EXIT_NO),
    })
}

fn witness(path: &Path) -> Result<Done, Fail> {
    let l = load_layout(path)?;
    l.require_generic()?;
    let (kind, alpha) = if !is_sliceable(&l) { ("windmill", windmill_witness(&l)?) } else { ("brick", brick_witness(&l)?) };
    Ok(match alpha {
        Some(a) => {
            let mut v = serde_json::to_value(&a).expect("assignment serializes");
            v["kind"] = json!(kind);
            doc(v, EXIT_OK)
        }
        None => doc(json!({ "kind": null, "ratios": null }), EXIT_NO),
    })
}

fn census_lines(n: usize, cap: usize, sequential: bool) -> Result<Done, Fail> {
    if n == 0 || n > cap {
        return Err(Error::Cap(n, cap).into());
    }
    let exec = if sequential { Exec::Sequential } else { Exec::default() };
    let mut out = String::new();
    for k in 1..=n {
        let c = census(k, exec)?;
        out.push_str(&serde_json::to_string(&c).expect("census serializes"));
        out.push('\n');
    }
    Ok(Done(out, EXIT_OK))
}

fn render(path: &Path, output: Option<&Path>, width: u32, label: bool, mark: MarkArg, palette: &str) -> Result<Done, Fail> {
    let l = load_layout(path)?;
    let highlight = match mark {
        MarkArg::None => None,
        MarkArg::Auto if !l.is_generic() => None,
        MarkArg::Auto => match find_windmill(&l) {
            Some(w) => Some(Highlight::windmill(&l, &w)?),
            None => Some(Highlight::segments_of(&l, &is_one_sided(&l).violating)?),
        },
    };
    let highlight = highlight.filter(|h| !h.is_empty());
    let marked = highlight.as_ref().map_or(0, Highlight::len);
    let opts = RenderOptions { width_px: width, label, highlight, palette: palette.parse()? };
    let svg = render_svg(&l, &opts)?;
    match output {
        Some(out) => {
            write(out, &svg)?;
            Ok(doc(json!({ "output": out.display().to_string(), "rects": l.len(), "highlighted": marked }), EXIT_OK))
        }
        None => Ok(Done(svg, EXIT_OK)),
    }
}

/// Runs one command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify { layout } => classify(layout),
        Command::Realize { layout, assignment, mode, output, seed } => realize(layout, assignment.as_deref(), *mode, output.as_deref(), *seed),
        Command::Recognize { graph } => recognize(graph),
        Command::Witness { layout } => witness(layout),
        Command::Census { n, cap, sequential } => census_lines(*n, *cap, *sequential),
        Command::Render { layout, output, width, label, mark, palette } => render(layout, output.as_deref(), *width, *label, *mark, palette),
    };
    match result {
        Ok(Done(text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (vec![], vec![]);
        let code = run(std::iter::once("aru").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn bad_usage_is_input_error() {
        let (code, out, err) = go(&["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = go(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("recognize"));
    }

    #[test]
    fn missing_file() {
        let (code, out, err) = go(&["classify", "/nonexistent/x.json"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn census_lines_and_cap() {
        let (code, out, _) = go(&["census", "3"]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2]["sliceable"], 6);
        assert_eq!(go(&["census", "9"]).0, EXIT_INPUT);
        assert_eq!(go(&["census", "0"]).0, EXIT_INPUT);
    }

    #[test]
    fn internal_errors_map_to_3() {
        let Fail(code, _) = Fail::from(Error::InternalVerification("x".into()));
        assert_eq!(code, EXIT_INTERNAL);
        let Fail(code, _) = Fail::from(Error::Nongeneric);
        assert_eq!(code, EXIT_INPUT);
    }
}
