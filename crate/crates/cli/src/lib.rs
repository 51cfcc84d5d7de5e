//! Commands of the `spinc` tool.
//!
//! Every command returns an [`Outcome`]; the binary prints it and exits with
//! its code. Exit codes: 0 success or `Equivalent`, 1 invalid input, 2 group
//! order cap exceeded, 3 `Inequivalent`, 4 `Unknown`, 5 even `p` in the lens
//! census, 6 a random walk that changed an invariant.

pub mod format;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use spinc_core::classify::{
    class_fingerprint, invariants_report, yc_classes, yc_classes_in_box, yc_equivalent, Analysis, ClassifyOptions,
    InvariantReport, Verdict,
};
use spinc_core::classify::{lens_diffeo_count, lens_yc_count};
use spinc_core::presentation::{beta, random_walk_with_log, spin_structures, DecoratedPresentation};
use spinc_core::quadfun::DEFAULT_ORDER_CAP;
use spinc_core::zlinalg::IntMatrix;
use spinc_core::Error;

use format::{number, FieldError, PresentationFile, ReportFile, WitnessJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_INEQUIVALENT: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;
pub const EXIT_EVEN_MODULUS: i32 = 5;
pub const EXIT_WALK_MISMATCH: i32 = 6;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: message.into() + "\n" }
    }

    fn from_error(e: &Error) -> Self {
        let code = match e {
            Error::OrderCapExceeded { .. } => EXIT_CAP,
            Error::EvenModulus(_) => EXIT_EVEN_MODULUS,
            _ => EXIT_INVALID,
        };
        Outcome::fail(code, format!("error: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "spinc", version, about = "Degree-0 Spin^c invariants of surgery presentations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Limits {
    /// Largest torsion order to handle
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
    pub cap: u64,
    /// Node budget of the isomorphism search in the mixed regime
    #[arg(long, default_value_t = ClassifyOptions::default().node_budget)]
    pub budget: u64,
}

impl Limits {
    fn options(&self) -> ClassifyOptions {
        ClassifyOptions { order_cap: self.cap, node_budget: self.budget }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Invariant report of a presentation file
    Invariants {
        file: PathBuf,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Decide Y^c-equivalence of two presentation files
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Apply seeded random Kirby moves and certify that the invariants survive
    Walk {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the resulting presentation here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Spin structures and their Chern vectors
    Spins {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Y^c census of L(p,1) and, given q1 and q2, the diffeomorphism count of L(p; q1, q2)
    LensCensus {
        #[arg(long)]
        p: u64,
        #[arg(long, requires = "q2")]
        q1: Option<i64>,
        #[arg(long, requires = "q1")]
        q2: Option<i64>,
    },
    /// Partition the Chern classes of a matrix into Y^c-classes
    Classes {
        /// Presentation file whose matrix is used
        #[arg(conflicts_with = "matrix", required_unless_present = "matrix")]
        file: Option<PathBuf>,
        /// Matrix as JSON, e.g. '[[2,1],[1,2]]'
        #[arg(long)]
        matrix: Option<String>,
        /// For degenerate matrices: use the classes met by vectors with entries in [-radius, radius]
        #[arg(long)]
        radius: Option<u32>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { Outcome::ok(text) } else { Outcome::fail(code, text.trim_end()) };
        }
    };
    match cli.command {
        Command::Invariants { file, json, limits, .. } => cmd_invariants(&file, json, limits.cap),
        Command::Compare { a, b, json, limits } => cmd_compare(&a, &b, json, &limits.options()),
        Command::Walk { file, steps, seed, out, limits } => {
            cmd_walk(&file, steps, seed, out.as_deref(), &limits.options())
        }
        Command::Spins { file, json } => cmd_spins(&file, json),
        Command::LensCensus { p, q1, q2 } => cmd_lens_census(p, q1.zip(q2)),
        Command::Classes { file, matrix, radius, json, limits } => {
            cmd_classes(file.as_deref(), matrix.as_deref(), radius, json, &limits.options())
        }
    }
}

pub fn load(path: &Path) -> Result<(DecoratedPresentation, Option<String>), Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_INVALID, format!("error: cannot read {}: {e}", path.display())))?;
    let invalid = |e: FieldError| Outcome::fail(EXIT_INVALID, format!("error: {}: {e}", path.display()));
    let file = PresentationFile::parse(&text).map_err(invalid)?;
    let p = file.to_presentation().map_err(invalid)?;
    Ok((p, file.name))
}

fn json_line(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

pub fn report_text(r: &InvariantReport, name: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(n) = name {
        writeln!(s, "name: {n}").unwrap();
    }
    let g = format::GaussJson::of(&r.gauss);
    writeln!(s, "free rank: {}", r.free_rank).unwrap();
    writeln!(s, "torsion: [{}]", join(&r.torsion)).unwrap();
    writeln!(s, "chern free gcd: {}", r.chern_free_gcd).unwrap();
    writeln!(s, "chern free part: [{}]", join(&r.chern_free)).unwrap();
    writeln!(s, "chern torsion part: [{}]", join(&r.chern_torsion)).unwrap();
    let im = g.approx.im.to_string();
    let im = im.strip_prefix('-').map_or(format!("+ {im}"), |m| format!("- {m}"));
    writeln!(s, "gauss sum: {} (approx {} {im}i, display only)", g.text, g.approx.re).unwrap();
    writeln!(s, "values: [{}]", join(&r.value_multiset)).unwrap();
    writeln!(s, "defects: [{}]", join(&r.defect_multiset)).unwrap();
    let slopes: Vec<String> = r.radical_slopes.iter().map(spinc_core::exact::rational_string).collect();
    writeln!(s, "radical slopes: [{}]", slopes.join(", ")).unwrap();
    if r.section_dependent {
        writeln!(s, "note: gauss sum, values and chern torsion part depend on the chosen section").unwrap();
    }
    s
}

pub fn cmd_invariants(path: &Path, json: bool, cap: u64) -> Outcome {
    let (p, name) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    match invariants_report(&p, cap) {
        Ok(r) if json => Outcome::ok(json_line(&ReportFile::of(&r, name))),
        Ok(r) => Outcome::ok(report_text(&r, name.as_deref())),
        Err(e) => Outcome::from_error(&e),
    }
}

pub fn cmd_compare(a: &Path, b: &Path, json: bool, opts: &ClassifyOptions) -> Outcome {
    let (pa, pb) = match (load(a), load(b)) {
        (Ok((pa, _)), Ok((pb, _))) => (pa, pb),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    let verdict = match yc_equivalent(&pa, &pb, opts) {
        Ok(v) => v,
        Err(e) => return Outcome::from_error(&e),
    };
    let (code, text, value) = match &verdict {
        Verdict::Equivalent(w) => (
            EXIT_OK,
            format!("Equivalent\nwitness: {w}\n"),
            json!({"verdict": "Equivalent", "witness": WitnessJson::of(w)}),
        ),
        Verdict::Inequivalent(reason) => (
            EXIT_INEQUIVALENT,
            format!("Inequivalent\nreason: {reason}\n"),
            json!({"verdict": "Inequivalent", "reason": reason}),
        ),
        Verdict::Unknown { nodes } => (
            EXIT_UNKNOWN,
            format!("Unknown\nsearch budget of {nodes} nodes exhausted\n"),
            json!({"verdict": "Unknown", "budget": nodes}),
        ),
    };
    Outcome { code, stdout: if json { json_line(&value) } else { text }, stderr: String::new() }
}

pub fn cmd_walk(path: &Path, steps: usize, seed: u64, out: Option<&Path>, opts: &ClassifyOptions) -> Outcome {
    let (p, name) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let (w, moves) = random_walk_with_log(&p, steps, seed);
    let check = || -> spinc_core::Result<(bool, Verdict)> {
        let (a, b) = (Analysis::new(&p, opts.order_cap)?, Analysis::new(&w, opts.order_cap)?);
        let same = class_fingerprint(&a) == class_fingerprint(&b);
        Ok((same, spinc_core::classify::compare_analyses(&a, &b, opts)?))
    };
    let (same, verdict) = match check() {
        Ok(x) => x,
        Err(e) => return Outcome::from_error(&e),
    };
    let file = PresentationFile::from_presentation(&w, name).to_json();
    let mut stdout = String::new();
    if let Some(out) = out {
        if let Err(e) = std::fs::write(out, &file) {
            return Outcome::fail(EXIT_INVALID, format!("error: cannot write {}: {e}", out.display()));
        }
    } else {
        stdout.push_str(&file);
    }
    let mut stderr = format!("moves: {}\n", join(&moves));
    let preserved = same && verdict.is_equivalent();
    if preserved {
        stderr.push_str("certificate: invariants preserved (fingerprint equal, verdict Equivalent)\n");
    } else {
        stderr.push_str(&format!(
            "certificate: invariants NOT preserved (fingerprint equal: {same}, verdict {verdict:?})\n"
        ));
    }
    Outcome { code: if preserved { EXIT_OK } else { EXIT_WALK_MISMATCH }, stdout, stderr }
}

pub fn cmd_spins(path: &Path, json: bool) -> Outcome {
    let (p, _) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let mut rows = Vec::new();
    for r in spin_structures(&p) {
        match beta(&p, &r) {
            Ok(b) => rows.push((r.bits().to_vec(), b.chern().to_vec())),
            Err(e) => return Outcome::from_error(&e),
        }
    }
    if json {
        let v: Vec<_> = rows
            .iter()
            .map(|(bits, c)| json!({"wu": bits, "chern": c.iter().map(number).collect::<Vec<_>>()}))
            .collect();
        return Outcome::ok(json_line(&json!({"count": rows.len(), "spin_structures": v})));
    }
    let mut s = format!("spin structures: {}\n", rows.len());
    for (bits, c) in &rows {
        writeln!(s, "wu ({}) -> chern ({})", join(bits), join(c)).unwrap();
    }
    Outcome::ok(s)
}

pub fn cmd_lens_census(p: u64, q: Option<(i64, i64)>) -> Outcome {
    let mut stdout = String::new();
    if let Some((q1, q2)) = q {
        match lens_diffeo_count(p, q1, q2) {
            Ok(n) => writeln!(stdout, "diffeo classes of L({p}; {q1}, {q2}): {n}").unwrap(),
            Err(e) => return Outcome::from_error(&e),
        }
    }
    match lens_yc_count(p) {
        Ok(n) => {
            writeln!(stdout, "Y^c classes of L({p}, 1): {n}").unwrap();
            Outcome::ok(stdout)
        }
        Err(e) => {
            let mut o = Outcome::from_error(&e);
            o.stdout = stdout;
            o
        }
    }
}

fn parse_matrix(text: &str) -> Result<IntMatrix, Outcome> {
    let invalid = |m: String| Outcome::fail(EXIT_INVALID, format!("error: --matrix: {m}"));
    let rows: Vec<Vec<serde_json::Number>> = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
    let n = rows.len();
    let mut parsed = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(invalid(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        for (j, x) in r.iter().enumerate() {
            let v: BigInt =
                x.to_string().parse().map_err(|_| invalid(format!("entry ({i}, {j}) is not an integer")))?;
            parsed.push(v);
        }
    }
    let m = IntMatrix::new(n, n, parsed).map_err(|e| invalid(e.to_string()))?;
    if !m.is_symmetric() {
        return Err(invalid("matrix is not symmetric".into()));
    }
    Ok(m)
}

pub fn cmd_classes(
    path: Option<&Path>,
    matrix: Option<&str>,
    radius: Option<u32>,
    json: bool,
    opts: &ClassifyOptions,
) -> Outcome {
    let b = match (path, matrix) {
        (Some(path), _) => match load(path) {
            Ok((p, _)) => p.matrix().clone(),
            Err(o) => return o,
        },
        (None, Some(m)) => match parse_matrix(m) {
            Ok(m) => m,
            Err(o) => return o,
        },
        (None, None) => return Outcome::fail(EXIT_INVALID, "error: give a file or --matrix"),
    };
    let classes = match radius {
        Some(r) => yc_classes_in_box(&b, r, opts),
        None => yc_classes(&b, opts),
    };
    let classes = match classes {
        Ok(c) => c,
        Err(Error::DegenerateMatrix) => {
            return Outcome::fail(
                EXIT_INVALID,
                "error: matrix is degenerate; the Spin^c set is infinite (pass --radius to sample a box)",
            )
        }
        Err(e) => return Outcome::from_error(&e),
    };
    if json {
        let v: Vec<Vec<Vec<serde_json::Number>>> =
            classes.iter().map(|c| c.iter().map(|s| s.iter().map(number).collect()).collect()).collect();
        return Outcome::ok(json_line(&json!({"count": classes.len(), "classes": v})));
    }
    let mut s = format!("Y^c classes: {}\n", classes.len());
    for c in &classes {
        let members: Vec<String> = c.iter().map(|v| format!("({})", join(v))).collect();
        writeln!(s, "{{{}}}", members.join(", ")).unwrap();
    }
    Outcome::ok(s)
}
