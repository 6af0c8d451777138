//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 verification failure, 2 usage error, 3 size
//! limit refusal.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::combinatorics::{
    bipartition_leq, enumerate_bipartitions, is_b2_dist, is_b_dist, is_c_dist, is_special,
    Bipartition, Partition,
};
use crate::cones::{
    filtration_check, run_census, Cone, ConeError, FiltrationKind, FiltrationReport,
};
use crate::finitefield::FieldError;
use crate::maps::{
    collapse_b, collapse_c, collapse_special, collapse_tilde, phi_b, phi_b2, phi_c,
};
use crate::polycount::{
    exotic_point_poly, piece_poly, type_b_point_poly, type_c_point_poly, verify_identities,
    verify_identities_with, IntPolynomial, PieceKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nilcone", version, about = "Bipartition maps, point-count polynomials and nilpotent cone censuses")]
pub struct Cli {
    /// Worker threads for censuses (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest rank accepted by the table commands.
    #[arg(long, global = true, default_value_t = 12)]
    pub max_n: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of a map over all bipartitions of n.
    Maps(MapsArgs),
    /// Hasse diagram of a bipartition poset.
    Poset(PosetArgs),
    /// Point-count polynomials per label.
    Polys(PolysArgs),
    /// Check the polynomial identities for rank n.
    Verify(VerifyArgs),
    /// Enumerate a nilpotent cone over F_q and compare tallies with polynomials.
    Census(CensusArgs),
    /// Build and check adapted filtrations on the exotic nilpotent cone.
    Filtration(FiltrationArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    #[value(name = "phiC")]
    PhiC,
    #[value(name = "phiB")]
    PhiB,
    #[value(name = "phiB2")]
    PhiB2,
    #[value(name = "collapseC")]
    CollapseC,
    #[value(name = "collapseB")]
    CollapseB,
    #[value(name = "collapseSpecial")]
    CollapseSpecial,
    #[value(name = "collapseTilde")]
    CollapseTilde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PosetKind {
    All,
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    Special,
    #[value(name = "B2")]
    B2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PieceName {
    Orbit,
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    Special,
    Tilde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConeName {
    Exotic,
    Sp2,
    O2,
    Spodd,
    Oodd,
}

impl From<ConeName> for Cone {
    fn from(c: ConeName) -> Cone {
        match c {
            ConeName::Exotic => Cone::Exotic,
            ConeName::Sp2 => Cone::Sp2,
            ConeName::O2 => Cone::O2,
            ConeName::Spodd => Cone::SpOdd,
            ConeName::Oodd => Cone::OOdd,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindName {
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
}

#[derive(Args, Debug)]
pub struct MapsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum)]
    pub map: MapName,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PosetArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "all")]
    pub kind: PosetKind,
    #[arg(long, value_enum, default_value = "dot")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PolysArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "orbit")]
    pub piece: PieceName,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Perturb one orbit polynomial before checking.
    #[arg(long, hide = true)]
    pub tamper: bool,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long, value_enum)]
    pub cone: ConeName,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub q: u32,
    /// Allow enumerations above 2^24 points.
    #[arg(long)]
    pub override_budget: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct FiltrationArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_enum)]
    pub kind: KindName,
    /// Check this many random points instead of all of them.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Perturbed candidates tried per filtration level.
    #[arg(long, default_value_t = 2)]
    pub perturb: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, passed: bool) -> Self {
        Outcome { stdout, stderr: String::new(), code: if passed { EXIT_OK } else { EXIT_FAIL } }
    }

    fn err(stderr: String, code: i32) -> Self {
        Outcome { stdout: String::new(), stderr, code }
    }
}

fn usage(msg: impl Into<String>) -> Outcome {
    Outcome::err(format!("error: {}\n", msg.into()), EXIT_USAGE)
}

fn cone_error(e: ConeError) -> Outcome {
    let code = match e {
        ConeError::Budget { .. } => EXIT_BUDGET,
        ConeError::Unsupported { .. } | ConeError::Rank(_) => EXIT_USAGE,
        ConeError::Field(FieldError::Unsupported(_) | FieldError::NeedsCharTwo) => EXIT_USAGE,
        _ => EXIT_FAIL,
    };
    Outcome::err(format!("error: {e}\n"), code)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses arguments and runs the command. Output files are written here;
/// standard output and error are left to the caller.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome::err(text, code)
            };
        }
    };
    let outcome = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => usage(format!("cannot start {t} threads: {e}")),
        },
        None => dispatch(&cli),
    };
    match (&cli.out, outcome.stdout.is_empty()) {
        (Some(path), false) => match std::fs::write(path, &outcome.stdout) {
            Ok(()) => Outcome { stdout: String::new(), ..outcome },
            Err(e) => usage(format!("cannot write {}: {e}", path.display())),
        },
        _ => outcome,
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let check_n = |n: u32| {
        if n > cli.max_n {
            Err(Outcome::err(
                format!("error: n = {n} exceeds the limit {} (raise with --max-n)\n", cli.max_n),
                EXIT_BUDGET,
            ))
        } else {
            Ok(())
        }
    };
    let r = match &cli.command {
        Command::Maps(a) => check_n(a.n).and_then(|_| cmd_maps(a)),
        Command::Poset(a) => check_n(a.n).and_then(|_| cmd_poset(a)),
        Command::Polys(a) => check_n(a.n).and_then(|_| cmd_polys(a)),
        Command::Verify(a) => check_n(a.n).and_then(|_| cmd_verify(a)),
        Command::Census(a) => cmd_census(a),
        Command::Filtration(a) => cmd_filtration(a),
    };
    r.unwrap_or_else(|e| e)
}

fn bad_format(cmd: &str, f: Format) -> Outcome {
    usage(format!("format {f:?} is not available for {cmd}").to_lowercase())
}

fn csv_partition(p: &Partition) -> String {
    format!("\"{p}\"")
}

#[derive(Serialize)]
#[serde(untagged)]
enum Image {
    Partition(Partition),
    Bipartition(Bipartition),
}

impl std::fmt::Display for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Image::Partition(p) => write!(f, "{p}"),
            Image::Bipartition(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Serialize)]
struct MapRow {
    label: Bipartition,
    image: Image,
}

#[derive(Serialize)]
struct MapTable {
    n: u32,
    map: String,
    rows: Vec<MapRow>,
}

pub fn cmd_maps(a: &MapsArgs) -> Result<Outcome, Outcome> {
    let name = a.map.to_possible_value().expect("named").get_name().to_string();
    let rows: Vec<MapRow> = enumerate_bipartitions(a.n)
        .into_iter()
        .map(|bp| {
            let image = match a.map {
                MapName::PhiC => Image::Partition(phi_c(&bp)),
                MapName::PhiB => Image::Partition(phi_b(&bp)),
                MapName::PhiB2 => Image::Partition(phi_b2(&bp)),
                MapName::CollapseC => Image::Bipartition(collapse_c(&bp)),
                MapName::CollapseB => Image::Bipartition(collapse_b(&bp)),
                MapName::CollapseSpecial => Image::Bipartition(collapse_special(&bp)),
                MapName::CollapseTilde => Image::Bipartition(collapse_tilde(&bp)),
            };
            MapRow { label: bp, image }
        })
        .collect();
    let out = match a.format {
        Format::Json => json(&MapTable { n: a.n, map: name, rows }),
        Format::Text => rows.iter().map(|r| format!("{} -> {}\n", r.label, r.image)).collect(),
        Format::Csv => {
            let mut s = String::from("label_mu,label_nu,image\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},\"{}\"", csv_partition(&r.label.mu), csv_partition(&r.label.nu), r.image);
            }
            s
        }
        Format::Dot => return Err(bad_format("maps", a.format)),
    };
    Ok(Outcome::ok(out, true))
}

fn poset_members(n: u32, kind: PosetKind) -> Vec<Bipartition> {
    enumerate_bipartitions(n)
        .into_iter()
        .filter(|bp| match kind {
            PosetKind::All => true,
            PosetKind::B => is_b_dist(bp),
            PosetKind::C => is_c_dist(bp),
            PosetKind::Special => is_special(bp),
            PosetKind::B2 => is_b2_dist(bp),
        })
        .collect()
}

/// Covering pairs (upper, lower) of the interleaved dominance order.
pub fn hasse_edges(nodes: &[Bipartition]) -> Vec<(usize, usize)> {
    let k = nodes.len();
    let lt: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| i != j && bipartition_leq(&nodes[i], &nodes[j]).expect("equal weights"))
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for hi in 0..k {
        for lo in 0..k {
            if lt[lo][hi] && !(0..k).any(|m| lt[lo][m] && lt[m][hi]) {
                edges.push((hi, lo));
            }
        }
    }
    edges
}

#[derive(Serialize)]
struct PosetDoc {
    n: u32,
    kind: String,
    nodes: Vec<Bipartition>,
    covers: Vec<(Bipartition, Bipartition)>,
}

pub fn cmd_poset(a: &PosetArgs) -> Result<Outcome, Outcome> {
    let nodes = poset_members(a.n, a.kind);
    let edges = hasse_edges(&nodes);
    let out = match a.format {
        Format::Dot => {
            let mut s = String::from("digraph poset {\n  rankdir=BT;\n");
            for bp in &nodes {
                let _ = writeln!(s, "  \"{bp}\";");
            }
            for &(hi, lo) in &edges {
                let _ = writeln!(s, "  \"{}\" -> \"{}\";", nodes[lo], nodes[hi]);
            }
            s.push_str("}\n");
            s
        }
        Format::Json => json(&PosetDoc {
            n: a.n,
            kind: format!("{:?}", a.kind).to_lowercase(),
            covers: edges.iter().map(|&(h, l)| (nodes[h].clone(), nodes[l].clone())).collect(),
            nodes,
        }),
        Format::Text => edges.iter().map(|&(h, l)| format!("{} > {}\n", nodes[h], nodes[l])).collect(),
        Format::Csv => {
            let mut s = String::from("upper,lower\n");
            for &(h, l) in &edges {
                let _ = writeln!(s, "\"{}\",\"{}\"", nodes[h], nodes[l]);
            }
            s
        }
    };
    Ok(Outcome::ok(out, true))
}

#[derive(Serialize)]
struct PolyRow {
    label: Bipartition,
    degree: u32,
    poly: IntPolynomial,
}

#[derive(Serialize)]
struct PolyDoc {
    n: u32,
    piece: String,
    rows: Vec<PolyRow>,
}

pub fn cmd_polys(a: &PolysArgs) -> Result<Outcome, Outcome> {
    let rows: Vec<PolyRow> = enumerate_bipartitions(a.n)
        .into_iter()
        .filter_map(|bp| {
            let poly = match a.piece {
                PieceName::Orbit => Some(exotic_point_poly(&bp)),
                PieceName::B => type_b_point_poly(&bp).ok(),
                PieceName::C => type_c_point_poly(&bp).ok(),
                PieceName::Special => piece_poly(PieceKind::Special, &bp).ok().filter(|_| is_special(&bp)),
                PieceName::Tilde => piece_poly(PieceKind::Tilde, &bp).ok().filter(|_| is_b2_dist(&bp)),
            }?;
            Some(PolyRow { degree: poly.degree().unwrap_or(0), label: bp, poly })
        })
        .collect();
    let piece = a.piece.to_possible_value().expect("named").get_name().to_string();
    let out = match a.format {
        Format::Json => json(&PolyDoc { n: a.n, piece, rows }),
        Format::Text => rows
            .iter()
            .map(|r| format!("{}  [degree {}]  {}\n", r.label, r.degree, r.poly))
            .collect(),
        Format::Csv => {
            let mut s = String::from("label_mu,label_nu,degree,poly\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},\"{}\"",
                    csv_partition(&r.label.mu),
                    csv_partition(&r.label.nu),
                    r.degree,
                    r.poly
                );
            }
            s
        }
        Format::Dot => return Err(bad_format("polys", a.format)),
    };
    Ok(Outcome::ok(out, true))
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, Outcome> {
    let report = if a.tamper {
        let first = enumerate_bipartitions(a.n).into_iter().next();
        verify_identities_with(a.n, |bp| {
            let p = exotic_point_poly(bp);
            if Some(bp) == first.as_ref() {
                p + IntPolynomial::one()
            } else {
                p
            }
        })
    } else {
        verify_identities(a.n)
    };
    let out = match a.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = format!(
                "n={}: {} checks, {} failures: {}\n",
                report.n,
                report.checks,
                report.failures.len(),
                if report.passed() { "PASS" } else { "FAIL" }
            );
            for f in &report.failures {
                let _ = writeln!(s, "  {} at {}: {}", f.identity, f.label, f.detail);
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("identity,label_mu,label_nu,detail\n");
            for f in &report.failures {
                let _ = writeln!(
                    s,
                    "{},{},{},\"{}\"",
                    f.identity,
                    csv_partition(&f.label.mu),
                    csv_partition(&f.label.nu),
                    f.detail
                );
            }
            s
        }
        Format::Dot => return Err(bad_format("verify", a.format)),
    };
    Ok(Outcome::ok(out, report.passed()))
}

pub fn cmd_census(a: &CensusArgs) -> Result<Outcome, Outcome> {
    let report = run_census(a.cone.into(), a.n, a.q, a.override_budget).map_err(cone_error)?;
    let out = match a.format {
        Format::Json => json(&report),
        Format::Csv => report.to_csv(),
        Format::Text => {
            let mut s = format!(
                "census {} n={} q={}: {} enumerated, {} nilpotent (expected {}), {} violations: {}\n",
                report.cone,
                report.n,
                report.q,
                report.enumerated,
                report.points,
                report.expected_points,
                report.violation_count,
                if report.passed { "PASS" } else { "FAIL" }
            );
            for l in &report.lines {
                let jt = l.jordan_type.as_ref().map(|j| j.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "  {:<8} {:<16} {:<16} {:>10} {:>10} {}",
                    l.kind.name(),
                    l.label.to_string(),
                    jt,
                    l.tally,
                    l.expected,
                    if l.pass { "ok" } else { "MISMATCH" }
                );
            }
            for v in &report.violations {
                let _ = writeln!(s, "  violation: {v}");
            }
            s
        }
        Format::Dot => return Err(bad_format("census", a.format)),
    };
    Ok(Outcome::ok(out, report.passed))
}

fn filtration_text(r: &FiltrationReport) -> String {
    let mut s = format!(
        "filtration kind {:?} n={} q={} ({}): {} points, {} W steps, {} perturbed candidates ({} adapted), {} failures: {}\n",
        r.kind,
        r.n,
        r.q,
        if r.sampled { "sampled" } else { "exhaustive" },
        r.points,
        r.w_checks,
        r.perturbation_candidates,
        r.perturbations_adapted,
        r.failure_count,
        if r.passed { "PASS" } else { "FAIL" }
    );
    for f in &r.failures {
        let _ = writeln!(s, "  {f}");
    }
    s
}

pub fn cmd_filtration(a: &FiltrationArgs) -> Result<Outcome, Outcome> {
    let kind = match a.kind {
        KindName::B => FiltrationKind::B,
        KindName::C => FiltrationKind::C,
    };
    let report = filtration_check(a.n, a.q, kind, a.sample, a.seed, a.perturb).map_err(cone_error)?;
    let out = match a.format {
        Format::Json => json(&report),
        Format::Text => filtration_text(&report),
        Format::Csv => format!(
            "kind,n,q,sampled,points,w_checks,perturbation_candidates,perturbations_adapted,failures,pass\n{:?},{},{},{},{},{},{},{},{},{}\n",
            report.kind,
            report.n,
            report.q,
            report.sampled,
            report.points,
            report.w_checks,
            report.perturbation_candidates,
            report.perturbations_adapted,
            report.failure_count,
            report.passed
        ),
        Format::Dot => return Err(bad_format("filtration", a.format)),
    };
    Ok(Outcome::ok(out, report.passed))
}
