mod dot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pentaform::convergence::{
    lower_convergent, upper_convergent, ConvergenceVerdict, Subject, DEFAULT_DEPTH,
};
use pentaform::form::{validate, Axiom};
use pentaform::game::{
    admissible, authentic, authentic_value, nash_check, one_piece_unimprovable, persistent,
    piecewise_nash, solve_backward_with_cap, spe_check_direct, Solution, ValueFunction, Verdict,
    DEFAULT_PROFILE_CAP,
};
use pentaform::io;
use pentaform::partition::{classify_piece_endnodes, piece_partition, subroots};
use pentaform::stationary::{
    certify_spe, instantiate, solve_stationary, CertificateKind, Mode, StationarySolution,
};
use pentaform::Error;

const OK: u8 = 0;
const FAILS: u8 = 1;
const INPUT: u8 = 2;
const CAP: u8 = 3;
const INCONCLUSIVE: u8 = 4;

/// Environment variable overriding the exhaustive-search cap.
const CAP_VAR: &str = "PENTAFORM_MAX_PROFILES";

#[derive(Parser)]
#[command(
    name = "pentaform",
    version,
    about = "Analyse extensive-form games given as quintuple sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the eight axioms on a pentaform or game file.
    Validate { path: PathBuf },
    /// Show subroots, pieces and optionally a DOT diagram.
    Inspect {
        path: PathBuf,
        #[arg(long)]
        subroots: bool,
        #[arg(long)]
        pieces: bool,
        /// Write a DOT digraph to this file.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
    },
    /// Check one property of a strategy in a finite game.
    Check {
        game: PathBuf,
        strategy: PathBuf,
        /// Value-function file, for value-dependent properties.
        value: Option<PathBuf>,
        #[arg(long, value_enum)]
        property: Property,
        /// Use the strategy's own authentic value function.
        #[arg(long, conflicts_with = "value")]
        authentic_value: bool,
    },
    /// Backward induction over pieces.
    Solve { game: PathBuf },
    /// Work with a stationary system file.
    Stationary {
        system: PathBuf,
        #[command(subcommand)]
        action: StationaryAction,
    },
}

#[derive(Subcommand)]
enum StationaryAction {
    /// Certify or refute subgame perfection of a stationary strategy.
    Certify { strategy: PathBuf },
    /// Value iteration for a stationary equilibrium.
    Solve,
    /// Upper- and lower-convergence verdicts.
    Convergence {
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Write the explicit truncation with all pieces down to depth `d`.
    Instantiate {
        d: usize,
        /// Also bracket the boundary endnodes by conceivable bounds.
        #[arg(long)]
        bounded: bool,
        /// Write the pentaform here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Nash,
    Spe,
    Admissible,
    Persistent,
    Authentic,
    PiecewiseNash,
    OnePiece,
}

impl Property {
    fn needs_value(self) -> bool {
        matches!(
            self,
            Property::Admissible
                | Property::Persistent
                | Property::Authentic
                | Property::PiecewiseNash
        )
    }

    fn name(self) -> &'static str {
        match self {
            Property::Nash => "nash",
            Property::Spe => "spe",
            Property::Admissible => "admissible",
            Property::Persistent => "persistent",
            Property::Authentic => "authentic",
            Property::PiecewiseNash => "piecewise-nash",
            Property::OnePiece => "one-piece",
        }
    }
}

/// What a command prints and how it exits.
struct Report {
    text: String,
    code: u8,
}

impl Report {
    fn new(code: u8) -> Self {
        Report {
            text: String::new(),
            code,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

fn label(s: &str) -> String {
    format!("{s:?}")
}

fn label_set<'a>(xs: impl IntoIterator<Item = &'a String>) -> String {
    let parts: Vec<String> = xs.into_iter().map(|x| label(x)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn profile_cap() -> Result<u128, Error> {
    match std::env::var(CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::Usage(format!(
                "{CAP_VAR} must be a nonnegative integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_PROFILE_CAP),
    }
}

fn validate_cmd(path: &Path) -> Result<Report, Error> {
    let q = io::quintuples_from_json(&io::read_json(path)?)?;
    let (report, p) = match validate(q) {
        Ok(p) => (Default::default(), Some(p)),
        Err(r) => (r, None),
    };
    let mut out = Report::new(if p.is_some() { OK } else { FAILS });
    out.line(format!("validate {}", path.display()));
    for axiom in Axiom::ALL {
        let status = if report.holds(axiom) { "pass" } else { "FAIL" };
        out.line(format!("  {:<8} {status}", axiom.tag()));
        for v in report.violations.iter().filter(|v| v.axiom() == axiom) {
            out.line(format!("           {v}"));
        }
    }
    match p {
        Some(p) => out.line(format!("valid pentaform, root {}", label(p.root()))),
        None => out.line("not a pentaform"),
    }
    Ok(out)
}

fn inspect_cmd(
    path: &Path,
    show_subroots: bool,
    show_pieces: bool,
    dot: Option<&Path>,
) -> Result<Report, Error> {
    let p = io::pentaform_from_json(&io::read_json(path)?)?;
    let mut out = Report::new(OK);
    out.line(format!("inspect {}", path.display()));
    out.line(format!("root: {}", label(p.root())));
    out.line(format!(
        "{} quintuples, {} decision nodes, {} endnodes, {} situations",
        p.quintuples().len(),
        p.decision_nodes().len(),
        p.endnodes().len(),
        p.situations().len()
    ));
    let all = !show_subroots && !show_pieces && dot.is_none();
    if show_subroots || all {
        out.line(format!("subroots: {}", label_set(subroots(&p))));
    }
    if show_pieces || all {
        let part = piece_partition(&p);
        out.line("pieces:");
        let mut covered = 0;
        for (t, piece) in part.iter() {
            covered += piece.quintuples().len();
            out.line(format!(
                "  {}: {} quintuples",
                label(t),
                piece.quintuples().len()
            ));
        }
        let status = if covered == p.quintuples().len() {
            "ok"
        } else {
            "BROKEN"
        };
        out.line(format!("partition of quintuples: {status}"));
        let ends = classify_piece_endnodes(&p)?;
        out.line(format!("endnode blocks: {}", ends.blocks().len()));
    }
    if let Some(dot_path) = dot {
        std::fs::write(dot_path, dot::to_dot(&p))
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", dot_path.display())))?;
        out.line(format!("wrote {}", dot_path.display()));
    }
    Ok(out)
}

fn check_cmd(
    game: &Path,
    strategy: &Path,
    value: Option<&Path>,
    property: Property,
    derive_value: bool,
) -> Result<Report, Error> {
    let g = io::game_from_json(&io::read_json(game)?)?;
    let s = io::strategy_from_json(&io::read_json(strategy)?, g.form())?;
    let v: Option<ValueFunction> = match (value, derive_value) {
        (Some(path), _) => Some(io::values_from_json(&io::read_json(path)?, &g)?),
        (None, true) => Some(authentic_value(&g, &s)?),
        (None, false) if property.needs_value() => {
            return Err(Error::Usage(format!(
                "property {} needs a value file or --authentic-value",
                property.name()
            )))
        }
        (None, false) => None,
    };
    let need = || v.as_ref().expect("checked above");
    let verdict: Verdict = match property {
        Property::Nash => nash_check(&g, &s)?,
        Property::Spe => spe_check_direct(&g, &s)?,
        Property::Admissible => admissible(&g, need())?,
        Property::Persistent => persistent(&g, &s, need())?,
        Property::Authentic => authentic(&g, &s, need())?,
        Property::PiecewiseNash => piecewise_nash(&g, &s, need())?,
        Property::OnePiece => one_piece_unimprovable(&g, &s)?,
    };
    let mut out = Report::new(if verdict.holds { OK } else { FAILS });
    out.line(format!("check {}: {verdict}", property.name()));
    Ok(out)
}

fn solve_cmd(game: &Path) -> Result<Report, Error> {
    let g = io::game_from_json(&io::read_json(game)?)?;
    match solve_backward_with_cap(&g, profile_cap()?)? {
        Solution::Equilibrium { strategy, values } => {
            let mut out = Report::new(OK);
            out.line("equilibrium:");
            for (j, a) in strategy.choices() {
                out.line(format!("  {} -> {}", label(j), label(a)));
            }
            out.line("values:");
            for (t, p) in values.values() {
                out.line(format!("  {}: {}", label(t), p.describe()));
            }
            Ok(out)
        }
        Solution::NoPureEquilibrium(t) => {
            let mut out = Report::new(FAILS);
            out.line(format!(
                "no pure equilibrium in the piece game at {}",
                label(&t)
            ));
            Ok(out)
        }
    }
}

fn convergence_lines(out: &mut Report, upper: &ConvergenceVerdict, lower: &ConvergenceVerdict) {
    out.line(format!("upper-convergence: {upper}"));
    out.line(format!("lower-convergence: {lower}"));
}

fn stationary_cmd(path: &Path, action: &StationaryAction) -> Result<Report, Error> {
    let sys = io::system_from_json(&io::read_json(path)?)?;
    match action {
        StationaryAction::Certify { strategy } => {
            let sigma = io::stationary_strategy_from_json(&io::read_json(strategy)?, &sys)?;
            let cert = certify_spe(&sys, &sigma)?;
            let code = match cert.kind {
                CertificateKind::SPECertified => OK,
                CertificateKind::Refuted { .. } => FAILS,
                CertificateKind::Inconclusive(_) => INCONCLUSIVE,
            };
            let mut out = Report::new(code);
            out.line(format!("certificate: {}", cert.kind));
            out.line("continuation values:");
            for (c, w) in &cert.values {
                out.line(format!("  {c}: {}", w.describe()));
            }
            convergence_lines(&mut out, &cert.upper, &cert.lower);
            out.line(format!("deviation scan: {}", cert.deviation_scan));
            Ok(out)
        }
        StationaryAction::Solve => match solve_stationary(&sys)? {
            StationarySolution::Solved { strategy, values } => {
                let mut out = Report::new(OK);
                out.line("stationary equilibrium:");
                for (c, ch) in strategy.choices() {
                    for (j, a) in ch {
                        out.line(format!("  {c}: {} -> {}", label(j), label(a)));
                    }
                }
                out.line("continuation values:");
                for (c, w) in &values {
                    out.line(format!("  {c}: {}", w.describe()));
                }
                Ok(out)
            }
            StationarySolution::Failure(c) => {
                let mut out = Report::new(FAILS);
                out.line(format!(
                    "no pure equilibrium in the quotient piece game of class {c}"
                ));
                Ok(out)
            }
            StationarySolution::NoConvergence { iterations } => {
                let mut out = Report::new(INCONCLUSIVE);
                out.line(format!(
                    "value iteration did not settle within {iterations} sweeps"
                ));
                Ok(out)
            }
        },
        StationaryAction::Convergence { depth } => {
            let upper = upper_convergent(Subject::System(&sys), *depth);
            let lower = lower_convergent(Subject::System(&sys), *depth);
            let code = if matches!(upper, ConvergenceVerdict::Fails(_))
                || matches!(lower, ConvergenceVerdict::Fails(_))
            {
                FAILS
            } else if upper.holds() && lower.holds() {
                OK
            } else {
                INCONCLUSIVE
            };
            let mut out = Report::new(code);
            convergence_lines(&mut out, &upper, &lower);
            Ok(out)
        }
        StationaryAction::Instantiate {
            d,
            bounded,
            out: dest,
        } => {
            let mode = if *bounded {
                Mode::Bounded
            } else {
                Mode::Structural
            };
            let inst = instantiate(&sys, *d, mode)?;
            let text = io::pentaform_to_string(&inst.form);
            let mut out = Report::new(OK);
            match dest {
                Some(file) => {
                    std::fs::write(file, &text).map_err(|e| {
                        Error::Usage(format!("cannot write {}: {e}", file.display()))
                    })?;
                    out.line(format!(
                        "depth {d}: {} quintuples, {} subroots, {} boundary endnodes; wrote {}",
                        inst.form.quintuples().len(),
                        inst.subroots.len(),
                        inst.boundary.len(),
                        file.display()
                    ));
                }
                None => out.text.push_str(&text),
            }
            if let Some(iv) = &inst.intervals {
                let mut s = String::from("boundary intervals:\n");
                for (y, (lo, hi)) in iv {
                    let _ = writeln!(s, "  {}: {} .. {}", label(y), lo.describe(), hi.describe());
                }
                if dest.is_some() {
                    out.text.push_str(&s);
                } else {
                    eprint!("{s}");
                }
            }
            Ok(out)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Validate { path } => validate_cmd(path),
        Command::Inspect {
            path,
            subroots,
            pieces,
            dot,
        } => inspect_cmd(path, *subroots, *pieces, dot.as_deref()),
        Command::Check {
            game,
            strategy,
            value,
            property,
            authentic_value,
        } => check_cmd(
            game,
            strategy,
            value.as_deref(),
            *property,
            *authentic_value,
        ),
        Command::Solve { game } => solve_cmd(game),
        Command::Stationary { system, action } => stationary_cmd(system, action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::NotAPentaform(r) = &e {
                eprint!("{r}");
            }
            ExitCode::from(match e {
                Error::ResourceCap { .. } => CAP,
                _ => INPUT,
            })
        }
    }
}
