//! `zol`: command-line access to the structure, class, colouring and measure routines.
//!
//! Exit codes: 0 success, 1 invalid input or failed precondition, 2 budget exceeded,
//! 3 a criterion failed under `zol verify`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use zol_core::classes::{
    check_accepts_substitution, check_admits_substitution, check_disjoint_amalgamation, condition_star,
    find_amalgam, witness_is_sound,
};
use zol_core::counting::{self, mult_bound, smult_bound, BoundOutcome};
use zol_core::experiment::{list_events, parse_n_range, probability, Row, CSV_HEADER};
use zol_core::structures::dedup_isomorphic;
use zol_core::*;

#[derive(Parser)]
#[command(name = "zol", version, about = "Extension axioms, colourings and conditional measures on finite structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ClassArgs {
    /// Class name: all, coloured:<l>, strongly-coloured:<l>, colourable:<l>,
    /// strongly-colourable:<l>, forbidden-weak:<file>, forbidden-induced:<file>, or a fixture
    #[arg(long)]
    class: String,
    /// `graph`, `digraph`, or a vocabulary file
    #[arg(long, default_value = "graph")]
    vocab: String,
    /// `trivial` or `gf2:<k>`
    #[arg(long = "geom", alias = "geometry", default_value = "trivial")]
    geometry: String,
}

impl ClassArgs {
    fn resolve(&self) -> Result<ClassSpec> {
        let base = Path::new(".");
        let vocab = resolve_vocab(&self.vocab, base)?;
        resolve_class(&self.class, &vocab, self.geometry.parse()?, base)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the members of K_n
    Enumerate {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        /// One representative per isomorphism type
        #[arg(long)]
        iso: bool,
        /// Print only the count
        #[arg(long)]
        count_only: bool,
    },
    /// Look for a condition (*) witness in a list of forbidden structures
    CheckStar {
        #[arg(long)]
        forbidden: PathBuf,
        #[arg(long, default_value = "graph")]
        vocab: String,
    },
    /// Bounded check that the class admits the substitution A ▷ B
    CheckAdmit {
        #[command(flatten)]
        class: ClassArgs,
        /// File holding A then B on the same universe
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Bounded check that the class accepts the substitution A ▷ B
    CheckAccept {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Bounded disjoint amalgamation check, or a single amalgam search with --triple
    CheckAmalg {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long)]
        independent: bool,
        /// File holding B1 then B2, which agree on their first --common elements
        #[arg(long, requires = "common")]
        triple: Option<PathBuf>,
        #[arg(long)]
        common: Option<usize>,
    },
    /// Print the gadgets S and U and the same-colour pairs I
    Gadgets {
        #[arg(long)]
        l: usize,
        #[arg(long, default_value = "false")]
        strong: String,
        #[arg(long, default_value = "graph")]
        vocab: String,
    },
    /// Multichromatic counts and bounds for class sizes p
    Count {
        /// mult, smult, overline-mult, overline-smult, or bounds
        #[arg(long)]
        mode: String,
        /// Comma-separated class sizes
        #[arg(long, value_delimiter = ',')]
        p: Vec<usize>,
        /// Optional check that the class sizes sum to n
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Richness parameter for `bounds`; defaults to the threshold for arity m
        #[arg(long)]
        a: Option<usize>,
    },
    /// Probability of one named event over a range of sizes
    Prob {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value = "uniform")]
        measure: String,
        #[arg(long)]
        event: String,
        #[arg(long)]
        n: String,
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Monte Carlo trials
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        fractions: bool,
    },
    /// Run an experiment config and write its CSV table
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        fractions: bool,
    },
    /// List the named events
    Events,
    /// Run the acceptance criteria
    Verify {
        /// Restrict to these criterion ids (a prefix such as `9a` selects its parts)
        #[arg(long = "criterion")]
        criteria: Vec<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ZolError::validation(format!("cannot read {}: {e}", path.display())))
}

fn read_two(path: &Path, vocab: &Arc<Vocabulary>) -> Result<(Structure, Structure)> {
    let ms = parse_structures(&read(path)?, vocab)?;
    match <[(String, Structure); 2]>::try_from(ms) {
        Ok([(_, a), (_, b)]) => Ok((a, b)),
        Err(ms) => Err(ZolError::validation(format!(
            "{} must hold exactly two structures, found {}",
            path.display(),
            ms.len()
        ))),
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ZolError::validation(format!("expected true or false, got {s:?}"))),
    }
}

fn print_verdict(v: &Verdict) {
    println!("{v}");
    if let Verdict::Counterexample { structure, .. } = v {
        print!("{}", serialize_structure("counterexample", structure));
    }
}

fn print_bound(name: &str, out: &BoundOutcome) {
    match out {
        BoundOutcome::Holds { lhs, rhs } => println!("{name}: holds, {lhs} <= {rhs}"),
        BoundOutcome::Violated { lhs, rhs } => println!("{name}: VIOLATED, {lhs} > {rhs}"),
        BoundOutcome::Inapplicable(why) => println!("{name}: inapplicable ({why})"),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| ZolError::validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| ZolError::validation(format!("cannot write output: {e}")))
        }
    }
}

/// Runs a command; `Ok(false)` means a verification failure.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Enumerate { class, n, iso, count_only } => {
            let c = class.resolve()?;
            let mut members = c.enumerate(n)?;
            if iso {
                members = dedup_isomorphic(members)?;
            }
            if count_only {
                println!("{}", members.len());
            } else {
                for (i, m) in members.iter().enumerate() {
                    print!("{}", serialize_structure(&format!("m{}", i + 1), m));
                }
                eprintln!("{} structures", members.len());
            }
        }
        Command::CheckStar { forbidden, vocab } => {
            let vocab = resolve_vocab(&vocab, Path::new("."))?;
            let f: Vec<Structure> = parse_structures(&read(&forbidden)?, &vocab)?
                .into_iter()
                .map(|(_, m)| m)
                .collect();
            if f.is_empty() {
                return Err(ZolError::validation("no forbidden structures given"));
            }
            match condition_star(&f) {
                Some(w) => {
                    println!(
                        "witness: {}{:?} in {} (sound: {})",
                        w.symbol,
                        w.tuple,
                        w.structure.summary(),
                        witness_is_sound(&f, &w)
                    );
                }
                None => println!("none"),
            }
        }
        Command::CheckAdmit { class, pair, max_n } => {
            let c = class.resolve()?;
            let (a, b) = read_two(&pair, c.vocab())?;
            print_verdict(&check_admits_substitution(&c, &a, &b, max_n)?);
        }
        Command::CheckAccept { class, pair, max_n } => {
            let c = class.resolve()?;
            let (a, b) = read_two(&pair, c.vocab())?;
            print_verdict(&check_accepts_substitution(&c, &a, &b, max_n)?);
        }
        Command::CheckAmalg {
            class,
            max_n,
            independent,
            triple,
            common,
        } => {
            let c = class.resolve()?;
            match triple {
                Some(path) => {
                    let (b1, b2) = read_two(&path, c.vocab())?;
                    match find_amalgam(&c, common.expect("required by clap"), &b1, &b2)? {
                        Some(m) => {
                            println!("amalgam found");
                            print!("{}", serialize_structure("amalgam", &m));
                        }
                        None => println!("counterexample: no permitted amalgam"),
                    }
                }
                None => print_verdict(&check_disjoint_amalgamation(&c, max_n, independent)?),
            }
        }
        Command::Gadgets { l, strong, vocab } => {
            let vocab = resolve_vocab(&vocab, Path::new("."))?;
            let g = Gadgets::build(&vocab, l, parse_bool(&strong)?)?;
            g.s.verify()?;
            g.u.verify()?;
            print!("{}", serialize_structure("S", &g.s.structure));
            println!("# a = {}, b = {}", g.s.a, g.s.b);
            print!("{}", serialize_structure("U", &g.u.structure));
            println!("# canonical colouring {:?}", g.u.canonical_colouring.colours());
            let pairs: Vec<String> = g.u.same_colour_pairs.iter().map(|(i, j)| format!("{{{i},{j}}}")).collect();
            println!("I = {{{}}}", pairs.join(", "));
        }
        Command::Count { mode, p, n, m, a } => {
            if p.is_empty() {
                return Err(ZolError::validation("--p needs at least one class size"));
            }
            let total: usize = p.iter().sum();
            if let Some(n) = n {
                if n != total {
                    return Err(ZolError::validation(format!("class sizes sum to {total}, not {n}")));
                }
            }
            match mode.as_str() {
                "mult" => println!("{}", counting::mult(&p, m)?),
                "smult" => println!("{}", counting::smult(&p, m)?),
                "overline-mult" => println!("{}", counting::overline_mult(&p, m)?),
                "overline-smult" => println!("{}", counting::overline_smult(&p, m)?),
                "bounds" => {
                    if p.len() < 2 {
                        return Err(ZolError::validation("bounds need at least two colours"));
                    }
                    let a = a.unwrap_or_else(|| counting::richness_threshold(p.len(), m));
                    println!("a = {a}");
                    print_bound("mult", &mult_bound(&p, a, m)?);
                    print_bound("overline-smult", &smult_bound(&p, a, m)?);
                }
                other => return Err(ZolError::validation(format!("unknown count mode {other:?}"))),
            }
        }
        Command::Prob {
            class,
            measure,
            event,
            n,
            exact: _,
            mc,
            seed,
            fractions,
        } => {
            let c = class.resolve()?;
            let measure: MeasureKind = measure.parse()?;
            let event_vocab = if c.cover().is_some() { c.vocab().relational() } else { c.vocab().clone() };
            let spec = EventSpec::parse(&event, &event_vocab, Path::new("."))?;
            let ev = PreparedEvent::new(&spec, &c)?;
            let mode = match mc {
                Some(t) => format!("mc:{t}").parse()?,
                None => Mode::Exact,
            };
            println!("{CSV_HEADER}");
            for n in parse_n_range(&n)? {
                let row = Row {
                    n,
                    event: spec.to_string(),
                    measure,
                    mode,
                    result: probability(&c, n, &ev, measure, mode, seed)?,
                };
                println!("{}", row.to_csv(fractions));
            }
        }
        Command::Experiment {
            config,
            output,
            fractions,
        } => {
            let base = config.parent().unwrap_or(Path::new(".")).to_path_buf();
            let cfg = ExperimentConfig::parse(&read(&config)?, &base)?;
            let table = run_experiment(&cfg)?;
            let out = output.or_else(|| cfg.output.as_ref().map(|p| base.join(p)));
            write_output(out.as_deref(), &table.to_csv(fractions))?;
        }
        Command::Events => {
            for (name, what) in list_events() {
                println!("{name:<30} {what}");
            }
        }
        Command::Verify { criteria } => {
            let reports = zol_core::verify::run_selected(&criteria);
            if reports.is_empty() {
                return Err(ZolError::validation(format!("no criterion matches {criteria:?}")));
            }
            let mut ok = true;
            for r in &reports {
                println!("{r}");
                ok &= r.passed;
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", reports.len() - failed);
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                ZolError::Budget { .. } => 2,
                _ => 1,
            })
        }
    }
}
