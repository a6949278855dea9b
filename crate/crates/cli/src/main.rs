use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sptrans::classifier::{classify, verify_witness, Budgets, ClassifyError};
use sptrans::field::make_field;
use sptrans::fixtures::{FixtureParams, RecipeRegistry};
use sptrans::io::{self, ClassifyReport, IoError, WagnerReport};
use sptrans::oracle::CheckRegistry;
use sptrans::wagner::{random_instance, wagner_word};

const VERIFIED: u8 = 0;
const FAILED: u8 = 1;
const INCOMPLETE: u8 = 2;
const INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "sptrans", version, about = "Classify subgroups of GSp_n(q) that contain a symplectic transvection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args)]
struct Common {
    /// Largest group enumerated element by element.
    #[arg(long)]
    cap: Option<usize>,
    /// Productive saturation rule firings.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an instance and verify the witness.
    Classify {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Include the saturation provenance log.
        #[arg(long)]
        emit_provenance: bool,
    },
    /// Check a witness (bare or inside a report) against an instance.
    Verify {
        instance: PathBuf,
        witness: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build a fixture instance of a known case.
    Generate {
        /// 1 reducible, 2 imprimitive, 3 full symplectic.
        #[arg(long, required_unless_present_any = ["recipe", "list_recipes"])]
        case: Option<u8>,
        /// Recipe name; defaults to the first recipe of the case.
        #[arg(long)]
        recipe: Option<String>,
        #[arg(long = "char", default_value_t = 5)]
        characteristic: u32,
        /// Degree of K over its prime field.
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Degree of L over the prime field.
        #[arg(long, default_value_t = 1)]
        subfield_degree: u32,
        /// Block dimension for imprimitive recipes.
        #[arg(long, default_value_t = 2)]
        block_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the final conjugation by a random similitude.
        #[arg(long)]
        no_conjugate: bool,
        #[arg(long)]
        list_recipes: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Produce the transvection predicted by Wagner's three-centre argument.
    Wagner {
        /// Instance file; omit with --random.
        instance: Option<PathBuf>,
        /// Use a random valid instance over GF(--char).
        #[arg(long, conflicts_with = "instance")]
        random: bool,
        #[arg(long = "char", default_value_t = 5)]
        characteristic: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run randomized lemma checks against exhaustive computation.
    Oracle {
        /// A check name, or "lemmas" for all of them.
        #[arg(default_value = "lemmas")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per check; defaults to each check's own count.
        #[arg(long)]
        count: Option<usize>,
        /// Seconds per check before remaining cases are skipped.
        #[arg(long, default_value_t = 600)]
        time_budget: u64,
        /// Re-run one recorded case seed of SUITE.
        #[arg(long)]
        replay: Option<u64>,
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn budgets(c: &Common, base: Budgets) -> Budgets {
    Budgets {
        closure_cap: c.cap.unwrap_or(base.closure_cap),
        saturation_budget: c.budget.unwrap_or(base.saturation_budget),
    }
}

fn emit(c: &Common, text: &str) -> Result<(), u8> {
    let Format::Json = c.format;
    match &c.out {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("cannot write {}: {e}", p.display());
            INVALID
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        INVALID
    })
}

fn invalid(path: &Path, e: IoError) -> u8 {
    eprintln!("{}: {e}", path.display());
    INVALID
}

fn load(path: &Path) -> Result<io::Instance, u8> {
    io::parse_instance(&read(path)?).map_err(|e| invalid(path, e))
}

fn cmd_classify(path: &Path, common: &Common, provenance: bool) -> Result<u8, u8> {
    let inst = load(path)?;
    let b = budgets(common, inst.budgets.over(Budgets::default()));
    let g = &inst.group;
    eprintln!(
        "classifying {} generators in dimension {} over GF({}^{})",
        g.generators().len(),
        g.dim(),
        g.field().characteristic(),
        g.field().degree()
    );
    let g = inst.full_group();
    let start = Instant::now();
    let outcome = classify(&g, &b);
    eprintln!("classify: {:.3?}", start.elapsed());
    let verified = match &outcome {
        Ok(res) => {
            let start = Instant::now();
            let ok = verify_witness(&g, &res.witness, &b);
            eprintln!("verify: {:.3?}", start.elapsed());
            ok
        }
        Err(e) => {
            eprintln!("{e}");
            false
        }
    };
    let report = ClassifyReport::new(&inst, &b, &outcome, verified, provenance);
    emit(common, &io::to_json(&report))?;
    Ok(match outcome {
        Ok(_) if verified => VERIFIED,
        Ok(_) => FAILED,
        Err(ClassifyError::SaturationIncomplete { .. }) => INCOMPLETE,
        Err(ClassifyError::CharTooSmall(_) | ClassifyError::NoTransvection) => INVALID,
        Err(ClassifyError::Inconsistent(_)) => FAILED,
    })
}

fn cmd_verify(instance: &Path, witness: &Path, common: &Common) -> Result<u8, u8> {
    let inst = load(instance)?;
    let b = budgets(common, inst.budgets.over(Budgets::default()));
    let w = io::parse_witness(&read(witness)?, inst.field(), inst.group.dim()).map_err(|e| invalid(witness, e))?;
    let start = Instant::now();
    let ok = verify_witness(&inst.full_group(), &w, &b);
    eprintln!("verify: {:.3?}", start.elapsed());
    eprintln!("{} witness {}", w.case_tag(), if ok { "verified" } else { "REJECTED" });
    Ok(if ok { VERIFIED } else { FAILED })
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    case: Option<u8>,
    recipe: Option<&str>,
    characteristic: u32,
    degree: u32,
    n: usize,
    subfield_degree: u32,
    block_dim: usize,
    seed: u64,
    conjugate: bool,
    list: bool,
    common: &Common,
) -> Result<u8, u8> {
    let reg = RecipeRegistry::default();
    if list {
        for r in reg.iter() {
            println!("{:<20} case {}  {}", r.name(), r.case(), r.description());
        }
        return Ok(VERIFIED);
    }
    let name = match (recipe, case) {
        (Some(r), _) => r.to_string(),
        (None, Some(c)) => match reg.default_for(c) {
            Some(r) => r.name().to_string(),
            None => {
                eprintln!("no recipe for case {c}");
                return Err(INVALID);
            }
        },
        (None, None) => unreachable!("clap requires --case or --recipe"),
    };
    if let (Some(c), Some(r)) = (case, reg.get(&name)) {
        if r.case() != c {
            eprintln!("recipe {name} builds case {}, not case {c}", r.case());
            return Err(INVALID);
        }
    }
    let k = make_field(characteristic, degree).map_err(|e| {
        eprintln!("{e}");
        INVALID
    })?;
    let mut params = FixtureParams::new(&k, n, subfield_degree);
    params.block_dim = block_dim;
    let f = reg.build(&name, &params, seed, conjugate).map_err(|e| {
        eprintln!("{e}");
        INVALID
    })?;
    for line in &f.log {
        eprintln!("{line}");
    }
    emit(common, &io::to_json(&io::fixture_file(&f, seed)))?;
    Ok(VERIFIED)
}

fn cmd_wagner(path: Option<&Path>, random: bool, characteristic: u32, seed: u64, common: &Common) -> Result<u8, u8> {
    let inst = match (path, random) {
        (Some(p), _) => io::parse_wagner(&read(p)?).map_err(|e| invalid(p, e))?,
        (None, true) => {
            let k = make_field(characteristic, 1).map_err(|e| {
                eprintln!("{e}");
                INVALID
            })?;
            if characteristic < 5 {
                eprintln!("characteristic {characteristic} is below 5");
                return Err(INVALID);
            }
            let inst = random_instance(&k, &mut ChaCha8Rng::seed_from_u64(seed));
            eprintln!("instance:\n{}", io::to_json(&io::wagner_file(&inst)).trim_end());
            inst
        }
        (None, false) => {
            eprintln!("give an instance file or --random");
            return Err(INVALID);
        }
    };
    let cap = common.cap.unwrap_or(Budgets::default().closure_cap);
    let start = Instant::now();
    let res = wagner_word(&inst, cap);
    eprintln!("wagner: {:.3?}", start.elapsed());
    match res {
        Ok(r) => {
            emit(common, &io::to_json(&WagnerReport::of(&inst.field, &r)))?;
            Ok(VERIFIED)
        }
        Err(e) => {
            eprintln!("{e}");
            Err(match e {
                sptrans::wagner::WagnerError::BudgetExceeded(_) => INCOMPLETE,
                sptrans::wagner::WagnerError::HypothesisViolated(_) => INVALID,
            })
        }
    }
}

fn cmd_oracle(
    suite: &str,
    seed: u64,
    count: Option<usize>,
    time_budget: u64,
    replay: Option<u64>,
    list: bool,
    common: &Common,
) -> Result<u8, u8> {
    let reg = CheckRegistry::default();
    if list {
        for name in reg.names() {
            let c = reg.get(name).unwrap();
            println!("{name:<24} {}", c.statement());
        }
        return Ok(VERIFIED);
    }
    if let Some(case) = replay {
        return match reg.replay(suite, case) {
            Ok(Ok(())) => {
                eprintln!("{suite} case {case}: pass");
                Ok(VERIFIED)
            }
            Ok(Err(detail)) => {
                eprintln!("{suite} case {case}: FAIL {detail}");
                Ok(FAILED)
            }
            Err(e) => {
                eprintln!("{e}");
                Err(INVALID)
            }
        };
    }
    let start = Instant::now();
    let report = reg
        .run_suite(suite, seed, count, Duration::from_secs(time_budget))
        .map_err(|e| {
            eprintln!("{e}");
            INVALID
        })?;
    for c in &report.checks {
        let mark = if c.ok() { "pass" } else { "FAIL" };
        eprintln!("{mark} {:<24} {}/{}", c.name, c.passed, c.cases);
    }
    eprintln!("oracle: {:.3?}", start.elapsed());
    emit(common, &io::to_json(&report))?;
    Ok(if report.ok() { VERIFIED } else { FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Classify {
            instance,
            common,
            emit_provenance,
        } => cmd_classify(instance, common, *emit_provenance),
        Command::Verify {
            instance,
            witness,
            common,
        } => cmd_verify(instance, witness, common),
        Command::Generate {
            case,
            recipe,
            characteristic,
            degree,
            n,
            subfield_degree,
            block_dim,
            seed,
            no_conjugate,
            list_recipes,
            common,
        } => cmd_generate(
            *case,
            recipe.as_deref(),
            *characteristic,
            *degree,
            *n,
            *subfield_degree,
            *block_dim,
            *seed,
            !no_conjugate,
            *list_recipes,
            common,
        ),
        Command::Wagner {
            instance,
            random,
            characteristic,
            seed,
            common,
        } => cmd_wagner(instance.as_deref(), *random, *characteristic, *seed, common),
        Command::Oracle {
            suite,
            seed,
            count,
            time_budget,
            replay,
            list,
            common,
        } => cmd_oracle(suite, *seed, *count, *time_budget, *replay, *list, common),
    };
    ExitCode::from(code.unwrap_or_else(|c| c))
}
