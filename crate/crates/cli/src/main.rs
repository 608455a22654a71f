use std::fs;
use std::io::{self, Read as _};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qac_core::distance_analysis::{
    brute_force_distance, exact_distance, exact_distance_with_budget, in_quasi_space, CodeAnalysis, DistanceError,
    DEFAULT_BUDGET,
};
use qac_core::local_recovery::{recover_all, ErasedCodeword, RecoveryError};
use qac_core::qac_code::{dim_footprint, parse_elements, parse_factor_elems, CodeDescriptor};
use qac_core::storage_sim::{run_scenario, survivability_sweep, ClusterScenario};
use qac_core::{generator_matrix, CodeSpec, Codeword, Polynomial};
use serde_json::json;

mod tables;

/// Exit status for `recover` when some group has too few survivors.
const EXIT_UNRECOVERABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "qac", version, about = "Quasi affine cartesian LRC codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Length, dimension, locality and distance bounds of a code
    Params(CodeArgs),
    /// Full distance report with the method and witness used
    Analyze {
        #[command(flatten)]
        code: CodeArgs,
        /// Print the witness polynomial in text mode
        #[arg(long)]
        witness: bool,
    },
    /// Encode a message vector or a polynomial
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Comma-separated message symbols, one per footprint monomial
        #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
        message: Option<String>,
        /// Polynomial such as `3*X1^2*X2 + X2 + 1`
        #[arg(long)]
        poly: Option<String>,
    },
    /// Locally repair erasures (`?`) in a received word
    Recover {
        #[command(flatten)]
        code: CodeArgs,
        /// File holding the word, or `-` for stdin
        #[arg(long)]
        input: String,
    },
    /// Minimum distance by exhaustive search
    Mindist {
        #[command(flatten)]
        code: CodeArgs,
        /// Maximum number of codewords to enumerate
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Regenerate the two reference tables
    Tables {
        #[arg(long)]
        json: bool,
    },
    /// Run a storage cluster scenario
    Simulate {
        /// JSON scenario file
        #[arg(long)]
        scenario: String,
        /// Also sweep uniform failure counts 0..=N
        #[arg(long)]
        sweep: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// Ambient field `p^k`
    #[arg(long)]
    field: String,
    /// Subfield degree of each factor
    #[arg(long, value_delimiter = ',')]
    factors: Vec<u32>,
    /// Explicit factor `i:e1,e2,...` (1-based), overriding `--factors`
    #[arg(long = "factor-elems")]
    factor_elems: Vec<String>,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    delta: u32,
    /// Locality coordinate (1-based)
    #[arg(long)]
    s: usize,
    #[arg(long)]
    json: bool,
}

impl CodeArgs {
    fn spec(&self) -> Result<CodeSpec> {
        let mut desc = CodeDescriptor {
            field: self.field.clone(),
            factors: self.factors.clone(),
            factor_elems: Default::default(),
            d: self.d,
            delta: self.delta,
            s: self.s,
        };
        for text in &self.factor_elems {
            let (i, elems) = parse_factor_elems(text)?;
            desc.factor_elems.insert(i, elems);
        }
        Ok(desc.build()?)
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn show(v: Option<impl ToString>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn params(args: &CodeArgs) -> Result<()> {
    let spec = args.spec()?;
    let a = CodeAnalysis::new(&spec, &exact_distance(&spec)?);
    if args.json {
        return print_json(&a);
    }
    let optimal = match a.optimal {
        Some(true) => " optimal",
        _ => "",
    };
    println!(
        "m={} kappa={} r={} d_tilde={} v={} lower={} upper={} exact={}{}",
        a.m,
        a.kappa,
        a.r,
        a.d_tilde,
        a.v,
        a.lower,
        a.upper,
        show(a.exact),
        optimal
    );
    Ok(())
}

fn analyze(args: &CodeArgs, with_witness: bool) -> Result<()> {
    let spec = args.spec()?;
    let report = exact_distance(&spec)?;
    let a = CodeAnalysis::new(&spec, &report);
    if args.json {
        return print_json(&a);
    }
    let mut rows = vec![
        ("m", a.m.to_string()),
        ("kappa", a.kappa.to_string()),
        ("r", a.r.to_string()),
        ("d_tilde", a.d_tilde.to_string()),
        ("d", a.d.to_string()),
    ];
    if a.effective_d != a.d {
        rows.push(("effective d", a.effective_d.to_string()));
    }
    rows.extend([
        ("delta", a.delta.to_string()),
        ("s", a.s.to_string()),
        ("v", a.v.to_string()),
        ("lower", a.lower.to_string()),
        ("upper", a.upper.to_string()),
        ("exact", show(a.exact)),
        ("method", a.method.to_string()),
        ("optimal", show(a.optimal)),
        ("cond_i", a.cond_i.to_string()),
        ("cond_ii", a.cond_ii.to_string()),
    ]);
    if let Some(w) = &report.witness {
        rows.push(("witness terms", w.num_terms().to_string()));
        if with_witness {
            rows.push(("witness", w.to_string()));
        }
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
    Ok(())
}

fn encode(args: &CodeArgs, message: Option<&str>, poly: Option<&str>) -> Result<()> {
    let spec = args.spec()?;
    let word = match (message, poly) {
        (Some(text), _) => {
            let msg = parse_elements(spec.field(), text)?;
            generator_matrix(&spec).encode(&msg)?
        }
        (None, Some(text)) => {
            let f = Polynomial::parse(spec.field(), spec.n(), text)?;
            if !in_quasi_space(&spec, &f) {
                bail!(
                    "{f} is not in the code's polynomial space (degree <= {}, X{}-degree < {})",
                    spec.effective_d(),
                    spec.s(),
                    spec.r()
                );
            }
            Codeword::new(f.evaluate_on_grid(spec.grid())?)
        }
        (None, None) => bail!("one of --message or --poly is required"),
    };
    if args.json {
        return print_json(&json!({ "codeword": word.to_string(), "weight": word.weight() }));
    }
    println!("{word}");
    Ok(())
}

fn recover(args: &CodeArgs, input: &str) -> Result<ExitCode> {
    let spec = args.spec()?;
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    let word = ErasedCodeword::parse(spec.field(), text.trim())?;
    match recover_all(&spec, &word) {
        Ok((fixed, stats)) => {
            if args.json {
                print_json(&json!({ "codeword": fixed.to_string(), "stats": stats }))?;
            } else {
                println!("{fixed}");
                eprintln!("repaired {} symbols reading {}", stats.repaired, stats.symbols_read);
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ RecoveryError::InsufficientSurvivors { .. }) => {
            if args.json {
                print_json(&json!({ "error": e.to_string() }))?;
            }
            eprintln!("unrecoverable: {e}");
            Ok(ExitCode::from(EXIT_UNRECOVERABLE))
        }
        Err(e) => Err(e.into()),
    }
}

fn mindist(args: &CodeArgs, budget: u64) -> Result<ExitCode> {
    let spec = args.spec()?;
    let g = generator_matrix(&spec);
    let value = match brute_force_distance(&g, budget) {
        Ok(v) => v,
        Err(e @ DistanceError::SearchSpaceTooLarge { q, kappa, .. }) => {
            let required = u32::try_from(kappa).ok().and_then(|k| (q as u128).checked_pow(k));
            match required {
                Some(n) => bail!("{e}; rerun with --budget {n}"),
                None => bail!("{e}; required budget {q}^{kappa} does not fit in 128 bits"),
            }
        }
        Err(e) => return Err(e.into()),
    };
    // closed-form paths only, so the comparison is independent of the search
    let report = exact_distance_with_budget(&spec, 0)?;
    let (verdict, ok) = match report.exact {
        Some(x) if x == value => ("matches formula".to_string(), true),
        Some(x) => (format!("MISMATCH: formula gives {x}"), false),
        None if report.lower <= value && value as i64 <= report.upper => {
            (format!("within bounds [{}, {}]", report.lower, report.upper), true)
        }
        None => (format!("OUTSIDE bounds [{}, {}]", report.lower, report.upper), false),
    };
    if args.json {
        print_json(&json!({
            "distance": value,
            "kappa": dim_footprint(&spec),
            "formula": report.exact,
            "lower": report.lower,
            "upper": report.upper,
            "method": report.method,
            "consistent": ok,
        }))?;
    } else {
        println!("{value} ({verdict})");
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn simulate(path: &str, sweep: Option<usize>, as_json: bool) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let scenario = ClusterScenario::from_json(&text)?;
    let report = run_scenario(&scenario)?;
    let points = match sweep {
        Some(max) => Some(survivability_sweep(
            &scenario.code.build()?,
            max,
            scenario.trials,
            scenario.seed,
        )),
        None => None,
    };
    if as_json {
        return print_json(&json!({ "report": report, "sweep": points }));
    }
    print!("{report}");
    if let Some(points) = points {
        println!("failures  recovered  rate");
        for p in points {
            println!("{:>8}  {:>9}  {:.4}", p.failures, p.recovered, p.rate);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Params(code) => params(&code)?,
        Command::Analyze { code, witness } => analyze(&code, witness)?,
        Command::Encode { code, message, poly } => encode(&code, message.as_deref(), poly.as_deref())?,
        Command::Recover { code, input } => return recover(&code, &input),
        Command::Mindist { code, budget } => return mindist(&code, budget),
        Command::Tables { json } => return tables::run(json),
        Command::Simulate { scenario, sweep, json } => simulate(&scenario, sweep, json)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
