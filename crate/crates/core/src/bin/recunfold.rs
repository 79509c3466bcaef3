use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use recunfold::bench::{self, NaiveCaps, SizeScale};
use recunfold::format::format_deck;
use recunfold::oracle::closed_form;
use recunfold::parse::parse_program;
use recunfold::{programs, Engine, Error, ExitCode, Mode, Program, Query, Result, RunOutcome, Term};

#[derive(Parser)]
#[command(name = "recunfold", version, about = "Runtime repeated recursion unfolding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer a query by unfolding or by the naive interpreter
    Run {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = ModeArg::Unfold)]
        mode: ModeArg,
        /// Run the naive interpreter past its input-size caps
        #[arg(long)]
        cap_override: bool,
        /// Print only the answer
        #[arg(long, short)]
        quiet: bool,
    },
    /// Answer a query from a closed form, or the naive interpreter where none exists
    Oracle {
        #[command(flatten)]
        target: Target,
        /// Run the naive interpreter past its input-size caps
        #[arg(long)]
        cap_override: bool,
    },
    /// Print the unfolded decks for a query, most unfolded rule first
    Unfold {
        #[command(flatten)]
        target: Target,
    },
    /// Time a program over a range of input sizes and write CSV
    Bench {
        /// Shipped program name
        program: String,
        #[arg(long, value_enum, default_value_t = BenchMode::Both)]
        mode: BenchMode,
        /// Exponents k (input 2^k), e.g. `25,50,100` or `8..12`
        #[arg(long)]
        sizes: String,
        /// Use the sizes as inputs directly instead of as exponents
        #[arg(long)]
        linear: bool,
        /// Repetitions per row; the median time is reported
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
        /// Second argument of gcd
        #[arg(long, default_value_t = 37)]
        second: u64,
        /// Run the naive interpreter past its input-size caps
        #[arg(long)]
        cap_override: bool,
    },
    /// Fit growth models to CSV written by `bench`
    Fit {
        /// CSV file; standard input when absent
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Target {
    /// Rule file to load instead of a shipped program
    #[arg(long)]
    program_file: Option<PathBuf>,
    /// Full goal, e.g. `s(10,R)`, instead of positional inputs
    #[arg(long)]
    query: Option<String>,
    /// Shipped program name (omitted with --program-file), then its inputs;
    /// integers may be written 2^k, 2^k+1 or 2^k-1
    #[arg(allow_negative_numbers = true)]
    args: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Unfold,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Unfold => Mode::Unfold,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    Naive,
    Unfold,
    Both,
}

struct Loaded {
    program: Program,
    inputs: Vec<Term>,
    query: Query,
}

impl Target {
    fn load(&self) -> Result<Loaded> {
        let (program, rest) = match &self.program_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                (parse_program(&text)?, &self.args[..])
            }
            None => {
                let (name, rest) = self
                    .args
                    .split_first()
                    .ok_or_else(|| Error::Config("missing program name".into()))?;
                (programs::builtin(name)?, rest)
            }
        };
        let inputs = rest.iter().map(|a| bench::parse_input(a)).collect::<Result<Vec<_>>>()?;
        let query = match &self.query {
            Some(q) if inputs.is_empty() => Query::parse(q)?,
            Some(_) => return Err(Error::Config("give either --query or inputs, not both".into())),
            None => Query::for_program(&program, inputs.clone())?,
        };
        Ok(Loaded { program, inputs, query })
    }
}

fn print_stats(out: &RunOutcome) {
    let s = &out.stats;
    eprintln!(
        "% apps={} recursive={} rounds={} deck_size={} unfold_steps={} unfold_ms={:.3} interp_ms={:.3} total_ms={:.3}",
        s.rule_applications,
        s.recursive_applications,
        s.rounds,
        s.deck_size(),
        s.unfold_steps,
        s.unfold_time.as_secs_f64() * 1e3,
        s.interp_time.as_secs_f64() * 1e3,
        s.total_time.as_secs_f64() * 1e3,
    );
}

fn cmd_run(target: &Target, mode: Mode, cap_override: bool, quiet: bool) -> Result<ExitCode> {
    let loaded = target.load()?;
    if mode == Mode::Naive && !cap_override {
        NaiveCaps::default().check(loaded.program.name(), &loaded.inputs)?;
    }
    let out = Engine::new().run(&loaded.program, &loaded.query, mode)?;
    println!("{}", out.answer_text());
    if !quiet {
        print_stats(&out);
    }
    Ok(if out.solved { ExitCode::Success } else { ExitCode::Failure })
}

fn cmd_oracle(target: &Target, cap_override: bool) -> Result<ExitCode> {
    let loaded = target.load()?;
    let ints: Option<Vec<BigInt>> = loaded.inputs.iter().map(Term::to_bigint).collect();
    let outputs = loaded.program.entry().arity - loaded.inputs.len();
    if let (Some(ints), 1, None) = (ints, outputs, &target.query) {
        match closed_form(loaded.program.name(), &ints) {
            Ok(v) => {
                println!("R = {v}");
                return Ok(ExitCode::Success);
            }
            Err(Error::UnsupportedPredicate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if !cap_override {
        NaiveCaps::default().check(loaded.program.name(), &loaded.inputs)?;
    }
    let out = Engine::new().run(&loaded.program, &loaded.query, Mode::Naive)?;
    println!("{}", out.answer_text());
    Ok(if out.solved { ExitCode::Success } else { ExitCode::Failure })
}

fn cmd_unfold(target: &Target) -> Result<ExitCode> {
    let loaded = target.load()?;
    let results = Engine::new().unfold_decks(&loaded.program, &loaded.query)?;
    let several = results.len() > 1;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let io_err = |e: io::Error| Error::Config(format!("writing output: {e}"));
    for r in &results {
        if several {
            writeln!(out, ":- deck.").map_err(io_err)?;
        }
        out.write_all(format_deck(&r.deck).as_bytes()).map_err(io_err)?;
        if r.stats.limit_reached {
            eprintln!("% unfolding stopped at the step limit");
        }
        if let Some(e) = &r.stats.scheme_stopped {
            eprintln!("% unfolding stopped: {e}");
        }
    }
    out.flush().map_err(io_err)?;
    Ok(ExitCode::Success)
}

fn cmd_bench(
    program_name: &str,
    mode: BenchMode,
    sizes: &str,
    scale: SizeScale,
    reps: u32,
    second: u64,
    cap_override: bool,
) -> Result<ExitCode> {
    let program = programs::builtin(program_name)?;
    let sizes = bench::parse_sizes(sizes)?;
    let modes: &[Mode] = match mode {
        BenchMode::Naive => &[Mode::Naive],
        BenchMode::Unfold => &[Mode::Unfold],
        BenchMode::Both => &[Mode::Naive, Mode::Unfold],
    };
    eprintln!(
        "% recunfold {} on {}/{}, {} cpus, median of {reps}",
        env!("CARGO_PKG_VERSION"),
        std::env::consts::OS,
        std::env::consts::ARCH,
        std::thread::available_parallelism().map_or(1, |n| n.get()),
    );
    let engine = Engine::new();
    let caps = NaiveCaps::default();
    let mut rows = Vec::new();
    for &size in &sizes {
        let (inputs, descriptor) = bench::bench_inputs(program_name, size, scale, second)?;
        let query = Query::for_program(&program, inputs.clone())?;
        for &m in modes {
            if m == Mode::Naive && !cap_override {
                if let Err(e) = caps.check(program_name, &inputs) {
                    eprintln!("% skipped {program_name} {m} {descriptor}: {e}");
                    continue;
                }
            }
            let stats = bench::measure(&engine, &program, &query, m, reps as usize)?;
            rows.push(bench::row(program_name, m, descriptor.clone(), &stats));
        }
    }
    bench::write_csv(io::stdout().lock(), &rows)?;
    Ok(ExitCode::Success)
}

fn cmd_fit(path: Option<&PathBuf>) -> Result<ExitCode> {
    let mut text = String::new();
    let read = match path {
        Some(p) => File::open(p).and_then(|mut f| f.read_to_string(&mut text)),
        None => io::stdin().read_to_string(&mut text),
    };
    read.map_err(|e| Error::Config(format!("reading CSV: {e}")))?;
    for series in bench::read_series(text.as_bytes())? {
        match bench::fit(&series) {
            Some(r) => println!(
                "{} {}: {} slope={:.3} residual={:.3} points={}",
                series.program, series.mode, r.model, r.slope, r.residual, r.points
            ),
            None => println!("{} {}: too few points to fit", series.program, series.mode),
        }
    }
    Ok(ExitCode::Success)
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            target,
            mode,
            cap_override,
            quiet,
        } => cmd_run(target, (*mode).into(), *cap_override, *quiet),
        Command::Oracle { target, cap_override } => cmd_oracle(target, *cap_override),
        Command::Unfold { target } => cmd_unfold(target),
        Command::Bench {
            program,
            mode,
            sizes,
            linear,
            reps,
            second,
            cap_override,
        } => {
            let scale = if *linear { SizeScale::Linear } else { SizeScale::Exponent };
            cmd_bench(program, *mode, sizes, scale, *reps, *second, *cap_override)
        }
        Command::Fit { csv } => cmd_fit(csv.as_ref()),
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    process::exit(code as i32);
}
