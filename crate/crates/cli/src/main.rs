use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use corrdyn::numerics::build_nk;
use corrdyn::spectral::dynamics::lambda_growth;
use corrdyn::spectral::{default_tol, spectral_report};
use corrdyn::{Rat, Verdict};
use corrdyn_cli::config::{parse_config, VarietyConfig};
use corrdyn_cli::report::{Format, Report};
use corrdyn_cli::suite::{run_suite, SuiteParams};

#[derive(Parser)]
#[command(
    name = "corrdyn",
    version,
    about = "Exact cohomological dynamics of correspondences on products of elliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize the variety, its endomorphisms and correspondences.
    Describe { config: PathBuf },
    /// Degree sequence of a correspondence and the growth of `deg_k` under iteration.
    Degrees {
        config: PathBuf,
        /// A configured name or an expression.
        corr: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 40)]
        m_max: usize,
    },
    /// Characteristic and minimal polynomials and certified spectral radii on every degree.
    Spectra {
        config: PathBuf,
        corr: String,
        /// Absolute tolerance on root moduli, as a rational such as 1/1000000000.
        #[arg(long)]
        tol: Option<String>,
    },
    /// Run a stress suite and print one line per record.
    Check {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a stress suite and write the report.
    Report {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    entry_bound: i64,
    #[arg(long, default_value_t = 2)]
    word_len: usize,
    #[arg(long, default_value_t = 2)]
    max_terms: usize,
    /// Comma-separated positive rationals.
    #[arg(long, default_value = "1,2,1/2")]
    coeff_set: String,
    #[arg(long, default_value_t = 40)]
    m_max: usize,
    /// Record zero runtimes so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

/// Failure that maps to an exit status.
enum Failure {
    Input(String),
    Precision(String),
}

impl From<corrdyn::Error> for Failure {
    fn from(e: corrdyn::Error) -> Self {
        match e {
            corrdyn::Error::Precision { .. } => Failure::Precision(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn parse_rat(s: &str) -> Result<Rat, Failure> {
    s.trim().parse::<Rat>().map_err(|_| Failure::Input(format!("'{s}' is not a rational number")))
}

impl RunArgs {
    fn params(&self) -> Result<SuiteParams, Failure> {
        let coeff_set = self.coeff_set.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteParams {
            samples: self.samples,
            entry_bound: self.entry_bound,
            word_len: self.word_len,
            max_terms: self.max_terms,
            coeff_set,
            m_max: self.m_max,
            timing: !self.no_timing,
            ..SuiteParams::default()
        })
    }
}

fn load(path: &Path) -> Result<VarietyConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Input(format!("{}:\n{e}", path.display())))
}

fn resolve(cfg: &VarietyConfig, corr: &str) -> Result<corrdyn::Correspondence, Failure> {
    match cfg.correspondence(corr) {
        Some(c) => Ok(c.clone()),
        None => cfg.eval(corr).map_err(Failure::Input),
    }
}

fn describe(cfg: &VarietyConfig) -> Result<(), Failure> {
    let x = &cfg.variety;
    let model = x.model();
    println!("dimension {}", x.n());
    for f in x.factors() {
        println!("  factor {} ^ {}  order {:?}", f.curve_id, f.multiplicity, f.order);
    }
    let betti: Vec<String> = (0..=model.rank()).map(|i| model.dim(i).to_string()).collect();
    println!("betti numbers {}", betti.join(" "));
    let nk: Vec<String> =
        (0..=x.n()).map(|k| build_nk(x, k).map(|l| l.dimension.to_string())).collect::<Result<_, _>>()?;
    println!("rank N^k {}", nk.join(" "));
    println!("rank End {}", x.endomorphism_rank());
    for (name, f) in &cfg.endomorphisms {
        let polarized = f.is_polarized(x).map_or("no".to_string(), |q| format!("q = {q}"));
        println!("endomorphism {name} = {f}  degree {}  polarized {polarized}", f.isogeny_degree(x));
    }
    for (name, c) in &cfg.correspondences {
        println!("correspondence {name} = {}  degrees {}", cfg.expressions[name], c.degree_sequence(x));
    }
    Ok(())
}

fn degrees(cfg: &VarietyConfig, corr: &str, k: Option<usize>, m_max: usize) -> Result<(), Failure> {
    let x = &cfg.variety;
    let c = resolve(cfg, corr)?;
    println!("degrees {}", c.degree_sequence(x));
    println!("total {}", c.total_degree(x));
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (0..=x.n()).collect(),
    };
    for k in ks {
        let g = lambda_growth(x, &c, k, m_max, &default_tol())?;
        let coeffs: Vec<String> = g.recurrence.coeffs.iter().map(|c| c.to_string()).collect();
        println!(
            "k = {k}: growth {}  recurrence order {} [{}]",
            g.dominant_modulus,
            g.recurrence.order(),
            coeffs.join(", ")
        );
    }
    Ok(())
}

fn spectra(cfg: &VarietyConfig, corr: &str, tol: Option<&str>) -> Result<(), Failure> {
    let x = &cfg.variety;
    let c = resolve(cfg, corr)?;
    let tol = match tol {
        Some(t) => parse_rat(t)?,
        None => default_tol(),
    };
    let action = c.graded_action(x);
    for (i, m) in action.degrees.iter().enumerate() {
        let r = spectral_report(m, &tol, None)?;
        println!("H^{i}: radius {}  semisimple {}", r.radius, r.semisimple);
        println!("  char {}", r.char_poly);
        println!("  min  {}", r.min_poly);
    }
    Ok(())
}

fn run(cfg: &VarietyConfig, args: &RunArgs) -> Result<Report, Failure> {
    let params = args.params()?;
    run_suite(cfg, &args.suite, args.seed, &params).map_err(|e| Failure::Input(e.to_string()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn main_inner(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Describe { config } => describe(&load(&config)?).map(|_| 0),
        Command::Degrees { config, corr, k, m_max } => degrees(&load(&config)?, &corr, k, m_max).map(|_| 0),
        Command::Spectra { config, corr, tol } => spectra(&load(&config)?, &corr, tol.as_deref()).map(|_| 0),
        Command::Check { config, run: args, out } => {
            let report = run(&load(&config)?, &args)?;
            for r in &report.records {
                let k = r.k.map(|k| format!(" k={k}")).unwrap_or_default();
                let note = r.error.as_ref().map(|e| format!("  ({})", e.message)).unwrap_or_default();
                println!("{} #{}{}: {}{}", r.check_id, r.sample_id, k, r.verdict.as_str(), note);
            }
            let c = &report.summary.counts;
            println!(
                "{}: {} pass, {} fail, {} inconclusive, {} expected_fail",
                report.suite, c.pass, c.fail, c.inconclusive, c.expected_fail
            );
            for (name, sup) in &report.summary.ratio_suprema {
                println!("sup {name} = {}", corrdyn::interval::to_f64(sup));
            }
            if let Some(out) = out {
                write(&out, &report.emit(Format::Json))?;
            }
            Ok(report.exit_code())
        }
        Command::Report { config, run: args, format, out } => {
            let report = run(&load(&config)?, &args)?;
            write(&out, &report.emit(format))?;
            let worst = report.records.iter().map(|r| r.verdict).find(|v| *v == Verdict::Fail);
            if worst.is_some() {
                eprintln!("report contains failing records");
            }
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Precision(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
