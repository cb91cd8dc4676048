use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use liniso::corpus::{self, GeneratorSpec, Side};
use liniso::f2::MatrixF2;
use liniso::fourier::{self, BooleanFunction};
use liniso::lp::approx_spectral_norm;
use liniso::protocol::{self, DistanceMode, ProtocolParams};
use liniso::query::{self, QueryOracle, SieveMode, TesterParams, TesterVerdict};
use liniso::sampler;
use liniso::{Error, Rational, Result};

#[derive(Parser)]
#[command(
    name = "liniso",
    version,
    about = "Tolerant linear-isomorphism testing of Boolean functions"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Append one `key=value` record per run to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Parity,
    And,
    Majority,
    Random,
    Ball,
    BallFamily,
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a function and print it in the file format.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short, long)]
        n: usize,
        /// Character for `parity` or center for `ball` (decimal, 0x.., 0b..).
        #[arg(long, value_parser = parse_vector, default_value = "0")]
        set: u32,
        /// Matrix file for `ball-family` (n lines of 0/1, bit j of row i).
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Exact Fourier coefficients.
    Spectrum {
        #[arg(long)]
        f: PathBuf,
        /// Include zero coefficients.
        #[arg(long)]
        all: bool,
    },
    /// Exact spectral norm.
    Norm {
        #[arg(long)]
        f: PathBuf,
    },
    /// Approximate spectral norm with an optimal witness.
    ApproxNorm {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha: f64,
    },
    /// Exact linear distance by search over GL_n.
    LinDist {
        #[command(flatten)]
        pair: Pair,
    },
    /// Exact affine distance.
    AffineDist {
        #[command(flatten)]
        pair: Pair,
    },
    /// Sparse sign representation close to a function.
    SignApprox {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Run the two-party protocol and print its transcript.
    CommTest {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        affine: bool,
    },
    /// One-shot linear distance estimate through the protocol.
    CommEstimate {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        eps: f64,
    },
    /// Run the query tester for several seeded trials.
    QueryTest {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        alpha: f64,
        /// Norm bound; defaults to the LP value of g at alpha.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Use the full-spectrum sieve instead of the sampling one.
        #[arg(long)]
        exact_sieve: bool,
    },
    /// Build a certified promise corpus into a directory.
    Corpus {
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        omega: f64,
        /// Pairs per side.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long)]
        dir: PathBuf,
    },
}

fn parse_vector(s: &str) -> std::result::Result<u32, String> {
    let parsed = if let Some(h) = s.strip_prefix("0x") {
        u32::from_str_radix(h, 16)
    } else if let Some(b) = s.strip_prefix("0b") {
        u32::from_str_radix(b, 2)
    } else {
        s.parse()
    };
    parsed.map_err(|e| e.to_string())
}

fn ratio(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn read(path: &Path) -> Result<BooleanFunction> {
    corpus::read_function_file(path)
}

fn read_pair(pair: &Pair) -> Result<(BooleanFunction, BooleanFunction)> {
    Ok((read(&pair.f)?, read(&pair.g)?))
}

type Record = Vec<(&'static str, String)>;

fn run(cli: &Cli) -> Result<(String, Vec<Record>)> {
    let mut out = String::new();
    let mut records = Vec::new();
    match &cli.command {
        Command::Gen {
            kind,
            n,
            set,
            matrix,
        } => {
            let spec = match kind {
                Kind::Parity => GeneratorSpec::Parity(*set),
                Kind::And => GeneratorSpec::And,
                Kind::Majority => GeneratorSpec::Majority,
                Kind::Random => GeneratorSpec::Random(cli.seed),
                Kind::Ball => GeneratorSpec::Ball(*set),
                Kind::BallFamily => {
                    let path = matrix.as_ref().ok_or_else(|| {
                        Error::InvalidParameter("ball-family needs --matrix".into())
                    })?;
                    GeneratorSpec::BallFamily(MatrixF2::parse(&std::fs::read_to_string(path)?)?)
                }
            };
            out = corpus::format_function(&spec.generate(*n)?);
        }
        Command::Spectrum { f, all } => {
            let f = read(f)?;
            let s = fourier::wht(&f);
            for (i, &c) in s.coeffs().iter().enumerate() {
                if c != 0 || *all {
                    out.push_str(&format!("{i:x}: {}\n", ratio(s.coefficient(i as u32))));
                }
            }
        }
        Command::Norm { f } => {
            let norm = fourier::spectral_norm(&fourier::wht(&read(f)?));
            out = format!("{}\n", ratio(norm));
            records.push(vec![("command", "norm".into()), ("norm", ratio(norm))]);
        }
        Command::ApproxNorm { f, alpha } => {
            let res = approx_spectral_norm(&read(f)?, *alpha)?;
            out.push_str(&format!(
                "norm {:.9}\nceiling {}\n",
                res.value,
                res.ceiling()
            ));
            for (s, c) in res.witness.coeffs() {
                out.push_str(&format!("{s:x}: {c:.9}\n"));
            }
            records.push(vec![
                ("command", "approx-norm".into()),
                ("alpha", alpha.to_string()),
                ("norm", format!("{:.9}", res.value)),
            ]);
        }
        Command::LinDist { pair } => {
            let (f, g) = read_pair(pair)?;
            let m = fourier::linear_distance(&f, &g)?;
            out = format!("distance {}\nmatrix\n{}", ratio(m.distance), m.matrix);
            records.push(vec![
                ("command", "lin-dist".into()),
                ("distance", ratio(m.distance)),
            ]);
        }
        Command::AffineDist { pair } => {
            let (f, g) = read_pair(pair)?;
            let m = fourier::affine_distance(&f, &g)?;
            out = format!(
                "distance {}\nshift {:x}\nmatrix\n{}",
                ratio(m.distance),
                m.shift.bits(),
                m.matrix
            );
            records.push(vec![
                ("command", "affine-dist".into()),
                ("distance", ratio(m.distance)),
            ]);
        }
        Command::SignApprox { f, alpha, delta } => {
            let f = read(f)?;
            let rep = sampler::find_close_sign_function(&f, *alpha, *delta, cli.seed)?;
            out.push_str(&format!(
                "samples {}\nattempts {}\ndistance {}\n",
                rep.parities.len(),
                rep.attempts,
                ratio(rep.distance)
            ));
            for (s, w) in rep.parities.merged() {
                out.push_str(&format!("{s:x}: {w}\n"));
            }
            out.push_str(&corpus::format_function(&rep.function));
            records.push(vec![
                ("command", "sign-approx".into()),
                ("samples", rep.parities.len().to_string()),
                ("attempts", rep.attempts.to_string()),
                ("distance", ratio(rep.distance)),
            ]);
        }
        Command::CommTest {
            pair,
            eps,
            omega,
            affine,
        } => {
            let (f, g) = read_pair(pair)?;
            let mode = if *affine {
                DistanceMode::Affine
            } else {
                DistanceMode::Linear
            };
            let params = ProtocolParams::new(*eps, *omega, mode)?;
            let t = protocol::run_protocol(&f, &g, &params, cli.seed)?;
            out = t.serialize();
            records.push(vec![
                ("command", "comm-test".into()),
                ("verdict", format!("{:?}", t.verdict.expect("decision run"))),
                ("distance", ratio(t.distance)),
                ("total_bits", t.total_bits.to_string()),
                ("t", format!("{:.9}", t.t)),
            ]);
        }
        Command::CommEstimate { pair, eps } => {
            let (f, g) = read_pair(pair)?;
            let (delta, t) = protocol::estimate_linear_distance(&f, &g, *eps, cli.seed)?;
            out = t.serialize();
            records.push(vec![
                ("command", "comm-estimate".into()),
                ("estimate", ratio(delta)),
                ("total_bits", t.total_bits.to_string()),
            ]);
        }
        Command::QueryTest {
            pair,
            eps,
            omega,
            alpha,
            t,
            trials,
            exact_sieve,
        } => {
            let (f, g) = read_pair(pair)?;
            let t = match t {
                Some(t) => *t,
                None => approx_spectral_norm(&g, *alpha)?.value,
            };
            let exact = fourier::linear_distance(&f, &g)?.distance;
            let d = *exact.numer() as f64 / *exact.denom() as f64;
            let expected = if d <= eps + 1e-12 {
                Some(TesterVerdict::Accept)
            } else if d >= eps + omega - 1e-12 {
                Some(TesterVerdict::Reject)
            } else {
                None
            };
            out.push_str(&format!("linear distance {}\n", ratio(exact)));
            out.push_str("trial  verdict          queries   max_corr\n");
            let mut wrong = 0;
            for trial in 0..*trials {
                let mut params =
                    TesterParams::new(*eps, *omega, *alpha, t, cli.seed.wrapping_add(trial))?;
                if *exact_sieve {
                    params.sieve = SieveMode::Exact;
                }
                let mut oracle = QueryOracle::new(f.clone());
                let rep = query::run_query_tester(&mut oracle, &g, &params)?;
                let corr = rep
                    .max_correlation
                    .map_or("-".into(), |c| format!("{c:.6}"));
                out.push_str(&format!(
                    "{trial:<6} {:<16} {:<9} {corr}\n",
                    format!("{:?}", rep.verdict),
                    rep.queries
                ));
                if expected.is_some_and(|e| e != rep.verdict) {
                    wrong += 1;
                }
                records.push(vec![
                    ("command", "query-test".into()),
                    ("trial", trial.to_string()),
                    ("verdict", format!("{:?}", rep.verdict)),
                    ("queries", rep.queries.to_string()),
                    ("m", rep.m.to_string()),
                    ("k", rep.k.to_string()),
                ]);
            }
            match expected {
                Some(_) => out.push_str(&format!(
                    "error rate {wrong}/{trials} = {:.4}\n",
                    wrong as f64 / (*trials).max(1) as f64
                )),
                None => out.push_str("error rate n/a (pair outside the promise)\n"),
            }
        }
        Command::Corpus {
            n,
            eps,
            omega,
            pairs,
            dir,
        } => {
            let corpus = corpus::build_promise_corpus(*n, *eps, *omega, *pairs, cli.seed)?;
            std::fs::create_dir_all(dir)?;
            out.push_str("pair side  distance\n");
            for (i, p) in corpus.iter().enumerate() {
                corpus::write_function_file(&p.f, dir.join(format!("f{i:03}.txt")))?;
                corpus::write_function_file(&p.g, dir.join(format!("g{i:03}.txt")))?;
                let side = match p.side {
                    Side::Close => "close",
                    Side::Far => "far",
                };
                out.push_str(&format!(
                    "{i:<4} {side:<5} {}\n",
                    ratio(p.certified_distance)
                ));
                records.push(vec![
                    ("command", "corpus".into()),
                    ("pair", i.to_string()),
                    ("side", side.into()),
                    ("distance", ratio(p.certified_distance)),
                    ("draws", p.draws.to_string()),
                ]);
            }
        }
    }
    Ok((out, records))
}

fn emit(cli: &Cli, out: &str, records: &[Record]) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    if let Some(path) = &cli.report {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        for rec in records {
            let line: Vec<String> = std::iter::once(("seed", cli.seed.to_string()))
                .chain(rec.iter().cloned())
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            writeln!(file, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|(out, records)| emit(&cli, &out, &records)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
