//! Command-line front end. [`run`] parses arguments, dispatches, and maps
//! errors to exit codes: 0 on success, 1 for bad input or usage, 2 when a
//! resource budget is exhausted. Results go to `out`, diagnostics to `err`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{basis, BasisKey, Ideal};
use crate::cache::Cache;
use crate::coverage::{all_certificates, certify_dimension, final_remark_instance, mori_check, MoriParams};
use crate::differential::{d, SignConvention};
use crate::error::{LambdaError, Result};
use crate::fparith::PrimeContext;
use crate::homology::{default_length_cap, e2_page, render_chart, to_csv, E2Request};
use crate::hopf::{chain_map_failures, lemma_verdict, proposition_check, ses_dimension_check};
use crate::rewrite::{Lambda, DEFAULT_TERM_BUDGET};

#[derive(Debug, Parser)]
#[command(name = "lambda", version, about = "Mod-p lambda algebra computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Directory for cached E² cells (overrides LAMBDA_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Maximum number of terms produced while straightening one expression.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET)]
    pub term_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct PrimeArg {
    /// An odd prime.
    #[arg(long, allow_negative_numbers = true)]
    pub p: i64,
}

impl PrimeArg {
    fn ctx(&self) -> Result<PrimeContext> {
        let p = u32::try_from(self.p).map_err(|_| LambdaError::InvalidPrime(self.p))?;
        PrimeContext::new(p)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the admissible basis of Λ(n) or Λλ(n) in bidegree (m, l).
    Basis {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value = "full")]
        ideal: Ideal,
    },
    /// Straighten an expression such as "2 m0 l2 - l1 m1" into admissible form.
    Reduce {
        #[command(flatten)]
        prime: PrimeArg,
        expr: String,
    },
    /// Apply the differential to an expression.
    Diff {
        #[command(flatten)]
        prime: PrimeArg,
        expr: String,
    },
    /// E² page of Λ(n) (or Λλ(n), the default) up to a degree.
    E2 {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max_deg: u32,
        #[arg(long)]
        max_len: Option<u32>,
        #[arg(long, default_value = "lambda")]
        ideal: Ideal,
        /// Also list cells with no basis elements.
        #[arg(long)]
        include_empty: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// The u/v span matrix for a given k, with its determinant.
    Lemma2 {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long)]
        k: u32,
    },
    /// Short-exact-sequence dimension count and chain-map check for h_p.
    HopfCheck {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long)]
        max_deg: u32,
        #[arg(long)]
        max_len: Option<u32>,
    },
    /// Whether α = μ1^{k-3} λ1 is hit by h_p from a cycle, modulo boundaries.
    PropCheck {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long)]
        k: u32,
    },
    /// Certificates that π_n(S²) is nonzero, as JSON lines.
    Certify {
        #[arg(long)]
        n: u64,
        /// Certify every dimension from n to this value.
        #[arg(long)]
        to: Option<u64>,
        /// List every certificate rather than the default one.
        #[arg(long)]
        all: bool,
        /// Largest prime considered with --all.
        #[arg(long, default_value_t = 1000)]
        max_prime: u32,
    },
    /// Inequality conditions for a nonzero composition of α-family elements.
    Mori {
        #[command(flatten)]
        prime: PrimeArg,
        #[arg(long, required_unless_present = "final_remark")]
        f: Option<u32>,
        #[arg(long, required_unless_present = "final_remark")]
        g: Option<u32>,
        #[arg(long, required_unless_present = "final_remark")]
        i: Option<u64>,
        #[arg(long, required_unless_present = "final_remark")]
        j: Option<u64>,
        /// Sphere parameter to test against the bounds.
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        /// Use the parameters g = 0, f = p-2, i = p²k-1, j = p^{p-2}.
        #[arg(long, requires = "k")]
        final_remark: bool,
        #[arg(long)]
        k: Option<u64>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_resource() {
                2
            } else {
                1
            }
        }
    }
}

fn io(e: std::io::Error) -> LambdaError {
    LambdaError::Domain(format!("write failed: {e}"))
}

fn json_line<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string(v).map_err(|e| LambdaError::Domain(e.to_string()))?;
    writeln!(out, "{s}").map_err(io)
}

fn no_csv(cli: &Cli, what: &str) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(LambdaError::Domain(format!("{what} has no CSV output")));
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let lambda_for = |prime: &PrimeArg| -> Result<Lambda> { Ok(Lambda::with_budget(prime.ctx()?, cli.term_budget)) };
    match &cli.command {
        Command::Basis { prime, n, m, l, ideal } => {
            let ctx = prime.ctx()?;
            let words = basis(&BasisKey::new(ctx, *n, *m, *l, *ideal)?);
            match cli.format {
                Format::Json => {
                    let v: Vec<String> = words.iter().map(ToString::to_string).collect();
                    json_line(out, &v)?;
                }
                Format::Text | Format::Csv => {
                    for w in words {
                        writeln!(out, "{w}").map_err(io)?;
                    }
                }
            }
        }
        Command::Reduce { prime, expr } | Command::Diff { prime, expr } => {
            no_csv(cli, "this command")?;
            let lambda = lambda_for(prime)?;
            let mut x = lambda.parse(expr)?;
            if matches!(cli.command, Command::Diff { .. }) {
                x = d(&lambda, &x, SignConvention::SELECTED)?;
            }
            match cli.format {
                Format::Json => json_line(out, &x.to_json())?,
                _ => writeln!(out, "{x}").map_err(io)?,
            }
        }
        Command::E2 { prime, n, max_deg, max_len, ideal, include_empty, jobs } => {
            let lambda = lambda_for(prime)?;
            let req = E2Request {
                n: *n,
                max_degree: *max_deg,
                max_len: max_len.unwrap_or_else(|| default_length_cap(lambda.ctx(), *ideal, *max_deg)),
                ideal: *ideal,
                include_empty: *include_empty,
                jobs: (*jobs).max(1),
            };
            let cache = Cache::from_flag_or_env(cli.cache_dir.as_deref());
            let cells = e2_page(&lambda, &req, cache.as_ref())?;
            let text = match cli.format {
                Format::Text => render_chart(&cells),
                Format::Csv => to_csv(&cells),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&cells).map_err(|e| LambdaError::Domain(e.to_string()))?;
                    s.push('\n');
                    s
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Lemma2 { prime, k } => {
            no_csv(cli, "lemma2")?;
            let v = lemma_verdict(&lambda_for(prime)?, *k)?;
            #[derive(Serialize)]
            struct Lemma2Out<'a> {
                k: u32,
                p: u32,
                matrix: &'a [Vec<i64>],
                det: u32,
                det_formula: u32,
                is_isomorphism: bool,
            }
            json_line(
                out,
                &Lemma2Out { k: v.k, p: v.p, matrix: &v.matrix, det: v.det, det_formula: v.det_formula, is_isomorphism: v.is_isomorphism },
            )?;
        }
        Command::HopfCheck { prime, max_deg, max_len } => {
            no_csv(cli, "hopf-check")?;
            let lambda = lambda_for(prime)?;
            let max_len = max_len.unwrap_or_else(|| crate::algebra::default_length_cap(*max_deg));
            let ses = ses_dimension_check(lambda.ctx(), *max_deg, max_len)?;
            let (checked, bad) = chain_map_failures(&lambda, *max_deg, max_len, SignConvention::SELECTED)?;
            #[derive(Serialize)]
            struct HopfOut {
                p: u32,
                max_degree: u32,
                max_len: u32,
                ses_cells_checked: usize,
                ses_failures: usize,
                chain_map_words_checked: usize,
                chain_map_failures: Vec<String>,
                ok: bool,
            }
            let report = HopfOut {
                p: lambda.ctx().p(),
                max_degree: *max_deg,
                max_len,
                ses_cells_checked: ses.cells_checked,
                ses_failures: ses.failures.len(),
                chain_map_words_checked: checked,
                ok: ses.failures.is_empty() && bad.is_empty(),
                chain_map_failures: bad.iter().map(ToString::to_string).collect(),
            };
            match cli.format {
                Format::Json => json_line(out, &report)?,
                _ => {
                    writeln!(
                        out,
                        "ses: {} cells, {} failures\nchain map: {} words, {} failures\n{}",
                        report.ses_cells_checked,
                        report.ses_failures,
                        report.chain_map_words_checked,
                        report.chain_map_failures.len(),
                        if report.ok { "ok" } else { "FAILED" }
                    )
                    .map_err(io)?;
                    for w in report.chain_map_failures.iter().take(20) {
                        writeln!(out, "  {w}").map_err(io)?;
                    }
                }
            }
        }
        Command::PropCheck { prime, k } => {
            no_csv(cli, "prop-check")?;
            let r = proposition_check(&lambda_for(prime)?, *k)?;
            match cli.format {
                Format::Json => json_line(out, &r)?,
                _ => writeln!(
                    out,
                    "k={} p={} bidegree=({}, {}) dim_e1={} cycles={} target_nonzero={} verdict={}",
                    r.k,
                    r.p,
                    r.m,
                    r.l,
                    r.dim_e1,
                    r.dim_cycles,
                    r.target_nonzero.map_or("n/a".to_string(), |b| b.to_string()),
                    r.verdict
                )
                .map_err(io)?,
            }
        }
        Command::Certify { n, to, all, max_prime } => {
            no_csv(cli, "certify")?;
            let end = to.unwrap_or(*n);
            if end < *n {
                return Err(LambdaError::Domain(format!("--to {end} is below --n {n}")));
            }
            let mut buf = std::io::BufWriter::new(out);
            for m in *n..=end {
                let certs = if *all { all_certificates(m, *max_prime)? } else { vec![certify_dimension(m)?] };
                for c in certs {
                    json_line(&mut buf, &c)?;
                }
            }
            buf.flush().map_err(io)?;
        }
        Command::Mori { prime, f, g, i, j, n, final_remark, k } => {
            no_csv(cli, "mori")?;
            let ctx = prime.ctx()?;
            if *final_remark {
                let r = final_remark_instance(ctx.p(), k.unwrap_or(1))?;
                json_line(out, &r)?;
            } else {
                let (Some(f), Some(g), Some(i), Some(j)) = (f, g, i, j) else {
                    return Err(LambdaError::Domain("--f, --g, --i and --j are required".into()));
                };
                let params = MoriParams::new(ctx.p(), *f, *g, *i, *j)?;
                #[derive(Serialize)]
                struct MoriOut {
                    params: MoriParams,
                    bounds: crate::coverage::MoriBounds,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    n: Option<i64>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    holds: Option<bool>,
                }
                let holds = match n {
                    Some(n) => Some(mori_check(&params, *n as i128)?),
                    None => None,
                };
                json_line(out, &MoriOut { params, bounds: params.bounds()?, n: *n, holds })?;
            }
        }
    }
    Ok(())
}
