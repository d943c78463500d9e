use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fedosov::io::{parse_chart, CheckResult, OutputDocument};
use fedosov::parse::parse_star_function;
use fedosov::render::{render_form, render_star, render_weyl, RenderedSeries};
use fedosov::verify::{CheckMode, Verifier};
use fedosov::{AbelianConnection, Chart, StarForm, StarFunction, TrivializationMap};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "fedosov",
    version,
    about = "Exact Fedosov quantization on a Darboux chart"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Chart file (JSON).
    #[arg(long, global = true)]
    chart: Option<PathBuf>,

    /// Working Fedosov degree, overriding the chart file.
    #[arg(long, global = true)]
    degree: Option<usize>,

    /// Highest power of h kept in star products, overriding the chart file.
    #[arg(long = "h-order", global = true)]
    h_order: Option<usize>,

    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long = "check-mode", global = true, value_enum, default_value_t = Mode::Fast)]
    check_mode: Mode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fast,
    Full,
}

impl Mode {
    fn check_mode(self) -> CheckMode {
        match self {
            Mode::Fast => CheckMode::Fast,
            Mode::Full => CheckMode::Full,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Fast => "fast",
            Mode::Full => "full",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the Abelian connection form r.
    RForm,
    /// Print f * g.
    Star { f: String, g: String },
    /// Print the trivialization Hamiltonian H(t).
    Hamiltonian,
    /// Apply T to Q(f), or T⁻¹ to Q₀(f) with --inverse.
    Trivialize {
        f: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Print the frame λ_i and check the frame lemma.
    Frame,
    /// Print d_* of a form and its wedges with other forms.
    ///
    /// Forms are written as `;`-separated components `i,j: expr` with 1-based
    /// indices; a bare expression is a 0-form.
    Exterior {
        form: String,
        /// A form to wedge on the right; may be repeated.
        #[arg(long)]
        wedge: Vec<String>,
    },
    /// Run the full invariant suite.
    Verify,
}

struct Report {
    query: String,
    sections: Vec<(String, RenderedSeries)>,
    checks: Vec<CheckResult>,
}

fn load_chart(cli: &Cli) -> Result<Chart> {
    let path = cli
        .chart
        .as_ref()
        .ok_or_else(|| anyhow!("--chart is required"))?;
    let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = parse_chart(&text)
        .with_context(|| format!("in {}", path.display()))?
        .with_overrides(cli.degree, cli.h_order);
    Ok(spec.to_chart()?)
}

fn parse_function(text: &str) -> Result<StarFunction> {
    parse_star_function(text).with_context(|| format!("in expression {text:?}"))
}

fn parse_form(text: &str, dim: usize) -> Result<StarForm> {
    let mut entries = Vec::new();
    let mut rank = None;
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (idx, expr) = match part.split_once(':') {
            Some((idx, expr)) => {
                let idx = idx
                    .split(',')
                    .map(|s| {
                        let i: usize = s
                            .trim()
                            .parse()
                            .with_context(|| format!("bad index {s:?}"))?;
                        if i == 0 || i > dim {
                            bail!("index {i} outside 1..={dim}");
                        }
                        Ok(i - 1)
                    })
                    .collect::<Result<Vec<_>>>()?;
                (idx, expr)
            }
            None => (Vec::new(), part),
        };
        match rank {
            None => rank = Some(idx.len()),
            Some(r) if r != idx.len() => bail!("components of different ranks in {text:?}"),
            _ => {}
        }
        entries.push((idx, parse_function(expr)?));
    }
    Ok(StarForm::from_components(dim, rank.unwrap_or(0), entries)?)
}

fn filtered(checks: Vec<CheckResult>, prefix: &[&str]) -> Vec<CheckResult> {
    checks
        .into_iter()
        .filter(|c| prefix.iter().any(|p| c.name.starts_with(p)))
        .collect()
}

fn run(cli: &Cli) -> Result<(Report, Chart)> {
    let chart = load_chart(cli)?;
    let verifier = Verifier::new(&chart, cli.check_mode.check_mode());
    let report = match &cli.command {
        Command::RForm => Report {
            query: "r-form".into(),
            sections: vec![("r".into(), render_weyl(verifier.connection().r()))],
            checks: filtered(verifier.abelian_checks(), &["r_"]),
        },
        Command::Star { f, g } => {
            let (pf, pg) = (parse_function(f)?, parse_function(g)?);
            let fg = verifier.connection().star_product(&pf, &pg)?;
            let mut checks = Vec::new();
            let expect = StarFunction::from_poly(&pf.coeff(0) * &pg.coeff(0));
            checks.push(if fg.truncate(0) == expect {
                CheckResult::pass("classical_limit")
            } else {
                CheckResult::fail(
                    "classical_limit",
                    render_star(&(&fg.truncate(0) - &expect)).text,
                )
            });
            Report {
                query: format!("star {f} {g}"),
                sections: vec![("f * g".into(), render_star(&fg))],
                checks,
            }
        }
        Command::Hamiltonian => Report {
            query: "hamiltonian".into(),
            sections: vec![(
                "H(t)".into(),
                render_weyl(&verifier.trivialization().hamiltonian()),
            )],
            checks: filtered(verifier.trivialization_checks(), &["hamiltonian_"]),
        },
        Command::Trivialize { f, inverse } => {
            let pf = parse_function(f)?;
            let conn = verifier.connection();
            let triv: &TrivializationMap = verifier.trivialization();
            let trivial = AbelianConnection::trivial(chart.dim(), chart.n_work(), chart.h_order())?;
            let (label, input, result, back) = if *inverse {
                let a0 = trivial.quantize(&pf);
                let out = triv.apply_t_inv(&a0)?;
                let back = triv.apply_t(&out)?;
                ("T⁻¹(Q₀ f)", a0, out, back)
            } else {
                let a = conn.quantize(&pf);
                let out = triv.apply_t(&a)?;
                let back = triv.apply_t_inv(&out)?;
                ("T(Q f)", a, out, back)
            };
            let residual = &back - &input;
            let check = if residual.is_zero() {
                CheckResult::pass("round_trip")
            } else {
                CheckResult::fail("round_trip", render_weyl(&residual).text)
            };
            let central = fedosov::abelian::central_function(&result, chart.h_order());
            Report {
                query: format!("trivialize{} {f}", if *inverse { " --inverse" } else { "" }),
                sections: vec![
                    (label.into(), render_weyl(&result)),
                    ("central part".into(), render_star(&central)),
                ],
                checks: vec![check],
            }
        }
        Command::Frame => {
            let frame = verifier.frame().map_err(|e| anyhow!(e))?;
            let sections = frame
                .lambdas()
                .iter()
                .enumerate()
                .map(|(i, l)| (format!("lambda{}", i + 1), render_star(l)))
                .collect();
            Report {
                query: "frame".into(),
                sections,
                checks: filtered(verifier.calculus_checks(), &["frame_lemma", "lambda_"]),
            }
        }
        Command::Exterior { form, wedge } => {
            let frame = verifier.frame().map_err(|e| anyhow!(e))?;
            let eta = parse_form(form, chart.dim())?;
            let d_eta = frame.d_star(&eta);
            let mut sections = vec![("d_* eta".to_string(), render_form(&d_eta))];
            for w in wedge {
                let xi = parse_form(w, chart.dim())?;
                sections.push((
                    format!("eta ∧_* ({w})"),
                    render_form(&frame.wedge_star(&eta, &xi)),
                ));
            }
            let dd = frame.d_star(&d_eta);
            let check = if dd.is_zero() {
                CheckResult::pass("d_star_squared")
            } else {
                CheckResult::fail("d_star_squared", render_form(&dd).text)
            };
            Report {
                query: format!("exterior {form}"),
                sections,
                checks: vec![check],
            }
        }
        Command::Verify => Report {
            query: "verify".into(),
            sections: Vec::new(),
            checks: verifier.run_all(),
        },
    };
    Ok((report, chart))
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for (label, series) in &report.sections {
        out.push_str(&format!("{label} = {}\n", series.text));
    }
    for c in &report.checks {
        if c.passed {
            out.push_str(&format!("PASS {}\n", c.name));
        } else {
            out.push_str(&format!("FAIL {}: {}\n", c.name, c.residual));
        }
    }
    if !report.checks.is_empty() {
        let passed = report.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{passed}/{} checks passed\n", report.checks.len()));
    }
    out
}

fn render_json(report: &Report, chart: &Chart, cli: &Cli) -> Result<String> {
    let mut parameters = BTreeMap::new();
    parameters.insert("dim".to_string(), json!(chart.dim()));
    parameters.insert("n_work".to_string(), json!(chart.n_work()));
    parameters.insert("h_order".to_string(), json!(chart.h_order()));
    parameters.insert("check_mode".to_string(), json!(cli.check_mode.name()));
    if let Some(p) = &cli.chart {
        parameters.insert("chart".to_string(), json!(p.display().to_string()));
    }
    let doc = OutputDocument {
        query: report.query.clone(),
        parameters,
        result_terms: report
            .sections
            .iter()
            .flat_map(|(_, s)| s.terms.iter().cloned())
            .collect(),
        checks: report.checks.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(report, chart)| {
        let text = match cli.format {
            Format::Text => render_text(&report),
            Format::Json => render_json(&report, &chart, &cli)?,
        };
        emit(&cli, &text)?;
        Ok(report.checks.iter().all(|c| c.passed))
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
