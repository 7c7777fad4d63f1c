mod args;
mod output;

use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

use adaptive_alpha::alpha::{
    adaptive_alpha_for, anova_adaptive_alpha, bic_adaptive_alpha, bic_adaptive_alpha_anchored,
};
use adaptive_alpha::dataset::{parse_dataset_bytes, parse_dataset_csv, Dataset};
use adaptive_alpha::decision::{rescaled_log_b, run_regression_test};
use adaptive_alpha::linmod::DesignPoint;
use adaptive_alpha::simlab::{
    null_law_mc_check, reproduce_table, table3_experiment, Table3Config, TableId, TableOptions,
};
use adaptive_alpha::Error;
use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};
use output::SimRow;

/// Why a run failed: bad invocation (exit 1) or failed computation (exit 2).
enum Failure {
    Usage(Error),
    Compute(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Compute(_) => 2,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Usage(e) | Failure::Compute(e) => e,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let json_errors = output_args(&cli.command).format == Format::Json;
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let e = f.error();
            if json_errors {
                let body =
                    serde_json::json!({ "error": { "code": e.code(), "message": e.to_string() } });
                eprintln!("{body}");
            } else {
                eprintln!("error[{}]: {e}", e.code());
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Alpha(a) => &a.output,
        Command::AnovaAlpha(a) => &a.output,
        Command::BicAlpha(a) => &a.output,
        Command::Test(a) => &a.output,
        Command::SimulateTable3(a) => &a.output,
        Command::Tables(a) => &a.output,
        Command::McCheck(a) => &a.output,
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(())
}

fn missing(flag: &str, why: &str) -> Failure {
    usage(Error::MissingInput(format!("{flag} is required {why}")))
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Alpha(a) => {
            let strategy = a.strategy.strategy().map_err(usage)?;
            let result = if a.anova {
                let k = a.k.ok_or_else(|| missing("-k", "with --anova"))?;
                let r = a.r.ok_or_else(|| missing("-r", "with --anova"))?;
                anova_adaptive_alpha(k, r, &strategy)?
            } else {
                let n = a.n.ok_or_else(|| missing("-n", "without --anova"))?;
                let j = a.j.ok_or_else(|| missing("-j", "without --anova"))?;
                let q = a.q.ok_or_else(|| missing("-q", "without --anova"))?;
                let log_b = match (a.log_b, a.b) {
                    (Some(l), _) => l,
                    (None, Some(b)) if b > 0.0 => b.ln(),
                    (None, Some(b)) => {
                        return Err(usage(Error::Domain(format!(
                            "--b must be positive, got {b}"
                        ))))
                    }
                    (None, None) => return Err(missing("--log-b or --b", "without --anova")),
                };
                if q > j {
                    return Err(usage(Error::Domain(format!(
                        "q = {q} cannot exceed j = {j}"
                    ))));
                }
                let point = DesignPoint { n, j, q, log_b };
                adaptive_alpha_for(&point, &strategy, &|n0| rescaled_log_b(log_b, n, q, n0))?
            };
            emit(&a.output, &output::alpha(&result, a.output.format))
        }
        Command::AnovaAlpha(a) => {
            let strategy = a.strategy.strategy().map_err(usage)?;
            let result = anova_adaptive_alpha(a.k, a.r, &strategy)?;
            emit(&a.output, &output::alpha(&result, a.output.format))
        }
        Command::BicAlpha(a) => {
            let mut result = bic_adaptive_alpha(a.n, a.q, a.alpha0)?;
            if let Some(n0) = a.anchor_n {
                let anchored = bic_adaptive_alpha_anchored(a.n, a.q, a.alpha0, n0)?;
                result.c_alpha *= anchored / result.alpha_adaptive;
                result.alpha_adaptive = anchored;
                result.alpha_display = anchored.clamp(0.0, 1.0);
                result.strategy.name = "bic_anchored".into();
                result.strategy.anchor_n = Some(n0);
            }
            emit(&a.output, &output::alpha(&result, a.output.format))
        }
        Command::Test(a) => {
            let strategy = a.strategy.strategy().map_err(usage)?;
            let data = load(a.csv.as_deref(), a.fetch_url.as_deref())?;
            let null: Vec<&str> = a
                .null
                .iter()
                .map(String::as_str)
                .filter(|s| !s.is_empty())
                .collect();
            let alt: Vec<&str> = a
                .alt
                .iter()
                .map(String::as_str)
                .filter(|s| !s.is_empty())
                .collect();
            let report = run_regression_test(&data, &a.response, &null, &alt, &strategy)?;
            emit(&a.output, &output::regression(&report, a.output.format))
        }
        Command::SimulateTable3(a) => {
            let mut configs = Vec::new();
            for &r in &a.r {
                configs.push(Table3Config {
                    r,
                    k: a.k,
                    f: a.f,
                    sigma: a.sigma,
                    p_window: (a.window_lo, a.window_hi),
                    outer_reps: a.outer_reps,
                    seed: a.seed,
                    adjustment: a.adjustment(),
                    count_rule: a.count_rule(),
                    p_value: a.p_value(),
                });
            }
            let results = configs
                .iter()
                .map(|c| table3_experiment(c, a.workers))
                .collect::<Result<Vec<_>, _>>()?;
            let rows: Vec<SimRow<'_>> = configs
                .iter()
                .zip(&results)
                .map(|(config, result)| SimRow { config, result })
                .collect();
            emit(&a.output, &output::simulation(&rows, a.output.format))
        }
        Command::Tables(a) => {
            let ids = match &a.table {
                Some(t) => vec![t.parse::<TableId>().map_err(usage)?],
                None => vec![TableId::T1, TableId::T2, TableId::T5, TableId::T6],
            };
            let options = TableOptions {
                alpha0: Some(a.alpha0),
                pbic_xi: a.pbic_xi,
                pbic_d: a.pbic_d,
            };
            let tables = ids
                .into_iter()
                .map(|id| reproduce_table(id, &options))
                .collect::<Result<Vec<_>, _>>()?;
            emit(&a.output, &output::tables(&tables, a.output.format))
        }
        Command::McCheck(a) => {
            let check = null_law_mc_check(a.n, a.j, a.q, a.draws, a.seed, a.workers)?;
            emit(&a.output, &output::mc(&check, a.output.format))
        }
    }
}

fn load(csv: Option<&Path>, url: Option<&str>) -> Result<Dataset, Failure> {
    match (csv, url) {
        (Some(path), _) => Ok(parse_dataset_csv(path)?),
        (None, Some(url)) => {
            let origin = Path::new(url);
            let io = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                message,
            };
            let mut body = Vec::new();
            ureq::get(url)
                .call()
                .map_err(|e| io(format!("download failed: {e}")))?
                .into_body()
                .into_reader()
                .read_to_end(&mut body)
                .map_err(|e| io(format!("download failed: {e}")))?;
            Ok(parse_dataset_bytes(&body, origin)?)
        }
        (None, None) => Err(missing("--csv or --fetch-url", "for `test`")),
    }
}
