//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use adaptive_alpha::alpha::adaptive_alpha;
use adaptive_alpha::calibration::{
    c_alpha_pbic, c_alpha_simple, pbic_constant, tess, CalibrationStrategy, PbicInputs, TessDesign,
};
use adaptive_alpha::dataset::parse_dataset_csv;
use adaptive_alpha::decision::run_regression_test;
use adaptive_alpha::distcore::{
    asymptotic_upper_tail, gamma_quantile_upper, gamma_upper_tail, null_law, solve_replicates,
    GammaLaw, PowerDesign,
};
use adaptive_alpha::linmod::{
    harmonic, log_b_correlation, log_b_direct, lr_statistic, NestedPair, PredictorStats,
};
use adaptive_alpha::simlab::{
    null_law_mc_check, reproduce_table, table3_experiment, Adjustment, AlphaCell, Table,
    Table3Config, TableId, TableOptions,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Collects per-check failures so one line can summarise a criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, extra: &str) -> Outcome {
        if self.failures.is_empty() {
            Outcome::new(true, format!("{} checks{extra}", self.count))
        } else {
            Outcome::new(
                false,
                format!(
                    "{}/{} failed: {}{extra}",
                    self.failures.len(),
                    self.count,
                    self.failures.join("; ")
                ),
            )
        }
    }
}

/// One unit of the last printed digit of a decimal literal such as "0.057" or "3.6e-3".
fn print_unit(printed: &str) -> f64 {
    let (mantissa, exp) = match printed.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().expect("exponent")),
        None => (printed, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    10f64.powi(exp - decimals)
}

fn cell(table: &Table, values: &[usize], method: &str) -> f64 {
    match table.get(values, method) {
        Some(AlphaCell::Value(v)) => v,
        other => panic!("{method} {values:?}: {other:?}"),
    }
}

fn within_print_unit(checks: &mut Checks, label: String, computed: f64, printed: &str) {
    let target: f64 = printed.parse().expect("printed value");
    let unit = print_unit(printed);
    checks.check((computed - target).abs() <= unit * (1.0 + 1e-9), || {
        format!("{label}: {computed:.4e} vs {printed}")
    });
}

fn defaults() -> TableOptions {
    TableOptions {
        alpha0: Some(0.05),
        pbic_xi: None,
        pbic_d: None,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let t = reproduce_table(TableId::T5, &defaults()).unwrap();
    let elapsed = start.elapsed();
    let printed = [
        0.0149, 0.0100, 0.0079, 0.0070, 0.0059, 0.0040, 0.0011, 0.0003,
    ];
    let mut checks = Checks::default();
    for (n, p) in [10, 20, 30, 40, 50, 100, 1000, 10_000]
        .into_iter()
        .zip(printed)
    {
        let v = cell(&t, &[n], "bic");
        checks.check((v - p).abs() <= 5e-5, || format!("n={n}: {v:.6} vs {p}"));
    }
    checks.check(elapsed < Duration::from_secs(1), || {
        format!("runtime {elapsed:?}")
    });
    checks.finish(&format!(", {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let t = reproduce_table(TableId::T6, &defaults()).unwrap();
    let pairs = [
        (10, 10),
        (10, 100),
        (10, 500),
        (100, 10),
        (100, 100),
        (100, 500),
    ];
    let printed = [0.0099, 0.0038, 0.0016, 0.0038, 0.0027, 0.0015];
    let mut checks = Checks::default();
    for ((n1, n2), p) in pairs.into_iter().zip(printed) {
        let v = cell(&t, &[n1, n2], "bic");
        checks.check((v - p).abs() <= 5e-5, || {
            format!("({n1},{n2}): {v:.7} vs {p}")
        });
    }
    checks.finish("")
}

fn criterion_3() -> Outcome {
    let t = reproduce_table(TableId::T1, &defaults()).unwrap();
    let printed: [(usize, usize, [&str; 4]); 3] = [
        (2, 64, ["0.057", "0.038", "0.016", "0.011"]),
        (5, 40, ["0.0327", "0.0087", "0.0004", "0.0001"]),
        (10, 26, ["3.6e-3", "2.2e-4", "3.1e-7", "1.8e-8"]),
    ];
    let mut checks = Checks::default();
    for (k, r0, values) in printed {
        for (r, p) in [50, 100, 500, 1000].into_iter().zip(values) {
            let v = cell(&t, &[k, r, r0], "linear_model");
            within_print_unit(&mut checks, format!("k={k} r={r}"), v, p);
        }
    }
    checks.finish("")
}

fn criterion_4() -> Outcome {
    let t = reproduce_table(TableId::T2, &defaults()).unwrap();
    let minimal = ["0.0342", "0.0130", "0.0087", "0.0035", "0.0024"];
    let simple = ["0.0235", "0.0090", "0.0060", "0.0024", "0.0017"];
    let mut checks = Checks::default();
    for (i, r) in [10, 50, 100, 500, 1000].into_iter().enumerate() {
        within_print_unit(
            &mut checks,
            format!("minimal r={r}"),
            cell(&t, &[2, r], "minimal"),
            minimal[i],
        );
        within_print_unit(
            &mut checks,
            format!("simple r={r}"),
            cell(&t, &[2, r], "simple"),
            simple[i],
        );
    }
    checks.finish("")
}

fn random_design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    let mut x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    for c in 1..p {
        let (scale, shift) = (0.5 + 4.0 * rng.random::<f64>(), 5.0 * rng.random::<f64>());
        let mixed = x.column(c) + 0.5 * x.column(c - 1);
        x.set_column(c, &mixed.map(|v| shift + scale * v));
    }
    x.column_mut(0).fill(1.0);
    x
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_lr, mut worst_det) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.random_range(10..=100);
        let i = rng.random_range(2..=4);
        let j = i + rng.random_range(1..=3);
        let xj = random_design(&mut rng, n, j);
        let xi = xj.columns(0, i).into_owned();
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
            + &xj.column(j - 1) * 0.3;

        // (a) Gaussian log-likelihoods at the normal-equation MLEs
        let log_lik = |x: &DMatrix<f64>| -> f64 {
            let coef = (x.transpose() * x)
                .lu()
                .solve(&(x.transpose() * &y))
                .unwrap();
            let resid = &y - x * coef;
            let s2 = resid.norm_squared() / n as f64;
            resid
                .iter()
                .map(|e| -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - e * e / (2.0 * s2))
                .sum()
        };
        let pair = NestedPair::new(xi.clone(), xj.clone()).unwrap();
        let lr_direct = (log_lik(&xi) - log_lik(&xj)).exp();
        let lr_rss = lr_statistic(&pair, &y).unwrap().ratio.powf(n as f64 / 2.0);
        worst_lr = worst_lr.max((lr_direct / lr_rss - 1.0).abs());

        // (b) correlation factorization against the direct log-determinant
        let direct = log_b_direct(&pair).unwrap();
        let cols: Vec<Vec<f64>> = (1..j)
            .map(|c| xj.column(c).iter().copied().collect())
            .collect();
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let stats = PredictorStats::from_columns(&refs[..i - 1], &refs[i - 1..]).unwrap();
        let corr = log_b_correlation(&stats, j - i).unwrap();
        worst_det = worst_det.max((corr - direct).abs() / direct.abs().max(1.0));
    }
    Outcome::new(
        worst_lr <= 1e-10 && worst_det <= 1e-8,
        format!("200 designs, worst LR rel {worst_lr:.1e}, worst log-det rel {worst_det:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mc = null_law_mc_check(100, 2, 1, 100_000, 6, 0).unwrap();
    let elapsed = start.elapsed();
    Outcome::new(
        mc.ks_gamma < 0.01 && mc.ks_exact < 0.005 && elapsed < Duration::from_secs(30),
        format!(
            "KS gamma {:.5}, KS exact {:.5}, {elapsed:.2?}",
            mc.ks_gamma, mc.ks_exact
        ),
    )
}

fn relative_tail_error(law: &GammaLaw, alpha: f64) -> f64 {
    let g = gamma_quantile_upper(law, alpha).unwrap();
    let exact = gamma_upper_tail(law, g).unwrap();
    (asymptotic_upper_tail(law, g).unwrap() - exact).abs() / exact
}

fn criterion_7() -> Outcome {
    let mut checks = Checks::default();
    for n in [10usize, 100, 10_000] {
        let law = null_law(n, 3, 2).unwrap();
        for g in [0.1, 1.0, 5.99, 20.0, 50.0] {
            let (a, e) = (
                asymptotic_upper_tail(&law, g).unwrap(),
                gamma_upper_tail(&law, g).unwrap(),
            );
            checks.check(a == e, || format!("q=2 n={n} g={g}: {a:e} vs {e:e}"));
        }
    }
    let alphas = [0.05, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    for law in [
        GammaLaw::chi_squared(1).unwrap(),
        null_law(100, 2, 1).unwrap(),
    ] {
        let errors: Vec<f64> = alphas
            .iter()
            .map(|&a| relative_tail_error(&law, a))
            .collect();
        checks.check(errors[0] <= 0.25, || {
            format!("q=1 at 0.05: {:.3}", errors[0])
        });
        checks.check(errors[5] <= 0.05, || {
            format!("q=1 at 1e-6: {:.4}", errors[5])
        });
        checks.check(errors.windows(2).all(|w| w[1] < w[0]), || {
            format!("q=1 not improving: {errors:?}")
        });
    }
    let chi = GammaLaw::chi_squared(1).unwrap();
    let extra = format!(
        ", q=1 error {:.3} at 0.05 and {:.4} at 1e-6",
        relative_tail_error(&chi, 0.05),
        relative_tail_error(&chi, 1e-6)
    );
    checks.finish(&extra)
}

fn findley_pbic_alpha(n: usize, v: f64) -> f64 {
    let ts = tess(TessDesign::Findley { n }).unwrap();
    let d = ts.d.unwrap();
    let xi = v * d * (1.0 + ts.n_eff);
    let inputs = PbicInputs::single(xi, d, ts.n_eff).unwrap();
    let cal = c_alpha_pbic(n, 1, &null_law(n, 1, 1).unwrap(), 0.05, &inputs).unwrap();
    adaptive_alpha(harmonic(n).ln(), n, 1, 1, &cal)
        .unwrap()
        .alpha_adaptive
}

fn criterion_8() -> Outcome {
    let mut checks = Checks::default();
    for v in [0.0, 1e-10, 1e-12] {
        // d = 1, nᵉ = 1 gives v = ξ̂ / 2
        let c = pbic_constant(&PbicInputs::single(2.0 * v, 1.0, 1.0).unwrap()).unwrap();
        checks.check((c - std::f64::consts::LN_2).abs() <= 1e-9, || {
            format!("C at v={v:e}: {c}")
        });
    }
    let n = 10_000;
    let bic = reproduce_table(TableId::T5, &defaults())
        .map(|t| cell(&t, &[n], "bic"))
        .unwrap();
    let grid = [1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0];
    for v in grid {
        let factor = findley_pbic_alpha(n, v) / bic;
        checks.check(factor > 10.0, || format!("v={v}: factor {factor:.2}"));
    }
    // where the factor crosses 10, for the record
    let (mut lo, mut hi) = (2.0, 10.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if findley_pbic_alpha(n, mid) / bic > 10.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ts = tess(TessDesign::TwoMeans {
        n1: 10,
        n2: 100,
        var1: 14.0,
        var2: 140.0,
    })
    .unwrap();
    let d = ts.d.unwrap();
    checks.check(
        (ts.n_eff - 200.0).abs() < 1e-9 && (d - 2.8).abs() < 1e-12,
        || format!("two-means TESS nᵉ={} d={d}", ts.n_eff),
    );
    let factor0 = findley_pbic_alpha(n, 1e-6) / bic;
    checks.finish(&format!(
        ", factor {factor0:.1} as v→0, above 10 for v < {lo:.3}"
    ))
}

fn criterion_9() -> Outcome {
    let mut got = Vec::new();
    for k in [2, 5, 10] {
        got.push(solve_replicates(&PowerDesign::new(k, 0.25, 0.05, 0.8).unwrap()).unwrap());
    }
    Outcome::new(got == [64, 40, 26], format!("r0 = {got:?}"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let rs = [10, 50, 100, 500, 1000];
    let printed = [39.06, 21.43, 15.73, 39.04, 97.15];
    let mut checks = Checks::default();
    let mut plain = Vec::new();
    let mut adjusted = Vec::new();
    for (r, p) in rs.into_iter().zip(printed) {
        let cfg = Table3Config::desk(r, 1);
        let v = table3_experiment(&cfg, 0).unwrap().pct_from_null;
        checks.check((v - p).abs() <= 5.0, || format!("r={r}: {v:.2} vs {p}"));
        plain.push(v);
        let cfg = Table3Config {
            adjustment: Adjustment::Pbic { alpha0: 0.05 },
            ..cfg
        };
        adjusted.push(table3_experiment(&cfg, 0).unwrap().pct_from_null);
    }
    checks.check(adjusted.windows(2).all(|w| w[1] <= w[0]), || {
        format!("adjusted not monotone: {adjusted:?}")
    });
    checks.check(adjusted[4] < 1.0, || {
        format!("adjusted at r=1000: {:.3}", adjusted[4])
    });
    let elapsed = start.elapsed();
    checks.check(elapsed <= Duration::from_secs(300), || {
        format!("runtime {elapsed:?}")
    });
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.2}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    checks.finish(&format!(
        ", unadjusted [{}], PBIC [{}], {elapsed:.2?}",
        fmt(&plain),
        fmt(&adjusted)
    ))
}

/// Published fuel-economy rows: entering predictor, Var, Cor with wt, b, p, α simple, α PBIC.
const MPG_ROWS: [(&str, f64, f64, f64, f64, f64, f64); 3] = [
    ("sp", 197.1, 0.68, 8612.9, 0.0325, 0.0004, 0.0134),
    ("hp", 3230.9, 0.83, 80449.5, 0.1661, 0.0001, 0.0046),
    ("vol", 491.3, 0.38, 33901.1, 0.6482, 0.0002, 0.0087),
];
const MPG_N: usize = 82;

fn criterion_11() -> Outcome {
    let mut checks = Checks::default();
    let simple = |log_b: f64| {
        let cal = c_alpha_simple(MPG_N, 3, &null_law(MPG_N, 3, 1).unwrap(), 0.05).unwrap();
        adaptive_alpha(log_b, MPG_N, 3, 1, &cal)
            .unwrap()
            .alpha_adaptive
    };
    // From the printed summary statistics: b = (n−1)·s²·(1 − ρ²) for one
    // entering predictor against one retained predictor.
    for (name, var, cor, b, p, a_simple, a_pbic) in MPG_ROWS {
        let from_stats = (MPG_N - 1) as f64 * var * (1.0 - cor * cor);
        checks.check((from_stats / b - 1.0).abs() <= 0.015, || {
            format!("{name}: b {from_stats:.1} vs {b}")
        });
        let a = simple(b.ln());
        within_print_unit(
            &mut checks,
            format!("{name} α simple"),
            a,
            &format!("{a_simple:.4}"),
        );
        if name == "sp" {
            checks.check(p < 0.05 && p >= a && p >= a_pbic, || {
                format!("sp flip at printed p: α {a:.5}")
            });
        } else {
            checks.check(p >= a && p >= a_pbic, || {
                format!("{name} decision at printed p")
            });
        }
    }
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mpg.csv");
    if !fixture.exists() {
        checks.check(false, || {
            "raw-data part: tests/fixtures/mpg.csv is not vendored".into()
        });
        return checks.finish("");
    }
    let data = parse_dataset_csv(&fixture).unwrap();
    let strategy = CalibrationStrategy::simple(0.05).unwrap();
    for (name, _, _, b, p, _, a_pbic) in MPG_ROWS {
        let rep = run_regression_test(&data, "mpg", &["wt"], &["wt", name], &strategy).unwrap();
        let got_b = rep.regression.b;
        checks.check((got_b / b - 1.0).abs() <= 0.015, || {
            format!("{name}: data b {got_b:.1} vs {b}")
        });
        let (pe, pg) = (rep.report.p_exact, rep.report.p_gamma);
        checks.check((pe - p).abs() <= 0.002 || (pg - p).abs() <= 0.002, || {
            format!("{name}: p exact {pe:.4}, gamma {pg:.4} vs {p}")
        });
        let flips = rep.report.reject_classical && !rep.report.reject_adaptive && pg >= a_pbic;
        if name == "sp" {
            checks.check(flips, || {
                "sp: decision flip not reproduced from data".into()
            });
        } else {
            checks.check(!rep.report.reject_adaptive, || {
                format!("{name}: adaptive rejection")
            });
        }
    }
    checks.finish("")
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {status} {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
