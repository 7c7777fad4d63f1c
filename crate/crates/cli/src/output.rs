//! Rendering of reports as aligned text, JSON or CSV.

use adaptive_alpha::alpha::AlphaResult;
use adaptive_alpha::calibration::StrategyDescriptor;
use adaptive_alpha::decision::{RegressionReport, TestReport};
use adaptive_alpha::simlab::{McCheck, SimResult, Table, Table3Config};
use serde::Serialize;

use crate::args::Format;

/// Probabilities the way published tables print them: four decimals, or
/// four significant digits in scientific notation once that would round to zero.
pub fn prob(v: f64) -> String {
    if v == 0.0 || v.abs() >= 1e-4 {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

/// Four significant digits.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        format!("{v:.*}", (3 - e).max(0) as usize)
    } else {
        format!("{v:.3e}")
    }
}

fn strategy_text(s: &StrategyDescriptor) -> String {
    let mut out = format!("{} (alpha0 = {}", s.name, s.alpha0);
    if let Some(n0) = s.anchor_n {
        out.push_str(&format!(", anchor_n = {n0}"));
    }
    if let Some(p) = &s.pbic {
        for t in p
            .terms_i
            .iter()
            .map(|t| ("i", t))
            .chain(p.terms_j.iter().map(|t| ("j", t)))
        {
            out.push_str(&format!(
                ", pbic[{}] xi = {}, d = {}, n_eff = {}",
                t.0, t.1.xi_hat, t.1.d, t.1.n_eff
            ));
        }
    }
    out.push(')');
    out
}

fn strategy_fields(s: &StrategyDescriptor) -> Vec<(&'static str, String)> {
    let first = s
        .pbic
        .as_ref()
        .and_then(|p| p.terms_j.first().or(p.terms_i.first()));
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        ("strategy", s.name.clone()),
        ("alpha0", s.alpha0.to_string()),
        (
            "anchor_n",
            s.anchor_n.map(|n| n.to_string()).unwrap_or_default(),
        ),
        ("pbic_xi", opt(first.map(|t| t.xi_hat))),
        ("pbic_d", opt(first.map(|t| t.d))),
        ("pbic_neff", opt(first.map(|t| t.n_eff))),
    ]
}

fn kv_text(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

fn csv_record(rows: &[(&str, String)]) -> String {
    let header: Vec<&str> = rows.iter().map(|(k, _)| *k).collect();
    let values: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

fn csv_records(rows: &[Vec<(&str, String)>]) -> String {
    let Some(first) = rows.first() else {
        return String::new();
    };
    let mut out = first.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|(_, v)| v.as_str())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn alpha(result: &AlphaResult, format: Format) -> String {
    match format {
        Format::Json => json(result),
        Format::Text => {
            let mut rows = vec![
                ("alpha_adaptive", prob(result.alpha_display)),
                ("g", sig4(result.g)),
                ("log_b", sig4(result.log_b)),
                ("C", sig4(result.c_prior)),
                ("C_alpha", sig4(result.c_alpha)),
                ("adaptive_quantile", sig4(result.adaptive_quantile)),
                (
                    "n, j, q",
                    format!("{}, {}, {}", result.n, result.j, result.q),
                ),
                ("strategy", strategy_text(&result.strategy)),
            ];
            if result.alpha_adaptive != result.alpha_display {
                rows.insert(1, ("alpha_unclamped", sig4(result.alpha_adaptive)));
            }
            kv_text(&rows)
        }
        Format::Csv => {
            let mut rows = vec![
                ("n", result.n.to_string()),
                ("j", result.j.to_string()),
                ("q", result.q.to_string()),
                ("log_b", result.log_b.to_string()),
            ];
            rows.extend(strategy_fields(&result.strategy));
            rows.extend([
                ("g", result.g.to_string()),
                ("C", result.c_prior.to_string()),
                ("C_alpha", result.c_alpha.to_string()),
                ("adaptive_quantile", result.adaptive_quantile.to_string()),
                ("alpha_adaptive", result.alpha_adaptive.to_string()),
            ]);
            csv_record(&rows)
        }
    }
}

fn test_fields(r: &TestReport) -> Vec<(&'static str, String)> {
    let d = &r.diagnostics;
    let mut rows = vec![
        ("n", d.n.to_string()),
        ("i", d.i.to_string()),
        ("j", d.j.to_string()),
        ("q", d.q.to_string()),
        ("T", r.t.to_string()),
        ("p_gamma", r.p_gamma.to_string()),
        ("p_exact", r.p_exact.to_string()),
        ("log_b", r.log_b.to_string()),
        ("g", d.g.to_string()),
        ("C", d.c_prior.to_string()),
        ("C_alpha", d.c_alpha.to_string()),
        ("adaptive_quantile", r.adaptive_quantile.to_string()),
    ];
    rows.extend(strategy_fields(&d.strategy));
    rows.extend([
        ("classical_alpha", r.classical_alpha.to_string()),
        ("reject_classical", r.reject_classical.to_string()),
        ("alpha_adaptive", r.alpha_adaptive.to_string()),
        ("reject_adaptive", r.reject_adaptive.to_string()),
    ]);
    rows
}

pub fn regression(report: &RegressionReport, format: Format) -> String {
    let r = &report.report;
    let g = &report.regression;
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut rows = vec![
                ("response", g.response.clone()),
                ("retained", g.retained.join(";")),
                ("entering", g.entering.join(";")),
                ("b", g.b.to_string()),
                ("log_b_correlation", g.log_b_correlation.to_string()),
            ];
            rows.extend(test_fields(r));
            csv_record(&rows)
        }
        Format::Text => {
            let d = &r.diagnostics;
            let decide = |reject: bool| {
                if reject {
                    "reject H0"
                } else {
                    "do not reject H0"
                }
            };
            let mut rows = vec![
                ("response", g.response.clone()),
                (
                    "null model",
                    format!(
                        "intercept{}",
                        g.retained
                            .iter()
                            .map(|p| format!(" + {p}"))
                            .collect::<String>()
                    ),
                ),
                ("entering", g.entering.join(", ")),
            ];
            for (k, name) in g.entering.iter().enumerate() {
                rows.push((
                    "variance",
                    format!("{name}: {}", sig4(g.entering_variances[k])),
                ));
                for (a, retained) in g.retained.iter().enumerate() {
                    rows.push((
                        "correlation",
                        format!("{retained}, {name}: {:.4}", g.cross_correlations[a][k]),
                    ));
                }
            }
            rows.extend([
                (
                    "b",
                    format!(
                        "{} (correlation route {})",
                        sig4(g.b),
                        sig4(g.log_b_correlation.exp())
                    ),
                ),
                ("n, i, j, q", format!("{}, {}, {}, {}", d.n, d.i, d.j, d.q)),
                ("T", sig4(r.t)),
                ("p_gamma", prob(r.p_gamma)),
                ("p_exact", prob(r.p_exact)),
                (
                    "classical alpha",
                    format!(
                        "{} -> {}",
                        prob(r.classical_alpha),
                        decide(r.reject_classical)
                    ),
                ),
                (
                    "adaptive alpha",
                    format!("{} -> {}", prob(r.alpha_display), decide(r.reject_adaptive)),
                ),
                ("adaptive_quantile", sig4(r.adaptive_quantile)),
                ("strategy", strategy_text(&d.strategy)),
            ]);
            kv_text(&rows)
        }
    }
}

pub fn tables(tables: &[Table], format: Format) -> String {
    match format {
        Format::Json => json(&tables),
        Format::Csv => tables
            .iter()
            .map(Table::to_csv)
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Text => tables
            .iter()
            .map(|t| {
                let mut out = format!("{} (alpha0 = {})\n", t.id, t.alpha0);
                let mut header: Vec<String> = t.params.clone();
                header.extend(["method".into(), "alpha_adaptive".into()]);
                let body: Vec<Vec<String>> = t
                    .rows
                    .iter()
                    .map(|row| {
                        let mut cells: Vec<String> =
                            row.values.iter().map(|v| v.to_string()).collect();
                        cells.push(row.method.clone());
                        cells.push(match row.alpha_adaptive {
                            adaptive_alpha::simlab::AlphaCell::Value(v) => prob(v),
                            other => other.to_string(),
                        });
                        cells
                    })
                    .collect();
                let widths: Vec<usize> = (0..header.len())
                    .map(|c| {
                        body.iter()
                            .map(|r| r[c].len())
                            .chain([header[c].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                for line in std::iter::once(&header).chain(&body) {
                    let cells: Vec<String> = line
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:>w$}"))
                        .collect();
                    out.push_str(cells.join("  ").trim_end());
                    out.push('\n');
                }
                out
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

#[derive(Serialize)]
pub struct SimRow<'a> {
    pub config: &'a Table3Config,
    pub result: &'a SimResult,
}

pub fn simulation(rows: &[SimRow<'_>], format: Format) -> String {
    let fields = |row: &SimRow<'_>| -> Vec<(&'static str, String)> {
        let (c, s) = (row.config, row.result);
        let adjust = serde_json::to_value(c.adjustment).expect("serializes");
        vec![
            ("r", c.r.to_string()),
            ("K", c.k.to_string()),
            ("outer_reps", c.outer_reps.to_string()),
            ("f", c.f.to_string()),
            (
                "adjustment",
                adjust["kind"].as_str().unwrap_or("none").to_string(),
            ),
            ("seed", c.seed.to_string()),
            ("null_events", s.counts.null_events.to_string()),
            ("alt_events", s.counts.alt_events.to_string()),
            ("low_confidence", s.low_confidence.to_string()),
            (
                "mc_stderr",
                s.mc_stderr.map(|e| e.to_string()).unwrap_or_default(),
            ),
            ("pct_from_null", s.pct_from_null.to_string()),
        ]
    };
    match format {
        Format::Json => json(&rows),
        Format::Csv => csv_records(&rows.iter().map(fields).collect::<Vec<_>>()),
        Format::Text => {
            let mut out = String::from("     r  pct_from_null  mc_stderr  events(null/alt)\n");
            for row in rows {
                let s = row.result;
                out.push_str(&format!(
                    "{:>6}  {:>12.2}%  {:>9}  {}/{}{}\n",
                    row.config.r,
                    s.pct_from_null,
                    s.mc_stderr
                        .map(|e| format!("{e:.2}"))
                        .unwrap_or_else(|| "-".into()),
                    s.counts.null_events,
                    s.counts.alt_events,
                    if s.low_confidence {
                        "  (low confidence)"
                    } else {
                        ""
                    }
                ));
            }
            out
        }
    }
}

pub fn mc(check: &McCheck, format: Format) -> String {
    let rows = vec![
        ("n", check.n.to_string()),
        ("j", check.j.to_string()),
        ("q", check.q.to_string()),
        ("draws", check.draws.to_string()),
        ("seed", check.seed.to_string()),
        ("ks_gamma", check.ks_gamma.to_string()),
        ("ks_exact", check.ks_exact.to_string()),
    ];
    match format {
        Format::Json => json(check),
        Format::Csv => csv_record(&rows),
        Format::Text => kv_text(&rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_styles() {
        assert_eq!(prob(0.005996), "0.0060");
        assert_eq!(prob(0.000298), "0.0003");
        assert_eq!(prob(3.1e-7), "3.100e-7");
        assert_eq!(sig4(8612.93), "8613");
        assert_eq!(sig4(0.0327123), "0.03271");
        assert_eq!(sig4(3.841458), "3.841");
        assert_eq!(sig4(1.5e9), "1.500e9");
    }
}
