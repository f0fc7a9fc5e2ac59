//! Dispatch from a [`RunConfig`] to the library and assembly of the report.

use std::collections::BTreeMap;

use friedrichs_core::bands::{BandSweep, Branch};
use friedrichs_core::thresholds::{classify_with_integrals, ThresholdIntegrals};
use friedrichs_core::{
    band_endpoints, classify_threshold, find_discrete_spectrum, fredholm_delta, lambda_point, lambda_points,
    IntegralResult, Interval, SpectralWindow, ThresholdPoint, TorusPoint, VFunction, Verdict,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig, DEFAULT_GAMMA_RANGE, DEFAULT_STEPS};
use crate::error::CliError;

/// Values of `v` below this count as vanishing when predicting verdicts.
const VANISH_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Total grid refinements spent by the threshold quadratures.
    pub quadrature_refinements: u32,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub results: Value,
    pub diagnostics: Diagnostics,
    pub version: String,
}

/// A finished run. `failed_checks` is set when `verify` ran to completion
/// but some statement did not hold.
pub struct Outcome {
    pub report: Report,
    pub csv_rows: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub failed_checks: bool,
}

impl Outcome {
    pub fn render(&self) -> Result<String, CliError> {
        match (self.report.config.format, &self.csv_rows) {
            (Format::Csv, Some((header, rows))) => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let out = |e: csv::Error| CliError::Output(e.to_string());
                w.write_record(header).map_err(out)?;
                for r in rows {
                    w.write_record(r).map_err(out)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
            }
            _ => {
                let mut s = serde_json::to_string_pretty(&self.report).map_err(|e| CliError::Output(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let v = config.coupling()?;
    let mut diag = Diagnostics::default();
    let mut csv_rows = None;
    let mut failed_checks = false;
    let results = match config.command {
        Command::Spectrum => spectrum(config, &v, &mut diag, &mut csv_rows)?,
        Command::Bands => bands(config, &v, &mut csv_rows)?,
        Command::Critical => critical(config, &v, &mut diag)?,
        Command::Classify => classify(config, &v, &mut diag)?,
        Command::ScanGamma => scan_gamma(config, &v, &mut diag, &mut csv_rows)?,
        Command::Verify => {
            let (value, ok) = verify(config, &v, &mut diag)?;
            failed_checks = !ok;
            value
        }
    };
    Ok(Outcome {
        report: Report {
            config: config.clone(),
            results,
            diagnostics: diag,
            version: env!("CARGO_PKG_VERSION").into(),
        },
        csv_rows,
        failed_checks,
    })
}

fn terms_json(v: &VFunction) -> Value {
    Value::Array(v.terms().map(|(m, c)| json!({ "m": m, "c": c })).collect())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |z| z.to_string())
}

fn window_row(w: &SpectralWindow) -> Vec<String> {
    let k = w.k.coords();
    vec![
        k[0].to_string(),
        k[1].to_string(),
        k[2].to_string(),
        w.m.to_string(),
        w.upper.to_string(),
        opt(w.eigen_below),
        opt(w.eigen_above),
    ]
}

const WINDOW_HEADER: [&str; 7] = ["k1", "k2", "k3", "m", "M", "eigen_below", "eigen_above"];

type Rows = Option<(Vec<&'static str>, Vec<Vec<String>>)>;

fn spectrum(config: &RunConfig, v: &VFunction, diag: &mut Diagnostics, rows: &mut Rows) -> Result<Value, CliError> {
    let params = config.params()?;
    let k = config.k_point()?;
    let w = find_discrete_spectrum(&params, v, k);
    for (name, z) in [("delta_at_eigen_below", w.eigen_below), ("delta_at_eigen_above", w.eigen_above)] {
        if let Some(z) = z {
            diag.residuals.insert(name.into(), fredholm_delta(&params, v, k, z)?.abs());
        }
    }
    *rows = Some((WINDOW_HEADER.to_vec(), vec![window_row(&w)]));
    Ok(json!({ "v_terms": terms_json(v), "window": w }))
}

fn bands(config: &RunConfig, v: &VFunction, rows: &mut Rows) -> Result<Value, CliError> {
    let params = config.params()?;
    let resolution = config.resolution.unwrap_or_default();
    let b = BandSweep::new(v, resolution)?.assemble(&params)?;
    *rows = Some((WINDOW_HEADER.to_vec(), b.windows.iter().map(window_row).collect()));
    #[derive(Serialize)]
    struct Summary<'a> {
        resolution: usize,
        samples: usize,
        intervals: &'a [Interval],
        below: Option<Branch>,
        above: Option<Branch>,
    }
    Ok(serde_json::to_value(Summary {
        resolution: b.resolution,
        samples: b.windows.len(),
        intervals: &b.intervals,
        below: b.below,
        above: b.above,
    })
    .expect("band summary serializes"))
}

fn refinements(ints: &ThresholdIntegrals) -> u32 {
    ints.origin.refinements_used + ints.lambda.iter().map(|r: &IntegralResult| r.refinements_used).sum::<u32>()
}

fn critical(config: &RunConfig, v: &VFunction, diag: &mut Diagnostics) -> Result<Value, CliError> {
    let gamma = config.gamma()?;
    let ints = ThresholdIntegrals::compute(v, &config.quadrature)?;
    diag.quadrature_refinements = refinements(&ints);
    let cc = ints.critical_couplings(gamma);
    if let Some(ml) = cc.mu_l {
        diag.residuals.insert("mu_l_identity".into(), (ml * ml * ints.i_eps() - 2.0 * gamma).abs());
    }
    for (i, mr) in cc.mu_r.iter().enumerate() {
        if let Some(mr) = mr {
            let r = (mr * mr * ints.lambda[i].value - (9.0 - gamma)).abs();
            diag.residuals.insert(format!("mu_r_identity_{}", i + 1), r);
        }
    }
    diag.residuals.insert("origin_integral_error".into(), ints.origin.est_error);
    Ok(json!({
        "v_terms": terms_json(v),
        "gamma": gamma,
        "mu_l": cc.mu_l,
        "mu_r": cc.mu_r,
        "gamma_star": cc.gamma_star,
        "integrals": ints,
    }))
}

fn classify(config: &RunConfig, v: &VFunction, diag: &mut Diagnostics) -> Result<Value, CliError> {
    let params = config.params()?;
    let point = config.point.expect("validated");
    let report = classify_threshold(&params, v, point, &config.quadrature)?;
    diag.residuals.insert("resonance".into(), report.resonance_residual);
    diag.residuals.insert("system_line_1".into(), report.system_residual[0]);
    diag.residuals.insert("system_line_2".into(), report.system_residual[1]);
    diag.residuals.insert("shell_fit".into(), report.probe.fit_residual);
    Ok(serde_json::to_value(report).expect("threshold report serializes"))
}

fn scan_gamma(config: &RunConfig, v: &VFunction, diag: &mut Diagnostics, rows: &mut Rows) -> Result<Value, CliError> {
    let i = config.lambda_index()?;
    let [lo, hi] = config.gamma_range.unwrap_or(DEFAULT_GAMMA_RANGE);
    let steps = config.steps.unwrap_or(DEFAULT_STEPS);
    let ints = ThresholdIntegrals::compute(v, &config.quadrature)?;
    diag.quadrature_refinements = refinements(&ints);
    let diff = |g: f64| Some(ints.mu_left(g).ok()? - ints.mu_right(g, i).ok()?);

    let mut table = Vec::with_capacity(steps);
    let mut csv = Vec::with_capacity(steps);
    let mut signs = Vec::with_capacity(steps);
    for j in 0..steps {
        let g = lo + (hi - lo) * j as f64 / (steps - 1) as f64;
        let (ml, mr) = (ints.mu_left(g).ok(), ints.mu_right(g, i).ok());
        let d = diff(g);
        let order = d.map(|d| match d.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Less) => "mu_l < mu_r",
            Some(std::cmp::Ordering::Greater) => "mu_l > mu_r",
            _ => "mu_l = mu_r",
        });
        signs.push((g, d));
        csv.push(vec![g.to_string(), opt(ml), opt(mr), opt(d)]);
        table.push(json!({ "gamma": g, "mu_l": ml, "mu_r": mr, "difference": d, "ordering": order }));
    }
    // sign changes between consecutive samples where both couplings exist
    let defined: Vec<(f64, f64)> = signs.iter().filter_map(|&(g, d)| Some((g, d?))).collect();
    let flips: Vec<usize> = (1..defined.len()).filter(|&j| (defined[j].1 > 0.0) != (defined[j - 1].1 > 0.0)).collect();
    let crossing = match flips.as_slice() {
        [j] => {
            let (mut a, mut b) = (defined[j - 1].0, defined[*j].0);
            let left = defined[j - 1].1 > 0.0;
            while b - a > 1e-12 * (1.0 + b.abs()) {
                let mid = 0.5 * (a + b);
                if diff(mid).is_some_and(|d| (d > 0.0) == left) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            Some(0.5 * (a + b))
        }
        _ => None,
    };
    let gamma_star = ints.gamma_star(i)?;
    if let Some(c) = crossing {
        diag.residuals.insert("crossing_minus_gamma_star".into(), (c - gamma_star).abs());
    }
    *rows = Some((vec!["gamma", "mu_l", "mu_r", "difference"], csv));
    Ok(json!({
        "v_terms": terms_json(v),
        "lambda_index": i,
        "samples": table,
        "sign_changes": flips.len(),
        "crossing": crossing,
        "gamma_star": gamma_star,
    }))
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn verify(config: &RunConfig, v: &VFunction, diag: &mut Diagnostics) -> Result<(Value, bool), CliError> {
    let i = config.lambda_index()?;
    let cfg = &config.quadrature;
    let mut checks = Vec::new();

    let mut exact = true;
    for (k, lo, hi) in std::iter::once((TorusPoint::ORIGIN, 0.0, 12.0))
        .chain(lambda_points().iter().map(|l| (l, 7.5, 13.5)))
        .chain(std::iter::once((TorusPoint::pi_bar(), 12.0, 12.0)))
    {
        let e = band_endpoints(k);
        exact &= (e.lower - lo).abs() < 1e-12 && (e.upper - hi).abs() < 1e-12;
    }
    checks.push(Check {
        name: "band_endpoints".into(),
        passed: exact,
        detail: "[0, 12] at 0̄, [7.5, 13.5] on Λ, {12} at π̄".into(),
    });

    let ints = ThresholdIntegrals::compute(v, cfg)?;
    diag.quadrature_refinements = refinements(&ints);
    let gs = ints.gamma_star(i)?;
    let ml = ints.mu_left(gs)?;
    let mr = ints.mu_right(gs, i)?;
    let gap = (ml - mr).abs();
    diag.residuals.insert("mu_l_minus_mu_r_at_gamma_star".into(), gap);
    checks.push(Check {
        name: "critical_couplings_meet".into(),
        passed: gap < 1e-6 * ml,
        detail: format!("γ* = {gs}, μ_l = {ml}, μ_r = {mr}"),
    });

    let params = friedrichs_core::ModelParams::new(gs, ml)?;
    for (point, name) in [(ThresholdPoint::Origin, "origin"), (ThresholdPoint::Lambda(i), "lambda")] {
        let k = point.k()?;
        let vanishes = v.eval(k).abs() < VANISH_TOL;
        let expect = if vanishes { Verdict::Eigenvalue } else { Verdict::VirtualLevel };
        let r = classify_with_integrals(&params, v, point, &ints, cfg)?;
        checks.push(Check {
            name: format!("verdict_{name}"),
            passed: r.verdict == expect,
            detail: format!("{:?}, expected {:?} since v = {}", r.verdict, expect, v.eval(k)),
        });
        let s = r.probe.slope;
        let slope_ok = match r.verdict {
            Verdict::VirtualLevel => (s + 1.0).abs() <= 0.1 && !r.probe.in_l2,
            Verdict::Eigenvalue => s >= 0.9 && r.probe.in_l2,
            Verdict::Regular => false,
        };
        checks.push(Check {
            name: format!("l2_probe_{name}"),
            passed: slope_ok,
            detail: format!("shell slope {s}"),
        });
        if r.verdict == Verdict::Eigenvalue {
            let res = r.system_residual[0].max(r.system_residual[1]);
            diag.residuals.insert(format!("eigen_system_{name}"), res);
            checks.push(Check {
                name: format!("eigen_system_{name}"),
                passed: res < 1e-6,
                detail: format!("residual {res:e}"),
            });
        }
    }

    let k_i = lambda_point(i).expect("index validated");
    let all_passed = checks.iter().all(|c| c.passed);
    Ok((
        json!({
            "v_terms": terms_json(v),
            "lambda_index": i,
            "lambda_point": k_i,
            "gamma_star": gs,
            "checks": checks,
            "all_passed": all_passed,
        }),
        all_passed,
    ))
}
