use std::path::Path;

use logcone::cone::{self, PositiveVector};
use logcone::discrete::{
    classify_l_martingale, doob_decompose, AdaptedProcess, Classification, Filtration, FiniteSpace, Partition,
    RandomVariable, DEFAULT_CLASSIFY_TOL,
};
use logcone::limit::{clt_experiment, lln_experiment, PositiveDistribution, TrialConfig, MIN_CLT_TRIALS};
use logcone::lmoments::{self, Sample};
use logcone::portfolio::{self, ReturnsPanel};
use logcone::{Error, VERSION};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::input::{read_json, read_panel, read_vector, read_vectors, schema_error, Panel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentKind {
    Lln,
    Clt,
}

pub enum Output {
    Json(Value),
    Text(String),
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize to JSON")
}

fn sample_of(panel: &Panel) -> CliResult<Sample> {
    Ok(Sample::from_rows(&panel.rows)?)
}

pub fn stats(path: &Path) -> CliResult<Output> {
    let panel = read_panel(path)?;
    let s = sample_of(&panel)?;
    let moments = lmoments::log_moments(&s);
    let cov: Vec<Vec<f64>> = moments.cov_log.row_iter().map(|r| r.iter().copied().collect()).collect();
    let empirical = if s.len() >= 2 { Some(lmoments::empirical_l_variance(&s)?) } else { None };
    Ok(Output::Json(json!({
        "labels": panel.labels,
        "periods": s.len(),
        "l_mean": lmoments::l_mean(&s).values(),
        "arithmetic_mean": lmoments::arithmetic_mean(&s),
        "jensen_gap": lmoments::l_mean_jensen_gap(&s),
        "log_covariance": cov,
        "empirical_l_variance": empirical,
    })))
}

pub fn predict(path: &Path, x: &str, y: &str) -> CliResult<Output> {
    let panel = read_panel(path)?;
    let (ix, iy) = (panel.column_index(x)?, panel.column_index(y)?);
    let sx = Sample::from_values(&panel.column(ix))?;
    let sy = Sample::from_values(&panel.column(iy))?;
    let fit = lmoments::fit_power_law(&sx, &sy)?;
    Ok(Output::Json(json!({
        "x": panel.labels[ix],
        "y": panel.labels[iy],
        "a": fit.a,
        "b": fit.b,
        "D": fit.d_denominator,
        "m_ell_predictor": fit.m_ell_predictor,
        "predictor_log_variance": fit.predictor_log_variance,
        "residual_log_variance": fit.residual_lvar,
    })))
}

fn returns_panel(panel: &Panel) -> CliResult<ReturnsPanel> {
    Ok(ReturnsPanel::from_rows(&panel.rows)?)
}

fn csv_line<I: IntoIterator<Item = String>>(fields: I) -> String {
    let mut line = fields.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn number(x: f64) -> String {
    format!("{x:?}")
}

pub fn portfolio(path: &Path, target: f64, target_is_gross: bool, format: Format) -> CliResult<Output> {
    let target_mu = if target_is_gross {
        if !(target > 0.0 && target.is_finite()) {
            return Err(CliError::not_positive(format!(
                "--target {target} must be a positive l-mean when --target-is-gross is set"
            )));
        }
        target.ln()
    } else {
        target
    };
    let panel = read_panel(path)?;
    let moments = portfolio::estimate_log_moments(&returns_panel(&panel)?);
    let solution = portfolio::solve_min_lvar(&moments, target_mu)?;
    let stats = portfolio::portfolio_stats(&moments, &solution.weights)?;
    match format {
        Format::Csv => {
            let mut out = csv_line(["label".to_string(), "weight".to_string()]);
            for (label, w) in panel.labels.iter().zip(solution.weights.values()) {
                out.push_str(&csv_line([label.clone(), number(*w)]));
            }
            Ok(Output::Text(out))
        }
        Format::Json => Ok(Output::Json(json!({
            "labels": panel.labels,
            "target_mu": target_mu,
            "weights": solution.weights.values(),
            "log_growth": stats.log_growth,
            "log_variance": stats.log_variance,
            "multipliers": solution.multipliers,
            "kkt_residual": solution.kkt_residual(&moments),
            "frontier_scalars": value(&solution.scalars),
        }))),
    }
}

/// Parses `lo:hi:steps` into `steps` evenly spaced targets.
pub fn parse_targets(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::parse(format!("--targets '{spec}' must look like lo:hi:steps"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) || steps == 0 || (steps == 1 && lo != hi) {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let s = i as f64 / last;
            lo * (1.0 - s) + hi * s
        })
        .collect())
}

pub fn frontier(path: &Path, targets: &str, format: Format) -> CliResult<Output> {
    let targets = parse_targets(targets)?;
    let panel = read_panel(path)?;
    let moments = portfolio::estimate_log_moments(&returns_panel(&panel)?);
    let points = portfolio::efficient_frontier(&moments, &targets)?;
    match format {
        Format::Csv => {
            let k = panel.labels.len();
            let header = ["target_mu".to_string(), "log_variance".to_string()]
                .into_iter()
                .chain((1..=k).map(|i| format!("w_{i}")));
            let mut out = csv_line(header);
            for p in &points {
                let fields = [number(p.target_mu), number(p.log_variance)]
                    .into_iter()
                    .chain(p.weights.values().iter().map(|w| number(*w)));
                out.push_str(&csv_line(fields));
            }
            Ok(Output::Text(out))
        }
        Format::Json => Ok(Output::Json(json!({
            "labels": panel.labels,
            "points": value(&points),
        }))),
    }
}

/// Payload of `simulate`; the seed comes from the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub distribution: PositiveDistribution,
    pub sample_size: usize,
    pub num_trials: usize,
}

pub fn simulate(kind: ExperimentKind, path: &Path, seed: u64) -> CliResult<Output> {
    let spec: SimulationSpec = read_json(path)?;
    spec.distribution
        .validate()
        .map_err(|e| schema_error(path, "/distribution", e))?;
    if spec.sample_size == 0 {
        return Err(schema_error(path, "/sample_size", "must be at least 1"));
    }
    let min_trials = match kind {
        ExperimentKind::Lln => 1,
        ExperimentKind::Clt => MIN_CLT_TRIALS,
    };
    if spec.num_trials < min_trials {
        return Err(schema_error(path, "/num_trials", format!("must be at least {min_trials}")));
    }
    let cfg = TrialConfig {
        sample_size: spec.sample_size,
        num_trials: spec.num_trials,
        seed,
    };
    let report = match kind {
        ExperimentKind::Lln => lln_experiment(&spec.distribution, &cfg)?,
        ExperimentKind::Clt => clt_experiment(&spec.distribution, &cfg)?,
    };
    Ok(Output::Json(json!({
        "version": VERSION,
        "seed": seed,
        "spec": value(&spec),
        "report": value(&report),
    })))
}

/// A finite probability space with a filtration and an adapted process.
///
/// `filtration[t]` lists the blocks (atom indices) of the partition at time
/// `t`; `process[t][atom]` is the value of `X_t` on that atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleSpec {
    pub probs: Vec<f64>,
    pub filtration: Vec<Vec<Vec<usize>>>,
    pub process: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub tol: Option<f64>,
}

fn build_process(path: &Path, spec: &MartingaleSpec) -> CliResult<(FiniteSpace, AdaptedProcess)> {
    let space = FiniteSpace::new(spec.probs.clone()).map_err(|e| schema_error(path, "/probs", e))?;
    let m = space.len();
    let partitions = spec
        .filtration
        .iter()
        .enumerate()
        .map(|(t, blocks)| {
            Partition::new(blocks.clone(), m).map_err(|e| schema_error(path, &format!("/filtration/{t}"), e))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let filtration = Filtration::new(partitions).map_err(|e| schema_error(path, "/filtration", e))?;
    if spec.process.len() != filtration.partitions().len() {
        return Err(schema_error(
            path,
            "/process",
            format!("{} times given, the filtration has {}", spec.process.len(), filtration.partitions().len()),
        ));
    }
    let mut variables = Vec::with_capacity(spec.process.len());
    for (t, rows) in spec.process.iter().enumerate() {
        if rows.len() != m {
            return Err(schema_error(path, &format!("/process/{t}"), format!("expected {m} atoms, found {}", rows.len())));
        }
        for (atom, row) in rows.iter().enumerate() {
            if let Some(i) = row.iter().position(|v| PositiveVector::from_slice(&[*v]).is_err()) {
                return Err(CliError::not_positive(format!(
                    "{}: process value at \"/process/{t}/{atom}/{i}\" = {} is not strictly positive",
                    path.display(),
                    row[i]
                )));
            }
        }
        let x = RandomVariable::from_rows(rows).map_err(|e| match e {
            Error::DimensionMismatch { .. } | Error::Empty(_) => schema_error(path, &format!("/process/{t}"), e),
            other => other.into(),
        })?;
        variables.push(x);
    }
    let process = AdaptedProcess::new(variables, filtration)?;
    Ok((space, process))
}

fn process_values(p: &AdaptedProcess) -> Vec<Vec<Vec<f64>>> {
    p.variables()
        .iter()
        .map(|x| x.values().iter().map(|v| v.values().to_vec()).collect())
        .collect()
}

pub fn martingale(path: &Path, force_doob: bool) -> CliResult<Output> {
    let spec: MartingaleSpec = read_json(path)?;
    let tol = spec.tol.unwrap_or(DEFAULT_CLASSIFY_TOL);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(schema_error(path, "/tol", "must be a nonnegative number"));
    }
    let (space, process) = build_process(path, &spec)?;
    let report = classify_l_martingale(&process, &space, tol)?;
    let components: Vec<Value> = (0..process.dim())
        .map(|i| {
            let l = report.l_route[i];
            json!({
                "component": i,
                "l_route": l,
                "log_route": report.log_route[i],
                "ordinary": report.ordinary[i],
                "l_martingale": l == Classification::Martingale,
                "l_submartingale": l.is_submartingale(),
                "ordinary_submartingale": report.ordinary[i].is_submartingale(),
            })
        })
        .collect();
    let all_sub = report.l_route.iter().all(|c| c.is_submartingale());
    let doob = if all_sub || force_doob {
        let d = doob_decompose(&process, &space)?;
        let (x, y, a) = (process_values(&process), process_values(&d.martingale), process_values(&d.compensator));
        let mut residual: f64 = 0.0;
        for t in 0..x.len() {
            for atom in 0..x[t].len() {
                for i in 0..x[t][atom].len() {
                    let rebuilt = y[t][atom][i] * a[t][atom][i];
                    residual = residual.max((rebuilt - x[t][atom][i]).abs() / x[t][atom][i]);
                }
            }
        }
        json!({ "Y": y, "A": a, "reconstruction_residual": residual })
    } else {
        Value::Null
    };
    Ok(Output::Json(json!({
        "num_atoms": space.len(),
        "num_times": process.variables().len(),
        "tol": tol,
        "components": components,
        "routes_agree": report.routes_agree(),
        "doob": doob,
    })))
}

fn positive(v: Vec<f64>) -> CliResult<PositiveVector> {
    Ok(PositiveVector::new(v)?)
}

pub fn distance(x: &str, y: &str) -> CliResult<Output> {
    let (x, y) = (positive(read_vector(x)?)?, positive(read_vector(y)?)?);
    Ok(Output::Json(json!({ "distance": cone::log_distance(&x, &y)? })))
}

pub fn geodesic(x1: &str, x2: &str, t: f64) -> CliResult<Output> {
    let (x1, x2) = (positive(read_vector(x1)?)?, positive(read_vector(x2)?)?);
    let point = cone::geodesic(&x1, &x2, t)?;
    Ok(Output::Json(json!({ "t": t, "point": point.values() })))
}

pub fn gmean(args: &[String]) -> CliResult<Output> {
    let mut points = Vec::new();
    for arg in args {
        for v in read_vectors(arg)? {
            points.push(positive(v)?);
        }
    }
    let mean = cone::geometric_mean(&points)?;
    Ok(Output::Json(json!({ "count": points.len(), "geometric_mean": mean.values() })))
}

