//! Scenario execution: replicate-local seeding, an embarrassingly
//! parallel work pool over (grid value, replicate) cells, and
//! deterministic record ordering regardless of thread count.

use ndarray::Array2;
use rayon::prelude::*;

use crate::analysis::{mislabeling, optimal_bayes_labels, snr_report};
use crate::clustering::{MethodParams, MethodSpec};
use crate::dataset::{
    generate, generate_scenario, Dataset, FactorMixtureSpec, GaussStream, ScenarioKind,
};
use crate::error::{Error, Result};
use crate::seeds;

use super::records::ExperimentRecord;
use super::scenario::{LoadingKind, Scenario};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the default pool.
    pub jobs: Option<usize>,
    /// Record wall-clock times in the records. Off by default because
    /// timing values make reruns non-reproducible byte-for-byte.
    pub timing: bool,
}

/// Builds the fig1 toy model: centroids `±(10, 0, …, 0)`, covariance
/// `tBBᵀ + I_d` realized as loading `√t·B` with `B_ij ~ N(0, 1)`, σ = 1.
pub fn fig1_model(t: f64, d: usize, factor_rank: usize, seed: u64) -> Result<FactorMixtureSpec> {
    let mut stream = GaussStream::new(seeds::mix(seed, "scenario-spec"));
    let scale = t.sqrt();
    let mut loading = Array2::<f64>::zeros((d, factor_rank));
    for i in 0..d {
        for j in 0..factor_rank {
            loading[[i, j]] = stream.next_gauss() * scale;
        }
    }
    let mut centroids = Array2::<f64>::zeros((2, d));
    centroids[[0, 0]] = 10.0;
    centroids[[1, 0]] = -10.0;
    FactorMixtureSpec::new(centroids, loading, 1.0, vec![0.5, 0.5], true)
}

fn realize(sc: &Scenario, grid_value: f64, seed: u64) -> Result<(Dataset, FactorMixtureSpec)> {
    match sc.loading {
        LoadingKind::Strong => generate_scenario(
            ScenarioKind::Strong,
            grid_value,
            (sc.n, sc.d, sc.clusters, sc.factor_rank),
            seed,
        ),
        LoadingKind::Weak => generate_scenario(
            ScenarioKind::Weak,
            grid_value,
            (sc.n, sc.d, sc.clusters, sc.factor_rank),
            seed,
        ),
        LoadingKind::Fig1 => {
            let spec = fig1_model(grid_value, sc.d, sc.factor_rank, seed)?;
            let data = generate(&spec, sc.n, seeds::mix(seed, "scenario-data"))?;
            Ok((data, spec))
        }
    }
}

fn method_params(sc: &Scenario, seed: u64) -> MethodParams {
    let mut params = MethodParams::new(sc.clusters, seed);
    params.embed_dim = sc.embed_dim;
    params.split = sc.mode;
    if let Some(restarts) = sc.kmeans_restarts {
        params.kmeans_restarts = restarts;
    }
    params
}

/// Runs every (grid value, replicate, method) cell of a scenario.
///
/// Replicate seeds are `base_seed ⊕ hash(name, grid value, replicate)`,
/// so parallel and serial execution produce identical records. Method
/// failures become rows with `NaN` metrics rather than aborting the sweep.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<Vec<ExperimentRecord>> {
    sc.validate()?;
    let methods: Vec<MethodSpec> = sc
        .methods
        .iter()
        .map(|m| MethodSpec::parse(m))
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..sc.grid.len())
        .flat_map(|g| (0..sc.replicates).map(move |rep| (g, rep)))
        .collect();

    let run_cell = |&(g, rep): &(usize, usize)| -> Vec<ExperimentRecord> {
        run_one_cell(sc, &methods, g, rep, opts.timing)
    };

    let mut unordered: Vec<((usize, usize), Vec<ExperimentRecord>)> = match opts.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?;
            pool.install(|| {
                cells
                    .par_iter()
                    .map(|cell| (*cell, run_cell(cell)))
                    .collect()
            })
        }
        None => cells
            .par_iter()
            .map(|cell| (*cell, run_cell(cell)))
            .collect(),
    };
    unordered.sort_by_key(|((g, rep), _)| (*g, *rep));
    Ok(unordered.into_iter().flat_map(|(_, recs)| recs).collect())
}

fn run_one_cell(
    sc: &Scenario,
    methods: &[MethodSpec],
    g: usize,
    rep: usize,
    timing: bool,
) -> Vec<ExperimentRecord> {
    let grid_value = sc.grid[g];
    let seed = seeds::replicate_seed(sc.base_seed, &sc.name, grid_value, rep);
    let mut records = Vec::with_capacity(methods.len());

    let realized = realize(sc, grid_value, seed);
    let (data, spec) = match realized {
        Ok(pair) => pair,
        Err(err) => {
            eprintln!(
                "scenario {} grid {grid_value} rep {rep}: generation failed: {err}",
                sc.name
            );
            for m in methods {
                records.push(failed_record(sc, m, grid_value, rep, seed));
            }
            return records;
        }
    };
    let truth = data.labels().expect("generated data is labeled").to_vec();
    let snr = snr_report(&spec).ok();
    let (snr_bar, s_quantity) = snr
        .map(|r| (r.snr_bar, r.s_quantity))
        .unwrap_or((f64::NAN, f64::NAN));

    for m in methods {
        let algorithm = m.build(&method_params(sc, seed));
        let started = std::time::Instant::now();
        let outcome = algorithm.cluster(&data);
        let wall_ms = if timing {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        match outcome {
            Ok(result) => {
                let rate = mislabeling(&result.labels, &truth, sc.clusters).unwrap_or(f64::NAN);
                records.push(ExperimentRecord {
                    scenario: sc.name.clone(),
                    method: m.name(),
                    r_alg: m.factor_rank(),
                    sigma: grid_value,
                    replicate: rep,
                    seed,
                    mislabeling: rate,
                    objective: result.objective,
                    wall_ms,
                    snr_bar,
                    s_quantity,
                });
            }
            Err(err) => {
                eprintln!(
                    "scenario {} grid {grid_value} rep {rep} method {}: {err}",
                    sc.name,
                    m.name()
                );
                let mut rec = failed_record(sc, m, grid_value, rep, seed);
                rec.wall_ms = wall_ms;
                rec.snr_bar = snr_bar;
                rec.s_quantity = s_quantity;
                records.push(rec);
            }
        }
    }
    records
}

fn failed_record(
    sc: &Scenario,
    m: &MethodSpec,
    grid_value: f64,
    rep: usize,
    seed: u64,
) -> ExperimentRecord {
    ExperimentRecord {
        scenario: sc.name.clone(),
        method: m.name(),
        r_alg: m.factor_rank(),
        sigma: grid_value,
        replicate: rep,
        seed,
        mislabeling: f64::NAN,
        objective: f64::NAN,
        wall_ms: 0.0,
        snr_bar: f64::NAN,
        s_quantity: f64::NAN,
    }
}

/// One point of the oracle reference curve.
#[derive(Debug, Clone)]
pub struct OraclePoint {
    /// Grid value (`t` for the fig1 toy).
    pub t: f64,
    /// Closed-form `Φ(−√SNR)`, averaged over the replicate draws.
    pub optimal_rate: f64,
    /// Empirical mislabeling of the oracle classifier.
    pub empirical_optimal: f64,
}

/// Closed-form versus empirical optimal rate, per grid point.
pub fn run_oracle_curve(sc: &Scenario) -> Result<Vec<OraclePoint>> {
    sc.validate()?;
    if sc.loading != LoadingKind::Fig1 {
        return Err(Error::validation(
            "the oracle curve needs a symmetric two-cluster (fig1) scenario",
        ));
    }
    let mut points = Vec::with_capacity(sc.grid.len());
    for &t in &sc.grid {
        let mut rate_sum = 0.0;
        let mut empirical_sum = 0.0;
        for rep in 0..sc.replicates {
            let seed = seeds::replicate_seed(sc.base_seed, &sc.name, t, rep);
            let spec = fig1_model(t, sc.d, sc.factor_rank, seed)?;
            let data = generate(&spec, sc.n, seeds::mix(seed, "scenario-data"))?;
            let report = snr_report(&spec)?;
            rate_sum += report
                .optimal_rate
                .ok_or_else(|| Error::validation("optimal rate undefined for this spec"))?;
            let oracle = optimal_bayes_labels(&data, &spec)?;
            empirical_sum += mislabeling(&oracle, data.labels().expect("labeled"), sc.clusters)?;
        }
        let m = sc.replicates as f64;
        points.push(OraclePoint {
            t,
            optimal_rate: rate_sum / m,
            empirical_optimal: empirical_sum / m,
        });
    }
    Ok(points)
}
