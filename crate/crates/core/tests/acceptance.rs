//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them) and asserting its band and
//! runtime budget.
//!
//! Criterion 11 (real data) is `#[ignore]` because it needs the fetched
//! UCI files; run it with `cargo test -p fasc --test acceptance -- --ignored`
//! after `scripts/fetch_uci.sh`.

use std::time::Instant;

use ndarray::{Array1, Array2};

use fasc::analysis::{mislabeling_exhaustive, mislabeling_matching, snr_report};
use fasc::clustering::SplitMode;
use fasc::dataset::{FactorMixtureSpec, GaussStream};
use fasc::harness::{
    emit_csv, run_oracle_curve, run_realdata, run_scenario, LoadingKind, RunOptions, Scenario,
    ScenarioDoc,
};
use fasc::kmeans::{kmeans, KMeansConfig};
use fasc::numerics::{subspace_distance, top_eigen, top_right_singular};

struct Criterion {
    id: usize,
    label: &'static str,
    limit_s: f64,
    started: Instant,
}

impl Criterion {
    fn start(id: usize, label: &'static str, limit_s: f64) -> Self {
        Criterion {
            id,
            label,
            limit_s,
            started: Instant::now(),
        }
    }

    fn finish(self, ok: bool, detail: String) {
        let elapsed = self.started.elapsed().as_secs_f64();
        let within_budget = elapsed <= self.limit_s;
        let verdict = if ok && within_budget { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} ({}): {verdict} [{elapsed:.1}s / {}s] {detail}",
            self.id, self.label, self.limit_s
        );
        assert!(ok, "criterion {} failed: {detail}", self.id);
        assert!(
            within_budget,
            "criterion {} exceeded its runtime budget: {elapsed:.1}s > {}s",
            self.id, self.limit_s
        );
    }
}

fn random_symmetric(d: usize, stream: &mut GaussStream) -> Array2<f64> {
    let mut a = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in i..d {
            let v = stream.next_gauss();
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    a
}

fn random_matrix(n: usize, d: usize, stream: &mut GaussStream) -> Array2<f64> {
    let mut x = Array2::<f64>::zeros((n, d));
    for v in x.iter_mut() {
        *v = stream.next_gauss();
    }
    x
}

fn operator_norm(a: &Array2<f64>) -> f64 {
    let eig = top_eigen(a, a.nrows()).unwrap();
    eig.values().iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

#[test]
fn criterion_01_mislabeling_oracle_equivalence() {
    let c = Criterion::start(1, "mislabeling matching = exhaustive", 5.0);
    let mut stream = GaussStream::new(0xAC01);
    let mut checked = 0usize;
    let mut ok = true;
    for _ in 0..1000 {
        let k = 2 + (stream.next_uniform() * 5.0) as usize; // K in 2..=6
        let n = 1 + (stream.next_uniform() * 12.0) as usize; // n in 1..=12
        let draw = |s: &mut GaussStream| -> Vec<usize> {
            (0..n)
                .map(|_| (s.next_uniform() * k as f64) as usize)
                .collect()
        };
        let predicted = draw(&mut stream);
        let truth = draw(&mut stream);
        let a = mislabeling_exhaustive(&predicted, &truth, k).unwrap();
        let b = mislabeling_matching(&predicted, &truth, k).unwrap();
        if a != b {
            ok = false;
            break;
        }
        checked += 1;
    }
    c.finish(ok, format!("{checked}/1000 pairs agree exactly"));
}

#[test]
fn criterion_02_eigen_and_singular_correctness() {
    let c = Criterion::start(2, "eigen/SVD residuals and Gram route", 30.0);
    let mut stream = GaussStream::new(0xAC02);
    let mut worst_residual = 0.0f64;
    let mut worst_recon = 0.0f64;
    let mut worst_gram = 0.0f64;
    for trial in 0..100u64 {
        let d = 2 + (trial as usize * 7) % 63; // d ≤ 64
        let a = random_symmetric(d, &mut stream);
        let basis = top_eigen(&a, d).unwrap();
        // Per-pair residuals.
        for (j, &lambda) in basis.values().iter().enumerate() {
            let v = basis.vectors().column(j);
            let av = a.dot(&v);
            let mut res = 0.0;
            for i in 0..d {
                let r = av[i] - lambda * v[i];
                res += r * r;
            }
            worst_residual = worst_residual.max(res.sqrt() / (1.0 + lambda.abs()));
        }
        // Full-spectrum reconstruction.
        let mut recon = Array2::<f64>::zeros((d, d));
        for (j, &lambda) in basis.values().iter().enumerate() {
            let v = basis.vectors().column(j);
            for p in 0..d {
                for q in 0..d {
                    recon[[p, q]] += lambda * v[p] * v[q];
                }
            }
        }
        let frob = (&a - &recon).iter().map(|x| x * x).sum::<f64>().sqrt();
        worst_recon = worst_recon.max(frob);

        // Gram-route singular subspace vs direct eigendecomposition.
        let n = d + 1 + (trial as usize % 9);
        let x = random_matrix(n, d, &mut stream);
        let k = 1 + (trial as usize % 4).min(d - 1);
        let singular = top_right_singular(&x, k).unwrap();
        let direct = top_eigen(&x.t().dot(&x), k).unwrap();
        let dist = subspace_distance(&singular, &direct).unwrap();
        worst_gram = worst_gram.max(dist);
    }
    let ok = worst_residual <= 1e-8 && worst_recon <= 1e-7 && worst_gram <= 1e-7;
    c.finish(
        ok,
        format!(
            "worst residual {worst_residual:.2e}, reconstruction {worst_recon:.2e}, gram {worst_gram:.2e}"
        ),
    );
}

#[test]
fn criterion_03_weyl_and_davis_kahan() {
    let c = Criterion::start(3, "Weyl and Davis-Kahan invariants", 30.0);
    let mut stream = GaussStream::new(0xAC03);
    let mut weyl_ok = true;
    let mut dk_ok = true;
    let mut dk_checked = 0usize;
    for trial in 0..200usize {
        let d = 6 + trial % 43; // d ≤ 48
                                // Weyl: random symmetric A and perturbation E.
        let a = random_symmetric(d, &mut stream);
        let e = random_symmetric(d, &mut stream).mapv(|v| 0.3 * v);
        let ae = &a + &e;
        let lam_a = top_eigen(&a, d).unwrap().values().to_vec();
        let lam_ae = top_eigen(&ae, d).unwrap().values().to_vec();
        let e_norm = operator_norm(&e);
        for i in 0..d {
            if (lam_a[i] - lam_ae[i]).abs() > e_norm + 1e-8 {
                weyl_ok = false;
            }
        }

        // Davis-Kahan: spiked S = QΛQᵀ with a known gap at rank r.
        let r = 1 + trial % 3;
        let q = top_right_singular(&random_matrix(d + 4, d, &mut stream), d).unwrap();
        let mut s = Array2::<f64>::zeros((d, d));
        for j in 0..d {
            let value = if j < r {
                4.0 + (r - j) as f64
            } else {
                0.2 / (1.0 + j as f64)
            };
            let col = q.vectors().column(j);
            for p in 0..d {
                for t in 0..d {
                    s[[p, t]] += value * col[p] * col[t];
                }
            }
        }
        let gap = (4.0 + 1.0) - 0.2 / (1.0 + r as f64);
        let mut e = random_symmetric(d, &mut stream);
        let scale = 0.9 * (1.0 - std::f64::consts::FRAC_1_SQRT_2) * gap / (2.0 * operator_norm(&e));
        e.mapv_inplace(|v| v * scale);
        let e_norm = operator_norm(&e);
        if 2.0 * e_norm <= (1.0 - std::f64::consts::FRAC_1_SQRT_2) * gap {
            let top = top_eigen(&s, r).unwrap();
            let top_pert = top_eigen(&(&s + &e), r).unwrap();
            let dist = subspace_distance(&top, &top_pert).unwrap();
            if dist > 2.0 * e_norm / gap + 1e-8 {
                dk_ok = false;
            }
            dk_checked += 1;
        }
    }
    let ok = weyl_ok && dk_ok && dk_checked == 200;
    c.finish(
        ok,
        format!("weyl={weyl_ok} davis_kahan={dk_ok} trials={dk_checked}/200"),
    );
}

#[test]
fn criterion_04_kmeans_reaches_global_optimum() {
    let c = Criterion::start(4, "K-means equals brute force (n ≤ 12, K = 2)", 30.0);
    let mut stream = GaussStream::new(0xAC04);
    let mut ok = true;
    let mut worst_gap = 0.0f64;
    for trial in 0..50u64 {
        let n = 4 + (trial as usize % 9); // n ≤ 12
        let m = 1 + (trial as usize % 3);
        let points = random_matrix(n, m, &mut stream);
        let mut cfg = KMeansConfig::new(2, trial);
        cfg.restarts = 40;
        let result = kmeans(&points, &cfg).unwrap();
        let best = brute_force_two_means(&points);
        let rel = (result.objective - best).abs() / best.max(1e-12);
        worst_gap = worst_gap.max(rel);
        if rel > 1e-9 {
            ok = false;
        }
    }
    c.finish(ok, format!("worst relative gap {worst_gap:.2e}"));
}

fn brute_force_two_means(points: &Array2<f64>) -> f64 {
    let n = points.nrows();
    let m = points.ncols();
    let mut best = f64::INFINITY;
    for mask in 1u32..((1 << n) - 1) {
        let mut sums = [vec![0.0; m], vec![0.0; m]];
        let mut counts = [0usize; 2];
        for i in 0..n {
            let part = ((mask >> i) & 1) as usize;
            counts[part] += 1;
            for j in 0..m {
                sums[part][j] += points[[i, j]];
            }
        }
        let mut obj = 0.0;
        for i in 0..n {
            let part = ((mask >> i) & 1) as usize;
            for j in 0..m {
                let diff = points[[i, j]] - sums[part][j] / counts[part] as f64;
                obj += diff * diff;
            }
        }
        best = best.min(obj);
    }
    best
}

fn fig1_scenario(grid: Vec<f64>, replicates: usize) -> Scenario {
    Scenario {
        name: "fig1_acceptance".into(),
        n: 200,
        d: 100,
        clusters: 2,
        factor_rank: 3,
        loading: LoadingKind::Fig1,
        grid,
        methods: vec!["spectral".into(), "fasc(r=3)".into()],
        replicates,
        base_seed: 0xF161,
        mode: SplitMode::FullSample,
        embed_dim: None,
        kmeans_restarts: None,
    }
}

fn mean_by(records: &[fasc::harness::ExperimentRecord], method: &str, sigma: f64) -> f64 {
    let group: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && r.sigma == sigma)
        .map(|r| r.mislabeling)
        .collect();
    group.iter().sum::<f64>() / group.len() as f64
}

#[test]
fn criterion_05_fig1_toy_reproduction() {
    let c = Criterion::start(5, "fig1 toy bands over the t grid", 180.0);
    let grid = vec![1.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0];
    let sc = fig1_scenario(grid.clone(), 20);

    // (a) Closed-form optimal rate stays below 0.02 at every t.
    let oracle = run_oracle_curve(&sc).unwrap();
    let a_ok = oracle.iter().all(|p| p.optimal_rate <= 0.02);
    let worst_rate = oracle.iter().fold(0.0f64, |acc, p| acc.max(p.optimal_rate));

    let records = run_scenario(&sc, &RunOptions::default()).unwrap();
    // (b) Factor adjustment keeps the mislabeling small at every t.
    let mut b_ok = true;
    let mut fasc_means = Vec::new();
    for &t in &grid {
        let m = mean_by(&records, "fasc(r=3)", t);
        fasc_means.push((t, m));
        if m > 0.05 {
            b_ok = false;
        }
    }
    // (c) Plain spectral deteriorates at t = 100.
    let spectral_100 = mean_by(&records, "spectral", 100.0);
    let fasc_100 = mean_by(&records, "fasc(r=3)", 100.0);
    let c_ok = spectral_100 >= fasc_100 + 0.10;

    let detail = format!(
        "optimal_rate_max={worst_rate:.3e}; fasc means {:?}; spectral(t=100)={spectral_100:.3}",
        fasc_means
            .iter()
            .map(|(t, m)| format!("t={t}:{m:.3}"))
            .collect::<Vec<_>>()
    );
    c.finish(a_ok && b_ok && c_ok, detail);
}

#[test]
fn criterion_06_strong_factor_recovery() {
    let c = Criterion::start(6, "strong-factor recovery at σ = 0.05", 180.0);
    let sc = Scenario {
        name: "strong_acceptance".into(),
        n: 1000,
        d: 100,
        clusters: 5,
        factor_rank: 3,
        loading: LoadingKind::Strong,
        grid: vec![0.05],
        methods: vec!["spectral".into(), "fasc(r=3)".into()],
        replicates: 20,
        base_seed: 0xAC06,
        mode: SplitMode::FullSample,
        embed_dim: None,
        kmeans_restarts: None,
    };
    let records = run_scenario(&sc, &RunOptions::default()).unwrap();
    let exact = records
        .iter()
        .filter(|r| r.method == "fasc(r=3)" && r.mislabeling == 0.0)
        .count();
    let spectral_mean = mean_by(&records, "spectral", 0.05);
    let ok = exact >= 18 && spectral_mean >= 0.3;
    c.finish(
        ok,
        format!("fasc exact in {exact}/20 seeds; spectral mean {spectral_mean:.3}"),
    );
}

#[test]
fn criterion_07_vary_algorithm_rank() {
    let c = Criterion::start(7, "rank sweep separation at σ = 0.1", 300.0);
    let sc = Scenario {
        name: "vary_r_acceptance".into(),
        n: 1000,
        d: 100,
        clusters: 5,
        factor_rank: 3,
        loading: LoadingKind::Strong,
        grid: vec![0.1],
        methods: (1..=5).map(|r| format!("fasc(r={r})")).collect(),
        replicates: 20,
        base_seed: 0xAC07,
        mode: SplitMode::FullSample,
        embed_dim: None,
        kmeans_restarts: None,
    };
    let records = run_scenario(&sc, &RunOptions::default()).unwrap();
    let means: Vec<f64> = (1..=5)
        .map(|r| mean_by(&records, &format!("fasc(r={r})"), 0.1))
        .collect();
    let mut ok = means.iter().all(|m| m.is_finite());
    for good in 2..5 {
        for bad in 0..2 {
            if means[good] > means[bad] - 0.15 {
                ok = false;
            }
        }
    }
    c.finish(ok, format!("means by rank {means:?}"));
}

#[test]
fn criterion_08_weak_factor_recovery() {
    let c = Criterion::start(8, "weak-factor recovery at σ = 0.05", 180.0);
    let sc = Scenario {
        name: "weak_acceptance".into(),
        n: 1000,
        d: 100,
        clusters: 5,
        factor_rank: 3,
        loading: LoadingKind::Weak,
        grid: vec![0.05],
        methods: vec!["fasc(r=3)".into()],
        replicates: 20,
        base_seed: 0xAC08,
        mode: SplitMode::FullSample,
        embed_dim: None,
        kmeans_restarts: None,
    };
    let records = run_scenario(&sc, &RunOptions::default()).unwrap();
    let mean = mean_by(&records, "fasc(r=3)", 0.05);
    c.finish(mean <= 0.05, format!("fasc mean {mean:.4}"));
}

#[test]
fn criterion_09_snr_ordering_and_woodbury() {
    let c = Criterion::start(9, "SNR ordering and Woodbury closed form", 10.0);
    let mut stream = GaussStream::new(0xAC09);
    let mut ordering_ok = true;
    for trial in 0..200usize {
        let d = 3 + trial % 20;
        let r = trial % 4;
        let mut loading = Array2::<f64>::zeros((d, r));
        for v in loading.iter_mut() {
            *v = stream.next_gauss();
        }
        let clusters = 2 + trial % 3;
        let mut centroids = Array2::<f64>::zeros((clusters, d));
        for v in centroids.iter_mut() {
            *v = stream.next_gauss();
        }
        let mean = centroids.sum_axis(ndarray::Axis(0)) / clusters as f64;
        for mut row in centroids.rows_mut() {
            row -= &mean;
        }
        let sigma = 0.05 + stream.next_uniform();
        let spec = FactorMixtureSpec::new(
            centroids,
            loading,
            sigma,
            vec![1.0 / clusters as f64; clusters],
            true,
        )
        .unwrap();
        let report = snr_report(&spec).unwrap();
        if report.s_quantity > report.snr_bar * (1.0 + 1e-12) {
            ordering_ok = false;
        }
    }

    // Woodbury agreement for the fig1-toy covariance family.
    let d = 100;
    let r = 3;
    let mut b = Array2::<f64>::zeros((d, r));
    for v in b.iter_mut() {
        *v = stream.next_gauss();
    }
    let mut mu = Array1::<f64>::zeros(d);
    mu[0] = 10.0;
    let mut woodbury_ok = true;
    let mut worst_rel = 0.0f64;
    for &t in &[1.0f64, 10.0, 100.0] {
        let mut centroids = Array2::<f64>::zeros((2, d));
        centroids.row_mut(0).assign(&mu);
        centroids.row_mut(1).assign(&mu.mapv(|v| -v));
        let spec = FactorMixtureSpec::new(
            centroids,
            b.mapv(|v| v * t.sqrt()),
            1.0,
            vec![0.5, 0.5],
            true,
        )
        .unwrap();
        let got = snr_report(&spec).unwrap().snr.unwrap();
        // Woodbury: μᵀ(I + tBBᵀ)⁻¹μ = ‖μ‖² − (Bᵀμ)ᵀ(I/t + BᵀB)⁻¹(Bᵀμ).
        let btmu = b.t().dot(&mu);
        let mut small = b.t().dot(&b);
        for i in 0..r {
            small[[i, i]] += 1.0 / t;
        }
        let inner = gauss_solve(&small, &btmu);
        let expected = mu.dot(&mu) - btmu.dot(&inner);
        let rel = ((got - expected) / expected).abs();
        worst_rel = worst_rel.max(rel);
        if rel > 1e-8 {
            woodbury_ok = false;
        }
    }
    c.finish(
        ordering_ok && woodbury_ok,
        format!("ordering on 200 specs; Woodbury worst relative error {worst_rel:.2e}"),
    );
}

fn gauss_solve(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().partial_cmp(&m[[j, col]].abs()).unwrap())
            .unwrap();
        if pivot != col {
            for j in 0..n {
                let tmp = m[[col, j]];
                m[[col, j]] = m[[pivot, j]];
                m[[pivot, j]] = tmp;
            }
            rhs.swap(col, pivot);
        }
        for i in (col + 1)..n {
            let f = m[[i, col]] / m[[col, col]];
            for j in col..n {
                m[[i, j]] -= f * m[[col, j]];
            }
            rhs[i] -= f * rhs[col];
        }
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= m[[i, j]] * x[j];
        }
        x[i] = acc / m[[i, i]];
    }
    x
}

#[test]
fn criterion_10_simulation_determinism() {
    let c = Criterion::start(10, "byte-identical repeated simulate", 120.0);
    let sc = {
        let mut sc = fig1_scenario(vec![5.0, 40.0], 3);
        sc.name = "determinism_acceptance".into();
        sc
    };
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    // Different thread counts on purpose: ordering must not depend on them.
    let a = run_scenario(
        &sc,
        &RunOptions {
            jobs: Some(1),
            timing: false,
        },
    )
    .unwrap();
    let b = run_scenario(
        &sc,
        &RunOptions {
            jobs: Some(4),
            timing: false,
        },
    )
    .unwrap();
    emit_csv(&a, &path_a).unwrap();
    emit_csv(&b, &path_b).unwrap();
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    let ok = bytes_a == bytes_b && !bytes_a.is_empty();
    c.finish(ok, format!("{} bytes compared", bytes_a.len()));
}

/// Needs `data/mice_protein.csv` and `data/codon_usage.csv` (see
/// `scripts/fetch_uci.sh`); skipped in normal CI.
#[test]
#[ignore]
fn criterion_11_realdata_tables() {
    let c = Criterion::start(11, "UCI table reproduction", 1800.0);
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let scenarios = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");

    let mut ok = true;
    let mut detail = String::new();

    // Mice protein: FASC r=1 band and the scree gap.
    let doc = ScenarioDoc::load(&scenarios.join("realdata_mice.toml")).unwrap();
    let plan = match doc {
        ScenarioDoc::RealData(p) => p,
        _ => unreachable!(),
    };
    let mice_csv = root.join(&plan.path);
    let outcome = run_realdata(&plan, &mice_csv).unwrap();
    let fasc1 = outcome
        .records
        .iter()
        .find(|r| r.method == "fasc(r=1)")
        .unwrap()
        .mislabeling;
    let baseline = outcome
        .records
        .iter()
        .find(|r| r.method == "baseline_random")
        .unwrap()
        .mislabeling;
    let scree_gap_ok =
        outcome.scree[0] > 3.0 * outcome.scree[2] && outcome.scree[1] > 3.0 * outcome.scree[2];
    detail.push_str(&format!(
        "mice fasc(r=1)={fasc1:.3} baseline={baseline:.3} scree_gap_ok={scree_gap_ok}; "
    ));
    ok &= (0.48..=0.60).contains(&fasc1);
    ok &= (baseline - 0.875).abs() <= 0.01;
    ok &= scree_gap_ok;

    // Codon usage: FASC r=1 band and the baseline.
    let doc = ScenarioDoc::load(&scenarios.join("realdata_codon.toml")).unwrap();
    let plan = match doc {
        ScenarioDoc::RealData(p) => p,
        _ => unreachable!(),
    };
    let codon_csv = root.join(&plan.path);
    let outcome = run_realdata(&plan, &codon_csv).unwrap();
    let fasc1 = outcome
        .records
        .iter()
        .find(|r| r.method == "fasc(r=1)")
        .unwrap()
        .mislabeling;
    let baseline = outcome
        .records
        .iter()
        .find(|r| r.method == "baseline_random")
        .unwrap()
        .mislabeling;
    detail.push_str(&format!(
        "codon fasc(r=1)={fasc1:.3} baseline={baseline:.3}"
    ));
    ok &= (0.45..=0.57).contains(&fasc1);
    ok &= (baseline - 0.875).abs() <= 0.01;

    c.finish(ok, detail);
}

#[test]
fn criterion_05_fig1_toy_paired_ordering() {
    // Companion check to criterion 5's band (c): over the top of the grid,
    // spectral clustering is worse than factor adjustment on paired seeds.
    let c = Criterion::start(5, "fig1 toy paired ordering over t ∈ {80, 100}", 120.0);
    let sc = {
        let mut sc = fig1_scenario(vec![80.0, 100.0], 20);
        sc.name = "fig1_paired".into();
        sc
    };
    let records = run_scenario(&sc, &RunOptions::default()).unwrap();
    let mut wins = 0usize;
    let mut pairs = 0usize;
    for &t in &[80.0, 100.0] {
        for rep in 0..20usize {
            let s = records
                .iter()
                .find(|r| r.method == "spectral" && r.sigma == t && r.replicate == rep)
                .unwrap();
            let f = records
                .iter()
                .find(|r| r.method == "fasc(r=3)" && r.sigma == t && r.replicate == rep)
                .unwrap();
            if s.mislabeling > f.mislabeling {
                wins += 1;
            }
            pairs += 1;
        }
    }
    // One-sided sign test at 40 pairs: 28 wins is far beyond the 5% bar.
    let ok = wins >= 28;
    c.finish(ok, format!("spectral worse on {wins}/{pairs} paired seeds"));
}
