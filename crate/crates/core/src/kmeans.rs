//! Seeded K-means: `++`-style initialization followed by Lloyd iteration,
//! repeated over independent restarts, keeping the best objective.
//!
//! Restart `i` derives its sub-seed as `seed + i`, so running restarts in
//! any order (or in parallel) selects the same winner; ties between equal
//! objectives go to the lowest restart index.

use ndarray::Array2;

use crate::dataset::GaussStream;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    pub clusters: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative objective-decrease threshold for convergence.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(clusters: usize, seed: u64) -> Self {
        KMeansConfig {
            clusters,
            restarts: 10,
            max_iters: 300,
            tol: 1e-8,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::validation("cluster count must be at least 1"));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::validation(
                "restarts and max_iters must be at least 1",
            ));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::validation("tol must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// 0-based cluster assignment per point.
    pub labels: Vec<usize>,
    /// `K×m` fitted centers.
    pub centers: Array2<f64>,
    /// Sum of squared distances to the assigned centers.
    pub objective: f64,
    pub iterations_used: usize,
    pub restart_index: usize,
}

/// Best-objective Lloyd run over the configured restarts.
pub fn kmeans(points: &Array2<f64>, cfg: &KMeansConfig) -> Result<KMeansResult> {
    cfg.validate()?;
    let n = points.nrows();
    if n < cfg.clusters {
        return Err(Error::validation(format!(
            "{n} points cannot form {} clusters",
            cfg.clusters
        )));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("points must be finite"));
    }

    let mut best: Option<KMeansResult> = None;
    for restart in 0..cfg.restarts {
        let run = lloyd_once(points, cfg, restart);
        let better = match &best {
            None => true,
            Some(b) => run.objective < b.objective,
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Nearest-center index for every point; exact ties go to the lowest index.
pub fn assign(points: &Array2<f64>, centers: &Array2<f64>) -> Result<Vec<usize>> {
    if points.ncols() != centers.ncols() {
        return Err(Error::validation(format!(
            "point dimension {} does not match center dimension {}",
            points.ncols(),
            centers.ncols()
        )));
    }
    Ok((0..points.nrows())
        .map(|i| nearest_center(points, centers, i).0)
        .collect())
}

fn nearest_center(points: &Array2<f64>, centers: &Array2<f64>, i: usize) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for c in 0..centers.nrows() {
        let mut dist = 0.0;
        for j in 0..points.ncols() {
            let diff = points[[i, j]] - centers[[c, j]];
            dist += diff * diff;
        }
        if dist < best.1 {
            best = (c, dist);
        }
    }
    best
}

fn lloyd_once(points: &Array2<f64>, cfg: &KMeansConfig, restart: usize) -> KMeansResult {
    let n = points.nrows();
    let m = points.ncols();
    let k = cfg.clusters;
    let mut stream = GaussStream::new(cfg.seed.wrapping_add(restart as u64));

    let mut centers = plus_plus_init(points, k, &mut stream);
    let mut labels = vec![0usize; n];
    let mut previous_labels: Option<Vec<usize>> = None;
    let mut objective = f64::INFINITY;
    let mut iterations = 0usize;

    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        let mut new_objective = 0.0;
        for (i, label) in labels.iter_mut().enumerate() {
            let (c, dist) = nearest_center(points, &centers, i);
            *label = c;
            new_objective += dist;
        }

        // Labels unchanged since the last update means the centers are
        // already the means of these labels: a Lloyd fixed point. The
        // relative-decrease stop also only fires after an update.
        let converged = previous_labels.as_deref() == Some(labels.as_slice())
            || (objective.is_finite()
                && objective - new_objective <= cfg.tol * objective.max(f64::MIN_POSITIVE));
        objective = new_objective;
        if converged {
            break;
        }
        previous_labels = Some(labels.clone());

        // Update step: centers become the means of their members.
        let mut sums = Array2::<f64>::zeros((k, m));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for j in 0..m {
                sums[[labels[i], j]] += points[[i, j]];
            }
        }
        let mut claimed: Vec<usize> = Vec::new();
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..m {
                    centers[[c, j]] = sums[[c, j]] / counts[c] as f64;
                }
            } else {
                // Re-seed a starved cluster at the point currently farthest
                // from its own center (each such point claimed once).
                let far = farthest_point(points, &centers, &labels, &claimed);
                claimed.push(far);
                for j in 0..m {
                    centers[[c, j]] = points[[far, j]];
                }
            }
        }
    }

    KMeansResult {
        labels,
        centers,
        objective,
        iterations_used: iterations,
        restart_index: restart,
    }
}

fn farthest_point(
    points: &Array2<f64>,
    centers: &Array2<f64>,
    labels: &[usize],
    claimed: &[usize],
) -> usize {
    let mut best = (0usize, -1.0f64);
    for i in 0..points.nrows() {
        if claimed.contains(&i) {
            continue;
        }
        let mut dist = 0.0;
        for j in 0..points.ncols() {
            let diff = points[[i, j]] - centers[[labels[i], j]];
            dist += diff * diff;
        }
        if dist > best.1 {
            best = (i, dist);
        }
    }
    best.0
}

/// `++`-style seeding: first center uniform, the rest sampled with
/// probability proportional to the squared distance to the chosen set.
fn plus_plus_init(points: &Array2<f64>, k: usize, stream: &mut GaussStream) -> Array2<f64> {
    let n = points.nrows();
    let m = points.ncols();
    let mut centers = Array2::<f64>::zeros((k, m));

    let first = (stream.next_uniform() * n as f64) as usize % n;
    for j in 0..m {
        centers[[0, j]] = points[[first, j]];
    }

    let mut dist_sq = vec![0.0f64; n];
    for c in 1..k {
        let mut total = 0.0;
        for (i, slot) in dist_sq.iter_mut().enumerate() {
            let mut best = f64::INFINITY;
            for prev in 0..c {
                let mut d = 0.0;
                for j in 0..m {
                    let diff = points[[i, j]] - centers[[prev, j]];
                    d += diff * diff;
                }
                best = best.min(d);
            }
            *slot = best;
            total += best;
        }
        let pick = if total > 0.0 {
            let target = stream.next_uniform() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in dist_sq.iter().enumerate() {
                acc += d;
                if target < acc {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass is zero (duplicate points); any index works.
            (stream.next_uniform() * n as f64) as usize % n
        };
        for j in 0..m {
            centers[[c, j]] = points[[pick, j]];
        }
    }
    centers
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn random_points(n: usize, m: usize, seed: u64) -> Array2<f64> {
        let mut stream = GaussStream::new(seed);
        let mut x = Array2::<f64>::zeros((n, m));
        for v in x.iter_mut() {
            *v = stream.next_gauss();
        }
        x
    }

    /// Exhaustive minimum of the K-means objective over all assignments,
    /// with centers at the per-part means. Feasible for n ≤ 12.
    fn brute_force_objective(points: &Array2<f64>, k: usize) -> f64 {
        let n = points.nrows();
        let m = points.ncols();
        assert!(k == 2, "oracle written for two clusters");
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            let mut sums = vec![vec![0.0; m]; 2];
            let mut counts = [0usize; 2];
            for i in 0..n {
                let part = ((mask >> i) & 1) as usize;
                counts[part] += 1;
                for j in 0..m {
                    sums[part][j] += points[[i, j]];
                }
            }
            if counts[0] == 0 || counts[1] == 0 {
                continue;
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

    #[test]
    fn two_separated_points_get_their_own_centers() {
        let points = arr2(&[[0.0], [10.0]]);
        let result = kmeans(&points, &KMeansConfig::new(2, 1)).unwrap();
        assert_eq!(result.objective, 0.0);
        let mut centers: Vec<f64> = result.centers.iter().copied().collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(centers, vec![0.0, 10.0]);
    }

    #[test]
    fn single_cluster_center_is_the_mean() {
        let points = arr2(&[[0.0, 0.0], [2.0, 0.0], [4.0, 6.0]]);
        let result = kmeans(&points, &KMeansConfig::new(1, 1)).unwrap();
        assert!((result.centers[[0, 0]] - 2.0).abs() < 1e-12);
        assert!((result.centers[[0, 1]] - 2.0).abs() < 1e-12);
        let scatter: f64 = points
            .rows()
            .into_iter()
            .map(|row| {
                let dx = row[0] - 2.0;
                let dy = row[1] - 2.0;
                dx * dx + dy * dy
            })
            .sum();
        assert!((result.objective - scatter).abs() <= 1e-9 * scatter);
    }

    #[test]
    fn reaches_the_global_optimum_on_small_instances() {
        for seed in 0..10 {
            let points = random_points(7, 2, 500 + seed);
            let mut cfg = KMeansConfig::new(2, seed);
            cfg.restarts = 40;
            let result = kmeans(&points, &cfg).unwrap();
            let best = brute_force_objective(&points, 2);
            assert!(
                (result.objective - best).abs() <= 1e-9 * best.max(1e-12),
                "seed {seed}: {} vs brute force {best}",
                result.objective
            );
        }
    }

    #[test]
    fn objective_is_consistent_with_labels_and_centers() {
        let points = random_points(40, 3, 77);
        let result = kmeans(&points, &KMeansConfig::new(3, 4)).unwrap();
        let mut recomputed = 0.0;
        for i in 0..40 {
            for j in 0..3 {
                let diff = points[[i, j]] - result.centers[[result.labels[i], j]];
                recomputed += diff * diff;
            }
        }
        assert!((recomputed - result.objective).abs() <= 1e-9 * recomputed.max(1e-12));
        // Self-consistency: every label is the nearest center.
        let reassigned = assign(&points, &result.centers).unwrap();
        assert_eq!(reassigned, result.labels);
    }

    #[test]
    fn assign_breaks_ties_toward_the_lowest_index() {
        let centers = arr2(&[[-1.0], [1.0], [5.0]]);
        let points = arr2(&[[0.0], [5.0]]);
        let labels = assign(&points, &centers).unwrap();
        assert_eq!(labels, vec![0, 2]);
    }

    #[test]
    fn assign_matches_a_naive_scan() {
        let points = random_points(20, 2, 9);
        let centers = random_points(3, 2, 10);
        let labels = assign(&points, &centers).unwrap();
        for i in 0..20 {
            let mut best = (0usize, f64::INFINITY);
            for c in 0..3 {
                let mut d = 0.0;
                for j in 0..2 {
                    let diff = points[[i, j]] - centers[[c, j]];
                    d += diff * diff;
                }
                if d < best.1 {
                    best = (c, d);
                }
            }
            assert_eq!(labels[i], best.0);
        }
    }

    #[test]
    fn more_restarts_never_hurt() {
        let points = random_points(60, 2, 13);
        let mut few = KMeansConfig::new(4, 31);
        few.restarts = 2;
        let mut many = KMeansConfig::new(4, 31);
        many.restarts = 8;
        let obj_few = kmeans(&points, &few).unwrap().objective;
        let obj_many = kmeans(&points, &many).unwrap().objective;
        assert!(obj_many <= obj_few + 1e-12);
    }

    #[test]
    fn permuting_rows_permutes_labels() {
        // Well-separated blobs: every restart lands in the same optimum,
        // so the partition is stable under row reordering.
        let mut points = random_points(30, 2, 15);
        for i in 0..30 {
            points[[i, 0]] += (i % 3) as f64 * 50.0;
        }
        let cfg = KMeansConfig::new(3, 8);
        let base = kmeans(&points, &cfg).unwrap();

        let perm: Vec<usize> = (0..30).rev().collect();
        let mut permuted = Array2::<f64>::zeros((30, 2));
        for (new_i, &old_i) in perm.iter().enumerate() {
            for j in 0..2 {
                permuted[[new_i, j]] = points[[old_i, j]];
            }
        }
        let shuffled = kmeans(&permuted, &cfg).unwrap();
        assert!((base.objective - shuffled.objective).abs() <= 1e-9 * base.objective.max(1e-12));
        // Same partition up to a relabeling of the cluster ids.
        let k = 3;
        let mut mapping = vec![usize::MAX; k];
        for (new_i, &old_i) in perm.iter().enumerate() {
            let a = shuffled.labels[new_i];
            let b = base.labels[old_i];
            if mapping[a] == usize::MAX {
                mapping[a] = b;
            }
            assert_eq!(mapping[a], b, "partition changed under row permutation");
        }
    }

    #[test]
    fn scaling_points_scales_the_objective_quadratically() {
        let points = random_points(25, 2, 19);
        let cfg = KMeansConfig::new(3, 6);
        let base = kmeans(&points, &cfg).unwrap();
        let scaled_points = points.mapv(|v| 3.0 * v);
        let scaled = kmeans(&scaled_points, &cfg).unwrap();
        assert_eq!(base.labels, scaled.labels);
        assert!((scaled.objective - 9.0 * base.objective).abs() <= 1e-9 * scaled.objective);
    }

    #[test]
    fn too_few_points_is_a_validation_error() {
        let points = arr2(&[[0.0], [1.0]]);
        assert!(kmeans(&points, &KMeansConfig::new(3, 1)).is_err());
    }

    #[test]
    fn lloyd_objective_is_monotone_within_a_restart() {
        // Track the per-iteration objective by running Lloyd manually.
        let points = random_points(50, 2, 23);
        let cfg = KMeansConfig::new(4, 2);
        let mut stream = GaussStream::new(cfg.seed);
        let mut centers = plus_plus_init(&points, 4, &mut stream);
        let mut prev = f64::INFINITY;
        for _ in 0..30 {
            let labels = assign(&points, &centers).unwrap();
            let mut obj = 0.0;
            for i in 0..50 {
                for j in 0..2 {
                    let diff = points[[i, j]] - centers[[labels[i], j]];
                    obj += diff * diff;
                }
            }
            assert!(obj <= prev + 1e-12, "objective rose from {prev} to {obj}");
            prev = obj;
            let mut sums = Array2::<f64>::zeros((4, 2));
            let mut counts = [0usize; 4];
            for i in 0..50 {
                counts[labels[i]] += 1;
                for j in 0..2 {
                    sums[[labels[i], j]] += points[[i, j]];
                }
            }
            for c in 0..4 {
                if counts[c] > 0 {
                    for j in 0..2 {
                        centers[[c, j]] = sums[[c, j]] / counts[c] as f64;
                    }
                }
            }
        }
    }
}
