//! Permutation-invariant mislabeling: the fraction of misassigned points
//! minimized exactly over all relabelings of the cluster alphabet.
//!
//! Exhaustive search over the `K!` permutations is used for `K ≤ 8`;
//! beyond that the minimum-cost assignment on the confusion matrix gives
//! the same exact answer in O(K³). Both run on integer counts, so there is
//! no floating-point slack in either route.

use ndarray::Array2;

use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};

const EXHAUSTIVE_LIMIT: usize = 8;

/// Exact minimum mislabeling rate in `[0, 1]`.
///
/// Labels are 0-based and must lie in `[0, num_classes)`. If the two label
/// vectors use alphabets of different sizes, pass the larger size; the
/// confusion matrix pads the smaller alphabet with empty classes.
pub fn mislabeling(predicted: &[usize], truth: &[usize], num_classes: usize) -> Result<f64> {
    let confusion = confusion_matrix(predicted, truth, num_classes)?;
    let matched = if num_classes <= EXHAUSTIVE_LIMIT {
        max_matched_exhaustive(&confusion)
    } else {
        max_matched_assignment(&confusion)
    };
    Ok(1.0 - matched as f64 / predicted.len() as f64)
}

/// Exhaustive-permutation route, exposed for cross-checking.
pub fn mislabeling_exhaustive(
    predicted: &[usize],
    truth: &[usize],
    num_classes: usize,
) -> Result<f64> {
    let confusion = confusion_matrix(predicted, truth, num_classes)?;
    Ok(1.0 - max_matched_exhaustive(&confusion) as f64 / predicted.len() as f64)
}

/// Assignment-based route, exposed for cross-checking.
pub fn mislabeling_matching(
    predicted: &[usize],
    truth: &[usize],
    num_classes: usize,
) -> Result<f64> {
    let confusion = confusion_matrix(predicted, truth, num_classes)?;
    Ok(1.0 - max_matched_assignment(&confusion) as f64 / predicted.len() as f64)
}

fn confusion_matrix(
    predicted: &[usize],
    truth: &[usize],
    num_classes: usize,
) -> Result<Vec<Vec<u64>>> {
    if predicted.len() != truth.len() {
        return Err(Error::validation(format!(
            "label vectors have different lengths: {} vs {}",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::validation("label vectors are empty"));
    }
    if num_classes == 0 {
        return Err(Error::validation("num_classes must be at least 1"));
    }
    let mut confusion = vec![vec![0u64; num_classes]; num_classes];
    for (i, (&p, &t)) in predicted.iter().zip(truth).enumerate() {
        if p >= num_classes || t >= num_classes {
            return Err(Error::validation(format!(
                "label out of range at index {i}: predicted {p}, truth {t}, K = {num_classes}"
            )));
        }
        confusion[p][t] += 1;
    }
    Ok(confusion)
}

/// Maximum agreement over all permutations, by direct enumeration.
fn max_matched_exhaustive(confusion: &[Vec<u64>]) -> u64 {
    let k = confusion.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0u64;
    heap_permutations(&mut perm, k, &mut |p| {
        // p maps truth class t to predicted class p[t].
        let matched: u64 = (0..k).map(|t| confusion[p[t]][t]).sum();
        if matched > best {
            best = matched;
        }
    });
    best
}

fn heap_permutations(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == 1 {
        visit(perm);
        return;
    }
    for i in 0..k {
        heap_permutations(perm, k - 1, visit);
        if k.is_multiple_of(2) {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

/// Maximum agreement via minimum-cost assignment on the negated counts.
fn max_matched_assignment(confusion: &[Vec<u64>]) -> u64 {
    let k = confusion.len();
    let max_entry = confusion
        .iter()
        .flat_map(|row| row.iter())
        .copied()
        .max()
        .unwrap_or(0);
    let mut cost = Array2::<f64>::zeros((k, k));
    for p in 0..k {
        for t in 0..k {
            cost[[p, t]] = (max_entry - confusion[p][t]) as f64;
        }
    }
    let assignment = min_cost_assignment(&cost);
    assignment
        .iter()
        .enumerate()
        .map(|(p, &t)| confusion[p][t])
        .sum()
}
