use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

/// Number of target strata.
pub const N_QUANTILES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub k: usize,
    pub seed: u64,
    /// Fold index of each row.
    pub assignments: Vec<usize>,
}

impl FoldSplit {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// K-fold split that keeps scaffold groups intact and balances target
/// quintiles.
///
/// Groups are binned into quintiles of their mean target. Within each
/// quintile, groups go largest first to the fold holding the fewest rows of
/// that quintile; ties go to the smaller fold overall, then to a draw from
/// the `tie-break` substream. Equal-size groups are visited in a shuffled
/// order from the same stream.
pub fn stratified_kfold(scaffolds: &[u64], y: &[f64], k: usize, seed: u64) -> Result<FoldSplit> {
    if scaffolds.len() != y.len() {
        return Err(Error::shape("targets", scaffolds.len(), y.len()));
    }
    if scaffolds.is_empty() {
        return Err(Error::Split("dataset is empty".into()));
    }
    if k < 2 {
        return Err(Error::Split(format!("need at least 2 folds, got {k}")));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Split(format!("row {i} has a non-finite target")));
    }

    let mut groups: IndexMap<u64, Vec<usize>> = IndexMap::new();
    for (i, &key) in scaffolds.iter().enumerate() {
        groups.entry(key).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    if k > groups.len() {
        return Err(Error::Split(format!(
            "{k} folds requested but only {} scaffold groups",
            groups.len()
        )));
    }

    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&i| y[i]).sum::<f64>() / g.len() as f64)
        .collect();
    let mut by_mean: Vec<usize> = (0..groups.len()).collect();
    by_mean.sort_by(|&a, &b| means[a].total_cmp(&means[b]));
    let mut stratum = vec![0; groups.len()];
    for (rank, &g) in by_mean.iter().enumerate() {
        stratum[g] = rank * N_QUANTILES / groups.len();
    }

    let mut tie = rng::substream(seed, rng::TIE_BREAK);
    let mut totals = vec![0usize; k];
    let mut assignments = vec![usize::MAX; y.len()];
    for q in 0..N_QUANTILES {
        let mut members: Vec<usize> = (0..groups.len()).filter(|&g| stratum[g] == q).collect();
        members.shuffle(&mut tie);
        members.sort_by_key(|&g| std::cmp::Reverse(groups[g].len()));
        let mut in_stratum = vec![0usize; k];
        for g in members {
            let best = (0..k)
                .map(|f| (in_stratum[f], totals[f]))
                .min()
                .expect("k >= 2");
            let candidates: Vec<usize> =
                (0..k).filter(|&f| (in_stratum[f], totals[f]) == best).collect();
            let fold = candidates[tie.gen_range(0..candidates.len())];
            in_stratum[fold] += groups[g].len();
            totals[fold] += groups[g].len();
            for &i in &groups[g] {
                assignments[i] = fold;
            }
        }
    }
    Ok(FoldSplit {
        k,
        seed,
        assignments,
    })
}
