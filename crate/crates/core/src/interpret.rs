//! Logical relations read off the trained indicator vectors.
//!
//! `supp(ψ_j) ⊆ supp(ψ_i)` means every elementary event that makes item `i`
//! liked also makes item `j` liked, so liking `i` implies liking `j` and
//! disliking `j` implies disliking `i`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::model::{IndicatorVector, KmParams, RatingDataset};

/// `entries[r][c] = 1` iff `supp(ψ_{items[c]}) ⊆ supp(ψ_{items[r]})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    pub items: Vec<usize>,
    pub entries: Vec<Vec<bool>>,
}

impl AdjacencyMatrix {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.entries[r][c]
    }
}

pub fn build_adjacency(psis: &BTreeMap<usize, IndicatorVector>) -> Result<AdjacencyMatrix> {
    if psis.is_empty() {
        return Err(KmError::Validation(
            "no indicator vectors to compare".into(),
        ));
    }
    let items: Vec<usize> = psis.keys().copied().collect();
    let vecs: Vec<&IndicatorVector> = psis.values().collect();
    let entries = vecs
        .iter()
        .map(|row| vecs.iter().map(|col| col.support_subset_of(row)).collect())
        .collect();
    Ok(AdjacencyMatrix { items, entries })
}

/// Row means of the adjacency matrix, keyed by item.
pub fn influence_scores(n: &AdjacencyMatrix) -> BTreeMap<usize, f64> {
    let size = n.len() as f64;
    n.items
        .iter()
        .zip(&n.entries)
        .map(|(&i, row)| (i, row.iter().filter(|&&b| b).count() as f64 / size))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpliedRelations {
    /// Liking `i` implies liking `j`.
    pub forward: (usize, usize),
    /// Disliking `j` implies disliking `i`.
    pub backward: (usize, usize),
}

pub fn implied_relations(
    psis: &BTreeMap<usize, IndicatorVector>,
    i: usize,
    j: usize,
) -> Result<Option<ImpliedRelations>> {
    let pi = psis
        .get(&i)
        .ok_or_else(|| KmError::MissingParameters(format!("item {i}")))?;
    let pj = psis
        .get(&j)
        .ok_or_else(|| KmError::MissingParameters(format!("item {j}")))?;
    Ok(pj.support_subset_of(pi).then_some(ImpliedRelations {
        forward: (i, j),
        backward: (j, i),
    }))
}

/// Which raters of an anchor item appear in the accuracy table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RaterFilter {
    /// Only users whose probability for the anchor item meets the threshold.
    #[default]
    LikersOnly,
    AllRaters,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub item: usize,
    pub user: usize,
    pub rated_count: usize,
    pub accuracy: f64,
}

/// For every item with influence score 1 and each qualifying train user who
/// rated it, the share of that user's train ratings at or above
/// `like_threshold`.
pub fn mining_accuracy(
    params: &KmParams,
    data: &RatingDataset,
    like_threshold: f64,
    filter: RaterFilter,
) -> Result<Vec<AccuracyRow>> {
    if params.psi.is_empty() {
        return Ok(Vec::new());
    }
    let scores = influence_scores(&build_adjacency(&params.psi)?);
    let anchors: BTreeSet<usize> = scores
        .iter()
        .filter(|(_, &s)| s >= 1.0)
        .map(|(&i, _)| i)
        .collect();
    let mut per_user: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for r in data.train() {
        let e = per_user.entry(r.user).or_default();
        e.0 += 1;
        if r.p >= like_threshold {
            e.1 += 1;
        }
    }
    let mut rows = Vec::new();
    for r in data.train() {
        if !anchors.contains(&r.item) {
            continue;
        }
        if filter == RaterFilter::LikersOnly && r.p < like_threshold {
            continue;
        }
        let (count, liked) = per_user[&r.user];
        rows.push(AccuracyRow {
            item: r.item,
            user: r.user,
            rated_count: count,
            accuracy: liked as f64 / count as f64,
        });
    }
    rows.sort_by_key(|row| (row.item, row.user));
    Ok(rows)
}
