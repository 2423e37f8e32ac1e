//! Kolmogorov-model domain types: per-user probability mass vectors on the
//! unit simplex, per-item binary indicator vectors, and the rating data they
//! are fitted to.
//!
//! The probability that user `u` "likes" item `i` is the inner product
//! `θ_u · ψ_i`, which always lies in `[0, 1]` because `θ_u` is a probability
//! mass vector and `ψ_i` selects a subset of its atoms.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};

/// Accepted deviation of a simplex vector's mass from one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Smallest admissible model dimension.
pub const MIN_DIM: usize = 2;

fn check_dim(dim: usize) -> Result<()> {
    if dim < MIN_DIM {
        return Err(KmError::Validation(format!(
            "model dimension must be at least {MIN_DIM}, got {dim}"
        )));
    }
    Ok(())
}

/// A point on the unit probability simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates and renormalizes. Entries within `-SIMPLEX_TOL` of zero are
    /// clamped to zero before renormalizing.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_dim(entries.len())?;
        let mut entries = entries;
        for x in entries.iter_mut() {
            if !x.is_finite() || *x < -SIMPLEX_TOL {
                return Err(KmError::Validation(format!(
                    "simplex entry {x} is negative or not finite"
                )));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(KmError::Validation(format!(
                "simplex entries sum to {sum}, not 1"
            )));
        }
        entries.iter_mut().for_each(|x| *x /= sum);
        Ok(Self(entries))
    }

    /// Validates like [`SimplexVector::new`] but keeps the entries bit for
    /// bit, for values that were normalized before being stored.
    pub fn from_normalized(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries.clone())?;
        if let Some(x) = entries.iter().find(|&&x| x < 0.0) {
            return Err(KmError::Validation(format!(
                "simplex entry {x} is negative"
            )));
        }
        Ok(Self(entries))
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self(vec![1.0 / dim as f64; dim]))
    }

    /// The `j`-th vertex of the simplex.
    pub fn vertex(dim: usize, j: usize) -> Result<Self> {
        check_dim(dim)?;
        if j >= dim {
            return Err(KmError::Validation(format!(
                "vertex {j} out of range for dim {dim}"
            )));
        }
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = KmError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(v: SimplexVector) -> Self {
        v.0
    }
}

/// A binary vector selecting a subset of the `D` elementary events.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorVector(Vec<bool>);

impl IndicatorVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Builds from `0`/`1` values; anything else is rejected.
    pub fn from_binary(values: &[u8]) -> Result<Self> {
        values
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(KmError::Validation(format!(
                    "indicator entry {other} is not 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![false; dim])
    }

    pub fn ones(dim: usize) -> Self {
        Self(vec![true; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, j: usize) -> bool {
        self.0[j]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Indices of the nonzero entries.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j)
    }

    /// `supp(self) ⊆ supp(other)`.
    pub fn support_subset_of(&self, other: &IndicatorVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }
}

fn check_same_dim(theta: &SimplexVector, psi: &IndicatorVector) -> Result<()> {
    if theta.dim() != psi.dim() {
        return Err(KmError::DimensionMismatch {
            expected: theta.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// `Pr(X = 1) = θᵀψ`.
pub fn km_probability(theta: &SimplexVector, psi: &IndicatorVector) -> Result<f64> {
    check_same_dim(theta, psi)?;
    Ok(theta
        .0
        .iter()
        .zip(&psi.0)
        .filter(|(_, &b)| b)
        .map(|(t, _)| t)
        .sum())
}

/// `Pr(X = 0) = θᵀ(1 − ψ)`.
pub fn km_complement(theta: &SimplexVector, psi: &IndicatorVector) -> Result<f64> {
    check_same_dim(theta, psi)?;
    Ok(theta
        .0
        .iter()
        .zip(&psi.0)
        .filter(|(_, &b)| !b)
        .map(|(t, _)| t)
        .sum())
}

/// Rating normalized by the maximum rating score.
pub fn empirical_probability(rating: f64, r_max: f64) -> Result<f64> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(KmError::Validation(format!(
            "r_max must be positive, got {r_max}"
        )));
    }
    if !(0.0..=r_max).contains(&rating) {
        return Err(KmError::Validation(format!(
            "rating {rating} outside [0, {r_max}]"
        )));
    }
    Ok(rating / r_max)
}

/// Trained model parameters keyed by dense internal user/item indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmParams {
    pub dim: usize,
    pub theta: BTreeMap<usize, SimplexVector>,
    pub psi: BTreeMap<usize, IndicatorVector>,
}

impl KmParams {
    pub fn new(
        dim: usize,
        theta: BTreeMap<usize, SimplexVector>,
        psi: BTreeMap<usize, IndicatorVector>,
    ) -> Result<Self> {
        check_dim(dim)?;
        for t in theta.values() {
            if t.dim() != dim {
                return Err(KmError::DimensionMismatch {
                    expected: dim,
                    found: t.dim(),
                });
            }
        }
        for p in psi.values() {
            if p.dim() != dim {
                return Err(KmError::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        Ok(Self { dim, theta, psi })
    }

    /// `θ_uᵀψ_i`, or `None` when either side is untrained.
    pub fn predict_one(&self, user: usize, item: usize) -> Option<f64> {
        let t = self.theta.get(&user)?;
        let p = self.psi.get(&item)?;
        km_probability(t, p).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// One observed (user, item, empirical probability) triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub p: f64,
    pub split: Split,
}

/// Bidirectional map between raw dataset IDs and dense 0-based indices,
/// assigned in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    raw: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl IdMap {
    pub fn intern(&mut self, raw: u64) -> usize {
        if let Some(&ix) = self.index.get(&raw) {
            return ix;
        }
        let ix = self.raw.len();
        self.raw.push(raw);
        self.index.insert(raw, ix);
        ix
    }

    pub fn index_of(&self, raw: u64) -> Option<usize> {
        self.index.get(&raw).copied()
    }

    pub fn raw_of(&self, index: usize) -> Option<u64> {
        self.raw.get(index).copied()
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw_ids(&self) -> &[u64] {
        &self.raw
    }
}

/// Sparse empirical probabilities with a train/test partition.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingDataset {
    ratings: Vec<Rating>,
    r_max: f64,
    users: IdMap,
    items: IdMap,
}

impl RatingDataset {
    pub fn new(ratings: Vec<Rating>, r_max: f64, users: IdMap, items: IdMap) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(KmError::Validation(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(ratings.len());
        for r in &ratings {
            if !(0.0..=1.0).contains(&r.p) {
                return Err(KmError::Validation(format!(
                    "probability {} for ({}, {}) outside [0, 1]",
                    r.p, r.user, r.item
                )));
            }
            if r.user >= users.len() || r.item >= items.len() {
                return Err(KmError::Validation(format!(
                    "rating ({}, {}) references an unknown index",
                    r.user, r.item
                )));
            }
            if !seen.insert((r.user, r.item)) {
                return Err(KmError::Validation(format!(
                    "duplicate rating for user {:?}, item {:?}",
                    users.raw_of(r.user),
                    items.raw_of(r.item)
                )));
            }
        }
        Ok(Self {
            ratings,
            r_max,
            users,
            items,
        })
    }

    /// Builds a dataset from raw `(user, item, p)` triples, all labeled train.
    pub fn from_triples<I>(triples: I, r_max: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64, f64)>,
    {
        let mut users = IdMap::default();
        let mut items = IdMap::default();
        let ratings = triples
            .into_iter()
            .map(|(u, i, p)| Rating {
                user: users.intern(u),
                item: items.intern(i),
                p,
                split: Split::Train,
            })
            .collect();
        Self::new(ratings, r_max, users, items)
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn users(&self) -> &IdMap {
        &self.users
    }

    pub fn items(&self) -> &IdMap {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn train(&self) -> impl Iterator<Item = &Rating> {
        self.ratings.iter().filter(|r| r.split == Split::Train)
    }

    pub fn test(&self) -> impl Iterator<Item = &Rating> {
        self.ratings.iter().filter(|r| r.split == Split::Test)
    }

    /// Same triples with the given split labels (one per rating, in order).
    pub fn with_splits(&self, splits: &[Split]) -> Result<Self> {
        if splits.len() != self.ratings.len() {
            return Err(KmError::DimensionMismatch {
                expected: self.ratings.len(),
                found: splits.len(),
            });
        }
        let mut out = self.clone();
        for (r, &s) in out.ratings.iter_mut().zip(splits) {
            r.split = s;
        }
        Ok(out)
    }
}

/// Outcome of evaluating a model on a subset of triples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub rmse: f64,
    pub evaluated: usize,
    /// Triples whose user or item has no trained parameters.
    pub skipped: usize,
}

fn rmse_of<'a>(residuals: impl Iterator<Item = f64> + 'a) -> (f64, usize) {
    let (sum, n) = residuals.fold((0.0, 0usize), |(s, n), r| (s + r * r, n + 1));
    ((sum / n.max(1) as f64).sqrt(), n)
}

/// Root-mean-square error over the training triples. Every training triple
/// must have parameters.
pub fn training_rmse(params: &KmParams, data: &RatingDataset) -> Result<f64> {
    let mut residuals = Vec::new();
    for r in data.train() {
        let pred = params.predict_one(r.user, r.item).ok_or_else(|| {
            KmError::MissingParameters(format!("training pair ({}, {})", r.user, r.item))
        })?;
        residuals.push(r.p - pred);
    }
    if residuals.is_empty() {
        return Err(KmError::Validation("training set is empty".into()));
    }
    Ok(rmse_of(residuals.into_iter()).0)
}

/// RMSE over the test triples on the probability scale. Test triples whose
/// user or item never appeared in training are skipped and counted.
pub fn test_nrmse(params: &KmParams, data: &RatingDataset) -> Result<Evaluation> {
    let total = data.test().count();
    if total == 0 {
        return Err(KmError::Validation("test set is empty".into()));
    }
    let residuals: Vec<f64> = data
        .test()
        .filter_map(|r| params.predict_one(r.user, r.item).map(|pred| r.p - pred))
        .collect();
    if residuals.is_empty() {
        return Err(KmError::Validation(
            "no test triple has trained parameters".into(),
        ));
    }
    let (rmse, evaluated) = rmse_of(residuals.into_iter());
    Ok(Evaluation {
        rmse,
        evaluated,
        skipped: total - evaluated,
    })
}
