//! Model file: a versioned JSON header with base64-packed parameter arrays,
//! keyed by raw dataset IDs.
//!
//! ```json
//! {"format": "kmlearn-model", "version": 1, "dim": 4,
//!  "users": [196, 186], "items": [242, 302],
//!  "theta": "<base64 of little-endian f64, users × dim>",
//!  "psi": "<base64 of packed bits, items × ceil(dim/8) bytes, LSB first>"}
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::model::{IdMap, IndicatorVector, KmParams, SimplexVector, MIN_DIM};

pub const FORMAT_NAME: &str = "kmlearn-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    dim: usize,
    users: Vec<u64>,
    items: Vec<u64>,
    theta: String,
    psi: String,
}

/// Trained parameters keyed by raw user and item IDs.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredModel {
    pub dim: usize,
    pub theta: BTreeMap<u64, SimplexVector>,
    pub psi: BTreeMap<u64, IndicatorVector>,
}

fn invalid(msg: impl Into<String>) -> KmError {
    KmError::Validation(format!("model file: {}", msg.into()))
}

impl StoredModel {
    pub fn from_params(params: &KmParams, users: &IdMap, items: &IdMap) -> Result<Self> {
        let mut theta = BTreeMap::new();
        for (&u, t) in &params.theta {
            let raw = users
                .raw_of(u)
                .ok_or_else(|| KmError::MissingParameters(format!("raw id of user {u}")))?;
            theta.insert(raw, t.clone());
        }
        let mut psi = BTreeMap::new();
        for (&i, p) in &params.psi {
            let raw = items
                .raw_of(i)
                .ok_or_else(|| KmError::MissingParameters(format!("raw id of item {i}")))?;
            psi.insert(raw, p.clone());
        }
        Ok(Self {
            dim: params.dim,
            theta,
            psi,
        })
    }

    /// Parameters re-keyed by the dataset's internal indices. Users and items
    /// the dataset does not know are dropped.
    pub fn to_params(&self, users: &IdMap, items: &IdMap) -> Result<KmParams> {
        let theta = self
            .theta
            .iter()
            .filter_map(|(raw, t)| users.index_of(*raw).map(|u| (u, t.clone())))
            .collect();
        let psi = self
            .psi
            .iter()
            .filter_map(|(raw, p)| items.index_of(*raw).map(|i| (i, p.clone())))
            .collect();
        KmParams::new(self.dim, theta, psi)
    }

    /// `θᵀψ` by raw IDs.
    pub fn predict_raw(&self, user: u64, item: u64) -> Option<f64> {
        let t = self.theta.get(&user)?;
        let p = self.psi.get(&item)?;
        crate::model::km_probability(t, p).ok()
    }

    pub fn to_json(&self) -> Result<String> {
        let row_bytes = self.dim.div_ceil(8);
        let mut theta_bytes = Vec::with_capacity(self.theta.len() * self.dim * 8);
        for t in self.theta.values() {
            for v in t.as_slice() {
                theta_bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        let mut psi_bytes = vec![0u8; self.psi.len() * row_bytes];
        for (r, p) in self.psi.values().enumerate() {
            for k in p.support() {
                psi_bytes[r * row_bytes + k / 8] |= 1 << (k % 8);
            }
        }
        let file = ModelFile {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            dim: self.dim,
            users: self.theta.keys().copied().collect(),
            items: self.psi.keys().copied().collect(),
            theta: STANDARD.encode(theta_bytes),
            psi: STANDARD.encode(psi_bytes),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT_NAME {
            return Err(invalid(format!("unknown format {:?}", file.format)));
        }
        if file.version != FORMAT_VERSION {
            return Err(invalid(format!("unsupported version {}", file.version)));
        }
        let d = file.dim;
        if d < MIN_DIM {
            return Err(invalid(format!("dimension {d} below {MIN_DIM}")));
        }
        let theta_bytes = STANDARD
            .decode(&file.theta)
            .map_err(|e| invalid(format!("theta: {e}")))?;
        let psi_bytes = STANDARD
            .decode(&file.psi)
            .map_err(|e| invalid(format!("psi: {e}")))?;
        if theta_bytes.len() != file.users.len() * d * 8 {
            return Err(invalid(format!(
                "theta holds {} bytes, expected {}",
                theta_bytes.len(),
                file.users.len() * d * 8
            )));
        }
        let row_bytes = d.div_ceil(8);
        if psi_bytes.len() != file.items.len() * row_bytes {
            return Err(invalid(format!(
                "psi holds {} bytes, expected {}",
                psi_bytes.len(),
                file.items.len() * row_bytes
            )));
        }
        let mut theta = BTreeMap::new();
        for (r, &raw) in file.users.iter().enumerate() {
            let row: Vec<f64> = theta_bytes[r * d * 8..(r + 1) * d * 8]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            if theta
                .insert(raw, SimplexVector::from_normalized(row)?)
                .is_some()
            {
                return Err(invalid(format!("duplicate user {raw}")));
            }
        }
        let mut psi = BTreeMap::new();
        for (r, &raw) in file.items.iter().enumerate() {
            let row = &psi_bytes[r * row_bytes..(r + 1) * row_bytes];
            let bits = (0..d).map(|k| row[k / 8] >> (k % 8) & 1 == 1).collect();
            if psi.insert(raw, IndicatorVector::new(bits)).is_some() {
                return Err(invalid(format!("duplicate item {raw}")));
            }
        }
        Ok(Self { dim: d, theta, psi })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_json()?.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut text = String::new();
        BufReader::new(File::open(path)?).read_to_string(&mut text)?;
        Self::from_json(&text)
    }
}
