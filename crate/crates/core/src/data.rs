//! Rating-file ingestion, train/test splitting, synthetic data, and the
//! line-delimited JSON dataset format.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::model::{IdMap, Rating, RatingDataset, Split};

/// MovieLens ratings are integers on a 1..=5 scale.
pub const MOVIELENS_R_MAX: f64 = 5.0;
const MOVIELENS_R_MIN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_users: usize,
    pub num_items: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            num_users: 20,
            num_items: 40,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy)]
enum Separator {
    Tab,
    DoubleColon,
}

fn parse_movielens<R: BufRead>(reader: R, sep: Separator) -> Result<RatingDataset> {
    let mut users = IdMap::default();
    let mut items = IdMap::default();
    let mut ratings = Vec::new();
    for (ix, line) in reader.lines().enumerate() {
        let lineno = ix + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = match sep {
            Separator::Tab => {
                if line.contains("::") {
                    return Err(parse_err(
                        lineno,
                        "unexpected '::' separator in tab-separated file",
                    ));
                }
                line.split('\t').collect()
            }
            Separator::DoubleColon => {
                if line.contains('\t') {
                    return Err(parse_err(lineno, "unexpected tab in '::'-separated file"));
                }
                line.split("::").collect()
            }
        };
        if fields.len() != 4 {
            return Err(parse_err(
                lineno,
                &format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let user: u64 = parse_field(fields[0], lineno, "user id")?;
        let item: u64 = parse_field(fields[1], lineno, "item id")?;
        let rating: f64 = parse_field(fields[2], lineno, "rating")?;
        // timestamp is validated but unused
        let _: u64 = parse_field(fields[3], lineno, "timestamp")?;
        if !(MOVIELENS_R_MIN..=MOVIELENS_R_MAX).contains(&rating) {
            return Err(KmError::Validation(format!(
                "line {lineno}: rating {rating} outside [{MOVIELENS_R_MIN}, {MOVIELENS_R_MAX}]"
            )));
        }
        ratings.push(Rating {
            user: users.intern(user),
            item: items.intern(item),
            p: rating / MOVIELENS_R_MAX,
            split: Split::Train,
        });
    }
    if ratings.is_empty() {
        log::warn!("rating file contained no ratings");
    }
    RatingDataset::new(ratings, MOVIELENS_R_MAX, users, items)
}

fn parse_err(line: usize, message: &str) -> KmError {
    KmError::Parse {
        line,
        message: message.to_string(),
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(line, &format!("cannot parse {what} from {s:?}")))
}

/// Reads the tab-separated MovieLens 100K `u.data` layout.
pub fn parse_ml100k<R: BufRead>(reader: R) -> Result<RatingDataset> {
    parse_movielens(reader, Separator::Tab)
}

/// Reads the `::`-separated MovieLens 1M `ratings.dat` layout.
pub fn parse_ml1m<R: BufRead>(reader: R) -> Result<RatingDataset> {
    parse_movielens(reader, Separator::DoubleColon)
}

pub fn load_ml100k(path: impl AsRef<Path>) -> Result<RatingDataset> {
    parse_ml100k(BufReader::new(File::open(path)?))
}

pub fn load_ml1m(path: impl AsRef<Path>) -> Result<RatingDataset> {
    parse_ml1m(BufReader::new(File::open(path)?))
}

/// Uniform random train/test partition over all triples.
///
/// Exactly `round(n · train_fraction)` triples are labeled train.
pub fn split(dataset: &RatingDataset, cfg: &SplitConfig) -> Result<RatingDataset> {
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(KmError::Validation(format!(
            "train_fraction must lie in (0, 1), got {}",
            cfg.train_fraction
        )));
    }
    if dataset.is_empty() {
        return Err(KmError::Precondition(
            "cannot split an empty dataset".into(),
        ));
    }
    let n = dataset.len();
    let n_train = ((n as f64) * cfg.train_fraction).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut splits = vec![Split::Test; n];
    for &k in &order[..n_train] {
        splits[k] = Split::Train;
    }
    dataset.with_splits(&splits)
}

/// Dense `num_users × num_items` grid of i.i.d. uniform probabilities, all
/// labeled train. Raw IDs are 1-based.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<RatingDataset> {
    if cfg.num_users == 0 || cfg.num_items == 0 {
        return Err(KmError::Validation(
            "synthetic dataset needs at least one user and item".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut triples = Vec::with_capacity(cfg.num_users * cfg.num_items);
    for u in 1..=cfg.num_users as u64 {
        for i in 1..=cfg.num_items as u64 {
            triples.push((u, i, rng.random::<f64>()));
        }
    }
    RatingDataset::from_triples(triples, 1.0)
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    u: u64,
    i: u64,
    p: f64,
    split: Split,
}

/// One JSON object per line: `{"u": raw_user, "i": raw_item, "p": prob, "split": "train"|"test"}`.
pub fn write_jsonl<W: Write>(dataset: &RatingDataset, mut out: W) -> Result<()> {
    for r in dataset.ratings() {
        let rec = JsonRecord {
            u: dataset.users().raw_of(r.user).expect("interned user"),
            i: dataset.items().raw_of(r.item).expect("interned item"),
            p: r.p,
            split: r.split,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Inverse of [`write_jsonl`]. Probabilities are already normalized, so the
/// reloaded dataset has `r_max = 1`.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<RatingDataset> {
    let mut users = IdMap::default();
    let mut items = IdMap::default();
    let mut ratings = Vec::new();
    for (ix, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(ix + 1, &e.to_string()))?;
        ratings.push(Rating {
            user: users.intern(rec.u),
            item: items.intern(rec.i),
            p: rec.p,
            split: rec.split,
        });
    }
    RatingDataset::new(ratings, 1.0, users, items)
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<RatingDataset> {
    read_jsonl(BufReader::new(File::open(path)?))
}

pub fn save_jsonl(dataset: &RatingDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = std::io::BufWriter::new(File::create(path)?);
    write_jsonl(dataset, &mut w)?;
    w.flush()?;
    Ok(())
}
