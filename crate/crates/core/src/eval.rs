//! Verification scoring: embedding sets, genuine/impostor pair generation,
//! ROC/AUC and repeated-trial confidence intervals.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

/// One embedded image.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub image_id: String,
    pub vector: Vec<f64>,
}

/// Embeddings grouped by subject, iterated in sorted subject order so every
/// pair enumeration is deterministic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingSet {
    subjects: BTreeMap<String, Vec<Embedding>>,
    dim: usize,
}

#[derive(Deserialize)]
struct EmbeddingRecord {
    subject_id: String,
    image_id: String,
    embedding: Vec<f64>,
}

impl EmbeddingSet {
    /// Adds one embedding, enforcing finite values and a consistent
    /// dimension across the set.
    pub fn insert(&mut self, subject_id: &str, image_id: &str, vector: Vec<f64>) -> Result<()> {
        if vector.is_empty() {
            return Err(Error::Parse(format!("embedding for `{image_id}` is empty")));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!(
                "embedding for `{image_id}` contains a non-finite value"
            )));
        }
        if self.dim == 0 {
            self.dim = vector.len();
        } else if vector.len() != self.dim {
            return Err(Error::Parse(format!(
                "embedding for `{image_id}` has dimension {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        self.subjects
            .entry(subject_id.to_string())
            .or_default()
            .push(Embedding {
                image_id: image_id.to_string(),
                vector,
            });
        Ok(())
    }

    /// Reads a JSON-lines file of `{subject_id, image_id, embedding}`
    /// records; blank lines are skipped.
    pub fn from_jsonl(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut set = Self::default();
        for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: EmbeddingRecord = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("embeddings line {}: {e}", lineno + 1)))?;
            set.insert(&rec.subject_id, &rec.image_id, rec.embedding)
                .map_err(|e| Error::Parse(format!("embeddings line {}: {e}", lineno + 1)))?;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn image_count(&self) -> usize {
        self.subjects.values().map(Vec::len).sum()
    }

    pub fn subjects(&self) -> impl Iterator<Item = (&str, &[Embedding])> {
        self.subjects
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Number of genuine (same subject) and impostor (cross subject)
    /// pairs.
    pub fn count_pairs(&self) -> (u64, u64) {
        let sizes: Vec<u64> = self.subjects.values().map(|v| v.len() as u64).collect();
        let genuine = sizes.iter().map(|&m| m * (m - 1) / 2).sum();
        let mut impostor = 0u64;
        for i in 0..sizes.len() {
            for j in i + 1..sizes.len() {
                impostor += sizes[i] * sizes[j];
            }
        }
        (genuine, impostor)
    }
}

/// Pairwise score between two embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    Dot,
    Cosine,
}

impl Similarity {
    pub fn score(self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        match self {
            Similarity::Dot => dot,
            Similarity::Cosine => {
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    dot / (na * nb)
                }
            }
        }
    }
}

/// Scores every pair: genuine pairs within each subject, impostor pairs
/// across subjects, both enumerated in sorted-subject then insertion
/// order.
pub fn score_pairs(set: &EmbeddingSet, sim: Similarity) -> (Vec<f64>, Vec<f64>) {
    let groups: Vec<&[Embedding]> = set.subjects().map(|(_, v)| v).collect();
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for group in &groups {
        for k in 0..group.len() {
            for l in k + 1..group.len() {
                genuine.push(sim.score(&group[k].vector, &group[l].vector));
            }
        }
    }
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            for a in groups[i] {
                for b in groups[j] {
                    impostor.push(sim.score(&a.vector, &b.vector));
                }
            }
        }
    }
    (genuine, impostor)
}

/// Area under the ROC curve by the Mann-Whitney statistic: the fraction of
/// (genuine, impostor) pairs ranked correctly, ties counted half.
pub fn roc_auc(genuine: &[f64], impostor: &[f64]) -> Result<f64> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut sorted = impostor.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut wins, mut ties) = (0u64, 0u64);
    for &g in genuine {
        let below = sorted.partition_point(|&s| s < g) as u64;
        let not_above = sorted.partition_point(|&s| s <= g) as u64;
        wins += below;
        ties += not_above - below;
    }
    let total = genuine.len() as u64 * impostor.len() as u64;
    Ok((wins as f64 + 0.5 * ties as f64) / total as f64)
}

/// ROC operating points (false positive rate, true positive rate) swept
/// from the strictest threshold to the loosest, starting at (0, 0) and
/// ending at (1, 1). Tied scores advance as one group, so ties produce
/// diagonal segments.
pub fn roc_curve(genuine: &[f64], impostor: &[f64]) -> Result<Vec<(f64, f64)>> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut scored: Vec<(f64, bool)> = genuine
        .iter()
        .map(|&s| (s, true))
        .chain(impostor.iter().map(|&s| (s, false)))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (ng, ni) = (genuine.len() as f64, impostor.len() as f64);
    let mut curve = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < scored.len() {
        let s = scored[i].0;
        while i < scored.len() && scored[i].0 == s {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        curve.push((fp as f64 / ni, tp as f64 / ng));
    }
    Ok(curve)
}

/// Trapezoid area under an ROC curve.
pub fn auc_trapezoid(curve: &[(f64, f64)]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

/// Mean and 95% confidence half-width (normal approximation, sample
/// standard deviation) of a set of trial values.
pub fn mean_and_half_width(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * var.sqrt() / n.sqrt())
}

/// Result of [`repeated_auc`], serializable as the eval report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AucReport {
    pub mean: f64,
    pub half_width: f64,
    pub per_trial: Vec<f64>,
    pub trials: u32,
    pub seed: u64,
    pub impostor_cap: Option<u64>,
    pub genuine_pairs: u64,
    pub impostor_pairs: u64,
}

/// Runs `trials` AUC measurements. Every trial keeps all genuine pairs;
/// when `impostor_cap` is below the impostor total, trial `t` draws that
/// many impostor pairs without replacement from a ChaCha8 stream seeded
/// with `seed + t`. A cap at or above the total uses every pair and leaves
/// the stream untouched, so all trials coincide.
pub fn repeated_auc(
    set: &EmbeddingSet,
    sim: Similarity,
    trials: u32,
    impostor_cap: Option<u64>,
    seed: u64,
) -> Result<AucReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let (genuine_pairs, impostor_pairs) = set.count_pairs();
    let (genuine, impostor) = score_pairs(set, sim);
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::EmptyClass);
    }

    let mut per_trial = Vec::with_capacity(trials as usize);
    for t in 0..trials as u64 {
        let auc = match impostor_cap {
            Some(cap) if cap < impostor.len() as u64 => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t));
                let mut picked =
                    rand::seq::index::sample(&mut rng, impostor.len(), cap as usize).into_vec();
                picked.sort_unstable();
                let subset: Vec<f64> = picked.into_iter().map(|i| impostor[i]).collect();
                roc_auc(&genuine, &subset)?
            }
            _ => roc_auc(&genuine, &impostor)?,
        };
        per_trial.push(auc);
    }

    let (mean, half_width) = mean_and_half_width(&per_trial);
    Ok(AucReport {
        mean,
        half_width,
        per_trial,
        trials,
        seed,
        impostor_cap,
        genuine_pairs,
        impostor_pairs,
    })
}
