use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, LabeledSet};
use crate::error::{Error, Result};

/// Subject-independent fold assignment over the records of a [`LabeledSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Participant ids per fold, in assignment order.
    pub participants: Vec<Vec<String>>,
    /// Record indices per test fold, ascending.
    pub test_indices: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Indices of every record outside test fold `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .test_indices
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != fold)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }

    pub fn fold_of(&self, participant: &str) -> Option<usize> {
        self.participants
            .iter()
            .position(|ps| ps.iter().any(|p| p == participant))
    }
}

struct Group {
    id: String,
    indices: Vec<usize>,
    pos: usize,
    neg: usize,
}

/// Assigns whole participants to `k` folds.
///
/// Participants are shuffled with `seed`, then stably sorted by descending
/// sample count. Each goes to the fold where its own classes are relatively
/// least represented (fold class count over cohort class count), ties broken
/// by smaller fold size and then lower fold index.
pub fn grouped_stratified_kfold(set: &LabeledSet, k: usize, seed: u64) -> Result<FoldPlan> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Group> = HashMap::new();
    for (i, r) in set.records.iter().enumerate() {
        let pid = &r.record.participant_id;
        let g = groups.entry(pid.clone()).or_insert_with(|| {
            order.push(pid.clone());
            Group {
                id: pid.clone(),
                indices: Vec::new(),
                pos: 0,
                neg: 0,
            }
        });
        g.indices.push(i);
        match r.label {
            Label::Positive => g.pos += 1,
            Label::Negative => g.neg += 1,
        }
    }
    if k < 2 || order.len() < k {
        return Err(Error::Folds {
            folds: k,
            participants: order.len(),
        });
    }
    let total_pos = set.count(Label::Positive);
    let total_neg = set.count(Label::Negative);
    if total_pos == 0 || total_neg == 0 {
        return Err(Error::InvalidInput("fold planning needs both classes".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut ordered: Vec<Group> = order.into_iter().map(|id| groups.remove(&id).unwrap()).collect();
    ordered.sort_by(|a, b| b.indices.len().cmp(&a.indices.len()));

    let mut pos = vec![0usize; k];
    let mut neg = vec![0usize; k];
    let mut participants = vec![Vec::new(); k];
    let mut test_indices = vec![Vec::new(); k];
    for g in ordered {
        let load = |f: usize| -> f64 {
            let mut worst = 0.0f64;
            if g.pos > 0 {
                worst = worst.max((pos[f] + g.pos) as f64 / total_pos as f64);
            }
            if g.neg > 0 {
                worst = worst.max((neg[f] + g.neg) as f64 / total_neg as f64);
            }
            worst
        };
        let best = (0..k)
            .min_by(|&a, &b| {
                load(a)
                    .total_cmp(&load(b))
                    .then((pos[a] + neg[a]).cmp(&(pos[b] + neg[b])))
                    .then(a.cmp(&b))
            })
            .unwrap();
        pos[best] += g.pos;
        neg[best] += g.neg;
        participants[best].push(g.id);
        test_indices[best].extend(g.indices);
    }
    for t in &mut test_indices {
        t.sort_unstable();
    }
    Ok(FoldPlan {
        k,
        participants,
        test_indices,
    })
}
