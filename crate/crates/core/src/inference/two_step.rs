//! Two-step retrieval: family names over a threshold first, then the same
//! number of authors ranked by given-name evidence.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::category::{Category, N_WORKING};
use crate::ingest::ReferenceTable;

use super::AuthorRecord;

/// Outcome of one two-step retrieval for a single category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoStepResult {
    pub ids: BTreeSet<String>,
    /// Authors retrieved by family name (the `N` of the procedure).
    pub family_hits: usize,
    /// Authors taken from the given-name ranking.
    pub given_hits: usize,
    /// How many given-name picks fall below the threshold.
    pub given_below_threshold: usize,
}

struct GivenEvidence {
    prob: [f64; N_WORKING],
    count: f64,
}

/// Per-author lookups shared across categories and thresholds.
pub struct TwoStepIndex<'a> {
    ids: Vec<&'a str>,
    family_prob: Vec<Option<[f64; N_WORKING]>>,
    /// Per category: indices of authors with a known given name, best first.
    ranking: [Vec<usize>; N_WORKING],
    given: Vec<Option<GivenEvidence>>,
}

impl<'a> TwoStepIndex<'a> {
    pub fn new(
        authors: &'a [AuthorRecord],
        family: &ReferenceTable,
        given: &ReferenceTable,
    ) -> Self {
        let ids: Vec<&str> = authors.iter().map(|a| a.id.as_str()).collect();
        let family_prob = authors
            .iter()
            .map(|a| {
                a.family_key()
                    .and_then(|k| family.get_normalized(&k))
                    .map(|e| *e.distribution.probs())
            })
            .collect();
        let given: Vec<Option<GivenEvidence>> = authors
            .iter()
            .map(|a| {
                a.given_key()
                    .and_then(|k| given.get_normalized(&k))
                    .map(|e| GivenEvidence {
                        prob: *e.distribution.probs(),
                        count: e.count,
                    })
            })
            .collect();
        let ranking = Category::ALL.map(|c| {
            let i = c.index();
            let mut order: Vec<usize> =
                (0..authors.len()).filter(|j| given[*j].is_some()).collect();
            order.sort_by(|&x, &y| {
                let gx = given[x].as_ref().unwrap();
                let gy = given[y].as_ref().unwrap();
                gy.prob[i]
                    .total_cmp(&gx.prob[i])
                    .then_with(|| gy.count.total_cmp(&gx.count))
                    .then_with(|| ids[x].cmp(ids[y]))
                    .then(Ordering::Equal)
            });
            order
        });
        Self {
            ids,
            family_prob,
            ranking,
            given,
        }
    }

    pub fn retrieve(&self, category: Category, threshold: f64) -> TwoStepResult {
        let i = category.index();
        let mut ids = BTreeSet::new();
        let mut family_hits = 0;
        for (j, p) in self.family_prob.iter().enumerate() {
            if p.is_some_and(|p| p[i] >= threshold) {
                ids.insert(self.ids[j].to_string());
                family_hits += 1;
            }
        }
        let picks = &self.ranking[i][..family_hits.min(self.ranking[i].len())];
        let given_below_threshold = picks
            .iter()
            .filter(|j| self.given[**j].as_ref().unwrap().prob[i] < threshold)
            .count();
        for j in picks {
            ids.insert(self.ids[*j].to_string());
        }
        TwoStepResult {
            ids,
            family_hits,
            given_hits: picks.len(),
            given_below_threshold,
        }
    }
}

/// Step 1 keeps authors whose family-name probability for `category` reaches
/// `threshold` (`N` authors). Step 2 ranks every author with a known given
/// name by given-name probability for `category` (ties: larger given-name
/// count, then smaller id) and keeps the top `N`. The union has between `N`
/// and `2N` authors.
pub fn two_step_retrieve(
    authors: &[AuthorRecord],
    family: &ReferenceTable,
    given: &ReferenceTable,
    category: Category,
    threshold: f64,
) -> TwoStepResult {
    TwoStepIndex::new(authors, family, given).retrieve(category, threshold)
}
