use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::OracleError;

/// An explicit finite pointed model. `rb` is absent for unimodal models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    pub worlds: Vec<usize>,
    pub ra: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rb: Option<Vec<(usize, usize)>>,
    pub val: BTreeMap<String, Vec<usize>>,
    pub root: usize,
}

impl KripkeModel {
    /// Sorts and deduplicates every component so equal models compare and
    /// serialize identically.
    pub fn normalize(&mut self) {
        fn tidy<T: Ord>(v: &mut Vec<T>) {
            v.sort();
            v.dedup();
        }
        tidy(&mut self.worlds);
        tidy(&mut self.ra);
        if let Some(rb) = &mut self.rb {
            tidy(rb);
        }
        for ws in self.val.values_mut() {
            tidy(ws);
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let worlds: BTreeSet<usize> = self.worlds.iter().copied().collect();
        let bad = |what: &str| Err(OracleError::Malformed(what.to_string()));
        if worlds.is_empty() {
            return bad("no worlds");
        }
        if !worlds.contains(&self.root) {
            return bad("root is not a world");
        }
        let in_range = |(s, t): &(usize, usize)| worlds.contains(s) && worlds.contains(t);
        if !self.ra.iter().all(in_range) {
            return bad("ra mentions an unknown world");
        }
        if let Some(rb) = &self.rb {
            if !rb.iter().all(in_range) {
                return bad("rb mentions an unknown world");
            }
        }
        if !self.val.values().flatten().all(|w| worlds.contains(w)) {
            return bad("valuation mentions an unknown world");
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let m: KripkeModel =
            serde_json::from_str(text).map_err(|e| OracleError::Malformed(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn rb_pairs(&self) -> &[(usize, usize)] {
        self.rb.as_deref().unwrap_or(&[])
    }
}

/// `s Ra t ⇒ ∃u. s Ra u ∧ u Ra t`
pub fn is_dense(m: &KripkeModel) -> bool {
    let ra: BTreeSet<_> = m.ra.iter().copied().collect();
    m.ra.iter().all(|&(s, t)| {
        m.worlds
            .iter()
            .any(|&u| ra.contains(&(s, u)) && ra.contains(&(u, t)))
    })
}

/// `s Ra t ⇒ ∃u. s Ra u ∧ u Rb t`
pub fn is_weakly_dense(m: &KripkeModel) -> bool {
    let ra: BTreeSet<_> = m.ra.iter().copied().collect();
    let rb: BTreeSet<_> = m.rb_pairs().iter().copied().collect();
    m.ra.iter().all(|&(s, t)| {
        m.worlds
            .iter()
            .any(|&u| ra.contains(&(s, u)) && rb.contains(&(u, t)))
    })
}
