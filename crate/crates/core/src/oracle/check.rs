use std::collections::HashMap;

use super::{KripkeModel, OracleError};
use crate::formula::{Formula, FormulaSet, Modality};

/// Satisfaction of `f` at `world`, computed from the extension of `f`.
pub fn model_check(m: &KripkeModel, world: usize, f: &Formula) -> Result<bool, OracleError> {
    let ev = Evaluator::new(m);
    let at = ev.index_of(world)?;
    Ok(ev.extension(f)[at])
}

pub fn satisfies_all(m: &KripkeModel, world: usize, fs: &FormulaSet) -> Result<bool, OracleError> {
    let ev = Evaluator::new(m);
    let at = ev.index_of(world)?;
    Ok(fs.iter().all(|f| ev.extension(f)[at]))
}

struct Evaluator<'a> {
    m: &'a KripkeModel,
    index: HashMap<usize, usize>,
    succ_a: Vec<Vec<usize>>,
    succ_b: Vec<Vec<usize>>,
}

impl<'a> Evaluator<'a> {
    fn new(m: &'a KripkeModel) -> Self {
        let index: HashMap<usize, usize> = m.worlds.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let adj = |pairs: &[(usize, usize)]| {
            let mut out = vec![Vec::new(); m.worlds.len()];
            for (s, t) in pairs {
                if let (Some(&i), Some(&j)) = (index.get(s), index.get(t)) {
                    out[i].push(j);
                }
            }
            out
        };
        Evaluator {
            succ_a: adj(&m.ra),
            succ_b: adj(m.rb_pairs()),
            index,
            m,
        }
    }

    fn index_of(&self, world: usize) -> Result<usize, OracleError> {
        self.index.get(&world).copied().ok_or(OracleError::UnknownWorld(world))
    }

    fn extension(&self, f: &Formula) -> Vec<bool> {
        let n = self.m.worlds.len();
        match f {
            Formula::Atom(p) => {
                let mut out = vec![false; n];
                for w in self.m.val.get(&**p).into_iter().flatten() {
                    if let Some(&i) = self.index.get(w) {
                        out[i] = true;
                    }
                }
                out
            }
            Formula::Falsum => vec![false; n],
            Formula::Not(g) => self.extension(g).into_iter().map(|b| !b).collect(),
            Formula::And(l, r) => {
                let (l, r) = (self.extension(l), self.extension(r));
                l.into_iter().zip(r).map(|(a, b)| a && b).collect()
            }
            Formula::Box(m, g) => {
                let inner = self.extension(g);
                let succ = match m {
                    Modality::A => &self.succ_a,
                    Modality::B => &self.succ_b,
                };
                succ.iter().map(|ts| ts.iter().all(|&t| inner[t])).collect()
            }
        }
    }
}
