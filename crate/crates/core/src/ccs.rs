//! Consistent classical saturations (CCS).
//!
//! A CCS of a seed `u` is a set `w` with `u ⊆ w ⊆ csf(u)` that is closed
//! under the propositional tableau rules and clash-free: an unsigned open
//! branch. Enumeration treats membership of each element of `csf(u)` as a
//! boolean variable, encodes the rules as clauses and lists every model by
//! branching with unit propagation. Branches try "out" before "in", so
//! smaller saturations come first.

use std::collections::HashMap;

use crate::formula::{Formula, FormulaSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ccs {
    pub members: FormulaSet,
    pub seed: FormulaSet,
}

impl Ccs {
    pub fn degree(&self) -> usize {
        self.members.degree()
    }
}

#[derive(Clone, Copy, Debug)]
struct Lit {
    var: usize,
    positive: bool,
}

/// Lazy stream over `CCS(seed)`; see [`enumerate_ccs`].
pub struct CcsIter {
    seed: FormulaSet,
    universe: Vec<Formula>,
    clauses: Vec<Vec<Lit>>,
    stack: Vec<Vec<Option<bool>>>,
}

/// Every CCS of `seed`, each exactly once, in a fixed order. An empty
/// stream means `seed` is classically inconsistent.
pub fn enumerate_ccs(seed: &FormulaSet) -> CcsIter {
    let universe: Vec<Formula> = seed.csf().into_iter().collect();
    let index: HashMap<&Formula, usize> = universe.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let var = |f: &Formula| index[f];
    let mut clauses = Vec::new();
    let neg = |v| Lit { var: v, positive: false };
    let pos = |v| Lit { var: v, positive: true };

    for f in seed {
        clauses.push(vec![pos(var(f))]);
    }
    for (x, f) in universe.iter().enumerate() {
        match f {
            Formula::Falsum => clauses.push(vec![neg(x)]),
            Formula::And(l, r) => {
                clauses.push(vec![neg(x), pos(var(l))]);
                clauses.push(vec![neg(x), pos(var(r))]);
            }
            Formula::Not(inner) => {
                let i = var(inner);
                clauses.push(vec![neg(x), neg(i)]);
                match &**inner {
                    Formula::And(l, r) => {
                        let nl = var(&Formula::not((**l).clone()));
                        let nr = var(&Formula::not((**r).clone()));
                        clauses.push(vec![neg(x), pos(nl), pos(nr)]);
                    }
                    Formula::Not(g) => clauses.push(vec![neg(x), pos(var(g))]),
                    _ => {}
                }
            }
            Formula::Atom(_) | Formula::Box(..) => {}
        }
    }

    let mut it = CcsIter {
        seed: seed.clone(),
        stack: Vec::new(),
        clauses,
        universe,
    };
    let mut root = vec![None; it.universe.len()];
    if it.propagate(&mut root) {
        it.stack.push(root);
    }
    it
}

impl CcsIter {
    /// Unit propagation; false on conflict.
    fn propagate(&self, assign: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for clause in &self.clauses {
                let mut open = None;
                let mut n_open = 0;
                let mut sat = false;
                for lit in clause {
                    match assign[lit.var] {
                        Some(v) if v == lit.positive => {
                            sat = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            n_open += 1;
                            open = Some(*lit);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match (n_open, open) {
                    (0, _) => return false,
                    (1, Some(lit)) => {
                        assign[lit.var] = Some(lit.positive);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

impl Iterator for CcsIter {
    type Item = Ccs;

    fn next(&mut self) -> Option<Ccs> {
        while let Some(assign) = self.stack.pop() {
            match assign.iter().position(Option::is_none) {
                None => {
                    let members = self
                        .universe
                        .iter()
                        .zip(&assign)
                        .filter(|(_, v)| **v == Some(true))
                        .map(|(f, _)| f.clone())
                        .collect();
                    return Some(Ccs {
                        members,
                        seed: self.seed.clone(),
                    });
                }
                Some(v) => {
                    for value in [true, false] {
                        let mut child = assign.clone();
                        child[v] = Some(value);
                        if self.propagate(&mut child) {
                            self.stack.push(child);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Checks the CCS conditions of `candidate` relative to `seed` directly.
pub fn is_ccs_of(candidate: &FormulaSet, seed: &FormulaSet) -> bool {
    if !seed.is_subset(candidate) || !candidate.is_subset(&seed.csf()) {
        return false;
    }
    is_saturated_and_consistent(candidate)
}

/// The seed-independent CCS conditions.
pub fn is_saturated_and_consistent(w: &FormulaSet) -> bool {
    w.iter().all(|f| match f {
        Formula::Falsum => false,
        Formula::And(l, r) => w.contains(l) && w.contains(r),
        Formula::Not(inner) => {
            if w.contains(inner) {
                return false;
            }
            match &**inner {
                Formula::And(l, r) => {
                    w.contains(&Formula::not((**l).clone())) || w.contains(&Formula::not((**r).clone()))
                }
                Formula::Not(g) => w.contains(g),
                _ => true,
            }
        }
        Formula::Atom(_) | Formula::Box(..) => true,
    })
}
