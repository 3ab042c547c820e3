use std::collections::BTreeSet;

use crate::formula::{Formula, Modality};

/// Validity over all frames (logic K): `φ` is valid iff `¬φ` is unsatisfiable.
pub fn k_valid(f: &Formula) -> bool {
    !k_sat(vec![Formula::not(f.clone())])
}

/// Satisfiability over all frames by a plain labelled-free K tableau.
pub fn k_sat(fs: Vec<Formula>) -> bool {
    expand(fs, BTreeSet::new())
}

fn expand(mut pending: Vec<Formula>, mut lits: BTreeSet<Formula>) -> bool {
    while let Some(f) = pending.pop() {
        if lits.contains(&f) {
            continue;
        }
        match &f {
            Formula::Falsum => return false,
            Formula::Atom(_) | Formula::Box(..) => {
                if lits.contains(&Formula::not(f.clone())) {
                    return false;
                }
                lits.insert(f);
            }
            Formula::And(l, r) => {
                pending.push((**l).clone());
                pending.push((**r).clone());
            }
            Formula::Not(g) => match &**g {
                Formula::Falsum => {}
                Formula::Not(h) => pending.push((**h).clone()),
                Formula::And(l, r) => {
                    let mut left = pending.clone();
                    left.push(Formula::not((**l).clone()));
                    if expand(left, lits.clone()) {
                        return true;
                    }
                    pending.push(Formula::not((**r).clone()));
                }
                Formula::Atom(_) | Formula::Box(..) => {
                    if lits.contains(g) {
                        return false;
                    }
                    lits.insert(f.clone());
                }
            },
        }
    }
    // propositionally open: every diamond needs its own successor
    for m in [Modality::A, Modality::B] {
        let boxed: Vec<Formula> = lits
            .iter()
            .filter_map(|f| match f {
                Formula::Box(n, body) if *n == m => Some((**body).clone()),
                _ => None,
            })
            .collect();
        for f in &lits {
            if let Formula::Not(g) = f {
                if let Formula::Box(n, body) = &**g {
                    if *n == m {
                        let mut succ = boxed.clone();
                        succ.push(Formula::not((**body).clone()));
                        if !k_sat(succ) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}
