//! The relativising translation `τ_p`, reducing K validity to KDe validity.
//!
//! `τ_p` is homomorphic on atoms, `⊥`, `¬` and `∧`, and relativises boxes:
//! `τ_p(□φ) = □(p → τ_p(φ)) = □¬(p ∧ ¬τ_p(φ))`. For `p` not in `φ`, `φ` is
//! K-valid iff `τ_p(φ)` is KDe-valid.

use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("atom `{0}` already occurs in the formula")]
    AtomOccurs(String),
    #[error("`{0}` is not an atom name")]
    BadAtom(String),
}

fn is_atom_name(p: &str) -> bool {
    let mut chars = p.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && p != "true"
        && p != "false"
}

pub fn tau(p: &str, phi: &Formula) -> Result<Formula, TranslateError> {
    if !is_atom_name(p) {
        return Err(TranslateError::BadAtom(p.to_string()));
    }
    if phi.contains_atom(p) {
        return Err(TranslateError::AtomOccurs(p.to_string()));
    }
    let marker = Formula::atom(p);
    let out = go(&marker, phi);
    assert!(out.size() <= 5 * phi.size(), "translation grew past 5|φ|");
    Ok(out)
}

fn go(p: &Formula, phi: &Formula) -> Formula {
    match phi {
        Formula::Atom(_) | Formula::Falsum => phi.clone(),
        Formula::Not(g) => Formula::not(go(p, g)),
        Formula::And(l, r) => Formula::and(go(p, l), go(p, r)),
        Formula::Box(m, g) => Formula::boxed(*m, Formula::implies(p.clone(), go(p, g))),
    }
}

/// The lexicographically first atom name not occurring in `phi`: `a` if it is
/// free, otherwise `a0`, `a00`, and so on.
pub fn fresh_atom(phi: &Formula) -> String {
    let mut name = String::from("a");
    while phi.contains_atom(&name) {
        name.push('0');
    }
    name
}
