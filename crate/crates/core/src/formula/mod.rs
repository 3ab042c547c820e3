//! Modal formulas over the core connectives `⊥ ¬ ∧ □a □b`.
//!
//! Every other connective (`⊤ ∨ → ◇a ◇b`) is an abbreviation: the parser
//! desugars it and the renderer re-sugars the recognisable shapes, so the
//! AST itself only ever contains the five core node kinds.

mod parse;
mod render;
mod set;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse, ParseError};
pub use set::FormulaSet;

/// Index of a box operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    A,
    B,
}

impl Modality {
    pub fn tag(self) -> char {
        match self {
            Modality::A => 'a',
            Modality::B => 'b',
        }
    }
}

/// Concrete-syntax flavour. Unimodal text uses `[]`/`<>` and maps onto
/// modality `a`; bimodal text must name the modality explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Unimodal,
    Bimodal,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    Falsum,
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Box(Modality, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn falsum() -> Self {
        Formula::Falsum
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(m: Modality, f: Formula) -> Self {
        Formula::Box(m, Arc::new(f))
    }

    /// `⊤ ≡ ¬⊥`
    pub fn top() -> Self {
        Formula::not(Formula::Falsum)
    }

    /// `φ ∨ ψ ≡ ¬(¬φ ∧ ¬ψ)`
    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(l), Formula::not(r)))
    }

    /// `φ → ψ ≡ ¬(φ ∧ ¬ψ)`
    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(l, Formula::not(r)))
    }

    /// `◇m φ ≡ ¬□m¬φ`
    pub fn diamond(m: Modality, f: Formula) -> Self {
        Formula::not(Formula::boxed(m, Formula::not(f)))
    }

    /// Modal depth: maximal nesting of boxes.
    pub fn degree(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Falsum => 0,
            Formula::Not(f) => f.degree(),
            Formula::And(l, r) => l.degree().max(r.degree()),
            Formula::Box(_, f) => 1 + f.degree(),
        }
    }

    /// Number of AST nodes. Parentheses and modality tags do not count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Falsum => 1,
            Formula::Not(f) | Formula::Box(_, f) => 1 + f.size(),
            Formula::And(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn measures(&self) -> (usize, usize) {
        (self.degree(), self.size())
    }

    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Falsum => {}
            Formula::Not(f) | Formula::Box(_, f) => f.collect_atoms(out),
            Formula::And(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn contains_atom(&self, name: &str) -> bool {
        match self {
            Formula::Atom(p) => &**p == name,
            Formula::Falsum => false,
            Formula::Not(f) | Formula::Box(_, f) => f.contains_atom(name),
            Formula::And(l, r) => l.contains_atom(name) || r.contains_atom(name),
        }
    }

    /// True when some box carries modality `b`.
    pub fn uses_b(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Falsum => false,
            Formula::Not(f) => f.uses_b(),
            Formula::And(l, r) => l.uses_b() || r.uses_b(),
            Formula::Box(m, f) => *m == Modality::B || f.uses_b(),
        }
    }

    /// Renders in the concrete syntax of `mode`; the output parses back to `self`
    /// (in unimodal mode only when the formula has no `b` boxes).
    pub fn render(&self, mode: Mode) -> String {
        render::render(self, mode)
    }

    /// If `self = ¬φ`, returns `φ`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Not(f) => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = if self.uses_b() {
            Mode::Bimodal
        } else {
            Mode::Unimodal
        };
        f.write_str(&self.render(mode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn measures_examples() {
        assert_eq!(p().measures(), (0, 1));
        let bb = Formula::boxed(Modality::A, Formula::boxed(Modality::B, p()));
        assert_eq!(bb.measures(), (2, 3));
        let f = parse("[]p & ~p", Mode::Unimodal).unwrap();
        assert_eq!(f.measures(), (1, 5));
    }

    #[test]
    fn size_is_compositional() {
        let l = parse("[]p -> q", Mode::Unimodal).unwrap();
        let r = parse("<><>~p", Mode::Unimodal).unwrap();
        let f = Formula::and(l.clone(), r.clone());
        assert_eq!(f.size(), 1 + l.size() + r.size());
        assert_eq!(Formula::not(l.clone()).size(), 1 + l.size());
        assert_eq!(
            Formula::boxed(Modality::B, r.clone()).degree(),
            1 + r.degree()
        );
    }

    #[test]
    fn atoms_and_modalities() {
        let f = parse("[a](p & <b>q) | r", Mode::Bimodal).unwrap();
        let names: Vec<_> = f.atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["p", "q", "r"]);
        assert!(f.uses_b());
        assert!(f.contains_atom("q"));
        assert!(!f.contains_atom("s"));
    }
}
