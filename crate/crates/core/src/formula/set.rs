use std::collections::btree_set;
use std::collections::BTreeSet;
use std::fmt;

use super::{Formula, Modality, Mode};

/// A finite set of formulas, iterated in structural order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormulaSet(BTreeSet<Formula>);

impl FormulaSet {
    pub fn new() -> Self {
        FormulaSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        self.0.insert(f)
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Formula> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn with(mut self, f: Formula) -> FormulaSet {
        self.0.insert(f);
        self
    }

    /// Max modal depth over members; 0 for the empty set.
    pub fn degree(&self) -> usize {
        self.0.iter().map(Formula::degree).max().unwrap_or(0)
    }

    /// Sum of member sizes.
    pub fn size(&self) -> usize {
        self.0.iter().map(Formula::size).sum()
    }

    /// Classical subformula closure; does not look inside boxes.
    pub fn csf(&self) -> FormulaSet {
        self.close(false)
    }

    /// Full subformula closure: `csf` plus unfolding of boxes and negated boxes.
    pub fn sf(&self) -> FormulaSet {
        self.close(true)
    }

    fn close(&self, through_boxes: bool) -> FormulaSet {
        let mut out = self.0.clone();
        let mut todo: Vec<Formula> = self.0.iter().cloned().collect();
        let push = |f: Formula, out: &mut BTreeSet<Formula>, todo: &mut Vec<Formula>| {
            if out.insert(f.clone()) {
                todo.push(f);
            }
        };
        while let Some(f) = todo.pop() {
            match &f {
                Formula::And(l, r) => {
                    push((**l).clone(), &mut out, &mut todo);
                    push((**r).clone(), &mut out, &mut todo);
                }
                Formula::Box(_, body) if through_boxes => {
                    push((**body).clone(), &mut out, &mut todo);
                }
                Formula::Not(inner) => {
                    push((**inner).clone(), &mut out, &mut todo);
                    match &**inner {
                        Formula::And(l, r) => {
                            push(Formula::not((**l).clone()), &mut out, &mut todo);
                            push(Formula::not((**r).clone()), &mut out, &mut todo);
                        }
                        Formula::Box(_, body) if through_boxes => {
                            push(Formula::not((**body).clone()), &mut out, &mut todo);
                        }
                        _ => {}
                    }
                }
                _ => {}
            }
        }
        FormulaSet(out)
    }

    /// Bodies of the top-level `□m` members.
    pub fn box_inverse(&self, m: Modality) -> FormulaSet {
        FormulaSet(
            self.0
                .iter()
                .filter_map(|f| match f {
                    Formula::Box(n, body) if *n == m => Some((**body).clone()),
                    _ => None,
                })
                .collect(),
        )
    }

    /// Bodies `φ` of the members of shape `¬□m φ`.
    pub fn diamond_bodies(&self, m: Modality) -> Vec<Formula> {
        self.0
            .iter()
            .filter_map(|f| match f {
                Formula::Not(inner) => match &**inner {
                    Formula::Box(n, body) if *n == m => Some((**body).clone()),
                    _ => None,
                },
                _ => None,
            })
            .collect()
    }

    pub fn render(&self, mode: Mode) -> Vec<String> {
        self.0.iter().map(|f| f.render(mode)).collect()
    }
}

impl fmt::Display for FormulaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<T: IntoIterator<Item = Formula>>(iter: T) -> Self {
        FormulaSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = btree_set::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for FormulaSet {
    type Item = Formula;
    type IntoIter = btree_set::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl Extend<Formula> for FormulaSet {
    fn extend<T: IntoIterator<Item = Formula>>(&mut self, iter: T) {
        self.0.extend(iter)
    }
}
