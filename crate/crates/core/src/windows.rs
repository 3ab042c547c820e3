//! Windows: finite chains of dense-successors that witness an `a`-diamond
//! together with the interpolation obligations of weak density.
//!
//! A k-window for `w` is `(w_0, …, w_k)` with `w_k ∈ CCS(□a⁻(w))` and
//! `w_i ∈ CCS(□a⁻(w) ∪ □b⁻(w_{i+1}))`. Parts are chosen from the right end
//! with backtracking, since each seed depends on the part to its right.

use std::sync::Arc;

use crate::ccs::{enumerate_ccs, is_ccs_of, Ccs};
use crate::formula::{Formula, FormulaSet, Modality, Mode};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub anchor: Arc<Ccs>,
    pub parts: Vec<FormulaSet>,
}

impl Window {
    pub fn k(&self) -> usize {
        self.parts.len() - 1
    }

    /// `w_0`, the part that becomes an `a`-successor of the anchor.
    pub fn head(&self) -> &FormulaSet {
        &self.parts[0]
    }

    /// Parts as arrays of formula strings.
    pub fn to_json(&self, mode: Mode) -> serde_json::Value {
        serde_json::Value::Array(
            self.parts
                .iter()
                .map(|p| serde_json::Value::from(p.render(mode)))
                .collect(),
        )
    }
}

/// Depth-first enumeration of part tuples, filled from the last index down.
/// `candidates(i, right)` lists the choices for part `i` given part `i + 1`.
struct Chain<F> {
    len: usize,
    candidates: F,
    // (choices for the level, next choice to try), one entry per filled level plus the open one
    stack: Vec<(Vec<FormulaSet>, usize)>,
    started: bool,
}

impl<F> Chain<F>
where
    F: FnMut(usize, Option<&FormulaSet>) -> Vec<FormulaSet>,
{
    fn new(len: usize, candidates: F) -> Self {
        Chain {
            len,
            candidates,
            stack: Vec::new(),
            started: false,
        }
    }

    fn chosen(&self, level: usize) -> &FormulaSet {
        let (choices, next) = &self.stack[level];
        &choices[next - 1]
    }

    fn next_tuple(&mut self) -> Option<Vec<FormulaSet>> {
        if !self.started {
            self.started = true;
            let first = (self.candidates)(self.len - 1, None);
            self.stack.push((first, 0));
        } else if self.stack.is_empty() {
            return None;
        }
        loop {
            let depth = self.stack.len();
            let (choices, next) = self.stack.last_mut()?;
            if *next == choices.len() {
                self.stack.pop();
                continue;
            }
            *next += 1;
            if depth == self.len {
                let mut parts: Vec<FormulaSet> = (0..depth).map(|l| self.chosen(l).clone()).collect();
                parts.reverse();
                return Some(parts);
            }
            let index = self.len - 1 - depth;
            let right = self.chosen(depth - 1).clone();
            let below = (self.candidates)(index, Some(&right));
            self.stack.push((below, 0));
        }
    }
}

impl<F> Iterator for Chain<F>
where
    F: FnMut(usize, Option<&FormulaSet>) -> Vec<FormulaSet>,
{
    type Item = Vec<FormulaSet>;

    fn next(&mut self) -> Option<Vec<FormulaSet>> {
        self.next_tuple()
    }
}

fn ccs_members(seed: &FormulaSet) -> Vec<FormulaSet> {
    enumerate_ccs(seed).map(|c| c.members).collect()
}

/// Every `d(w)`-window for `w` whose head is additionally seeded with `body`
/// (the negated body `¬φ` of a diamond `¬□a φ ∈ w`).
pub fn initial_windows(w: &Arc<Ccs>, body: &Formula) -> impl Iterator<Item = Window> {
    let a = w.members.box_inverse(Modality::A);
    let k = w.degree();
    let body = body.clone();
    let anchor = w.clone();
    Chain::new(k + 1, move |i, right| {
        let mut seed = a.clone();
        if let Some(r) = right {
            seed = seed.union(&r.box_inverse(Modality::B));
        }
        if i == 0 {
            seed.insert(body.clone());
        }
        ccs_members(&seed)
    })
    .map(move |parts| Window {
        anchor: anchor.clone(),
        parts,
    })
}

/// Every tuple `(w̃_1, …, w̃_{k+1})` that is a k-window for the anchor of `t`
/// and satisfies `w̃_i ∈ CCS(□b⁻(w̃_{i+1}) ∪ w_i)` for `1 ≤ i ≤ k`. This is
/// the definition taken literally; it does not constrain `w̃_1` against
/// `w_0`, see [`merges_to_window`].
pub fn continuations(t: &Window) -> impl Iterator<Item = Window> {
    let a = t.anchor.members.box_inverse(Modality::A);
    let k = t.k();
    let old = t.parts.clone();
    let anchor = t.anchor.clone();
    Chain::new(k + 1, move |i, right| match right {
        // new index i + 1 sits on top of old index i + 1
        None => ccs_members(&a),
        Some(r) => {
            let rb = r.box_inverse(Modality::B);
            let window_seed = a.union(&rb);
            ccs_members(&rb.union(&old[i + 1]))
                .into_iter()
                .filter(|c| is_ccs_of(c, &window_seed))
                .collect()
        }
    })
    .map(move |parts| Window {
        anchor: anchor.clone(),
        parts,
    })
}

/// Whether `(w_0, w̃_1, …, w̃_{k+1})` is a (k+1)-window. `t_extra` is the
/// diamond body seeded into `t`'s head when `t` is an initial window.
pub fn merges_to_window(t: &Window, next: &Window, t_extra: Option<&Formula>) -> bool {
    let mut merged = Vec::with_capacity(next.parts.len() + 1);
    merged.push(t.head().clone());
    merged.extend(next.parts.iter().cloned());
    is_window(&merged, &t.anchor, t_extra)
}

/// Checks every window condition on `parts` for `anchor`, with `first_extra`
/// added to the seed of `parts[0]`.
pub fn is_window(parts: &[FormulaSet], anchor: &Ccs, first_extra: Option<&Formula>) -> bool {
    if parts.is_empty() {
        return false;
    }
    let a = anchor.members.box_inverse(Modality::A);
    (0..parts.len()).all(|i| {
        let mut seed = a.clone();
        if let Some(r) = parts.get(i + 1) {
            seed = seed.union(&r.box_inverse(Modality::B));
        }
        if i == 0 {
            if let Some(x) = first_extra {
                seed.insert(x.clone());
            }
        }
        is_ccs_of(&parts[i], &seed)
    })
}
