//! Unimodal KDe by greatest-fixpoint pruning of tips.
//!
//! A tip is a bit vector over the subformulas of the target formula that is
//! consistent with its Boolean structure. Start from all tips related by the
//! box condition, then repeatedly drop tips whose false boxes have no
//! falsifying successor and edges that have no midpoint. The stable clip is
//! a dense frame in which every tip satisfies exactly the subformulas it
//! sets, so the target is valid iff every surviving tip sets its last bit.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::Formula;
use crate::oracle::KripkeModel;
use crate::outcome::{FixpointStats, SatResult, Stats, Verdict};

/// Free-bit limit used by [`KdeConfig::default`].
pub const DEFAULT_MAX_FREE_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KdeError {
    #[error("formula uses modality b; the fixpoint procedure is unimodal")]
    Bimodal,
    #[error("formula has {found} free tip bits (atoms and boxes), above the limit {limit}")]
    TooLarge { found: usize, limit: usize },
    #[error("clip invariant violated: {0}")]
    BadClip(String),
}

#[derive(Clone, Copy, Debug)]
pub struct KdeConfig {
    /// Refuse formulas whose atoms plus distinct boxes exceed this; the
    /// initial clip has `2^free` tips and `4^free` candidate edges.
    pub max_free_bits: usize,
}

impl Default for KdeConfig {
    fn default() -> Self {
        KdeConfig {
            max_free_bits: DEFAULT_MAX_FREE_BITS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Atom,
    Falsum,
    Not(usize),
    And(usize, usize),
    Box(usize),
}

/// The distinct subformulas of a formula, children before parents, the
/// formula itself last.
#[derive(Clone, Debug)]
pub struct SubformulaIndex {
    entries: Vec<Formula>,
    nodes: Vec<Node>,
    lookup: HashMap<Formula, usize>,
}

impl SubformulaIndex {
    pub fn build(phi: &Formula) -> Result<Self, KdeError> {
        if phi.uses_b() {
            return Err(KdeError::Bimodal);
        }
        let mut ix = SubformulaIndex {
            entries: Vec::new(),
            nodes: Vec::new(),
            lookup: HashMap::new(),
        };
        ix.visit(phi);
        Ok(ix)
    }

    fn visit(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.lookup.get(f) {
            return i;
        }
        let node = match f {
            Formula::Atom(_) => Node::Atom,
            Formula::Falsum => Node::Falsum,
            Formula::Not(g) => Node::Not(self.visit(g)),
            Formula::And(l, r) => {
                let l = self.visit(l);
                Node::And(l, self.visit(r))
            }
            Formula::Box(_, g) => Node::Box(self.visit(g)),
        };
        self.entries.push(f.clone());
        self.nodes.push(node);
        self.lookup.insert(f.clone(), self.entries.len() - 1);
        self.entries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Formula] {
        &self.entries
    }

    pub fn node(&self, i: usize) -> Node {
        self.nodes[i]
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.lookup.get(f).copied()
    }

    /// Positions whose bit is not forced by the Boolean structure.
    pub fn free_positions(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| matches!(self.nodes[i], Node::Atom | Node::Box(_)))
            .collect()
    }

    /// `(i, j)` for every `ψ_i = □ψ_j`.
    fn boxes(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|i| match self.nodes[i] {
                Node::Box(j) => Some((i, j)),
                _ => None,
            })
            .collect()
    }

    /// Checks the tip conditions on `bits`.
    pub fn is_tip(&self, bits: &[bool]) -> bool {
        bits.len() == self.len()
            && (0..self.len()).all(|i| match self.nodes[i] {
                Node::Falsum => !bits[i],
                Node::Not(j) => bits[i] == !bits[j],
                Node::And(j, k) => bits[i] == (bits[j] && bits[k]),
                Node::Atom | Node::Box(_) => true,
            })
    }
}

/// A tip; the derived ordering is lexicographic with `0 < 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tip(pub Vec<bool>);

impl Tip {
    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn last(&self) -> bool {
        *self.0.last().expect("tips are nonempty")
    }
}

/// A set of tips with a relation on them. Tips are stored once, sorted, and
/// both components are bitsets over that universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClipFrame {
    universe: Arc<Vec<Tip>>,
    alive: FixedBitSet,
    rel: Vec<FixedBitSet>,
}

impl ClipFrame {
    /// Builds a clip from explicit tips and edges, checking the clip invariants.
    pub fn from_parts(ix: &SubformulaIndex, tips: Vec<Tip>, edges: &[(Tip, Tip)]) -> Result<Self, KdeError> {
        let mut universe = tips;
        universe.sort();
        universe.dedup();
        if let Some(t) = universe.iter().find(|t| !ix.is_tip(&t.0)) {
            return Err(KdeError::BadClip(format!("{:?} is not a tip", t.0)));
        }
        let pos: HashMap<&Tip, usize> = universe.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let n = universe.len();
        let mut rel = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in edges {
            let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) else {
                return Err(KdeError::BadClip("edge endpoint is not in the tip set".into()));
            };
            if !respects_boxes(ix, a, b) {
                return Err(KdeError::BadClip("edge violates a box".into()));
            }
            rel[i].insert(j);
        }
        let mut alive = FixedBitSet::with_capacity(n);
        alive.insert_range(..);
        Ok(ClipFrame {
            universe: Arc::new(universe),
            alive,
            rel,
        })
    }

    pub fn tips(&self) -> impl Iterator<Item = &Tip> + '_ {
        self.alive.ones().map(move |i| &self.universe[i])
    }

    pub fn tip_count(&self) -> usize {
        self.alive.count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.alive.ones().map(|i| self.rel[i].count_ones(..)).sum()
    }

    pub fn edges(&self) -> Vec<(Tip, Tip)> {
        self.alive
            .ones()
            .flat_map(|i| self.rel[i].ones().map(move |j| (i, j)))
            .map(|(i, j)| (self.universe[i].clone(), self.universe[j].clone()))
            .collect()
    }

    pub fn contains(&self, t: &Tip) -> bool {
        self.universe
            .binary_search(t)
            .map(|i| self.alive.contains(i))
            .unwrap_or(false)
    }

    pub fn related(&self, a: &Tip, b: &Tip) -> bool {
        match (self.universe.binary_search(a), self.universe.binary_search(b)) {
            (Ok(i), Ok(j)) => self.alive.contains(i) && self.rel[i].contains(j),
            _ => false,
        }
    }

    /// Both components are subsets of `other`'s.
    pub fn is_below(&self, other: &ClipFrame) -> bool {
        let other_edges: std::collections::HashSet<_> = other.edges().into_iter().collect();
        self.tips().all(|t| other.contains(t)) && self.edges().iter().all(|e| other_edges.contains(e))
    }

    /// Every edge has a midpoint.
    pub fn is_dense(&self) -> bool {
        self.alive.ones().all(|i| {
            let two_step = self.two_step(i);
            self.rel[i].is_subset(&two_step)
        })
    }

    fn two_step(&self, i: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.universe.len());
        for c in self.rel[i].ones() {
            out.union_with(&self.rel[c]);
        }
        out
    }
}

fn respects_boxes(ix: &SubformulaIndex, a: &Tip, b: &Tip) -> bool {
    ix.boxes().iter().all(|&(i, j)| !a.bit(i) || b.bit(j))
}

/// All tips, with every box-respecting edge.
pub fn initial_clip(ix: &SubformulaIndex, cfg: &KdeConfig) -> Result<ClipFrame, KdeError> {
    let free = ix.free_positions();
    if free.len() > cfg.max_free_bits {
        return Err(KdeError::TooLarge {
            found: free.len(),
            limit: cfg.max_free_bits,
        });
    }
    let mut universe: Vec<Tip> = (0u64..1 << free.len())
        .map(|mask| {
            let mut bits = vec![false; ix.len()];
            for (k, &p) in free.iter().enumerate() {
                bits[p] = mask >> k & 1 == 1;
            }
            for i in 0..ix.len() {
                bits[i] = match ix.node(i) {
                    Node::Falsum => false,
                    Node::Not(j) => !bits[j],
                    Node::And(j, k) => bits[j] && bits[k],
                    Node::Atom | Node::Box(_) => bits[i],
                };
            }
            Tip(bits)
        })
        .collect();
    universe.sort();
    let n = universe.len();

    // ones[j] = tips with bit j set
    let mut ones = vec![FixedBitSet::with_capacity(n); ix.len()];
    for (t, tip) in universe.iter().enumerate() {
        for (j, set) in ones.iter_mut().enumerate() {
            if tip.bit(j) {
                set.insert(t);
            }
        }
    }
    let boxes = ix.boxes();
    let rel = universe
        .iter()
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert_range(..);
            for &(i, j) in &boxes {
                if a.bit(i) {
                    row.intersect_with(&ones[j]);
                }
            }
            row
        })
        .collect();
    let mut alive = FixedBitSet::with_capacity(n);
    alive.insert_range(..);
    Ok(ClipFrame {
        universe: Arc::new(universe),
        alive,
        rel,
    })
}

/// One pruning step. Keeps the tips whose false boxes each have a
/// successor falsifying the body, and the edges between kept tips that
/// have a midpoint in the current clip.
pub fn sigma_step(c: &ClipFrame, ix: &SubformulaIndex) -> ClipFrame {
    let n = c.universe.len();
    let boxes = ix.boxes();
    // zeros[j] = alive tips with bit j clear
    let zeros: HashMap<usize, FixedBitSet> = boxes
        .iter()
        .map(|&(_, j)| {
            let mut set = FixedBitSet::with_capacity(n);
            for t in c.alive.ones() {
                if !c.universe[t].bit(j) {
                    set.insert(t);
                }
            }
            (j, set)
        })
        .collect();

    let mut alive = FixedBitSet::with_capacity(n);
    for a in c.alive.ones() {
        let tip = &c.universe[a];
        let witnessed = boxes
            .iter()
            .all(|&(i, j)| tip.bit(i) || !c.rel[a].is_disjoint(&zeros[&j]));
        if witnessed {
            alive.insert(a);
        }
    }

    let mut rel = vec![FixedBitSet::with_capacity(n); n];
    for a in alive.ones() {
        let mut row = c.two_step(a);
        row.intersect_with(&c.rel[a]);
        row.intersect_with(&alive);
        rel[a] = row;
    }
    ClipFrame {
        universe: c.universe.clone(),
        alive,
        rel,
    }
}

/// The stable clip for a formula, with the index it was built over.
#[derive(Clone, Debug)]
pub struct Fixpoint {
    pub index: SubformulaIndex,
    pub clip: ClipFrame,
    /// Least `k` with `σ^(k+1) = σ^k` from the initial clip.
    pub iterations: usize,
    pub initial_tips: usize,
}

impl Fixpoint {
    pub fn stats(&self) -> FixpointStats {
        FixpointStats {
            subformulas: self.index.len(),
            initial_tips: self.initial_tips,
            final_tips: self.clip.tip_count(),
            final_edges: self.clip.edge_count(),
            iterations: self.iterations,
        }
    }

    /// The clip read as a model: worlds are tips in sorted order, atoms hold
    /// where their bit is set. `root` must be a surviving tip.
    pub fn model(&self, root: &Tip) -> KripkeModel {
        let tips: Vec<&Tip> = self.clip.tips().collect();
        let id: HashMap<&Tip, usize> = tips.iter().enumerate().map(|(k, t)| (*t, k)).collect();
        let ra = self
            .clip
            .edges()
            .iter()
            .map(|(a, b)| (id[a], id[b]))
            .collect();
        let mut val = BTreeMap::new();
        for (i, f) in self.index.entries().iter().enumerate() {
            if let Formula::Atom(p) = f {
                let ws = tips
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.bit(i))
                    .map(|(k, _)| k)
                    .collect();
                val.insert(p.to_string(), ws);
            }
        }
        let mut m = KripkeModel {
            worlds: (0..tips.len()).collect(),
            ra,
            rb: None,
            val,
            root: id[root],
        };
        m.normalize();
        m
    }

    /// Smallest surviving tip whose last bit equals `value`.
    pub fn first_tip_with_last(&self, value: bool) -> Option<&Tip> {
        self.clip.tips().find(|t| t.last() == value)
    }
}

pub fn fixpoint(phi: &Formula, cfg: &KdeConfig) -> Result<Fixpoint, KdeError> {
    let index = SubformulaIndex::build(phi)?;
    let mut clip = initial_clip(&index, cfg)?;
    let initial_tips = clip.tip_count();
    let mut iterations = 0;
    loop {
        let next = sigma_step(&clip, &index);
        if next == clip {
            break;
        }
        clip = next;
        iterations += 1;
    }
    if clip.tip_count() == 0 {
        return Err(KdeError::BadClip("fixpoint has no tips".into()));
    }
    Ok(Fixpoint {
        index,
        clip,
        iterations,
        initial_tips,
    })
}

/// Validity over dense frames.
pub fn kde_valid(phi: &Formula, cfg: &KdeConfig) -> Result<bool, KdeError> {
    let fp = fixpoint(phi, cfg)?;
    let valid = fp.clip.tips().all(Tip::last);
    Ok(valid)
}

/// Satisfiability over dense frames; the witness is the fixpoint model of
/// `phi` rooted at its smallest tip that sets `phi`.
pub fn kde_sat(phi: &Formula, cfg: &KdeConfig) -> Result<SatResult, KdeError> {
    let fp = fixpoint(phi, cfg)?;
    let witness = fp.first_tip_with_last(true).map(|t| fp.model(t));
    Ok(SatResult {
        verdict: if witness.is_some() {
            Verdict::Sat
        } else {
            Verdict::Unsat
        },
        witness,
        stats: Stats::Fixpoint(fp.stats()),
    })
}

/// A dense countermodel to `phi` when it is not KDe-valid.
pub fn kde_countermodel(phi: &Formula, cfg: &KdeConfig) -> Result<(Option<KripkeModel>, FixpointStats), KdeError> {
    let fp = fixpoint(phi, cfg)?;
    Ok((fp.first_tip_with_last(false).map(|t| fp.model(t)), fp.stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Mode};

    fn uni(text: &str) -> Formula {
        parse(text, Mode::Unimodal).unwrap()
    }

    fn cfg() -> KdeConfig {
        KdeConfig::default()
    }

    fn tip(bits: &[u8]) -> Tip {
        Tip(bits.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn index_examples() {
        let ix = SubformulaIndex::build(&uni("p")).unwrap();
        assert_eq!(ix.entries(), &[uni("p")]);
        let ix = SubformulaIndex::build(&uni("~p")).unwrap();
        assert_eq!(ix.entries(), &[uni("p"), uni("~p")]);
        let ix = SubformulaIndex::build(&uni("[]p -> p")).unwrap();
        let expected = [uni("p"), uni("[]p"), uni("~p"), uni("[]p & ~p"), uni("~([]p & ~p)")];
        assert_eq!(ix.entries(), &expected);
        assert!(SubformulaIndex::build(&parse("[b]p", Mode::Bimodal).unwrap()).is_err());
    }

    #[test]
    fn index_ordering_and_size() {
        let phi = uni("([]p & ~[](p | q)) -> <>[]q");
        let ix = SubformulaIndex::build(&phi).unwrap();
        assert!(ix.len() <= phi.size());
        assert_eq!(ix.entries().last(), Some(&phi));
        for i in 0..ix.len() {
            match ix.node(i) {
                Node::Not(j) | Node::Box(j) => assert!(i > j),
                Node::And(j, k) => assert!(i > j && i > k),
                _ => {}
            }
        }
    }

    #[test]
    fn initial_clip_examples() {
        let ix = SubformulaIndex::build(&uni("p")).unwrap();
        let c = initial_clip(&ix, &cfg()).unwrap();
        assert_eq!(c.tip_count(), 2);
        assert_eq!(c.edge_count(), 4);

        let ix = SubformulaIndex::build(&uni("[]p -> p")).unwrap();
        let c = initial_clip(&ix, &cfg()).unwrap();
        let tips: Vec<Tip> = c.tips().cloned().collect();
        assert_eq!(
            tips,
            vec![
                tip(&[0, 0, 1, 0, 1]),
                tip(&[0, 1, 1, 1, 0]),
                tip(&[1, 0, 0, 0, 1]),
                tip(&[1, 1, 0, 0, 1]),
            ]
        );

        let ix = SubformulaIndex::build(&uni("false")).unwrap();
        let c = initial_clip(&ix, &cfg()).unwrap();
        assert_eq!(c.tips().cloned().collect::<Vec<_>>(), vec![tip(&[0])]);
    }

    #[test]
    fn initial_relation_respects_boxes() {
        let ix = SubformulaIndex::build(&uni("[]p -> p")).unwrap();
        let c = initial_clip(&ix, &cfg()).unwrap();
        for a in c.tips() {
            for b in c.tips() {
                assert_eq!(c.related(a, b), !a.bit(1) || b.bit(0));
            }
        }
    }

    #[test]
    fn sigma_keeps_vacuous_tip() {
        let ix = SubformulaIndex::build(&uni("[]p -> p")).unwrap();
        let mut c = initial_clip(&ix, &cfg()).unwrap();
        let t = tip(&[0, 1, 1, 1, 0]);
        for _ in 0..5 {
            c = sigma_step(&c, &ix);
            assert!(c.contains(&t));
        }
    }

    #[test]
    fn sigma_drops_unwitnessed_false_box() {
        let ix = SubformulaIndex::build(&uni("[]p")).unwrap();
        let tips = vec![tip(&[0, 0]), tip(&[1, 1])];
        let c = ClipFrame::from_parts(&ix, tips, &[]).unwrap();
        let next = sigma_step(&c, &ix);
        assert!(!next.contains(&tip(&[0, 0])));
        assert!(next.contains(&tip(&[1, 1])));
    }

    #[test]
    fn sigma_is_identity_on_total_all_true_clip() {
        let ix = SubformulaIndex::build(&uni("[]p")).unwrap();
        let t = tip(&[1, 1]);
        let c = ClipFrame::from_parts(&ix, vec![t.clone()], &[(t.clone(), t)]).unwrap();
        assert_eq!(sigma_step(&c, &ix), c);
    }

    #[test]
    fn from_parts_rejects_bad_edges() {
        let ix = SubformulaIndex::build(&uni("[]p")).unwrap();
        let (a, b) = (tip(&[1, 1]), tip(&[0, 0]));
        assert!(ClipFrame::from_parts(&ix, vec![a.clone(), b.clone()], &[(a.clone(), b)]).is_err());
        assert!(ClipFrame::from_parts(&ix, vec![tip(&[1, 0, 1])], &[]).is_err());
    }

    #[test]
    fn fixpoint_examples() {
        let fp = fixpoint(&uni("p"), &cfg()).unwrap();
        assert_eq!(fp.iterations, 0);
        assert_eq!(fp.clip.tip_count(), 2);

        let fp = fixpoint(&uni("[]p -> p"), &cfg()).unwrap();
        assert!(fp.clip.contains(&tip(&[0, 1, 1, 1, 0])));

        let fp = fixpoint(&uni("[][]p -> []p"), &cfg()).unwrap();
        assert!(fp.clip.tips().all(Tip::last));
        assert!(fp.clip.is_dense());
    }

    #[test]
    fn validity_examples() {
        assert!(kde_valid(&uni("[][]p -> []p"), &cfg()).unwrap());
        assert!(!kde_valid(&uni("[]p -> p"), &cfg()).unwrap());
        assert!(kde_valid(&uni("true"), &cfg()).unwrap());
        assert!(kde_valid(&uni("<>p -> <><>p"), &cfg()).unwrap());
        assert!(!kde_valid(&uni("[]p -> [][]p"), &cfg()).unwrap());
    }

    #[test]
    fn sat_examples() {
        let r = kde_sat(&uni("<>p & ~p"), &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        let m = r.witness.unwrap();
        assert!(crate::oracle::is_dense(&m));
        assert!(crate::oracle::model_check(&m, m.root, &uni("<>p & ~p")).unwrap());

        assert_eq!(kde_sat(&uni("<>true & []false"), &cfg()).unwrap().verdict, Verdict::Unsat);
        assert_eq!(kde_sat(&uni("~(<>p -> <><>p)"), &cfg()).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn countermodel_for_reflexivity() {
        let (m, _) = kde_countermodel(&uni("[]p -> p"), &cfg()).unwrap();
        let m = m.unwrap();
        assert!(crate::oracle::is_dense(&m));
        assert!(!crate::oracle::model_check(&m, m.root, &uni("[]p -> p")).unwrap());
        assert!(kde_countermodel(&uni("[][]p -> []p"), &cfg()).unwrap().0.is_none());
    }

    #[test]
    fn free_bit_guard() {
        let phi = uni("[]a & []b & []c & []d & []e & []f & []g");
        let small = KdeConfig { max_free_bits: 8 };
        assert!(matches!(fixpoint(&phi, &small), Err(KdeError::TooLarge { found: 14, limit: 8 })));
    }
}
