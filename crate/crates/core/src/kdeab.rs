//! Satisfiability for KDe_{a,b}, the bimodal logic of weakly dense frames.
//!
//! `Sat(w)` accepts a CCS when every `¬□b φ` has a satisfiable CCS of
//! `{¬φ} ∪ □b⁻(w)` and every `¬□a φ` has an initial window that starts an
//! infinite chain of continuations with satisfiable heads. The infinite
//! chain is found as a lasso (a window repeating along the current path) or,
//! in counter mode, as a chain of the requested length.
//!
//! A continuation is only followed when the old head and the new tuple merge
//! into a longer window, i.e. `□b⁻(w̃_1) ⊆ w_0`. Without that check a chain
//! of heads need not be `b`-linked and the extracted model can fail weak
//! density; rejected candidates are counted in the stats.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::ccs::{enumerate_ccs, Ccs};
use crate::formula::{Formula, FormulaSet, Modality};
use crate::oracle::{is_weakly_dense, satisfies_all, KripkeModel};
use crate::outcome::{SatResult, SearchStats, Stats, Verdict};
use crate::windows::{continuations, initial_windows, merges_to_window, Window};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundPolicy {
    /// Accept on the first window that repeats along the current chain.
    Lasso,
    /// Accept on a chain of `N` windows. `None` uses `2^(M·(d+1))` for each
    /// anchor `w`, where `M = |csf(sf(w))|` bounds the distinct windows.
    Counter(Option<BigUint>),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub policy: BoundPolicy,
    pub memo: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            policy: BoundPolicy::Lasso,
            memo: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// The default counter for an anchor.
pub fn counter_value(w: &FormulaSet) -> BigUint {
    let m = w.sf().csf().len();
    BigUint::from(1u8) << (m * (w.degree() + 1))
}

/// A window chain that ends by re-entering `heads[cycle_start]`'s window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub heads: Vec<FormulaSet>,
    pub cycle_start: usize,
}

/// Why a CCS was accepted: one child per `¬□b` diamond and one lasso per
/// `¬□a` diamond, in member order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Proof {
    pub b_children: Vec<FormulaSet>,
    pub a_lassos: Vec<Lasso>,
}

pub struct Solver {
    cfg: SolverConfig,
    memo: HashMap<FormulaSet, bool>,
    proofs: HashMap<FormulaSet, Proof>,
    stats: SearchStats,
    depth: usize,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Self {
        Solver {
            cfg,
            memo: HashMap::new(),
            proofs: HashMap::new(),
            stats: SearchStats::default(),
            depth: 0,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn proof(&self, w: &FormulaSet) -> Option<&Proof> {
        self.proofs.get(w)
    }

    /// Satisfiability of a formula set; backtracks over its CCSs and
    /// extracts a checked witness for the first accepted one.
    pub fn sat_set(&mut self, u: &FormulaSet) -> Result<SatResult, SolverError> {
        for w in enumerate_ccs(u) {
            self.stats.ccs_enumerated += 1;
            if !self.sat_ccs(&Arc::new(w.clone())) {
                continue;
            }
            let model = match self.extract_model(&w.members) {
                Ok(m) => m,
                // A counter shorter than the window graph can accept without a lasso.
                Err(_) if matches!(self.cfg.policy, BoundPolicy::Counter(Some(_))) => {
                    return Ok(self.result(Verdict::Sat, None));
                }
                Err(e) => return Err(e),
            };
            if !is_weakly_dense(&model) {
                return Err(SolverError::Invariant("witness frame is not weakly dense".into()));
            }
            match satisfies_all(&model, model.root, u) {
                Ok(true) => {}
                Ok(false) => return Err(SolverError::Invariant("witness does not satisfy the input at its root".into())),
                Err(e) => return Err(SolverError::Invariant(e.to_string())),
            }
            return Ok(self.result(Verdict::Sat, Some(model)));
        }
        Ok(self.result(Verdict::Unsat, None))
    }

    fn result(&self, verdict: Verdict, witness: Option<KripkeModel>) -> SatResult {
        SatResult {
            verdict,
            witness,
            stats: Stats::Search(self.stats.clone()),
        }
    }

    /// `Sat(w)` for a CCS.
    pub fn sat_ccs(&mut self, w: &Arc<Ccs>) -> bool {
        if self.cfg.memo {
            if let Some(&v) = self.memo.get(&w.members) {
                self.stats.memo_hits += 1;
                return v;
            }
        }
        self.stats.sat_calls += 1;
        self.depth += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.depth);
        let proof = self.prove(w);
        self.depth -= 1;
        let ok = proof.is_some();
        if let Some(p) = proof {
            self.proofs.insert(w.members.clone(), p);
        }
        if self.cfg.memo {
            self.memo.insert(w.members.clone(), ok);
        }
        ok
    }

    fn prove(&mut self, w: &Arc<Ccs>) -> Option<Proof> {
        let mut proof = Proof::default();
        let boxed_b = w.members.box_inverse(Modality::B);
        for phi in w.members.diamond_bodies(Modality::B) {
            let seed = boxed_b.clone().with(Formula::not(phi));
            let mut found = None;
            for c in enumerate_ccs(&seed) {
                self.stats.ccs_enumerated += 1;
                let c = Arc::new(c);
                if self.sat_ccs(&c) {
                    found = Some(c.members.clone());
                    break;
                }
            }
            proof.b_children.push(found?);
        }
        for phi in w.members.diamond_bodies(Modality::A) {
            let body = Formula::not(phi);
            let mut found = None;
            for t in initial_windows(w, &body) {
                self.stats.windows_explored += 1;
                let lasso = match &self.cfg.policy {
                    BoundPolicy::Lasso => self.find_lasso(t, &body),
                    BoundPolicy::Counter(n) => {
                        let n = n.clone().unwrap_or_else(|| counter_value(&w.members));
                        self.counter_chain(t, &body, &n)
                    }
                };
                if let Some(l) = lasso {
                    found = Some(l);
                    break;
                }
            }
            proof.a_lassos.push(found?);
        }
        Some(proof)
    }

    /// Continuations of `t` that merge with it into a longer window.
    fn next_windows(&mut self, t: &Window, initial: bool, body: &Formula) -> Vec<Window> {
        let extra = initial.then_some(body);
        let mut out = Vec::new();
        for n in continuations(t) {
            self.stats.continuations_explored += 1;
            self.stats.continuation_checks += 1;
            if merges_to_window(t, &n, extra) {
                out.push(n);
            } else {
                self.stats.continuation_violations += 1;
            }
        }
        out
    }

    /// Depth-first search for a chain from `t0` in which a window repeats.
    fn find_lasso(&mut self, t0: Window, body: &Formula) -> Option<Lasso> {
        if !self.sat_ccs(&Arc::new(head_ccs(&t0))) {
            return None;
        }
        // Windows from which no lasso exists, whatever the path above them.
        let mut dead: HashSet<Vec<FormulaSet>> = HashSet::new();
        let mut on_path: HashMap<Vec<FormulaSet>, usize> = HashMap::new();
        on_path.insert(t0.parts.clone(), 0);
        let first = self.next_windows(&t0, true, body);
        let mut path: Vec<(Window, Vec<Window>, usize)> = vec![(t0, first, 0)];

        while let Some((_, succ, next)) = path.last_mut() {
            if *next == succ.len() {
                let (t, _, _) = path.pop().expect("nonempty path");
                on_path.remove(&t.parts);
                dead.insert(t.parts);
                continue;
            }
            let cand = succ[*next].clone();
            *next += 1;
            if let Some(&start) = on_path.get(&cand.parts) {
                return Some(Lasso {
                    heads: path.iter().map(|(t, _, _)| t.head().clone()).collect(),
                    cycle_start: start,
                });
            }
            if dead.contains(&cand.parts) {
                continue;
            }
            self.stats.windows_explored += 1;
            if !self.sat_ccs(&Arc::new(head_ccs(&cand))) {
                dead.insert(cand.parts);
                continue;
            }
            let succ = self.next_windows(&cand, false, body);
            on_path.insert(cand.parts.clone(), path.len());
            path.push((cand, succ, 0));
        }
        None
    }

    /// Counter mode: whether a chain of `n` windows with satisfiable heads
    /// starts at `t0`. Computed over the reachable window graph as the
    /// decreasing layers `L_1 = {T : Sat(head T)}`,
    /// `L_j = {T ∈ L_1 : some continuation of T is in L_(j-1)}`, stopping at
    /// `j = n` or when a layer repeats. Returns a lasso through the final
    /// layer when one exists, or an empty lasso for an accepted chain that
    /// does not close.
    fn counter_chain(&mut self, t0: Window, body: &Formula, n: &BigUint) -> Option<Lasso> {
        if *n == BigUint::from(0u8) {
            return Some(Lasso {
                heads: Vec::new(),
                cycle_start: 0,
            });
        }
        // reachable graph through satisfiable heads
        let mut ids: HashMap<Vec<FormulaSet>, usize> = HashMap::new();
        let mut nodes: Vec<Window> = Vec::new();
        let mut sat: Vec<bool> = Vec::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();
        ids.insert(t0.parts.clone(), 0);
        nodes.push(t0);
        let mut at = 0;
        while at < nodes.len() {
            let t = nodes[at].clone();
            let ok = self.sat_ccs(&Arc::new(head_ccs(&t)));
            sat.push(ok);
            let mut out = Vec::new();
            if ok {
                for c in self.next_windows(&t, at == 0, body) {
                    let id = *ids.entry(c.parts.clone()).or_insert_with(|| {
                        nodes.push(c.clone());
                        nodes.len() - 1
                    });
                    if !out.contains(&id) {
                        out.push(id);
                    }
                }
                self.stats.windows_explored += out.len() as u64;
            }
            edges.push(out);
            at += 1;
        }

        let mut layer: Vec<bool> = sat.clone();
        let mut j = BigUint::from(1u8);
        while j < *n {
            let next: Vec<bool> = (0..nodes.len())
                .map(|i| sat[i] && edges[i].iter().any(|&s| layer[s]))
                .collect();
            j += 1u8;
            if next == layer {
                break;
            }
            layer = next;
        }
        if !layer[0] {
            return None;
        }
        // follow the final layer from the start until a window repeats
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut heads = Vec::new();
        let mut cur = 0;
        loop {
            if let Some(&start) = seen.get(&cur) {
                return Some(Lasso {
                    heads,
                    cycle_start: start,
                });
            }
            seen.insert(cur, heads.len());
            heads.push(nodes[cur].head().clone());
            match edges[cur].iter().find(|&&s| layer[s]) {
                Some(&s) => cur = s,
                None => {
                    return Some(Lasso {
                        heads: Vec::new(),
                        cycle_start: 0,
                    })
                }
            }
        }
    }

    /// Builds the finite model read off the accepted search: one world per
    /// distinct CCS, `b`-edges to diamond children and backwards along each
    /// lasso (closing its cycle), `a`-edges from a node to every head of its
    /// lassos.
    pub fn extract_model(&self, root: &FormulaSet) -> Result<KripkeModel, SolverError> {
        let mut ids: HashMap<FormulaSet, usize> = HashMap::new();
        let mut order: Vec<FormulaSet> = Vec::new();
        let mut ra = Vec::new();
        let mut rb = Vec::new();
        ids.insert(root.clone(), 0);
        order.push(root.clone());
        let mut at = 0;
        while at < order.len() {
            let w = order[at].clone();
            let proof = self
                .proofs
                .get(&w)
                .ok_or_else(|| SolverError::Invariant(format!("no proof recorded for {w}")))?;
            let mut id_of = |s: &FormulaSet| {
                *ids.entry(s.clone()).or_insert_with(|| {
                    order.push(s.clone());
                    order.len() - 1
                })
            };
            for c in &proof.b_children {
                rb.push((at, id_of(c)));
            }
            for lasso in &proof.a_lassos {
                if lasso.heads.is_empty() || lasso.cycle_start >= lasso.heads.len() {
                    return Err(SolverError::Invariant("lasso without a cycle".into()));
                }
                let hs: Vec<usize> = lasso.heads.iter().map(&mut id_of).collect();
                for &h in &hs {
                    ra.push((at, h));
                }
                for j in 0..hs.len() - 1 {
                    rb.push((hs[j + 1], hs[j]));
                }
                rb.push((hs[lasso.cycle_start], hs[hs.len() - 1]));
            }
            at += 1;
        }
        let mut val: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, w) in order.iter().enumerate() {
            for f in w {
                if let Formula::Atom(p) = f {
                    val.entry(p.to_string()).or_default().push(i);
                }
            }
        }
        let mut m = KripkeModel {
            worlds: (0..order.len()).collect(),
            ra,
            rb: Some(rb),
            val,
            root: 0,
        };
        m.normalize();
        Ok(m)
    }
}

fn head_ccs(t: &Window) -> Ccs {
    Ccs {
        members: t.head().clone(),
        seed: t.head().clone(),
    }
}

/// Runs [`Solver::sat_set`] with a fresh solver.
pub fn sat_set(u: &FormulaSet, cfg: SolverConfig) -> Result<SatResult, SolverError> {
    Solver::new(cfg).sat_set(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Mode};
    use crate::oracle::model_check;

    fn f(text: &str) -> Formula {
        parse(text, Mode::Bimodal).unwrap()
    }

    fn set(texts: &[&str]) -> FormulaSet {
        texts.iter().map(|t| f(t)).collect()
    }

    fn lasso() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn weak_density_axiom_is_valid() {
        let r = sat_set(&set(&["~([a][b]p -> [a]p)"]), lasso()).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        assert!(r.witness.is_none());
    }

    #[test]
    fn atom_is_satisfiable_in_one_world() {
        let r = sat_set(&set(&["p"]), lasso()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        let m = r.witness.unwrap();
        assert_eq!(m.worlds, vec![0]);
        assert!(model_check(&m, 0, &f("p")).unwrap());
    }

    #[test]
    fn a_diamond_gets_a_two_step_witness() {
        let r = sat_set(&set(&["~[a]p"]), lasso()).unwrap();
        let m = r.witness.unwrap();
        assert!(is_weakly_dense(&m));
        assert!(model_check(&m, m.root, &f("~[a]p")).unwrap());
        // r -a-> x0 (¬p), r -a-> x1, x1 -b-> x0, x1 -b-> x1
        assert_eq!(m.worlds.len(), 3);
        assert_eq!(m.ra, vec![(0, 1), (0, 2)]);
        assert_eq!(m.rb.as_deref(), Some(&[(2, 1), (2, 2)][..]));
    }

    #[test]
    fn b_diamond_gets_a_single_successor() {
        let r = sat_set(&set(&["~[b]p"]), lasso()).unwrap();
        let m = r.witness.unwrap();
        assert_eq!(m.worlds.len(), 2);
        assert!(m.ra.is_empty());
        assert_eq!(m.rb.as_deref(), Some(&[(0, 1)][..]));
        assert!(!m.val.get("p").is_some_and(|ws| ws.contains(&1)));
    }

    #[test]
    fn worked_example_loops_on_self_continuation() {
        let w = set(&["[a]q", "~[a]p"]);
        let mut s = Solver::new(lasso());
        assert!(s.sat_ccs(&Arc::new(Ccs {
            members: w.clone(),
            seed: w.clone()
        })));
        let proof = s.proof(&w).unwrap();
        assert_eq!(
            proof.a_lassos,
            vec![Lasso {
                heads: vec![set(&["~p", "q"]), set(&["q"])],
                cycle_start: 1,
            }]
        );
        let m = s.extract_model(&w).unwrap();
        assert!(is_weakly_dense(&m));
        assert!(satisfies_all(&m, m.root, &w).unwrap());
    }

    #[test]
    fn counter_mode_zero_accepts_immediately() {
        let cfg = SolverConfig {
            policy: BoundPolicy::Counter(Some(BigUint::from(0u8))),
            memo: true,
        };
        let r = sat_set(&set(&["~[a]p", "[a]p"]), cfg).unwrap();
        // classically inconsistent, so no CCS reaches the window search
        assert_eq!(r.verdict, Verdict::Unsat);
        let cfg = SolverConfig {
            policy: BoundPolicy::Counter(Some(BigUint::from(0u8))),
            memo: true,
        };
        let r = sat_set(&set(&["~[a]p", "[a]~[b]false"]), cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
    }

    #[test]
    fn counter_and_lasso_agree_on_small_sets() {
        let cases = [
            &["~[a]p"][..],
            &["[a]q", "~[a]p"],
            &["~([a][b]p -> [a]p)"],
            &["~[a]p", "[a][b]p"],
            &["~[a]p", "[a]~[b]~p"],
            &["~[a]~[b]p", "[a][b]~p"],
            &["~[b]~[a]p", "[b][a]p"],
        ];
        for texts in cases {
            let u = set(texts);
            let l = sat_set(&u, lasso()).unwrap();
            let c = sat_set(
                &u,
                SolverConfig {
                    policy: BoundPolicy::Counter(None),
                    memo: true,
                },
            )
            .unwrap();
            assert_eq!(l.verdict, c.verdict, "{u}");
            if let Some(m) = c.witness {
                assert!(is_weakly_dense(&m));
                assert!(satisfies_all(&m, m.root, &u).unwrap());
            }
        }
    }

    #[test]
    fn memo_does_not_change_verdicts() {
        for text in ["~[a]p & [a]~[b]~p", "~[a]~[a]p & [a][a]p", "~[a]p & [a]~[b]p & [a][b]~p"] {
            let u = set(&[text]);
            let with = sat_set(&u, lasso()).unwrap();
            let without = sat_set(&u, SolverConfig { memo: false, ..lasso() }).unwrap();
            assert_eq!(with.verdict, without.verdict, "{text}");
            assert_eq!(with.witness, without.witness, "{text}");
        }
    }

    #[test]
    fn recursion_depth_is_bounded_by_degree() {
        let u = set(&["~[a]~[b]~[a]p", "[a][a]p"]);
        let r = sat_set(&u, lasso()).unwrap();
        let Stats::Search(s) = &r.stats else { panic!() };
        assert!(s.max_depth <= u.degree() + 1);
    }

    #[test]
    fn counter_value_matches_formula() {
        // csf(sf({¬□a p})) = {¬□a p, □a p, ¬p, p}, degree 1
        assert_eq!(counter_value(&set(&["~[a]p"])), BigUint::from(1u32 << 8));
    }
}
