//! Exhaustive small formula corpora and the cross-check suites run over them.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::ccs::enumerate_ccs;
use crate::formula::{Formula, FormulaSet, Modality, Mode};
use crate::kde::{fixpoint, kde_sat, kde_valid, KdeConfig};
use crate::kdeab::{counter_value, BoundPolicy, Solver, SolverConfig};
use crate::oracle::{bounded_search, is_dense, is_weakly_dense, k_valid, model_check, satisfies_all, FrameClass};
use crate::outcome::Verdict;
use crate::translate::tau;

/// Atom names used by generated corpora, in order.
pub const ATOM_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// Every core formula with at most `max_size` nodes over `atoms`, smallest
/// first, in a fixed order.
pub fn enumerate(max_size: usize, atoms: &[&str], mode: Mode) -> Vec<Formula> {
    let modalities: &[Modality] = match mode {
        Mode::Unimodal => &[Modality::A],
        Mode::Bimodal => &[Modality::A, Modality::B],
    };
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new()];
    for n in 1..=max_size {
        let mut layer = Vec::new();
        if n == 1 {
            layer.extend(atoms.iter().map(|a| Formula::atom(a)));
            layer.push(Formula::falsum());
        } else {
            layer.extend(by_size[n - 1].iter().map(|f| Formula::not(f.clone())));
            for &m in modalities {
                layer.extend(by_size[n - 1].iter().map(|f| Formula::boxed(m, f.clone())));
            }
            for i in 1..n - 1 {
                for l in &by_size[i] {
                    for r in &by_size[n - 1 - i] {
                        layer.push(Formula::and(l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size.push(layer);
    }
    by_size.into_iter().flatten().collect()
}

/// Every `stride`-th element, starting with the first.
pub fn sample<T: Clone>(items: &[T], stride: usize) -> Vec<T> {
    items.iter().step_by(stride.max(1)).cloned().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Logic {
    Kde,
    Kdeab,
}

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub max_size: usize,
    pub atoms: usize,
    pub logic: Logic,
    pub oracle_worlds: usize,
}

impl CorpusSpec {
    pub fn formulas(&self) -> Vec<Formula> {
        let atoms = &ATOM_NAMES[..self.atoms.min(ATOM_NAMES.len())];
        let mode = match self.logic {
            Logic::Kde => Mode::Unimodal,
            Logic::Kdeab => Mode::Bimodal,
        };
        enumerate(self.max_size, atoms, mode)
    }
}

/// Outcome of one suite: how many inputs were checked, how many failed, a
/// few failing inputs, and suite-specific counters.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub examples: Vec<String>,
    pub counters: BTreeMap<String, u64>,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        if self.examples.len() < 5 {
            self.examples.push(what);
        }
    }

    fn bump(&mut self, key: &str, by: u64) {
        *self.counters.entry(key.to_string()).or_default() += by;
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: checked={} failures={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.failures
        )?;
        for (k, v) in &self.counters {
            write!(f, " {k}={v}")?;
        }
        for e in &self.examples {
            write!(f, "\n  counterexample: {e}")?;
        }
        Ok(())
    }
}

fn single(f: &Formula) -> FormulaSet {
    std::iter::once(f.clone()).collect()
}

/// Oracle-found dense model ⇒ SAT; every SAT witness is dense and satisfies
/// the formula at its root.
pub fn kde_oracle_agreement(formulas: &[Formula], oracle_worlds: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new("kde-oracle-agreement");
    let cfg = KdeConfig::default();
    for phi in formulas {
        rep.checked += 1;
        let res = match kde_sat(phi, &cfg) {
            Ok(r) => r,
            Err(e) => {
                rep.fail(format!("{phi}: {e}"));
                continue;
            }
        };
        let atoms = phi.atoms().len();
        let found = match bounded_search(&single(phi), FrameClass::Dense, oracle_worlds, atoms) {
            Ok(m) => m,
            Err(e) => {
                rep.fail(format!("{phi}: oracle: {e}"));
                continue;
            }
        };
        if found.is_some() {
            rep.bump("oracle_found", 1);
            if res.verdict != Verdict::Sat {
                rep.fail(format!("{phi}: oracle model exists but fixpoint says UNSAT"));
            }
        }
        if res.verdict == Verdict::Sat {
            rep.bump("sat", 1);
            match &res.witness {
                Some(m) if is_dense(m) && model_check(m, m.root, phi).unwrap_or(false) => {}
                _ => rep.fail(format!("{phi}: SAT witness missing, not dense, or not a model")),
            }
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

/// Every surviving tip satisfies exactly the subformulas whose bits it sets.
pub fn kde_truth_lemma(formulas: &[Formula]) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new("kde-truth-lemma");
    for phi in formulas {
        rep.checked += 1;
        let fp = match fixpoint(phi, &KdeConfig::default()) {
            Ok(fp) => fp,
            Err(e) => {
                rep.fail(format!("{phi}: {e}"));
                continue;
            }
        };
        let tips: Vec<_> = fp.clip.tips().cloned().collect();
        let model = fp.model(&tips[0]);
        let mut mismatches = 0;
        for (world, tip) in tips.iter().enumerate() {
            for (i, psi) in fp.index.entries().iter().enumerate() {
                rep.bump("bits_checked", 1);
                if model_check(&model, world, psi) != Ok(tip.bit(i)) {
                    mismatches += 1;
                }
            }
        }
        if mismatches > 0 {
            rep.fail(format!("{phi}: {mismatches} bit mismatches"));
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

/// The fixpoint frame is dense, nonempty, and the clip model is dense.
pub fn kde_fixpoint_shape(formulas: &[Formula]) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new("kde-fixpoint-density");
    for phi in formulas {
        rep.checked += 1;
        match fixpoint(phi, &KdeConfig::default()) {
            Ok(fp) => {
                let first = fp.clip.tips().next().cloned();
                match first {
                    Some(t) if fp.clip.is_dense() && is_dense(&fp.model(&t)) => {
                        rep.bump("tips", fp.clip.tip_count() as u64);
                    }
                    Some(_) => rep.fail(format!("{phi}: fixpoint frame is not dense")),
                    None => rep.fail(format!("{phi}: fixpoint has no tips")),
                }
            }
            Err(e) => rep.fail(format!("{phi}: {e}")),
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

/// Oracle-found weakly dense model ⇒ SAT; every SAT verdict comes with a
/// weakly dense witness satisfying the input at its root. The counters
/// include every continuation the search generated and how many of them
/// failed to merge with their predecessor into a longer window.
pub fn kdeab_oracle_agreement(formulas: &[Formula], oracle_worlds: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new("kdeab-oracle-agreement");
    rep.bump("continuation_checks", 0);
    rep.bump("continuation_violations", 0);
    for phi in formulas {
        rep.checked += 1;
        let u = single(phi);
        let mut solver = Solver::new(SolverConfig::default());
        let res = solver.sat_set(&u);
        let stats = solver.stats().clone();
        rep.bump("continuation_checks", stats.continuation_checks);
        rep.bump("continuation_violations", stats.continuation_violations);
        let res = match res {
            Ok(r) => r,
            Err(e) => {
                rep.fail(format!("{phi}: {e}"));
                continue;
            }
        };
        let found = match bounded_search(&u, FrameClass::WeaklyDense, oracle_worlds, phi.atoms().len()) {
            Ok(m) => m,
            Err(e) => {
                rep.fail(format!("{phi}: oracle: {e}"));
                continue;
            }
        };
        if found.is_some() {
            rep.bump("oracle_found", 1);
            if res.verdict != Verdict::Sat {
                rep.fail(format!("{phi}: oracle model exists but search says UNSAT"));
            }
        }
        if res.verdict == Verdict::Sat {
            rep.bump("sat", 1);
            match &res.witness {
                Some(m) if is_weakly_dense(m) && satisfies_all(m, m.root, &u).unwrap_or(false) => {}
                _ => rep.fail(format!("{phi}: SAT witness missing, not weakly dense, or not a model")),
            }
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

/// Lasso and counter mode give the same verdict on every input whose
/// default counter is at most `2^max_counter_bits`.
pub fn bound_policy_agreement(formulas: &[Formula], max_counter_bits: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new("bound-policy-agreement");
    let limit = num_bigint::BigUint::from(1u8) << max_counter_bits;
    for phi in formulas {
        let u = single(phi);
        if counter_value(&u) > limit {
            rep.bump("skipped_large_counter", 1);
            continue;
        }
        rep.checked += 1;
        let lasso = Solver::new(SolverConfig::default()).sat_set(&u);
        let counter = Solver::new(SolverConfig {
            policy: BoundPolicy::Counter(None),
            memo: true,
        })
        .sat_set(&u);
        match (lasso, counter) {
            (Ok(l), Ok(c)) if l.verdict == c.verdict => {}
            (Ok(l), Ok(c)) => rep.fail(format!("{phi}: lasso {:?} vs counter {:?}", l.verdict, c.verdict)),
            (Err(e), _) | (_, Err(e)) => rep.fail(format!("{phi}: {e}")),
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

/// For `p`-free `φ`: K-validity of `φ` equals KDe-validity of `τ_p(φ)`, and
/// `|τ_p(φ)| ≤ 5|φ|`.
pub fn translation_equivalence(formulas: &[Formula], p: &str) -> SuiteReport {
    let start = Instant::now();
    let mut rep = SuiteReport::new("translation-equivalence");
    for phi in formulas {
        if phi.contains_atom(p) {
            continue;
        }
        rep.checked += 1;
        let t = match tau(p, phi) {
            Ok(t) => t,
            Err(e) => {
                rep.fail(format!("{phi}: {e}"));
                continue;
            }
        };
        if t.size() > 5 * phi.size() {
            rep.fail(format!("{phi}: |tau| = {} > 5·{}", t.size(), phi.size()));
        }
        let k = k_valid(phi);
        if k {
            rep.bump("k_valid", 1);
        }
        match kde_valid(&t, &KdeConfig::default()) {
            Ok(d) if d == k => {}
            Ok(d) => rep.fail(format!("{phi}: K-valid={k} but KDe-valid(tau)={d}")),
            Err(e) => rep.fail(format!("{phi}: {e}")),
        }
    }
    rep.elapsed = start.elapsed();
    rep
}

/// Checks the four algebraic properties of CCSs on one seed pair, taking
/// `w_1` over `CCS(v)` and `w` over `CCS(u ∪ w_1)`:
///
/// 1. `w ∈ CCS(u ∪ v)`;
/// 2. for `w ∈ CCS(u ∪ v)`, some `v_1 ∈ CCS(u)`, `v_2 ∈ CCS(v)` have `v_1 ∪ v_2 = w`;
/// 3. some `v_2 ∈ CCS(u)` has `w_1 ∪ v_2 = w`;
/// 4. `d(w \ w_1) ≤ d(u)`.
///
/// Returns, per property, a description of the first counterexample found.
pub fn ccs_properties(u: &FormulaSet, v: &FormulaSet) -> [Option<String>; 4] {
    let show = |s: &FormulaSet| format!("{{{}}}", s.render(Mode::Bimodal).join(", "));
    let (u_text, v_text) = (show(u), show(v));
    let mut out: [Option<String>; 4] = Default::default();
    let ccs_u: Vec<FormulaSet> = enumerate_ccs(u).map(|c| c.members).collect();
    let ccs_v: Vec<FormulaSet> = enumerate_ccs(v).map(|c| c.members).collect();
    let uv = u.union(v);
    let ccs_uv: Vec<FormulaSet> = enumerate_ccs(&uv).map(|c| c.members).collect();

    for w in &ccs_uv {
        let split = ccs_u.iter().any(|v1| ccs_v.iter().any(|v2| &v1.union(v2) == w));
        if !split && out[1].is_none() {
            out[1] = Some(format!("u={u_text} v={v_text} w={}", show(w)));
        }
    }
    for w1 in &ccs_v {
        for w in enumerate_ccs(&u.union(w1)).map(|c| c.members) {
            if out[0].is_none() && !ccs_uv.contains(&w) {
                out[0] = Some(format!("u={u_text} v={v_text} w1={} w={}", show(w1), show(&w)));
            }
            if out[2].is_none() && !ccs_u.iter().any(|v2| w1.union(v2) == w) {
                out[2] = Some(format!("u={u_text} w1={} w={}", show(w1), show(&w)));
            }
            if out[3].is_none() && w.difference(w1).degree() > u.degree() {
                out[3] = Some(format!("u={u_text} v={v_text} w1={} w={}", show(w1), show(&w)));
            }
        }
    }
    out
}

/// Runs the suites that apply to `spec.logic`.
pub fn run_spec(spec: &CorpusSpec) -> Vec<SuiteReport> {
    let formulas = spec.formulas();
    match spec.logic {
        Logic::Kde => {
            let mut out = vec![
                kde_oracle_agreement(&formulas, spec.oracle_worlds),
                kde_truth_lemma(&formulas),
                kde_fixpoint_shape(&formulas),
            ];
            let q_only: Vec<Formula> = formulas.into_iter().filter(|f| !f.contains_atom("a")).collect();
            out.push(translation_equivalence(&q_only, "a"));
            out
        }
        Logic::Kdeab => vec![
            kdeab_oracle_agreement(&formulas, spec.oracle_worlds),
            bound_policy_agreement(&formulas, 16),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn set(texts: &[&str]) -> FormulaSet {
        texts.iter().map(|t| parse(t, Mode::Bimodal).unwrap()).collect()
    }

    #[test]
    fn corpus_sizes() {
        // a(n) = k·a(n-1) + Σ a(i)·a(n-1-i), a(1) = 2
        assert_eq!(enumerate(1, &["p"], Mode::Unimodal).len(), 2);
        assert_eq!(enumerate(3, &["p"], Mode::Unimodal).len(), 2 + 4 + 12);
        assert_eq!(enumerate(7, &["p"], Mode::Unimodal).len(), 2874);
        assert_eq!(enumerate(6, &["p"], Mode::Bimodal).len(), 2320);
    }

    #[test]
    fn corpus_is_distinct_and_bounded() {
        let all = enumerate(5, &["p", "q"], Mode::Bimodal);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.iter().all(|f| f.size() <= 5));
        assert!(all.windows(2).all(|w| w[0].size() <= w[1].size()));
    }

    #[test]
    fn tiny_suites_pass() {
        let uni = enumerate(4, &["p"], Mode::Unimodal);
        assert!(kde_oracle_agreement(&uni, 3).passed());
        assert!(kde_truth_lemma(&uni).passed());
        assert!(kde_fixpoint_shape(&uni).passed());
        let qs = enumerate(4, &["q"], Mode::Unimodal);
        assert!(translation_equivalence(&qs, "p").passed());
        let bi = enumerate(4, &["p"], Mode::Bimodal);
        assert!(kdeab_oracle_agreement(&bi, 2).passed());
        assert!(bound_policy_agreement(&bi, 16).passed());
    }

    #[test]
    fn ccs_properties_one_and_two_hold_on_examples() {
        let r = ccs_properties(&set(&["~(p & q)"]), &set(&["~(q & ~[a]r)", "p"]));
        assert!(r[0].is_none());
        assert!(r[1].is_none());
    }

    #[test]
    fn ccs_property_three_fails_for_undecided_disjunction() {
        let r = ccs_properties(&FormulaSet::new(), &set(&["~(p & q)"]));
        assert!(r[0].is_none());
        assert!(r[1].is_none());
        assert!(r[2].is_some());
    }

    #[test]
    fn ccs_property_four_fails_when_a_box_is_picked_late() {
        let r = ccs_properties(&FormulaSet::new(), &set(&["~([a]p & q)"]));
        assert!(r[3].is_some());
    }
}
