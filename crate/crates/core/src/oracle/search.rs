use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{KripkeModel, OracleError};
use crate::formula::{Formula, FormulaSet, Modality};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameClass {
    All,
    Dense,
    WeaklyDense,
}

/// Largest enumeration exponent (relation bits plus valuation bits) accepted.
const MAX_BITS: usize = 26;

#[derive(Clone, Copy)]
enum Op {
    Atom(usize),
    Falsum,
    Not(usize),
    And(usize, usize),
    Box(Modality, usize),
}

/// Flattened subformula DAG evaluated over world bitmasks.
struct Program {
    ops: Vec<Op>,
    roots: Vec<usize>,
}

impl Program {
    fn compile(fs: &FormulaSet, atoms: &[Arc<str>]) -> Self {
        let mut p = Program {
            ops: Vec::new(),
            roots: Vec::new(),
        };
        let mut seen = HashMap::new();
        for f in fs {
            let r = p.add(f, atoms, &mut seen);
            p.roots.push(r);
        }
        p
    }

    fn add(&mut self, f: &Formula, atoms: &[Arc<str>], seen: &mut HashMap<Formula, usize>) -> usize {
        if let Some(&i) = seen.get(f) {
            return i;
        }
        let op = match f {
            Formula::Atom(a) => Op::Atom(atoms.binary_search(a).expect("atom collected")),
            Formula::Falsum => Op::Falsum,
            Formula::Not(g) => Op::Not(self.add(g, atoms, seen)),
            Formula::And(l, r) => {
                let l = self.add(l, atoms, seen);
                Op::And(l, self.add(r, atoms, seen))
            }
            Formula::Box(m, g) => Op::Box(*m, self.add(g, atoms, seen)),
        };
        self.ops.push(op);
        seen.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    /// Worlds satisfying every root formula.
    fn eval(&self, n: usize, val: u32, succ_a: &[u32], succ_b: &[u32], ext: &mut Vec<u32>) -> u32 {
        let full = (1u32 << n) - 1;
        ext.clear();
        for op in &self.ops {
            let e = match *op {
                Op::Atom(k) => (val >> (k * n)) & full,
                Op::Falsum => 0,
                Op::Not(i) => !ext[i] & full,
                Op::And(i, j) => ext[i] & ext[j],
                Op::Box(m, i) => {
                    let succ = if m == Modality::A { succ_a } else { succ_b };
                    let inner = ext[i];
                    (0..n).fold(0, |acc, s| {
                        if succ[s] & !inner == 0 {
                            acc | 1 << s
                        } else {
                            acc
                        }
                    })
                }
            };
            ext.push(e);
        }
        self.roots.iter().fold(full, |acc, &r| acc & ext[r])
    }
}

fn successors(rel: u32, n: usize) -> Vec<u32> {
    let full = (1u32 << n) - 1;
    (0..n).map(|s| (rel >> (s * n)) & full).collect()
}

/// Union of the `second`-successors of the `first`-successors of `s`
/// covers the `first`-successors of `s`, for every `s`.
fn interpolates(first: &[u32], second: &[u32]) -> bool {
    first.iter().all(|&ts| {
        let mut reach = 0;
        let mut us = ts;
        while us != 0 {
            let u = us.trailing_zeros() as usize;
            reach |= second[u];
            us &= us - 1;
        }
        ts & !reach == 0
    })
}

/// Exhaustive search for a pointed model of `u` in `class` with at most
/// `max_worlds` worlds.
///
/// Enumeration order: world count ascending, then `ra` as a bitmask, then `rb`,
/// then the valuation bitmask, then the root. The first hit is returned, so
/// results are reproducible. `None` only means "no model within the bound".
pub fn bounded_search(
    u: &FormulaSet,
    class: FrameClass,
    max_worlds: usize,
    max_atoms: usize,
) -> Result<Option<KripkeModel>, OracleError> {
    let atoms: Vec<Arc<str>> = {
        let mut all: Vec<_> = u.iter().flat_map(|f| f.atoms()).collect();
        all.sort();
        all.dedup();
        all
    };
    if atoms.len() > max_atoms {
        return Err(OracleError::TooManyAtoms {
            found: atoms.len(),
            max: max_atoms,
        });
    }
    let bimodal = class == FrameClass::WeaklyDense || u.iter().any(Formula::uses_b);
    let rels = if bimodal { 2 } else { 1 };
    let bits = rels * max_worlds * max_worlds + max_worlds * atoms.len();
    if bits > MAX_BITS || max_worlds > 5 {
        return Err(OracleError::BoundTooLarge {
            bits,
            limit: MAX_BITS,
            worlds: max_worlds,
            atoms: atoms.len(),
        });
    }
    let program = Program::compile(u, &atoms);
    let mut ext = Vec::with_capacity(program.ops.len());

    for n in 1..=max_worlds {
        let rel_count = 1u32 << (n * n);
        let rb_count = if bimodal { rel_count } else { 1 };
        let val_count = 1u32 << (n * atoms.len());
        for ra in 0..rel_count {
            let succ_a = successors(ra, n);
            if class == FrameClass::Dense && !interpolates(&succ_a, &succ_a) {
                continue;
            }
            for rb in 0..rb_count {
                let succ_b = successors(rb, n);
                if class == FrameClass::WeaklyDense && !interpolates(&succ_a, &succ_b) {
                    continue;
                }
                for val in 0..val_count {
                    let hits = program.eval(n, val, &succ_a, &succ_b, &mut ext);
                    if hits != 0 {
                        let root = hits.trailing_zeros() as usize;
                        return Ok(Some(build(n, ra, bimodal.then_some(rb), val, &atoms, root)));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn build(n: usize, ra: u32, rb: Option<u32>, val: u32, atoms: &[Arc<str>], root: usize) -> KripkeModel {
    let pairs = |rel: u32| {
        (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .filter(|(s, t)| rel >> (s * n + t) & 1 == 1)
            .collect::<Vec<_>>()
    };
    let val: BTreeMap<String, Vec<usize>> = atoms
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let ws = (0..n).filter(|w| val >> (k * n + w) & 1 == 1).collect();
            (a.to_string(), ws)
        })
        .collect();
    KripkeModel {
        worlds: (0..n).collect(),
        ra: pairs(ra),
        rb: rb.map(pairs),
        val,
        root,
    }
}
