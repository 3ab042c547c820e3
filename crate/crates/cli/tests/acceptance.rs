//! Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! Criterion 7 asks four CCS properties to hold on random seed pairs; two of
//! them are false for saturations that keep an undecided disjunction open,
//! so its line reads FAIL. The run only errors when a criterion outside
//! `EXPECTED_FAIL` fails, or when an expected failure changes shape.

use std::process::Command;
use std::time::{Duration, Instant};

use kdense_core::corpus::{
    bound_policy_agreement, ccs_properties, enumerate, kde_fixpoint_shape, kde_oracle_agreement, kde_truth_lemma,
    kdeab_oracle_agreement, sample, translation_equivalence,
};
use kdense_core::formula::{parse, Formula, FormulaSet, Mode};
use kdense_core::kde::{kde_valid, KdeConfig};
use kdense_core::kdeab::{BoundPolicy, Lasso, Solver, SolverConfig};
use kdense_core::outcome::Verdict;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const AXIOM_LIMIT: Duration = Duration::from_secs(1);
const KDE_SUITE_LIMIT: Duration = Duration::from_secs(5 * 60);
const KDEAB_SUITE_LIMIT: Duration = Duration::from_secs(10 * 60);
const TRANSLATION_LIMIT: Duration = Duration::from_secs(5 * 60);
const KDE_ORACLE_WORLDS: usize = 3;
const KDEAB_ORACLE_WORLDS: usize = 2;
const CCS_PAIRS: usize = 1000;
const CCS_SEED: u64 = 0x05ee_dcc5;
const COUNTER_BITS: usize = 16;
const TWO_ATOM_STRIDE: usize = 8;

const EXPECTED_FAIL: &[u32] = &[7];

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn uni(text: &str) -> Formula {
    parse(text, Mode::Unimodal).unwrap()
}

fn bi(text: &str) -> Formula {
    parse(text, Mode::Bimodal).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_kdense"))
        .args(args)
        .output()
        .expect("run kdense");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn main() {
    let mut lines = Vec::new();
    let mut continuation_checks = 0u64;
    let mut continuation_violations = 0u64;

    // 1
    {
        let (valid, t_kde) = timed(|| kde_valid(&uni("[][]p -> []p"), &KdeConfig::default()));
        let axiom: FormulaSet = std::iter::once(bi("~([a][b]p -> [a]p)")).collect();
        let mut solver = Solver::new(SolverConfig::default());
        let (res, t_ab) = timed(|| solver.sat_set(&axiom));
        continuation_checks += solver.stats().continuation_checks;
        continuation_violations += solver.stats().continuation_violations;
        let (c1, out1) = cli(&["solve", "--logic", "kde", "--mode", "valid", "[][]p -> []p"]);
        let (c2, out2) = cli(&["solve", "--logic", "kdeab", "--mode", "sat", "~([a][b]p -> [a]p)"]);
        let pass = valid == Ok(true)
            && matches!(&res, Ok(r) if r.verdict == Verdict::Unsat)
            && t_kde < AXIOM_LIMIT
            && t_ab < AXIOM_LIMIT
            && (c1, out1.as_slice()) == (0, b"VALID\n".as_slice())
            && (c2, out2.as_slice()) == (0, b"UNSAT\n".as_slice());
        lines.push(Line {
            id: 1,
            name: "axiom checks",
            pass,
            detail: format!("kde_valid={valid:?} in {t_kde:?}, kdeab verdict={:?} in {t_ab:?}, limit {AXIOM_LIMIT:?}", res.map(|r| r.verdict)),
        });
    }

    let one_atom = enumerate(7, &["p"], Mode::Unimodal);
    let two_atom: Vec<Formula> = sample(&enumerate(7, &["p", "q"], Mode::Unimodal), TWO_ATOM_STRIDE)
        .into_iter()
        .filter(|f| f.atoms().len() == 2)
        .collect();
    let kde_corpus: Vec<Formula> = one_atom.iter().chain(&two_atom).cloned().collect();

    // 2
    {
        let rep = kde_oracle_agreement(&kde_corpus, KDE_ORACLE_WORLDS);
        lines.push(Line {
            id: 2,
            name: "KDe oracle agreement",
            pass: rep.passed() && rep.elapsed < KDE_SUITE_LIMIT,
            detail: format!(
                "{} formulas ({} one-atom, {} two-atom sample), failures={}, oracle_found={}, {:?} (limit {:?})",
                rep.checked,
                one_atom.len(),
                two_atom.len(),
                rep.failures,
                rep.counters.get("oracle_found").unwrap_or(&0),
                rep.elapsed,
                KDE_SUITE_LIMIT
            ),
        });
        print_examples(&rep.examples);
    }

    // 3
    let bimodal = enumerate(6, &["p"], Mode::Bimodal);
    {
        let rep = kdeab_oracle_agreement(&bimodal, KDEAB_ORACLE_WORLDS);
        continuation_checks += rep.counters["continuation_checks"];
        continuation_violations += rep.counters["continuation_violations"];
        lines.push(Line {
            id: 3,
            name: "KDe_ab oracle agreement",
            pass: rep.passed() && rep.elapsed < KDEAB_SUITE_LIMIT,
            detail: format!(
                "{} formulas, failures={}, oracle_found={}, sat={}, {:?} (limit {:?})",
                rep.checked,
                rep.failures,
                rep.counters.get("oracle_found").unwrap_or(&0),
                rep.counters.get("sat").unwrap_or(&0),
                rep.elapsed,
                KDEAB_SUITE_LIMIT
            ),
        });
        print_examples(&rep.examples);
    }

    // 4
    {
        let rep = kde_truth_lemma(&kde_corpus);
        lines.push(Line {
            id: 4,
            name: "truth lemma",
            pass: rep.passed(),
            detail: format!(
                "{} formulas, {} tip bits checked, mismatching formulas={}",
                rep.checked, rep.counters["bits_checked"], rep.failures
            ),
        });
        print_examples(&rep.examples);
    }

    // 5
    {
        let rep = kde_fixpoint_shape(&kde_corpus);
        lines.push(Line {
            id: 5,
            name: "fixpoint density and nonemptiness",
            pass: rep.passed(),
            detail: format!("{} formulas, violations={}", rep.checked, rep.failures),
        });
        print_examples(&rep.examples);
    }

    // 6
    {
        let corpus = enumerate(6, &["q"], Mode::Unimodal);
        let rep = translation_equivalence(&corpus, "p");
        lines.push(Line {
            id: 6,
            name: "translation equivalence",
            pass: rep.passed() && rep.checked == corpus.len() && rep.elapsed < TRANSLATION_LIMIT,
            detail: format!(
                "{} formulas, K-valid={}, failures={}, {:?} (limit {:?})",
                rep.checked,
                rep.counters.get("k_valid").unwrap_or(&0),
                rep.failures,
                rep.elapsed,
                TRANSLATION_LIMIT
            ),
        });
        print_examples(&rep.examples);
    }

    // 7
    let ccs_failing: Vec<usize>;
    {
        let pool = enumerate(5, &["p", "q"], Mode::Bimodal);
        let mut rng = StdRng::seed_from_u64(CCS_SEED);
        let draw = |rng: &mut StdRng| -> FormulaSet {
            let n = rng.gen_range(1..=4);
            (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
        };
        let mut counts = [0usize; 4];
        let mut first: [Option<String>; 4] = Default::default();
        for _ in 0..CCS_PAIRS {
            let u = draw(&mut rng);
            let v = draw(&mut rng);
            for (i, cex) in ccs_properties(&u, &v).into_iter().enumerate() {
                if let Some(c) = cex {
                    counts[i] += 1;
                    first[i].get_or_insert(c);
                }
            }
        }
        ccs_failing = (0..4).filter(|&i| counts[i] > 0).map(|i| i + 1).collect();
        lines.push(Line {
            id: 7,
            name: "CCS algebra",
            pass: ccs_failing.is_empty(),
            detail: format!(
                "{CCS_PAIRS} pairs; pairs with a counterexample to (1)..(4): {:?}",
                counts
            ),
        });
        for (i, c) in first.iter().enumerate() {
            if let Some(c) = c {
                println!("    ({}) {}", i + 1, c);
            }
        }
    }

    // 9 (before 8 so its continuations are not counted; 8 is about criteria 1 and 3)
    let line9 = {
        let rep = bound_policy_agreement(&bimodal, COUNTER_BITS);
        let w: FormulaSet = [bi("[a]q"), bi("~[a]p")].into_iter().collect();
        let mut lasso = Solver::new(SolverConfig::default());
        let mut counter = Solver::new(SolverConfig {
            policy: BoundPolicy::Counter(None),
            memo: true,
        });
        let l = lasso.sat_set(&w).map(|r| r.verdict);
        let c = counter.sat_set(&w).map(|r| r.verdict);
        let expected_lasso = Lasso {
            heads: vec![
                [bi("~p"), bi("q")].into_iter().collect(),
                std::iter::once(bi("q")).collect(),
            ],
            cycle_start: 1,
        };
        let worked = l == Ok(Verdict::Sat)
            && c == Ok(Verdict::Sat)
            && lasso.proof(&w).map(|p| p.a_lassos.clone()) == Some(vec![expected_lasso]);
        Line {
            id: 9,
            name: "bound-policy agreement",
            pass: rep.passed() && worked,
            detail: format!(
                "{} inputs with counter <= 2^{COUNTER_BITS} ({} skipped), disagreements={}, worked example lasso={l:?} counter={c:?} self-loop={}",
                rep.checked,
                rep.counters.get("skipped_large_counter").unwrap_or(&0),
                rep.failures,
                worked
            ),
        }
    };

    // 8
    lines.push(Line {
        id: 8,
        name: "continuation lemma",
        pass: continuation_violations == 0,
        detail: format!("{continuation_checks} continuations generated, {continuation_violations} fail to merge into a (k+1)-window"),
    });
    lines.push(line9);

    // 10
    {
        let invocations: Vec<Vec<&str>> = vec![
            vec!["solve", "--logic", "kde", "--mode", "valid", "[][]p -> []p"],
            vec!["solve", "--logic", "kde", "--mode", "sat", "--stats", "<>p & ~p"],
            vec!["solve", "--logic", "kde", "--mode", "valid", "[]p -> p"],
            vec!["solve", "--logic", "kdeab", "--mode", "sat", "~([a][b]p -> [a]p)"],
            vec!["solve", "--logic", "kdeab", "--mode", "sat", "--stats", "[a]q & ~[a]p"],
            vec!["solve", "--logic", "kdeab", "--mode", "sat", "--bound", "counter", "[a]q & ~[a]p"],
            vec!["oracle", "--class", "weakly-dense", "--max-worlds", "2", "~[a]p"],
            vec!["oracle", "--class", "dense", "--max-worlds", "3", "~([][]p -> []p)"],
            vec!["translate", "--fresh", "p", "[]q"],
            vec!["corpus", "--logic", "kde", "--max-size", "7", "--atoms", "1"],
            vec!["corpus", "--logic", "kdeab", "--max-size", "6", "--atoms", "1"],
        ];
        let mut differing = Vec::new();
        for args in &invocations {
            let a = cli(args);
            let b = cli(args);
            if a != b || a.0 != 0 {
                differing.push(args.join(" "));
            }
        }
        let (_, tr) = cli(&["translate", "--fresh", "p", "[]q"]);
        lines.push(Line {
            id: 10,
            name: "determinism",
            pass: differing.is_empty() && tr == b"[](p -> q)\n",
            detail: format!("{} invocations run twice, differing or failing: {:?}", invocations.len(), differing),
        });
    }

    lines.sort_by_key(|l| l.id);
    let mut unexpected = Vec::new();
    for l in &lines {
        let expected_fail = EXPECTED_FAIL.contains(&l.id);
        let note = match (l.pass, expected_fail) {
            (false, true) => " (known: claim does not hold, see README)",
            (true, true) => " (expected to fail; update EXPECTED_FAIL)",
            _ => "",
        };
        println!(
            "criterion {:>2} {:<36} {}{}  {}",
            l.id,
            l.name,
            if l.pass { "PASS" } else { "FAIL" },
            note,
            l.detail
        );
        if l.pass == expected_fail {
            unexpected.push(l.id);
        }
    }
    // the known failure is confined to properties (3) and (4)
    if ccs_failing != [3, 4] {
        println!("criterion 7 failure set changed: {ccs_failing:?}");
        unexpected.push(7);
    }
    if !unexpected.is_empty() {
        println!("unexpected outcomes for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria at their recorded outcome");
}

fn print_examples(examples: &[String]) {
    for e in examples {
        println!("    {e}");
    }
}
