use super::{Formula, Modality, Mode};

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub(super) fn render(f: &Formula, mode: Mode) -> String {
    let mut out = String::new();
    write(f, mode, 0, &mut out);
    out
}

fn tag(m: Modality, mode: Mode, open: char, close: char) -> String {
    match (mode, m) {
        (Mode::Unimodal, Modality::A) => format!("{open}{close}"),
        _ => format!("{open}{}{close}", m.tag()),
    }
}

/// Writes `f`, parenthesised when its own precedence is below `min`.
fn write(f: &Formula, mode: Mode, min: u8, out: &mut String) {
    let prec = precedence(f);
    if prec < min {
        out.push('(');
        write_bare(f, mode, out);
        out.push(')');
    } else {
        write_bare(f, mode, out);
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::And(l, r) => match (&**l, &**r) {
                (Formula::Not(a), Formula::Not(_)) if !resugars(a) => OR,
                (_, Formula::Not(_)) => IMP,
                _ => UNARY,
            },
            _ => UNARY,
        },
        Formula::And(..) => AND,
        Formula::Box(..) => UNARY,
        Formula::Atom(_) | Formula::Falsum => UNARY + 1,
    }
}

/// Whether `¬inner` prints as something other than `~inner`. Such a left
/// conjunct reads better as the antecedent of `->` than as a negated disjunct.
fn resugars(inner: &Formula) -> bool {
    match inner {
        Formula::Falsum => true,
        Formula::And(_, r) => matches!(&**r, Formula::Not(_)),
        Formula::Box(_, body) => matches!(&**body, Formula::Not(_)),
        _ => false,
    }
}

fn write_bare(f: &Formula, mode: Mode, out: &mut String) {
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Falsum => out.push_str("false"),
        Formula::And(l, r) => {
            write(l, mode, AND, out);
            out.push_str(" & ");
            write(r, mode, UNARY, out);
        }
        Formula::Box(m, a) => {
            out.push_str(&tag(*m, mode, '[', ']'));
            write(a, mode, UNARY, out);
        }
        Formula::Not(inner) => match &**inner {
            Formula::Falsum => out.push_str("true"),
            Formula::And(l, r) => match (&**l, &**r) {
                (Formula::Not(a), Formula::Not(b)) if !resugars(a) => {
                    write(a, mode, OR, out);
                    out.push_str(" | ");
                    write(b, mode, AND, out);
                }
                (a, Formula::Not(b)) => {
                    write(a, mode, OR, out);
                    out.push_str(" -> ");
                    write(b, mode, IMP, out);
                }
                _ => {
                    out.push('~');
                    write(inner, mode, UNARY, out);
                }
            },
            Formula::Box(m, body) => match &**body {
                Formula::Not(a) => {
                    out.push_str(&tag(*m, mode, '<', '>'));
                    write(a, mode, UNARY, out);
                }
                _ => {
                    out.push('~');
                    write(inner, mode, UNARY, out);
                }
            },
            _ => {
                out.push('~');
                write(inner, mode, UNARY, out);
            }
        },
    }
}
