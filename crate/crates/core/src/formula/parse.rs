use thiserror::Error;

use super::{Formula, Modality, Mode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("modality `{found}` at {pos} is not allowed in {mode:?} mode")]
    ModeMismatch {
        pos: usize,
        found: String,
        mode: Mode,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    False,
    True,
    Not,
    Box(Option<Modality>),
    Dia(Option<Modality>),
    And,
    Or,
    Imp,
    LParen,
    RParen,
    End,
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => {
                out.push((start, Tok::Not));
                i += 1;
            }
            b'&' => {
                out.push((start, Tok::And));
                i += 1;
            }
            b'|' => {
                out.push((start, Tok::Or));
                i += 1;
            }
            b'(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((start, Tok::Imp));
                    i += 2;
                } else {
                    return Err(syntax(start, "expected `->`"));
                }
            }
            b'[' | b'<' => {
                let close = if c == b'[' { b']' } else { b'>' };
                let (m, len) = match (bytes.get(i + 1), bytes.get(i + 2)) {
                    (Some(&x), _) if x == close => (None, 2),
                    (Some(b'a'), Some(&x)) if x == close => (Some(Modality::A), 3),
                    (Some(b'b'), Some(&x)) if x == close => (Some(Modality::B), 3),
                    _ => {
                        return Err(syntax(
                            start,
                            format!("malformed modal operator starting with `{}`", c as char),
                        ))
                    }
                };
                out.push((start, if c == b'[' { Tok::Box(m) } else { Tok::Dia(m) }));
                i += len;
            }
            b'a'..=b'z' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    start,
                    match word {
                        "false" => Tok::False,
                        "true" => Tok::True,
                        _ => Tok::Atom(word.to_string()),
                    },
                ));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    mode: Mode,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn modality(&self, pos: usize, m: Option<Modality>, is_box: bool) -> Result<Modality, ParseError> {
        let found = |m: Option<Modality>| {
            let (open, close) = if is_box { ('[', ']') } else { ('<', '>') };
            match m {
                None => format!("{open}{close}"),
                Some(m) => format!("{open}{}{close}", m.tag()),
            }
        };
        match (self.mode, m) {
            (Mode::Unimodal, None) => Ok(Modality::A),
            (Mode::Bimodal, Some(m)) => Ok(m),
            (mode, m) => Err(ParseError::ModeMismatch {
                pos,
                found: found(m),
                mode,
            }),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Box(m) => {
                let m = self.modality(pos, m, true)?;
                self.bump();
                Ok(Formula::boxed(m, self.unary()?))
            }
            Tok::Dia(m) => {
                let m = self.modality(pos, m, false)?;
                self.bump();
                Ok(Formula::diamond(m, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Atom(name) => Ok(Formula::atom(&name)),
            Tok::False => Ok(Formula::falsum()),
            Tok::True => Ok(Formula::top()),
            Tok::LParen => {
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(syntax(self.pos(), "expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            t => Err(syntax(pos, format!("unexpected token {t:?}"))),
        }
    }
}

/// Parses `text` into a core formula, desugaring `true | -> <>`.
///
/// `&` and `|` associate to the left, `->` to the right.
pub fn parse(text: &str, mode: Mode) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, mode };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "trailing input"));
    }
    Ok(f)
}
