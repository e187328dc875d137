//! Recursive-descent parser for the textual formula syntax.
//!
//! Precedence, tightest first: prefix operators (`!`, `X`, `F`, `G`,
//! `<@s>`, `[@s]`, `<>`, `[]`), `U` (right), `&`, `|`, `->` (right),
//! `<->` (left).

use std::fmt;

use thiserror::Error;

use super::formula::{Formula, Standpoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: unexpected character {ch:?}")]
    Lexical { pos: Position, ch: char },
    #[error("{pos}: unbalanced parentheses: {detail}")]
    Unbalanced { pos: Position, detail: &'static str },
    #[error("{pos}: unknown sigil {sigil:?}: standpoints are written `@name` or `@*`")]
    UnknownSigil { pos: Position, sigil: String },
    #[error("{pos}: operator `{op}` is missing an operand")]
    DanglingOperator { pos: Position, op: String },
    #[error("{pos}: the release operator `R` is not supported; rewrite with `U` and negation")]
    Release { pos: Position },
    #[error("{pos}: name {name:?} uses the reserved `$` prefix")]
    ReservedName { pos: Position, name: String },
    #[error("{pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: Position,
        expected: &'static str,
        found: String,
    },
    #[error("empty formula")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sp(Standpoint),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Sharper,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    PlainDiamond,
    PlainBox,
    Next,
    Until,
    Eventually,
    Always,
    Release,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("`{n}`"),
            Tok::Sp(s) => format!("`{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Sharper => "`<=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::PlainDiamond => "`<>`".into(),
            Tok::PlainBox => "`[]`".into(),
            Tok::Next => "`X`".into(),
            Tok::Until => "`U`".into(),
            Tok::Eventually => "`F`".into(),
            Tok::Always => "`G`".into(),
            Tok::Release => "`R`".into(),
        }
    }

    fn is_binary(&self) -> bool {
        matches!(
            self,
            Tok::And | Tok::Or | Tok::Implies | Tok::Iff | Tok::Until
        )
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    allow_reserved: bool,
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.chars.peek() == Some(&c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn word(&mut self, first: char, extra: impl Fn(char) -> bool) -> String {
        let mut s = String::from(first);
        while let Some(&c) = self.chars.peek() {
            if is_ident_char(c) || extra(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Position)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let pos = self.pos();
            self.bump();
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '!' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '>' => Tok::Gt,
                ']' => Tok::RBracket,
                '[' => {
                    if self.eat(']') {
                        Tok::PlainBox
                    } else {
                        Tok::LBracket
                    }
                }
                '-' => {
                    if self.eat('>') {
                        Tok::Implies
                    } else {
                        return Err(ParseError::Lexical { pos, ch: c });
                    }
                }
                '<' => {
                    if self.eat('=') {
                        Tok::Sharper
                    } else if self.eat('>') {
                        Tok::PlainDiamond
                    } else if self.chars.peek() == Some(&'-') {
                        self.bump();
                        if self.eat('>') {
                            Tok::Iff
                        } else {
                            return Err(ParseError::Lexical { pos, ch: '-' });
                        }
                    } else {
                        Tok::Lt
                    }
                }
                '@' => match self.chars.peek().copied() {
                    Some('*') => {
                        self.bump();
                        Tok::Sp(Standpoint::Universal)
                    }
                    Some(d) if is_ident_char(d) => {
                        self.bump();
                        let name = self.word(d, |_| false);
                        Tok::Sp(Standpoint::named(&name))
                    }
                    other => {
                        return Err(ParseError::UnknownSigil {
                            pos,
                            sigil: other.map_or("@".to_string(), |o| format!("@{o}")),
                        })
                    }
                },
                '$' => {
                    let name = self.word('$', |c| c == '*');
                    if !self.allow_reserved {
                        return Err(ParseError::ReservedName { pos, name });
                    }
                    Tok::Ident(name)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let w = self.word(c, |_| false);
                    match w.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "X" => Tok::Next,
                        "U" => Tok::Until,
                        "F" => Tok::Eventually,
                        "G" => Tok::Always,
                        "R" => Tok::Release,
                        _ => Tok::Ident(w),
                    }
                }
                '#' | '%' | '^' | '~' | '?' => {
                    return Err(ParseError::UnknownSigil {
                        pos,
                        sigil: c.to_string(),
                    })
                }
                _ => return Err(ParseError::Lexical { pos, ch: c }),
            };
            out.push((tok, pos));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    idx: usize,
    end: Position,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Position {
        self.toks.get(self.idx).map_or(self.end, |(_, p)| *p)
    }

    fn advance(&mut self) -> Option<(Tok, Position)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn operand_after(&mut self, op: &Tok, op_pos: Position) -> Result<(), ParseError> {
        match self.peek() {
            None | Some(Tok::RParen) | Some(Tok::RBracket) => Err(ParseError::DanglingOperator {
                pos: op_pos,
                op: op.describe().trim_matches('`').to_string(),
            }),
            Some(t) if t.is_binary() => Err(ParseError::DanglingOperator {
                pos: op_pos,
                op: op.describe().trim_matches('`').to_string(),
            }),
            _ => Ok(()),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while let Some(Tok::Iff) = self.peek() {
            let (op, pos) = self.advance().unwrap();
            self.operand_after(&op, pos)?;
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if let Some(Tok::Implies) = self.peek() {
            let (op, pos) = self.advance().unwrap();
            self.operand_after(&op, pos)?;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while let Some(Tok::Or) = self.peek() {
            let (op, pos) = self.advance().unwrap();
            self.operand_after(&op, pos)?;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while let Some(Tok::And) = self.peek() {
            let (op, pos) = self.advance().unwrap();
            self.operand_after(&op, pos)?;
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                let (op, pos) = self.advance().unwrap();
                self.operand_after(&op, pos)?;
                Ok(Formula::until(lhs, self.until()?))
            }
            Some(Tok::Release) => Err(ParseError::Release { pos: self.pos() }),
            _ => Ok(lhs),
        }
    }

    fn standpoint_in(
        &mut self,
        close: Tok,
        expected: &'static str,
    ) -> Result<Standpoint, ParseError> {
        let s = match self.advance() {
            Some((Tok::Sp(s), _)) => s,
            Some((t, p)) => {
                return Err(ParseError::Unexpected {
                    pos: p,
                    expected: "a standpoint `@name`",
                    found: t.describe(),
                })
            }
            None => {
                return Err(ParseError::Unexpected {
                    pos: self.end,
                    expected: "a standpoint `@name`",
                    found: "end of input".into(),
                })
            }
        };
        match self.advance() {
            Some((t, _)) if t == close => Ok(s),
            Some((t, p)) => Err(ParseError::Unexpected {
                pos: p,
                expected,
                found: t.describe(),
            }),
            None => Err(ParseError::Unexpected {
                pos: self.end,
                expected,
                found: "end of input".into(),
            }),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(ParseError::Unexpected {
                pos: self.end,
                expected: "a formula",
                found: "end of input".into(),
            });
        };
        let pos = self.pos();
        let wrap: Box<dyn FnOnce(Formula) -> Formula> = match tok {
            Tok::Not => {
                self.advance();
                Box::new(Formula::not)
            }
            Tok::Next => {
                self.advance();
                Box::new(Formula::next)
            }
            Tok::Eventually => {
                self.advance();
                Box::new(Formula::eventually)
            }
            Tok::Always => {
                self.advance();
                Box::new(Formula::always)
            }
            Tok::PlainDiamond => {
                self.advance();
                Box::new(|f| Formula::diamond(Standpoint::Universal, f))
            }
            Tok::PlainBox => {
                self.advance();
                Box::new(|f| Formula::boxed(Standpoint::Universal, f))
            }
            Tok::Lt => {
                self.advance();
                let s = self.standpoint_in(Tok::Gt, "`>` closing `<@s>`")?;
                Box::new(move |f| Formula::diamond(s, f))
            }
            Tok::LBracket => {
                self.advance();
                let s = self.standpoint_in(Tok::RBracket, "`]` closing `[@s]`")?;
                Box::new(move |f| Formula::boxed(s, f))
            }
            _ => return self.primary(),
        };
        if let Some(Tok::RParen) | None = self.peek() {
            return Err(ParseError::DanglingOperator {
                pos,
                op: tok.describe().trim_matches('`').to_string(),
            });
        }
        let inner = self.unary()?;
        Ok(wrap(inner))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.advance() {
            Some((Tok::True, _)) => Ok(Formula::Top),
            Some((Tok::False, _)) => Ok(Formula::Bottom),
            Some((Tok::Ident(n), _)) => Ok(Formula::prop(&n)),
            Some((Tok::Sp(s), _)) => {
                match self.advance() {
                    Some((Tok::Sharper, _)) => {}
                    Some((t, p)) => {
                        return Err(ParseError::Unexpected {
                            pos: p,
                            expected: "`<=` after a standpoint",
                            found: t.describe(),
                        })
                    }
                    None => {
                        return Err(ParseError::DanglingOperator {
                            pos,
                            op: s.to_string(),
                        })
                    }
                }
                match self.advance() {
                    Some((Tok::Sp(t), _)) => Ok(Formula::sharper(s, t)),
                    Some((t, p)) => Err(ParseError::Unexpected {
                        pos: p,
                        expected: "a standpoint after `<=`",
                        found: t.describe(),
                    }),
                    None => Err(ParseError::DanglingOperator {
                        pos,
                        op: "<=".into(),
                    }),
                }
            }
            Some((Tok::LParen, open)) => {
                if let Some(Tok::RParen) = self.peek() {
                    return Err(ParseError::Unexpected {
                        pos: self.pos(),
                        expected: "a formula inside parentheses",
                        found: "`)`".into(),
                    });
                }
                let f = self.iff()?;
                match self.advance() {
                    Some((Tok::RParen, _)) => Ok(f),
                    Some((t, p)) => Err(ParseError::Unexpected {
                        pos: p,
                        expected: "`)`",
                        found: t.describe(),
                    }),
                    None => Err(ParseError::Unbalanced {
                        pos: open,
                        detail: "`(` is never closed",
                    }),
                }
            }
            Some((Tok::RParen, p)) => Err(ParseError::Unbalanced {
                pos: p,
                detail: "`)` without matching `(`",
            }),
            Some((Tok::Release, p)) => Err(ParseError::Release { pos: p }),
            Some((t, p)) if t.is_binary() => Err(ParseError::DanglingOperator {
                pos: p,
                op: t.describe().trim_matches('`').to_string(),
            }),
            Some((t, p)) => Err(ParseError::Unexpected {
                pos: p,
                expected: "a formula",
                found: t.describe(),
            }),
            None => Err(ParseError::Unexpected {
                pos,
                expected: "a formula",
                found: "end of input".into(),
            }),
        }
    }
}

fn parse_inner(text: &str, allow_reserved: bool) -> Result<Formula, ParseError> {
    let lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
        allow_reserved,
    };
    let toks = lexer.tokens()?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let end = {
        let mut line = 1;
        let mut column = 1;
        for c in text.chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Position { line, column }
    };
    let mut p = Parser { toks, idx: 0, end };
    let f = p.iff()?;
    match p.advance() {
        None => Ok(f),
        Some((Tok::RParen, pos)) => Err(ParseError::Unbalanced {
            pos,
            detail: "`)` without matching `(`",
        }),
        Some((Tok::Release, pos)) => Err(ParseError::Release { pos }),
        Some((t, pos)) => Err(ParseError::Unexpected {
            pos,
            expected: "an operator or end of input",
            found: t.describe(),
        }),
    }
}

/// Parse a user formula. Names starting with `$` are rejected.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_inner(text, false)
}

/// Parse a formula that may mention generated `$` names, such as the
/// output of a translation.
pub fn parse_generated(text: &str) -> Result<Formula, ParseError> {
    parse_inner(text, true)
}
