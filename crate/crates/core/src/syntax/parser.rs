//! Lexer and recursive-descent parser shared by both concrete syntaxes.
//!
//! Precedence, loosest first: `<->` (left), `->` (right), `|`, `&`, then the
//! prefix operators `~` and `Op[i]`, which bind alike.

use std::fmt;

use thiserror::Error;

use super::{is_reserved_atom_name, is_user_atom_name, AgentId, Atom, Formula};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("stratification error at {line}:{column}: the argument of Exp[{agent}] must not contain Box")]
    Stratification {
        line: usize,
        column: usize,
        agent: u32,
    },
    #[error("agent {agent} at {line}:{column} is outside 1..={n_agents}")]
    AgentRange {
        line: usize,
        column: usize,
        agent: u64,
        n_agents: u32,
    },
    #[error("atom `{name}` at {line}:{column} uses the reserved `_` prefix")]
    ReservedAtom {
        line: usize,
        column: usize,
        name: String,
    },
}

/// Modal keyword families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Modal {
    Exp,
    Box,
    Poss,
    B,
    A,
    X,
}

impl Modal {
    fn keyword(self) -> &'static str {
        match self {
            Modal::Exp => "Exp",
            Modal::Box => "Box",
            Modal::Poss => "Poss",
            Modal::B => "B",
            Modal::A => "A",
            Modal::X => "X",
        }
    }
}

pub(crate) const LDA_MODALS: &[Modal] = &[Modal::Exp, Modal::Box, Modal::Poss];

/// Untyped parse tree, before desugaring.
#[derive(Debug, Clone)]
pub(crate) struct Raw {
    pub pos: Pos,
    pub kind: RawKind,
}

#[derive(Debug, Clone)]
pub(crate) enum RawKind {
    Top,
    Bot,
    Atom(String),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Iff(Box<Raw>, Box<Raw>),
    Modal(Modal, AgentId, Box<Raw>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::DArrow => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn syntax(pos: Pos, expected: &[&str], found: impl fmt::Display) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n = digits
                .parse::<u64>()
                .map_err(|_| syntax(pos, &["agent index"], format!("`{digits}`")))?;
            (Tok::Num(n), j - i)
        } else {
            let rest = |s: &str| {
                s.chars()
                    .enumerate()
                    .all(|(k, x)| chars.get(i + k) == Some(&x))
            };
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBracket, 1),
                ']' => (Tok::RBracket, 1),
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Pipe, 1),
                '-' if rest("->") => (Tok::Arrow, 2),
                '<' if rest("<->") => (Tok::DArrow, 3),
                _ => return Err(syntax(pos, &["a formula token"], format!("`{c}`"))),
            }
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

struct Parser<'m> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    modals: &'m [Modal],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), &[what], self.peek()))
        }
    }

    fn iff(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::DArrow {
            let pos = self.bump().1;
            let rhs = self.implies()?;
            lhs = Raw {
                pos,
                kind: RawKind::Iff(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            let pos = self.bump().1;
            let rhs = self.implies()?;
            return Ok(Raw {
                pos,
                kind: RawKind::Implies(Box::new(lhs), Box::new(rhs)),
            });
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            let pos = self.bump().1;
            let rhs = self.and()?;
            lhs = Raw {
                pos,
                kind: RawKind::Or(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            let pos = self.bump().1;
            let rhs = self.unary()?;
            lhs = Raw {
                pos,
                kind: RawKind::And(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn expected_operand(&self) -> Vec<&'static str> {
        let mut v = vec!["atom", "`true`", "`false`", "`~`", "`(`"];
        v.extend(self.modals.iter().map(|m| m.keyword()));
        v
    }

    fn unary(&mut self) -> Result<Raw, ParseError> {
        let (tok, pos) = self.bump();
        let kind = match tok {
            Tok::Tilde => RawKind::Not(Box::new(self.unary()?)),
            Tok::LParen => {
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(inner);
            }
            Tok::Ident(name) if name == "true" => RawKind::Top,
            Tok::Ident(name) if name == "false" => RawKind::Bot,
            Tok::Ident(name) => {
                if let Some(m) = self.modals.iter().find(|m| m.keyword() == name) {
                    self.expect(Tok::LBracket, "`[`")?;
                    let (agent_tok, agent_pos) = self.bump();
                    let Tok::Num(n) = agent_tok else {
                        return Err(syntax(agent_pos, &["agent index"], agent_tok));
                    };
                    if n == 0 || n > u32::MAX as u64 {
                        return Err(ParseError::AgentRange {
                            line: agent_pos.line,
                            column: agent_pos.column,
                            agent: n,
                            n_agents: 0,
                        });
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    let body = self.unary()?;
                    RawKind::Modal(*m, AgentId::new(n as u32), Box::new(body))
                } else if is_user_atom_name(&name) || is_reserved_atom_name(&name) {
                    RawKind::Atom(name)
                } else {
                    let expected = self.expected_operand();
                    return Err(syntax(pos, &expected, Tok::Ident(name)));
                }
            }
            other => {
                let expected = self.expected_operand();
                return Err(syntax(pos, &expected, other));
            }
        };
        Ok(Raw { pos, kind })
    }
}

/// Parses to an untyped tree using the given modal keyword family.
pub(crate) fn parse_raw(text: &str, modals: &[Modal]) -> Result<Raw, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        modals,
    };
    let raw = p.iff()?;
    if *p.peek() != Tok::Eof {
        let expected = ["`&`", "`|`", "`->`", "`<->`", "end of input"];
        return Err(syntax(p.pos(), &expected, p.peek()));
    }
    Ok(raw)
}

/// Knobs for [`parse_formula_with`].
#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub n_agents: u32,
    /// Accept `_`-prefixed atoms. Off for user input, on for model files
    /// written by the toolkit itself.
    pub allow_reserved: bool,
}

impl ParseOptions {
    pub fn user(n_agents: u32) -> Self {
        ParseOptions {
            n_agents,
            allow_reserved: false,
        }
    }

    pub fn model(n_agents: u32) -> Self {
        ParseOptions {
            n_agents,
            allow_reserved: true,
        }
    }
}

pub(crate) fn check_agent(agent: AgentId, pos: Pos, n_agents: u32) -> Result<(), ParseError> {
    if agent.index() > n_agents {
        return Err(ParseError::AgentRange {
            line: pos.line,
            column: pos.column,
            agent: agent.index() as u64,
            n_agents,
        });
    }
    Ok(())
}

pub(crate) fn make_atom(name: &str, pos: Pos, allow_reserved: bool) -> Result<Atom, ParseError> {
    if let Ok(a) = Atom::new(name) {
        return Ok(a);
    }
    match Atom::reserved(name) {
        Ok(a) if allow_reserved => Ok(a),
        _ => Err(ParseError::ReservedAtom {
            line: pos.line,
            column: pos.column,
            name: name.to_string(),
        }),
    }
}

fn lower(raw: &Raw, opts: &ParseOptions) -> Result<Formula, ParseError> {
    let sub = |r: &Raw| lower(r, opts);
    Ok(match &raw.kind {
        RawKind::Top => Formula::top(),
        RawKind::Bot => Formula::bot(),
        RawKind::Atom(name) => Formula::atom(make_atom(name, raw.pos, opts.allow_reserved)?),
        RawKind::Not(a) => Formula::not(sub(a)?),
        RawKind::And(a, b) => Formula::and(sub(a)?, sub(b)?),
        RawKind::Or(a, b) => Formula::or(sub(a)?, sub(b)?),
        RawKind::Implies(a, b) => Formula::implies(sub(a)?, sub(b)?),
        RawKind::Iff(a, b) => Formula::iff(sub(a)?, sub(b)?),
        RawKind::Modal(m, i, body) => {
            check_agent(*i, raw.pos, opts.n_agents)?;
            let body = sub(body)?;
            match m {
                Modal::Exp => Formula::exp(*i, body).map_err(|_| ParseError::Stratification {
                    line: raw.pos.line,
                    column: raw.pos.column,
                    agent: i.index(),
                })?,
                Modal::Box => Formula::boxed(*i, body),
                Modal::Poss => Formula::poss(*i, body),
                Modal::B | Modal::A | Modal::X => unreachable!("not an LDA keyword"),
            }
        }
    })
}

/// Parses user input: reserved atoms are rejected.
pub fn parse_formula(text: &str, n_agents: u32) -> Result<Formula, ParseError> {
    parse_formula_with(text, ParseOptions::user(n_agents))
}

pub fn parse_formula_with(text: &str, opts: ParseOptions) -> Result<Formula, ParseError> {
    assert!(opts.n_agents >= 1, "at least one agent is required");
    lower(&parse_raw(text, LDA_MODALS)?, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Node;

    fn p() -> Formula {
        Formula::var("p")
    }
    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn constructors() {
        let one = AgentId::new(1);
        assert_eq!(
            parse_formula("Exp[1] p", 2).unwrap(),
            Formula::exp(one, p()).unwrap()
        );
        assert_eq!(
            parse_formula("Box[1] (p & q)", 2).unwrap(),
            Formula::boxed(one, Formula::and(p(), q()))
        );
        assert_eq!(
            parse_formula("Box[1](p & q)", 2).unwrap(),
            Formula::boxed(one, Formula::and(p(), q()))
        );
    }

    #[test]
    fn exp_over_box_rejected() {
        let err = parse_formula("Exp[1] Box[2] p", 2).unwrap_err();
        assert!(matches!(
            err,
            ParseError::Stratification {
                line: 1,
                column: 1,
                agent: 1
            }
        ));
    }

    #[test]
    fn agent_range() {
        assert!(matches!(
            parse_formula("Box[3] p", 2),
            Err(ParseError::AgentRange {
                agent: 3,
                n_agents: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_formula("Box[0] p", 2),
            Err(ParseError::AgentRange { .. })
        ));
    }

    #[test]
    fn precedence() {
        // ~ > & > | > -> > <->
        let f = parse_formula("~p & q | p -> q <-> p", 1).unwrap();
        let np = Formula::not(p());
        let expected = Formula::iff(
            Formula::implies(Formula::or(Formula::and(np, q()), p()), q()),
            p(),
        );
        assert_eq!(f, expected);
        // implication associates to the right
        assert_eq!(
            parse_formula("p -> q -> p", 1).unwrap(),
            Formula::implies(p(), Formula::implies(q(), p()))
        );
        // modal operators bind like negation
        let one = AgentId::new(1);
        assert_eq!(
            parse_formula("Exp[1] p -> Box[1] p", 1).unwrap(),
            Formula::implies(Formula::exp(one, p()).unwrap(), Formula::boxed(one, p()))
        );
        assert_eq!(
            parse_formula("Poss[1] p", 1).unwrap(),
            Formula::poss(one, p())
        );
    }

    #[test]
    fn error_positions() {
        let err = parse_formula("p &\n  (q", 1).unwrap_err();
        match err {
            ParseError::Syntax {
                line,
                column,
                expected,
                ..
            } => {
                assert_eq!((line, column), (2, 5));
                assert_eq!(expected, vec!["`)`".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("p q", 1),
            Err(ParseError::Syntax {
                line: 1,
                column: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_formula("p $ q", 1),
            Err(ParseError::Syntax { column: 3, .. })
        ));
        assert!(matches!(
            parse_formula("Foo[1] p", 1),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn reserved_atoms_only_in_model_mode() {
        assert!(matches!(
            parse_formula("_f_1_w0", 1),
            Err(ParseError::ReservedAtom { .. })
        ));
        let f = parse_formula_with("_f_1_w0", ParseOptions::model(1)).unwrap();
        assert!(matches!(f.node(), Node::Atom(a) if a.is_reserved()));
    }

    #[test]
    fn constants() {
        assert_eq!(parse_formula("true", 1).unwrap(), Formula::top());
        assert_eq!(parse_formula("false", 1).unwrap(), Formula::bot());
    }
}
