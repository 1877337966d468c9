use crate::kernel::{Atom, Axiom, PairDecl, Program, Rule, SideCondition, SourceSpan, Term};
use crate::semiring::{SemiringId, Value};

use super::lexer::{lex, Tok, TokKind};
use super::ParseError;

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    p.program()
}

/// Parse one comma-separated term list, as found in the args column of a
/// facts table. Empty input is an empty list.
pub fn parse_term_list(text: &str) -> Result<Vec<Term>, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut out = Vec::new();
    if p.at(&TokKind::Eof) {
        return Ok(out);
    }
    loop {
        out.push(p.term()?);
        if !p.eat(&TokKind::Comma) {
            break;
        }
    }
    p.expect(TokKind::Eof, "end of argument list")?;
    Ok(out)
}

/// Parse one atom, possibly with variables — the shape query flags take.
pub fn parse_atom_text(text: &str) -> Result<Atom, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let atom = p.atom()?;
    p.expect(TokKind::Eof, "end of atom")?;
    Ok(atom)
}

/// Parse a single weight, as found in the value column of a facts table.
pub fn parse_value_text(text: &str) -> Result<Value, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let v = p.value()?;
    p.expect(TokKind::Eof, "end of value")?;
    Ok(v)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn peek2(&self) -> &TokKind {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].kind
    }

    fn at(&self, kind: &TokKind) -> bool {
        &self.peek().kind == kind
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Tok, ParseError> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().kind.clone() {
            TokKind::Name(n) => {
                self.advance();
                Ok(n)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut prog = Program::default();
        while !self.at(&TokKind::Eof) {
            if self.at(&TokKind::At) {
                self.directive(&mut prog)?;
            } else {
                self.clause(&mut prog)?;
            }
        }
        Ok(prog)
    }

    fn directive(&mut self, prog: &mut Program) -> Result<(), ParseError> {
        let at = self.advance(); // '@'
        let which = self.name("directive name after @")?;
        match which.as_str() {
            "semiring" => {
                let name = self.name("semiring name")?;
                let Some(id) = SemiringId::parse(&name) else {
                    return Err(ParseError {
                        line: at.line,
                        col: at.col,
                        message: format!("unknown semiring {name}"),
                    });
                };
                if prog.semiring.is_some() {
                    return Err(ParseError {
                        line: at.line,
                        col: at.col,
                        message: "duplicate @semiring directive".to_string(),
                    });
                }
                prog.semiring = Some(id);
            }
            "input" => {
                let key = self.pred_arity()?;
                prog.inputs.insert(key);
            }
            "pair" => {
                let left = self.pred_arity()?;
                let right = self.pred_arity()?;
                self.expect(TokKind::KwAs, "`as`")?;
                let name = self.name("product predicate name")?;
                prog.pairs.push(PairDecl { left, right, name });
            }
            other => {
                return Err(ParseError {
                    line: at.line,
                    col: at.col,
                    message: format!("unknown directive @{other}"),
                });
            }
        }
        self.expect(TokKind::Dot, "`.` after directive")?;
        Ok(())
    }

    fn pred_arity(&mut self) -> Result<(String, usize), ParseError> {
        let name = self.name("predicate name")?;
        self.expect(TokKind::Slash, "`/` and an arity")?;
        let t = self.advance();
        let TokKind::Int(n) = t.kind else {
            return Err(ParseError {
                line: t.line,
                col: t.col,
                message: "expected arity".to_string(),
            });
        };
        if n < 0 {
            return Err(ParseError {
                line: t.line,
                col: t.col,
                message: "arity cannot be negative".to_string(),
            });
        }
        Ok((name, n as usize))
    }

    fn clause(&mut self, prog: &mut Program) -> Result<(), ParseError> {
        let start = self.peek().clone();
        let span = SourceSpan {
            line: start.line,
            col: start.col,
        };
        let head = self.atom()?;
        if self.eat(&TokKind::PlusEq) {
            let mut body = vec![self.atom()?];
            while self.eat(&TokKind::Star) {
                body.push(self.atom()?);
            }
            let mut conditions = Vec::new();
            if self.eat(&TokKind::KwIf) {
                conditions.push(self.condition()?);
                while self.eat(&TokKind::Comma) {
                    conditions.push(self.condition()?);
                }
            }
            self.expect(TokKind::Dot, "`.` at end of rule")?;
            let mut rule = Rule::new(head, body).with_conditions(conditions);
            rule.span = Some(span);
            prog.rules.push(rule);
            Ok(())
        } else if self.eat(&TokKind::Eq) {
            let value = self.value()?;
            self.expect(TokKind::Dot, "`.` at end of fact")?;
            let mut ax = Axiom::new(head, value);
            ax.span = Some(span);
            prog.axioms.push(ax);
            Ok(())
        } else {
            self.fail("expected `+=` or `=`")
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let predicate = match self.peek().kind.clone() {
            TokKind::Name(n) => {
                self.advance();
                n
            }
            TokKind::Quoted(n) => {
                self.advance();
                n
            }
            _ => return self.fail("expected a predicate"),
        };
        let mut args = Vec::new();
        if self.eat(&TokKind::LParen) {
            args.push(self.term()?);
            while self.eat(&TokKind::Comma) {
                args.push(self.term()?);
            }
            self.expect(TokKind::RParen, "`)`")?;
        }
        Ok(Atom::new(predicate, args))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let head = self.term_primary()?;
        if self.eat(&TokKind::ColonColon) {
            let tail = self.term()?; // right-associative
            Ok(Term::cons(head, tail))
        } else {
            Ok(head)
        }
    }

    fn term_primary(&mut self) -> Result<Term, ParseError> {
        match self.peek().kind.clone() {
            TokKind::Var(v) => {
                self.advance();
                let sign = if self.at(&TokKind::Plus) && matches!(self.peek2(), TokKind::Int(_)) {
                    Some(1)
                } else if self.at(&TokKind::Minus) && matches!(self.peek2(), TokKind::Int(_)) {
                    Some(-1)
                } else {
                    None
                };
                if let Some(sign) = sign {
                    self.advance();
                    let t = self.advance();
                    let TokKind::Int(k) = t.kind else { unreachable!() };
                    Ok(Term::Arith(v, sign * k))
                } else {
                    Ok(Term::Var(v))
                }
            }
            TokKind::Name(n) => {
                self.advance();
                Ok(Term::Sym(n))
            }
            TokKind::Quoted(s) => {
                self.advance();
                Ok(Term::Sym(s))
            }
            TokKind::Int(n) => {
                self.advance();
                Ok(Term::Int(n))
            }
            TokKind::Minus => {
                self.advance();
                let t = self.advance();
                match t.kind {
                    TokKind::Int(n) => Ok(Term::Int(-n)),
                    _ => self.fail("expected an integer after `-`"),
                }
            }
            TokKind::LBracket => {
                self.advance();
                self.expect(TokKind::RBracket, "`]`")?;
                Ok(Term::Nil)
            }
            TokKind::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.fail("expected a term"),
        }
    }

    fn condition(&mut self) -> Result<SideCondition, ParseError> {
        // a predicate followed by `(` can only start a guard atom; a bare
        // name followed by a relation or a cons tail starts a comparison term
        let is_guard = match &self.peek().kind {
            TokKind::Name(_) | TokKind::Quoted(_) => {
                matches!(self.peek2(), TokKind::LParen)
                    || !matches!(
                        self.peek2(),
                        TokKind::Eq | TokKind::Neq | TokKind::ColonColon
                    )
            }
            _ => false,
        };
        if is_guard {
            return Ok(SideCondition::Guard(self.atom()?));
        }
        let lhs = self.term()?;
        if self.eat(&TokKind::Eq) {
            Ok(SideCondition::Eq(lhs, self.term()?))
        } else if self.eat(&TokKind::Neq) {
            Ok(SideCondition::Neq(lhs, self.term()?))
        } else {
            self.fail("expected `=` or `!=`")
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        match self.peek().kind.clone() {
            TokKind::KwTrue => {
                self.advance();
                Ok(Value::Bool(true))
            }
            TokKind::KwFalse => {
                self.advance();
                Ok(Value::Bool(false))
            }
            TokKind::LAngle => {
                self.advance();
                let x = self.float_component()?;
                self.expect(TokKind::Comma, "`,`")?;
                let y = self.float_component()?;
                self.expect(TokKind::Comma, "`,`")?;
                let z = self.float_component()?;
                self.expect(TokKind::RAngle, "`>`")?;
                Ok(Value::Triple(x, y, z))
            }
            _ => Ok(Value::Real(self.float_component()?)),
        }
    }

    fn float_component(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat(&TokKind::Minus);
        let t = self.advance();
        let v = match t.kind {
            TokKind::Int(n) => n as f64,
            TokKind::Float(x) => x,
            TokKind::KwInf => f64::INFINITY,
            TokKind::KwNan => f64::NAN,
            _ => {
                return Err(ParseError {
                    line: t.line,
                    col: t.col,
                    message: "expected a number".to_string(),
                })
            }
        };
        Ok(if neg { -v } else { v })
    }
}
