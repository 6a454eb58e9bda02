use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, LexError, Tok, Token, MAX_INT63};
use crate::span::Span;
use crate::types::Type;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("parse error: expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    pub span: Span,
    pub expected: BTreeSet<String>,
    pub found: String,
}

fn expected_list(set: &BTreeSet<String>) -> String {
    let items: Vec<&str> = set.iter().map(String::as_str).collect();
    match items.len() {
        0 => "something else".to_string(),
        1 => items[0].to_string(),
        _ => format!("one of {}", items.join(", ")),
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lex(e) => e.span,
            SyntaxError::Parse(e) => e.span,
        }
    }
}

/// Tokenizes and parses a whole program.
pub fn parse_source(source: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source)?;
    Ok(parse_program(&tokens)?)
}

pub fn parse_program(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut p = Parser { tokens, pos: 0, ctor_arity: HashMap::new() };
    let mut variants = Vec::new();
    while p.peek() == &Tok::Type {
        let decl = p.variant_decl()?;
        for (c, fields) in &decl.ctors {
            p.ctor_arity.insert(c.clone(), fields.len());
        }
        variants.push(decl);
    }
    let main = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(Program { variants, main })
}

/// Parses a standalone type, e.g. `?->int`.
pub fn parse_type(source: &str) -> Result<Type, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens: &tokens, pos: 0, ctor_arity: HashMap::new() };
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    ctor_arity: HashMap<Ident, usize>,
}

fn is_ctor_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            self.error(&[&tok.to_string()])
        }
    }

    fn ident(&mut self) -> Result<(Ident, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_ctor_name(&s) => {
                let sp = self.bump().span;
                Ok((s.as_str().into(), sp))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn ctor_name(&mut self) -> Result<(Ident, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if is_ctor_name(&s) => {
                let sp = self.bump().span;
                Ok((s.as_str().into(), sp))
            }
            _ => self.error(&["constructor"]),
        }
    }

    // ---- declarations ----

    fn variant_decl(&mut self) -> Result<VariantDecl, ParseError> {
        let start = self.expect(Tok::Type)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::Eq)?;
        self.eat(&Tok::Bar);
        let mut ctors = Vec::new();
        loop {
            let (c, _) = self.ctor_name()?;
            let mut fields = Vec::new();
            if self.eat(&Tok::Of) {
                fields.push(self.ty_atom()?);
                while self.eat(&Tok::Star) {
                    fields.push(self.ty_atom()?);
                }
            }
            ctors.push((c, fields));
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        Ok(VariantDecl { name, ctors, span: start.to(self.prev_span()) })
    }

    // ---- types ----

    fn ty(&mut self) -> Result<Type, ParseError> {
        if self.peek() == &Tok::LParen && self.paren_param_list_ahead() {
            self.bump();
            let mut params = vec![self.ty()?];
            while self.eat(&Tok::Comma) {
                params.push(self.ty()?);
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::Arrow)?;
            let ret = self.ty()?;
            return Ok(Type::fun(params, ret));
        }
        let lhs = self.ty_product()?;
        if self.eat(&Tok::Arrow) {
            let ret = self.ty()?;
            return Ok(Type::fun(vec![lhs], ret));
        }
        Ok(lhs)
    }

    /// At `(`: whether a top-level comma occurs before the matching `)`.
    fn paren_param_list_ahead(&self) -> bool {
        let mut depth = 0usize;
        let mut k = self.pos;
        while k < self.tokens.len() {
            match self.tokens[k].tok {
                Tok::LParen | Tok::LBracket => depth += 1,
                Tok::RParen | Tok::RBracket => {
                    depth -= 1;
                    if depth == 0 {
                        return false;
                    }
                }
                Tok::Comma if depth == 1 => return true,
                Tok::Eof => return false,
                _ => {}
            }
            k += 1;
        }
        false
    }

    /// A type without a top-level arrow.
    fn ty_product(&mut self) -> Result<Type, ParseError> {
        let first = self.ty_atom()?;
        if self.peek() != &Tok::Star {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat(&Tok::Star) {
            items.push(self.ty_atom()?);
        }
        Ok(Type::tuple(items))
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Question => {
                self.bump();
                Ok(Type::Dyn)
            }
            Tok::Ref => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let t = self.ty()?;
                self.expect(Tok::RBracket)?;
                Ok(Type::reference(t))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if !is_ctor_name(&s) => {
                self.bump();
                Ok(match s.as_str() {
                    "int" => Type::Int,
                    "bool" => Type::Bool,
                    "float" => Type::Float,
                    "unit" => Type::Unit,
                    "vec" => {
                        self.expect(Tok::LBracket)?;
                        let t = self.ty()?;
                        self.expect(Tok::RBracket)?;
                        Type::vector(t)
                    }
                    other => Type::named(other),
                })
            }
            _ => self.error(&["type"]),
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.assign_level()?;
        if self.eat(&Tok::Semi) {
            let rhs = self.expr()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr::new(ExprKind::Seq(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn assign_level(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.ascribe_level()?;
        match self.peek() {
            Tok::Assign => {
                self.bump();
                let rhs = self.assign_level()?;
                let span = lhs.span.to(rhs.span);
                Ok(Expr::new(ExprKind::Assign { target: Box::new(lhs), value: Box::new(rhs) }, span))
            }
            Tok::LArrow => {
                let ExprKind::VecGet { vec, index } = lhs.kind else {
                    return self.error(&[";", "end of expression"]);
                };
                self.bump();
                let rhs = self.assign_level()?;
                let span = lhs.span.to(rhs.span);
                Ok(Expr::new(ExprKind::VecSet { vec, index, value: Box::new(rhs) }, span))
            }
            _ => Ok(lhs),
        }
    }

    fn ascribe_level(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.binary(1)?;
        while self.eat(&Tok::ColonColon) {
            let ty = self.ty()?;
            let span = e.span.to(self.prev_span());
            e = Expr::new(ExprKind::Ascribe { expr: Box::new(e), ty }, span);
        }
        Ok(e)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::FEq => BinOp::FEq,
            Tok::FLt => BinOp::FLt,
            Tok::FLe => BinOp::FLe,
            Tok::FGt => BinOp::FGt,
            Tok::FGe => BinOp::FGe,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::FPlus => BinOp::FAdd,
            Tok::FMinus => BinOp::FSub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Mod,
            Tok::FStar => BinOp::FMul,
            Tok::FSlash => BinOp::FDiv,
            _ => return None,
        })
    }

    /// Precedence climbing over binary operators. Comparisons do not chain.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
            if prec == 3 && self.binop().map(BinOp::precedence) == Some(3) {
                return self.error(&["operand"]);
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        let span = start.to(self.prev_span());
                        return self.postfix_from(Expr::new(ExprKind::Int(n.wrapping_neg()), span));
                    }
                    Tok::Float(x) => {
                        self.bump();
                        let span = start.to(self.prev_span());
                        return self.postfix_from(Expr::new(ExprKind::Float(-x), span));
                    }
                    _ => {}
                }
                let e = self.unary()?;
                let span = start.to(e.span);
                let zero = Expr::new(ExprKind::Int(0), Span::new(start.start as usize, start.start as usize));
                Ok(Expr::new(ExprKind::Binary { op: BinOp::Sub, lhs: Box::new(zero), rhs: Box::new(e) }, span))
            }
            Tok::Bang => {
                self.bump();
                let e = self.unary()?;
                let span = start.to(e.span);
                Ok(Expr::new(ExprKind::Deref(Box::new(e)), span))
            }
            Tok::Hash => {
                self.bump();
                let index = match self.peek().clone() {
                    Tok::Int(n) if (0..=MAX_INT63).contains(&n) => {
                        self.bump();
                        n as usize
                    }
                    _ => return self.error(&["tuple index"]),
                };
                let e = self.unary()?;
                let span = start.to(e.span);
                Ok(Expr::new(ExprKind::Proj { tuple: Box::new(e), index }, span))
            }
            Tok::Fun | Tok::Let | Tok::If | Tok::Match | Tok::Loop => self.keyword_form(),
            _ => self.application(),
        }
    }

    fn keyword_form(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.bump().tok {
            Tok::Fun => {
                let params = self.lambda_params()?;
                let ret = if self.eat(&Tok::Colon) { Some(self.ty_product()?) } else { None };
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                let span = start.to(body.span);
                Ok(Expr::new(ExprKind::Lambda { params, ret, body: Box::new(body) }, span))
            }
            Tok::Let => self.let_form(start),
            Tok::If => {
                let cond = self.expr()?;
                self.expect(Tok::Then)?;
                let then_branch = self.assign_level()?;
                let else_branch = if self.eat(&Tok::Else) {
                    self.assign_level()?
                } else {
                    let at = self.prev_span();
                    Expr::new(ExprKind::Unit, Span::new(at.end as usize, at.end as usize))
                };
                let span = start.to(else_branch.span).to(then_branch.span);
                Ok(Expr::new(
                    ExprKind::If {
                        cond: Box::new(cond),
                        then_branch: Box::new(then_branch),
                        else_branch: Box::new(else_branch),
                    },
                    span,
                ))
            }
            Tok::Match => {
                let scrutinee = self.expr()?;
                self.expect(Tok::With)?;
                let mut arms = Vec::new();
                self.eat(&Tok::Bar);
                loop {
                    arms.push(self.arm()?);
                    if !self.eat(&Tok::Bar) {
                        break;
                    }
                }
                let span = start.to(self.prev_span());
                Ok(Expr::new(ExprKind::Match { scrutinee: Box::new(scrutinee), arms }, span))
            }
            Tok::Loop => {
                let (var, _) = self.ident()?;
                self.expect(Tok::Eq)?;
                let lo = self.expr()?;
                self.expect(Tok::To)?;
                let hi = self.expr()?;
                self.expect(Tok::Do)?;
                let body = self.expr()?;
                let end = self.expect(Tok::Done)?;
                Ok(Expr::new(
                    ExprKind::Loop { var, lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body) },
                    start.to(end),
                ))
            }
            _ => unreachable!("keyword_form called on a non-keyword"),
        }
    }

    fn lambda_params(&mut self) -> Result<Vec<Param>, ParseError> {
        let mut params = Vec::new();
        loop {
            match self.peek() {
                Tok::Ident(_) => {
                    let (name, span) = self.ident()?;
                    params.push(Param { name, ann: None, span });
                }
                Tok::Underscore => {
                    let span = self.bump().span;
                    params.push(Param { name: "_".into(), ann: None, span });
                }
                Tok::LParen => {
                    self.bump();
                    loop {
                        let start = self.span();
                        let name: Ident = if self.eat(&Tok::Underscore) { "_".into() } else { self.ident()?.0 };
                        let ann = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
                        params.push(Param { name, ann, span: start.to(self.prev_span()) });
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                _ => break,
            }
        }
        if params.is_empty() {
            return self.error(&["parameter"]);
        }
        Ok(params)
    }

    fn let_form(&mut self, start: Span) -> Result<Expr, ParseError> {
        let is_rec = self.eat(&Tok::Rec);
        let (name, _) = self.ident()?;
        let fn_start = self.span();
        let sugared = matches!(self.peek(), Tok::LParen | Tok::Ident(_) | Tok::Underscore);
        let (ann, bound) = if sugared {
            let params = self.lambda_params()?;
            let ret = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
            self.expect(Tok::Eq)?;
            let body = self.expr()?;
            let span = fn_start.to(body.span);
            (None, Expr::new(ExprKind::Lambda { params, ret, body: Box::new(body) }, span))
        } else {
            let ann = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
            self.expect(Tok::Eq)?;
            (ann, self.expr()?)
        };
        self.expect(Tok::In)?;
        let body = self.expr()?;
        let span = start.to(body.span);
        let (bound, body) = (Box::new(bound), Box::new(body));
        let kind = if is_rec {
            ExprKind::LetRec { name, ann, bound, body }
        } else {
            ExprKind::Let { name, ann, bound, body }
        };
        Ok(Expr::new(kind, span))
    }

    fn arm(&mut self) -> Result<Arm, ParseError> {
        let (ctor, start) = self.ctor_name()?;
        let mut binders = Vec::new();
        let binder = |p: &mut Self| -> Result<Option<Ident>, ParseError> {
            if p.eat(&Tok::Underscore) {
                Ok(None)
            } else {
                Ok(Some(p.ident()?.0))
            }
        };
        if self.eat(&Tok::LParen) {
            binders.push(binder(self)?);
            while self.eat(&Tok::Comma) {
                binders.push(binder(self)?);
            }
            self.expect(Tok::RParen)?;
        } else if matches!(self.peek(), Tok::Ident(s) if !is_ctor_name(s)) || self.peek() == &Tok::Underscore {
            binders.push(binder(self)?);
        }
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        let span = start.to(body.span);
        Ok(Arm { ctor, binders, body, span })
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Int(_) | Tok::Float(_) | Tok::True | Tok::False | Tok::LParen | Tok::Ident(_))
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ref => {
                self.bump();
                let arg = self.postfix()?;
                let span = start.to(arg.span);
                return Ok(Expr::new(ExprKind::MakeRef(Box::new(arg)), span));
            }
            Tok::Vector => {
                self.bump();
                let len = self.postfix()?;
                let init = self.postfix()?;
                let span = start.to(init.span);
                return Ok(Expr::new(ExprKind::MakeVec { len: Box::new(len), init: Box::new(init) }, span));
            }
            Tok::Ident(s) if is_ctor_name(&s) => return self.ctor_app(),
            Tok::Ident(s) => {
                if let Some(op) = PrimOp::from_name(&s) {
                    self.bump();
                    let mut args = Vec::new();
                    while args.len() < op.arity() {
                        if !self.starts_atom() {
                            return self.error(&["argument"]);
                        }
                        args.push(self.postfix()?);
                    }
                    let span = start.to(self.prev_span());
                    return self.postfix_from(Expr::new(ExprKind::Prim { op, args }, span));
                }
            }
            _ => {}
        }
        let callee = self.postfix()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.postfix()?);
        }
        if args.is_empty() {
            return Ok(callee);
        }
        let span = callee.span.to(self.prev_span());
        Ok(Expr::new(ExprKind::App { callee: Box::new(callee), args }, span))
    }

    fn ctor_app(&mut self) -> Result<Expr, ParseError> {
        let (name, start) = self.ctor_name()?;
        let arity = match self.ctor_arity.get(&name) {
            Some(&n) => n,
            None => {
                return Err(ParseError {
                    span: start,
                    expected: ["declared constructor".to_string()].into(),
                    found: name.to_string(),
                })
            }
        };
        let args = match arity {
            0 => vec![],
            1 => vec![self.postfix()?],
            n => {
                self.expect(Tok::LParen)?;
                let mut args = vec![self.expr()?];
                while args.len() < n {
                    self.expect(Tok::Comma)?;
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                args
            }
        };
        let span = start.to(self.prev_span());
        Ok(Expr::new(ExprKind::Ctor { name, args }, span))
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let e = self.atom()?;
        self.postfix_from(e)
    }

    fn postfix_from(&mut self, mut e: Expr) -> Result<Expr, ParseError> {
        while self.eat(&Tok::DotBracket) {
            let index = self.expr()?;
            let end = self.expect(Tok::RBracket)?;
            let span = e.span.to(end);
            e = Expr::new(ExprKind::VecGet { vec: Box::new(e), index: Box::new(index) }, span);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                if n > MAX_INT63 {
                    return Err(ParseError {
                        span: start,
                        expected: ["63-bit integer".to_string()].into(),
                        found: n.to_string(),
                    });
                }
                self.bump();
                ExprKind::Int(n)
            }
            Tok::Float(x) => {
                self.bump();
                ExprKind::Float(x)
            }
            Tok::True => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Ident(s) if !is_ctor_name(&s) && PrimOp::from_name(&s).is_none() => {
                self.bump();
                ExprKind::Var(s.as_str().into())
            }
            Tok::Ident(s) if is_ctor_name(&s) && self.ctor_arity.get(s.as_str()) == Some(&0) => {
                self.bump();
                ExprKind::Ctor { name: s.as_str().into(), args: vec![] }
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    ExprKind::Unit
                } else {
                    let first = self.expr()?;
                    if self.peek() == &Tok::Comma {
                        let mut items = vec![first];
                        while self.eat(&Tok::Comma) {
                            items.push(self.expr()?);
                        }
                        self.expect(Tok::RParen)?;
                        ExprKind::Tuple(items)
                    } else {
                        self.expect(Tok::RParen)?;
                        // keep the inner node, widened to cover the parens
                        return Ok(Expr { span: start.to(self.prev_span()), ..first });
                    }
                }
            }
            _ => return self.error(&["expression"]),
        };
        Ok(Expr::new(kind, start.to(self.prev_span())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Program {
        parse_source(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn annotated_let() {
        let p = parse("let f : ?->int = fun g -> g 1 in f true");
        let ExprKind::Let { ann, .. } = &p.main.kind else { panic!() };
        assert_eq!(ann.as_ref(), Some(&Type::fun(vec![Type::Dyn], Type::Int)));
    }

    #[test]
    fn reference_program() {
        let p = parse("let x = ref (4 :: ?) in\nlet y: ref[bool] = x in\ny := true;\n!y");
        let ExprKind::Let { bound, body, .. } = &p.main.kind else { panic!() };
        assert!(matches!(&bound.kind, ExprKind::MakeRef(e) if matches!(e.kind, ExprKind::Ascribe { .. })));
        let ExprKind::Let { ann, body, .. } = &body.kind else { panic!() };
        assert_eq!(ann.as_ref(), Some(&Type::reference(Type::Bool)));
        let ExprKind::Seq(a, b) = &body.kind else { panic!() };
        assert!(matches!(a.kind, ExprKind::Assign { .. }));
        assert!(matches!(b.kind, ExprKind::Deref(_)));
    }

    #[test]
    fn variant_declaration() {
        let p = parse("type stream = SCons of int * (int -> stream)\n0");
        assert_eq!(p.variants.len(), 1);
        let (c, fields) = &p.variants[0].ctors[0];
        assert_eq!(&**c, "SCons");
        assert_eq!(fields.len(), 2);
        assert_eq!(fields[1], Type::fun(vec![Type::Int], Type::named("stream")));
    }

    #[test]
    fn precedence() {
        let p = parse("1 + 2 * 3 = 7 && true");
        let ExprKind::Binary { op: BinOp::And, lhs, .. } = &p.main.kind else { panic!() };
        let ExprKind::Binary { op: BinOp::Eq, lhs, .. } = &lhs.kind else { panic!() };
        assert!(matches!(lhs.kind, ExprKind::Binary { op: BinOp::Add, .. }));
    }

    #[test]
    fn multi_param_types() {
        assert_eq!(
            parse_type("(int,bool)->unit").unwrap(),
            Type::fun(vec![Type::Int, Type::Bool], Type::Unit)
        );
        assert_eq!(
            parse_type("int*bool->int").unwrap(),
            Type::fun(vec![Type::tuple(vec![Type::Int, Type::Bool])], Type::Int)
        );
        assert_eq!(parse_type("vec[?]").unwrap(), Type::vector(Type::Dyn));
    }

    #[test]
    fn errors_carry_expected_set() {
        let err = parse_source("let x = in x").unwrap_err();
        let SyntaxError::Parse(e) = err else { panic!() };
        assert!(e.expected.contains("expression"));
        assert_eq!(e.span, Span::new(8, 10));
        assert!(parse_source("1 < 2 < 3").is_err());
        assert!(parse_source("4611686018427387904").is_err());
        assert!(parse_source("-4611686018427387904").is_ok());
    }

    #[test]
    fn vector_and_match_forms() {
        let src = "type t = A of int | B\n\
                   let v = vector 3 0 in v.[1] <- 2; match A v.[1] with | A (x) -> x | B -> 0";
        let p = parse(src);
        let ExprKind::Let { body, .. } = &p.main.kind else { panic!() };
        let ExprKind::Seq(set, m) = &body.kind else { panic!() };
        assert!(matches!(set.kind, ExprKind::VecSet { .. }));
        let ExprKind::Match { arms, .. } = &m.kind else { panic!() };
        assert_eq!(arms.len(), 2);
    }

    #[test]
    fn spans_are_ordered() {
        fn check(e: &Expr) {
            assert!(e.span.start <= e.span.end);
            for c in e.children() {
                assert!(c.span.start >= e.span.start && c.span.end <= e.span.end, "{e:?}");
                check(c);
            }
        }
        check(&parse("let f = fun (x:?, y) -> x y in (f (fun z -> z) 1; #0 (1, 2))").main);
    }
}
