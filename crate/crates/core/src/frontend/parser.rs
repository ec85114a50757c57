//! Recursive descent parser. Binary operators use precedence climbing.

use std::collections::HashSet;

use crate::diag::Span;
use crate::frontend::ast::*;
use crate::frontend::lexer::{Keyword, Punct, Token, TokenKind};
use crate::frontend::SyntaxError;

pub fn parse_program(tokens: &[Token]) -> Result<Program, SyntaxError> {
    assert!(
        matches!(tokens.last(), Some(t) if t.kind == TokenKind::Eof),
        "token stream must end with Eof"
    );
    Parser {
        tokens,
        pos: 0,
        struct_names: HashSet::new(),
    }
    .program()
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    struct_names: HashSet<String>,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> TokenKind {
        self.peek().kind
    }

    fn peek_nth(&self, n: usize) -> TokenKind {
        self.tokens[(self.pos + n).min(self.tokens.len() - 1)].kind
    }

    fn bump(&mut self) -> &'t Token {
        let tok = self.peek();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.peek_kind() == kind
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[TokenKind]) -> SyntaxError {
        let tok = self.peek();
        let expected: Vec<String> = expected.iter().map(ToString::to_string).collect();
        SyntaxError {
            span: tok.span,
            message: format!("expected {}, found {}", expected.join(" or "), tok.kind),
            expected,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<&'t Token, SyntaxError> {
        if self.at(kind) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[kind]))
        }
    }

    fn ident(&mut self) -> Result<&'t Token, SyntaxError> {
        self.expect(TokenKind::Ident)
    }

    fn program(mut self) -> Result<Program, SyntaxError> {
        let mut structs = Vec::new();
        while self.at(TokenKind::Keyword(Keyword::Struct)) {
            let decl = self.struct_decl()?;
            if !self.struct_names.insert(decl.name.clone()) {
                return Err(SyntaxError::new(
                    decl.span,
                    format!("duplicate struct `{}`", decl.name),
                ));
            }
            structs.push(decl);
            if !self.eat(TokenKind::Keyword(Keyword::In)) && !self.eat(TokenKind::Punct(Punct::Semi))
            {
                return Err(self.unexpected(&[
                    TokenKind::Keyword(Keyword::In),
                    TokenKind::Punct(Punct::Semi),
                ]));
            }
        }
        let entry = self.expr()?;
        self.expect(TokenKind::Eof)?;
        Ok(Program { structs, entry })
    }

    fn struct_decl(&mut self) -> Result<StructDecl, SyntaxError> {
        let start = self.expect(TokenKind::Keyword(Keyword::Struct))?.span;
        let name = self.ident()?.lexeme.clone();
        self.expect(TokenKind::Punct(Punct::LBrace))?;
        let mut fields: Vec<FieldDecl> = Vec::new();
        loop {
            let qualifier = match self.peek_kind() {
                TokenKind::Keyword(Keyword::Let) => Qualifier::Let,
                TokenKind::Keyword(Keyword::Var) => Qualifier::Var,
                TokenKind::Punct(Punct::RBrace) => break,
                _ => {
                    return Err(self.unexpected(&[
                        TokenKind::Keyword(Keyword::Var),
                        TokenKind::Keyword(Keyword::Let),
                        TokenKind::Punct(Punct::RBrace),
                    ]))
                }
            };
            self.bump();
            let tok = self.ident()?;
            if fields.iter().any(|f| f.name == tok.lexeme) {
                return Err(SyntaxError::new(
                    tok.span,
                    format!("duplicate field `{}` in struct `{name}`", tok.lexeme),
                ));
            }
            self.expect(TokenKind::Punct(Punct::Colon))?;
            let ty = self.type_expr()?;
            fields.push(FieldDecl {
                qualifier,
                name: tok.lexeme.clone(),
                ty,
            });
            if !self.eat(TokenKind::Punct(Punct::Semi)) {
                break;
            }
        }
        let end = self.expect(TokenKind::Punct(Punct::RBrace))?.span;
        Ok(StructDecl {
            name,
            fields,
            span: start.to(end),
        })
    }

    fn type_expr(&mut self) -> Result<TypeExpr, SyntaxError> {
        match self.peek_kind() {
            TokenKind::Ident => {
                let tok = self.bump();
                Ok(TypeExpr::Named(tok.lexeme.clone(), tok.span))
            }
            TokenKind::Punct(Punct::LBracket) => {
                self.bump();
                let elem = self.type_expr()?;
                self.expect(TokenKind::Punct(Punct::RBracket))?;
                Ok(TypeExpr::Array(Box::new(elem)))
            }
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let mut params = Vec::new();
                if !self.at(TokenKind::Punct(Punct::RParen)) {
                    loop {
                        let passing = if self.eat(TokenKind::Keyword(Keyword::Inout)) {
                            Passing::Inout
                        } else {
                            Passing::ByValue
                        };
                        params.push((passing, self.type_expr()?));
                        if !self.eat(TokenKind::Punct(Punct::Comma)) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::Punct(Punct::RParen))?;
                self.expect(TokenKind::Arrow)?;
                let codomain = self.type_expr()?;
                Ok(TypeExpr::Func(params, Box::new(codomain)))
            }
            _ => Err(self.unexpected(&[
                TokenKind::Ident,
                TokenKind::Punct(Punct::LBracket),
                TokenKind::Punct(Punct::LParen),
            ])),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek_kind() {
            TokenKind::Keyword(Keyword::Var) | TokenKind::Keyword(Keyword::Let) => self.binding(),
            TokenKind::Keyword(Keyword::If) => self.conditional(),
            _ => {
                let lhs = self.binary(0)?;
                if !self.at(TokenKind::Punct(Punct::Eq)) {
                    return Ok(lhs);
                }
                let target = match lhs.kind {
                    ExprKind::Path(p) if p.root == "_" && p.accessors.is_empty() => None,
                    ExprKind::Path(p) => Some(p),
                    _ => {
                        return Err(SyntaxError::new(
                            self.peek().span,
                            "left-hand side of `=` must be a path or `_`".to_string(),
                        ))
                    }
                };
                self.bump();
                let value = self.expr()?;
                self.expect(TokenKind::Keyword(Keyword::In))?;
                let body = self.expr()?;
                let span = lhs.span.to(body.span);
                Ok(Expr::new(
                    ExprKind::Assign {
                        target,
                        value: Box::new(value),
                        body: Box::new(body),
                    },
                    span,
                ))
            }
        }
    }

    fn binding(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.bump();
        let qualifier = if start.kind == TokenKind::Keyword(Keyword::Var) {
            Qualifier::Var
        } else {
            Qualifier::Let
        };
        let name = match self.peek_kind() {
            TokenKind::Underscore => {
                self.bump();
                None
            }
            TokenKind::Ident => Some(self.bump().lexeme.clone()),
            _ => return Err(self.unexpected(&[TokenKind::Ident, TokenKind::Underscore])),
        };
        let annotation = if self.eat(TokenKind::Punct(Punct::Colon)) {
            Some(self.type_expr()?)
        } else {
            None
        };

        let init = match (&annotation, self.peek_kind()) {
            // `var f: () -> T { body }` is sugar for binding a parameterless literal.
            (Some(TypeExpr::Func(params, codomain)), TokenKind::Punct(Punct::LBrace)) => {
                if !params.is_empty() {
                    return Err(SyntaxError::new(
                        self.peek().span,
                        "function body shorthand requires a parameterless function type"
                            .to_string(),
                    ));
                }
                let lbrace = self.bump().span;
                let body = self.expr()?;
                let end = self.expect(TokenKind::Punct(Punct::RBrace))?.span;
                Expr::new(
                    ExprKind::Func(FuncLit {
                        params: Vec::new(),
                        codomain: (**codomain).clone(),
                        body: Box::new(body),
                    }),
                    lbrace.to(end),
                )
            }
            _ => {
                self.expect(TokenKind::Punct(Punct::Eq))?;
                self.expr()?
            }
        };
        self.expect(TokenKind::Keyword(Keyword::In))?;
        let body = self.expr()?;
        let span = start.span.to(body.span);
        Ok(Expr::new(
            ExprKind::Binding {
                qualifier,
                name,
                annotation,
                init: Box::new(init),
                body: Box::new(body),
            },
            span,
        ))
    }

    fn conditional(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.bump().span;
        let cond = self.expr()?;
        self.expect(TokenKind::Keyword(Keyword::Then))?;
        let then = self.expr()?;
        self.expect(TokenKind::Keyword(Keyword::Else))?;
        let els = self.expr()?;
        let span = start.to(els.span);
        Ok(Expr::new(
            ExprKind::Cond {
                cond: Box::new(cond),
                then: Box::new(then),
                els: Box::new(els),
            },
            span,
        ))
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.postfix()?;
        while let TokenKind::Operator(op) = self.peek_kind() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut expr = self.primary()?;
        while self.at(TokenKind::Punct(Punct::LParen)) {
            self.bump();
            let mut args = Vec::new();
            if !self.at(TokenKind::Punct(Punct::RParen)) {
                loop {
                    if self.eat(TokenKind::Amp) {
                        let root = self.peek();
                        if root.kind != TokenKind::Ident {
                            return Err(self.unexpected(&[TokenKind::Ident]));
                        }
                        self.bump();
                        args.push(Arg::Inout(self.path_from(root)?));
                    } else {
                        args.push(Arg::Value(self.expr()?));
                    }
                    if !self.eat(TokenKind::Punct(Punct::Comma)) {
                        break;
                    }
                }
            }
            let end = self.expect(TokenKind::Punct(Punct::RParen))?.span;
            let span = expr.span.to(end);
            expr = Expr::new(
                ExprKind::Call {
                    callee: Box::new(expr),
                    args,
                },
                span,
            );
        }
        Ok(expr)
    }

    fn path_from(&mut self, root: &Token) -> Result<Path, SyntaxError> {
        let mut accessors = Vec::new();
        let mut span = root.span;
        loop {
            if self.eat(TokenKind::Punct(Punct::Dot)) {
                let field = self.ident()?;
                span = span.to(field.span);
                accessors.push(Accessor::Field(field.lexeme.clone()));
            } else if self.eat(TokenKind::Punct(Punct::LBracket)) {
                let index = self.expr()?;
                let end = self.expect(TokenKind::Punct(Punct::RBracket))?.span;
                span = span.to(end);
                accessors.push(Accessor::Index(index));
            } else {
                break;
            }
        }
        let root = if root.kind == TokenKind::Underscore {
            "_".to_string()
        } else {
            root.lexeme.clone()
        };
        Ok(Path {
            root,
            accessors,
            span,
        })
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let tok = self.peek();
        match tok.kind {
            TokenKind::IntLit | TokenKind::FloatLit => {
                self.bump();
                literal(tok, false, tok.span)
            }
            TokenKind::Operator(BinOp::Sub)
                if matches!(self.peek_nth(1), TokenKind::IntLit | TokenKind::FloatLit) =>
            {
                self.bump();
                let lit = self.bump();
                literal(lit, true, tok.span.to(lit.span))
            }
            TokenKind::Punct(Punct::LBracket) => {
                self.bump();
                let mut elems = Vec::new();
                if !self.at(TokenKind::Punct(Punct::RBracket)) {
                    loop {
                        elems.push(self.expr()?);
                        if !self.eat(TokenKind::Punct(Punct::Comma)) {
                            break;
                        }
                    }
                }
                let end = self.expect(TokenKind::Punct(Punct::RBracket))?.span;
                Ok(Expr::new(ExprKind::Array(elems), tok.span.to(end)))
            }
            TokenKind::Ident
                if self.struct_names.contains(&tok.lexeme)
                    && self.peek_nth(1) == TokenKind::Punct(Punct::LParen) =>
            {
                self.bump();
                self.bump();
                let mut args = Vec::new();
                if !self.at(TokenKind::Punct(Punct::RParen)) {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat(TokenKind::Punct(Punct::Comma)) {
                            break;
                        }
                    }
                }
                let end = self.expect(TokenKind::Punct(Punct::RParen))?.span;
                Ok(Expr::new(
                    ExprKind::StructInit {
                        name: tok.lexeme.clone(),
                        args,
                    },
                    tok.span.to(end),
                ))
            }
            TokenKind::Ident | TokenKind::Underscore => {
                self.bump();
                let path = self.path_from(tok)?;
                let span = path.span;
                Ok(Expr::new(ExprKind::Path(path), span))
            }
            TokenKind::Punct(Punct::LParen) => {
                let is_func = match self.peek_nth(1) {
                    TokenKind::Punct(Punct::RParen) => true,
                    TokenKind::Ident => self.peek_nth(2) == TokenKind::Punct(Punct::Colon),
                    _ => false,
                };
                if is_func {
                    self.func_lit()
                } else {
                    self.bump();
                    let inner = self.expr()?;
                    self.expect(TokenKind::Punct(Punct::RParen))?;
                    Ok(inner)
                }
            }
            _ => Err(self.unexpected(&[
                TokenKind::IntLit,
                TokenKind::FloatLit,
                TokenKind::Ident,
                TokenKind::Punct(Punct::LBracket),
                TokenKind::Punct(Punct::LParen),
            ])),
        }
    }

    fn func_lit(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.expect(TokenKind::Punct(Punct::LParen))?.span;
        let mut params = Vec::new();
        if !self.at(TokenKind::Punct(Punct::RParen)) {
            loop {
                let name = self.ident()?.lexeme.clone();
                self.expect(TokenKind::Punct(Punct::Colon))?;
                let passing = if self.eat(TokenKind::Keyword(Keyword::Inout)) {
                    Passing::Inout
                } else {
                    Passing::ByValue
                };
                let ty = self.type_expr()?;
                params.push(Param { name, passing, ty });
                if !self.eat(TokenKind::Punct(Punct::Comma)) {
                    break;
                }
            }
        }
        self.expect(TokenKind::Punct(Punct::RParen))?;
        self.expect(TokenKind::Arrow)?;
        let codomain = self.type_expr()?;
        self.expect(TokenKind::Punct(Punct::LBrace))?;
        let body = self.expr()?;
        let end = self.expect(TokenKind::Punct(Punct::RBrace))?.span;
        Ok(Expr::new(
            ExprKind::Func(FuncLit {
                params,
                codomain,
                body: Box::new(body),
            }),
            start.to(end),
        ))
    }
}

fn literal(tok: &Token, negative: bool, span: Span) -> Result<Expr, SyntaxError> {
    let kind = if tok.kind == TokenKind::IntLit {
        let magnitude: u64 = tok
            .lexeme
            .parse()
            .map_err(|_| SyntaxError::new(span, "integer literal out of range".to_string()))?;
        let value = if negative {
            0i64.checked_sub_unsigned(magnitude)
        } else {
            i64::try_from(magnitude).ok()
        };
        ExprKind::Int(
            value.ok_or_else(|| SyntaxError::new(span, "integer literal out of range".to_string()))?,
        )
    } else {
        let v: f64 = tok
            .lexeme
            .parse()
            .map_err(|_| SyntaxError::new(span, "malformed float literal".to_string()))?;
        ExprKind::Float(if negative { -v } else { v })
    };
    Ok(Expr::new(kind, span))
}
