//! Lexer and recursive-descent parser for the text grammar:
//! signatures/theories (`type X; const c : Z; rel R : (Y1,Y2); axiom phi;`
//! with a `%mode` pragma) and terms with ASCII aliases
//! (`forall`, `exists`, `/\`, `\/`, `->`, `~`, `<u,v>`, `fst`, `snd`,
//! `\y:Y. t`, `{x:Y | phi}`, `in`).

use std::collections::BTreeMap;

use super::term::Term;
use super::types::{Context, Mode, Signature, Theory, TypeExpr, Var};
use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Sym(&'static str),
    Str(String),
}

#[derive(Debug, Clone)]
pub struct SpannedTok {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(input: &str) -> Result<Vec<SpannedTok>, SyntaxError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let err = |line, col, msg: String| SyntaxError::Parse { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| {
            toks.push(SpannedTok {
                tok,
                line: tl,
                col: tc,
            })
        };
        let next = |k: usize| chars.get(i + k).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                // comment to end of line
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\n') | None => {
                            return Err(err(tl, tc, "unterminated string".into()));
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                push(Tok::Str(s));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    s.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                push(Tok::Ident(s));
            }
            c if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    n = n * 10 + chars[i].to_digit(10).unwrap() as u64;
                    i += 1;
                    col += 1;
                }
                push(Tok::Nat(n));
            }
            '-' if next(1) == Some('>') => {
                push(Tok::Sym("->"));
                i += 2;
                col += 2;
            }
            '-' => {
                push(Tok::Sym("-"));
                i += 1;
                col += 1;
            }
            '/' if next(1) == Some('\\') => {
                push(Tok::Sym("/\\"));
                i += 2;
                col += 2;
            }
            '\\' if next(1) == Some('/') => {
                push(Tok::Sym("\\/"));
                i += 2;
                col += 2;
            }
            '\\' => {
                push(Tok::Sym("\\"));
                i += 1;
                col += 1;
            }
            '|' if next(1) == Some('-') && next(2) == Some('>') => {
                push(Tok::Sym("|->"));
                i += 3;
                col += 3;
            }
            '(' | ')' | '{' | '}' | '<' | '>' | ',' | '.' | ';' | ':' | '|' | '^' | '*' | '='
            | '~' | '%' => {
                let s: &'static str = match c {
                    '(' => "(",
                    ')' => ")",
                    '{' => "{",
                    '}' => "}",
                    '<' => "<",
                    '>' => ">",
                    ',' => ",",
                    '.' => ".",
                    ';' => ";",
                    ':' => ":",
                    '|' => "|",
                    '^' => "^",
                    '*' => "*",
                    '=' => "=",
                    '~' => "~",
                    _ => "%",
                };
                push(Tok::Sym(s));
                i += 1;
                col += 1;
            }
            _ => {
                return Err(err(line, col, format!("unexpected character `{}`", c)));
            }
        }
    }
    Ok(toks)
}

pub struct Parser<'a> {
    toks: Vec<SpannedTok>,
    pos: usize,
    sig: &'a Signature,
    /// Free variables known from the ambient context.
    free: BTreeMap<String, TypeExpr>,
    /// Binder scope stack.
    scope: Vec<Var>,
}

impl<'a> Parser<'a> {
    pub fn new(input: &str, sig: &'a Signature, ctx: &Context) -> Result<Parser<'a>, SyntaxError> {
        let toks = lex(input)?;
        let free = ctx
            .vars()
            .iter()
            .map(|v| (v.name.clone(), v.ty.clone()))
            .collect();
        Ok(Parser {
            toks,
            pos: 0,
            sig,
            free,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> Result<(), SyntaxError> {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", s)))
        }
    }

    fn eat_ident(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> Result<String, SyntaxError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(self.error("expected identifier")),
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    // ---- types ----

    pub fn parse_type(&mut self) -> Result<TypeExpr, SyntaxError> {
        let mut acc = self.parse_type_exp()?;
        while self.eat_sym("*") {
            let rhs = self.parse_type_exp()?;
            acc = TypeExpr::prod(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_type_exp(&mut self) -> Result<TypeExpr, SyntaxError> {
        let mut acc = self.parse_type_atom()?;
        while self.eat_sym("^") {
            let arg = self.parse_type_atom()?;
            acc = TypeExpr::exp(acc, arg);
        }
        Ok(acc)
    }

    fn parse_type_atom(&mut self) -> Result<TypeExpr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Nat(2)) => {
                self.pos += 1;
                Ok(TypeExpr::Two)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(TypeExpr::Basic(name))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.parse_type()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => Err(self.error("expected a type")),
        }
    }

    // ---- terms ----

    pub fn parse_term(&mut self) -> Result<Term, SyntaxError> {
        self.parse_binder_or_implies()
    }

    fn parse_binder_or_implies(&mut self) -> Result<Term, SyntaxError> {
        if let Some(t) = self.try_parse_binder()? {
            return Ok(t);
        }
        self.parse_implies()
    }

    fn try_parse_binder(&mut self) -> Result<Option<Term>, SyntaxError> {
        let make: Option<fn(Var, Term) -> Term> = if self.eat_ident("forall") {
            Some(Term::forall)
        } else if self.eat_ident("exists") {
            Some(Term::exists)
        } else if matches!(self.peek(), Some(Tok::Sym("\\"))) {
            self.pos += 1;
            Some(Term::lam)
        } else {
            None
        };
        let Some(make) = make else {
            return Ok(None);
        };
        let name = self.expect_ident()?;
        self.expect_sym(":")?;
        let ty = self.parse_type()?;
        self.expect_sym(".")?;
        let v = Var::new(&name, ty);
        self.scope.push(v.clone());
        let body = self.parse_term();
        self.scope.pop();
        Ok(Some(make(v, body?)))
    }

    fn parse_implies(&mut self) -> Result<Term, SyntaxError> {
        let lhs = self.parse_or()?;
        if self.eat_sym("->") {
            let rhs = self.parse_binder_or_implies()?;
            Ok(Term::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.parse_and()?;
        while self.eat_sym("\\/") {
            let rhs = if let Some(b) = self.try_parse_binder()? {
                b
            } else {
                self.parse_and()?
            };
            acc = Term::or(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_and(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.parse_unary()?;
        while self.eat_sym("/\\") {
            let rhs = if let Some(b) = self.try_parse_binder()? {
                b
            } else {
                self.parse_unary()?
            };
            acc = Term::and(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_unary(&mut self) -> Result<Term, SyntaxError> {
        if self.eat_sym("~") {
            let t = self.parse_unary()?;
            return Ok(Term::not(t));
        }
        if let Some(b) = self.try_parse_binder()? {
            return Ok(b);
        }
        self.parse_cmp()
    }

    fn parse_cmp(&mut self) -> Result<Term, SyntaxError> {
        let lhs = self.parse_proj()?;
        if self.eat_sym("=") {
            let rhs = self.parse_proj()?;
            Ok(Term::eq(lhs, rhs))
        } else if self.eat_ident("in") {
            let rhs = self.parse_proj()?;
            // `t in alpha` is membership sugar for application alpha(t).
            Ok(Term::app(rhs, lhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_proj(&mut self) -> Result<Term, SyntaxError> {
        if self.eat_ident("fst") {
            let t = self.parse_proj()?;
            return Ok(Term::proj1(t));
        }
        if self.eat_ident("snd") {
            let t = self.parse_proj()?;
            return Ok(Term::proj2(t));
        }
        self.parse_app()
    }

    fn parse_app(&mut self) -> Result<Term, SyntaxError> {
        let head_is_rel = match self.peek() {
            Some(Tok::Ident(name)) => self.sig.relations.contains_key(name),
            _ => false,
        };
        if head_is_rel {
            let name = self.expect_ident()?;
            self.expect_sym("(")?;
            let mut args = Vec::new();
            if !matches!(self.peek(), Some(Tok::Sym(")"))) {
                loop {
                    args.push(self.parse_term()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
            return Ok(Term::RelApp(name, args));
        }
        let mut acc = self.parse_atom()?;
        while matches!(self.peek(), Some(Tok::Sym("("))) {
            self.pos += 1;
            let arg = self.parse_term()?;
            self.expect_sym(")")?;
            acc = Term::app(acc, arg);
        }
        Ok(acc)
    }

    fn resolve_ident(&mut self, name: String) -> Result<Term, SyntaxError> {
        if let Some(v) = self.scope.iter().rev().find(|v| v.name == name) {
            return Ok(Term::Var(v.clone()));
        }
        if let Some(ty) = self.free.get(&name) {
            return Ok(Term::Var(Var::new(&name, ty.clone())));
        }
        if self.sig.constants.contains_key(&name) {
            return Ok(Term::Const(name));
        }
        Err(self.error(format!("unknown identifier `{}`", name)))
    }

    fn parse_atom(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if name == "true" => {
                self.pos += 1;
                Ok(Term::Top)
            }
            Some(Tok::Ident(name)) if name == "false" => {
                self.pos += 1;
                Ok(Term::Bot)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.resolve_ident(name)
            }
            Some(Tok::Sym("<")) => {
                self.pos += 1;
                let a = self.parse_term()?;
                self.expect_sym(",")?;
                let b = self.parse_term()?;
                self.expect_sym(">")?;
                Ok(Term::pair(a, b))
            }
            Some(Tok::Sym("{")) => {
                // comprehension {x:Y | phi} desugars to \x:Y. phi
                self.pos += 1;
                let name = self.expect_ident()?;
                self.expect_sym(":")?;
                let ty = self.parse_type()?;
                self.expect_sym("|")?;
                let v = Var::new(&name, ty);
                self.scope.push(v.clone());
                let body = self.parse_term();
                self.scope.pop();
                let body = body?;
                self.expect_sym("}")?;
                Ok(Term::lam(v, body))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                // Either a parenthesized term or an annotated free variable
                // `(x : T)`.
                let save = self.pos;
                if let Some(Tok::Ident(name)) = self.peek().cloned() {
                    self.pos += 1;
                    if self.eat_sym(":")
                        && !self.scope.iter().any(|v| v.name == name)
                        && !self.sig.constants.contains_key(&name)
                    {
                        let ty = self.parse_type()?;
                        self.expect_sym(")")?;
                        self.free.insert(name.clone(), ty.clone());
                        return Ok(Term::Var(Var::new(&name, ty)));
                    }
                    self.pos = save;
                }
                let t = self.parse_term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

/// Parses a standalone term over `sig`, with free variables drawn from `ctx`.
pub fn parse_term(input: &str, sig: &Signature, ctx: &Context) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(input, sig, ctx)?;
    let t = p.parse_term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses a type expression.
pub fn parse_type(input: &str) -> Result<TypeExpr, SyntaxError> {
    let sig = Signature::new(Mode::HolIntuitionistic);
    let mut p = Parser::new(input, &sig, &Context::empty())?;
    let t = p.parse_type()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses a theory file: a `%mode` pragma followed by `type`, `const`,
/// `rel` and `axiom` declarations, each terminated by `;`.
pub fn parse_theory(input: &str) -> Result<Theory, SyntaxError> {
    let toks = lex(input)?;
    // First pass: find the mode pragma (must come first if present).
    let mut mode = Mode::HolIntuitionistic;
    let mut pos = 0;
    if matches!(toks.first().map(|t| &t.tok), Some(Tok::Sym("%"))) {
        if !matches!(toks.get(1).map(|t| &t.tok), Some(Tok::Ident(s)) if s == "mode") {
            return Err(SyntaxError::Parse {
                line: toks[0].line,
                col: toks[0].col,
                msg: "expected `%mode`".into(),
            });
        }
        let mut words = Vec::new();
        pos = 2;
        loop {
            match toks.get(pos).map(|t| t.tok.clone()) {
                Some(Tok::Ident(s)) => {
                    words.push(s);
                    pos += 1;
                    if matches!(toks.get(pos).map(|t| &t.tok), Some(Tok::Sym("-"))) {
                        pos += 1;
                        continue;
                    }
                    break;
                }
                _ => break,
            }
        }
        let joined = words.join("-");
        mode = Mode::parse(&joined).ok_or_else(|| SyntaxError::Parse {
            line: toks[0].line,
            col: toks[0].col,
            msg: format!("unknown mode `{}`", joined),
        })?;
    }

    let mut theory = Theory::new(Signature::new(mode));
    let mut idx = pos;
    while idx < toks.len() {
        let SpannedTok { tok, line, col } = toks[idx].clone();
        let perr = |msg: String| SyntaxError::Parse { line, col, msg };
        let Tok::Ident(kw) = tok else {
            return Err(perr("expected a declaration".into()));
        };
        // Collect tokens of this declaration up to `;`, tracked by index so
        // nested `;` cannot occur in the grammar.
        let start = idx + 1;
        let mut end = start;
        while end < toks.len() && toks[end].tok != Tok::Sym(";") {
            end += 1;
        }
        if end == toks.len() {
            return Err(perr(format!("`{}` declaration missing `;`", kw)));
        }
        let slice = &toks[start..end];
        let mut p = Parser {
            toks: slice.to_vec(),
            pos: 0,
            sig: &theory.signature,
            free: BTreeMap::new(),
            scope: Vec::new(),
        };
        match kw.as_str() {
            "type" => {
                let name = p.expect_ident()?;
                p.expect_end()?;
                drop(p);
                theory.signature.add_basic_type(&name)?;
            }
            "const" => {
                let name = p.expect_ident()?;
                p.expect_sym(":")?;
                let ty = p.parse_type()?;
                p.expect_end()?;
                drop(p);
                theory.signature.add_constant(&name, ty)?;
            }
            "rel" => {
                let name = p.expect_ident()?;
                p.expect_sym(":")?;
                p.expect_sym("(")?;
                let mut args = Vec::new();
                if !matches!(p.peek(), Some(Tok::Sym(")"))) {
                    loop {
                        args.push(p.parse_type()?);
                        if !p.eat_sym(",") {
                            break;
                        }
                    }
                }
                p.expect_sym(")")?;
                p.expect_end()?;
                drop(p);
                theory.signature.add_relation(&name, args)?;
            }
            "axiom" => {
                let phi = p.parse_term()?;
                p.expect_end()?;
                drop(p);
                theory.add_axiom(phi)?;
            }
            _ => {
                return Err(perr(format!("unknown declaration `{}`", kw)));
            }
        }
        idx = end + 1;
    }
    Ok(theory)
}
