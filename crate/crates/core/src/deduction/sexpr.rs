//! S-expression serialization of proof trees:
//! `(rule <id> :data (...) :premises (...))`, with an optional `%theory`
//! header line naming the theory file.

use crate::error::{DeductionError, SyntaxError};
use crate::syntax::{parse_term, parse_type, print_term, Context, Term, Theory, Var};

use super::{ProofTree, RuleData, RuleId};

#[derive(Debug, Clone, PartialEq)]
enum SExpr {
    Atom(String),
    Str(String),
    List(Vec<SExpr>),
}

fn perr(msg: &str) -> DeductionError {
    DeductionError::Syntax(SyntaxError::Parse {
        line: 0,
        col: 0,
        msg: msg.to_string(),
    })
}

fn lex_sexpr(input: &str) -> Result<Vec<String>, DeductionError> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                toks.push(c.to_string());
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => return Err(perr("unterminated string")),
                    }
                }
                toks.push(s);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                toks.push(s);
            }
        }
    }
    Ok(toks)
}

fn parse_sexpr(toks: &[String], pos: &mut usize) -> Result<SExpr, DeductionError> {
    let tok = toks.get(*pos).ok_or_else(|| perr("unexpected end of input"))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(SExpr::List(items));
                    }
                    Some(_) => items.push(parse_sexpr(toks, pos)?),
                    None => return Err(perr("missing `)`")),
                }
            }
        }
        ")" => Err(perr("unexpected `)`")),
        s if s.starts_with('"') => Ok(SExpr::Str(s[1..].to_string())),
        s => Ok(SExpr::Atom(s.to_string())),
    }
}

/// Extracts the `%theory <path>` header, if present.
pub fn proof_theory_ref(input: &str) -> Option<String> {
    for line in input.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("%theory") {
            return Some(rest.trim().to_string());
        }
    }
    None
}

/// Parses a proof file body (headers stripped) against a theory.
pub fn parse_proof(input: &str, thy: &Theory) -> Result<ProofTree, DeductionError> {
    let body: String = input
        .lines()
        .filter(|l| !l.trim_start().starts_with('%') && !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let toks = lex_sexpr(&body)?;
    let mut pos = 0;
    let sx = parse_sexpr(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(perr("trailing input after proof"));
    }
    sexpr_to_tree(&sx, thy)
}

fn sexpr_to_tree(sx: &SExpr, thy: &Theory) -> Result<ProofTree, DeductionError> {
    let SExpr::List(items) = sx else {
        return Err(perr("expected a `(rule ...)` form"));
    };
    match items.first() {
        Some(SExpr::Atom(a)) if a == "rule" => {}
        _ => return Err(perr("expected a `(rule ...)` form")),
    }
    let Some(SExpr::Atom(name)) = items.get(1) else {
        return Err(perr("missing rule name"));
    };
    let rule = RuleId::from_name(name).ok_or_else(|| perr(&format!("unknown rule `{}`", name)))?;
    let mut data_sx: Option<&SExpr> = None;
    let mut prem_sx: Option<&SExpr> = None;
    let mut i = 2;
    while i + 1 < items.len() + 1 {
        match items.get(i) {
            Some(SExpr::Atom(k)) if k == ":data" => {
                data_sx = Some(items.get(i + 1).ok_or_else(|| perr("missing :data value"))?);
                i += 2;
            }
            Some(SExpr::Atom(k)) if k == ":premises" => {
                prem_sx = Some(items.get(i + 1).ok_or_else(|| perr("missing :premises value"))?);
                i += 2;
            }
            Some(_) => return Err(perr("expected :data or :premises")),
            None => break,
        }
    }
    let premises = match prem_sx {
        Some(SExpr::List(ps)) => ps
            .iter()
            .map(|p| sexpr_to_tree(p, thy))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(perr(":premises must be a list")),
        None => Vec::new(),
    };
    let data = parse_data(rule, data_sx, thy)?;
    Ok(ProofTree::node(rule, data, premises))
}

struct DataFields<'a> {
    ctx: Option<Context>,
    var: Option<Var>,
    formula: Option<&'a str>,
    term: Option<&'a str>,
    term2: Option<&'a str>,
    index: Option<usize>,
}

fn read_fields<'a>(sx: Option<&'a SExpr>) -> Result<DataFields<'a>, DeductionError> {
    let mut out = DataFields {
        ctx: None,
        var: None,
        formula: None,
        term: None,
        term2: None,
        index: None,
    };
    let Some(SExpr::List(items)) = sx else {
        return Ok(out);
    };
    for item in items {
        let SExpr::List(parts) = item else {
            return Err(perr("data entries must be lists"));
        };
        let Some(SExpr::Atom(key)) = parts.first() else {
            return Err(perr("data entry missing key"));
        };
        match key.as_str() {
            "ctx" => {
                let mut vars = Vec::new();
                for entry in &parts[1..] {
                    let SExpr::List(pair) = entry else {
                        return Err(perr("ctx entries must be `(name \"Type\")`"));
                    };
                    let (Some(SExpr::Atom(n)), Some(SExpr::Str(t))) = (pair.first(), pair.get(1))
                    else {
                        return Err(perr("ctx entries must be `(name \"Type\")`"));
                    };
                    vars.push(Var::new(n, parse_type(t).map_err(DeductionError::Syntax)?));
                }
                out.ctx = Some(Context::new(vars).map_err(DeductionError::Syntax)?);
            }
            "var" => {
                let (Some(SExpr::Atom(n)), Some(SExpr::Str(t))) = (parts.get(1), parts.get(2))
                else {
                    return Err(perr("var must be `(var name \"Type\")`"));
                };
                out.var = Some(Var::new(n, parse_type(t).map_err(DeductionError::Syntax)?));
            }
            "formula" => {
                let Some(SExpr::Str(s)) = parts.get(1) else {
                    return Err(perr("formula must be a string"));
                };
                out.formula = Some(s);
            }
            "term" => {
                let Some(SExpr::Str(s)) = parts.get(1) else {
                    return Err(perr("term must be a string"));
                };
                out.term = Some(s);
            }
            "term2" => {
                let Some(SExpr::Str(s)) = parts.get(1) else {
                    return Err(perr("term2 must be a string"));
                };
                out.term2 = Some(s);
            }
            "index" => {
                let Some(SExpr::Atom(s)) = parts.get(1) else {
                    return Err(perr("index must be a number"));
                };
                out.index = Some(s.parse().map_err(|_| perr("index must be a number"))?);
            }
            other => return Err(perr(&format!("unknown data key `{}`", other))),
        }
    }
    Ok(out)
}

fn parse_data(
    rule: RuleId,
    sx: Option<&SExpr>,
    thy: &Theory,
) -> Result<RuleData, DeductionError> {
    let sig = &thy.signature;
    let f = read_fields(sx)?;
    let need_ctx = || f.ctx.clone().ok_or_else(|| perr("rule data needs a ctx"));
    let need_var = || f.var.clone().ok_or_else(|| perr("rule data needs a var"));
    let parse_in = |s: &str, ctx: &Context| -> Result<Term, DeductionError> {
        parse_term(s, sig, ctx).map_err(DeductionError::Syntax)
    };
    Ok(match rule {
        RuleId::R1a | RuleId::R5a | RuleId::R5b => {
            let ctx = need_ctx()?;
            let phi = parse_in(f.formula.ok_or_else(|| perr("missing formula"))?, &ctx)?;
            RuleData::CtxFormula { ctx, phi }
        }
        RuleId::R2a | RuleId::R3a => {
            let ctx = need_ctx()?;
            let term = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            RuleData::CtxTerm { ctx, term }
        }
        RuleId::R1c => {
            let ctx = need_ctx()?;
            let var = need_var()?;
            let term = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            RuleData::Subst { ctx, var, term }
        }
        RuleId::R2b => {
            let ctx = need_ctx()?;
            let var = need_var()?;
            let inner = ctx.extend(var.clone()).map_err(DeductionError::Syntax)?;
            let phi = parse_in(f.formula.ok_or_else(|| perr("missing formula"))?, &inner)?;
            let lhs = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            let rhs = parse_in(f.term2.ok_or_else(|| perr("missing term2"))?, &ctx)?;
            RuleData::EqSubst { ctx, var, phi, lhs, rhs }
        }
        RuleId::R2d => {
            let ctx = need_ctx()?;
            let var = need_var()?;
            let alpha = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            let beta = parse_in(f.term2.ok_or_else(|| perr("missing term2"))?, &ctx)?;
            RuleData::FunExt { ctx, var, alpha, beta }
        }
        RuleId::R3b => {
            let ctx = need_ctx()?;
            let index = f.index.ok_or_else(|| perr("missing index"))?;
            let fst = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            let snd = parse_in(f.term2.ok_or_else(|| perr("missing term2"))?, &ctx)?;
            RuleData::ProjBeta { ctx, index, fst, snd }
        }
        RuleId::R4a => {
            let ctx = need_ctx()?;
            let var = need_var()?;
            let body = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            RuleData::Beta { ctx, var, body }
        }
        RuleId::R4b => {
            let ctx = need_ctx()?;
            let var = need_var()?;
            let alpha = parse_in(f.term.ok_or_else(|| perr("missing term"))?, &ctx)?;
            RuleData::Eta { ctx, var, alpha }
        }
        RuleId::R5dBwd | RuleId::R5eFwd => {
            RuleData::Index(f.index.ok_or_else(|| perr("missing index"))?)
        }
        RuleId::Axiom => RuleData::AxiomIndex(f.index.ok_or_else(|| perr("missing index"))?),
        _ => RuleData::None,
    })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s)
}

fn ctx_sx(ctx: &Context) -> String {
    let entries: Vec<String> = ctx
        .vars()
        .iter()
        .map(|v| format!("({} {})", v.name, quote(&v.ty.to_string())))
        .collect();
    format!("(ctx {})", entries.join(" "))
}

fn var_sx(v: &Var) -> String {
    format!("(var {} {})", v.name, quote(&v.ty.to_string()))
}

fn data_sx(data: &RuleData) -> String {
    match data {
        RuleData::None => "()".into(),
        RuleData::Index(i) | RuleData::AxiomIndex(i) => format!("((index {}))", i),
        RuleData::CtxFormula { ctx, phi } => {
            format!("({} (formula {}))", ctx_sx(ctx), quote(&print_term(phi)))
        }
        RuleData::CtxTerm { ctx, term } => {
            format!("({} (term {}))", ctx_sx(ctx), quote(&print_term(term)))
        }
        RuleData::Subst { ctx, var, term } => format!(
            "({} {} (term {}))",
            ctx_sx(ctx),
            var_sx(var),
            quote(&print_term(term))
        ),
        RuleData::EqSubst { ctx, var, phi, lhs, rhs } => format!(
            "({} {} (formula {}) (term {}) (term2 {}))",
            ctx_sx(ctx),
            var_sx(var),
            quote(&print_term(phi)),
            quote(&print_term(lhs)),
            quote(&print_term(rhs))
        ),
        RuleData::FunExt { ctx, var, alpha, beta } => format!(
            "({} {} (term {}) (term2 {}))",
            ctx_sx(ctx),
            var_sx(var),
            quote(&print_term(alpha)),
            quote(&print_term(beta))
        ),
        RuleData::ProjBeta { ctx, index, fst, snd } => format!(
            "({} (index {}) (term {}) (term2 {}))",
            ctx_sx(ctx),
            index,
            quote(&print_term(fst)),
            quote(&print_term(snd))
        ),
        RuleData::Beta { ctx, var, body } => format!(
            "({} {} (term {}))",
            ctx_sx(ctx),
            var_sx(var),
            quote(&print_term(body))
        ),
        RuleData::Eta { ctx, var, alpha } => format!(
            "({} {} (term {}))",
            ctx_sx(ctx),
            var_sx(var),
            quote(&print_term(alpha))
        ),
    }
}

/// Renders a proof tree in the s-expression format.
pub fn print_proof(tree: &ProofTree) -> String {
    fn go(t: &ProofTree, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        out.push_str(&format!(
            "{}(rule {} :data {} :premises (",
            pad,
            t.rule.name(),
            data_sx(&t.data)
        ));
        if t.premises.is_empty() {
            out.push_str("))");
        } else {
            for p in &t.premises {
                out.push('\n');
                go(p, indent + 1, out);
            }
            out.push_str("))");
        }
    }
    let mut out = String::new();
    go(tree, 0, &mut out);
    out.push('\n');
    out
}
