//! Deterministic ASCII printer for terms. Inverse of the parser up to
//! alpha equivalence (comprehensions print as lambdas).

use super::term::Term;

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    go(t, 0, &mut s);
    s
}

// Precedence levels, loosest first:
// 0 binders, 1 ->, 2 \/, 3 /\, 4 ~, 5 = and in, 6 fst/snd, 7 app, 8 atom.
fn go(t: &Term, level: u8, out: &mut String) {
    let prec = prec_of(t);
    let need_parens = prec < level;
    if need_parens {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Const(c) => out.push_str(c),
        Term::Top => out.push_str("true"),
        Term::Bot => out.push_str("false"),
        Term::Pair(a, b) => {
            out.push('<');
            go(a, 0, out);
            out.push_str(", ");
            go(b, 0, out);
            out.push('>');
        }
        Term::Proj1(a) => {
            out.push_str("fst ");
            go(a, 6, out);
        }
        Term::Proj2(a) => {
            out.push_str("snd ");
            go(a, 6, out);
        }
        Term::Lambda(v, body) => {
            out.push('\\');
            out.push_str(&format!("{}:{}", v.name, v.ty));
            out.push_str(". ");
            go(body, 0, out);
        }
        Term::Forall(v, body) => {
            out.push_str(&format!("forall {}:{}. ", v.name, v.ty));
            go(body, 0, out);
        }
        Term::Exists(v, body) => {
            out.push_str(&format!("exists {}:{}. ", v.name, v.ty));
            go(body, 0, out);
        }
        Term::App(f, a) => {
            go(f, 7, out);
            out.push('(');
            go(a, 0, out);
            out.push(')');
        }
        Term::Eq(a, b) => {
            go(a, 6, out);
            out.push_str(" = ");
            go(b, 6, out);
        }
        Term::Not(a) => {
            out.push('~');
            go(a, 4, out);
        }
        Term::And(a, b) => {
            go(a, 4, out);
            out.push_str(" /\\ ");
            go(b, 4, out);
        }
        Term::Or(a, b) => {
            go(a, 3, out);
            out.push_str(" \\/ ");
            go(b, 3, out);
        }
        Term::Implies(a, b) => {
            go(a, 2, out);
            out.push_str(" -> ");
            go(b, 1, out);
        }
        Term::RelApp(r, args) => {
            out.push_str(r);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                go(a, 0, out);
            }
            out.push(')');
        }
    }
    if need_parens {
        out.push(')');
    }
}

fn prec_of(t: &Term) -> u8 {
    match t {
        Term::Lambda(..) | Term::Forall(..) | Term::Exists(..) => 0,
        Term::Implies(..) => 1,
        Term::Or(..) => 2,
        Term::And(..) => 3,
        Term::Not(..) => 4,
        Term::Eq(..) => 5,
        Term::Proj1(..) | Term::Proj2(..) => 6,
        Term::App(..) | Term::RelApp(..) => 7,
        Term::Var(_) | Term::Const(_) | Term::Top | Term::Bot | Term::Pair(..) => 8,
    }
}
