//! Type expressions, signatures and theories of the object language.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::SyntaxError;

/// Which deductive system the signature belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    HolClassical,
    HolIntuitionistic,
    Lambda,
}

impl Mode {
    pub fn is_hol(self) -> bool {
        matches!(self, Mode::HolClassical | Mode::HolIntuitionistic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::HolClassical => "hol-classical",
            Mode::HolIntuitionistic => "hol-intuitionistic",
            Mode::Lambda => "lambda",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "hol-classical" => Some(Mode::HolClassical),
            "hol-intuitionistic" => Some(Mode::HolIntuitionistic),
            "lambda" => Some(Mode::Lambda),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A type expression: basic types, the type of formulas `2`, products and
/// exponentials `Z^Y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Basic(String),
    Two,
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    /// `Exp(result, argument)` is the type `result^argument`.
    Exp(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn basic(name: &str) -> TypeExpr {
        TypeExpr::Basic(name.to_string())
    }

    pub fn prod(l: TypeExpr, r: TypeExpr) -> TypeExpr {
        TypeExpr::Prod(Box::new(l), Box::new(r))
    }

    pub fn exp(result: TypeExpr, arg: TypeExpr) -> TypeExpr {
        TypeExpr::Exp(Box::new(result), Box::new(arg))
    }

    /// Power type `2^Y`.
    pub fn power(arg: TypeExpr) -> TypeExpr {
        TypeExpr::exp(TypeExpr::Two, arg)
    }

    pub fn mentions_two(&self) -> bool {
        match self {
            TypeExpr::Basic(_) => false,
            TypeExpr::Two => true,
            TypeExpr::Prod(l, r) | TypeExpr::Exp(l, r) => l.mentions_two() || r.mentions_two(),
        }
    }

    /// All subtypes, including `self`.
    pub fn subtypes(&self) -> Vec<TypeExpr> {
        let mut out = vec![self.clone()];
        match self {
            TypeExpr::Prod(l, r) | TypeExpr::Exp(l, r) => {
                out.extend(l.subtypes());
                out.extend(r.subtypes());
            }
            _ => {}
        }
        out
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: ^ binds tighter than *.
        fn atom(t: &TypeExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                TypeExpr::Basic(n) => f.write_str(n),
                TypeExpr::Two => f.write_str("2"),
                _ => {
                    f.write_str("(")?;
                    fmt::Display::fmt(t, f)?;
                    f.write_str(")")
                }
            }
        }
        match self {
            TypeExpr::Basic(_) | TypeExpr::Two => atom(self, f),
            TypeExpr::Prod(l, r) => {
                match l.as_ref() {
                    TypeExpr::Prod(..) => atom(l, f)?,
                    TypeExpr::Exp(..) => fmt::Display::fmt(l, f)?,
                    _ => atom(l, f)?,
                }
                f.write_str(" * ")?;
                match r.as_ref() {
                    TypeExpr::Exp(..) => fmt::Display::fmt(r, f)?,
                    _ => atom(r, f)?,
                }
                Ok(())
            }
            TypeExpr::Exp(z, y) => {
                atom(z, f)?;
                f.write_str("^")?;
                atom(y, f)
            }
        }
    }
}

/// A typed variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub ty: TypeExpr,
}

impl Var {
    pub fn new(name: &str, ty: TypeExpr) -> Var {
        Var {
            name: name.to_string(),
            ty,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// An ordered context of distinct typed variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Context {
    vars: Vec<Var>,
}

impl Context {
    pub fn empty() -> Context {
        Context { vars: Vec::new() }
    }

    pub fn new(vars: Vec<Var>) -> Result<Context, SyntaxError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.name.clone()) {
                return Err(SyntaxError::DuplicateName {
                    kind: "context variable".into(),
                    name: v.name.clone(),
                });
            }
        }
        Ok(Context { vars })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<&Var> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.vars.iter().any(|w| w == v)
    }

    /// Context extended on the right by `v`. Errors if the name is taken.
    pub fn extend(&self, v: Var) -> Result<Context, SyntaxError> {
        let mut vars = self.vars.clone();
        vars.push(v);
        Context::new(vars)
    }

    /// Context with the last variable removed, returning it.
    pub fn split_last(&self) -> Option<(Context, Var)> {
        let mut vars = self.vars.clone();
        let last = vars.pop()?;
        Some((Context { vars }, last))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            fmt::Display::fmt(v, f)?;
        }
        Ok(())
    }
}

/// Basic type, constant and relation symbols, plus the logic mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub mode: Mode,
    pub basic_types: Vec<String>,
    pub constants: BTreeMap<String, TypeExpr>,
    /// Relation symbols with argument-type lists. Lambda mode only.
    pub relations: BTreeMap<String, Vec<TypeExpr>>,
}

impl Signature {
    pub fn new(mode: Mode) -> Signature {
        Signature {
            mode,
            basic_types: Vec::new(),
            constants: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn add_basic_type(&mut self, name: &str) -> Result<(), SyntaxError> {
        if self.basic_types.iter().any(|t| t == name) {
            return Err(SyntaxError::DuplicateName {
                kind: "basic type".into(),
                name: name.into(),
            });
        }
        self.basic_types.push(name.to_string());
        Ok(())
    }

    fn check_type_wf(&self, ty: &TypeExpr) -> Result<(), SyntaxError> {
        match ty {
            TypeExpr::Basic(n) => {
                if !self.basic_types.iter().any(|t| t == n) {
                    return Err(SyntaxError::UnknownBasicType { name: n.clone() });
                }
            }
            TypeExpr::Two => {
                if self.mode == Mode::Lambda {
                    return Err(SyntaxError::ModeViolation {
                        what: "type 2 is not available in lambda mode".into(),
                    });
                }
            }
            TypeExpr::Prod(l, r) | TypeExpr::Exp(l, r) => {
                self.check_type_wf(l)?;
                self.check_type_wf(r)?;
            }
        }
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, ty: TypeExpr) -> Result<(), SyntaxError> {
        self.check_type_wf(&ty)?;
        if self.constants.contains_key(name) {
            return Err(SyntaxError::DuplicateName {
                kind: "constant".into(),
                name: name.into(),
            });
        }
        self.constants.insert(name.to_string(), ty);
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, args: Vec<TypeExpr>) -> Result<(), SyntaxError> {
        if self.mode != Mode::Lambda {
            return Err(SyntaxError::ModeViolation {
                what: "relation symbols are only available in lambda mode".into(),
            });
        }
        for a in &args {
            self.check_type_wf(a)?;
        }
        if self.relations.contains_key(name) {
            return Err(SyntaxError::DuplicateName {
                kind: "relation".into(),
                name: name.into(),
            });
        }
        self.relations.insert(name.to_string(), args);
        Ok(())
    }
}

/// A signature together with a finite list of closed axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<crate::syntax::Term>,
}

impl Theory {
    pub fn new(signature: Signature) -> Theory {
        Theory {
            signature,
            axioms: Vec::new(),
        }
    }

    /// Adds an axiom after checking that it is a closed well-typed formula.
    pub fn add_axiom(&mut self, axiom: crate::syntax::Term) -> Result<(), SyntaxError> {
        crate::syntax::check_formula(&axiom, &Context::empty(), &self.signature)?;
        self.axioms.push(axiom);
        Ok(())
    }
}
