//! General-model files.
//!
//! ```text
//! # atoms of a basic type, then named function carriers with their tables
//! carrier X: a b;
//! carrier X^X: id swap;
//! fun id: a|->a b|->b;
//! fun swap: a|->b b|->a;
//! const c = a;
//! rel R: a;            # one tuple per line
//! label 3 = a;
//! ```
//!
//! Elements are referred to by name: atom names, `tt`/`ff` at type `2`,
//! and the declared names of function-carrier members. Labels resolve
//! their name against every named carrier and must be unambiguous.

use std::collections::{BTreeMap, BTreeSet};

use super::{GeneralModel, Labeling, Value, FF, TT};
use crate::error::HenkinError;
use crate::syntax::{parse_type, Signature, TypeExpr};

fn perr(line: usize, msg: impl Into<String>) -> HenkinError {
    HenkinError::Parse {
        line,
        msg: msg.into(),
    }
}

struct Names {
    // name -> (type, index), per declared carrier
    by_type: BTreeMap<TypeExpr, Vec<String>>,
}

impl Names {
    fn resolve_at(&self, name: &str, ty: &TypeExpr, line: usize) -> Result<usize, HenkinError> {
        if *ty == TypeExpr::Two {
            return match name {
                "tt" => Ok(TT),
                "ff" => Ok(FF),
                _ => Err(perr(line, format!("`{}` is not a truth value", name))),
            };
        }
        let names = self.by_type.get(ty).ok_or_else(|| HenkinError::MissingCarrier {
            ty: ty.to_string(),
        })?;
        names.iter().position(|n| n == name).ok_or_else(|| {
            HenkinError::UnknownElement {
                name: name.to_string(),
                ty: ty.to_string(),
            }
        })
    }

    fn resolve_anywhere(&self, name: &str, line: usize) -> Result<Value, HenkinError> {
        if name == "tt" || name == "ff" {
            return Ok(Value::new(TypeExpr::Two, if name == "tt" { TT } else { FF }));
        }
        let mut hits = Vec::new();
        for (ty, names) in &self.by_type {
            if let Some(i) = names.iter().position(|n| n == name) {
                hits.push(Value::new(ty.clone(), i));
            }
        }
        match hits.len() {
            0 => Err(HenkinError::UnknownElement {
                name: name.to_string(),
                ty: "any declared carrier".into(),
            }),
            1 => Ok(hits.pop().unwrap()),
            _ => Err(perr(line, format!("element name `{}` is ambiguous", name))),
        }
    }
}

/// Parses a general model and its labeling against a signature.
pub fn parse_general_model(
    input: &str,
    sig: &Signature,
) -> Result<(GeneralModel, Labeling), HenkinError> {
    let mut carriers: Vec<(usize, TypeExpr, Vec<String>)> = Vec::new();
    let mut fun_lines: Vec<(usize, String, Vec<(String, String)>)> = Vec::new();
    let mut const_lines: Vec<(usize, String, String)> = Vec::new();
    let mut rel_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut label_lines: Vec<(usize, usize, String)> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let line = line
            .strip_suffix(';')
            .ok_or_else(|| perr(lineno, format!("missing `;` in `{}`", raw.trim())))?
            .trim();
        if let Some(rest) = line.strip_prefix("carrier ") {
            let (ty_src, names) = rest
                .split_once(':')
                .ok_or_else(|| perr(lineno, "`carrier` needs `<type>: <names>`"))?;
            let ty = parse_type(ty_src.trim())?;
            let names: Vec<String> = names.split_whitespace().map(str::to_string).collect();
            carriers.push((lineno, ty, names));
        } else if let Some(rest) = line.strip_prefix("fun ") {
            let (name, entries) = rest
                .split_once(':')
                .ok_or_else(|| perr(lineno, "`fun` needs `<name>: <entries>`"))?;
            let mut pairs = Vec::new();
            for ent in entries.split_whitespace() {
                let (l, r) = ent
                    .split_once("|->")
                    .ok_or_else(|| perr(lineno, format!("bad table entry `{}`", ent)))?;
                pairs.push((l.to_string(), r.to_string()));
            }
            fun_lines.push((lineno, name.trim().to_string(), pairs));
        } else if let Some(rest) = line.strip_prefix("const ") {
            let (name, val) = rest
                .split_once('=')
                .ok_or_else(|| perr(lineno, "`const` needs `= <element>`"))?;
            const_lines.push((lineno, name.trim().to_string(), val.trim().to_string()));
        } else if let Some(rest) = line.strip_prefix("rel ") {
            let (name, tuple) = rest
                .split_once(':')
                .ok_or_else(|| perr(lineno, "`rel` needs `<name>: <elements>`"))?;
            let elems = tuple.split_whitespace().map(str::to_string).collect();
            rel_lines.push((lineno, name.trim().to_string(), elems));
        } else if let Some(rest) = line.strip_prefix("label ") {
            let (n, val) = rest
                .split_once('=')
                .ok_or_else(|| perr(lineno, "`label` needs `<n> = <element>`"))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| perr(lineno, format!("bad label index `{}`", n.trim())))?;
            label_lines.push((lineno, n, val.trim().to_string()));
        } else {
            return Err(perr(lineno, format!("unrecognized line `{}`", raw.trim())));
        }
    }

    let mut atoms: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut names = Names {
        by_type: BTreeMap::new(),
    };
    let mut func_decls: Vec<(usize, TypeExpr, Vec<String>)> = Vec::new();
    for (lineno, ty, elems) in carriers {
        match &ty {
            TypeExpr::Basic(b) => {
                if !sig.basic_types.contains(b) {
                    return Err(HenkinError::Syntax(crate::SyntaxError::UnknownBasicType {
                        name: b.clone(),
                    }));
                }
                atoms.insert(b.clone(), elems.clone());
                names.by_type.insert(ty, elems);
            }
            TypeExpr::Exp(_, _) => {
                names.by_type.insert(ty.clone(), elems.clone());
                func_decls.push((lineno, ty, elems));
            }
            _ => {
                return Err(perr(
                    lineno,
                    "only basic and function types take carrier declarations",
                ))
            }
        }
    }
    for b in &sig.basic_types {
        atoms.entry(b.clone()).or_default();
    }

    let tables_by_name: BTreeMap<String, (usize, Vec<(String, String)>)> = fun_lines
        .into_iter()
        .map(|(l, n, p)| (n, (l, p)))
        .collect();
    // Shallower function carriers first, so tables can reference them.
    func_decls.sort_by_key(|(_, ty, _)| super::type_depth(ty));
    let mut funcs: BTreeMap<TypeExpr, Vec<Vec<usize>>> = BTreeMap::new();
    let mut func_names: BTreeMap<TypeExpr, Vec<String>> = BTreeMap::new();
    for (lineno, ty, elems) in func_decls {
        let (z, y) = match &ty {
            TypeExpr::Exp(z, y) => (z.as_ref(), y.as_ref()),
            _ => unreachable!(),
        };
        let domain = carrier_names(y, &names)
            .ok_or_else(|| perr(lineno, format!("domain `{}` has no named carrier", y)))?;
        let mut tables = Vec::with_capacity(elems.len());
        for fname in &elems {
            let (fl, pairs) = tables_by_name
                .get(fname)
                .ok_or_else(|| perr(lineno, format!("no `fun` line for `{}`", fname)))?;
            let map: BTreeMap<&str, &str> = pairs
                .iter()
                .map(|(l, r)| (l.as_str(), r.as_str()))
                .collect();
            let mut table = Vec::with_capacity(domain.len());
            for d in &domain {
                let r = map.get(d.as_str()).ok_or_else(|| {
                    perr(*fl, format!("table for `{}` misses domain element `{}`", fname, d))
                })?;
                table.push(names.resolve_at(r, z, *fl)?);
            }
            tables.push(table);
        }
        funcs.insert(ty.clone(), tables);
        func_names.insert(ty, elems);
    }

    let mut consts = BTreeMap::new();
    for (lineno, name, val) in const_lines {
        let ty = sig.constants.get(&name).ok_or_else(|| {
            HenkinError::Syntax(crate::SyntaxError::UnknownConstant { name: name.clone() })
        })?;
        let idx = names.resolve_at(&val, ty, lineno)?;
        consts.insert(name, Value::new(ty.clone(), idx));
    }
    let mut rels: BTreeMap<String, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for name in sig.relations.keys() {
        rels.insert(name.clone(), BTreeSet::new());
    }
    for (lineno, name, elems) in rel_lines {
        let args = sig.relations.get(&name).ok_or_else(|| {
            HenkinError::Syntax(crate::SyntaxError::UnknownRelation { name: name.clone() })
        })?;
        if elems.len() != args.len() {
            return Err(perr(lineno, format!("relation `{}` takes {} arguments", name, args.len())));
        }
        let mut tup = Vec::with_capacity(elems.len());
        for (e, ty) in elems.iter().zip(args) {
            tup.push(names.resolve_at(e, ty, lineno)?);
        }
        rels.entry(name).or_default().insert(tup);
    }
    let mut labeling = Labeling::new();
    for (lineno, n, val) in label_lines {
        labeling.assign(n, names.resolve_anywhere(&val, lineno)?);
    }
    let model = GeneralModel::new(sig.clone(), atoms, funcs, func_names, consts, rels)?;
    Ok((model, labeling))
}

fn carrier_names(ty: &TypeExpr, names: &Names) -> Option<Vec<String>> {
    if *ty == TypeExpr::Two {
        return Some(vec!["tt".into(), "ff".into()]);
    }
    names.by_type.get(ty).cloned()
}

/// Writes a model back in the file format. Labels whose type has no named
/// elements (products) are not representable and panic in debug builds.
pub fn format_general_model(m: &GeneralModel) -> String {
    let mut out = String::new();
    for b in &m.signature.basic_types {
        let names = m.atom_names(b).unwrap_or(&[]);
        out.push_str(&format!("carrier {}: {};\n", b, names.join(" ")));
    }
    for ty in m.registered_function_types() {
        let names = m.function_names(ty).unwrap_or(&[]);
        out.push_str(&format!("carrier {}: {};\n", ty, names.join(" ")));
    }
    for ty in m.registered_function_types() {
        let y = match ty {
            TypeExpr::Exp(_, y) => y.as_ref(),
            _ => continue,
        };
        let elem_names = m.function_names(ty).unwrap_or(&[]);
        let tables = m.function_tables(ty).unwrap_or(&[]);
        for (name, table) in elem_names.iter().zip(tables) {
            let entries: Vec<String> = table
                .iter()
                .enumerate()
                .map(|(d, &v)| {
                    let dn = m
                        .element_name(&Value::new(y.clone(), d))
                        .unwrap_or_else(|| d.to_string());
                    let vn = match ty {
                        TypeExpr::Exp(z, _) => m
                            .element_name(&Value::new(z.as_ref().clone(), v))
                            .unwrap_or_else(|| v.to_string()),
                        _ => v.to_string(),
                    };
                    format!("{}|->{}", dn, vn)
                })
                .collect();
            out.push_str(&format!("fun {}: {};\n", name, entries.join(" ")));
        }
    }
    for name in m.signature.constants.keys() {
        if let Some(v) = m.constant(name) {
            if let Some(en) = m.element_name(v) {
                out.push_str(&format!("const {} = {};\n", name, en));
            }
        }
    }
    for (name, args) in &m.signature.relations {
        if let Some(tuples) = m.relation_tuples(name) {
            for tup in tuples {
                let elems: Vec<String> = tup
                    .iter()
                    .zip(args)
                    .map(|(&v, ty)| {
                        m.element_name(&Value::new(ty.clone(), v))
                            .unwrap_or_else(|| v.to_string())
                    })
                    .collect();
                out.push_str(&format!("rel {}: {};\n", name, elems.join(" ")));
            }
        }
    }
    out
}

/// The model followed by its label lines.
pub fn format_labeled_point(pt: &super::LabeledPoint) -> String {
    let mut out = format_general_model(&pt.model);
    for n in pt.labeling.domain() {
        let v = pt.labeling.get(n).unwrap();
        if let Some(name) = pt.model.element_name(v) {
            out.push_str(&format!("label {} = {};\n", n, name));
        }
    }
    out
}
