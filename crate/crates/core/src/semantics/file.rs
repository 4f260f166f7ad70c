//! Model files: a flavor line, a space reference, a sheaf file per basic
//! type, and inline literals for constant sections and relation
//! subsheaves.
//!
//! ```text
//! flavor classical-c;
//! space spaces/sierpinski.space;
//! type X = sheaves/x.sheaf;
//! const c = 0 0;        # one stalk index per point, in point order
//! rel R = {0,1} {};     # one element set per point
//! ```

use std::collections::BTreeMap;

use super::{Flavor, Interpretation};
use crate::error::SemanticsError;
use crate::finspace::parse_space;
use crate::sheaf::{format_sheaf, parse_sheaf, ElemSet, Sheaf, SheafMorphism, Subsheaf};
use crate::syntax::Theory;

fn err(detail: impl Into<String>) -> SemanticsError {
    SemanticsError::ModelFile {
        detail: detail.into(),
    }
}

/// The `space <path>;` reference of a model file, if present.
pub fn model_space_ref(input: &str) -> Option<String> {
    for line in input.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("space ") {
            return Some(rest.trim_end_matches(';').trim().to_string());
        }
    }
    None
}

/// Parses a model file; `read` resolves referenced space and sheaf files
/// to their contents.
pub fn parse_model(
    input: &str,
    thy: &Theory,
    read: &dyn Fn(&str) -> Result<String, String>,
) -> Result<Interpretation, SemanticsError> {
    let mut flavor: Option<Flavor> = None;
    let mut space = None;
    let mut type_files: Vec<(String, String)> = Vec::new();
    let mut const_lines: Vec<(String, String)> = Vec::new();
    let mut rel_lines: Vec<(String, String)> = Vec::new();
    for raw in input.lines() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let line = line.strip_suffix(';').ok_or_else(|| err(format!("missing `;` in `{}`", raw)))?;
        if let Some(rest) = line.strip_prefix("flavor ") {
            flavor = Some(
                Flavor::parse(rest.trim()).ok_or_else(|| err(format!("unknown flavor `{}`", rest)))?,
            );
        } else if let Some(rest) = line.strip_prefix("space ") {
            let text = read(rest.trim()).map_err(err)?;
            space = Some(parse_space(&text).map_err(crate::error::SheafError::Space)?);
        } else if let Some(rest) = line.strip_prefix("type ") {
            let (name, path) = rest.split_once('=').ok_or_else(|| err("`type` needs `= <path>`"))?;
            type_files.push((name.trim().to_string(), path.trim().to_string()));
        } else if let Some(rest) = line.strip_prefix("const ") {
            let (name, lit) = rest.split_once('=').ok_or_else(|| err("`const` needs `= <section>`"))?;
            const_lines.push((name.trim().to_string(), lit.trim().to_string()));
        } else if let Some(rest) = line.strip_prefix("rel ") {
            let (name, lit) = rest.split_once('=').ok_or_else(|| err("`rel` needs `= <subsheaf>`"))?;
            rel_lines.push((name.trim().to_string(), lit.trim().to_string()));
        } else {
            return Err(err(format!("unrecognized line `{}`", raw)));
        }
    }
    let flavor = flavor.ok_or_else(|| err("missing `flavor` line"))?;
    let base = space.ok_or_else(|| err("missing `space` line"))?;
    let mut basic: BTreeMap<String, Sheaf> = BTreeMap::new();
    for (name, path) in type_files {
        let text = read(&path).map_err(err)?;
        let (sheaf, _) = parse_sheaf(&text, &base)?;
        basic.insert(name, sheaf);
    }
    let mut consts = BTreeMap::new();
    for (name, lit) in const_lines {
        let ty = thy
            .signature
            .constants
            .get(&name)
            .ok_or_else(|| err(format!("unknown constant `{}`", name)))?;
        let target = super::interpret_type_in(&basic, &base, ty)?;
        let vals: Vec<usize> = lit
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err(format!("bad section index `{}`", s))))
            .collect::<Result<_, _>>()?;
        if vals.len() != base.len() {
            return Err(err(format!("section for `{}` needs one index per point", name)));
        }
        let sec = SheafMorphism::new(
            Sheaf::terminal(base.clone()),
            target,
            vals.into_iter().map(|v| vec![v]).collect(),
        )?;
        consts.insert(name, sec);
    }
    let mut rels = BTreeMap::new();
    for (name, lit) in rel_lines {
        let args = thy
            .signature
            .relations
            .get(&name)
            .ok_or_else(|| err(format!("unknown relation `{}`", name)))?;
        let mut parent = Sheaf::terminal(base.clone());
        for a in args {
            parent = crate::sheaf::product(&parent, &super::interpret_type_in(&basic, &base, a)?)?;
        }
        let masks: Vec<ElemSet> = lit
            .split_whitespace()
            .map(|tok| parse_elem_set(tok))
            .collect::<Result<_, _>>()?;
        if masks.len() != base.len() {
            return Err(err(format!("subsheaf for `{}` needs one set per point", name)));
        }
        rels.insert(name, Subsheaf::new(parent, masks)?);
    }
    Interpretation::new(thy.clone(), base, flavor, basic, consts, rels)
}

fn parse_elem_set(tok: &str) -> Result<ElemSet, SemanticsError> {
    let inner = tok
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(format!("expected `{{..}}`, found `{}`", tok)))?;
    let mut mask: ElemSet = 0;
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let i: usize = part
            .parse()
            .map_err(|_| err(format!("bad element index `{}`", part)))?;
        mask |= 1 << i;
    }
    Ok(mask)
}

/// A readable description of an interpretation (spaces and sheaves are
/// written inline; not a loadable model file).
pub fn format_interpretation(m: &Interpretation) -> String {
    let mut out = String::new();
    out.push_str(&format!("flavor {};\n", m.flavor.as_str()));
    out.push_str(&format!(
        "space: points {} opens",
        m.base.point_names().join(" ")
    ));
    for &u in m.base.opens() {
        out.push_str(&format!(" {}", m.base.format_set(u)));
    }
    out.push('\n');
    for b in &m.theory.signature.basic_types {
        if let Some(f) = m.basic_sheaf(b) {
            out.push_str(&format!("type {}:\n{}", b, format_sheaf(f)));
        }
    }
    for name in m.theory.signature.constants.keys() {
        if let Some(sec) = m.constant_section(name) {
            let vals: Vec<String> = sec.maps.iter().map(|v| v[0].to_string()).collect();
            out.push_str(&format!("const {} = {};\n", name, vals.join(" ")));
        }
    }
    for name in m.theory.signature.relations.keys() {
        if let Some(sub) = m.relation_subsheaf(name) {
            let sets: Vec<String> = sub
                .elems
                .iter()
                .zip(sub.parent.sizes())
                .map(|(&mask, &n)| {
                    let inside: Vec<String> =
                        (0..n).filter(|a| mask & (1 << a) != 0).map(|a| a.to_string()).collect();
                    format!("{{{}}}", inside.join(","))
                })
                .collect();
            out.push_str(&format!("rel {} = {};\n", name, sets.join(" ")));
        }
    }
    out
}
