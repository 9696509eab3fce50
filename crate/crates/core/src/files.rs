//! TOML formats for categories, presheaves and models. Theories and theory
//! morphisms have their own line formats in [`crate::theory`].
//!
//! ```toml
//! # category
//! objects = ["a", "b"]
//! morphisms = [{ id = "f", src = "a", dst = "b" }, { id = "r", src = "b", dst = "a" }]
//! compose = [["r", "f", "id_a"]]      # r∘f = id_a
//!
//! # presheaf; actions map elements of P(dst) to elements of P(src)
//! base = "gph"
//! [sets]
//! V = ["x", "y"]
//! E = ["u"]
//! [actions]
//! s = { u = "x" }
//! t = { u = "y" }
//!
//! # model; tables list results row-major, last argument fastest
//! theory = "monoid"
//! [carriers]
//! S = ["1", "a"]
//! [tables]
//! e = ["1"]
//! m = ["1", "a", "a", "a"]
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::fincat::{CategoryError, FinCat};
use crate::models::{ModelError, Structure};
use crate::presheaf::{Presheaf, PresheafError};
use crate::theory::{TheoryError, TheoryPresentation};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    objects: Vec<String>,
    #[serde(default)]
    morphisms: Vec<MorphismEntry>,
    #[serde(default)]
    compose: Vec<[String; 3]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismEntry {
    id: String,
    src: String,
    dst: String,
}

pub fn parse_category(src: &str) -> Result<FinCat, FileError> {
    let file: CategoryFile = toml::from_str(src)?;
    let mut b = FinCat::builder().objects(file.objects);
    for m in file.morphisms {
        b = b.morphism(m.id, m.src, m.dst);
    }
    for [g, f, h] in file.compose {
        b = b.compose(g, f, h);
    }
    Ok(b.build()?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresheafFile {
    base: String,
    sets: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    actions: BTreeMap<String, BTreeMap<String, String>>,
}

fn position(names: &[String], x: &str, what: &str) -> Result<usize, FileError> {
    names.iter().position(|n| n == x).ok_or_else(|| FileError::Shape(format!("`{x}` is not an element of {what}")))
}

/// Parses a presheaf; `resolve` turns the `base` reference into a category.
pub fn parse_presheaf<F>(src: &str, resolve: F) -> Result<Presheaf, FileError>
where
    F: FnOnce(&str) -> Result<Arc<FinCat>, FileError>,
{
    let file: PresheafFile = toml::from_str(src)?;
    let base = resolve(&file.base)?;
    for name in file.sets.keys() {
        if base.object_id(name).is_none() {
            return Err(FileError::Unknown { kind: "object", name: name.clone() });
        }
    }
    for name in file.actions.keys() {
        if base.morphism_id(name).is_none() {
            return Err(FileError::Unknown { kind: "morphism", name: name.clone() });
        }
    }
    let labels: Vec<Vec<String>> =
        base.objects().iter().map(|o| file.sets.get(o).cloned().unwrap_or_default()).collect();
    let mut actions = Vec::with_capacity(base.num_morphisms());
    for f in 0..base.num_morphisms() {
        let (a, b) = (base.src(f), base.dst(f));
        if base.is_identity(f) {
            actions.push((0..labels[a].len()).collect());
            continue;
        }
        let name = &base.morphism(f).name;
        let table = file.actions.get(name).ok_or_else(|| FileError::Shape(format!("no action for `{name}`")))?;
        let what_a = format!("P({})", base.object_name(a));
        let what_b = format!("P({})", base.object_name(b));
        let mut action = Vec::with_capacity(labels[b].len());
        for y in &labels[b] {
            let x = table.get(y).ok_or_else(|| FileError::Shape(format!("`{name}` does not act on `{y}`")))?;
            action.push(position(&labels[a], x, &what_a)?);
        }
        for y in table.keys() {
            position(&labels[b], y, &what_b)?;
        }
        actions.push(action);
    }
    let sets = labels.iter().map(Vec::len).collect();
    Ok(Presheaf::new(base, sets, actions)?.with_labels(labels)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    theory: String,
    carriers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    tables: BTreeMap<String, Vec<String>>,
}

/// Parses a structure (not yet checked against the equations); `resolve`
/// turns the `theory` reference into a presentation.
pub fn parse_structure<F>(src: &str, resolve: F) -> Result<Structure, FileError>
where
    F: FnOnce(&str) -> Result<Arc<TheoryPresentation>, FileError>,
{
    let file: ModelFile = toml::from_str(src)?;
    let theory = resolve(&file.theory)?;
    let sig = theory.signature().clone();
    for name in file.carriers.keys() {
        if !sig.sorts().contains(name) {
            return Err(FileError::Unknown { kind: "sort", name: name.clone() });
        }
    }
    for name in file.tables.keys() {
        if sig.op_id(name).is_none() {
            return Err(FileError::Unknown { kind: "operation", name: name.clone() });
        }
    }
    let names: Vec<Vec<String>> =
        sig.sorts().iter().map(|s| file.carriers.get(s).cloned().unwrap_or_default()).collect();
    let mut tables = Vec::with_capacity(sig.ops().len());
    for decl in sig.ops() {
        let entries = file.tables.get(&decl.name).ok_or_else(|| FileError::Shape(format!("no table for `{}`", decl.name)))?;
        let res = decl.result;
        let what = format!("sort {}", sig.sorts()[res]);
        let table = entries.iter().map(|x| position(&names[res], x, &what)).collect::<Result<Vec<_>, _>>()?;
        tables.push(table);
    }
    let carriers = names.iter().map(Vec::len).collect();
    Ok(Structure::with_names(theory, carriers, names, tables)?)
}

/// The TOML form of a structure, readable by [`parse_structure`] given the
/// same theory reference.
pub fn structure_to_toml(s: &Structure, theory_ref: &str) -> String {
    let sig = s.theory().signature();
    let quote = |xs: &[String]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let mut out = format!("theory = {theory_ref:?}\n\n[carriers]\n");
    for (i, sort) in sig.sorts().iter().enumerate() {
        out += &format!("{sort} = [{}]\n", quote(s.names(i)));
    }
    out += "\n[tables]\n";
    for (op, decl) in sig.ops().iter().enumerate() {
        let names: Vec<String> = s.table(op).iter().map(|&v| s.names(decl.result)[v].clone()).collect();
        out += &format!("{:?} = [{}]\n", decl.name, quote(&names));
    }
    out
}

/// Element names to indices, for command-line maps like `a=0,b=1`.
pub fn name_index(names: &[String]) -> HashMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::check_model;
    use crate::presheaf::fixtures::gph;
    use crate::theory::builtin;

    #[test]
    fn category_round_trip() {
        let src = r#"
objects = ["P", "Q"]
morphisms = [
    { id = "f", src = "P", dst = "Q" },
    { id = "g", src = "P", dst = "Q" },
    { id = "s", src = "Q", dst = "P" },
    { id = "sf", src = "P", dst = "P" },
    { id = "sg", src = "P", dst = "P" },
]
compose = [
    ["f", "s", "id_Q"], ["g", "s", "id_Q"], ["s", "f", "sf"], ["s", "g", "sg"],
    ["f", "sf", "f"], ["f", "sg", "g"], ["g", "sf", "f"], ["g", "sg", "g"],
    ["sf", "s", "s"], ["sg", "s", "s"],
    ["sf", "sf", "sf"], ["sf", "sg", "sg"], ["sg", "sf", "sf"], ["sg", "sg", "sg"],
]
"#;
        let c = parse_category(src).unwrap();
        assert_eq!(c, crate::fincat::shapes::reflexive_pair());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_category("objects = []\narrows = []\n").is_err());
        assert!(parse_category("objects = [\"a\"]\n").is_ok());
    }

    #[test]
    fn a_two_vertex_graph() {
        let src = "base = \"gph\"\n[sets]\nV = [\"x\", \"y\"]\nE = [\"u\"]\n[actions]\ns = { u = \"x\" }\nt = { u = \"y\" }\n";
        let p = parse_presheaf(src, |_| Ok(gph::base())).unwrap();
        assert!(p.is_isomorphic(&gph::edge()));
        assert!(parse_presheaf(&src.replace("t = { u = \"y\" }\n", ""), |_| Ok(gph::base())).is_err());
    }

    #[test]
    fn left_zero_monoid_file() {
        let src = "theory = \"monoid\"\n[carriers]\nS = [\"1\", \"a\", \"b\"]\n[tables]\ne = [\"1\"]\nm = [\"1\", \"a\", \"b\", \"a\", \"a\", \"a\", \"b\", \"b\", \"b\"]\n";
        let t = Arc::new(builtin("monoid").unwrap());
        let s = parse_structure(src, |_| Ok(t.clone())).unwrap();
        assert!(check_model(&s).holds);
        let again = parse_structure(&structure_to_toml(&s, "monoid"), |_| Ok(t.clone())).unwrap();
        assert_eq!(again, s);
    }
}
