//! Models of a presentation in finite sets: operation tables over finite
//! carriers, homomorphisms, limits, sifted colimits, quotients by
//! congruences, free models and left adjoints to algebraic functors.

mod adjoint;
mod closure;
mod hom;
mod limits;
mod search;

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::finset::{tuple_index, tuples};
use crate::rewrite::{OpId, SortId, Term};
use crate::theory::{TheoryError, TheoryPresentation};

pub use adjoint::{left_adjoint_algebraic, restrict, AdjointOptions, Certificate, LeftAdjoint};
pub use closure::{free_model, quotient_by_congruence, FreeModel, Quotient, TruncatedFreeModel};
pub use hom::{hom_models, DEFAULT_HOM_BOUND};
pub use limits::{equalizer_of_models, product_of_models, sifted_colimit_of_models, terminal_model};
pub use search::{canonical_form, enumerate_models, models_up_to_iso, search_tables, Partial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("malformed structure: {0}")]
    Shape(String),
    #[error("not a model: {0}")]
    NotAModel(Box<ModelFailure>),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("search space of {candidates} candidates exceeds the bound {bound}")]
    SearchSpaceTooLarge { candidates: u128, bound: u128 },
    #[error("index category is not sifted: {0}")]
    NotSifted(String),
    #[error("induced operation `{0}` is not well defined on the colimit")]
    InducedOpIllDefined(String),
    #[error("models belong to different theories")]
    TheoryMismatch,
    #[error("construction exceeded {0} elements without closing")]
    Truncated(usize),
}

/// Operation tables on finite carriers, not yet known to satisfy the
/// equations. Tables are indexed by argument tuples with the last argument
/// varying fastest; AC operations have binary tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    theory: Arc<TheoryPresentation>,
    carriers: Vec<usize>,
    names: Vec<Vec<String>>,
    tables: Vec<Vec<usize>>,
}

/// Argument sorts of an operation as seen by its table.
pub(crate) fn table_args(t: &TheoryPresentation, op: OpId) -> Vec<SortId> {
    let sig = t.signature();
    let d = sig.op(op);
    if sig.is_ac(op) {
        vec![d.result; 2]
    } else {
        d.args.clone()
    }
}

impl Structure {
    pub fn new(theory: Arc<TheoryPresentation>, carriers: Vec<usize>, tables: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let names = carriers.iter().map(|&n| (0..n).map(|i| i.to_string()).collect()).collect();
        Self::with_names(theory, carriers, names, tables)
    }

    pub fn with_names(
        theory: Arc<TheoryPresentation>,
        carriers: Vec<usize>,
        names: Vec<Vec<String>>,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let sig = theory.signature();
        if carriers.len() != sig.sorts().len() || names.len() != carriers.len() {
            return Err(ModelError::Shape(format!("expected {} carriers", sig.sorts().len())));
        }
        if names.iter().zip(&carriers).any(|(n, &c)| n.len() != c) {
            return Err(ModelError::Shape("one name per element is required".into()));
        }
        if tables.len() != sig.ops().len() {
            return Err(ModelError::Shape(format!("expected {} operation tables", sig.ops().len())));
        }
        for (op, table) in tables.iter().enumerate() {
            let len: usize = table_args(&theory, op).iter().map(|&s| carriers[s]).product();
            let res = carriers[sig.op(op).result];
            if table.len() != len || table.iter().any(|&v| v >= res) {
                return Err(ModelError::Shape(format!("table of `{}` has the wrong size or range", sig.op(op).name)));
            }
        }
        Ok(Structure { theory, carriers, names, tables })
    }

    pub fn theory(&self) -> &Arc<TheoryPresentation> {
        &self.theory
    }

    pub fn carriers(&self) -> &[usize] {
        &self.carriers
    }

    pub fn size(&self, sort: SortId) -> usize {
        self.carriers[sort]
    }

    pub fn names(&self, sort: SortId) -> &[String] {
        &self.names[sort]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    pub fn table(&self, op: OpId) -> &[usize] {
        &self.tables[op]
    }

    pub(crate) fn radices(&self, op: OpId) -> Vec<usize> {
        table_args(&self.theory, op).iter().map(|&s| self.carriers[s]).collect()
    }

    pub fn apply(&self, op: OpId, args: &[usize]) -> usize {
        self.tables[op][tuple_index(&self.radices(op), args)]
    }

    /// Value of a term under an assignment of its variables. Flattened AC
    /// nodes are folded from the left.
    pub fn eval(&self, t: &Term, asg: &[usize]) -> usize {
        match t {
            Term::Var(v) => asg[*v],
            Term::App { op, args, .. } => {
                let vals: Vec<usize> = args.iter().map(|a| self.eval(a, asg)).collect();
                if self.theory.signature().is_ac(*op) && vals.len() > 2 {
                    vals[1..].iter().fold(vals[0], |acc, &v| self.apply(*op, &[acc, v]))
                } else {
                    self.apply(*op, &vals)
                }
            }
        }
    }

    /// Renames elements; tables are unchanged.
    pub fn named(mut self, names: Vec<Vec<String>>) -> Result<Self, ModelError> {
        if names.len() != self.carriers.len() || names.iter().zip(&self.carriers).any(|(n, &c)| n.len() != c) {
            return Err(ModelError::Shape("one name per element is required".into()));
        }
        self.names = names;
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelFailure {
    pub equation: String,
    /// Variable assignment, as element names.
    pub assignment: Vec<String>,
    pub left: String,
    pub right: String,
}

impl fmt::Display for ModelFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at ({}): {} ≠ {}", self.equation, self.assignment.join(", "), self.left, self.right)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelVerdict {
    pub holds: bool,
    /// Equation instances evaluated.
    pub checked: usize,
    pub failure: Option<ModelFailure>,
}

/// Checks every equation under every assignment, stopping at the first
/// failure.
pub fn check_model(s: &Structure) -> ModelVerdict {
    let mut checked = 0;
    for eq in s.theory.equations() {
        let radices: Vec<usize> = eq.ctx.iter().map(|&so| s.carriers[so]).collect();
        for asg in tuples(&radices) {
            checked += 1;
            let (l, r) = (s.eval(&eq.lhs, &asg), s.eval(&eq.rhs, &asg));
            if l != r {
                let res = s.theory.signature().sort_of(&eq.lhs, &eq.ctx).expect("well-sorted equation");
                let failure = ModelFailure {
                    equation: eq.label.clone(),
                    assignment: asg.iter().zip(&eq.ctx).map(|(&x, &so)| s.names[so][x].clone()).collect(),
                    left: s.names[res][l].clone(),
                    right: s.names[res][r].clone(),
                };
                return ModelVerdict { holds: false, checked, failure: Some(failure) };
            }
        }
    }
    ModelVerdict { holds: true, checked, failure: None }
}

/// A structure satisfying all equations of its theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(Structure);

impl Model {
    pub fn new(s: Structure) -> Result<Model, ModelError> {
        match check_model(&s).failure {
            None => Ok(Model(s)),
            Some(f) => Err(ModelError::NotAModel(Box::new(f))),
        }
    }

    pub(crate) fn new_unchecked(s: Structure) -> Model {
        Model(s)
    }

    pub fn structure(&self) -> &Structure {
        &self.0
    }

    pub fn into_structure(self) -> Structure {
        self.0
    }
}

impl Deref for Model {
    type Target = Structure;

    fn deref(&self) -> &Structure {
        &self.0
    }
}

/// Carrier maps commuting with every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelHom {
    pub source: Arc<Model>,
    pub target: Arc<Model>,
    pub maps: Vec<Vec<usize>>,
}

impl ModelHom {
    pub fn new(source: Arc<Model>, target: Arc<Model>, maps: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        if source.theory != target.theory {
            return Err(ModelError::TheoryMismatch);
        }
        if let Some(msg) = hom_violation(&source, &target, &maps) {
            return Err(ModelError::NotAHomomorphism(msg));
        }
        Ok(ModelHom { source, target, maps })
    }

    pub(crate) fn new_unchecked(source: Arc<Model>, target: Arc<Model>, maps: Vec<Vec<usize>>) -> Self {
        ModelHom { source, target, maps }
    }

    pub fn identity(m: Arc<Model>) -> Self {
        let maps = m.carriers.iter().map(|&n| (0..n).collect()).collect();
        ModelHom { source: m.clone(), target: m, maps }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModelHom) -> ModelHom {
        let maps = self.maps.iter().zip(&other.maps).map(|(f, g)| f.iter().map(|&x| g[x]).collect()).collect();
        ModelHom { source: self.source.clone(), target: other.target.clone(), maps }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.maps.iter().enumerate().all(|(s, f)| crate::finset::is_bijection(f, self.target.size(s)))
    }
}

/// First operation instance a family of maps fails to commute with.
pub(crate) fn hom_violation(a: &Structure, b: &Structure, maps: &[Vec<usize>]) -> Option<String> {
    if maps.len() != a.carriers.len() {
        return Some("one map per sort is required".into());
    }
    for (s, f) in maps.iter().enumerate() {
        if f.len() != a.carriers[s] || f.iter().any(|&y| y >= b.carriers[s]) {
            return Some(format!("map on sort {} has the wrong shape", a.theory.signature().sorts()[s]));
        }
    }
    let sig = a.theory.signature();
    for op in 0..sig.ops().len() {
        let args = table_args(&a.theory, op);
        let res = sig.op(op).result;
        for t in tuples(&a.radices(op)) {
            let image: Vec<usize> = t.iter().zip(&args).map(|(&x, &s)| maps[s][x]).collect();
            if maps[res][a.apply(op, &t)] != b.apply(op, &image) {
                let shown: Vec<&str> = t.iter().zip(&args).map(|(&x, &s)| a.names[s][x].as_str()).collect();
                return Some(format!("`{}` at ({})", sig.op(op).name, shown.join(", ")));
            }
        }
    }
    None
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::theory::builtin;

    pub(crate) fn theory(name: &str) -> Arc<TheoryPresentation> {
        Arc::new(builtin(name).unwrap())
    }

    /// Z/n under addition as a group: tables for m, e, inv.
    pub(crate) fn cyclic(n: usize) -> Model {
        let m = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let inv = (0..n).map(|x| (n - x) % n).collect();
        Model::new(Structure::new(theory("group"), vec![n], vec![m, vec![0], inv]).unwrap()).unwrap()
    }

    /// {1, a, b} with xy = x on {a, b} and 1 the unit.
    pub(crate) fn left_zero_monoid() -> Model {
        // elements: 0 = 1, 1 = a, 2 = b
        let m = vec![0, 1, 2, 1, 1, 1, 2, 2, 2];
        let s = Structure::new(theory("monoid"), vec![3], vec![m, vec![0]]).unwrap();
        let names = vec![vec!["1".into(), "a".into(), "b".into()]];
        Model::new(s.named(names).unwrap()).unwrap()
    }

    #[test]
    fn xor_is_a_group() {
        let z2 = cyclic(2);
        assert!(check_model(&z2).holds);
        assert_eq!(check_model(&z2).checked, theory("group").equations().iter().map(|e| 1 << e.ctx.len()).sum::<usize>());
    }

    #[test]
    fn and_is_not_a_group() {
        // AND with unit 1, inverse the identity map
        let s = Structure::new(theory("group"), vec![2], vec![vec![0, 0, 0, 1], vec![1], vec![0, 1]]).unwrap();
        let v = check_model(&s);
        assert!(!v.holds);
        let f = v.failure.unwrap();
        assert_eq!(f.equation, "m(inv(x), x) = e");
        assert_eq!(f.assignment, ["0"]);
    }

    #[test]
    fn singletons_model_everything() {
        for name in crate::theory::BUILTINS {
            let t = theory(name);
            let tables = (0..t.signature().ops().len()).map(|op| vec![0; 1usize.pow(table_args(&t, op).len() as u32)]).collect();
            assert!(check_model(&Structure::new(t, vec![1], tables).unwrap()).holds, "{name}");
        }
    }

    #[test]
    fn shapes_are_validated() {
        assert!(Structure::new(theory("group"), vec![2], vec![vec![0; 3], vec![0], vec![0, 1]]).is_err());
        assert!(Structure::new(theory("group"), vec![2], vec![vec![0; 4], vec![2], vec![0, 1]]).is_err());
        assert!(Structure::new(theory("group"), vec![2, 1], vec![]).is_err());
    }

    #[test]
    fn homomorphism_checks() {
        let z2 = Arc::new(cyclic(2));
        let z4 = Arc::new(cyclic(4));
        assert!(ModelHom::new(z4.clone(), z2.clone(), vec![vec![0, 1, 0, 1]]).is_ok());
        assert!(ModelHom::new(z2.clone(), z4.clone(), vec![vec![0, 1]]).is_err());
        assert!(ModelHom::new(z2.clone(), z4.clone(), vec![vec![0, 2]]).is_ok());
        assert!(ModelHom::identity(z4).is_isomorphism());
    }

    #[test]
    fn left_zero_monoid_is_a_monoid() {
        assert!(check_model(&left_zero_monoid()).holds);
    }
}
