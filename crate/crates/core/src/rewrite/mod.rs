//! Many-sorted first-order terms with associative-commutative operations,
//! rewriting to normal form, critical pairs and bounded term enumeration.
//!
//! AC operations are kept flattened: `m(a, m(b, c))` is stored as
//! `m(a, b, c)` with arguments sorted by [`Signature::cmp_terms`] and units
//! removed. Every constructor that can break that shape goes through
//! [`Signature::app`], so terms are canonical by construction.

mod confluence;
mod enumerate;
mod matching;
mod normalize;
mod parse;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use confluence::{local_confluence_report, CriticalPair, Origin};
pub use enumerate::{enumerate_normal_forms, enumerate_terms, NormalForms};
pub use matching::match_term;
pub use normalize::{NormalForm, RewriteSystem, Rule, DEFAULT_BUDGET};
pub use parse::parse_term;

pub type SortId = usize;
pub type OpId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("AC operation `{0}` must be binary on a single sort")]
    BadAc(String),
    #[error("unit of `{0}` must be a constant of its sort")]
    BadUnit(String),
    #[error("variable {0} is unbound")]
    UnboundVariable(usize),
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: String, found: String },
    #[error("`{op}` takes {expected} arguments, got {found}")]
    Arity { op: String, expected: usize, found: usize },
    #[error("rule `{0}` has a variable left-hand side")]
    VariableLhs(String),
    #[error("rule `{0}` introduces variables on its right-hand side")]
    FreshRhsVariable(String),
    #[error("rewriting exceeded {budget} steps; reached {partial}")]
    BudgetExceeded { budget: usize, partial: String },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

/// AC flag with an optional unit constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AcInfo {
    pub unit: Option<OpId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<String>,
    ops: Vec<OpDecl>,
    ac: Vec<Option<AcInfo>>,
    op_index: HashMap<String, OpId>,
}

/// A term; variables are indices into a context of sorts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App { op: OpId, args: Vec<Term>, depth: u32 },
}

impl Term {
    /// Nesting depth: leaves are 0, an application is one more than its
    /// deepest argument, and a flattened AC node counts the height of the
    /// shallowest binary bracketing of its arguments.
    pub fn depth(&self) -> u32 {
        match self {
            Term::Var(_) => 0,
            Term::App { depth, .. } => *depth,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App { args, .. } => args,
        }
    }

    pub fn op(&self) -> Option<OpId> {
        match self {
            Term::Var(_) => None,
            Term::App { op, .. } => Some(*op),
        }
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<usize> {
        fn go(t: &Term, out: &mut Vec<usize>) {
            match t {
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v)
                    }
                }
                Term::App { args, .. } => args.iter().for_each(|a| go(a, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App { args, .. } => args.iter().filter_map(|a| a.max_var()).max(),
        }
    }

    /// Number of symbols.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App { args, .. } => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
        }
    }
}

fn ac_depth(mut depths: Vec<u32>) -> u32 {
    // Huffman-style: merging the two shallowest subtrees is optimal for height
    depths.sort_unstable_by(|a, b| b.cmp(a));
    while depths.len() > 1 {
        let a = depths.pop().unwrap();
        let b = depths.pop().unwrap();
        let m = a.max(b) + 1;
        let pos = depths.partition_point(|&d| d > m);
        depths.insert(pos, m);
    }
    depths.pop().unwrap_or(0)
}

impl Signature {
    pub fn new(sorts: Vec<String>) -> Result<Self, RewriteError> {
        let mut seen = std::collections::HashSet::new();
        for s in &sorts {
            if !seen.insert(s) {
                return Err(RewriteError::DuplicateName(s.clone()));
            }
        }
        Ok(Signature { sorts, ops: Vec::new(), ac: Vec::new(), op_index: HashMap::new() })
    }

    /// One sort named `S`.
    pub fn single_sorted() -> Self {
        Signature::new(vec!["S".into()]).unwrap()
    }

    pub fn add_op(&mut self, name: &str, args: &[&str], result: &str) -> Result<OpId, RewriteError> {
        let args = args.iter().map(|s| self.sort_id(s)).collect::<Result<Vec<_>, _>>()?;
        let result = self.sort_id(result)?;
        self.add_op_ids(name, args, result)
    }

    pub fn add_op_ids(&mut self, name: &str, args: Vec<SortId>, result: SortId) -> Result<OpId, RewriteError> {
        if self.op_index.contains_key(name) || self.sorts.iter().any(|s| s == name) {
            return Err(RewriteError::DuplicateName(name.into()));
        }
        let id = self.ops.len();
        self.ops.push(OpDecl { name: name.into(), args, result });
        self.ac.push(None);
        self.op_index.insert(name.into(), id);
        Ok(id)
    }

    pub fn set_ac(&mut self, op: OpId, unit: Option<OpId>) -> Result<(), RewriteError> {
        let d = &self.ops[op];
        if d.args.len() != 2 || d.args[0] != d.result || d.args[1] != d.result {
            return Err(RewriteError::BadAc(d.name.clone()));
        }
        if let Some(u) = unit {
            let ud = &self.ops[u];
            if !ud.args.is_empty() || ud.result != d.result {
                return Err(RewriteError::BadUnit(d.name.clone()));
            }
        }
        self.ac[op] = Some(AcInfo { unit });
        Ok(())
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    pub fn op(&self, op: OpId) -> &OpDecl {
        &self.ops[op]
    }

    pub fn op_id(&self, name: &str) -> Option<OpId> {
        self.op_index.get(name).copied()
    }

    pub fn sort_id(&self, name: &str) -> Result<SortId, RewriteError> {
        self.sorts.iter().position(|s| s == name).ok_or_else(|| RewriteError::UnknownSort(name.into()))
    }

    pub fn ac(&self, op: OpId) -> Option<AcInfo> {
        self.ac[op]
    }

    pub fn is_ac(&self, op: OpId) -> bool {
        self.ac[op].is_some()
    }

    pub fn constants(&self) -> impl Iterator<Item = OpId> + '_ {
        (0..self.ops.len()).filter(|&o| self.ops[o].args.is_empty())
    }

    /// Whether some AC operation has `op` as its unit.
    pub fn is_unit(&self, op: OpId) -> bool {
        self.ac.iter().any(|a| matches!(a, Some(AcInfo { unit: Some(u) }) if *u == op))
    }

    /// Canonical application: flattens and sorts AC arguments and drops units.
    pub fn app(&self, op: OpId, args: Vec<Term>) -> Term {
        match self.ac[op] {
            None => {
                let depth = args.iter().map(|a| a.depth() + 1).max().unwrap_or(0);
                Term::App { op, args, depth }
            }
            Some(AcInfo { unit }) => {
                let mut flat = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        Term::App { op: o, args: inner, .. } if o == op => flat.extend(inner),
                        Term::App { op: o, ref args, .. } if Some(o) == unit && args.is_empty() => {}
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => self.constant(unit.expect("empty AC node without a unit")),
                    1 => flat.pop().unwrap(),
                    _ => {
                        flat.sort_by(|a, b| self.cmp_terms(a, b));
                        let depth = ac_depth(flat.iter().map(|a| a.depth()).collect());
                        Term::App { op, args: flat, depth }
                    }
                }
            }
        }
    }

    pub fn constant(&self, op: OpId) -> Term {
        Term::App { op, args: Vec::new(), depth: 0 }
    }

    /// Re-canonicalizes every node bottom-up.
    pub fn canonical(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(*v),
            Term::App { op, args, .. } => self.app(*op, args.iter().map(|a| self.canonical(a)).collect()),
        }
    }

    /// Degree-lexicographic order: depth, then variables before
    /// applications, then operation name, then arguments left to right.
    pub fn cmp_terms(&self, a: &Term, b: &Term) -> Ordering {
        a.depth().cmp(&b.depth()).then_with(|| match (a, b) {
            (Term::Var(x), Term::Var(y)) => x.cmp(y),
            (Term::Var(_), Term::App { .. }) => Ordering::Less,
            (Term::App { .. }, Term::Var(_)) => Ordering::Greater,
            (Term::App { op: f, args: xs, .. }, Term::App { op: g, args: ys, .. }) => self.ops[*f]
                .name
                .cmp(&self.ops[*g].name)
                .then_with(|| xs.len().cmp(&ys.len()))
                .then_with(|| {
                    xs.iter().zip(ys).map(|(x, y)| self.cmp_terms(x, y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
                }),
        })
    }

    /// Sort of `t` in a context, checking every application.
    pub fn sort_of(&self, t: &Term, ctx: &[SortId]) -> Result<SortId, RewriteError> {
        match t {
            Term::Var(v) => ctx.get(*v).copied().ok_or(RewriteError::UnboundVariable(*v)),
            Term::App { op, args, .. } => {
                let d = &self.ops[*op];
                let ac = self.is_ac(*op);
                if !ac && args.len() != d.args.len() || ac && args.len() < 2 {
                    return Err(RewriteError::Arity { op: d.name.clone(), expected: d.args.len(), found: args.len() });
                }
                for (i, a) in args.iter().enumerate() {
                    let s = self.sort_of(a, ctx)?;
                    let expected = if ac { d.result } else { d.args[i] };
                    if s != expected {
                        return Err(RewriteError::SortMismatch {
                            expected: self.sorts[expected].clone(),
                            found: self.sorts[s].clone(),
                        });
                    }
                }
                Ok(d.result)
            }
        }
    }

    /// Simultaneous substitution, re-canonicalizing AC nodes.
    pub fn substitute(&self, t: &Term, binding: &[Term]) -> Result<Term, RewriteError> {
        match t {
            Term::Var(v) => binding.get(*v).cloned().ok_or(RewriteError::UnboundVariable(*v)),
            Term::App { op, args, .. } => {
                let args = args.iter().map(|a| self.substitute(a, binding)).collect::<Result<Vec<_>, _>>()?;
                Ok(self.app(*op, args))
            }
        }
    }

    /// Substitution with sort checking of the binding against `ctx`.
    pub fn substitute_checked(
        &self,
        t: &Term,
        ctx: &[SortId],
        binding: &[Term],
        binding_ctx: &[SortId],
    ) -> Result<Term, RewriteError> {
        for v in t.vars() {
            let b = binding.get(v).ok_or(RewriteError::UnboundVariable(v))?;
            let (want, got) = (ctx[v], self.sort_of(b, binding_ctx)?);
            if want != got {
                return Err(RewriteError::SortMismatch {
                    expected: self.sorts[want].clone(),
                    found: self.sorts[got].clone(),
                });
            }
        }
        self.substitute(t, binding)
    }

    /// Prefix rendering with the given variable names (`x0, x1, …` beyond them).
    pub fn display<'a>(&'a self, t: &'a Term, names: &'a [String]) -> TermDisplay<'a> {
        TermDisplay { sig: self, term: t, names }
    }

    pub fn show(&self, t: &Term, names: &[String]) -> String {
        self.display(t, names).to_string()
    }
}

pub struct TermDisplay<'a> {
    sig: &'a Signature,
    term: &'a Term,
    names: &'a [String],
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => match self.names.get(*v) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "x{v}"),
            },
            Term::App { op, args, .. } => {
                write!(f, "{}", self.sig.ops[*op].name)?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", TermDisplay { sig: self.sig, term: a, names: self.names })?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Default variable names `x, y, z, w` then `x4, x5, …`.
pub fn default_names(n: usize) -> Vec<String> {
    const BASE: [&str; 4] = ["x", "y", "z", "w"];
    (0..n).map(|i| if i < BASE.len() && n <= BASE.len() { BASE[i].to_string() } else { format!("x{}", i + 1) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monoid_sig() -> Signature {
        let mut s = Signature::single_sorted();
        s.add_op("m", &["S", "S"], "S").unwrap();
        s.add_op("e", &[], "S").unwrap();
        s.add_op("inv", &["S"], "S").unwrap();
        s
    }

    #[test]
    fn substitution_examples() {
        let s = monoid_sig();
        let (m, e, inv) = (0, 1, 2);
        let x = Term::Var(0);
        let mxx = s.app(m, vec![x.clone(), x.clone()]);
        let ee = s.substitute(&mxx, &[s.constant(e)]).unwrap();
        assert_eq!(s.show(&ee, &[]), "m(e, e)");
        let myz = s.app(m, vec![Term::Var(1), Term::Var(2)]);
        let t = s.substitute(&s.app(inv, vec![x.clone()]), &[myz]).unwrap();
        assert_eq!(s.show(&t, &default_names(3)), "inv(m(y, z))");
        let id: Vec<Term> = (0..1).map(Term::Var).collect();
        assert_eq!(s.substitute(&mxx, &id).unwrap(), mxx);
        assert_eq!(s.substitute(&mxx, &[]), Err(RewriteError::UnboundVariable(0)));
    }

    #[test]
    fn ac_nodes_are_flat_sorted_and_unit_free() {
        let mut s = monoid_sig();
        s.set_ac(0, Some(1)).unwrap();
        let (a, b, c) = (Term::Var(0), Term::Var(1), Term::Var(2));
        let t1 = s.app(0, vec![a.clone(), s.app(0, vec![c.clone(), b.clone()])]);
        let t2 = s.app(0, vec![s.app(0, vec![b.clone(), s.constant(1)]), s.app(0, vec![c.clone(), a.clone()])]);
        assert_eq!(t1, t2);
        assert_eq!(t1.args().len(), 3);
        assert_eq!(t1.depth(), 2);
        assert_eq!(s.app(0, vec![s.constant(1), a.clone()]), a);
    }

    #[test]
    fn ac_depth_is_minimal_bracketing() {
        assert_eq!(ac_depth(vec![0, 0]), 1);
        assert_eq!(ac_depth(vec![0, 0, 0, 0]), 2);
        assert_eq!(ac_depth(vec![0, 0, 0, 0, 0]), 3);
        assert_eq!(ac_depth(vec![2, 0, 0]), 3);
        assert_eq!(ac_depth(vec![2, 0, 0, 0, 0]), 3);
    }

    #[test]
    fn sort_checking() {
        let mut s = Signature::new(vec!["A".into(), "B".into()]).unwrap();
        let f = s.add_op("f", &["A"], "B").unwrap();
        let t = s.app(f, vec![Term::Var(0)]);
        assert_eq!(s.sort_of(&t, &[0]), Ok(1));
        assert!(matches!(s.sort_of(&t, &[1]), Err(RewriteError::SortMismatch { .. })));
        assert!(s.set_ac(f, None).is_err());
    }

    #[test]
    fn term_order_is_degree_lexicographic() {
        let s = monoid_sig();
        let x = Term::Var(0);
        let e = s.constant(1);
        let ix = s.app(2, vec![x.clone()]);
        let mxe = s.app(0, vec![x.clone(), e.clone()]);
        let mut v = vec![mxe.clone(), ix.clone(), e.clone(), x.clone()];
        v.sort_by(|a, b| s.cmp_terms(a, b));
        assert_eq!(v, vec![x, e, ix, mxe]);
    }
}
