//! Theory morphisms given by interpreting each source operation as a target
//! term.
//!
//! Map files list `sort A = B` lines (optional when both theories are
//! single-sorted) and one `op(x, y) = term` line per source operation:
//!
//! ```text
//! m(x, y) = x
//! e = *
//! ```

use std::sync::Arc;

use serde::Serialize;

use super::{TheoryError, TheoryPresentation};
use crate::rewrite::{default_names, parse_term, SortId, Term};

#[derive(Clone, Debug)]
pub struct TheoryMorphism {
    pub source: Arc<TheoryPresentation>,
    pub target: Arc<TheoryPresentation>,
    pub sort_map: Vec<SortId>,
    /// Image of each source operation, a target term over its arguments.
    pub op_map: Vec<Term>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismFailure {
    pub equation: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismVerdict {
    pub valid: bool,
    pub checked: usize,
    pub failure: Option<MorphismFailure>,
}

impl TheoryMorphism {
    pub fn new(
        source: Arc<TheoryPresentation>,
        target: Arc<TheoryPresentation>,
        sort_map: Vec<SortId>,
        op_map: Vec<Term>,
    ) -> Result<Self, TheoryError> {
        let (ss, ts) = (source.signature(), target.signature());
        if sort_map.len() != ss.sorts().len() || sort_map.iter().any(|&s| s >= ts.sorts().len()) {
            return Err(TheoryError::BadMorphism("sort map must send every source sort to a target sort".into()));
        }
        if op_map.len() != ss.ops().len() {
            return Err(TheoryError::BadMorphism("every source operation needs an image".into()));
        }
        for (op, img) in op_map.iter().enumerate() {
            let d = ss.op(op);
            let ctx: Vec<SortId> = d.args.iter().map(|&s| sort_map[s]).collect();
            let got = ts.sort_of(img, &ctx)?;
            if got != sort_map[d.result] {
                return Err(TheoryError::BadMorphism(format!(
                    "image of `{}` has sort {}, expected {}",
                    d.name,
                    ts.sorts()[got],
                    ts.sorts()[sort_map[d.result]]
                )));
            }
        }
        let op_map = op_map.iter().map(|t| ts.canonical(t)).collect();
        Ok(TheoryMorphism { source, target, sort_map, op_map })
    }

    /// Identity on a theory.
    pub fn identity(t: Arc<TheoryPresentation>) -> Self {
        let sig = t.signature().clone();
        let op_map = (0..sig.ops().len())
            .map(|op| {
                let n = if sig.is_ac(op) { 2 } else { sig.op(op).args.len() };
                sig.app(op, (0..n).map(Term::Var).collect())
            })
            .collect();
        let sort_map = (0..sig.sorts().len()).collect();
        TheoryMorphism { source: t.clone(), target: t, sort_map, op_map }
    }

    pub fn parse(source: Arc<TheoryPresentation>, target: Arc<TheoryPresentation>, src: &str) -> Result<Self, TheoryError> {
        let (ss, ts) = (source.signature().clone(), target.signature().clone());
        let mut sort_map: Vec<Option<SortId>> = vec![None; ss.sorts().len()];
        if ss.sorts().len() == 1 && ts.sorts().len() == 1 {
            sort_map[0] = Some(0);
        }
        let mut op_map: Vec<Option<Term>> = vec![None; ss.ops().len()];
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| TheoryError::Syntax { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix("sort ") {
                let (a, b) = rest.split_once('=').ok_or_else(|| syntax("expected `sort A = B`".into()))?;
                let a = ss.sort_id(a.trim()).map_err(|e| syntax(e.to_string()))?;
                sort_map[a] = Some(ts.sort_id(b.trim()).map_err(|e| syntax(e.to_string()))?);
                continue;
            }
            let (l, r) = line.split_once('=').ok_or_else(|| syntax("expected `op(args) = term`".into()))?;
            let mut names = Vec::new();
            let lhs = parse_term(&ss, l.trim(), &mut names).map_err(|e| syntax(e.to_string()))?;
            let Term::App { op, args, .. } = &lhs else {
                return Err(syntax("left side must be an operation applied to variables".into()));
            };
            let distinct = args.iter().enumerate().all(|(k, a)| *a == Term::Var(k));
            if !distinct || args.len() != ss.op(*op).args.len() {
                return Err(syntax("left side must apply the operation to distinct variables".into()));
            }
            let rhs = parse_term(&ts, r.trim(), &mut names).map_err(|e| syntax(e.to_string()))?;
            if names.len() > args.len() {
                return Err(syntax(format!("unknown name `{}` on the right", names[args.len()])));
            }
            op_map[*op] = Some(rhs);
        }
        let sort_map = sort_map
            .into_iter()
            .enumerate()
            .map(|(s, m)| m.ok_or_else(|| TheoryError::BadMorphism(format!("no image for sort `{}`", ss.sorts()[s]))))
            .collect::<Result<Vec<_>, _>>()?;
        let op_map = op_map
            .into_iter()
            .enumerate()
            .map(|(o, m)| m.ok_or_else(|| TheoryError::BadMorphism(format!("no image for `{}`", ss.op(o).name))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, sort_map, op_map)
    }

    /// Image of a source term (not normalized). Flattened AC nodes are
    /// translated as left-nested binary applications.
    pub fn translate(&self, t: &Term) -> Term {
        let ts = self.target.signature();
        match t {
            Term::Var(v) => Term::Var(*v),
            Term::App { op, args, .. } => {
                let args: Vec<Term> = args.iter().map(|a| self.translate(a)).collect();
                let img = &self.op_map[*op];
                if self.source.signature().is_ac(*op) && args.len() > 2 {
                    let mut it = args.into_iter();
                    let first = it.next().unwrap();
                    it.fold(first, |acc, a| ts.substitute(img, &[acc, a]).expect("binary image"))
                } else {
                    ts.substitute(img, &args).expect("image arity")
                }
            }
        }
    }

    pub fn translate_sorts(&self, ctx: &[SortId]) -> Vec<SortId> {
        ctx.iter().map(|&s| self.sort_map[s]).collect()
    }
}

/// Translates every source equation (rules and AC axioms) and compares the
/// target normal forms of both sides.
pub fn check_theory_morphism(g: &TheoryMorphism) -> Result<MorphismVerdict, TheoryError> {
    let ts = g.target.signature();
    let mut checked = 0;
    for eq in g.source.equations() {
        checked += 1;
        let l = g.target.nf(&g.translate(&eq.lhs))?;
        let r = g.target.nf(&g.translate(&eq.rhs))?;
        if l != r {
            let names = default_names(eq.ctx.len());
            let failure = MorphismFailure { equation: eq.label, left: ts.show(&l, &names), right: ts.show(&r, &names) };
            return Ok(MorphismVerdict { valid: false, checked, failure: Some(failure) });
        }
    }
    Ok(MorphismVerdict { valid: true, checked, failure: None })
}
