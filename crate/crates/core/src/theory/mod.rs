//! Finitely presented finite-product theories. Objects are sort contexts and
//! morphisms are tuples of normal forms; a single-sorted presentation is a
//! Lawvere theory with objects `0, 1, 2, …`.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! theory monoid
//! sort S
//! op m : S S -> S
//! op e : -> S
//! ac m unit e
//! rule m(e, x) -> x
//! ```
//!
//! With no `sort` line the single sort `S` is assumed.

mod builtins;
mod hom;
mod morphism;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rewrite::{
    local_confluence_report, parse_term, RewriteError, RewriteSystem, Rule, Signature, SortId, Term,
};

pub use builtins::{builtin, builtin_source, BUILTINS};
pub use hom::{compose_hom, finite_product_check, hom_enumerate, HomSet, ProductVerdict, TheoryHom, MAX_HOMS};
pub use morphism::{check_theory_morphism, MorphismFailure, MorphismVerdict, TheoryMorphism};

/// Depth of the divergence check run when a presentation is loaded.
pub const CONFLUENCE_DEPTH: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("rules are not locally confluent; unjoinable: {}", .0.join("; "))]
    NotConfluent(Vec<String>),
    #[error("rule `{0}` cannot be oriented; declare the operation `ac` instead")]
    Unorientable(String),
    #[error("confluence check was waived for this theory")]
    UnsafeTheory,
    #[error("context mismatch: expected {expected}, found {found}")]
    ContextMismatch { expected: String, found: String },
    #[error("{0}")]
    BadMorphism(String),
    #[error("enumeration would produce {0} elements")]
    TooLarge(u128),
    #[error("theory `{0}` is not single-sorted")]
    NotSingleSorted(String),
}

/// An equation `lhs = rhs` in a context, kept unnormalized (AC axioms are
/// stated with raw binary nodes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub label: String,
    pub lhs: Term,
    pub rhs: Term,
    pub ctx: Vec<SortId>,
}

#[derive(Clone, Debug)]
pub struct TheoryPresentation {
    name: String,
    sig: Arc<Signature>,
    rules: RewriteSystem,
    waived: bool,
}

impl PartialEq for TheoryPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.sig == other.sig && self.rules.rules() == other.rules.rules()
    }
}

impl Eq for TheoryPresentation {}

impl TheoryPresentation {
    /// Builds a presentation and runs the load-time checks: orientability
    /// and local confluence (unless `allow_unsafe`).
    pub fn new(name: &str, sig: Signature, rules: Vec<Rule>, allow_unsafe: bool) -> Result<Self, TheoryError> {
        let sig = Arc::new(sig);
        for r in &rules {
            let (l, rr) = (sig.canonical(&r.lhs), sig.canonical(&r.rhs));
            if is_renaming(&l, &rr, &mut vec![None; r.nvars()]) {
                let show = format!("{} -> {}", sig.show(&r.lhs, &r.var_names), sig.show(&r.rhs, &r.var_names));
                return Err(TheoryError::Unorientable(show));
            }
        }
        let rules = RewriteSystem::new(sig.clone(), rules)?;
        let report = local_confluence_report(&rules, CONFLUENCE_DEPTH);
        if !report.is_empty() && !allow_unsafe {
            let names = crate::rewrite::default_names(4);
            let shown = report
                .iter()
                .map(|c| {
                    let side = |t: &Option<Term>| t.as_ref().map_or("?".into(), |t| sig.show(t, &names));
                    format!("{} vs {}", side(&c.left_nf), side(&c.right_nf))
                })
                .collect();
            return Err(TheoryError::NotConfluent(shown));
        }
        Ok(TheoryPresentation { name: name.into(), sig, rules, waived: !report.is_empty() })
    }

    pub fn parse(src: &str, allow_unsafe: bool) -> Result<Self, TheoryError> {
        let mut name = "unnamed".to_string();
        let mut sorts = Vec::new();
        let mut ops: Vec<(usize, String, Vec<String>, String)> = Vec::new();
        let mut acs: Vec<(usize, String, Option<String>)> = Vec::new();
        let mut rules: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| TheoryError::Syntax { line: line_no, msg: msg.into() };
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "theory" => name = rest.to_string(),
                "sort" => sorts.extend(rest.split_whitespace().map(String::from)),
                "op" => {
                    let (n, ty) = rest.split_once(':').ok_or_else(|| syntax("expected `op NAME : SORTS -> SORT`"))?;
                    let (args, res) = ty.split_once("->").ok_or_else(|| syntax("missing `->` in operation type"))?;
                    let res = res.trim();
                    if n.trim().is_empty() || res.is_empty() || res.contains(char::is_whitespace) {
                        return Err(syntax("malformed operation declaration"));
                    }
                    ops.push((line_no, n.trim().into(), args.split_whitespace().map(String::from).collect(), res.into()));
                }
                "ac" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    match words.as_slice() {
                        [op] => acs.push((line_no, op.to_string(), None)),
                        [op, "unit", u] => acs.push((line_no, op.to_string(), Some(u.to_string()))),
                        _ => return Err(syntax("expected `ac OP` or `ac OP unit CONST`")),
                    }
                }
                "rule" => {
                    let (l, r) = rest.split_once("->").ok_or_else(|| syntax("expected `rule LHS -> RHS`"))?;
                    rules.push((line_no, l.trim().into(), r.trim().into()));
                }
                other => return Err(syntax(&format!("unknown declaration `{other}`"))),
            }
        }
        if sorts.is_empty() {
            sorts.push("S".into());
        }
        let at = |line: usize| move |e: RewriteError| TheoryError::Syntax { line, msg: e.to_string() };
        let mut sig = Signature::new(sorts).map_err(at(1))?;
        for (line, n, args, res) in &ops {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            sig.add_op(n, &args, res).map_err(at(*line))?;
        }
        for (line, op, unit) in &acs {
            let id = sig.op_id(op).ok_or_else(|| at(*line)(RewriteError::UnknownOp(op.clone())))?;
            let unit = match unit {
                Some(u) => Some(sig.op_id(u).ok_or_else(|| at(*line)(RewriteError::UnknownOp(u.clone())))?),
                None => None,
            };
            sig.set_ac(id, unit).map_err(at(*line))?;
        }
        let mut parsed = Vec::new();
        for (line, l, r) in &rules {
            let mut names = Vec::new();
            let lhs = parse_term(&sig, l, &mut names).map_err(at(*line))?;
            let rhs = parse_term(&sig, r, &mut names).map_err(at(*line))?;
            let var_sorts = infer_sorts(&sig, &[&lhs, &rhs], names.len()).map_err(at(*line))?;
            parsed.push(Rule { lhs, rhs, var_names: names, var_sorts });
        }
        Self::new(&name, sig, parsed, allow_unsafe)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn rules(&self) -> &RewriteSystem {
        &self.rules
    }

    /// Whether loading skipped a failed confluence check.
    pub fn is_waived(&self) -> bool {
        self.waived
    }

    pub fn is_single_sorted(&self) -> bool {
        self.sig.sorts().len() == 1
    }

    /// The Lawvere object `n`: `n` copies of the only sort.
    pub fn power(&self, n: usize) -> Result<Vec<SortId>, TheoryError> {
        if !self.is_single_sorted() {
            return Err(TheoryError::NotSingleSorted(self.name.clone()));
        }
        Ok(vec![0; n])
    }

    pub fn nf(&self, t: &Term) -> Result<Term, TheoryError> {
        Ok(self.rules.nf(t)?)
    }

    /// Every equation a model must satisfy: the rules, plus commutativity,
    /// associativity and the unit law for each AC operation.
    pub fn equations(&self) -> Vec<Equation> {
        let sig = &self.sig;
        let mut out: Vec<Equation> = self
            .rules
            .rules()
            .iter()
            .map(|r| Equation {
                label: format!("{} = {}", sig.show(&r.lhs, &r.var_names), sig.show(&r.rhs, &r.var_names)),
                lhs: r.lhs.clone(),
                rhs: r.rhs.clone(),
                ctx: r.var_sorts.clone(),
            })
            .collect();
        for op in 0..sig.ops().len() {
            let Some(ac) = sig.ac(op) else { continue };
            let s = sig.op(op).result;
            let name = &sig.op(op).name;
            let raw = |a: Term, b: Term| {
                let depth = a.depth().max(b.depth()) + 1;
                Term::App { op, args: vec![a, b], depth }
            };
            let (x, y, z) = (Term::Var(0), Term::Var(1), Term::Var(2));
            out.push(Equation {
                label: format!("{name}(x, y) = {name}(y, x)"),
                lhs: raw(x.clone(), y.clone()),
                rhs: raw(y.clone(), x.clone()),
                ctx: vec![s; 2],
            });
            out.push(Equation {
                label: format!("{name}({name}(x, y), z) = {name}(x, {name}(y, z))"),
                lhs: raw(raw(x.clone(), y.clone()), z.clone()),
                rhs: raw(x.clone(), raw(y, z)),
                ctx: vec![s; 3],
            });
            if let Some(u) = ac.unit {
                out.push(Equation {
                    label: format!("{name}({}, x) = x", sig.op(u).name),
                    lhs: raw(sig.constant(u), x.clone()),
                    rhs: x,
                    ctx: vec![s],
                });
            }
        }
        out
    }

    /// The text format; `parse(to_text())` reproduces the presentation.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TheoryPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = &self.sig;
        writeln!(f, "theory {}", self.name)?;
        writeln!(f, "sort {}", sig.sorts().join(" "))?;
        for d in sig.ops() {
            let args: Vec<&str> = d.args.iter().map(|&s| sig.sorts()[s].as_str()).collect();
            let sep = if args.is_empty() { "" } else { " " };
            writeln!(f, "op {} : {}{sep}-> {}", d.name, args.join(" "), sig.sorts()[d.result])?;
        }
        for op in 0..sig.ops().len() {
            if let Some(ac) = sig.ac(op) {
                match ac.unit {
                    Some(u) => writeln!(f, "ac {} unit {}", sig.op(op).name, sig.op(u).name)?,
                    None => writeln!(f, "ac {}", sig.op(op).name)?,
                }
            }
        }
        for r in self.rules.rules() {
            writeln!(f, "rule {} -> {}", sig.show(&r.lhs, &r.var_names), sig.show(&r.rhs, &r.var_names))?;
        }
        Ok(())
    }
}

/// Whether `b` is `a` with variables renamed bijectively.
fn is_renaming(a: &Term, b: &Term, map: &mut Vec<Option<usize>>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match map[*x] {
            Some(z) => z == *y,
            None if map.contains(&Some(*y)) => false,
            None => {
                map[*x] = Some(*y);
                true
            }
        },
        (Term::App { op: f, args: xs, .. }, Term::App { op: g, args: ys, .. }) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| is_renaming(x, y, map))
        }
        _ => false,
    }
}

/// Sorts of variables `0..n` from their argument positions.
pub fn infer_sorts(sig: &Signature, terms: &[&Term], n: usize) -> Result<Vec<SortId>, RewriteError> {
    fn go(sig: &Signature, t: &Term, out: &mut Vec<Option<SortId>>) -> Result<(), RewriteError> {
        if let Term::App { op, args, .. } = t {
            let d = sig.op(*op);
            for (i, a) in args.iter().enumerate() {
                let want = if sig.is_ac(*op) { d.result } else { d.args[i] };
                if let Term::Var(v) = a {
                    match out[*v] {
                        Some(s) if s != want => {
                            return Err(RewriteError::SortMismatch {
                                expected: sig.sorts()[s].clone(),
                                found: sig.sorts()[want].clone(),
                            })
                        }
                        _ => out[*v] = Some(want),
                    }
                }
                go(sig, a, out)?;
            }
        }
        Ok(())
    }
    let mut out = vec![None; n];
    for t in terms {
        go(sig, t, &mut out)?;
    }
    out.into_iter().enumerate().map(|(v, s)| if sig.sorts().len() == 1 { Ok(0) } else { s.ok_or(RewriteError::UnboundVariable(v)) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip_through_text() {
        for name in BUILTINS {
            let t = builtin(name).unwrap();
            let again = TheoryPresentation::parse(&t.to_text(), false).unwrap();
            assert_eq!(t, again, "{name}");
            assert!(!t.is_waived());
        }
    }

    #[test]
    fn commutativity_rule_is_refused() {
        let src = "op m : S S -> S\nrule m(x, y) -> m(y, x)\n";
        assert!(matches!(TheoryPresentation::parse(src, false), Err(TheoryError::Unorientable(_))));
    }

    #[test]
    fn non_confluent_rules_need_the_unsafe_flag() {
        let src = "op f : S -> S\nop a : -> S\nop b : -> S\nrule f(x) -> a\nrule f(x) -> b\n";
        assert!(matches!(TheoryPresentation::parse(src, false), Err(TheoryError::NotConfluent(_))));
        let t = TheoryPresentation::parse(src, true).unwrap();
        assert!(t.is_waived());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = TheoryPresentation::parse("op m : S S -> S\nrule m(x -> x\n", false).unwrap_err();
        assert!(matches!(err, TheoryError::Syntax { line: 2, .. }), "{err}");
        let err = TheoryPresentation::parse("sort A\nfoo\n", false).unwrap_err();
        assert!(matches!(err, TheoryError::Syntax { line: 2, .. }));
    }

    #[test]
    fn many_sorted_variables_get_sorts_from_positions() {
        let src = "sort R M\nop act : R M -> M\nop z : -> M\nrule act(r, z) -> z\n";
        let t = TheoryPresentation::parse(src, false).unwrap();
        assert_eq!(t.rules().rules()[0].var_sorts, vec![0]);
        assert!(t.power(2).is_err());
    }

    #[test]
    fn equations_include_ac_axioms() {
        let t = builtin("commutative-monoid").unwrap();
        let labels: Vec<String> = t.equations().into_iter().map(|e| e.label).collect();
        assert!(labels.contains(&"m(x, y) = m(y, x)".to_string()), "{labels:?}");
        assert!(labels.contains(&"m(e, x) = x".to_string()));
    }
}
