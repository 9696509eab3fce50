//! Critical pairs. Unification is syntactic on flattened terms, so two AC
//! nodes unify only argument-by-argument at equal arity; for signatures with
//! AC operations this is supplemented by a bounded check of every one-step
//! divergence from small terms.

use super::enumerate::enumerate_terms;
use super::{RewriteSystem, SortId, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Rule `outer` rewritten at `position` by rule `inner`.
    Overlap { outer: usize, inner: usize, position: Vec<usize> },
    /// Two one-step successors of an enumerated term.
    Divergence,
}

/// A peak `left ← peak → right` whose sides did not reach the same normal
/// form (`None` means the budget ran out).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub origin: Origin,
    pub peak: Term,
    pub left: Term,
    pub right: Term,
    pub left_nf: Option<Term>,
    pub right_nf: Option<Term>,
}

type Subst = Vec<Option<Term>>;

fn resolve(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => match &s[*v] {
            Some(u) => resolve(u, s),
            None => t.clone(),
        },
        Term::App { op, args, depth } => {
            Term::App { op: *op, args: args.iter().map(|a| resolve(a, s)).collect(), depth: *depth }
        }
    }
}

fn occurs(v: usize, t: &Term, s: &Subst) -> bool {
    match t {
        Term::Var(w) => *w == v || s[*w].as_ref().is_some_and(|u| occurs(v, u, s)),
        Term::App { args, .. } => args.iter().any(|a| occurs(v, a, s)),
    }
}

fn unify(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let walk = |t: &Term, s: &Subst| -> Term {
        let mut t = t.clone();
        while let Term::Var(v) = t {
            match &s[v] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    };
    let (a, b) = (walk(a, s), walk(b, s));
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(*x, t, s) {
                return false;
            }
            s[*x] = Some(t.clone());
            true
        }
        (Term::App { op: f, args: xs, .. }, Term::App { op: g, args: ys, .. }) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, s))
        }
    }
}

fn shift(t: &Term, by: usize) -> Term {
    match t {
        Term::Var(v) => Term::Var(v + by),
        Term::App { op, args, depth } => {
            Term::App { op: *op, args: args.iter().map(|a| shift(a, by)).collect(), depth: *depth }
        }
    }
}

fn positions(t: &Term, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if let Term::App { args, .. } = t {
        out.push(prefix.clone());
        for (i, a) in args.iter().enumerate() {
            prefix.push(i);
            positions(a, prefix, out);
            prefix.pop();
        }
    }
}

fn at<'a>(t: &'a Term, pos: &[usize]) -> &'a Term {
    pos.iter().fold(t, |t, &i| &t.args()[i])
}

fn replace(t: &Term, pos: &[usize], with: Term) -> Term {
    match pos.split_first() {
        None => with,
        Some((&i, rest)) => {
            let Term::App { op, args, depth } = t else { unreachable!() };
            let mut args = args.clone();
            args[i] = replace(&args[i], rest, with);
            Term::App { op: *op, args, depth: *depth }
        }
    }
}

/// Unjoinable critical pairs. `depth` bounds the terms used for the extra
/// divergence check when the signature has AC operations.
pub fn local_confluence_report(r: &RewriteSystem, depth: u32) -> Vec<CriticalPair> {
    let sig = r.signature();
    let rules = r.rules();
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut consider = |origin: Origin, peak: Term, left: Term, right: Term| {
        if left == right || !seen.insert((left.clone(), right.clone())) {
            return;
        }
        let left_nf = r.nf(&left).ok();
        let right_nf = r.nf(&right).ok();
        if left_nf.is_none() || left_nf != right_nf {
            out.push(CriticalPair { origin, peak, left, right, left_nf, right_nf });
        }
    };
    for (i, outer) in rules.iter().enumerate() {
        let outer_lhs = sig.canonical(&outer.lhs);
        let outer_rhs = sig.canonical(&outer.rhs);
        let mut pos = Vec::new();
        positions(&outer_lhs, &mut Vec::new(), &mut pos);
        for (j, inner) in rules.iter().enumerate() {
            let n = outer.nvars();
            let inner_lhs = shift(&sig.canonical(&inner.lhs), n);
            let inner_rhs = shift(&sig.canonical(&inner.rhs), n);
            for p in &pos {
                if p.is_empty() && j <= i {
                    continue;
                }
                let mut s: Subst = vec![None; n + inner.nvars()];
                if !unify(at(&outer_lhs, p), &inner_lhs, &mut s) {
                    continue;
                }
                let inst = |t: &Term| sig.canonical(&resolve(t, &s));
                let peak = inst(&outer_lhs);
                let left = inst(&outer_rhs);
                let right = inst(&replace(&outer_lhs, p, inner_rhs.clone()));
                consider(Origin::Overlap { outer: i, inner: j, position: p.clone() }, peak, left, right);
            }
        }
    }
    if (0..sig.ops().len()).any(|o| sig.is_ac(o)) {
        for sort in 0..sig.sorts().len() {
            let ctx: Vec<SortId> = vec![sort; 2];
            for t in enumerate_terms(sig, &ctx, depth).into_iter().filter(|t| sig.sort_of(t, &ctx) == Ok(sort)) {
                let succ = r.one_step(&t);
                for w in succ.windows(2) {
                    consider(Origin::Divergence, t.clone(), w[0].clone(), w[1].clone());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::rewrite::normalize::tests::system;
    use crate::rewrite::Signature;

    fn monoid_sig(ac: bool) -> Signature {
        let mut s = Signature::single_sorted();
        let m = s.add_op("m", &["S", "S"], "S").unwrap();
        let e = s.add_op("e", &[], "S").unwrap();
        if ac {
            s.set_ac(m, Some(e)).unwrap();
        }
        s
    }

    #[test]
    fn monoid_rules_are_locally_confluent() {
        let r = system(monoid_sig(false), &["m(e, x) -> x", "m(x, e) -> x", "m(m(x, y), z) -> m(x, m(y, z))"]);
        assert!(local_confluence_report(&r, 2).is_empty());
    }

    #[test]
    fn missing_associativity_overlap_is_found() {
        // without the right unit, m(m(x, e), z) has two different normal forms
        let r = system(monoid_sig(false), &["m(x, e) -> x", "m(m(x, y), z) -> m(x, m(y, z))"]);
        let report = local_confluence_report(&r, 2);
        assert!(!report.is_empty());
    }

    #[test]
    fn conflicting_constants() {
        let mut s = Signature::single_sorted();
        s.add_op("f", &["S"], "S").unwrap();
        s.add_op("a", &[], "S").unwrap();
        s.add_op("b", &[], "S").unwrap();
        let r = system(s, &["f(x) -> a", "f(x) -> b"]);
        let report = local_confluence_report(&r, 1);
        assert_eq!(report.len(), 1);
        let names = ["x".to_string()];
        let sig = r.signature();
        let pair = (sig.show(&report[0].left, &names), sig.show(&report[0].right, &names));
        assert_eq!(pair, ("a".to_string(), "b".to_string()));
    }

    #[test]
    fn empty_system() {
        let r = RewriteSystem::new(Arc::new(monoid_sig(true)), vec![]).unwrap();
        assert!(local_confluence_report(&r, 2).is_empty());
    }

    #[test]
    fn idempotent_ac_is_confluent() {
        let r = system(monoid_sig(true), &["m(x, x) -> x"]);
        assert!(local_confluence_report(&r, 2).is_empty());
    }

    #[test]
    fn ac_divergence_is_detected() {
        // m(x, x) -> e and m(x, x) -> x disagree on m(a, a)
        let r = system(monoid_sig(true), &["m(x, x) -> x", "m(x, x, y) -> e"]);
        assert!(!local_confluence_report(&r, 2).is_empty());
    }
}
