//! Rules, rewrite systems and innermost normalization.

use std::sync::Arc;

use super::matching::match_term;
use super::{default_names, RewriteError, Signature, SortId, Term};

pub const DEFAULT_BUDGET: usize = 10_000;

/// An oriented equation `lhs → rhs`; variables index `var_names`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub var_names: Vec<String>,
    pub var_sorts: Vec<SortId>,
}

impl Rule {
    pub fn nvars(&self) -> usize {
        self.var_names.len()
    }
}

/// A rule as used for matching: AC-rooted rules also get an extension
/// variable so they apply to any sub-multiset of a flattened node.
#[derive(Clone, Debug)]
struct Prepared {
    rule: usize,
    lhs: Term,
    rhs: Term,
    nvars: usize,
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    sig: Arc<Signature>,
    rules: Vec<Rule>,
    prepared: Vec<Prepared>,
}

/// One root rewrite inside a normalization, replayable with
/// [`RewriteSystem::check_step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: usize,
    pub redex: Term,
    pub contractum: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub term: Term,
    pub steps: usize,
    pub trace: Option<Vec<Step>>,
}

struct Run {
    steps: usize,
    budget: usize,
    trace: Option<Vec<Step>>,
}

impl RewriteSystem {
    pub fn new(sig: Arc<Signature>, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        let mut prepared = Vec::new();
        for (i, r) in rules.iter().enumerate() {
            let show = || format!("{} -> {}", sig.show(&r.lhs, &r.var_names), sig.show(&r.rhs, &r.var_names));
            if r.lhs.is_var() {
                return Err(RewriteError::VariableLhs(show()));
            }
            let lv = r.lhs.vars();
            if r.rhs.vars().iter().any(|v| !lv.contains(v)) {
                return Err(RewriteError::FreshRhsVariable(show()));
            }
            let (ls, rs) = (sig.sort_of(&r.lhs, &r.var_sorts)?, sig.sort_of(&r.rhs, &r.var_sorts)?);
            if ls != rs {
                return Err(RewriteError::SortMismatch {
                    expected: sig.sorts()[ls].clone(),
                    found: sig.sorts()[rs].clone(),
                });
            }
            let (lhs, rhs) = (sig.canonical(&r.lhs), sig.canonical(&r.rhs));
            if lhs.is_var() {
                return Err(RewriteError::VariableLhs(show()));
            }
            let n = r.nvars();
            prepared.push(Prepared { rule: i, lhs: lhs.clone(), rhs: rhs.clone(), nvars: n });
            if let Term::App { op, args, .. } = &lhs {
                if sig.is_ac(*op) {
                    let mut ext = args.clone();
                    ext.push(Term::Var(n));
                    prepared.push(Prepared {
                        rule: i,
                        lhs: sig.app(*op, ext),
                        rhs: sig.app(*op, vec![rhs, Term::Var(n)]),
                        nvars: n + 1,
                    });
                }
            }
        }
        Ok(RewriteSystem { sig, rules, prepared })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// First rewrite at the root, if any.
    fn rewrite_root(&self, t: &Term) -> Option<(usize, Term)> {
        for p in &self.prepared {
            if let Some(b) = match_term(&self.sig, &p.lhs, t, p.nvars).into_iter().next() {
                let b: Vec<Term> = b.into_iter().map(|x| x.expect("rhs variables occur in lhs")).collect();
                return Some((p.rule, self.sig.substitute(&p.rhs, &b).expect("bound")));
            }
        }
        None
    }

    fn norm(&self, t: &Term, run: &mut Run) -> Result<Term, Term> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App { op, args, .. } => {
                let mut nargs = Vec::with_capacity(args.len());
                for a in args {
                    nargs.push(self.norm(a, run)?);
                }
                let cur = self.sig.app(*op, nargs);
                match self.rewrite_root(&cur) {
                    None => Ok(cur),
                    Some((rule, next)) => {
                        run.steps += 1;
                        if run.steps > run.budget {
                            return Err(next);
                        }
                        if let Some(tr) = &mut run.trace {
                            tr.push(Step { rule, redex: cur, contractum: next.clone() });
                        }
                        self.norm(&next, run)
                    }
                }
            }
        }
    }

    /// Innermost normalization: arguments first, then the canonicalized
    /// node, repeated until no rule applies.
    pub fn normalize(&self, t: &Term, budget: usize) -> Result<NormalForm, RewriteError> {
        self.run(t, budget, false)
    }

    pub fn normalize_traced(&self, t: &Term, budget: usize) -> Result<NormalForm, RewriteError> {
        self.run(t, budget, true)
    }

    fn run(&self, t: &Term, budget: usize, traced: bool) -> Result<NormalForm, RewriteError> {
        let mut run = Run { steps: 0, budget, trace: traced.then(Vec::new) };
        let t = self.sig.canonical(t);
        match self.norm(&t, &mut run) {
            Ok(term) => Ok(NormalForm { term, steps: run.steps, trace: run.trace }),
            Err(partial) => {
                let names = default_names(partial.max_var().map_or(0, |v| v + 1));
                Err(RewriteError::BudgetExceeded { budget, partial: self.sig.show(&partial, &names) })
            }
        }
    }

    /// Normal form under the default budget.
    pub fn nf(&self, t: &Term) -> Result<Term, RewriteError> {
        self.normalize(t, DEFAULT_BUDGET).map(|n| n.term)
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App { args, .. } => args.iter().all(|a| self.is_normal(a)) && self.rewrite_root(t).is_none(),
        }
    }

    /// Whether `step` is an instance of its rule.
    pub fn check_step(&self, step: &Step) -> bool {
        self.prepared.iter().filter(|p| p.rule == step.rule).any(|p| {
            match_term(&self.sig, &p.lhs, &step.redex, p.nvars).into_iter().any(|b| {
                let b: Vec<Term> = b.into_iter().map(|x| x.unwrap()).collect();
                self.sig.substitute(&p.rhs, &b).as_ref() == Ok(&step.contractum)
            })
        })
    }

    /// Every term reachable by one rewrite at any position.
    pub fn one_step(&self, t: &Term) -> Vec<Term> {
        let mut out = Vec::new();
        let Term::App { op, args, .. } = t else { return out };
        for p in &self.prepared {
            for b in match_term(&self.sig, &p.lhs, t, p.nvars) {
                let b: Vec<Term> = b.into_iter().map(|x| x.unwrap()).collect();
                out.push(self.sig.substitute(&p.rhs, &b).unwrap());
            }
        }
        for (i, a) in args.iter().enumerate() {
            for r in self.one_step(a) {
                let mut nargs = args.clone();
                nargs[i] = r;
                out.push(self.sig.app(*op, nargs));
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|x| seen.insert(x.clone()));
        out
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rewrite::parse_term;

    pub(crate) fn system(sig: Signature, rules: &[&str]) -> RewriteSystem {
        let sig = Arc::new(sig);
        let rules = rules
            .iter()
            .map(|r| {
                let (l, rr) = r.split_once("->").unwrap();
                let mut names = Vec::new();
                let lhs = parse_term(&sig, l, &mut names).unwrap();
                let rhs = parse_term(&sig, rr, &mut names).unwrap();
                let var_sorts = vec![0; names.len()];
                Rule { lhs, rhs, var_names: names, var_sorts }
            })
            .collect();
        RewriteSystem::new(sig, rules).unwrap()
    }

    fn monoid() -> RewriteSystem {
        let mut s = Signature::single_sorted();
        s.add_op("m", &["S", "S"], "S").unwrap();
        s.add_op("e", &[], "S").unwrap();
        s.add_op("inv", &["S"], "S").unwrap();
        s.add_op("a", &[], "S").unwrap();
        system(s, &["m(e, x) -> x", "m(x, e) -> x", "m(m(x, y), z) -> m(x, m(y, z))", "m(x, inv(x)) -> e"])
    }

    /// Breadth-first search over all rewrite sequences.
    fn exhaustive_normal_forms(r: &RewriteSystem, t: &Term) -> Vec<Term> {
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![t.clone()];
        let mut nfs = Vec::new();
        while let Some(u) = frontier.pop() {
            if !seen.insert(u.clone()) {
                continue;
            }
            let next = r.one_step(&u);
            if next.is_empty() {
                nfs.push(u);
            }
            frontier.extend(next);
        }
        nfs
    }

    #[test]
    fn inverse_rule_fires() {
        let r = monoid();
        let t = parse_term(r.signature(), "m(a, inv(a))", &mut vec![]).unwrap();
        assert_eq!(r.signature().show(&r.nf(&t).unwrap(), &[]), "e");
    }

    #[test]
    fn unit_rule_twice_matches_oracle() {
        let r = monoid();
        let t = parse_term(r.signature(), "m(e, m(e, a))", &mut vec![]).unwrap();
        let nf = r.normalize_traced(&t, 100).unwrap();
        assert_eq!(r.signature().show(&nf.term, &[]), "a");
        assert_eq!(nf.steps, 2);
        assert!(nf.trace.unwrap().iter().all(|s| r.check_step(s)));
        assert_eq!(exhaustive_normal_forms(&r, &t), vec![nf.term]);
    }

    #[test]
    fn normal_term_takes_no_steps() {
        let r = monoid();
        let t = parse_term(r.signature(), "m(a, m(a, a))", &mut vec![]).unwrap();
        let nf = r.normalize(&t, 100).unwrap();
        assert_eq!((nf.term, nf.steps), (t, 0));
    }

    #[test]
    fn budget_is_enforced() {
        let mut s = Signature::single_sorted();
        s.add_op("f", &["S"], "S").unwrap();
        s.add_op("a", &[], "S").unwrap();
        let r = system(s, &["a -> f(a)"]);
        let t = r.signature().constant(1);
        assert!(matches!(r.normalize(&t, 50), Err(RewriteError::BudgetExceeded { budget: 50, .. })));
    }

    #[test]
    fn ac_rules_apply_to_sub_multisets() {
        let mut s = Signature::single_sorted();
        let m = s.add_op("m", &["S", "S"], "S").unwrap();
        let e = s.add_op("e", &[], "S").unwrap();
        s.set_ac(m, Some(e)).unwrap();
        let r = system(s, &["m(x, x) -> x"]);
        let sig = r.signature().clone();
        let t = parse_term(&sig, "m(y, m(x, y))", &mut vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(sig.show(&r.nf(&t).unwrap(), &["x".into(), "y".into()]), "m(x, y)");
        let u = parse_term(&sig, "m(x, m(y, x))", &mut vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(r.nf(&t).unwrap(), r.nf(&u).unwrap());
    }

    #[test]
    fn rejects_bad_rules() {
        let mut s = Signature::single_sorted();
        s.add_op("f", &["S"], "S").unwrap();
        let sig = Arc::new(s);
        let fx = sig.app(0, vec![Term::Var(0)]);
        let var_lhs = Rule { lhs: Term::Var(0), rhs: fx.clone(), var_names: vec!["x".into()], var_sorts: vec![0] };
        assert!(matches!(RewriteSystem::new(sig.clone(), vec![var_lhs]), Err(RewriteError::VariableLhs(_))));
        let fresh = Rule {
            lhs: fx,
            rhs: Term::Var(1),
            var_names: vec!["x".into(), "y".into()],
            var_sorts: vec![0, 0],
        };
        assert!(matches!(RewriteSystem::new(sig, vec![fresh]), Err(RewriteError::FreshRhsVariable(_))));
    }
}
