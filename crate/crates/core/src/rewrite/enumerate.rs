//! Bounded enumeration of terms and of normal forms by nesting depth.

use std::collections::HashSet;

use super::{RewriteSystem, Signature, SortId, Term};

/// Grows the set of terms of depth `≤ d` from those of depth `≤ d - 1`.
/// Every new term has an argument in `frontier` (the terms of depth exactly
/// `d - 1`); `keep` filters candidates.
fn grow(
    sig: &Signature,
    by_sort: &[Vec<Term>],
    frontier: &HashSet<Term>,
    d: u32,
    seen: &mut HashSet<Term>,
    keep: &dyn Fn(&Term) -> bool,
) -> Vec<Term> {
    let mut out = Vec::new();
    for (op, decl) in sig.ops().iter().enumerate() {
        if decl.args.is_empty() {
            continue;
        }
        let pools: Vec<&Vec<Term>> = decl.args.iter().map(|&s| &by_sort[s]).collect();
        if pools.iter().any(|p| p.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; pools.len()];
        'tuples: loop {
            let args: Vec<&Term> = idx.iter().zip(&pools).map(|(&i, p)| &p[i]).collect();
            let commutative_dup = sig.is_ac(op) && idx[0] > idx[1];
            if !commutative_dup && args.iter().any(|a| frontier.contains(*a)) {
                let t = sig.app(op, args.into_iter().cloned().collect());
                if t.depth() <= d && !seen.contains(&t) && keep(&t) {
                    seen.insert(t.clone());
                    out.push(t);
                }
            }
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < pools[k].len() {
                    continue 'tuples;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    out
}

fn leaves(sig: &Signature, ctx: &[SortId]) -> Vec<Term> {
    let vars = (0..ctx.len()).map(Term::Var);
    let consts = sig.constants().map(|c| sig.constant(c));
    vars.chain(consts).collect()
}

fn result_sort(sig: &Signature, ctx: &[SortId], t: &Term) -> SortId {
    match t {
        Term::Var(v) => ctx[*v],
        Term::App { op, .. } => sig.op(*op).result,
    }
}

struct Levels {
    by_sort: Vec<Vec<Term>>,
    /// Number of terms added at each depth.
    added: Vec<usize>,
}

fn levels(sig: &Signature, ctx: &[SortId], depth: u32, keep: &dyn Fn(&Term) -> bool) -> Levels {
    let mut by_sort = vec![Vec::new(); sig.sorts().len()];
    let mut seen = HashSet::new();
    let mut frontier = HashSet::new();
    for t in leaves(sig, ctx) {
        if keep(&t) && seen.insert(t.clone()) {
            by_sort[result_sort(sig, ctx, &t)].push(t.clone());
            frontier.insert(t);
        }
    }
    let mut added = vec![frontier.len()];
    for d in 1..=depth {
        if frontier.is_empty() {
            added.push(0);
            continue;
        }
        let new = grow(sig, &by_sort, &frontier, d, &mut seen, keep);
        added.push(new.len());
        frontier = new.iter().cloned().collect();
        for t in new {
            by_sort[result_sort(sig, ctx, &t)].push(t);
        }
    }
    for l in &mut by_sort {
        l.sort_by(|a, b| sig.cmp_terms(a, b));
    }
    Levels { by_sort, added }
}

/// All canonical terms over `ctx` of depth `≤ depth`, in term order.
pub fn enumerate_terms(sig: &Signature, ctx: &[SortId], depth: u32) -> Vec<Term> {
    let mut all: Vec<Term> = levels(sig, ctx, depth, &|_| true).by_sort.into_iter().flatten().collect();
    all.sort_by(|a, b| sig.cmp_terms(a, b));
    all
}

/// Normal forms of depth `≤ depth` over a context, per result sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForms {
    pub by_sort: Vec<Vec<Term>>,
    pub depth: u32,
    /// No normal form of depth `depth + 1` exists, hence none deeper: the
    /// lists are the complete sets of normal forms.
    pub saturated: bool,
}

/// Subterms of normal forms are normal (also every sub-multiset of a
/// flattened AC node), so normal forms are built from normal arguments and
/// filtered rather than normalized.
pub fn enumerate_normal_forms(r: &RewriteSystem, ctx: &[SortId], depth: u32) -> NormalForms {
    let sig = r.signature();
    let lv = levels(sig, ctx, depth + 1, &|t| r.is_normal(t));
    let saturated = lv.added[depth as usize + 1] == 0;
    let by_sort = lv.by_sort.into_iter().map(|l| l.into_iter().filter(|t| t.depth() <= depth).collect()).collect();
    NormalForms { by_sort, depth, saturated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::normalize::tests::system;

    fn monoid_sig(ac: bool) -> Signature {
        let mut s = Signature::single_sorted();
        let m = s.add_op("m", &["S", "S"], "S").unwrap();
        let e = s.add_op("e", &[], "S").unwrap();
        if ac {
            s.set_ac(m, Some(e)).unwrap();
        }
        s
    }

    fn show_all(sig: &Signature, ts: &[Term]) -> Vec<String> {
        let names = crate::rewrite::default_names(2);
        ts.iter().map(|t| sig.show(t, &names)).collect()
    }

    #[test]
    fn only_variables_without_operations() {
        let s = Signature::single_sorted();
        for d in 0..4 {
            assert_eq!(show_all(&s, &enumerate_terms(&s, &[0, 0], d)), ["x", "y"]);
        }
    }

    #[test]
    fn monoid_depth_one_has_six_raw_terms() {
        let s = monoid_sig(false);
        let ts = enumerate_terms(&s, &[0], 1);
        assert_eq!(ts.len(), 6);
        let names = ["x".to_string()];
        let shown: Vec<String> = ts.iter().map(|t| s.show(t, &names)).collect();
        for want in ["x", "e", "m(x, x)", "m(x, e)", "m(e, x)", "m(e, e)"] {
            assert!(shown.contains(&want.to_string()), "{want}");
        }
        assert_eq!(enumerate_terms(&s, &[0], 0).len(), 2);
    }

    fn brute_raw(sig: &Signature, ctx: &[SortId], depth: u32) -> HashSet<Term> {
        // every binary bracketing, canonicalized afterwards
        let mut level: HashSet<Term> = leaves(sig, ctx).into_iter().collect();
        for _ in 0..depth {
            let cur: Vec<Term> = level.iter().cloned().collect();
            for (op, decl) in sig.ops().iter().enumerate() {
                if decl.args.len() == 1 {
                    for a in &cur {
                        level.insert(sig.app(op, vec![a.clone()]));
                    }
                } else if decl.args.len() == 2 {
                    for a in &cur {
                        for b in &cur {
                            level.insert(sig.app(op, vec![a.clone(), b.clone()]));
                        }
                    }
                }
            }
        }
        level
    }

    #[test]
    fn frontier_growth_matches_brute_force() {
        for ac in [false, true] {
            let mut s = monoid_sig(ac);
            s.add_op("i", &["S"], "S").unwrap();
            for d in 0..3 {
                let fast: HashSet<Term> = enumerate_terms(&s, &[0, 0], d).into_iter().collect();
                assert_eq!(fast, brute_raw(&s, &[0, 0], d), "ac={ac} d={d}");
            }
        }
    }

    #[test]
    fn pointed_set_saturates_at_zero() {
        let mut s = Signature::single_sorted();
        s.add_op("p", &[], "S").unwrap();
        let r = system(s, &[]);
        let nf = enumerate_normal_forms(&r, &[0], 0);
        assert!(nf.saturated);
        assert_eq!(nf.by_sort[0].len(), 2);
    }

    #[test]
    fn monoid_normal_forms_are_powers() {
        let r = system(monoid_sig(false), &["m(e, x) -> x", "m(x, e) -> x", "m(m(x, y), z) -> m(x, m(y, z))"]);
        let nf = enumerate_normal_forms(&r, &[0], 3);
        assert!(!nf.saturated);
        // e, x, x², x³, x⁴ as right combs
        assert_eq!(nf.by_sort[0].len(), 5);
    }

    #[test]
    fn semilattice_normal_forms_are_subsets() {
        let r = system(monoid_sig(true), &["m(x, x) -> x"]);
        for n in 0..4 {
            let nf = enumerate_normal_forms(&r, &vec![0; n], n as u32);
            assert!(nf.saturated);
            assert_eq!(nf.by_sort[0].len(), 1 << n);
        }
    }

    #[test]
    fn normal_forms_match_normalized_raw_terms() {
        let r = system(monoid_sig(false), &["m(e, x) -> x", "m(x, e) -> x", "m(m(x, y), z) -> m(x, m(y, z))"]);
        let sig = r.signature();
        let nf: HashSet<Term> = enumerate_normal_forms(&r, &[0, 0], 2).by_sort[0].iter().cloned().collect();
        let raw: HashSet<Term> = enumerate_terms(sig, &[0, 0], 3)
            .iter()
            .map(|t| r.nf(t).unwrap())
            .filter(|t| t.depth() <= 2)
            .collect();
        assert_eq!(nf, raw);
    }
}
