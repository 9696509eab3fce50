//! Backtracking search for operation tables subject to constraints that can
//! be evaluated on partially filled tables.

use std::collections::HashSet;
use std::sync::Arc;

use super::{table_args, Model, ModelError, Structure};
use crate::finset::{tuple_index, tuples};
use crate::rewrite::Term;
use crate::theory::TheoryPresentation;

/// Partially filled tables, one per operation.
pub type Partial = Vec<Vec<Option<usize>>>;

pub type Constraint<'a> = Box<dyn Fn(&Partial) -> Option<bool> + 'a>;

/// Evaluates a term against partial tables; `None` if some entry is unset.
pub fn eval_partial(t: &TheoryPresentation, carriers: &[usize], term: &Term, asg: &[usize], p: &Partial) -> Option<usize> {
    match term {
        Term::Var(v) => Some(asg[*v]),
        Term::App { op, args, .. } => {
            let radices: Vec<usize> = table_args(t, *op).iter().map(|&s| carriers[s]).collect();
            let vals = args.iter().map(|a| eval_partial(t, carriers, a, asg, p)).collect::<Option<Vec<_>>>()?;
            if t.signature().is_ac(*op) && vals.len() > 2 {
                vals[1..].iter().try_fold(vals[0], |acc, &v| p[*op][tuple_index(&radices, &[acc, v])])
            } else {
                p[*op][tuple_index(&radices, &vals)]
            }
        }
    }
}

/// Every completion of empty tables on `carriers` satisfying all
/// constraints. Fails once more than `limit` solutions are found.
pub fn search_tables(
    theory: &TheoryPresentation,
    carriers: &[usize],
    constraints: Vec<Constraint<'_>>,
    limit: usize,
) -> Result<Vec<Vec<Vec<usize>>>, ModelError> {
    let sig = theory.signature();
    let mut partial: Partial = Vec::new();
    let mut entries = Vec::new();
    for op in 0..sig.ops().len() {
        let radices: Vec<usize> = table_args(theory, op).iter().map(|&s| carriers[s]).collect();
        let len: usize = radices.iter().product();
        partial.push(vec![None; len]);
        for k in 0..len {
            entries.push((radices.len(), op, k));
        }
    }
    // constants first, then by arity, so equations close early
    entries.sort_by_key(|&(arity, op, k)| (arity, op, k));
    let options: Vec<usize> = entries.iter().map(|&(_, op, _)| carriers[sig.op(op).result]).collect();
    let mut out = Vec::new();
    let pending: Vec<&Constraint> = constraints.iter().collect();
    let ok = go(&entries, &options, 0, &mut partial, &pending, &mut out, limit);
    if !ok {
        return Err(ModelError::SearchSpaceTooLarge { candidates: out.len() as u128, bound: limit as u128 });
    }
    Ok(out)
}

fn go(
    entries: &[(usize, usize, usize)],
    options: &[usize],
    i: usize,
    p: &mut Partial,
    pending: &[&Constraint],
    out: &mut Vec<Vec<Vec<usize>>>,
    limit: usize,
) -> bool {
    let mut still = Vec::with_capacity(pending.len());
    for c in pending {
        match c(p) {
            Some(false) => return true,
            Some(true) => {}
            None => still.push(*c),
        }
    }
    if i == entries.len() {
        if out.len() == limit {
            return false;
        }
        out.push(p.iter().map(|t| t.iter().map(|v| v.unwrap()).collect()).collect());
        return true;
    }
    let (_, op, k) = entries[i];
    for v in 0..options[i] {
        p[op][k] = Some(v);
        if !go(entries, options, i + 1, p, &still, out, limit) {
            p[op][k] = None;
            return false;
        }
    }
    p[op][k] = None;
    true
}

/// All models with the given carrier sizes, in search order.
pub fn enumerate_models(theory: &Arc<TheoryPresentation>, carriers: &[usize], limit: usize) -> Result<Vec<Model>, ModelError> {
    let mut constraints: Vec<Constraint> = Vec::new();
    for eq in theory.equations() {
        let radices: Vec<usize> = eq.ctx.iter().map(|&s| carriers[s]).collect();
        for asg in tuples(&radices) {
            let (l, r) = (eq.lhs.clone(), eq.rhs.clone());
            let carriers = carriers.to_vec();
            let t = theory.clone();
            constraints.push(Box::new(move |p: &Partial| {
                let a = eval_partial(&t, &carriers, &l, &asg, p)?;
                let b = eval_partial(&t, &carriers, &r, &asg, p)?;
                Some(a == b)
            }));
        }
    }
    let tables = search_tables(theory, carriers, constraints, limit)?;
    Ok(tables
        .into_iter()
        .map(|tb| Model::new_unchecked(Structure::new(theory.clone(), carriers.to_vec(), tb).expect("search fills valid tables")))
        .collect())
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Lexicographically least table encoding over all relabelings of the
/// carriers; equal for isomorphic structures.
pub fn canonical_form(s: &Structure) -> Vec<usize> {
    let sorts = s.carriers().len();
    let mut perms: Vec<Vec<usize>> = s.carriers().iter().map(|&n| (0..n).collect()).collect();
    let mut best: Option<Vec<usize>> = None;
    let sig = s.theory().signature();
    loop {
        let mut enc = s.carriers().to_vec();
        for op in 0..sig.ops().len() {
            let args = table_args(s.theory(), op);
            let res = sig.op(op).result;
            let radices = s.radices(op);
            let mut table = vec![0; s.table(op).len()];
            for t in tuples(&radices) {
                let image: Vec<usize> = t.iter().zip(&args).map(|(&x, &so)| perms[so][x]).collect();
                table[tuple_index(&radices, &image)] = perms[res][s.apply(op, &t)];
            }
            enc.extend(table);
        }
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
        // odometer over the per-sort permutations
        let mut k = 0;
        loop {
            if k == sorts {
                return best.unwrap_or_default();
            }
            if next_permutation(&mut perms[k]) {
                break;
            }
            perms[k].sort_unstable();
            k += 1;
        }
    }
}

/// One model per isomorphism class with every carrier of size `≤ max_size`,
/// smaller carriers first. Fails once more than `limit` classes are found.
pub fn models_up_to_iso(theory: &Arc<TheoryPresentation>, max_size: usize, limit: usize) -> Result<Vec<Model>, ModelError> {
    let sorts = theory.signature().sorts().len();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for sizes in tuples(&vec![max_size + 1; sorts]) {
        for m in enumerate_models(theory, &sizes, usize::MAX)? {
            if seen.insert(canonical_form(&m)) {
                if out.len() == limit {
                    return Err(ModelError::SearchSpaceTooLarge { candidates: out.len() as u128 + 1, bound: limit as u128 });
                }
                out.push(m);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::check_model;
    use crate::models::tests::theory;

    #[test]
    fn group_tables_on_small_carriers() {
        let g = theory("group");
        assert_eq!(enumerate_models(&g, &[1], 10).unwrap().len(), 1);
        // labelled: either element may be the identity
        assert_eq!(enumerate_models(&g, &[2], 10).unwrap().len(), 2);
        // Z/3 with any identity and either orientation of the labels
        assert_eq!(enumerate_models(&g, &[3], 10).unwrap().len(), 3);
        assert_eq!(enumerate_models(&g, &[0], 10).unwrap().len(), 0);
    }

    #[test]
    fn search_agrees_with_brute_force_on_pointed_sets_and_semilattices() {
        for name in ["pointed", "semilattice", "commutative-monoid"] {
            let t = theory(name);
            for n in 0..=2usize {
                let found = enumerate_models(&t, &[n], 1000).unwrap();
                // brute force: all tables, filtered by check_model
                let lens: Vec<usize> = (0..t.signature().ops().len()).map(|op| n.pow(table_args(&t, op).len() as u32)).collect();
                let total: usize = lens.iter().map(|&l| n.pow(l as u32)).product();
                let mut count = 0;
                for code in 0..total {
                    let mut c = code;
                    let tables: Vec<Vec<usize>> = lens
                        .iter()
                        .map(|&l| {
                            (0..l)
                                .map(|_| {
                                    let v = c % n;
                                    c /= n;
                                    v
                                })
                                .collect()
                        })
                        .collect();
                    if check_model(&Structure::new(t.clone(), vec![n], tables).unwrap()).holds {
                        count += 1;
                    }
                }
                assert_eq!(found.len(), count, "{name} on {n}");
            }
        }
    }

    #[test]
    fn isomorphism_classes() {
        // groups of order ≤ 3: trivial, Z/2, Z/3
        assert_eq!(models_up_to_iso(&theory("group"), 3, 100).unwrap().len(), 3);
        // pointed sets of size 1..3
        assert_eq!(models_up_to_iso(&theory("pointed"), 3, 100).unwrap().len(), 3);
        // semilattices with bottom of size ≤ 3 are chains (two atoms need a top)
        let sl = models_up_to_iso(&theory("semilattice"), 3, 100).unwrap();
        assert_eq!(sl.iter().map(|m| m.size(0)).collect::<Vec<_>>(), [1, 2, 3]);
    }

    #[test]
    fn limit_is_enforced() {
        assert!(enumerate_models(&theory("empty"), &[3], 0).is_err());
    }
}
