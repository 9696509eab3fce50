//! Matching modulo AC on flattened terms. Pattern variables are a separate
//! namespace from subject variables.

use std::collections::HashSet;

use super::{Signature, Term};

pub type Binding = Vec<Option<Term>>;

/// Every binding of the pattern's variables (`0..nvars`) under which the
/// pattern equals `subject`, deduplicated, in discovery order.
pub fn match_term(sig: &Signature, pattern: &Term, subject: &Term, nvars: usize) -> Vec<Binding> {
    let mut out = matches(sig, pattern, subject, vec![None; nvars]);
    let mut seen = HashSet::new();
    out.retain(|b| seen.insert(b.clone()));
    out
}

fn matches(sig: &Signature, p: &Term, s: &Term, b: Binding) -> Vec<Binding> {
    match p {
        Term::Var(v) => match &b[*v] {
            Some(t) if t == s => vec![b],
            Some(_) => vec![],
            None => {
                let mut b = b;
                b[*v] = Some(s.clone());
                vec![b]
            }
        },
        Term::App { op, args: pargs, .. } => {
            let Term::App { op: sop, args: sargs, .. } = s else { return vec![] };
            if op != sop {
                return vec![];
            }
            if sig.is_ac(*op) {
                let mut used = vec![false; sargs.len()];
                let pending: Vec<&Term> = pargs.iter().collect();
                ac_matches(sig, *op, &pending, sargs, &mut used, b)
            } else {
                if pargs.len() != sargs.len() {
                    return vec![];
                }
                let mut current = vec![b];
                for (pa, sa) in pargs.iter().zip(sargs) {
                    current = current.into_iter().flat_map(|b| matches(sig, pa, sa, b)).collect();
                    if current.is_empty() {
                        break;
                    }
                }
                current
            }
        }
    }
}

/// Matches the multiset `pending` against the unused subject arguments,
/// consuming all of them. Non-variable patterns take one argument each;
/// variables take a non-empty sub-multiset.
fn ac_matches(
    sig: &Signature,
    op: usize,
    pending: &[&Term],
    sargs: &[Term],
    used: &mut Vec<bool>,
    b: Binding,
) -> Vec<Binding> {
    if pending.is_empty() {
        return if used.iter().all(|&u| u) { vec![b] } else { vec![] };
    }
    // structured patterns first, then already bound variables
    let pick = pending
        .iter()
        .position(|p| !p.is_var())
        .or_else(|| pending.iter().position(|p| matches!(p, Term::Var(v) if b[*v].is_some())));
    let Some(k) = pick else {
        return distribute(sig, op, pending, sargs, used, b);
    };
    let p = pending[k];
    let rest: Vec<&Term> = pending.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, t)| *t).collect();
    let mut out = Vec::new();
    match p {
        Term::Var(v) => {
            let value = b[*v].clone().unwrap();
            let parts: Vec<&Term> = match &value {
                Term::App { op: o, args, .. } if *o == op => args.iter().collect(),
                t => vec![t],
            };
            let mut taken = Vec::new();
            for part in parts {
                match (0..sargs.len()).find(|&i| !used[i] && &sargs[i] == part) {
                    Some(i) => {
                        used[i] = true;
                        taken.push(i);
                    }
                    None => break,
                }
            }
            let complete = taken.len() == value_len(&value, op);
            if complete {
                out = ac_matches(sig, op, &rest, sargs, used, b);
            }
            for i in taken {
                used[i] = false;
            }
        }
        Term::App { .. } => {
            let mut tried: Vec<&Term> = Vec::new();
            for i in 0..sargs.len() {
                if used[i] || tried.contains(&&sargs[i]) {
                    continue;
                }
                tried.push(&sargs[i]);
                used[i] = true;
                for b2 in matches(sig, p, &sargs[i], b.clone()) {
                    out.extend(ac_matches(sig, op, &rest, sargs, used, b2));
                }
                used[i] = false;
            }
        }
    }
    out
}

fn value_len(t: &Term, op: usize) -> usize {
    match t {
        Term::App { op: o, args, .. } if *o == op => args.len(),
        _ => 1,
    }
}

/// Distributes the remaining subject arguments onto the unbound variables,
/// each getting at least one.
fn distribute(
    sig: &Signature,
    op: usize,
    vars: &[&Term],
    sargs: &[Term],
    used: &[bool],
    b: Binding,
) -> Vec<Binding> {
    let free: Vec<usize> = (0..sargs.len()).filter(|&i| !used[i]).collect();
    let k = vars.len();
    if free.len() < k {
        return vec![];
    }
    let ids: Vec<usize> = vars.iter().map(|t| if let Term::Var(v) = t { *v } else { unreachable!() }).collect();
    let mut out = Vec::new();
    let mut assign = vec![0usize; free.len()];
    loop {
        let mut groups: Vec<Vec<Term>> = vec![Vec::new(); k];
        for (j, &g) in assign.iter().enumerate() {
            groups[g].push(sargs[free[j]].clone());
        }
        if groups.iter().all(|g| !g.is_empty()) {
            let mut b2 = b.clone();
            let mut ok = true;
            for (g, &v) in groups.into_iter().zip(&ids) {
                let t = if g.len() == 1 { g.into_iter().next().unwrap() } else { sig.app(op, g) };
                match &b2[v] {
                    Some(old) if *old != t => ok = false,
                    Some(_) => {}
                    None => b2[v] = Some(t),
                }
            }
            if ok {
                out.push(b2);
            }
        }
        // next assignment in base k
        let mut j = 0;
        loop {
            if j == assign.len() {
                return out;
            }
            assign[j] += 1;
            if assign[j] < k {
                break;
            }
            assign[j] = 0;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::single_sorted();
        let m = s.add_op("m", &["S", "S"], "S").unwrap();
        s.add_op("f", &["S"], "S").unwrap();
        s.add_op("a", &[], "S").unwrap();
        s.add_op("b", &[], "S").unwrap();
        s.set_ac(m, None).unwrap();
        s
    }

    #[test]
    fn ac_pattern_matches_in_any_order() {
        let s = sig();
        let (a, b) = (s.constant(2), s.constant(3));
        let p = s.app(0, vec![Term::Var(0), s.app(1, vec![Term::Var(0)])]);
        let subj = s.app(0, vec![s.app(1, vec![a.clone()]), a.clone()]);
        let ms = match_term(&s, &p, &subj, 1);
        assert_eq!(ms, vec![vec![Some(a.clone())]]);
        let bad = s.app(0, vec![s.app(1, vec![a]), b]);
        assert!(match_term(&s, &p, &bad, 1).is_empty());
    }

    #[test]
    fn variables_split_multisets() {
        let s = sig();
        let (a, b) = (s.constant(2), s.constant(3));
        let p = s.app(0, vec![Term::Var(0), Term::Var(1)]);
        let subj = s.app(0, vec![a.clone(), a.clone(), b.clone()]);
        // {a}{a,b}, {b}{a,a}, {a,a}{b}, {a,b}{a}
        assert_eq!(match_term(&s, &p, &subj, 2).len(), 4);
        let px = s.app(0, vec![Term::Var(0), Term::Var(0)]);
        assert!(match_term(&s, &px, &subj, 1).is_empty());
        let sq = s.app(0, vec![a.clone(), a.clone()]);
        assert_eq!(match_term(&s, &px, &sq, 1), vec![vec![Some(a)]]);
    }

    #[test]
    fn syntactic_match() {
        let s = sig();
        let a = s.constant(2);
        let p = s.app(1, vec![Term::Var(0)]);
        assert_eq!(match_term(&s, &p, &s.app(1, vec![a.clone()]), 1), vec![vec![Some(a.clone())]]);
        assert!(match_term(&s, &p, &a, 1).is_empty());
    }
}
