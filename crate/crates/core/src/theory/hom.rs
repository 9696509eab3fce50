//! Hom-sets of the theory category: `hom(Γ, Δ)` is the set of `|Δ|`-tuples of
//! normal forms over `Γ`, composed by substitution.

use std::collections::HashMap;

use serde::Serialize;

use super::{TheoryError, TheoryPresentation};
use crate::rewrite::{default_names, enumerate_normal_forms, SortId, Term};

/// Enumerated hom-sets are refused above this many elements.
pub const MAX_HOMS: u128 = 5_000_000;

/// A morphism `source → target`: one normal form over `source` per target
/// position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TheoryHom {
    pub source: Vec<SortId>,
    pub target: Vec<SortId>,
    pub terms: Vec<Term>,
}

impl TheoryHom {
    /// The tuple of projections.
    pub fn identity(ctx: &[SortId]) -> TheoryHom {
        TheoryHom { source: ctx.to_vec(), target: ctx.to_vec(), terms: (0..ctx.len()).map(Term::Var).collect() }
    }

    pub fn show(&self, t: &TheoryPresentation) -> String {
        let names = default_names(self.source.len());
        let parts: Vec<String> = self.terms.iter().map(|u| t.signature().show(u, &names)).collect();
        format!("({})", parts.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct HomSet {
    pub source: Vec<SortId>,
    pub target: Vec<SortId>,
    pub depth: u32,
    /// Some normal form deeper than `depth` exists, so the list is partial.
    pub truncated: bool,
    pub homs: Vec<TheoryHom>,
}

impl HomSet {
    pub fn len(&self) -> usize {
        self.homs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homs.is_empty()
    }

    pub fn index(&self) -> HashMap<&TheoryHom, usize> {
        self.homs.iter().enumerate().map(|(i, h)| (h, i)).collect()
    }
}

/// All tuples of normal forms of depth `≤ depth`, lexicographic in the term
/// order.
pub fn hom_enumerate(
    t: &TheoryPresentation,
    source: &[SortId],
    target: &[SortId],
    depth: u32,
) -> Result<HomSet, TheoryError> {
    if t.is_waived() {
        return Err(TheoryError::UnsafeTheory);
    }
    let nf = enumerate_normal_forms(t.rules(), source, depth);
    let pools: Vec<&Vec<Term>> = target.iter().map(|&s| &nf.by_sort[s]).collect();
    let total = pools.iter().fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128));
    if total > MAX_HOMS {
        return Err(TheoryError::TooLarge(total));
    }
    let truncated = !nf.saturated && !target.is_empty();
    let mut homs = Vec::with_capacity(total as usize);
    if total > 0 {
        let mut idx = vec![0usize; pools.len()];
        loop {
            let terms = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
            homs.push(TheoryHom { source: source.to_vec(), target: target.to_vec(), terms });
            let mut k = pools.len();
            loop {
                if k == 0 {
                    return Ok(HomSet { source: source.to_vec(), target: target.to_vec(), depth, truncated, homs });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < pools[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    Ok(HomSet { source: source.to_vec(), target: target.to_vec(), depth, truncated, homs })
}

/// `g ∘ f`: substitute `f`'s terms into each of `g`'s and normalize.
pub fn compose_hom(t: &TheoryPresentation, f: &TheoryHom, g: &TheoryHom) -> Result<TheoryHom, TheoryError> {
    if f.target != g.source {
        let sorts = |c: &[SortId]| format!("{:?}", c.iter().map(|&s| &t.signature().sorts()[s]).collect::<Vec<_>>());
        return Err(TheoryError::ContextMismatch { expected: sorts(&g.source), found: sorts(&f.target) });
    }
    let sig = t.signature();
    let terms = g
        .terms
        .iter()
        .map(|u| t.nf(&sig.substitute(u, &f.terms)?))
        .collect::<Result<Vec<_>, TheoryError>>()?;
    Ok(TheoryHom { source: f.source.clone(), target: g.target.clone(), terms })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductVerdict {
    pub bijective: bool,
    /// `|hom(k, m + n)|`, `|hom(k, m)|`, `|hom(k, n)|`.
    pub sizes: (usize, usize, usize),
    pub truncated: bool,
}

/// Checks that splitting tuples is a bijection
/// `hom(k, m + n) → hom(k, m) × hom(k, n)`.
pub fn finite_product_check(
    t: &TheoryPresentation,
    k: &[SortId],
    m: &[SortId],
    n: &[SortId],
    depth: u32,
) -> Result<ProductVerdict, TheoryError> {
    let mn: Vec<SortId> = m.iter().chain(n).copied().collect();
    let whole = hom_enumerate(t, k, &mn, depth)?;
    let (left, right) = (hom_enumerate(t, k, m, depth)?, hom_enumerate(t, k, n, depth)?);
    let (li, ri) = (left.index(), right.index());
    let mut hit = vec![false; left.len() * right.len()];
    let mut bijective = true;
    for h in &whole.homs {
        let a = TheoryHom { source: k.to_vec(), target: m.to_vec(), terms: h.terms[..m.len()].to_vec() };
        let b = TheoryHom { source: k.to_vec(), target: n.to_vec(), terms: h.terms[m.len()..].to_vec() };
        match (li.get(&a), ri.get(&b)) {
            (Some(&i), Some(&j)) if !hit[i * right.len() + j] => hit[i * right.len() + j] = true,
            _ => bijective = false,
        }
    }
    bijective &= hit.iter().all(|&h| h);
    Ok(ProductVerdict {
        bijective,
        sizes: (whole.len(), left.len(), right.len()),
        truncated: whole.truncated || left.truncated || right.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_term;
    use crate::theory::builtin;

    fn hom(t: &TheoryPresentation, m: usize, terms: &[&str]) -> TheoryHom {
        let mut names = default_names(m);
        let terms: Vec<Term> =
            terms.iter().map(|s| t.nf(&parse_term(t.signature(), s, &mut names).unwrap()).unwrap()).collect();
        let target = vec![0; terms.len()];
        TheoryHom { source: vec![0; m], target, terms }
    }

    fn power(k: usize) -> String {
        match k {
            0 => "e".into(),
            1 => "x".into(),
            _ => format!("m(x, {})", power(k - 1)),
        }
    }

    #[test]
    fn empty_signature_counts_projections() {
        let t = builtin("empty").unwrap();
        for m in 0..4 {
            for n in 0..4 {
                let h = hom_enumerate(&t, &vec![0; m], &vec![0; n], 2).unwrap();
                assert_eq!(h.len(), m.pow(n as u32));
                assert!(!h.truncated);
            }
        }
    }

    #[test]
    fn pointed_set_hom_one_one() {
        let t = builtin("pointed").unwrap();
        for d in 0..3 {
            let h = hom_enumerate(&t, &[0], &[0], d).unwrap();
            assert_eq!(h.len(), 2);
            assert!(!h.truncated);
        }
    }

    #[test]
    fn monoid_hom_one_one_is_powers() {
        let t = builtin("monoid").unwrap();
        let h = hom_enumerate(&t, &[0], &[0], 3).unwrap();
        assert!(h.truncated);
        let shown: Vec<String> = h.homs.iter().map(|f| f.show(&t)).collect();
        let want: Vec<String> = (0..5).map(|k| format!("({})", power(k))).collect();
        let mut sorted = shown.clone();
        sorted.sort();
        let mut w = want.clone();
        w.sort();
        assert_eq!(sorted, w);
    }

    #[test]
    fn monoid_compositions() {
        let t = builtin("monoid").unwrap();
        let x2 = hom(&t, 1, &[&power(2)]);
        let x3 = hom(&t, 1, &[&power(3)]);
        let x6 = hom(&t, 1, &[&power(6)]);
        assert_eq!(compose_hom(&t, &x3, &x2).unwrap(), x6);
        assert_eq!(compose_hom(&t, &x2, &x3).unwrap(), x6);
        let diag = hom(&t, 1, &["x", "x"]);
        let mult = TheoryHom { source: vec![0; 2], target: vec![0], terms: hom(&t, 2, &["m(x, y)"]).terms };
        let sq = compose_hom(&t, &diag, &mult).unwrap();
        assert_eq!(sq, x2);
        let id = TheoryHom::identity(&[0]);
        assert_eq!(compose_hom(&t, &id, &x2).unwrap(), x2);
        assert_eq!(compose_hom(&t, &x2, &id).unwrap(), x2);
        assert!(compose_hom(&t, &x2, &mult).is_err());
    }

    #[test]
    fn composition_is_associative_on_small_homs() {
        let t = builtin("group").unwrap();
        let h = hom_enumerate(&t, &[0, 0], &[0, 0], 1).unwrap();
        let sample: Vec<&TheoryHom> = h.homs.iter().step_by(7).collect();
        for f in &sample {
            for g in &sample {
                let gf = compose_hom(&t, f, g).unwrap();
                for k in sample.iter().step_by(3) {
                    let left = compose_hom(&t, &gf, k).unwrap();
                    let right = compose_hom(&t, f, &compose_hom(&t, g, k).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn products_split() {
        for name in ["empty", "pointed", "monoid", "group"] {
            let t = builtin(name).unwrap();
            let v = finite_product_check(&t, &[0], &[0], &[0], 2).unwrap();
            assert!(v.bijective, "{name}");
            let v = finite_product_check(&t, &[0, 0], &[0], &[], 2).unwrap();
            assert!(v.bijective);
            assert_eq!(v.sizes.2, 1);
        }
    }
}
