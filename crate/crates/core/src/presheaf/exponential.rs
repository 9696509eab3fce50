//! Exponentials `(G^F)(c) = Nat(y(c) × F, G)` with evaluation and currying.

use std::collections::HashMap;
use std::sync::Arc;

use super::nat::nat_transformations;
use super::{Presheaf, PresheafError, PresheafMap};
use crate::finset::Function;

#[derive(Clone, Debug)]
pub struct Exponential {
    pub object: Arc<Presheaf>,
    /// `ev: G^F × F → G`.
    pub evaluation: PresheafMap,
    base: Arc<Presheaf>,
    target: Arc<Presheaf>,
    /// Components of the natural map `y(c) × F → G` named by each element.
    elements: Vec<Vec<Vec<Function>>>,
    index: Vec<HashMap<Vec<Function>, usize>>,
}

pub fn exponential(f: &Arc<Presheaf>, g: &Arc<Presheaf>) -> Result<Exponential, PresheafError> {
    f.same_base(g)?;
    let cat = f.base().clone();
    let mut elements = Vec::with_capacity(cat.num_objects());
    for c in 0..cat.num_objects() {
        let yc = Presheaf::representable(&cat, c);
        let prod = Arc::new(yc.product(f)?);
        elements.push(nat_transformations(&prod, g)?.into_iter().map(|m| m.components().to_vec()).collect::<Vec<_>>());
    }
    let index: Vec<HashMap<Vec<Function>, usize>> = elements
        .iter()
        .map(|list: &Vec<Vec<Function>>| list.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect())
        .collect();
    // (α·u)_d(v, y) = α_d(u∘v, y) for u: c' → c, v: d → c'
    let actions = (0..cat.num_morphisms())
        .map(|u| {
            let (c2, c) = (cat.src(u), cat.dst(u));
            elements[c]
                .iter()
                .map(|alpha| {
                    let beta: Vec<Function> = (0..cat.num_objects())
                        .map(|d| {
                            let fd = f.size(d);
                            let mut comp = Vec::with_capacity(cat.hom(d, c2).len() * fd);
                            for &v in cat.hom(d, c2) {
                                let k = cat.hom_index(cat.compose(u, v));
                                comp.extend((0..fd).map(|y| alpha[d][k * fd + y]));
                            }
                            comp
                        })
                        .collect();
                    index[c2][&beta]
                })
                .collect()
        })
        .collect();
    let sizes = elements.iter().map(|l| l.len()).collect();
    let object = Arc::new(Presheaf::new(cat.clone(), sizes, actions)?);
    let prod = Arc::new(object.product(f)?);
    let ev = (0..cat.num_objects())
        .map(|c| {
            let k = cat.hom_index(cat.identity(c));
            let fc = f.size(c);
            let mut comp = Vec::with_capacity(object.size(c) * fc);
            for alpha in &elements[c] {
                comp.extend((0..fc).map(|y| alpha[c][k * fc + y]));
            }
            comp
        })
        .collect();
    let evaluation = PresheafMap::new(prod, g.clone(), ev)?;
    Ok(Exponential { object, evaluation, base: f.clone(), target: g.clone(), elements, index })
}

impl Exponential {
    /// The natural map `y(c) × F → G` that element `x ∈ G^F(c)` names.
    pub fn element(&self, c: usize, x: usize) -> &[Function] {
        &self.elements[c][x]
    }

    /// Transpose of `k: H × F → G`, as a map `H → G^F`.
    pub fn curry(&self, h: &Arc<Presheaf>, k: &PresheafMap) -> Result<PresheafMap, PresheafError> {
        let f = &self.base;
        let cat = f.base().clone();
        if k.source().sizes() != h.product(f)?.sizes() || k.target().sizes() != self.target.sizes() {
            return Err(PresheafError::BadDiagram("map is not out of H × F into G".into()));
        }
        let comps = (0..cat.num_objects())
            .map(|c| {
                (0..h.size(c))
                    .map(|x| {
                        // α_d(v, y) = k_d(H(v)x, y)
                        let alpha: Vec<Function> = (0..cat.num_objects())
                            .map(|d| {
                                let fd = f.size(d);
                                let mut comp = Vec::new();
                                for &v in cat.hom(d, c) {
                                    let hx = h.act(v, x);
                                    comp.extend((0..fd).map(|y| k.apply(d, hx * fd + y)));
                                }
                                comp
                            })
                            .collect();
                        self.index[c].get(&alpha).copied().ok_or_else(|| PresheafError::NotNatural("k".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        PresheafMap::new(h.clone(), self.object.clone(), comps)
    }
}

/// `ev ∘ (m × F)` for `m: H → G^F`.
pub fn uncurry(exp: &Exponential, m: &PresheafMap) -> Result<PresheafMap, PresheafError> {
    let h = m.source();
    let f = &exp.base;
    let prod = Arc::new(h.product(f)?);
    let comps = (0..f.base().num_objects())
        .map(|c| {
            let fc = f.size(c);
            let mut comp = Vec::with_capacity(h.size(c) * fc);
            for x in 0..h.size(c) {
                let a = m.apply(c, x);
                comp.extend((0..fc).map(|y| exp.evaluation.apply(c, a * fc + y)));
            }
            comp
        })
        .collect();
    PresheafMap::new(prod, exp.target.clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::count_nat_transformations;
    use crate::presheaf::fixtures::gph;

    #[test]
    fn unit_laws() {
        let one = Arc::new(gph::terminal());
        let e = Arc::new(gph::edge());
        let v = Arc::new(gph::vertex());
        for g in [&e, &v, &one] {
            let exp = exponential(&one, g).unwrap();
            assert!(exp.object.is_isomorphic(g));
            let to_one = exponential(g, &one).unwrap();
            assert!(to_one.object.is_isomorphic(&one));
        }
    }

    #[test]
    fn e_to_the_v_has_no_vertices() {
        let e = Arc::new(gph::edge());
        let v = Arc::new(gph::vertex());
        let exp = exponential(&v, &e).unwrap();
        // (E^V)(v) = Nat(V × V, E) = Nat(V, E) = 2; (E^V)(e) = Nat(E × V, E) = Nat(V + V, E) = 4
        assert_eq!(exp.object.sizes(), &[2, 4]);
    }

    #[test]
    fn currying_is_a_bijection() {
        let e = Arc::new(gph::edge());
        let v = Arc::new(gph::vertex());
        let one = Arc::new(gph::terminal());
        let exp = exponential(&e, &e).unwrap();
        for h in [&v, &e, &one] {
            let hf = Arc::new(h.product(&e).unwrap());
            let left = nat_transformations(&hf, &e).unwrap();
            let right = nat_transformations(h, &exp.object).unwrap();
            assert_eq!(left.len(), right.len());
            assert_eq!(count_nat_transformations(h, &exp.object).unwrap(), right.len());
            for k in &left {
                let m = exp.curry(h, k).unwrap();
                assert_eq!(uncurry(&exp, &m).unwrap().components(), k.components());
            }
        }
    }
}
