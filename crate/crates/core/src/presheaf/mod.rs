//! FinSet-valued presheaves on finite categories.
//!
//! A presheaf `P` on `C` stores a finite set `P(c) = 0..n_c` per object and,
//! for every morphism `f: a → b`, the restriction table `P(f): P(b) → P(a)`.
//! Limits and colimits are computed pointwise; hom-sets between presheaves are
//! enumerated by constraint propagation over elements.

mod decompose;
mod exponential;
pub mod fixtures;
mod kan;
mod limits;
mod nat;
mod preserve;

use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{FinCat, MorId, ObId};
use crate::finset::{is_bijection, Function, SetFunctor};

pub use decompose::{
    components, decompose_into_representables, is_strongly_finitely_presentable, transport_to_completion, Decomposition,
    NotDecomposable,
};
pub use exponential::{exponential, uncurry, Exponential};
pub use kan::{lan_weight_comparison, left_kan_extension, weighted_colimit, KanExtension, WeightedColimit};
pub use limits::{finite_colimit, finite_limit, Cocone, ColimitShape, Cone, LimitShape, PresheafDiagram};
pub use nat::{count_nat_transformations, nat_transformations};
pub use preserve::{
    commutes_products_colimit, exhaustive_pairs, preserves_colimit, product_comparison_is_bijective, CommutationFailure,
    CommutationVerdict, Preservation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error("presheaves live over different base categories")]
    BaseMismatch,
    #[error("weight and diagram are indexed by different categories")]
    IndexMismatch,
    #[error("table for {0} has the wrong shape")]
    BadTable(String),
    #[error("action does not preserve {0}")]
    NotFunctorial(String),
    #[error("components are not natural at {0}")]
    NotNatural(String),
    #[error("diagram arrows do not match the shape: {0}")]
    BadDiagram(String),
}

/// A contravariant functor `C^op → FinSet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presheaf {
    base: Arc<FinCat>,
    sets: Vec<usize>,
    actions: Vec<Function>,
    labels: Option<Vec<Vec<String>>>,
}

impl Presheaf {
    /// Builds and exhaustively checks a presheaf. `actions[f]` for
    /// `f: a → b` maps `P(b)` into `P(a)`.
    pub fn new(base: Arc<FinCat>, sets: Vec<usize>, actions: Vec<Function>) -> Result<Self, PresheafError> {
        let p = Presheaf { base, sets, actions, labels: None };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(base: Arc<FinCat>, sets: Vec<usize>, actions: Vec<Function>) -> Self {
        Presheaf { base, sets, actions, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self, PresheafError> {
        if labels.len() != self.sets.len() || labels.iter().zip(&self.sets).any(|(l, &n)| l.len() != n) {
            return Err(PresheafError::BadTable("labels".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), PresheafError> {
        let c = &*self.base;
        if self.sets.len() != c.num_objects() || self.actions.len() != c.num_morphisms() {
            return Err(PresheafError::BadTable("presheaf".into()));
        }
        for f in 0..c.num_morphisms() {
            let t = &self.actions[f];
            if t.len() != self.sets[c.dst(f)] || t.iter().any(|&x| x >= self.sets[c.src(f)]) {
                return Err(PresheafError::BadTable(c.morphism(f).name.clone()));
            }
        }
        for o in 0..c.num_objects() {
            if self.actions[c.identity(o)].iter().enumerate().any(|(i, &x)| i != x) {
                return Err(PresheafError::NotFunctorial(c.morphism(c.identity(o)).name.clone()));
            }
        }
        // P(g∘f) = P(f)∘P(g)
        for f in 0..c.num_morphisms() {
            for d in 0..c.num_objects() {
                for &g in c.hom(c.dst(f), d) {
                    let gf = c.compose(g, f);
                    let (pf, pg, pgf) = (&self.actions[f], &self.actions[g], &self.actions[gf]);
                    if (0..self.sets[d]).any(|x| pf[pg[x]] != pgf[x]) {
                        return Err(PresheafError::NotFunctorial(format!(
                            "{}∘{}",
                            c.morphism(g).name,
                            c.morphism(f).name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.base
    }

    pub fn size(&self, o: ObId) -> usize {
        self.sets[o]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sets
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().sum()
    }

    pub fn action(&self, f: MorId) -> &[usize] {
        &self.actions[f]
    }

    /// `P(f)(x)` for `f: a → b`, `x ∈ P(b)`.
    pub fn act(&self, f: MorId, x: usize) -> usize {
        self.actions[f][x]
    }

    pub fn label(&self, o: ObId, x: usize) -> String {
        match &self.labels {
            Some(l) => l[o][x].clone(),
            None => x.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&Vec<Vec<String>>> {
        self.labels.as_ref()
    }

    fn same_base(&self, other: &Presheaf) -> Result<(), PresheafError> {
        if Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base {
            Ok(())
        } else {
            Err(PresheafError::BaseMismatch)
        }
    }

    /// The representable `y(c) = C(−, c)`; elements are ordered as `hom(d, c)`.
    pub fn representable(base: &Arc<FinCat>, c: ObId) -> Presheaf {
        let cat = &**base;
        let sets = (0..cat.num_objects()).map(|d| cat.hom(d, c).len()).collect();
        let actions = (0..cat.num_morphisms())
            .map(|f| cat.hom(cat.dst(f), c).iter().map(|&u| cat.hom_index(cat.compose(u, f))).collect())
            .collect();
        let labels = (0..cat.num_objects())
            .map(|d| cat.hom(d, c).iter().map(|&u| cat.morphism(u).name.clone()).collect())
            .collect();
        Presheaf { base: base.clone(), sets, actions, labels: Some(labels) }
    }

    pub fn terminal(base: &Arc<FinCat>) -> Presheaf {
        Presheaf::constant(base, 1)
    }

    pub fn initial(base: &Arc<FinCat>) -> Presheaf {
        Presheaf::constant(base, 0)
    }

    pub fn constant(base: &Arc<FinCat>, n: usize) -> Presheaf {
        let sets = vec![n; base.num_objects()];
        let actions = vec![(0..n).collect(); base.num_morphisms()];
        Presheaf { base: base.clone(), sets, actions, labels: None }
    }

    /// A covariant functor `F: A → FinSet` viewed as a presheaf on `A^op`.
    pub fn from_covariant(functor: &SetFunctor, opposite_base: Arc<FinCat>) -> Presheaf {
        debug_assert_eq!(opposite_base.num_morphisms(), functor.shape().num_morphisms());
        let actions = (0..opposite_base.num_morphisms()).map(|f| functor.map(f).to_vec()).collect();
        Presheaf { base: opposite_base, sets: functor.sizes().to_vec(), actions, labels: None }
    }

    /// The same data viewed as a covariant functor on `base^op`.
    pub fn to_covariant(&self, opposite_base: Arc<FinCat>) -> SetFunctor {
        SetFunctor::new_unchecked(opposite_base, self.sets.clone(), self.actions.clone())
    }

    /// Restriction along `F: D → C`, giving a presheaf on `D`.
    pub fn restrict(&self, functor: &crate::fincat::FinFunctor) -> Result<Presheaf, PresheafError> {
        if **functor.target() != *self.base {
            return Err(PresheafError::BaseMismatch);
        }
        let d = functor.source();
        let sets = (0..d.num_objects()).map(|o| self.sets[functor.ob(o)]).collect();
        let actions = (0..d.num_morphisms()).map(|f| self.actions[functor.mor(f)].clone()).collect();
        Ok(Presheaf { base: d.clone(), sets, actions, labels: None })
    }

    /// Binary product with pairs `(x, y)` encoded as `x * |Q(c)| + y`.
    pub fn product(&self, other: &Presheaf) -> Result<Presheaf, PresheafError> {
        self.same_base(other)?;
        let c = &*self.base;
        let sets: Vec<usize> = (0..c.num_objects()).map(|o| self.sets[o] * other.sets[o]).collect();
        let actions = (0..c.num_morphisms())
            .map(|f| {
                let (a, b) = (c.src(f), c.dst(f));
                let (pf, qf) = (&self.actions[f], &other.actions[f]);
                let mut t = Vec::with_capacity(sets[b]);
                for x in 0..self.sets[b] {
                    for y in 0..other.sets[b] {
                        t.push(pf[x] * other.sets[a] + qf[y]);
                    }
                }
                t
            })
            .collect();
        let labels = match (&self.labels, &other.labels) {
            (None, None) => None,
            _ => Some(
                (0..c.num_objects())
                    .map(|o| {
                        let mut l = Vec::with_capacity(sets[o]);
                        for x in 0..self.sets[o] {
                            for y in 0..other.sets[o] {
                                l.push(format!("({},{})", self.label(o, x), other.label(o, y)));
                            }
                        }
                        l
                    })
                    .collect(),
            ),
        };
        Ok(Presheaf { base: self.base.clone(), sets, actions, labels })
    }

    /// Disjoint union, with summand `i` occupying a contiguous block.
    pub fn coproduct(parts: &[&Presheaf]) -> Result<Presheaf, PresheafError> {
        let first = parts.first().ok_or(PresheafError::BadDiagram("empty coproduct needs a base".into()))?;
        for p in parts {
            first.same_base(p)?;
        }
        let c = &*first.base;
        let offsets: Vec<Vec<usize>> = (0..c.num_objects())
            .map(|o| {
                let mut acc = 0;
                parts
                    .iter()
                    .map(|p| {
                        let off = acc;
                        acc += p.sets[o];
                        off
                    })
                    .collect()
            })
            .collect();
        let sets = (0..c.num_objects()).map(|o| parts.iter().map(|p| p.sets[o]).sum()).collect();
        let actions = (0..c.num_morphisms())
            .map(|f| {
                let a = c.src(f);
                let mut t = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    t.extend(p.actions[f].iter().map(|&x| x + offsets[a][i]));
                }
                t
            })
            .collect();
        let labels = (0..c.num_objects())
            .map(|o| {
                parts
                    .iter()
                    .enumerate()
                    .flat_map(|(i, p)| (0..p.sets[o]).map(move |x| format!("{i}:{}", p.label(o, x))))
                    .collect()
            })
            .collect();
        Ok(Presheaf { base: first.base.clone(), sets, actions, labels: Some(labels) })
    }

    /// Elements `(c, x)` in object-major order.
    pub fn elements(&self) -> Vec<(ObId, usize)> {
        (0..self.sets.len()).flat_map(|o| (0..self.sets[o]).map(move |x| (o, x))).collect()
    }

    /// Checks for an isomorphism with `other` by searching natural maps.
    pub fn is_isomorphic(&self, other: &Presheaf) -> bool {
        if self.sets != other.sets || self.same_base(other).is_err() {
            return false;
        }
        let (s, t) = (Arc::new(self.clone()), Arc::new(other.clone()));
        nat::find_nat(&s, &t, true).is_some()
    }
}

/// A natural transformation between presheaves on the same base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMap {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    components: Vec<Function>,
}

impl PresheafMap {
    pub fn new(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Function>) -> Result<Self, PresheafError> {
        source.same_base(&target)?;
        let m = PresheafMap { source, target, components };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Function>) -> Self {
        PresheafMap { source, target, components }
    }

    pub fn identity(p: Arc<Presheaf>) -> Self {
        let components = p.sets.iter().map(|&n| (0..n).collect()).collect();
        PresheafMap { source: p.clone(), target: p, components }
    }

    pub fn validate(&self) -> Result<(), PresheafError> {
        let (p, q) = (&*self.source, &*self.target);
        let c = &*p.base;
        if self.components.len() != c.num_objects() {
            return Err(PresheafError::BadTable("components".into()));
        }
        for o in 0..c.num_objects() {
            let a = &self.components[o];
            if a.len() != p.sets[o] || a.iter().any(|&y| y >= q.sets[o]) {
                return Err(PresheafError::BadTable(format!("component at {}", c.object_name(o))));
            }
        }
        for f in 0..c.num_morphisms() {
            let (a, b) = (c.src(f), c.dst(f));
            for x in 0..p.sets[b] {
                if self.components[a][p.act(f, x)] != q.act(f, self.components[b][x]) {
                    return Err(PresheafError::NotNatural(c.morphism(f).name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    pub fn component(&self, o: ObId) -> &[usize] {
        &self.components[o]
    }

    pub fn components(&self) -> &[Function] {
        &self.components
    }

    pub fn apply(&self, o: ObId, x: usize) -> usize {
        self.components[o][x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PresheafMap) -> Result<PresheafMap, PresheafError> {
        if self.target.sets != other.source.sets {
            return Err(PresheafError::BaseMismatch);
        }
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.iter().map(|&x| b[x]).collect()).collect();
        Ok(PresheafMap { source: self.source.clone(), target: other.target.clone(), components })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().enumerate().all(|(o, a)| is_bijection(a, self.target.sets[o]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;

    #[test]
    fn representables_are_valid() {
        for base in [shapes::gph_base(), shapes::rgph_base(), shapes::reflexive_pair(), shapes::injections(3)] {
            let base = Arc::new(base);
            for c in 0..base.num_objects() {
                Presheaf::representable(&base, c).validate().unwrap();
            }
        }
    }

    #[test]
    fn bad_action_is_rejected() {
        let base = Arc::new(shapes::rgph_base());
        // one vertex, one edge, r sends the vertex to the edge; s must be a retraction of r
        let v = base.object_id("V").unwrap();
        let e = base.object_id("E").unwrap();
        let mut sets = vec![0; 2];
        sets[v] = 2;
        sets[e] = 1;
        let actions = (0..base.num_morphisms())
            .map(|f| match base.morphism(f).name.as_str() {
                "id_V" => vec![0, 1],
                "id_E" => vec![0],
                "s" | "t" => vec![0],
                "r" => vec![0, 0],
                "sr" | "tr" => vec![0],
                _ => unreachable!(),
            })
            .collect();
        // r∘s = id_V forces P(s)∘P(r) = id on vertices, but both vertices go to edge 0
        let err = Presheaf::new(base, sets, actions).unwrap_err();
        assert!(matches!(err, PresheafError::NotFunctorial(_)));
    }

    #[test]
    fn coproduct_and_product_are_presheaves() {
        let base = Arc::new(shapes::gph_base());
        let v = Presheaf::representable(&base, 0);
        let e = Presheaf::representable(&base, 1);
        Presheaf::coproduct(&[&v, &e, &v]).unwrap().validate().unwrap();
        e.product(&e).unwrap().validate().unwrap();
    }
}
