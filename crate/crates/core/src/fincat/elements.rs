use std::collections::HashMap;
use std::sync::Arc;

use super::{FinCat, FinFunctor, Morphism, ObId};
use crate::presheaf::{Presheaf, PresheafDiagram, PresheafMap};

/// The category of elements of a presheaf `W` on `C`, oriented so that `W`
/// is the colimit of `(c, x) ↦ y(c)`: a morphism `(c, x) → (d, y)` is an
/// `f: c → d` with `W(f)(y) = x`.
#[derive(Clone, Debug)]
pub struct ElementCategory {
    pub category: Arc<FinCat>,
    /// Projection `(c, x) ↦ c`.
    pub projection: FinFunctor,
    pub elements: Vec<(ObId, usize)>,
}

pub fn category_of_elements(w: &Presheaf) -> ElementCategory {
    let c = w.base();
    let elements = w.elements();
    let names: Vec<String> = elements.iter().map(|&(o, x)| format!("({},{})", c.object_name(o), w.label(o, x))).collect();
    let mut morphisms = Vec::new();
    let mut underlying = Vec::new();
    let mut mor_index = HashMap::new();
    let mut identities = vec![0; elements.len()];
    for (i, &(a, x)) in elements.iter().enumerate() {
        for (j, &(b, y)) in elements.iter().enumerate() {
            for &f in c.hom(a, b) {
                if w.act(f, y) != x {
                    continue;
                }
                let name = if c.is_identity(f) {
                    identities[i] = morphisms.len();
                    format!("id_{}", names[i])
                } else {
                    format!("{}:{}->{}", c.morphism(f).name, names[i], names[j])
                };
                mor_index.insert((i, j, f), morphisms.len());
                morphisms.push(Morphism { name, src: i, dst: j });
                underlying.push(f);
            }
        }
    }
    let category = FinCat::from_parts_unchecked(names, morphisms.clone(), identities, |g, f| {
        mor_index[&(morphisms[f].src, morphisms[g].dst, c.compose(underlying[g], underlying[f]))]
    });
    let category = Arc::new(category);
    let ob_map = elements.iter().map(|e| e.0).collect();
    let projection = FinFunctor::new_unchecked(category.clone(), c.clone(), ob_map, underlying);
    ElementCategory { category, projection, elements }
}

impl ElementCategory {
    /// The diagram `(c, x) ↦ y(c)` of representables over the elements.
    pub fn representable_diagram(&self) -> PresheafDiagram {
        let base = self.projection.target().clone();
        let reps: Vec<Arc<Presheaf>> =
            (0..base.num_objects()).map(|c| Arc::new(Presheaf::representable(&base, c))).collect();
        let objects: Vec<Arc<Presheaf>> = self.elements.iter().map(|&(c, _)| reps[c].clone()).collect();
        let cat = &*self.category;
        let arrows = (0..cat.num_morphisms())
            .map(|m| {
                let f = self.projection.mor(m);
                let (a, b) = (base.src(f), base.dst(f));
                let comps = (0..base.num_objects())
                    .map(|e| base.hom(e, a).iter().map(|&u| base.hom_index(base.compose(f, u))).collect())
                    .collect();
                PresheafMap::new_unchecked(reps[a].clone(), reps[b].clone(), comps)
            })
            .collect();
        PresheafDiagram::new(self.category.clone(), objects, arrows).expect("Yoneda embedding is functorial")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;
    use crate::presheaf::fixtures::gph;

    #[test]
    fn representable_has_terminal_element() {
        let base = Arc::new(shapes::reflexive_pair());
        for c in 0..base.num_objects() {
            let y = Presheaf::representable(&base, c);
            let el = category_of_elements(&y);
            el.category.validate().unwrap();
            el.projection.validate().unwrap();
            let top = el.elements.iter().position(|&(o, x)| o == c && y.label(o, x) == format!("id_{}", base.object_name(c))).unwrap();
            for i in 0..el.category.num_objects() {
                assert_eq!(el.category.hom(i, top).len(), 1);
            }
        }
    }

    #[test]
    fn constant_two_on_a_point_is_discrete() {
        let w = Presheaf::constant(&Arc::new(shapes::terminal()), 2);
        let el = category_of_elements(&w);
        assert_eq!(el.category.num_objects(), 2);
        assert_eq!(el.category.num_morphisms(), 2);
    }

    #[test]
    fn vertex_plus_edge() {
        let w = Presheaf::coproduct(&[&gph::vertex(), &gph::edge()]).unwrap();
        let el = category_of_elements(&w);
        el.category.validate().unwrap();
        assert_eq!(el.category.num_objects(), 4);
        assert_eq!(el.category.num_morphisms() - 4, 2);
    }

    #[test]
    fn colimit_of_representables_recovers_the_presheaf() {
        let cases = [
            gph::terminal(),
            gph::edge().product(&gph::edge()).unwrap(),
            Presheaf::coproduct(&[&gph::vertex(), &gph::edge()]).unwrap(),
            crate::presheaf::fixtures::rgph::edge(),
        ];
        for w in cases {
            let el = category_of_elements(&w);
            let cocone = el.representable_diagram().colimit(w.base());
            cocone.verify().unwrap();
            assert!(cocone.apex.is_isomorphic(&w));
        }
    }
}
