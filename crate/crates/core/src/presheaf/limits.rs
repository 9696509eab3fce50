//! Pointwise limits and colimits of finite diagrams of presheaves.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Presheaf, PresheafError, PresheafMap};
use crate::fincat::{shapes, FinCat, MorId, ObId};
use crate::finset::{is_bijection, tuple_index, SetFunctor};

/// A functor from a finite shape into presheaves on a common base.
#[derive(Clone, Debug)]
pub struct PresheafDiagram {
    shape: Arc<FinCat>,
    objects: Vec<Arc<Presheaf>>,
    arrows: Vec<PresheafMap>,
}

impl PresheafDiagram {
    /// `arrows[u]` is the image of shape morphism `u`, identities included.
    pub fn new(shape: Arc<FinCat>, objects: Vec<Arc<Presheaf>>, arrows: Vec<PresheafMap>) -> Result<Self, PresheafError> {
        let d = PresheafDiagram { shape, objects, arrows };
        d.validate()?;
        Ok(d)
    }

    /// Fills in identities and composites from the named generating arrows.
    pub fn from_generators(
        shape: Arc<FinCat>,
        objects: Vec<Arc<Presheaf>>,
        generators: &[(&str, PresheafMap)],
    ) -> Result<Self, PresheafError> {
        let n = shape.num_morphisms();
        let mut arrows: Vec<Option<PresheafMap>> = vec![None; n];
        for o in 0..shape.num_objects() {
            let p = objects.get(o).ok_or_else(|| PresheafError::BadDiagram("missing object".into()))?;
            arrows[shape.identity(o)] = Some(PresheafMap::identity(p.clone()));
        }
        for (name, m) in generators {
            let u = shape.morphism_id(name).ok_or_else(|| PresheafError::BadDiagram(format!("no arrow {name}")))?;
            arrows[u] = Some(m.clone());
        }
        loop {
            let mut changed = false;
            for f in 0..n {
                for g in 0..n {
                    let Some(h) = shape.try_compose(g, f) else { continue };
                    if arrows[h].is_some() {
                        continue;
                    }
                    if let (Some(mf), Some(mg)) = (&arrows[f], &arrows[g]) {
                        arrows[h] = Some(mf.then(mg)?);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let arrows = arrows
            .into_iter()
            .enumerate()
            .map(|(u, a)| a.ok_or_else(|| PresheafError::BadDiagram(format!("arrow {} undetermined", shape.morphism(u).name))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(shape, objects, arrows)
    }

    pub fn validate(&self) -> Result<(), PresheafError> {
        let s = &*self.shape;
        if self.objects.len() != s.num_objects() || self.arrows.len() != s.num_morphisms() {
            return Err(PresheafError::BadDiagram("wrong number of objects or arrows".into()));
        }
        let base = self.objects.first().map(|p| p.base().clone());
        for p in &self.objects {
            if let Some(b) = &base {
                if **b != **p.base() {
                    return Err(PresheafError::BaseMismatch);
                }
            }
        }
        for u in 0..s.num_morphisms() {
            let a = &self.arrows[u];
            let (j, k) = (s.src(u), s.dst(u));
            if a.source().sizes() != self.objects[j].sizes() || a.target().sizes() != self.objects[k].sizes() {
                return Err(PresheafError::BadDiagram(format!("arrow {} is mistyped", s.morphism(u).name)));
            }
            a.validate()?;
        }
        for o in 0..s.num_objects() {
            if self.arrows[s.identity(o)] != PresheafMap::identity(self.objects[o].clone()) {
                let id = &self.arrows[s.identity(o)];
                if id.components().iter().any(|c| c.iter().enumerate().any(|(i, &y)| i != y)) {
                    return Err(PresheafError::BadDiagram(format!("identity of {}", s.object_name(o))));
                }
            }
        }
        for f in 0..s.num_morphisms() {
            for c in 0..s.num_objects() {
                for &g in s.hom(s.dst(f), c) {
                    let composite = self.arrows[f].then(&self.arrows[g])?;
                    if composite.components() != self.arrows[s.compose(g, f)].components() {
                        return Err(PresheafError::BadDiagram(format!(
                            "{}∘{}",
                            s.morphism(g).name,
                            s.morphism(f).name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> &Arc<FinCat> {
        &self.shape
    }

    pub fn objects(&self) -> &[Arc<Presheaf>] {
        &self.objects
    }

    pub fn arrow(&self, u: MorId) -> &PresheafMap {
        &self.arrows[u]
    }

    pub fn arrows(&self) -> &[PresheafMap] {
        &self.arrows
    }

    /// The base the diagram lives over; `None` for an empty shape.
    pub fn base(&self) -> Option<&Arc<FinCat>> {
        self.objects.first().map(|p| p.base())
    }

    /// Evaluation at a base object, as a FinSet diagram on the shape.
    pub fn evaluate(&self, c: ObId) -> SetFunctor {
        let sizes = self.objects.iter().map(|p| p.size(c)).collect();
        let maps = self.arrows.iter().map(|a| a.component(c).to_vec()).collect();
        SetFunctor::new_unchecked(self.shape.clone(), sizes, maps)
    }

    pub fn limit(&self, base: &Arc<FinCat>) -> Cone {
        let c = &**base;
        let per_object: Vec<_> = (0..c.num_objects()).map(|o| self.evaluate(o).limit()).collect();
        let radices: Vec<Vec<usize>> =
            (0..c.num_objects()).map(|o| self.objects.iter().map(|p| p.size(o)).collect()).collect();
        let lookups: Vec<Option<HashMap<usize, usize>>> = (0..c.num_objects())
            .map(|o| {
                let full: usize = radices[o].iter().product();
                if per_object[o].size() == full {
                    None
                } else {
                    Some(per_object[o].families.iter().enumerate().map(|(i, f)| (tuple_index(&radices[o], f), i)).collect())
                }
            })
            .collect();
        let sets: Vec<usize> = per_object.iter().map(|l| l.size()).collect();
        let actions = (0..c.num_morphisms())
            .map(|f| {
                let a = c.src(f);
                per_object[c.dst(f)]
                    .families
                    .iter()
                    .map(|fam| {
                        let img: Vec<usize> = fam.iter().zip(&self.objects).map(|(&x, p)| p.act(f, x)).collect();
                        let key = tuple_index(&radices[a], &img);
                        match &lookups[a] {
                            None => key,
                            Some(m) => m[&key],
                        }
                    })
                    .collect()
            })
            .collect();
        let apex = Arc::new(Presheaf::new_unchecked(base.clone(), sets, actions));
        let legs = (0..self.objects.len())
            .map(|j| {
                let comps = per_object.iter().map(|l| l.projection(j)).collect();
                PresheafMap::new_unchecked(apex.clone(), self.objects[j].clone(), comps)
            })
            .collect();
        Cone { apex, legs, diagram: self.clone() }
    }

    pub fn colimit(&self, base: &Arc<FinCat>) -> Cocone {
        let c = &**base;
        let per_object: Vec<_> = (0..c.num_objects()).map(|o| self.evaluate(o).colimit()).collect();
        // a representative (j, x) for every class
        let reps: Vec<Vec<(usize, usize)>> = per_object
            .iter()
            .map(|col| {
                let mut r = vec![(usize::MAX, 0); col.size];
                for (j, inj) in col.injections.iter().enumerate() {
                    for (x, &k) in inj.iter().enumerate() {
                        if r[k].0 == usize::MAX {
                            r[k] = (j, x);
                        }
                    }
                }
                r
            })
            .collect();
        let sets = per_object.iter().map(|col| col.size).collect();
        let actions = (0..c.num_morphisms())
            .map(|f| {
                let a = c.src(f);
                reps[c.dst(f)].iter().map(|&(j, x)| per_object[a].injections[j][self.objects[j].act(f, x)]).collect()
            })
            .collect();
        let apex = Arc::new(Presheaf::new_unchecked(base.clone(), sets, actions));
        let legs = (0..self.objects.len())
            .map(|j| {
                let comps = per_object.iter().map(|col| col.injections[j].clone()).collect();
                PresheafMap::new_unchecked(self.objects[j].clone(), apex.clone(), comps)
            })
            .collect();
        Cocone { apex, legs, diagram: self.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub apex: Arc<Presheaf>,
    pub legs: Vec<PresheafMap>,
    pub diagram: PresheafDiagram,
}

#[derive(Clone, Debug)]
pub struct Cocone {
    pub apex: Arc<Presheaf>,
    pub legs: Vec<PresheafMap>,
    pub diagram: PresheafDiagram,
}

impl Cone {
    /// Checks naturality, commutativity, and that at every base object the
    /// apex maps bijectively onto the FinSet limit.
    pub fn verify(&self) -> Result<(), PresheafError> {
        self.apex.validate()?;
        let s = &*self.diagram.shape;
        for leg in &self.legs {
            leg.validate()?;
        }
        for u in 0..s.num_morphisms() {
            let via = self.legs[s.src(u)].then(&self.diagram.arrows[u])?;
            if via.components() != self.legs[s.dst(u)].components() {
                return Err(PresheafError::BadDiagram(format!("cone does not commute at {}", s.morphism(u).name)));
            }
        }
        for o in 0..self.apex.base().num_objects() {
            let lim = self.diagram.evaluate(o).limit();
            let index: HashMap<Vec<usize>, usize> =
                lim.families.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
            let map: Option<Vec<usize>> = (0..self.apex.size(o))
                .map(|x| index.get(&self.legs.iter().map(|l| l.apply(o, x)).collect::<Vec<_>>()).copied())
                .collect();
            if !map.map(|m| is_bijection(&m, lim.size())).unwrap_or(false) {
                return Err(PresheafError::BadDiagram(format!("cone is not a limit at {}", self.apex.base().object_name(o))));
            }
        }
        Ok(())
    }
}

impl Cocone {
    /// Checks naturality, commutativity, and that at every base object the
    /// FinSet colimit maps bijectively onto the apex.
    pub fn verify(&self) -> Result<(), PresheafError> {
        self.apex.validate()?;
        let s = &*self.diagram.shape;
        for leg in &self.legs {
            leg.validate()?;
        }
        for u in 0..s.num_morphisms() {
            let via = self.diagram.arrows[u].then(&self.legs[s.dst(u)])?;
            if via.components() != self.legs[s.src(u)].components() {
                return Err(PresheafError::BadDiagram(format!("cocone does not commute at {}", s.morphism(u).name)));
            }
        }
        for o in 0..self.apex.base().num_objects() {
            let col = self.diagram.evaluate(o).colimit();
            let mut map = vec![usize::MAX; col.size];
            for (j, inj) in col.injections.iter().enumerate() {
                for (x, &k) in inj.iter().enumerate() {
                    let y = self.legs[j].apply(o, x);
                    if map[k] != usize::MAX && map[k] != y {
                        return Err(PresheafError::BadDiagram("cocone map is not well defined".into()));
                    }
                    map[k] = y;
                }
            }
            if !is_bijection(&map, self.apex.size(o)) {
                return Err(PresheafError::BadDiagram(format!(
                    "cocone is not a colimit at {}",
                    self.apex.base().object_name(o)
                )));
            }
        }
        Ok(())
    }
}

pub enum LimitShape {
    Terminal(Arc<FinCat>),
    Product(Vec<Arc<Presheaf>>),
    Equalizer(PresheafMap, PresheafMap),
    /// `f: a → c`, `g: b → c`.
    Pullback(PresheafMap, PresheafMap),
}

pub enum ColimitShape {
    Initial(Arc<FinCat>),
    Coproduct(Vec<Arc<Presheaf>>),
    Coequalizer(PresheafMap, PresheafMap),
    /// `f: c → a`, `g: c → b`.
    Pushout(PresheafMap, PresheafMap),
}

fn common_base(ps: &[&Arc<Presheaf>]) -> Result<Arc<FinCat>, PresheafError> {
    let first = ps.first().ok_or_else(|| PresheafError::BadDiagram("empty diagram".into()))?;
    for p in ps {
        first.same_base(p)?;
    }
    Ok(first.base().clone())
}

fn same_presheaf(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub fn finite_limit(shape: LimitShape) -> Result<Cone, PresheafError> {
    match shape {
        LimitShape::Terminal(base) => {
            let d = PresheafDiagram::new(Arc::new(shapes::empty()), vec![], vec![])?;
            Ok(d.limit(&base))
        }
        LimitShape::Product(ps) => {
            let base = common_base(&ps.iter().collect::<Vec<_>>())?;
            let shape = Arc::new(shapes::discrete(ps.len()));
            let arrows = ps.iter().map(|p| PresheafMap::identity(p.clone())).collect();
            Ok(PresheafDiagram::new(shape, ps, arrows)?.limit(&base))
        }
        LimitShape::Equalizer(f, g) => {
            if !same_presheaf(f.source(), g.source()) || !same_presheaf(f.target(), g.target()) {
                return Err(PresheafError::BadDiagram("equalizer needs a parallel pair".into()));
            }
            let base = common_base(&[f.source(), f.target()])?;
            let objects = vec![f.source().clone(), f.target().clone()];
            let d = PresheafDiagram::from_generators(Arc::new(shapes::parallel_pair()), objects, &[("f", f), ("g", g)])?;
            Ok(d.limit(&base))
        }
        LimitShape::Pullback(f, g) => {
            if !same_presheaf(f.target(), g.target()) {
                return Err(PresheafError::BadDiagram("pullback needs a cospan".into()));
            }
            let base = common_base(&[f.source(), g.source(), f.target()])?;
            let objects = vec![f.source().clone(), f.target().clone(), g.source().clone()];
            let d = PresheafDiagram::from_generators(Arc::new(shapes::cospan()), objects, &[("l", f), ("r", g)])?;
            Ok(d.limit(&base))
        }
    }
}

pub fn finite_colimit(shape: ColimitShape) -> Result<Cocone, PresheafError> {
    match shape {
        ColimitShape::Initial(base) => {
            let d = PresheafDiagram::new(Arc::new(shapes::empty()), vec![], vec![])?;
            Ok(d.colimit(&base))
        }
        ColimitShape::Coproduct(ps) => {
            let base = common_base(&ps.iter().collect::<Vec<_>>())?;
            let shape = Arc::new(shapes::discrete(ps.len()));
            let arrows = ps.iter().map(|p| PresheafMap::identity(p.clone())).collect();
            Ok(PresheafDiagram::new(shape, ps, arrows)?.colimit(&base))
        }
        ColimitShape::Coequalizer(f, g) => {
            if !same_presheaf(f.source(), g.source()) || !same_presheaf(f.target(), g.target()) {
                return Err(PresheafError::BadDiagram("coequalizer needs a parallel pair".into()));
            }
            let base = common_base(&[f.source(), f.target()])?;
            let objects = vec![f.source().clone(), f.target().clone()];
            let d = PresheafDiagram::from_generators(Arc::new(shapes::parallel_pair()), objects, &[("f", f), ("g", g)])?;
            Ok(d.colimit(&base))
        }
        ColimitShape::Pushout(f, g) => {
            if !same_presheaf(f.source(), g.source()) {
                return Err(PresheafError::BadDiagram("pushout needs a span".into()));
            }
            let base = common_base(&[f.source(), f.target(), g.target()])?;
            let objects = vec![f.target().clone(), f.source().clone(), g.target().clone()];
            let d = PresheafDiagram::from_generators(Arc::new(shapes::span()), objects, &[("l", f), ("r", g)])?;
            Ok(d.colimit(&base))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::fixtures::gph;

    #[test]
    fn product_of_edges_has_four_vertices_and_one_edge() {
        let e = Arc::new(gph::edge());
        let cone = finite_limit(LimitShape::Product(vec![e.clone(), e])).unwrap();
        cone.verify().unwrap();
        assert_eq!(cone.apex.size(gph::V), 4);
        assert_eq!(cone.apex.size(gph::E), 1);
    }

    #[test]
    fn terminal_graph_is_a_single_loop() {
        let cone = finite_limit(LimitShape::Terminal(gph::base())).unwrap();
        cone.verify().unwrap();
        assert_eq!(cone.apex.sizes(), &[1, 1]);
    }

    #[test]
    fn equalizer_of_identity_pair_is_the_object() {
        let e = Arc::new(gph::edge());
        let id = PresheafMap::identity(e.clone());
        let cone = finite_limit(LimitShape::Equalizer(id.clone(), id)).unwrap();
        cone.verify().unwrap();
        assert!(cone.legs[0].is_isomorphism());
    }

    #[test]
    fn coequalizer_of_source_and_target_is_the_loop() {
        let d = gph::reflexive_coequalizer();
        let cocone = d.colimit(&gph::base());
        cocone.verify().unwrap();
        assert!(cocone.apex.is_isomorphic(&gph::terminal()));
        let (f, g) = gph::source_target_pair();
        let plain = finite_colimit(ColimitShape::Coequalizer(f, g)).unwrap();
        plain.verify().unwrap();
        assert_eq!(plain.apex.sizes(), &[1, 1]);
    }

    #[test]
    fn coproduct_counts() {
        let v = Arc::new(gph::vertex());
        let e = Arc::new(gph::edge());
        let cocone = finite_colimit(ColimitShape::Coproduct(vec![v.clone(), e, v])).unwrap();
        cocone.verify().unwrap();
        assert_eq!(cocone.apex.size(gph::V), 4);
        assert_eq!(cocone.apex.size(gph::E), 1);
    }

    #[test]
    fn pushout_of_identity_span_is_the_object() {
        let e = Arc::new(gph::edge());
        let id = PresheafMap::identity(e.clone());
        let cocone = finite_colimit(ColimitShape::Pushout(id.clone(), id)).unwrap();
        cocone.verify().unwrap();
        assert!(cocone.apex.is_isomorphic(&e));
    }

    #[test]
    fn initial_presheaf_is_empty() {
        let cocone = finite_colimit(ColimitShape::Initial(gph::base())).unwrap();
        cocone.verify().unwrap();
        assert_eq!(cocone.apex.total_size(), 0);
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let e = Arc::new(gph::edge());
        let r = Arc::new(crate::presheaf::fixtures::rgph::edge());
        assert!(matches!(
            finite_limit(LimitShape::Product(vec![e, r])),
            Err(PresheafError::BaseMismatch)
        ));
    }
}
