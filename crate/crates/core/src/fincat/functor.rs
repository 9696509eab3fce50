use std::sync::Arc;

use super::{CategoryError, FinCat, MorId, ObId};

/// A functor between finite categories, stored as object and morphism maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunctor {
    source: Arc<FinCat>,
    target: Arc<FinCat>,
    ob_map: Vec<ObId>,
    mor_map: Vec<MorId>,
}

impl FinFunctor {
    pub fn new(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        ob_map: Vec<ObId>,
        mor_map: Vec<MorId>,
    ) -> Result<Self, CategoryError> {
        let f = FinFunctor { source, target, ob_map, mor_map };
        f.validate()?;
        Ok(f)
    }

    pub(crate) fn new_unchecked(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        ob_map: Vec<ObId>,
        mor_map: Vec<MorId>,
    ) -> Self {
        FinFunctor { source, target, ob_map, mor_map }
    }

    pub fn identity(c: Arc<FinCat>) -> Self {
        let ob_map = (0..c.num_objects()).collect();
        let mor_map = (0..c.num_morphisms()).collect();
        FinFunctor { source: c.clone(), target: c, ob_map, mor_map }
    }

    /// Builds a functor from name maps; identities may be omitted.
    pub fn from_names(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Self, CategoryError> {
        let mut ob_map = vec![usize::MAX; source.num_objects()];
        for (a, b) in objects {
            let a = source.object_id(a).ok_or_else(|| CategoryError::UnknownObject(a.to_string()))?;
            let b = target.object_id(b).ok_or_else(|| CategoryError::UnknownObject(b.to_string()))?;
            ob_map[a] = b;
        }
        if let Some(o) = ob_map.iter().position(|&x| x == usize::MAX) {
            return Err(CategoryError::NotFunctorial(format!("object {} is unmapped", source.object_name(o))));
        }
        let mut mor_map = vec![usize::MAX; source.num_morphisms()];
        for o in 0..source.num_objects() {
            mor_map[source.identity(o)] = target.identity(ob_map[o]);
        }
        for (f, g) in morphisms {
            let f = source.morphism_id(f).ok_or_else(|| CategoryError::UnknownMorphism(f.to_string()))?;
            let g = target.morphism_id(g).ok_or_else(|| CategoryError::UnknownMorphism(g.to_string()))?;
            mor_map[f] = g;
        }
        if let Some(f) = mor_map.iter().position(|&x| x == usize::MAX) {
            return Err(CategoryError::NotFunctorial(format!(
                "morphism {} is unmapped",
                source.morphism(f).name
            )));
        }
        Self::new(source, target, ob_map, mor_map)
    }

    pub fn validate(&self) -> Result<(), CategoryError> {
        let (s, t) = (&*self.source, &*self.target);
        if self.ob_map.len() != s.num_objects() || self.mor_map.len() != s.num_morphisms() {
            return Err(CategoryError::NotFunctorial("map tables have the wrong length".into()));
        }
        if self.ob_map.iter().any(|&o| o >= t.num_objects()) || self.mor_map.iter().any(|&m| m >= t.num_morphisms()) {
            return Err(CategoryError::NotFunctorial("map leaves the target".into()));
        }
        for f in 0..s.num_morphisms() {
            let g = self.mor_map[f];
            if t.src(g) != self.ob_map[s.src(f)] || t.dst(g) != self.ob_map[s.dst(f)] {
                return Err(CategoryError::NotFunctorial(format!("{} is sent to a mistyped morphism", s.morphism(f).name)));
            }
        }
        for o in 0..s.num_objects() {
            if self.mor_map[s.identity(o)] != t.identity(self.ob_map[o]) {
                return Err(CategoryError::NotFunctorial(format!("identity of {}", s.object_name(o))));
            }
        }
        for f in 0..s.num_morphisms() {
            for c in 0..s.num_objects() {
                for &g in s.hom(s.dst(f), c) {
                    if self.mor_map[s.compose(g, f)] != t.compose(self.mor_map[g], self.mor_map[f]) {
                        return Err(CategoryError::NotFunctorial(format!(
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

    pub fn source(&self) -> &Arc<FinCat> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCat> {
        &self.target
    }

    pub fn ob(&self, o: ObId) -> ObId {
        self.ob_map[o]
    }

    pub fn mor(&self, f: MorId) -> MorId {
        self.mor_map[f]
    }

    pub fn ob_map(&self) -> &[ObId] {
        &self.ob_map
    }

    pub fn mor_map(&self) -> &[MorId] {
        &self.mor_map
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinFunctor) -> Result<FinFunctor, CategoryError> {
        if *self.target != *other.source {
            return Err(CategoryError::NotFunctorial("functors are not composable".into()));
        }
        let ob_map = self.ob_map.iter().map(|&o| other.ob_map[o]).collect();
        let mor_map = self.mor_map.iter().map(|&m| other.mor_map[m]).collect();
        Ok(FinFunctor::new_unchecked(self.source.clone(), other.target.clone(), ob_map, mor_map))
    }

    /// The same maps viewed as `source^op → target^op`.
    pub fn opposite(&self) -> FinFunctor {
        FinFunctor::new_unchecked(
            Arc::new(self.source.opposite()),
            Arc::new(self.target.opposite()),
            self.ob_map.clone(),
            self.mor_map.clone(),
        )
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.target.num_objects()];
        self.ob_map.iter().all(|&o| !std::mem::replace(&mut seen[o], true))
    }

    /// Full and faithful: bijective on every hom-set.
    pub fn is_fully_faithful(&self) -> bool {
        let s = &*self.source;
        (0..s.num_objects()).all(|a| {
            (0..s.num_objects()).all(|b| {
                let image: Vec<MorId> = s.hom(a, b).iter().map(|&f| self.mor_map[f]).collect();
                let mut dedup = image.clone();
                dedup.sort_unstable();
                dedup.dedup();
                dedup.len() == image.len() && image.len() == self.target.hom(self.ob_map[a], self.ob_map[b]).len()
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;

    #[test]
    fn identity_functor_is_valid() {
        let c = Arc::new(shapes::reflexive_pair());
        FinFunctor::identity(c).validate().unwrap();
    }

    #[test]
    fn collapsing_parallel_pair_is_functorial() {
        let pp = Arc::new(shapes::parallel_pair());
        let arrow = Arc::new(shapes::free_arrow());
        let f = FinFunctor::from_names(pp, arrow, &[("P", "a"), ("Q", "b")], &[("f", "f"), ("g", "f")]).unwrap();
        assert_eq!(f.ob(0), 0);
        assert!(!f.is_fully_faithful());
    }

    #[test]
    fn non_functorial_map_is_rejected() {
        // sending the section to an identity cannot respect typing
        let rp = Arc::new(shapes::reflexive_pair());
        let t = Arc::new(shapes::terminal());
        let ok = FinFunctor::from_names(
            rp.clone(),
            t.clone(),
            &[("P", "*"), ("Q", "*")],
            &[("f", "id_*"), ("g", "id_*"), ("s", "id_*"), ("sf", "id_*"), ("sg", "id_*")],
        );
        assert!(ok.is_ok());
        let arrow = Arc::new(shapes::free_arrow());
        let bad = FinFunctor::from_names(rp, arrow, &[("P", "a"), ("Q", "b")], &[("f", "f"), ("g", "f"), ("s", "f")]);
        assert!(bad.is_err());
    }
}
