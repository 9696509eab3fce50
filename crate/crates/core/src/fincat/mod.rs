//! Finite categories given by explicit tables, and functors between them.
//!
//! Objects and morphisms are addressed by dense indices ([`ObId`], [`MorId`]);
//! their names are opaque strings used only for input and display. Composition
//! is stored per hom-triple `(a, b, c)` as a dense block, so lookups are O(1)
//! and categories with a few thousand morphisms stay cheap.

mod constructions;
mod elements;
mod functor;
mod sifted;
pub mod shapes;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use constructions::{FamCompletion, IdempotentCompletion};
pub use elements::{category_of_elements, ElementCategory};
pub use functor::FinFunctor;
pub use sifted::{is_sifted, Cospan, SiftedVerdict, SiftedWitness};

pub type ObId = usize;
pub type MorId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("composition is not associative on ({h}, {g}, {f})")]
    AssocViolation { h: String, g: String, f: String },
    #[error("identity law fails for {0}")]
    IdentityViolation(String),
    #[error("composite {g}∘{f} is ill-typed")]
    IllTypedComposite { g: String, f: String },
    #[error("composite {g}∘{f} is not defined")]
    MissingComposite { g: String, f: String },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("composite {g}∘{f} given twice with different results")]
    ConflictingComposite { g: String, f: String },
    #[error("functor is not well defined: {0}")]
    NotFunctorial(String),
    #[error("family size bound must be at least 1, got {0}")]
    BoundTooSmall(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: ObId,
    pub dst: ObId,
}

/// A finite category with a total composition table on composable pairs.
#[derive(Clone)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    homs: Vec<Vec<MorId>>,
    hom_pos: Vec<usize>,
    blocks: HashMap<(ObId, ObId, ObId), Vec<MorId>>,
    ob_index: HashMap<String, ObId>,
    mor_index: HashMap<String, MorId>,
}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCat")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.len())
            .finish()
    }
}

impl PartialEq for FinCat {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.blocks == other.blocks
    }
}

impl Eq for FinCat {}

impl FinCat {
    /// Starts a presentation with implicit identities.
    pub fn builder() -> FinCatBuilder {
        FinCatBuilder::default()
    }

    /// Builds a category from complete tables and checks every axiom.
    ///
    /// `morphisms` must include the identities named by `identities`;
    /// `compose(g, f)` is called on every composable pair and must return `g∘f`.
    pub fn from_parts<F>(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        compose: F,
    ) -> Result<Self, CategoryError>
    where
        F: FnMut(MorId, MorId) -> MorId,
    {
        let cat = Self::assemble(objects, morphisms, identities, compose)?;
        cat.validate()?;
        Ok(cat)
    }

    /// Like [`FinCat::from_parts`] but skips the exhaustive axiom checks.
    /// Only for generators whose tables are correct by construction.
    pub(crate) fn from_parts_unchecked<F>(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        compose: F,
    ) -> Self
    where
        F: FnMut(MorId, MorId) -> MorId,
    {
        Self::assemble(objects, morphisms, identities, compose)
            .expect("generated category has a malformed composition table")
    }

    fn assemble<F>(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        mut compose: F,
    ) -> Result<Self, CategoryError>
    where
        F: FnMut(MorId, MorId) -> MorId,
    {
        let n = objects.len();
        let mut ob_index = HashMap::with_capacity(n);
        for (i, o) in objects.iter().enumerate() {
            if ob_index.insert(o.clone(), i).is_some() {
                return Err(CategoryError::DuplicateName(o.clone()));
            }
        }
        let mut mor_index = HashMap::with_capacity(morphisms.len());
        let mut homs = vec![Vec::new(); n * n];
        let mut hom_pos = Vec::with_capacity(morphisms.len());
        for (i, m) in morphisms.iter().enumerate() {
            if m.src >= n || m.dst >= n {
                return Err(CategoryError::UnknownObject(format!("{}: {} -> {}", m.name, m.src, m.dst)));
            }
            if mor_index.insert(m.name.clone(), i).is_some() {
                return Err(CategoryError::DuplicateName(m.name.clone()));
            }
            let hom = &mut homs[m.src * n + m.dst];
            hom_pos.push(hom.len());
            hom.push(i);
        }
        if identities.len() != n {
            return Err(CategoryError::IdentityViolation("identity table has the wrong length".into()));
        }
        for (o, &id) in identities.iter().enumerate() {
            let m = morphisms
                .get(id)
                .ok_or_else(|| CategoryError::UnknownMorphism(id.to_string()))?;
            if m.src != o || m.dst != o {
                return Err(CategoryError::IdentityViolation(m.name.clone()));
            }
        }
        let mut blocks = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                let hab = &homs[a * n + b];
                if hab.is_empty() {
                    continue;
                }
                for c in 0..n {
                    let hbc = &homs[b * n + c];
                    if hbc.is_empty() {
                        continue;
                    }
                    let mut block = Vec::with_capacity(hab.len() * hbc.len());
                    for &f in hab {
                        for &g in hbc {
                            let h = compose(g, f);
                            let ok = morphisms.get(h).map(|m| m.src == a && m.dst == c).unwrap_or(false);
                            if !ok {
                                return Err(CategoryError::IllTypedComposite {
                                    g: morphisms[g].name.clone(),
                                    f: morphisms[f].name.clone(),
                                });
                            }
                            block.push(h);
                        }
                    }
                    blocks.insert((a, b, c), block);
                }
            }
        }
        Ok(FinCat { objects, morphisms, identities, homs, hom_pos, blocks, ob_index, mor_index })
    }

    /// Exhaustive check of the identity and associativity laws.
    pub fn validate(&self) -> Result<(), CategoryError> {
        for (f, m) in self.morphisms.iter().enumerate() {
            if self.compose(self.identities[m.dst], f) != f || self.compose(f, self.identities[m.src]) != f {
                return Err(CategoryError::IdentityViolation(m.name.clone()));
            }
        }
        let n = self.objects.len();
        for a in 0..n {
            for b in 0..n {
                for &f in self.hom(a, b) {
                    for c in 0..n {
                        for &g in self.hom(b, c) {
                            let gf = self.compose(g, f);
                            for d in 0..n {
                                for &h in self.hom(c, d) {
                                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                                        return Err(CategoryError::AssocViolation {
                                            h: self.morphisms[h].name.clone(),
                                            g: self.morphisms[g].name.clone(),
                                            f: self.morphisms[f].name.clone(),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_name(&self, o: ObId) -> &str {
        &self.objects[o]
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn src(&self, f: MorId) -> ObId {
        self.morphisms[f].src
    }

    pub fn dst(&self, f: MorId) -> ObId {
        self.morphisms[f].dst
    }

    pub fn identity(&self, o: ObId) -> MorId {
        self.identities[o]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identities[self.src(f)] == f
    }

    pub fn object_id(&self, name: &str) -> Option<ObId> {
        self.ob_index.get(name).copied()
    }

    pub fn morphism_id(&self, name: &str) -> Option<MorId> {
        self.mor_index.get(name).copied()
    }

    /// Position of `f` inside `hom(src f, dst f)`.
    pub fn hom_index(&self, f: MorId) -> usize {
        self.hom_pos[f]
    }

    pub fn hom(&self, a: ObId, b: ObId) -> &[MorId] {
        &self.homs[a * self.objects.len() + b]
    }

    /// `g∘f`; panics if the pair is not composable.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.try_compose(g, f).expect("morphisms are not composable")
    }

    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        let (mf, mg) = (&self.morphisms[f], &self.morphisms[g]);
        if mf.dst != mg.src {
            return None;
        }
        let width = self.hom(mg.src, mg.dst).len();
        let block = self.blocks.get(&(mf.src, mf.dst, mg.dst))?;
        Some(block[self.hom_pos[f] * width + self.hom_pos[g]])
    }

    pub fn is_idempotent(&self, e: MorId) -> bool {
        self.src(e) == self.dst(e) && self.compose(e, e) == e
    }

    pub fn idempotents(&self) -> Vec<MorId> {
        (0..self.morphisms.len()).filter(|&e| self.is_idempotent(e)).collect()
    }

    /// A splitting `(r, s)` of `e` with `s∘r = e` and `r∘s = id`, if one exists.
    pub fn split_of(&self, e: MorId) -> Option<(MorId, MorId)> {
        let c = self.src(e);
        for d in 0..self.num_objects() {
            for &r in self.hom(c, d) {
                for &s in self.hom(d, c) {
                    if self.compose(s, r) == e && self.compose(r, s) == self.identity(d) {
                        return Some((r, s));
                    }
                }
            }
        }
        None
    }

    pub fn idempotents_split(&self) -> bool {
        self.idempotents().into_iter().all(|e| self.split_of(e).is_some())
    }

    /// An isomorphism `a → b`, with its inverse.
    pub fn isomorphism(&self, a: ObId, b: ObId) -> Option<(MorId, MorId)> {
        for &f in self.hom(a, b) {
            for &g in self.hom(b, a) {
                if self.compose(g, f) == self.identity(a) && self.compose(f, g) == self.identity(b) {
                    return Some((f, g));
                }
            }
        }
        None
    }

    /// Checks that `(x, y) --i, j--> s` is a binary coproduct by comparing
    /// `hom(s, z)` with `hom(x, z) × hom(y, z)` for every `z`.
    pub fn is_coproduct(&self, x: ObId, y: ObId, s: ObId, i: MorId, j: MorId) -> bool {
        if self.src(i) != x || self.src(j) != y || self.dst(i) != s || self.dst(j) != s {
            return false;
        }
        for z in 0..self.num_objects() {
            let mut seen = std::collections::HashSet::new();
            for &h in self.hom(s, z) {
                if !seen.insert((self.compose(h, i), self.compose(h, j))) {
                    return false;
                }
            }
            if seen.len() != self.hom(x, z).len() * self.hom(y, z).len() {
                return false;
            }
        }
        true
    }

    /// Checks that `s` with no injections is initial (the empty coproduct).
    pub fn is_initial(&self, s: ObId) -> bool {
        (0..self.num_objects()).all(|z| self.hom(s, z).len() == 1)
    }

    pub fn opposite(&self) -> FinCat {
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| Morphism { name: m.name.clone(), src: m.dst, dst: m.src })
            .collect();
        FinCat::from_parts_unchecked(self.objects.clone(), morphisms, self.identities.clone(), |g, f| {
            self.compose(f, g)
        })
    }

    /// Connected components of the underlying graph, as object lists.
    pub fn components(&self) -> Vec<Vec<ObId>> {
        let n = self.num_objects();
        let mut uf = crate::finset::Partition::new(n);
        for m in &self.morphisms {
            uf.union(m.src, m.dst);
        }
        let (classes, count) = uf.classes();
        let mut out = vec![Vec::new(); count];
        for (o, c) in classes.into_iter().enumerate() {
            out[c].push(o);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Counts hom-set sizes; two categories related by an equivalence that is
    /// bijective on objects have equal tables.
    pub fn hom_counts(&self) -> Vec<Vec<usize>> {
        let n = self.num_objects();
        (0..n).map(|a| (0..n).map(|b| self.hom(a, b).len()).collect()).collect()
    }
}

/// Presentation of a category by named objects, non-identity morphisms and
/// the composites of non-identity pairs. Identities are implicit and named
/// `id_<object>`.
#[derive(Default, Clone, Debug)]
pub struct FinCatBuilder {
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    composites: Vec<(String, String, String)>,
}

impl FinCatBuilder {
    pub fn object(mut self, name: impl Into<String>) -> Self {
        self.objects.push(name.into());
        self
    }

    pub fn objects<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.objects.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn morphism(mut self, name: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        self.morphisms.push((name.into(), src.into(), dst.into()));
        self
    }

    /// Records `g∘f = h`.
    pub fn compose(mut self, g: impl Into<String>, f: impl Into<String>, h: impl Into<String>) -> Self {
        self.composites.push((g.into(), f.into(), h.into()));
        self
    }

    pub fn build(self) -> Result<FinCat, CategoryError> {
        let mut ob_index = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if ob_index.insert(o.clone(), i).is_some() {
                return Err(CategoryError::DuplicateName(o.clone()));
            }
        }
        let mut morphisms: Vec<Morphism> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| Morphism { name: format!("id_{o}"), src: i, dst: i })
            .collect();
        let identities: Vec<MorId> = (0..self.objects.len()).collect();
        for (name, src, dst) in &self.morphisms {
            let src = *ob_index.get(src).ok_or_else(|| CategoryError::UnknownObject(src.clone()))?;
            let dst = *ob_index.get(dst).ok_or_else(|| CategoryError::UnknownObject(dst.clone()))?;
            morphisms.push(Morphism { name: name.clone(), src, dst });
        }
        let mut mor_index = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            if mor_index.insert(m.name.clone(), i).is_some() {
                return Err(CategoryError::DuplicateName(m.name.clone()));
            }
        }
        let lookup = |n: &String| mor_index.get(n).copied().ok_or_else(|| CategoryError::UnknownMorphism(n.clone()));
        let mut table: HashMap<(MorId, MorId), MorId> = HashMap::new();
        for (g, f, h) in &self.composites {
            let (gi, fi, hi) = (lookup(g)?, lookup(f)?, lookup(h)?);
            let (mf, mg, mh) = (&morphisms[fi], &morphisms[gi], &morphisms[hi]);
            if mf.dst != mg.src || mh.src != mf.src || mh.dst != mg.dst {
                return Err(CategoryError::IllTypedComposite { g: g.clone(), f: f.clone() });
            }
            let is_id = |m: MorId| identities.get(morphisms[m].src) == Some(&m);
            if (is_id(gi) && hi != fi) || (is_id(fi) && hi != gi) {
                let culprit = if is_id(gi) { f } else { g };
                return Err(CategoryError::IdentityViolation(culprit.clone()));
            }
            if let Some(prev) = table.insert((gi, fi), hi) {
                if prev != hi {
                    return Err(CategoryError::ConflictingComposite { g: g.clone(), f: f.clone() });
                }
            }
        }
        // every composable non-identity pair must be covered
        for (fi, mf) in morphisms.iter().enumerate() {
            for (gi, mg) in morphisms.iter().enumerate() {
                if mf.dst != mg.src || identities[mf.src] == fi || identities[mg.src] == gi {
                    continue;
                }
                if !table.contains_key(&(gi, fi)) {
                    return Err(CategoryError::MissingComposite {
                        g: mg.name.clone(),
                        f: mf.name.clone(),
                    });
                }
            }
        }
        let ids = identities.clone();
        FinCat::from_parts(self.objects, morphisms, identities, |g, f| {
            if ids.contains(&g) {
                f
            } else if ids.contains(&f) {
                g
            } else {
                table[&(g, f)]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_category_is_valid() {
        let c = FinCat::builder().object("*").build().unwrap();
        assert_eq!(c.num_objects(), 1);
        assert_eq!(c.num_morphisms(), 1);
        assert!(c.is_identity(0));
    }

    #[test]
    fn free_arrow_is_valid() {
        let c = FinCat::builder().objects(["a", "b"]).morphism("f", "a", "b").build().unwrap();
        assert_eq!(c.hom(0, 1).len(), 1);
        assert!(c.hom(1, 0).is_empty());
    }

    #[test]
    fn involution_monoid_is_valid() {
        let c = FinCat::builder().object("*").morphism("x", "*", "*").compose("x", "x", "id_*").build().unwrap();
        let x = c.morphism_id("x").unwrap();
        assert_eq!(c.compose(x, x), c.identity(0));
        // 2^3 composable triples all associate
        assert!(c.validate().is_ok());
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // x∘x = y, y∘x = x, x∘y = y, y∘y = y: (x∘x)∘x = y∘x = x but x∘(x∘x) = x∘y = y
        let err = FinCat::builder()
            .object("*")
            .morphism("x", "*", "*")
            .morphism("y", "*", "*")
            .compose("x", "x", "y")
            .compose("y", "x", "x")
            .compose("x", "y", "y")
            .compose("y", "y", "y")
            .build()
            .unwrap_err();
        assert!(matches!(err, CategoryError::AssocViolation { .. }), "{err}");
    }

    #[test]
    fn ill_typed_composite_is_rejected() {
        let err = FinCat::builder()
            .objects(["a", "b"])
            .morphism("f", "a", "b")
            .compose("f", "f", "f")
            .build()
            .unwrap_err();
        assert!(matches!(err, CategoryError::IllTypedComposite { .. }));
    }

    #[test]
    fn identity_violation_is_rejected() {
        let err = FinCat::builder()
            .object("*")
            .morphism("x", "*", "*")
            .compose("x", "x", "x")
            .compose("id_*", "x", "id_*")
            .build()
            .unwrap_err();
        assert_eq!(err, CategoryError::IdentityViolation("x".into()));
    }

    #[test]
    fn missing_composite_is_rejected() {
        let err = FinCat::builder().object("*").morphism("x", "*", "*").build().unwrap_err();
        assert!(matches!(err, CategoryError::MissingComposite { .. }));
    }

    #[test]
    fn opposite_reverses_composition() {
        let c = shapes::reflexive_pair();
        let op = c.opposite();
        op.validate().unwrap();
        let f = c.morphism_id("f").unwrap();
        let s = c.morphism_id("s").unwrap();
        assert_eq!(op.compose(s, f), c.compose(f, s));
        assert_eq!(op.src(f), c.dst(f));
    }
}
