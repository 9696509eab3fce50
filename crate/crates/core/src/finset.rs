//! Finite sets as ranges `0..n`, partitions, and FinSet-valued diagrams.

use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::fincat::{FinCat, MorId, ObId};

/// A set function `0..domain → 0..codomain` stored as its table.
pub type Function = Vec<usize>;

/// An equivalence relation on `0..n` built by unions.
#[derive(Clone, Debug)]
pub struct Partition {
    uf: UnionFind<usize>,
    len: usize,
}

impl Partition {
    pub fn new(len: usize) -> Self {
        Partition { uf: UnionFind::new(len), len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Merges the classes of `a` and `b`; true if they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        self.uf.union(a, b)
    }

    pub fn find(&mut self, a: usize) -> usize {
        self.uf.find_mut(a)
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.uf.find_mut(a) == self.uf.find_mut(b)
    }

    /// Class index of every element, numbered by first occurrence, plus the
    /// number of classes.
    pub fn classes(&mut self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.len];
        let mut out = Vec::with_capacity(self.len);
        let mut count = 0;
        for x in 0..self.len {
            let r = self.uf.find_mut(x);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out.push(label[r]);
        }
        (out, count)
    }
}

pub fn is_bijection(f: &[usize], codomain: usize) -> bool {
    if f.len() != codomain {
        return false;
    }
    let mut hit = vec![false; codomain];
    for &y in f {
        if y >= codomain || hit[y] {
            return false;
        }
        hit[y] = true;
    }
    true
}

/// Mixed-radix decoding: all tuples of `radices`, last coordinate fastest.
pub fn tuples(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut k| {
        let mut t = vec![0; radices.len()];
        for i in (0..radices.len()).rev() {
            t[i] = k % radices[i];
            k /= radices[i];
        }
        t
    })
}

/// Index of a tuple under the encoding used by [`tuples`].
pub fn tuple_index(radices: &[usize], t: &[usize]) -> usize {
    t.iter().zip(radices).fold(0, |acc, (&x, &r)| acc * r + x)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetDiagramError {
    #[error("table for {0} has the wrong length or leaves its codomain")]
    BadTable(String),
    #[error("diagram does not preserve {0}")]
    NotFunctorial(String),
    #[error("diagrams are indexed by different categories")]
    IndexMismatch,
}

/// A covariant functor from a finite category into finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctor {
    shape: Arc<FinCat>,
    sizes: Vec<usize>,
    maps: Vec<Function>,
}

/// Colimit of a [`SetFunctor`]: `injections[j][x]` is the class of `x ∈ D(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetColimit {
    pub size: usize,
    pub injections: Vec<Function>,
}

/// Limit of a [`SetFunctor`] as the set of compatible families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetLimit {
    pub families: Vec<Vec<usize>>,
}

impl SetLimit {
    pub fn size(&self) -> usize {
        self.families.len()
    }

    pub fn projection(&self, j: ObId) -> Function {
        self.families.iter().map(|fam| fam[j]).collect()
    }
}

impl SetFunctor {
    pub fn new(shape: Arc<FinCat>, sizes: Vec<usize>, maps: Vec<Function>) -> Result<Self, SetDiagramError> {
        let d = Self::new_unchecked(shape, sizes, maps);
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn new_unchecked(shape: Arc<FinCat>, sizes: Vec<usize>, maps: Vec<Function>) -> Self {
        SetFunctor { shape, sizes, maps }
    }

    /// The functor with constant value `size` and identity maps.
    pub fn constant(shape: Arc<FinCat>, size: usize) -> Self {
        let sizes = vec![size; shape.num_objects()];
        let maps = vec![(0..size).collect(); shape.num_morphisms()];
        SetFunctor { shape, sizes, maps }
    }

    pub fn validate(&self) -> Result<(), SetDiagramError> {
        let c = &*self.shape;
        if self.sizes.len() != c.num_objects() || self.maps.len() != c.num_morphisms() {
            return Err(SetDiagramError::BadTable("diagram".into()));
        }
        for f in 0..c.num_morphisms() {
            let m = &self.maps[f];
            if m.len() != self.sizes[c.src(f)] || m.iter().any(|&y| y >= self.sizes[c.dst(f)]) {
                return Err(SetDiagramError::BadTable(c.morphism(f).name.clone()));
            }
        }
        for o in 0..c.num_objects() {
            if self.maps[c.identity(o)].iter().enumerate().any(|(i, &y)| i != y) {
                return Err(SetDiagramError::NotFunctorial(c.morphism(c.identity(o)).name.clone()));
            }
        }
        for f in 0..c.num_morphisms() {
            for b in 0..c.num_objects() {
                for &g in c.hom(c.dst(f), b) {
                    let gf = c.compose(g, f);
                    let (mf, mg, mgf) = (&self.maps[f], &self.maps[g], &self.maps[gf]);
                    if (0..self.sizes[c.src(f)]).any(|x| mg[mf[x]] != mgf[x]) {
                        return Err(SetDiagramError::NotFunctorial(format!(
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

    pub fn shape(&self) -> &Arc<FinCat> {
        &self.shape
    }

    pub fn size(&self, o: ObId) -> usize {
        self.sizes[o]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn map(&self, f: MorId) -> &[usize] {
        &self.maps[f]
    }

    pub fn apply(&self, f: MorId, x: usize) -> usize {
        self.maps[f][x]
    }

    /// Pointwise product of two diagrams on the same shape; pairs `(x, y)`
    /// are encoded as `x * |D₂(j)| + y`.
    pub fn product(&self, other: &SetFunctor) -> Result<SetFunctor, SetDiagramError> {
        if self.shape != other.shape {
            return Err(SetDiagramError::IndexMismatch);
        }
        let c = &*self.shape;
        let sizes = (0..c.num_objects()).map(|o| self.sizes[o] * other.sizes[o]).collect();
        let maps = (0..c.num_morphisms())
            .map(|f| {
                let (a, b) = (c.src(f), c.dst(f));
                let mut m = Vec::with_capacity(self.sizes[a] * other.sizes[a]);
                for x in 0..self.sizes[a] {
                    for y in 0..other.sizes[a] {
                        m.push(self.maps[f][x] * other.sizes[b] + other.maps[f][y]);
                    }
                }
                m
            })
            .collect();
        Ok(SetFunctor { shape: self.shape.clone(), sizes, maps })
    }

    /// Every diagram on `shape` with all sets of size `≤ max_size`, sizes in
    /// mixed-radix order. Tables are chosen for a generating set of
    /// morphisms and the rest are derived by composition.
    pub fn enumerate_all(shape: &Arc<FinCat>, max_size: usize) -> Vec<SetFunctor> {
        let c = &**shape;
        let n = c.num_morphisms();
        let mut reach = vec![false; n];
        for o in 0..c.num_objects() {
            reach[c.identity(o)] = true;
        }
        let mut gens = Vec::new();
        for f in 0..n {
            if reach[f] {
                continue;
            }
            gens.push(f);
            reach[f] = true;
            loop {
                let mut changed = false;
                for f in 0..n {
                    for g in 0..n {
                        if reach[f] && reach[g] {
                            if let Some(h) = c.try_compose(g, f) {
                                if !reach[h] {
                                    reach[h] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        let mut out = Vec::new();
        for sizes in tuples(&vec![max_size + 1; c.num_objects()]) {
            let radices: Vec<usize> =
                gens.iter().map(|&f| sizes[c.dst(f)].pow(sizes[c.src(f)] as u32)).collect();
            'choice: for choice in tuples(&radices) {
                let mut maps: Vec<Option<Function>> = vec![None; n];
                for o in 0..c.num_objects() {
                    maps[c.identity(o)] = Some((0..sizes[o]).collect());
                }
                for (&f, &k) in gens.iter().zip(&choice) {
                    let (dom, cod) = (sizes[c.src(f)], sizes[c.dst(f)]);
                    let mut t = vec![0; dom];
                    let mut k = k;
                    for x in (0..dom).rev() {
                        t[x] = k % cod;
                        k /= cod;
                    }
                    maps[f] = Some(t);
                }
                loop {
                    let mut changed = false;
                    for f in 0..n {
                        for g in 0..n {
                            let Some(h) = c.try_compose(g, f) else { continue };
                            let (Some(mf), Some(mg)) = (&maps[f], &maps[g]) else { continue };
                            let t: Function = mf.iter().map(|&x| mg[x]).collect();
                            match &maps[h] {
                                Some(old) if *old != t => continue 'choice,
                                Some(_) => {}
                                None => {
                                    maps[h] = Some(t);
                                    changed = true;
                                }
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                let maps: Vec<Function> = maps.into_iter().map(|m| m.expect("generators reach every morphism")).collect();
                let d = SetFunctor { shape: shape.clone(), sizes: sizes.clone(), maps };
                if d.validate().is_ok() {
                    out.push(d);
                }
            }
        }
        out
    }

    /// Colimit: disjoint union of all values modulo `x ~ D(f)(x)`.
    pub fn colimit(&self) -> SetColimit {
        let c = &*self.shape;
        let mut offsets = Vec::with_capacity(self.sizes.len());
        let mut total = 0;
        for &s in &self.sizes {
            offsets.push(total);
            total += s;
        }
        let mut part = Partition::new(total);
        for f in 0..c.num_morphisms() {
            let (a, b) = (c.src(f), c.dst(f));
            for (x, &y) in self.maps[f].iter().enumerate() {
                part.union(offsets[a] + x, offsets[b] + y);
            }
        }
        let (classes, size) = part.classes();
        let injections = (0..self.sizes.len())
            .map(|o| classes[offsets[o]..offsets[o] + self.sizes[o]].to_vec())
            .collect();
        SetColimit { size, injections }
    }

    /// Limit: families `(x_j)` with `D(f)(x_src) = x_dst` for every `f`.
    pub fn limit(&self) -> SetLimit {
        let c = &*self.shape;
        let n = c.num_objects();
        let mut families = Vec::new();
        let mut current = vec![0usize; n];
        self.limit_search(0, &mut current, &mut families);
        debug_assert!(families.iter().all(|fam| (0..c.num_morphisms())
            .all(|f| self.maps[f][fam[c.src(f)]] == fam[c.dst(f)])));
        SetLimit { families }
    }

    fn limit_search(&self, o: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let c = &*self.shape;
        if o == c.num_objects() {
            out.push(current.clone());
            return;
        }
        'cand: for x in 0..self.sizes[o] {
            current[o] = x;
            for a in 0..=o {
                for &f in c.hom(a, o).iter().chain(if a < o { c.hom(o, a) } else { &[] }) {
                    let (s, t) = (c.src(f), c.dst(f));
                    if self.maps[f][current[s]] != current[t] {
                        continue 'cand;
                    }
                }
            }
            self.limit_search(o + 1, current, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;

    #[test]
    fn partition_classes_are_numbered_by_first_occurrence() {
        let mut p = Partition::new(5);
        p.union(3, 1);
        p.union(4, 0);
        let (classes, n) = p.classes();
        assert_eq!(n, 3);
        assert_eq!(classes, vec![0, 1, 2, 1, 0]);
    }

    #[test]
    fn coequalizer_of_sets() {
        // f, g: 2 → 3 with f = [0, 1], g = [1, 2]: everything collapses
        let shape = Arc::new(shapes::parallel_pair());
        let f = shape.morphism_id("f").unwrap();
        let g = shape.morphism_id("g").unwrap();
        let mut maps = vec![Vec::new(); shape.num_morphisms()];
        maps[shape.identity(0)] = vec![0, 1];
        maps[shape.identity(1)] = vec![0, 1, 2];
        maps[f] = vec![0, 1];
        maps[g] = vec![1, 2];
        let d = SetFunctor::new(shape.clone(), vec![2, 3], maps).unwrap();
        assert_eq!(d.colimit().size, 1);
        // equalizer-like limit: x with f x = g x doesn't exist, families (x, f x) with f x = g x
        assert_eq!(d.limit().size(), 0);
    }

    #[test]
    fn limit_of_discrete_is_product() {
        let shape = Arc::new(shapes::discrete(2));
        let maps = vec![vec![0, 1], vec![0, 1, 2]];
        let d = SetFunctor::new(shape, vec![2, 3], maps).unwrap();
        assert_eq!(d.limit().size(), 6);
        assert_eq!(d.colimit().size, 5);
    }

    #[test]
    fn enumeration_counts_reflexive_pairs() {
        // section s: Q → P with retractions f, g; counted by hand per (|P|, |Q|)
        let shape = Arc::new(shapes::reflexive_pair());
        assert_eq!(SetFunctor::enumerate_all(&shape, 3).len(), 1 + 1 + 2 + 2 + 3 + 24 + 6);
        let arrow = Arc::new(shapes::free_arrow());
        // Σ_{a,b ≤ 2} b^a, grouped by a: 3 + 3 + 5
        assert_eq!(SetFunctor::enumerate_all(&arrow, 2).len(), 11);
    }

    #[test]
    fn tuple_encoding_roundtrips() {
        let r = [2, 3, 4];
        for (k, t) in tuples(&r).enumerate() {
            assert_eq!(tuple_index(&r, &t), k);
        }
    }
}
