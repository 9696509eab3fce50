//! Free finite-coproduct completion and idempotent splitting.

use std::collections::HashMap;
use std::sync::Arc;

use super::{CategoryError, FinCat, FinFunctor, MorId, Morphism, ObId};

/// `Fam C` truncated to families of at most `bound` objects.
///
/// Families are sorted multisets, so isomorphic reorderings coincide. A
/// morphism `(A_i) → (B_j)` is a reindexing `φ` with components
/// `A_i → B_φ(i)`. Coproducts exist only while total size stays `≤ bound`.
#[derive(Clone, Debug)]
pub struct FamCompletion {
    pub category: Arc<FinCat>,
    pub inclusion: FinFunctor,
    pub bound: usize,
    pub families: Vec<Vec<ObId>>,
    family_index: HashMap<Vec<ObId>, ObId>,
    map_index: HashMap<FamKey, MorId>,
}

/// `(source, target, reindexing, components)`.
type FamKey = (ObId, ObId, Vec<usize>, Vec<MorId>);

fn multisets(n: usize, size: usize) -> Vec<Vec<ObId>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<ObId>, out: &mut Vec<Vec<ObId>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for o in start..n {
            cur.push(o);
            go(o, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

impl FamCompletion {
    pub fn new(base: &Arc<FinCat>, bound: usize) -> Result<Self, CategoryError> {
        if bound < 1 {
            return Err(CategoryError::BoundTooSmall(bound));
        }
        let c = &**base;
        let families: Vec<Vec<ObId>> = (0..=bound).flat_map(|k| multisets(c.num_objects(), k)).collect();
        let family_index: HashMap<Vec<ObId>, ObId> =
            families.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let objects: Vec<String> = families
            .iter()
            .map(|fam| format!("[{}]", fam.iter().map(|&o| c.object_name(o)).collect::<Vec<_>>().join(",")))
            .collect();

        let mut keys: Vec<FamKey> = Vec::new();
        for (x, a) in families.iter().enumerate() {
            for (y, b) in families.iter().enumerate() {
                let mut phi = vec![0; a.len()];
                let mut comps = vec![0; a.len()];
                Self::enumerate_maps(c, a, b, 0, &mut phi, &mut comps, &mut |phi, comps| {
                    keys.push((x, y, phi.to_vec(), comps.to_vec()));
                });
            }
        }
        let index: HashMap<FamKey, MorId> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let morphisms: Vec<Morphism> = keys
            .iter()
            .map(|(x, y, phi, comps)| {
                let parts: Vec<String> =
                    phi.iter().zip(comps).map(|(j, &f)| format!("{j}:{}", c.morphism(f).name)).collect();
                Morphism { name: format!("{}->{}({})", objects[*x], objects[*y], parts.join(",")), src: *x, dst: *y }
            })
            .collect();
        let identities: Vec<MorId> = families
            .iter()
            .enumerate()
            .map(|(x, a)| {
                let phi: Vec<usize> = (0..a.len()).collect();
                let comps: Vec<MorId> = a.iter().map(|&o| c.identity(o)).collect();
                index[&(x, x, phi, comps)]
            })
            .collect();
        let category = FinCat::from_parts_unchecked(objects, morphisms, identities, |g, f| {
            let (x, _, phi, fs) = &keys[f];
            let (_, z, psi, gs) = &keys[g];
            let chi: Vec<usize> = phi.iter().map(|&j| psi[j]).collect();
            let hs: Vec<MorId> = phi.iter().zip(fs).map(|(&j, &fi)| c.compose(gs[j], fi)).collect();
            index[&(*x, *z, chi, hs)]
        });
        let category = Arc::new(category);
        let ob_map: Vec<ObId> = (0..c.num_objects()).map(|o| family_index[&vec![o]]).collect();
        let mor_map: Vec<MorId> = (0..c.num_morphisms())
            .map(|f| index[&(ob_map[c.src(f)], ob_map[c.dst(f)], vec![0], vec![f])])
            .collect();
        let inclusion = FinFunctor::new_unchecked(base.clone(), category.clone(), ob_map, mor_map);
        Ok(FamCompletion { category, inclusion, bound, families, family_index, map_index: index })
    }

    fn enumerate_maps(
        c: &FinCat,
        a: &[ObId],
        b: &[ObId],
        i: usize,
        phi: &mut Vec<usize>,
        comps: &mut Vec<MorId>,
        emit: &mut dyn FnMut(&[usize], &[MorId]),
    ) {
        if i == a.len() {
            emit(phi, comps);
            return;
        }
        for (j, &bj) in b.iter().enumerate() {
            for &f in c.hom(a[i], bj) {
                phi[i] = j;
                comps[i] = f;
                Self::enumerate_maps(c, a, b, i + 1, phi, comps, emit);
            }
        }
    }

    pub fn family(&self, x: ObId) -> &[ObId] {
        &self.families[x]
    }

    pub fn object_of(&self, family: &[ObId]) -> Option<ObId> {
        let mut key = family.to_vec();
        key.sort_unstable();
        self.family_index.get(&key).copied()
    }

    /// The coproduct `x + y` with its injections, when it fits under the bound.
    pub fn coproduct(&self, x: ObId, y: ObId) -> Option<(ObId, MorId, MorId)> {
        let (a, b) = (&self.families[x], &self.families[y]);
        if a.len() + b.len() > self.bound {
            return None;
        }
        let mut merged: Vec<ObId> = a.iter().chain(b).copied().collect();
        merged.sort_unstable();
        let s = self.family_index[&merged];
        // place a's entries first among equal objects, then b's
        let mut taken = vec![false; merged.len()];
        let mut place = |o: ObId| {
            let j = (0..merged.len()).find(|&j| merged[j] == o && !taken[j]).unwrap();
            taken[j] = true;
            j
        };
        let phi_a: Vec<usize> = a.iter().map(|&o| place(o)).collect();
        let phi_b: Vec<usize> = b.iter().map(|&o| place(o)).collect();
        let base = self.inclusion.source();
        let ids = |fam: &[ObId]| fam.iter().map(|&o| base.identity(o)).collect::<Vec<_>>();
        let i = self.map_index[&(x, s, phi_a, ids(a))];
        let j = self.map_index[&(y, s, phi_b, ids(b))];
        Some((s, i, j))
    }
}

/// Cauchy completion: objects `(c, e)` for idempotents `e` on `c`.
#[derive(Clone, Debug)]
pub struct IdempotentCompletion {
    pub category: Arc<FinCat>,
    pub embedding: FinFunctor,
    /// `(object, idempotent)` for every object of the completion.
    pub pairs: Vec<(ObId, MorId)>,
    /// The underlying base morphism of every completion morphism.
    pub underlying: Vec<MorId>,
}

impl IdempotentCompletion {
    pub fn new(base: &Arc<FinCat>) -> Self {
        let c = &**base;
        let pairs: Vec<(ObId, MorId)> = (0..c.num_objects())
            .flat_map(|o| c.hom(o, o).iter().copied().filter(|&e| c.is_idempotent(e)).map(move |e| (o, e)))
            .collect();
        let objects: Vec<String> = pairs
            .iter()
            .map(|&(o, e)| {
                if c.is_identity(e) {
                    c.object_name(o).to_string()
                } else {
                    format!("({},{})", c.object_name(o), c.morphism(e).name)
                }
            })
            .collect();
        // repeated completion can regenerate an existing name
        let mut seen = std::collections::HashSet::new();
        let objects: Vec<String> = objects
            .into_iter()
            .map(|mut n| {
                while !seen.insert(n.clone()) {
                    n.push('\'');
                }
                n
            })
            .collect();
        let mut morphisms = Vec::new();
        let mut underlying = Vec::new();
        let mut index = HashMap::new();
        for (x, &(a, e)) in pairs.iter().enumerate() {
            for (y, &(b, e2)) in pairs.iter().enumerate() {
                for &f in c.hom(a, b) {
                    if c.compose(c.compose(e2, f), e) == f {
                        index.insert((x, y, f), morphisms.len());
                        let name = if x == y && f == e {
                            format!("id_{}", objects[x])
                        } else if c.is_identity(e) && c.is_identity(e2) {
                            c.morphism(f).name.clone()
                        } else {
                            format!("{}:{}->{}", c.morphism(f).name, objects[x], objects[y])
                        };
                        morphisms.push(Morphism { name, src: x, dst: y });
                        underlying.push(f);
                    }
                }
            }
        }
        let mut seen_mor = std::collections::HashSet::new();
        for m in &mut morphisms {
            while !seen_mor.insert(m.name.clone()) {
                m.name.push('\'');
            }
        }
        let identities: Vec<MorId> = pairs.iter().enumerate().map(|(x, &(_, e))| index[&(x, x, e)]).collect();
        let category = FinCat::from_parts_unchecked(objects, morphisms.clone(), identities, |g, f| {
            let (x, z) = (morphisms[f].src, morphisms[g].dst);
            index[&(x, z, c.compose(underlying[g], underlying[f]))]
        });
        let category = Arc::new(category);
        let ob_map: Vec<ObId> =
            (0..c.num_objects()).map(|o| pairs.iter().position(|&p| p == (o, c.identity(o))).unwrap()).collect();
        let mor_map: Vec<MorId> =
            (0..c.num_morphisms()).map(|f| index[&(ob_map[c.src(f)], ob_map[c.dst(f)], f)]).collect();
        let embedding = FinFunctor::new_unchecked(base.clone(), category.clone(), ob_map, mor_map);
        IdempotentCompletion { category, embedding, pairs, underlying }
    }

    /// Objects of the completion not isomorphic to anything in the image of
    /// the embedding.
    pub fn new_objects_up_to_iso(&self) -> Vec<ObId> {
        let cat = &self.category;
        (0..cat.num_objects())
            .filter(|&x| !self.embedding.ob_map().iter().any(|&y| cat.isomorphism(x, y).is_some()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;

    #[test]
    fn fam_of_empty_category_is_terminal() {
        let fam = FamCompletion::new(&Arc::new(shapes::empty()), 3).unwrap();
        assert_eq!(fam.category.num_objects(), 1);
        assert_eq!(fam.category.num_morphisms(), 1);
    }

    #[test]
    fn fam_of_terminal_counts_functions() {
        let fam = FamCompletion::new(&Arc::new(shapes::terminal()), 3).unwrap();
        fam.category.validate().unwrap();
        for (x, a) in fam.families.iter().enumerate() {
            for (y, b) in fam.families.iter().enumerate() {
                // brute force: count reindexings a → b
                let brute = crate::finset::tuples(&vec![b.len(); a.len()]).count();
                assert_eq!(fam.category.hom(x, y).len(), brute);
                assert_eq!(brute, b.len().pow(a.len() as u32));
            }
        }
    }

    #[test]
    fn fam_of_discrete_two_has_six_objects() {
        let fam = FamCompletion::new(&Arc::new(shapes::discrete(2)), 2).unwrap();
        assert_eq!(fam.category.num_objects(), 6);
        fam.category.validate().unwrap();
    }

    #[test]
    fn fam_bound_zero_is_rejected() {
        assert_eq!(
            FamCompletion::new(&Arc::new(shapes::terminal()), 0).unwrap_err(),
            CategoryError::BoundTooSmall(0)
        );
    }

    #[test]
    fn fam_has_coproducts_under_the_bound() {
        let base = Arc::new(shapes::free_arrow());
        let fam = FamCompletion::new(&base, 3).unwrap();
        let cat = &fam.category;
        for x in 0..cat.num_objects() {
            for y in 0..cat.num_objects() {
                match fam.coproduct(x, y) {
                    Some((s, i, j)) => assert!(cat.is_coproduct(x, y, s, i, j)),
                    None => assert!(fam.family(x).len() + fam.family(y).len() > 3),
                }
            }
        }
        let empty = fam.object_of(&[]).unwrap();
        assert!(cat.is_initial(empty));
    }

    #[test]
    fn singletons_of_discrete_have_no_coproduct_in_the_image() {
        let base = Arc::new(shapes::discrete(2));
        let fam = FamCompletion::new(&base, 2).unwrap();
        let cat = &fam.category;
        let (a, b) = (fam.inclusion.ob(0), fam.inclusion.ob(1));
        for &s in fam.inclusion.ob_map() {
            for &i in cat.hom(a, s) {
                for &j in cat.hom(b, s) {
                    assert!(!cat.is_coproduct(a, b, s, i, j));
                }
            }
        }
        let (s, i, j) = fam.coproduct(a, b).unwrap();
        assert!(cat.is_coproduct(a, b, s, i, j));
    }

    #[test]
    fn group_has_no_new_idempotents() {
        let base = Arc::new(shapes::cyclic_group(3));
        let kar = IdempotentCompletion::new(&base);
        assert_eq!(kar.category.num_objects(), 1);
        assert!(kar.embedding.is_fully_faithful());
    }

    #[test]
    fn single_idempotent_splits_into_two_objects() {
        let base = Arc::new(shapes::idempotent());
        let kar = IdempotentCompletion::new(&base);
        kar.category.validate().unwrap();
        assert_eq!(kar.category.num_objects(), 2);
        // hom counts: (•,id)→(•,id): {id,e}; (•,id)→(•,e): {e}; (•,e)→(•,id): {e}; (•,e)→(•,e): {e}
        assert_eq!(kar.category.hom_counts(), vec![vec![2, 1], vec![1, 1]]);
        assert!(kar.category.idempotents_split());
        assert!(!base.idempotents_split());
    }

    #[test]
    fn graph_base_is_already_split() {
        let base = Arc::new(shapes::gph_base());
        assert_eq!(base.idempotents().len(), 2);
        let kar = IdempotentCompletion::new(&base);
        assert_eq!(kar.category.num_objects(), 2);
        assert_eq!(kar.category.num_morphisms(), base.num_morphisms());
    }

    #[test]
    fn splitting_twice_adds_nothing_up_to_iso() {
        for base in [shapes::rgph_base(), shapes::idempotent(), shapes::reflexive_pair(), shapes::cyclic_group(2)] {
            let once = IdempotentCompletion::new(&Arc::new(base));
            assert!(once.category.idempotents_split());
            let twice = IdempotentCompletion::new(&once.category);
            assert!(twice.new_objects_up_to_iso().is_empty());
            assert!(twice.embedding.is_fully_faithful());
        }
    }

    #[test]
    fn reflexive_graph_base_gains_split_objects_isomorphic_to_v() {
        let base = Arc::new(shapes::rgph_base());
        let kar = IdempotentCompletion::new(&base);
        assert_eq!(kar.category.num_objects(), 4);
        assert_eq!(kar.new_objects_up_to_iso(), Vec::<ObId>::new());
    }
}
