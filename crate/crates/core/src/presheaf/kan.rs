//! Weighted colimits as coends and pointwise left Kan extensions.

use std::sync::Arc;

use super::{Presheaf, PresheafError};
use crate::fincat::{FinCat, FinFunctor, ObId};
use crate::finset::{Function, Partition, SetFunctor};

/// `W * D = ∫^a W(a) × D(a)`: the disjoint union of `W(a) × D(a)` modulo
/// `(W(f)w, d) ~ (w, D(f)d)` for `f: a → b`, `w ∈ W(b)`, `d ∈ D(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedColimit {
    pub size: usize,
    /// `offsets[a]` starts the block `W(a) × D(a)`, pairs encoded `w * |D(a)| + d`.
    pub offsets: Vec<usize>,
    /// Class of every element of the disjoint union.
    pub quotient: Function,
    d_sizes: Vec<usize>,
}

impl WeightedColimit {
    /// Class of `(w, d) ∈ W(a) × D(a)`.
    pub fn class(&self, a: ObId, w: usize, d: usize) -> usize {
        self.quotient[self.offsets[a] + w * self.d_sizes[a] + d]
    }
}

pub fn weighted_colimit(weight: &Presheaf, diagram: &SetFunctor) -> Result<WeightedColimit, PresheafError> {
    let a_cat = &**weight.base();
    if a_cat != &**diagram.shape() {
        return Err(PresheafError::IndexMismatch);
    }
    let d_sizes: Vec<usize> = diagram.sizes().to_vec();
    let mut offsets = Vec::with_capacity(a_cat.num_objects());
    let mut total = 0;
    for a in 0..a_cat.num_objects() {
        offsets.push(total);
        total += weight.size(a) * d_sizes[a];
    }
    let mut part = Partition::new(total);
    for f in 0..a_cat.num_morphisms() {
        let (a, b) = (a_cat.src(f), a_cat.dst(f));
        for w in 0..weight.size(b) {
            let wa = weight.act(f, w);
            for d in 0..d_sizes[a] {
                let db = diagram.apply(f, d);
                part.union(offsets[a] + wa * d_sizes[a] + d, offsets[b] + w * d_sizes[b] + db);
            }
        }
    }
    let (quotient, size) = part.classes();
    Ok(WeightedColimit { size, offsets, quotient, d_sizes })
}

/// `Lan_J F` together with the unit `F(a) → (Lan_J F)(J a)`.
#[derive(Clone, Debug)]
pub struct KanExtension {
    pub functor: SetFunctor,
    pub unit: Vec<Function>,
}

/// `(Lan_J F)(b)` is the colimit of `F` over the comma category `(J ↓ b)`,
/// whose objects are `(a, u: J a → b)` and morphisms `h: a → a'` with
/// `u' ∘ J h = u`.
pub fn left_kan_extension(f: &SetFunctor, j: &FinFunctor) -> Result<KanExtension, PresheafError> {
    if **f.shape() != **j.source() {
        return Err(PresheafError::IndexMismatch);
    }
    let a_cat = &**j.source();
    let b_cat: &Arc<FinCat> = j.target();
    let nb = b_cat.num_objects();
    // elements (a, u, x) of Σ F(a) over comma objects, per b
    let mut values = Vec::with_capacity(nb);
    let mut reps_all = Vec::with_capacity(nb);
    let mut index_all = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut index = vec![Vec::new(); a_cat.num_objects()];
        let mut reps = Vec::new();
        let mut n = 0;
        for a in 0..a_cat.num_objects() {
            let us = b_cat.hom(j.ob(a), b);
            index[a] = (0..us.len()).map(|k| n + k * f.size(a)).collect::<Vec<_>>();
            n += us.len() * f.size(a);
        }
        let mut part = Partition::new(n);
        for h in 0..a_cat.num_morphisms() {
            let (a, a2) = (a_cat.src(h), a_cat.dst(h));
            let jh = j.mor(h);
            for &u2 in b_cat.hom(j.ob(a2), b) {
                let u = b_cat.compose(u2, jh);
                let (ku, ku2) = (b_cat.hom_index(u), b_cat.hom_index(u2));
                for x in 0..f.size(a) {
                    part.union(index[a][ku] + x, index[a2][ku2] + f.apply(h, x));
                }
            }
        }
        let (classes, size) = part.classes();
        let mut first = vec![None; size];
        for a in 0..a_cat.num_objects() {
            for (ku, &u) in b_cat.hom(j.ob(a), b).iter().enumerate() {
                for x in 0..f.size(a) {
                    let k = classes[index[a][ku] + x];
                    first[k].get_or_insert((a, u, x));
                }
            }
        }
        reps.extend(first.into_iter().map(|r| r.unwrap()));
        values.push(classes);
        reps_all.push(reps);
        index_all.push(index);
    }
    let sizes: Vec<usize> = reps_all.iter().map(|r| r.len()).collect();
    let maps = (0..b_cat.num_morphisms())
        .map(|g| {
            let b2 = b_cat.dst(g);
            reps_all[b_cat.src(g)]
                .iter()
                .map(|&(a, u, x)| {
                    let gu = b_cat.hom_index(b_cat.compose(g, u));
                    values[b2][index_all[b2][a][gu] + x]
                })
                .collect()
        })
        .collect();
    let functor = SetFunctor::new_unchecked(b_cat.clone(), sizes, maps);
    let unit = (0..a_cat.num_objects())
        .map(|a| {
            let b = j.ob(a);
            let k = b_cat.hom_index(b_cat.identity(b));
            (0..f.size(a)).map(|x| values[b][index_all[b][a][k] + x]).collect()
        })
        .collect();
    Ok(KanExtension { functor, unit })
}

/// Both sides of `W * (S ∘ J) ≅ (Lan_J W) * S` for a weight `W` on `A`,
/// `J: A → B` and `S: B → FinSet`, plus the canonical comparison
/// `[a, w, s] ↦ [J a, η(w), s]` between them.
pub fn lan_weight_comparison(
    weight: &Presheaf,
    j: &FinFunctor,
    s: &SetFunctor,
) -> Result<(WeightedColimit, WeightedColimit, Function), PresheafError> {
    if **s.shape() != **j.target() || **weight.base() != **j.source() {
        return Err(PresheafError::IndexMismatch);
    }
    let a_cat = j.source();
    let restricted = SetFunctor::new_unchecked(
        a_cat.clone(),
        (0..a_cat.num_objects()).map(|a| s.size(j.ob(a))).collect(),
        (0..a_cat.num_morphisms()).map(|h| s.map(j.mor(h)).to_vec()).collect(),
    );
    let left = weighted_colimit(weight, &restricted)?;
    // presheaves on A are covariant on A^op; extend along J^op
    let w_cov = weight.to_covariant(Arc::new(a_cat.opposite()));
    let jop = j.opposite();
    let lan = left_kan_extension(&w_cov, &jop)?;
    let lan_w = Presheaf::from_covariant(&lan.functor, j.target().clone());
    let right = weighted_colimit(&lan_w, s)?;
    let mut comparison = vec![usize::MAX; left.size];
    for a in 0..a_cat.num_objects() {
        for w in 0..weight.size(a) {
            for x in 0..s.size(j.ob(a)) {
                let k = left.class(a, w, x);
                let v = right.class(j.ob(a), lan.unit[a][w], x);
                if comparison[k] != usize::MAX && comparison[k] != v {
                    return Err(PresheafError::BadDiagram("comparison map is not well defined".into()));
                }
                comparison[k] = v;
            }
        }
    }
    Ok((left, right, comparison))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;
    use crate::finset::is_bijection;

    fn set_functor(shape: &Arc<FinCat>, sizes: Vec<usize>, maps: &[(&str, Vec<usize>)]) -> SetFunctor {
        let mut all: Vec<Vec<usize>> = vec![Vec::new(); shape.num_morphisms()];
        for o in 0..shape.num_objects() {
            all[shape.identity(o)] = (0..sizes[o]).collect();
        }
        for (name, m) in maps {
            all[shape.morphism_id(name).unwrap()] = m.clone();
        }
        SetFunctor::new(shape.clone(), sizes, all).unwrap()
    }

    #[test]
    fn representable_weight_evaluates() {
        let a = Arc::new(shapes::free_arrow());
        let d = set_functor(&a, vec![2, 3], &[("f", vec![0, 2])]);
        for o in 0..2 {
            let w = Presheaf::representable(&a, o);
            assert_eq!(weighted_colimit(&w, &d).unwrap().size, d.size(o));
        }
    }

    #[test]
    fn terminal_weight_gives_conical_colimit() {
        let a = Arc::new(shapes::parallel_pair());
        let d = set_functor(&a, vec![2, 3], &[("f", vec![0, 1]), ("g", vec![1, 1])]);
        let w = Presheaf::terminal(&a);
        assert_eq!(weighted_colimit(&w, &d).unwrap().size, d.colimit().size);
    }

    #[test]
    fn weight_on_point_multiplies() {
        let a = Arc::new(shapes::terminal());
        let w = Presheaf::constant(&a, 2);
        let d = SetFunctor::constant(a.clone(), 3);
        assert_eq!(weighted_colimit(&w, &d).unwrap().size, 6);
    }

    #[test]
    fn mismatched_index_is_rejected() {
        let w = Presheaf::terminal(&Arc::new(shapes::free_arrow()));
        let d = SetFunctor::constant(Arc::new(shapes::terminal()), 1);
        assert_eq!(weighted_colimit(&w, &d), Err(PresheafError::IndexMismatch));
    }

    #[test]
    fn kan_extension_along_identity() {
        let a = Arc::new(shapes::reflexive_pair());
        let f = set_functor(
            &a,
            vec![3, 2],
            &[("f", vec![0, 1, 1]), ("g", vec![0, 1, 0]), ("s", vec![0, 1]), ("sf", vec![0, 1, 1]), ("sg", vec![0, 1, 0])],
        );
        let lan = left_kan_extension(&f, &FinFunctor::identity(a)).unwrap();
        lan.functor.validate().unwrap();
        assert_eq!(lan.functor.sizes(), f.sizes());
        for u in &lan.unit {
            assert!(is_bijection(u, u.len()));
        }
    }

    #[test]
    fn kan_extension_into_discrete_two() {
        let one = Arc::new(shapes::terminal());
        let two = Arc::new(shapes::discrete(2));
        let j = FinFunctor::from_names(one.clone(), two, &[("*", "0")], &[]).unwrap();
        let lan = left_kan_extension(&SetFunctor::constant(one, 1), &j).unwrap();
        assert_eq!(lan.functor.sizes(), &[1, 0]);
    }

    #[test]
    fn lan_weight_on_arrow_inclusion() {
        // J: 1 → (a → b) picking a, W = 2 points, S = (2 → 3)
        let one = Arc::new(shapes::terminal());
        let arrow = Arc::new(shapes::free_arrow());
        let j = FinFunctor::from_names(one.clone(), arrow.clone(), &[("*", "a")], &[]).unwrap();
        let w = Presheaf::constant(&one, 2);
        let s = set_functor(&arrow, vec![2, 3], &[("f", vec![1, 2])]);
        let (l, r, cmp) = lan_weight_comparison(&w, &j, &s).unwrap();
        assert_eq!(l.size, 4);
        assert_eq!(r.size, 4);
        assert!(is_bijection(&cmp, r.size));
    }
}
