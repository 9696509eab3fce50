//! Whether hom-functors preserve colimits, and whether colimits over a shape
//! commute with finite products in FinSet.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::limits::Cocone;
use super::nat::nat_transformations;
use super::{Presheaf, PresheafError};
use crate::fincat::FinCat;
use crate::finset::{is_bijection, Function, SetFunctor};

/// Result of comparing `colim Nat(P, D_j)` with `Nat(P, colim D)`.
#[derive(Clone, Debug, Serialize)]
pub struct Preservation {
    pub preserved: bool,
    /// Size of the FinSet colimit of the hom-image diagram.
    pub image_colimit: usize,
    /// Size of `Nat(P, apex)`.
    pub hom_into_apex: usize,
    /// Canonical comparison from the first to the second.
    pub comparison: Function,
    /// Sizes of `Nat(P, D_j)` per shape object.
    pub image_sizes: Vec<usize>,
}

pub fn preserves_colimit(p: &Arc<Presheaf>, cocone: &Cocone) -> Result<Preservation, PresheafError> {
    let d = &cocone.diagram;
    let shape = d.shape().clone();
    let homs: Vec<Vec<Vec<Function>>> = d
        .objects()
        .iter()
        .map(|q| nat_transformations(p, q).map(|l| l.into_iter().map(|m| m.components().to_vec()).collect()))
        .collect::<Result<_, _>>()?;
    let index: Vec<HashMap<&Vec<Function>, usize>> =
        homs.iter().map(|l| l.iter().enumerate().map(|(i, a)| (a, i)).collect()).collect();
    let compose = |alpha: &[Function], beta: &super::PresheafMap| -> Vec<Function> {
        alpha.iter().enumerate().map(|(o, a)| a.iter().map(|&x| beta.apply(o, x)).collect()).collect()
    };
    let maps = (0..shape.num_morphisms())
        .map(|u| {
            let k = shape.dst(u);
            homs[shape.src(u)].iter().map(|a| index[k][&compose(a, d.arrow(u))]).collect()
        })
        .collect();
    let image = SetFunctor::new_unchecked(shape.clone(), homs.iter().map(|l| l.len()).collect(), maps);
    let colim = image.colimit();
    let apex_homs: Vec<Function> = nat_transformations(p, &cocone.apex)?
        .into_iter()
        .map(|m| m.components().iter().flatten().copied().collect())
        .collect();
    let apex_index: HashMap<&Function, usize> = apex_homs.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut comparison = vec![usize::MAX; colim.size];
    for j in 0..shape.num_objects() {
        for (a, alpha) in homs[j].iter().enumerate() {
            let flat: Function = compose(alpha, &cocone.legs[j]).into_iter().flatten().collect();
            comparison[colim.injections[j][a]] = apex_index[&flat];
        }
    }
    Ok(Preservation {
        preserved: is_bijection(&comparison, apex_homs.len()),
        image_colimit: colim.size,
        hom_into_apex: apex_homs.len(),
        comparison,
        image_sizes: homs.iter().map(|l| l.len()).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutationFailure {
    /// Empty for the nullary case (colimit of the terminal diagram).
    pub left_sizes: Vec<usize>,
    pub right_sizes: Vec<usize>,
    /// `|colim(D₁ × D₂)|`, or `|colim 1|` in the nullary case.
    pub colimit_of_product: usize,
    /// `|colim D₁| · |colim D₂|`, or `1` in the nullary case.
    pub product_of_colimits: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutationVerdict {
    pub commutes: bool,
    /// Number of pairs compared before stopping.
    pub checked: usize,
    pub failure: Option<CommutationFailure>,
}

/// Whether `colim(D₁ × D₂) → colim D₁ × colim D₂` is a bijection.
pub fn product_comparison_is_bijective(d1: &SetFunctor, d2: &SetFunctor) -> bool {
    let prod = d1.product(d2).expect("same shape");
    let (c1, c2, cp) = (d1.colimit(), d2.colimit(), prod.colimit());
    let mut map = vec![usize::MAX; cp.size];
    for j in 0..d1.shape().num_objects() {
        for x in 0..d1.size(j) {
            for y in 0..d2.size(j) {
                let v = c1.injections[j][x] * c2.size + c2.injections[j][y];
                let k = cp.injections[j][x * d2.size(j) + y];
                if map[k] != usize::MAX && map[k] != v {
                    return false;
                }
                map[k] = v;
            }
        }
    }
    is_bijection(&map, c1.size * c2.size)
}

/// Checks the nullary case (the colimit of the terminal diagram is a point)
/// and then every supplied pair, stopping at the first failure.
pub fn commutes_products_colimit<I>(shape: &Arc<FinCat>, pairs: I) -> CommutationVerdict
where
    I: IntoIterator<Item = (SetFunctor, SetFunctor)>,
{
    let unit = SetFunctor::constant(shape.clone(), 1).colimit().size;
    if unit != 1 {
        return CommutationVerdict {
            commutes: false,
            checked: 0,
            failure: Some(CommutationFailure {
                left_sizes: vec![],
                right_sizes: vec![],
                colimit_of_product: unit,
                product_of_colimits: 1,
            }),
        };
    }
    let mut checked = 0;
    for (d1, d2) in pairs {
        checked += 1;
        if !product_comparison_is_bijective(&d1, &d2) {
            let failure = CommutationFailure {
                left_sizes: d1.sizes().to_vec(),
                right_sizes: d2.sizes().to_vec(),
                colimit_of_product: d1.product(&d2).expect("same shape").colimit().size,
                product_of_colimits: d1.colimit().size * d2.colimit().size,
            };
            return CommutationVerdict { commutes: false, checked, failure: Some(failure) };
        }
    }
    CommutationVerdict { commutes: true, checked, failure: None }
}

/// All pairs of diagrams with sets of size `≤ max_size`.
pub fn exhaustive_pairs(shape: &Arc<FinCat>, max_size: usize) -> impl Iterator<Item = (SetFunctor, SetFunctor)> {
    let all = SetFunctor::enumerate_all(shape, max_size);
    let n = all.len();
    (0..n * n).map(move |k| (all[k / n].clone(), all[k % n].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{is_sifted, shapes};
    use crate::presheaf::fixtures::gph;

    #[test]
    fn terminal_graph_does_not_preserve_the_coequalizer() {
        let cocone = gph::reflexive_coequalizer().colimit(&gph::base());
        let one = Arc::new(gph::terminal());
        let p = preserves_colimit(&one, &cocone).unwrap();
        assert!(!p.preserved);
        assert_eq!((p.image_colimit, p.hom_into_apex), (0, 1));
    }

    #[test]
    fn representables_and_sums_preserve_it() {
        let cocone = gph::reflexive_coequalizer().colimit(&gph::base());
        for c in 0..2 {
            let y = Arc::new(Presheaf::representable(&gph::base(), c));
            assert!(preserves_colimit(&y, &cocone).unwrap().preserved);
        }
        let v = gph::vertex();
        let vv = Arc::new(Presheaf::coproduct(&[&v, &v]).unwrap());
        assert!(preserves_colimit(&vv, &cocone).unwrap().preserved);
    }

    #[test]
    fn hom_from_representable_is_evaluation() {
        // Nat(y(E), apex) is the edge set of the apex
        let cocone = gph::reflexive_coequalizer().colimit(&gph::base());
        let e = Arc::new(gph::edge());
        let p = preserves_colimit(&e, &cocone).unwrap();
        assert_eq!(p.hom_into_apex, cocone.apex.size(gph::E));
    }

    #[test]
    fn discrete_two_fails_on_disjoint_supports() {
        let shape = Arc::new(shapes::discrete(2));
        let d1 = SetFunctor::new(shape.clone(), vec![1, 0], vec![vec![0], vec![]]).unwrap();
        let d2 = SetFunctor::new(shape.clone(), vec![0, 1], vec![vec![], vec![0]]).unwrap();
        let v = commutes_products_colimit(&shape, [(d1, d2)]);
        assert!(!v.commutes);
    }

    #[test]
    fn agreement_with_siftedness_on_small_shapes() {
        for shape in [
            shapes::reflexive_pair(),
            shapes::discrete(2),
            shapes::span(),
            shapes::terminal(),
            shapes::parallel_pair(),
            shapes::empty(),
            shapes::cyclic_group(2),
        ] {
            let shape = Arc::new(shape);
            let v = commutes_products_colimit(&shape, exhaustive_pairs(&shape, 2));
            assert_eq!(v.commutes, is_sifted(&shape).sifted, "{shape:?}");
        }
    }
}
