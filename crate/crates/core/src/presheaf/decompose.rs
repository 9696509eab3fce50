//! Splitting a presheaf into connected components and recognising each as a
//! representable via a Yoneda generator.

use std::fmt;
use std::sync::Arc;

use super::{Presheaf, PresheafError, PresheafMap};
use crate::fincat::{IdempotentCompletion, ObId};
use crate::finset::Partition;

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Base objects `c_i` with `P ≅ Σ y(c_i)`, one per connected component.
    pub summands: Vec<ObId>,
    /// The element `(c_i, x_i)` generating each component.
    pub generators: Vec<(ObId, usize)>,
    /// Verified isomorphism `Σ y(c_i) → P`.
    pub isomorphism: PresheafMap,
}

impl Decomposition {
    pub fn summand_names(&self) -> Vec<String> {
        let base = self.isomorphism.target().base();
        self.summands.iter().map(|&c| base.object_name(c).to_string()).collect()
    }

    /// Summands as a sorted multiset.
    pub fn multiset(&self) -> Vec<ObId> {
        let mut m = self.summands.clone();
        m.sort_unstable();
        m
    }
}

/// The first connected component with no generating element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotDecomposable {
    /// Index of the component in first-element order.
    pub component: usize,
    /// Elements `(object, element)` of the component.
    pub elements: Vec<(ObId, usize)>,
    /// Size of the component at each base object.
    pub sizes: Vec<usize>,
}

impl fmt::Display for NotDecomposable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "component {} (sizes {:?}) is not representable", self.component, self.sizes)
    }
}

impl std::error::Error for NotDecomposable {}

/// Connected components of the category of elements, in first-element order.
pub fn components(p: &Presheaf) -> Vec<Vec<(ObId, usize)>> {
    let c = &**p.base();
    let elements = p.elements();
    let mut offsets = vec![0; c.num_objects()];
    for o in 1..c.num_objects() {
        offsets[o] = offsets[o - 1] + p.size(o - 1);
    }
    let mut part = Partition::new(elements.len());
    for f in 0..c.num_morphisms() {
        let (a, b) = (c.src(f), c.dst(f));
        for x in 0..p.size(b) {
            part.union(offsets[b] + x, offsets[a] + p.act(f, x));
        }
    }
    let (classes, n) = part.classes();
    let mut out = vec![Vec::new(); n];
    for (i, e) in elements.into_iter().enumerate() {
        out[classes[i]].push(e);
    }
    out
}

/// The Yoneda map `y(c) → P` at `x ∈ P(c)` is a bijection onto `component`.
fn generates(p: &Presheaf, c: ObId, x: usize, sizes: &[usize]) -> bool {
    let cat = &**p.base();
    (0..cat.num_objects()).all(|d| {
        let hom = cat.hom(d, c);
        if hom.len() != sizes[d] {
            return false;
        }
        let mut seen = vec![false; p.size(d)];
        hom.iter().all(|&u| !std::mem::replace(&mut seen[p.act(u, x)], true))
    })
}

pub fn decompose_into_representables(p: &Arc<Presheaf>) -> Result<Decomposition, NotDecomposable> {
    let cat = p.base().clone();
    let mut summands = Vec::new();
    let mut generators = Vec::new();
    for (i, comp) in components(p).into_iter().enumerate() {
        let mut sizes = vec![0; cat.num_objects()];
        for &(o, _) in &comp {
            sizes[o] += 1;
        }
        match comp.iter().find(|&&(c, x)| generates(p, c, x, &sizes)) {
            Some(&(c, x)) => {
                summands.push(c);
                generators.push((c, x));
            }
            None => return Err(NotDecomposable { component: i, elements: comp, sizes }),
        }
    }
    let reps: Vec<Presheaf> = summands.iter().map(|&c| Presheaf::representable(&cat, c)).collect();
    let sum = if reps.is_empty() {
        Presheaf::initial(&cat)
    } else {
        Presheaf::coproduct(&reps.iter().collect::<Vec<_>>()).expect("same base")
    };
    let components = (0..cat.num_objects())
        .map(|d| generators.iter().flat_map(|&(c, x)| cat.hom(d, c).iter().map(move |&u| p.act(u, x))).collect())
        .collect();
    let isomorphism =
        PresheafMap::new(Arc::new(sum), p.clone(), components).expect("Yoneda maps are natural");
    assert!(isomorphism.is_isomorphism(), "generator check admitted a non-isomorphism");
    Ok(Decomposition { summands, generators, isomorphism })
}

/// `P` moved to the idempotent completion: `P((c, e))` is the set of fixed
/// points of `P(e)`, in increasing order.
pub fn transport_to_completion(p: &Presheaf, completion: &IdempotentCompletion) -> Result<Presheaf, PresheafError> {
    let base = p.base();
    if **completion.embedding.source() != **base {
        return Err(PresheafError::BaseMismatch);
    }
    let cat = completion.category.clone();
    let fixed: Vec<Vec<usize>> =
        completion.pairs.iter().map(|&(c, e)| (0..p.size(c)).filter(|&x| p.act(e, x) == x).collect()).collect();
    let position: Vec<Vec<usize>> = completion
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &(c, _))| {
            let mut pos = vec![usize::MAX; p.size(c)];
            for (k, &x) in fixed[i].iter().enumerate() {
                pos[x] = k;
            }
            pos
        })
        .collect();
    let actions = (0..cat.num_morphisms())
        .map(|f| {
            let (a, b) = (cat.src(f), cat.dst(f));
            let u = completion.underlying[f];
            fixed[b].iter().map(|&x| position[a][p.act(u, x)]).collect()
        })
        .collect();
    let labels = fixed
        .iter()
        .enumerate()
        .map(|(i, xs)| xs.iter().map(|&x| p.label(completion.pairs[i].0, x)).collect())
        .collect();
    Presheaf::new(cat, fixed.iter().map(|v| v.len()).collect(), actions)?.with_labels(labels)
}

/// Whether `P` is a finite coproduct of representables once the base has
/// split idempotents. This is the unenriched notion: the terminal graph is
/// not strongly finitely presentable in `Gph` even though `Gph(1, −)` is
/// representable by an exponential in the enriched sense.
pub fn is_strongly_finitely_presentable(p: &Arc<Presheaf>) -> bool {
    if p.base().idempotents_split() {
        return decompose_into_representables(p).is_ok();
    }
    let completion = IdempotentCompletion::new(p.base());
    match transport_to_completion(p, &completion) {
        Ok(q) => decompose_into_representables(&Arc::new(q)).is_ok(),
        Err(_) => false,
    }
}
