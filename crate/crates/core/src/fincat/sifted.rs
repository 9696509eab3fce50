use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{FinCat, MorId, ObId};
use crate::finset::Partition;

/// A cospan `A --left--> apex <--right-- B`, by names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cospan {
    pub apex: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SiftedWitness {
    /// Sifted categories are non-empty.
    Empty,
    /// The cospan category of `(a, b)` is empty or has several components.
    Disconnected { a: String, b: String, components: Vec<Vec<Cospan>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiftedVerdict {
    pub sifted: bool,
    pub witness: Option<SiftedWitness>,
}

/// Components of the category of cospans from `a` to `b`.
pub fn cospan_components(c: &FinCat, a: ObId, b: ObId) -> Vec<Vec<(ObId, MorId, MorId)>> {
    let mut cospans = Vec::new();
    let mut index = HashMap::new();
    for x in 0..c.num_objects() {
        for &u in c.hom(a, x) {
            for &v in c.hom(b, x) {
                index.insert((u, v), cospans.len());
                cospans.push((x, u, v));
            }
        }
    }
    let mut part = Partition::new(cospans.len());
    for (i, &(x, u, v)) in cospans.iter().enumerate() {
        for y in 0..c.num_objects() {
            for &h in c.hom(x, y) {
                let j = index[&(c.compose(h, u), c.compose(h, v))];
                part.union(i, j);
            }
        }
    }
    let (classes, count) = part.classes();
    let mut out = vec![Vec::new(); count];
    for (i, cls) in classes.into_iter().enumerate() {
        out[cls].push(cospans[i]);
    }
    out
}

/// A finite category is sifted iff it is non-empty and every cospan
/// category is connected. On failure the first pair in object order is
/// reported.
pub fn is_sifted(c: &FinCat) -> SiftedVerdict {
    if c.num_objects() == 0 {
        return SiftedVerdict { sifted: false, witness: Some(SiftedWitness::Empty) };
    }
    for a in 0..c.num_objects() {
        for b in 0..c.num_objects() {
            let comps = cospan_components(c, a, b);
            if comps.len() != 1 {
                let components = comps
                    .into_iter()
                    .map(|comp| {
                        comp.into_iter()
                            .map(|(x, u, v)| Cospan {
                                apex: c.object_name(x).to_string(),
                                left: c.morphism(u).name.clone(),
                                right: c.morphism(v).name.clone(),
                            })
                            .collect()
                    })
                    .collect();
                return SiftedVerdict {
                    sifted: false,
                    witness: Some(SiftedWitness::Disconnected {
                        a: c.object_name(a).to_string(),
                        b: c.object_name(b).to_string(),
                        components,
                    }),
                };
            }
        }
    }
    SiftedVerdict { sifted: true, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;

    #[test]
    fn empty_category_is_not_sifted() {
        let v = is_sifted(&shapes::empty());
        assert!(!v.sifted);
        assert_eq!(v.witness, Some(SiftedWitness::Empty));
    }

    #[test]
    fn reflexive_pair_is_sifted() {
        assert!(is_sifted(&shapes::reflexive_pair()).sifted);
    }

    #[test]
    fn discrete_two_is_not_sifted() {
        let v = is_sifted(&shapes::discrete(2));
        assert!(!v.sifted);
        match v.witness.unwrap() {
            SiftedWitness::Disconnected { a, b, components } => {
                assert_eq!((a.as_str(), b.as_str()), ("0", "1"));
                assert!(components.is_empty());
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn categories_with_terminal_object_are_sifted() {
        assert!(is_sifted(&shapes::terminal()).sifted);
        assert!(is_sifted(&shapes::free_arrow()).sifted);
        assert!(is_sifted(&shapes::cospan()).sifted);
    }

    #[test]
    fn parallel_pair_and_span_are_not_sifted() {
        assert!(!is_sifted(&shapes::parallel_pair()).sifted);
        assert!(!is_sifted(&shapes::span()).sifted);
    }

    #[test]
    fn groups_are_not_sifted() {
        // cospans (*, g^i, g^j) fall into components indexed by i - j
        let v = is_sifted(&shapes::cyclic_group(2));
        assert!(!v.sifted);
        assert!(is_sifted(&shapes::cyclic_group(1)).sifted);
    }
}
