//! Named finite categories used as index shapes and presheaf bases.

use std::collections::HashMap;

use super::{FinCat, MorId, Morphism};

pub fn empty() -> FinCat {
    FinCat::builder().build().expect("empty category")
}

pub fn terminal() -> FinCat {
    FinCat::builder().object("*").build().expect("terminal category")
}

pub fn discrete(n: usize) -> FinCat {
    FinCat::builder().objects((0..n).map(|i| i.to_string())).build().expect("discrete category")
}

/// `a --f--> b`.
pub fn free_arrow() -> FinCat {
    FinCat::builder().objects(["a", "b"]).morphism("f", "a", "b").build().expect("arrow category")
}

/// `f, g: P ⇉ Q` with no further structure.
pub fn parallel_pair() -> FinCat {
    FinCat::builder()
        .objects(["P", "Q"])
        .morphism("f", "P", "Q")
        .morphism("g", "P", "Q")
        .build()
        .expect("parallel pair")
}

/// `f, g: P ⇉ Q` with a common section `s: Q → P`, `f∘s = g∘s = id_Q`.
pub fn reflexive_pair() -> FinCat {
    FinCat::builder()
        .objects(["P", "Q"])
        .morphism("f", "P", "Q")
        .morphism("g", "P", "Q")
        .morphism("s", "Q", "P")
        .morphism("sf", "P", "P")
        .morphism("sg", "P", "P")
        .compose("f", "s", "id_Q")
        .compose("g", "s", "id_Q")
        .compose("s", "f", "sf")
        .compose("s", "g", "sg")
        .compose("f", "sf", "f")
        .compose("f", "sg", "g")
        .compose("g", "sf", "f")
        .compose("g", "sg", "g")
        .compose("sf", "s", "s")
        .compose("sg", "s", "s")
        .compose("sf", "sf", "sf")
        .compose("sf", "sg", "sg")
        .compose("sg", "sf", "sf")
        .compose("sg", "sg", "sg")
        .build()
        .expect("reflexive pair")
}

/// The pushout shape `a <--l-- c --r--> b`.
pub fn span() -> FinCat {
    FinCat::builder()
        .objects(["a", "c", "b"])
        .morphism("l", "c", "a")
        .morphism("r", "c", "b")
        .build()
        .expect("span")
}

/// The pullback shape `a --l--> c <--r-- b`.
pub fn cospan() -> FinCat {
    FinCat::builder()
        .objects(["a", "c", "b"])
        .morphism("l", "a", "c")
        .morphism("r", "b", "c")
        .build()
        .expect("cospan")
}

/// Base of directed graphs: presheaves on `s, t: V → E` are graphs with
/// vertex set `P(V)`, edge set `P(E)` and source/target maps `P(s)`, `P(t)`.
pub fn gph_base() -> FinCat {
    FinCat::builder()
        .objects(["V", "E"])
        .morphism("s", "V", "E")
        .morphism("t", "V", "E")
        .build()
        .expect("graph base")
}

/// Base of reflexive graphs: `s, t: V → E`, `r: E → V`, `r∘s = r∘t = id_V`.
pub fn rgph_base() -> FinCat {
    FinCat::builder()
        .objects(["V", "E"])
        .morphism("s", "V", "E")
        .morphism("t", "V", "E")
        .morphism("r", "E", "V")
        .morphism("sr", "E", "E")
        .morphism("tr", "E", "E")
        .compose("r", "s", "id_V")
        .compose("r", "t", "id_V")
        .compose("s", "r", "sr")
        .compose("t", "r", "tr")
        .compose("sr", "s", "s")
        .compose("sr", "t", "s")
        .compose("tr", "s", "t")
        .compose("tr", "t", "t")
        .compose("r", "sr", "r")
        .compose("r", "tr", "r")
        .compose("sr", "sr", "sr")
        .compose("sr", "tr", "sr")
        .compose("tr", "sr", "tr")
        .compose("tr", "tr", "tr")
        .build()
        .expect("reflexive graph base")
}

/// The cyclic group `Z/n` as a one-object category; `g^k` is named `g<k>`.
pub fn cyclic_group(n: usize) -> FinCat {
    assert!(n >= 1);
    let morphisms = (0..n)
        .map(|k| Morphism { name: if k == 0 { "id_*".into() } else { format!("g{k}") }, src: 0, dst: 0 })
        .collect();
    FinCat::from_parts(vec!["*".into()], morphisms, vec![0], |g, f| (g + f) % n).expect("cyclic group")
}

/// One object with a single non-identity idempotent `e`.
pub fn idempotent() -> FinCat {
    FinCat::builder().object("*").morphism("e", "*", "*").compose("e", "e", "e").build().expect("idempotent")
}

/// Injection table for the truncated category of finite sets and injections.
pub(crate) fn injection_list(k: usize) -> Vec<(usize, usize, Vec<usize>)> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], len: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, len, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut list = Vec::new();
    for a in 0..=k {
        for b in a..=k {
            let mut maps = Vec::new();
            extend(&mut Vec::new(), &mut vec![false; b], a, &mut maps);
            list.extend(maps.into_iter().map(|m| (a, b, m)));
        }
    }
    list
}

/// Skeletal finite sets `0..=max` and all injections between them.
/// Morphism `a->b:[v0 v1 ...]` sends `i` to `v_i`.
pub fn injections(max: usize) -> FinCat {
    let list = injection_list(max);
    let index: HashMap<(usize, Vec<usize>), MorId> =
        list.iter().enumerate().map(|(i, (_, b, m))| ((*b, m.clone()), i)).collect();
    let objects = (0..=max).map(|k| k.to_string()).collect();
    let morphisms = list
        .iter()
        .map(|(a, b, m)| Morphism { name: injection_name(*a, *b, m), src: *a, dst: *b })
        .collect();
    let identities = (0..=max).map(|k| index[&(k, (0..k).collect::<Vec<_>>())]).collect();
    FinCat::from_parts_unchecked(objects, morphisms, identities, |g, f| {
        let (_, _, fm) = &list[f];
        let (_, c, gm) = &list[g];
        let comp: Vec<usize> = fm.iter().map(|&x| gm[x]).collect();
        index[&(*c, comp)]
    })
}

pub(crate) fn injection_name(a: usize, b: usize, m: &[usize]) -> String {
    let body: Vec<String> = m.iter().map(|v| v.to_string()).collect();
    format!("{a}->{b}:[{}]", body.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_valid_categories() {
        for c in [
            empty(),
            terminal(),
            discrete(3),
            free_arrow(),
            parallel_pair(),
            reflexive_pair(),
            span(),
            cospan(),
            gph_base(),
            rgph_base(),
            cyclic_group(4),
            idempotent(),
        ] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn injection_category_is_valid_when_small() {
        let c = injections(3);
        c.validate().unwrap();
        assert_eq!(c.hom(2, 3).len(), 6);
        assert_eq!(c.hom(3, 2).len(), 0);
        assert_eq!(c.hom(0, 3).len(), 1);
    }

    #[test]
    fn injection_hom_sizes_are_falling_factorials() {
        let c = injections(6);
        for a in 0..=6usize {
            for b in 0..=6usize {
                let expect: usize = if a > b { 0 } else { ((b - a + 1)..=b).product() };
                assert_eq!(c.hom(a, b).len(), expect, "hom({a},{b})");
            }
        }
    }
}
