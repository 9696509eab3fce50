use std::sync::Arc;

use super::{table_args, Model, ModelError, ModelHom};
use crate::finset::{tuple_index, tuples};

/// Largest number of candidate carrier maps `hom_models` accepts.
pub const DEFAULT_HOM_BOUND: u128 = 10_000_000;

/// All homomorphisms `a → b`, lexicographic in the carrier maps. Candidate
/// maps are explored by backtracking, checking each operation instance as
/// soon as its elements are mapped.
pub fn hom_models(a: &Arc<Model>, b: &Arc<Model>, bound: u128) -> Result<Vec<ModelHom>, ModelError> {
    if a.theory() != b.theory() {
        return Err(ModelError::TheoryMismatch);
    }
    let candidates = a
        .carriers()
        .iter()
        .zip(b.carriers())
        .fold(1u128, |acc, (&n, &m)| acc.saturating_mul((m as u128).saturating_pow(n as u32)));
    if candidates > bound {
        return Err(ModelError::SearchSpaceTooLarge { candidates, bound });
    }
    let sig = a.theory().signature();
    // elements in a fixed order; each instance is checked at its last element
    let order: Vec<(usize, usize)> =
        a.carriers().iter().enumerate().flat_map(|(s, &n)| (0..n).map(move |x| (s, x))).collect();
    let mut pos = vec![Vec::new(); a.carriers().len()];
    for (i, &(s, x)) in order.iter().enumerate() {
        if pos[s].len() <= x {
            pos[s].resize(x + 1, 0);
        }
        pos[s][x] = i;
    }
    let mut checks: Vec<Vec<(usize, Vec<(usize, usize)>, (usize, usize))>> = vec![Vec::new(); order.len()];
    for op in 0..sig.ops().len() {
        let args = table_args(a.theory(), op);
        let res = sig.op(op).result;
        let radices = a.radices(op);
        for t in tuples(&radices) {
            let ins: Vec<(usize, usize)> = t.iter().zip(&args).map(|(&x, &s)| (s, x)).collect();
            let out = (res, a.apply(op, &t));
            let last = ins.iter().chain(std::iter::once(&out)).map(|&(s, x)| pos[s][x]).max();
            // every instance has at least its output element
            checks[last.expect("output element")].push((op, ins, out));
        }
    }
    let mut maps: Vec<Vec<usize>> = a.carriers().iter().map(|&n| vec![0; n]).collect();
    let mut out = Vec::new();
    fn go(
        i: usize,
        order: &[(usize, usize)],
        checks: &[Vec<(usize, Vec<(usize, usize)>, (usize, usize))>],
        a: &Arc<Model>,
        b: &Arc<Model>,
        maps: &mut Vec<Vec<usize>>,
        out: &mut Vec<ModelHom>,
    ) {
        if i == order.len() {
            out.push(ModelHom::new_unchecked(a.clone(), b.clone(), maps.clone()));
            return;
        }
        let (s, x) = order[i];
        'values: for v in 0..b.size(s) {
            maps[s][x] = v;
            for (op, ins, (rs, rx)) in &checks[i] {
                let image: Vec<usize> = ins.iter().map(|&(s, x)| maps[s][x]).collect();
                let radices = b.radices(*op);
                if b.table(*op)[tuple_index(&radices, &image)] != maps[*rs][*rx] {
                    continue 'values;
                }
            }
            go(i + 1, order, checks, a, b, maps, out);
        }
    }
    go(0, &order, &checks, a, b, &mut maps, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tests::{cyclic, theory};
    use crate::models::{hom_violation, terminal_model, Structure};

    #[test]
    fn into_the_terminal_model() {
        for m in [cyclic(1), cyclic(2), cyclic(3)] {
            let m = Arc::new(m);
            let one = Arc::new(terminal_model(m.theory()));
            assert_eq!(hom_models(&m, &one, DEFAULT_HOM_BOUND).unwrap().len(), 1);
        }
    }

    #[test]
    fn z2_endomorphisms() {
        let z2 = Arc::new(cyclic(2));
        let homs = hom_models(&z2, &z2, DEFAULT_HOM_BOUND).unwrap();
        let maps: Vec<&Vec<usize>> = homs.iter().map(|h| &h.maps[0]).collect();
        assert_eq!(maps, [&vec![0, 0], &vec![0, 1]]);
    }

    #[test]
    fn additive_to_multiplicative_parity() {
        // (Z/2, +, 0) → ({0, 1}, ·, 1): elements 0 ↦ 1 forced, 1 ↦ 0 or 1?
        let t = theory("monoid");
        let add = Arc::new(Model::new(Structure::new(t.clone(), vec![2], vec![vec![0, 1, 1, 0], vec![0]]).unwrap()).unwrap());
        let mul = Arc::new(Model::new(Structure::new(t, vec![2], vec![vec![0, 0, 0, 1], vec![1]]).unwrap()).unwrap());
        let homs = hom_models(&add, &mul, DEFAULT_HOM_BOUND).unwrap();
        // 1 ↦ y needs y·y = h(0) = 1, so y = 1
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].maps[0], [1, 1]);
    }

    #[test]
    fn agrees_with_filtering_all_maps() {
        let zs: Vec<Arc<Model>> = (1..=4).map(|n| Arc::new(cyclic(n))).collect();
        for a in &zs {
            for b in &zs {
                let (n, m) = (a.size(0), b.size(0));
                let brute = tuples(&vec![m; n]).filter(|f| hom_violation(a, b, std::slice::from_ref(f)).is_none()).count();
                assert_eq!(hom_models(a, b, DEFAULT_HOM_BOUND).unwrap().len(), brute);
                // |hom(Z/n, Z/m)| = gcd(n, m)
                let gcd = (1..=n.min(m)).rev().find(|d| n % d == 0 && m % d == 0).unwrap();
                assert_eq!(brute, gcd);
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let z4 = Arc::new(cyclic(4));
        assert!(matches!(hom_models(&z4, &z4, 255), Err(ModelError::SearchSpaceTooLarge { candidates: 256, .. })));
    }
}
