//! Exhaustive enumeration of natural transformations by propagation:
//! fixing `α_b(x) = y` forces `α_a(P(f)x) = Q(f)y` for every `f: a → b`.

use std::sync::Arc;

use super::{Presheaf, PresheafError, PresheafMap};
use crate::fincat::ObId;

const UNSET: usize = usize::MAX;

struct Search<'a> {
    p: &'a Presheaf,
    q: &'a Presheaf,
    order: Vec<(ObId, usize)>,
    assign: Vec<Vec<usize>>,
    used: Option<Vec<Vec<bool>>>,
    trail: Vec<(ObId, usize)>,
}

impl<'a> Search<'a> {
    fn new(p: &'a Presheaf, q: &'a Presheaf, injective: bool) -> Self {
        let c = &**p.base();
        // objects with many incoming morphisms first: their elements force the most
        let mut objects: Vec<ObId> = (0..c.num_objects()).collect();
        let fan_in = |o: ObId| (0..c.num_objects()).map(|a| c.hom(a, o).len()).sum::<usize>();
        objects.sort_by_key(|&o| std::cmp::Reverse(fan_in(o)));
        let order = objects.iter().flat_map(|&o| (0..p.size(o)).map(move |x| (o, x))).collect();
        let assign = (0..c.num_objects()).map(|o| vec![UNSET; p.size(o)]).collect();
        let used = injective.then(|| (0..c.num_objects()).map(|o| vec![false; q.size(o)]).collect());
        Search { p, q, order, assign, used, trail: Vec::new() }
    }

    fn set(&mut self, o: ObId, x: usize, y: usize) -> bool {
        if let Some(used) = &mut self.used {
            if used[o][y] {
                return false;
            }
            used[o][y] = true;
        }
        self.assign[o][x] = y;
        self.trail.push((o, x));
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (o, x) = self.trail.pop().unwrap();
            if let Some(used) = &mut self.used {
                used[o][self.assign[o][x]] = false;
            }
            self.assign[o][x] = UNSET;
        }
    }

    /// Assigns `α_o(x) = y` and everything it forces; false on conflict.
    fn propagate(&mut self, o: ObId, x: usize, y: usize) -> bool {
        if !self.set(o, x, y) {
            return false;
        }
        let c = self.p.base().clone();
        let mut stack = vec![(o, x)];
        while let Some((b, x)) = stack.pop() {
            let y = self.assign[b][x];
            for a in 0..c.num_objects() {
                for &f in c.hom(a, b) {
                    let (xa, ya) = (self.p.act(f, x), self.q.act(f, y));
                    match self.assign[a][xa] {
                        UNSET => {
                            if !self.set(a, xa, ya) {
                                return false;
                            }
                            stack.push((a, xa));
                        }
                        v if v != ya => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, pos: usize, emit: &mut dyn FnMut(&Vec<Vec<usize>>) -> bool) -> bool {
        let mut pos = pos;
        while pos < self.order.len() && self.assign[self.order[pos].0][self.order[pos].1] != UNSET {
            pos += 1;
        }
        if pos == self.order.len() {
            return emit(&self.assign);
        }
        let (o, x) = self.order[pos];
        for y in 0..self.q.size(o) {
            let mark = self.trail.len();
            if self.propagate(o, x, y) && !self.run(pos + 1, emit) {
                self.undo_to(mark);
                return false;
            }
            self.undo_to(mark);
        }
        true
    }
}

/// Every natural transformation `p → q`, in a deterministic order.
pub fn nat_transformations(p: &Arc<Presheaf>, q: &Arc<Presheaf>) -> Result<Vec<PresheafMap>, PresheafError> {
    p.same_base(q)?;
    let mut out = Vec::new();
    let mut search = Search::new(p, q, false);
    search.run(0, &mut |a| {
        out.push(PresheafMap::new_unchecked(p.clone(), q.clone(), a.clone()));
        true
    });
    Ok(out)
}

pub fn count_nat_transformations(p: &Presheaf, q: &Presheaf) -> Result<usize, PresheafError> {
    p.same_base(q)?;
    let mut count = 0;
    Search::new(p, q, false).run(0, &mut |_| {
        count += 1;
        true
    });
    Ok(count)
}

/// First natural map found, optionally restricted to componentwise-injective
/// ones (isomorphisms when the sizes agree).
pub(crate) fn find_nat(p: &Arc<Presheaf>, q: &Arc<Presheaf>, injective: bool) -> Option<PresheafMap> {
    let mut found = None;
    Search::new(p, q, injective).run(0, &mut |a| {
        found = Some(a.clone());
        false
    });
    found.map(|c| PresheafMap::new_unchecked(p.clone(), q.clone(), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;
    use crate::presheaf::fixtures::gph;

    /// Brute force over all families of component functions.
    fn brute_count(p: &Presheaf, q: &Presheaf) -> usize {
        let c = p.base();
        let mut radices = Vec::new();
        for o in 0..c.num_objects() {
            radices.extend(std::iter::repeat_n(q.size(o), p.size(o)));
        }
        crate::finset::tuples(&radices)
            .filter(|t| {
                let mut comps = Vec::new();
                let mut k = 0;
                for o in 0..c.num_objects() {
                    comps.push(t[k..k + p.size(o)].to_vec());
                    k += p.size(o);
                }
                PresheafMap::new_unchecked(Arc::new(p.clone()), Arc::new(q.clone()), comps).validate().is_ok()
            })
            .count()
    }

    #[test]
    fn terminal_graph_has_no_map_into_the_edge() {
        let one = Arc::new(gph::terminal());
        let e = Arc::new(gph::edge());
        assert!(nat_transformations(&one, &e).unwrap().is_empty());
        assert_eq!(nat_transformations(&one, &one).unwrap().len(), 1);
    }

    #[test]
    fn yoneda_counts() {
        let base = Arc::new(shapes::rgph_base());
        let e = Presheaf::representable(&base, 1);
        let g = Arc::new(e.product(&e).unwrap());
        for c in 0..base.num_objects() {
            let y = Arc::new(Presheaf::representable(&base, c));
            assert_eq!(nat_transformations(&y, &g).unwrap().len(), g.size(c));
        }
    }

    #[test]
    fn propagation_matches_brute_force() {
        let base = Arc::new(shapes::gph_base());
        let v = Presheaf::representable(&base, 0);
        let e = Presheaf::representable(&base, 1);
        let one = gph::terminal();
        let ee = e.product(&e).unwrap();
        let list = [v.clone(), e.clone(), one.clone(), Presheaf::coproduct(&[&v, &e]).unwrap(), ee];
        for p in &list {
            for q in &list {
                if p.total_size() + q.total_size() > 9 {
                    continue;
                }
                assert_eq!(count_nat_transformations(p, q).unwrap(), brute_count(p, q));
            }
        }
    }
}
