//! Standard presheaves: graphs, reflexive graphs, and representables on the
//! category of finite sets and injections.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{Presheaf, PresheafMap};
use crate::fincat::{shapes, FinCat, ObId};

pub mod gph {
    use super::*;
    use crate::presheaf::PresheafDiagram;

    pub const V: ObId = 0;
    pub const E: ObId = 1;

    pub fn base() -> Arc<FinCat> {
        static BASE: OnceLock<Arc<FinCat>> = OnceLock::new();
        BASE.get_or_init(|| Arc::new(shapes::gph_base())).clone()
    }

    /// A graph from its vertex count and `(source, target)` edge list.
    pub fn graph(vertices: usize, edges: &[(usize, usize)]) -> Presheaf {
        let b = base();
        let mut actions = vec![Vec::new(); b.num_morphisms()];
        actions[b.identity(V)] = (0..vertices).collect();
        actions[b.identity(E)] = (0..edges.len()).collect();
        actions[b.morphism_id("s").unwrap()] = edges.iter().map(|e| e.0).collect();
        actions[b.morphism_id("t").unwrap()] = edges.iter().map(|e| e.1).collect();
        Presheaf::new(b, vec![vertices, edges.len()], actions).expect("edge endpoints out of range")
    }

    /// The single vertex `y(V)`.
    pub fn vertex() -> Presheaf {
        Presheaf::representable(&base(), V)
    }

    /// The single edge `y(E)`, with vertices `s` and `t`.
    pub fn edge() -> Presheaf {
        Presheaf::representable(&base(), E)
    }

    /// One vertex with one loop.
    pub fn terminal() -> Presheaf {
        Presheaf::terminal(&base())
    }

    fn vertex_of_edge(name: &str) -> usize {
        let b = base();
        b.hom_index(b.morphism_id(name).unwrap())
    }

    /// `f = [id, source], g = [id, target]: E + V ⇉ E`.
    pub fn source_target_pair() -> (PresheafMap, PresheafMap) {
        let (e, v) = (edge(), vertex());
        let sum = Arc::new(Presheaf::coproduct(&[&e, &v]).unwrap());
        let e = Arc::new(e);
        let leg = |name: &str| {
            let mut at_v: Vec<usize> = (0..e.size(V)).collect();
            at_v.push(vertex_of_edge(name));
            PresheafMap::new(sum.clone(), e.clone(), vec![at_v, (0..e.size(E)).collect()]).unwrap()
        };
        (leg("s"), leg("t"))
    }

    /// The same pair as a reflexive coequalizer diagram, with the section
    /// `E → E + V` the coproduct injection.
    pub fn reflexive_coequalizer() -> PresheafDiagram {
        let (f, g) = source_target_pair();
        let (sum, e) = (f.source().clone(), f.target().clone());
        let section =
            PresheafMap::new(e.clone(), sum.clone(), (0..2).map(|o| (0..e.size(o)).collect()).collect()).unwrap();
        PresheafDiagram::from_generators(
            Arc::new(shapes::reflexive_pair()),
            vec![sum, e],
            &[("f", f), ("g", g), ("s", section)],
        )
        .expect("reflexive coequalizer")
    }
}

pub mod rgph {
    use super::*;

    pub const V: ObId = 0;
    pub const E: ObId = 1;

    pub fn base() -> Arc<FinCat> {
        static BASE: OnceLock<Arc<FinCat>> = OnceLock::new();
        BASE.get_or_init(|| Arc::new(shapes::rgph_base())).clone()
    }

    /// `y(V)`: one vertex with its degenerate loop; terminal.
    pub fn vertex() -> Presheaf {
        Presheaf::representable(&base(), V)
    }

    /// `y(E)`: two vertices, one proper edge and two degenerate loops.
    pub fn edge() -> Presheaf {
        Presheaf::representable(&base(), E)
    }

    pub fn terminal() -> Presheaf {
        Presheaf::terminal(&base())
    }
}

pub mod inj {
    use super::*;

    /// The opposite of the category of injections between `0..=k`, so that
    /// presheaves on it are functors out of the injections category.
    pub fn base(k: usize) -> Arc<FinCat> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FinCat>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
        cache.entry(k).or_insert_with(|| Arc::new(shapes::injections(k).opposite())).clone()
    }

    /// `𝕀(n, −)` truncated at `k`.
    pub fn representable(n: usize, k: usize) -> Presheaf {
        assert!(n <= k, "object {n} is outside the truncation {k}");
        Presheaf::representable(&base(k), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_fixtures_have_expected_sizes() {
        assert_eq!(gph::vertex().sizes(), &[1, 0]);
        assert_eq!(gph::edge().sizes(), &[2, 1]);
        assert_eq!(gph::terminal().sizes(), &[1, 1]);
        assert_eq!(rgph::edge().sizes(), &[2, 3]);
        assert_eq!(rgph::vertex().sizes(), &[1, 1]);
    }

    #[test]
    fn edge_goes_from_s_to_t() {
        let e = gph::edge();
        let b = gph::base();
        let s = b.morphism_id("s").unwrap();
        let t = b.morphism_id("t").unwrap();
        assert_eq!(e.label(gph::V, e.act(s, 0)), "s");
        assert_eq!(e.label(gph::V, e.act(t, 0)), "t");
    }

    #[test]
    fn reflexive_coequalizer_is_valid() {
        gph::reflexive_coequalizer().validate().unwrap();
    }

    #[test]
    fn injection_representables_count_injections() {
        // 𝕀(2, 3) has 3·2 elements
        let y = inj::representable(2, 3);
        y.validate().unwrap();
        assert_eq!(y.sizes(), &[0, 0, 2, 6]);
        assert!(Arc::ptr_eq(&inj::base(3), y.base()));
    }
}
