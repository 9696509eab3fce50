//! Left adjoints to the restriction functors `G*: Mod(T) → Mod(S)` along
//! theory morphisms `G: S → T`, with a bounded certificate of the
//! universal property.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::closure::{Closure, Relation};
use super::hom::{hom_models, DEFAULT_HOM_BOUND};
use super::search::models_up_to_iso;
use super::{table_args, Model, ModelError, ModelHom, Structure};
use crate::finset::tuples;
use crate::theory::TheoryMorphism;

#[derive(Clone, Debug)]
pub struct AdjointOptions {
    /// Closure gives up past this many elements.
    pub max_elements: usize,
    /// Certification quantifies over target models with every carrier of
    /// at most this size, up to isomorphism.
    pub certify_size: usize,
    /// And at most this many of them.
    pub certify_limit: usize,
    /// Naturality squares are checked between the first this-many models.
    pub naturality_models: usize,
    pub hom_bound: u128,
}

impl Default for AdjointOptions {
    fn default() -> Self {
        AdjointOptions {
            max_elements: 4096,
            certify_size: 4,
            certify_limit: 200,
            naturality_models: 12,
            hom_bound: DEFAULT_HOM_BOUND,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub certify_size: usize,
    pub models_checked: usize,
    /// Naturality squares `φ(k ∘ h) = G*k ∘ φ(h)` checked.
    pub naturality_squares: usize,
    pub holds: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug)]
pub struct LeftAdjoint {
    pub model: Arc<Model>,
    /// The unit `A → G*(model)`.
    pub unit: ModelHom,
    pub certificate: Certificate,
}

/// `G*B`: the carriers of `B` reindexed along the sort map, each source
/// operation interpreted by evaluating its image.
pub fn restrict(g: &TheoryMorphism, b: &Arc<Model>) -> Result<Arc<Model>, ModelError> {
    if b.theory() != &g.target {
        return Err(ModelError::TheoryMismatch);
    }
    let ss = g.source.signature();
    let carriers: Vec<usize> = g.sort_map.iter().map(|&t| b.size(t)).collect();
    let names = g.sort_map.iter().map(|&t| b.names(t).to_vec()).collect();
    let mut tables = Vec::new();
    for op in 0..ss.ops().len() {
        let args = table_args(&g.source, op);
        let radices: Vec<usize> = args.iter().map(|&s| carriers[s]).collect();
        tables.push(tuples(&radices).map(|xs| b.eval(&g.op_map[op], &xs)).collect());
    }
    Ok(Arc::new(Model::new(Structure::with_names(g.source.clone(), carriers, names, tables)?)?))
}

/// The free `T`-model on the carriers of `A` subject to `G(σ)(a…) = σ_A(a…)`
/// for every source operation instance, built by congruence closure, then
/// certified against small target models.
pub fn left_adjoint_algebraic(g: &TheoryMorphism, a: &Arc<Model>, opts: &AdjointOptions) -> Result<LeftAdjoint, ModelError> {
    if a.theory() != &g.source {
        return Err(ModelError::TheoryMismatch);
    }
    let ss = g.source.signature();
    let mut cl = Closure::new(g.target.clone());
    let ids: Vec<Vec<usize>> = a
        .carriers()
        .iter()
        .enumerate()
        .map(|(s, &n)| (0..n).map(|x| cl.add(g.sort_map[s], a.names(s)[x].clone())).collect())
        .collect();
    let mut relations = Vec::new();
    for op in 0..ss.ops().len() {
        let args = table_args(&g.source, op);
        let res = ss.op(op).result;
        for xs in tuples(&a.radices(op)) {
            let asg = xs.iter().zip(&args).map(|(&x, &s)| ids[s][x]).collect();
            relations.push(Relation { term: g.op_map[op].clone(), asg, value: ids[res][a.apply(op, &xs)] });
        }
    }
    cl.close(&relations, opts.max_elements)?;
    let (model, class) = cl.into_model();
    let model = Arc::new(model);
    let unit_maps: Vec<Vec<usize>> = ids.iter().map(|l| l.iter().map(|&i| class[i]).collect()).collect();
    let restricted = restrict(g, &model)?;
    let unit = ModelHom::new(a.clone(), restricted, unit_maps)?;
    let certificate = certify(g, a, &model, &unit, opts)?;
    Ok(LeftAdjoint { model, unit, certificate })
}

/// Checks that `h ↦ G*h ∘ η` is a bijection `hom_T(L, B) → hom_S(A, G*B)`
/// for every `T`-model `B` within the bound, and natural in `B`.
pub fn certify(
    g: &TheoryMorphism,
    a: &Arc<Model>,
    l: &Arc<Model>,
    unit: &ModelHom,
    opts: &AdjointOptions,
) -> Result<Certificate, ModelError> {
    let targets: Vec<Arc<Model>> =
        models_up_to_iso(&g.target, opts.certify_size, opts.certify_limit)?.into_iter().map(Arc::new).collect();
    let transpose = |h: &ModelHom| -> Vec<Vec<usize>> {
        unit.maps.iter().enumerate().map(|(s, u)| u.iter().map(|&x| h.maps[g.sort_map[s]][x]).collect()).collect()
    };
    let fail = |models_checked, naturality_squares, msg: String| Certificate {
        certify_size: opts.certify_size,
        models_checked,
        naturality_squares,
        holds: false,
        failure: Some(msg),
    };
    let mut homs_from_l = Vec::new();
    for (i, b) in targets.iter().enumerate() {
        let left = hom_models(l, b, opts.hom_bound)?;
        let gb = restrict(g, b)?;
        let right = hom_models(a, &gb, opts.hom_bound)?;
        let index: HashMap<&Vec<Vec<usize>>, usize> = right.iter().enumerate().map(|(k, h)| (&h.maps, k)).collect();
        let mut hit = vec![false; right.len()];
        for h in &left {
            match index.get(&transpose(h)) {
                Some(&k) if !hit[k] => hit[k] = true,
                Some(_) => return Ok(fail(i + 1, 0, format!("two maps out of the adjoint agree on the unit (model #{i})"))),
                None => return Ok(fail(i + 1, 0, format!("transpose is not a homomorphism (model #{i})"))),
            }
        }
        if hit.iter().any(|&x| !x) {
            return Ok(fail(i + 1, 0, format!("some map A → G*B does not factor through the unit (model #{i})")));
        }
        homs_from_l.push(left);
    }
    let mut squares = 0;
    let n = targets.len().min(opts.naturality_models);
    for i in 0..n {
        for j in 0..n {
            for k in hom_models(&targets[i], &targets[j], opts.hom_bound)? {
                for h in &homs_from_l[i] {
                    squares += 1;
                    let lhs = transpose(&h.then(&k));
                    let rhs: Vec<Vec<usize>> = transpose(h)
                        .iter()
                        .enumerate()
                        .map(|(s, f)| f.iter().map(|&x| k.maps[g.sort_map[s]][x]).collect())
                        .collect();
                    if lhs != rhs {
                        return Ok(fail(targets.len(), squares, format!("naturality fails between models #{i} and #{j}")));
                    }
                }
            }
        }
    }
    Ok(Certificate {
        certify_size: opts.certify_size,
        models_checked: targets.len(),
        naturality_squares: squares,
        holds: true,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tests::{cyclic, left_zero_monoid, theory};
    use crate::models::Structure;

    #[test]
    fn identity_morphism_gives_back_the_model() {
        let z3 = Arc::new(cyclic(3));
        let g = TheoryMorphism::identity(z3.theory().clone());
        let adj = left_adjoint_algebraic(&g, &z3, &AdjointOptions::default()).unwrap();
        assert_eq!(adj.model.size(0), 3);
        assert!(adj.unit.is_isomorphism());
        assert!(adj.certificate.holds, "{:?}", adj.certificate);
    }

    #[test]
    fn abelianization_of_the_left_zero_monoid() {
        let m = Arc::new(left_zero_monoid());
        let g = TheoryMorphism::parse(theory("monoid"), theory("commutative-monoid"), "m(x, y) = m(x, y)\ne = e\n").unwrap();
        let adj = left_adjoint_algebraic(&g, &m, &AdjointOptions::default()).unwrap();
        assert_eq!(adj.model.size(0), 2);
        assert_eq!(adj.unit.maps[0][1], adj.unit.maps[0][2]);
        let a = adj.unit.maps[0][1];
        assert_eq!(adj.model.apply(0, &[a, a]), a);
        assert!(adj.certificate.holds, "{:?}", adj.certificate);
        assert!(adj.certificate.models_checked > 0 && adj.certificate.naturality_squares > 0);
    }

    #[test]
    fn free_semilattice_on_a_two_element_set() {
        let sets = theory("empty");
        let two = Arc::new(Model::new(Structure::new(sets.clone(), vec![2], vec![]).unwrap()).unwrap());
        let g = TheoryMorphism::parse(sets, theory("semilattice"), "").unwrap();
        let adj = left_adjoint_algebraic(&g, &two, &AdjointOptions::default()).unwrap();
        assert_eq!(adj.model.size(0), 4);
        assert!(adj.certificate.holds);
    }

    #[test]
    fn restriction_forgets_along_the_map() {
        let cm = theory("commutative-monoid");
        let g = TheoryMorphism::parse(theory("monoid"), cm.clone(), "m(x, y) = m(x, y)\ne = e\n").unwrap();
        let z2 = Arc::new(Model::new(Structure::new(cm, vec![2], vec![vec![0, 1, 1, 0], vec![0]]).unwrap()).unwrap());
        let r = restrict(&g, &z2).unwrap();
        assert_eq!(r.tables(), z2.tables());
    }
}
