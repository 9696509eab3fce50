//! Limits of models are computed carrier-wise; sifted colimits carrier-wise
//! with induced operations.

use std::collections::HashMap;
use std::sync::Arc;

use super::{table_args, Model, ModelError, ModelHom, Structure};
use crate::fincat::{is_sifted, FinCat};
use crate::finset::{tuple_index, tuples, SetFunctor};
use crate::theory::TheoryPresentation;

pub fn terminal_model(t: &Arc<TheoryPresentation>) -> Model {
    let sorts = t.signature().sorts().len();
    let tables = (0..t.signature().ops().len()).map(|_| vec![0]).collect();
    Model::new_unchecked(Structure::new(t.clone(), vec![1; sorts], tables).expect("one-point tables"))
}

/// Product with its projections; the empty product is the terminal model.
pub fn product_of_models(t: &Arc<TheoryPresentation>, factors: &[Arc<Model>]) -> Result<(Arc<Model>, Vec<ModelHom>), ModelError> {
    if factors.iter().any(|m| m.theory() != t) {
        return Err(ModelError::TheoryMismatch);
    }
    let sig = t.signature();
    let sorts = sig.sorts().len();
    // element of sort s: mixed-radix tuple of factor elements
    let radices: Vec<Vec<usize>> = (0..sorts).map(|s| factors.iter().map(|m| m.size(s)).collect()).collect();
    let carriers: Vec<usize> = radices.iter().map(|r| r.iter().product()).collect();
    let names = (0..sorts)
        .map(|s| {
            tuples(&radices[s])
                .map(|x| {
                    let parts: Vec<&str> = x.iter().zip(factors).map(|(&e, m)| m.names(s)[e].as_str()).collect();
                    format!("({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let mut tables = Vec::new();
    for op in 0..sig.ops().len() {
        let args = table_args(t, op);
        let res = sig.op(op).result;
        let arg_radices: Vec<usize> = args.iter().map(|&s| carriers[s]).collect();
        let table = tuples(&arg_radices)
            .map(|xs| {
                let decoded: Vec<Vec<usize>> = xs.iter().zip(&args).map(|(&x, &s)| decode(&radices[s], x)).collect();
                let comps: Vec<usize> = factors
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.apply(op, &decoded.iter().map(|d| d[i]).collect::<Vec<_>>()))
                    .collect();
                tuple_index(&radices[res], &comps)
            })
            .collect();
        tables.push(table);
    }
    let product = Arc::new(Model::new_unchecked(Structure::with_names(t.clone(), carriers.clone(), names, tables)?));
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let maps = (0..sorts).map(|s| (0..carriers[s]).map(|x| decode(&radices[s], x)[i]).collect()).collect();
            ModelHom::new_unchecked(product.clone(), m.clone(), maps)
        })
        .collect();
    Ok((product, projections))
}

fn decode(radices: &[usize], mut k: usize) -> Vec<usize> {
    let mut t = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        t[i] = k % radices[i];
        k /= radices[i];
    }
    t
}

/// The submodel on which `f` and `g` agree, with its inclusion.
pub fn equalizer_of_models(f: &ModelHom, g: &ModelHom) -> Result<(Arc<Model>, ModelHom), ModelError> {
    if f.source != g.source || f.target != g.target {
        return Err(ModelError::Shape("equalizer needs parallel homomorphisms".into()));
    }
    let a = &f.source;
    let t = a.theory();
    let sig = t.signature();
    let keep: Vec<Vec<usize>> =
        (0..a.carriers().len()).map(|s| (0..a.size(s)).filter(|&x| f.maps[s][x] == g.maps[s][x]).collect()).collect();
    let index: Vec<HashMap<usize, usize>> = keep.iter().map(|k| k.iter().enumerate().map(|(i, &x)| (x, i)).collect()).collect();
    let carriers: Vec<usize> = keep.iter().map(Vec::len).collect();
    let names = keep.iter().enumerate().map(|(s, k)| k.iter().map(|&x| a.names(s)[x].clone()).collect()).collect();
    let mut tables = Vec::new();
    for op in 0..sig.ops().len() {
        let args = table_args(t, op);
        let res = sig.op(op).result;
        let radices: Vec<usize> = args.iter().map(|&s| carriers[s]).collect();
        let table = tuples(&radices)
            .map(|xs| {
                let orig: Vec<usize> = xs.iter().zip(&args).map(|(&x, &s)| keep[s][x]).collect();
                index[res][&a.apply(op, &orig)]
            })
            .collect();
        tables.push(table);
    }
    let eq = Arc::new(Model::new_unchecked(Structure::with_names(t.clone(), carriers, names, tables)?));
    let inclusion = ModelHom::new_unchecked(eq.clone(), a.clone(), keep);
    Ok((eq, inclusion))
}

/// Colimit over a sifted index category: carriers are the FinSet colimits,
/// and each operation is induced from the objects of the diagram. `arrows`
/// has one homomorphism per morphism of `shape`.
pub fn sifted_colimit_of_models(
    shape: &Arc<FinCat>,
    objects: &[Arc<Model>],
    arrows: &[ModelHom],
) -> Result<(Arc<Model>, Vec<ModelHom>), ModelError> {
    let verdict = is_sifted(shape);
    if !verdict.sifted {
        return Err(ModelError::NotSifted(format!("{:?}", verdict.witness)));
    }
    if objects.len() != shape.num_objects() || arrows.len() != shape.num_morphisms() {
        return Err(ModelError::Shape("diagram does not match its index category".into()));
    }
    let t = objects[0].theory().clone();
    if objects.iter().any(|m| *m.theory() != t) {
        return Err(ModelError::TheoryMismatch);
    }
    for (u, h) in arrows.iter().enumerate() {
        if h.source != objects[shape.src(u)] || h.target != objects[shape.dst(u)] {
            return Err(ModelError::Shape(format!("arrow {} has the wrong ends", shape.morphism(u).name)));
        }
    }
    let sig = t.signature();
    let sorts = sig.sorts().len();
    let mut injections = vec![vec![Vec::new(); sorts]; objects.len()];
    let mut carriers = Vec::new();
    for s in 0..sorts {
        let sizes = objects.iter().map(|m| m.size(s)).collect();
        let maps = arrows.iter().map(|h| h.maps[s].clone()).collect();
        let d = SetFunctor::new(shape.clone(), sizes, maps).map_err(|e| ModelError::Shape(e.to_string()))?;
        let c = d.colimit();
        for (j, inj) in c.injections.into_iter().enumerate() {
            injections[j][s] = inj;
        }
        carriers.push(c.size);
    }
    let mut tables = Vec::new();
    for op in 0..sig.ops().len() {
        let args = table_args(&t, op);
        let res = sig.op(op).result;
        let radices: Vec<usize> = args.iter().map(|&s| carriers[s]).collect();
        let mut table: Vec<Option<usize>> = vec![None; radices.iter().product()];
        for (j, m) in objects.iter().enumerate() {
            for xs in tuples(&m.radices(op)) {
                let key: Vec<usize> = xs.iter().zip(&args).map(|(&x, &s)| injections[j][s][x]).collect();
                let val = injections[j][res][m.apply(op, &xs)];
                let slot = &mut table[tuple_index(&radices, &key)];
                match slot {
                    Some(v) if *v != val => return Err(ModelError::InducedOpIllDefined(sig.op(op).name.clone())),
                    _ => *slot = Some(val),
                }
            }
        }
        let table = table.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| ModelError::InducedOpIllDefined(sig.op(op).name.clone()))?;
        tables.push(table);
    }
    let names = (0..sorts)
        .map(|s| {
            let mut names = vec![None; carriers[s]];
            for (j, m) in objects.iter().enumerate() {
                for (x, &c) in injections[j][s].iter().enumerate() {
                    names[c].get_or_insert_with(|| m.names(s)[x].clone());
                }
            }
            names.into_iter().map(Option::unwrap).collect()
        })
        .collect();
    let colim = Arc::new(Model::new(Structure::with_names(t, carriers, names, tables)?)?);
    let legs = objects
        .iter()
        .zip(injections)
        .map(|(m, inj)| ModelHom::new_unchecked(m.clone(), colim.clone(), inj))
        .collect();
    Ok((colim, legs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::shapes;
    use crate::models::tests::{cyclic, left_zero_monoid};
    use crate::models::check_model;

    #[test]
    fn product_with_terminal_is_isomorphic() {
        let z3 = Arc::new(cyclic(3));
        let one = Arc::new(terminal_model(z3.theory()));
        let (p, proj) = product_of_models(z3.theory(), &[z3.clone(), one]).unwrap();
        assert!(check_model(&p).holds);
        assert!(proj[0].is_isomorphism());
    }

    #[test]
    fn klein_four() {
        let z2 = Arc::new(cyclic(2));
        let (p, proj) = product_of_models(z2.theory(), &[z2.clone(), z2.clone()]).unwrap();
        assert_eq!(p.size(0), 4);
        assert!(check_model(&p).holds);
        // every non-identity element has order two
        for x in 0..4 {
            assert_eq!(p.apply(0, &[x, x]), p.table(1)[0]);
        }
        for h in &proj {
            ModelHom::new(h.source.clone(), h.target.clone(), h.maps.clone()).unwrap();
        }
    }

    #[test]
    fn equalizer_of_identities() {
        let z4 = Arc::new(cyclic(4));
        let id = ModelHom::identity(z4.clone());
        let (e, inc) = equalizer_of_models(&id, &id).unwrap();
        assert_eq!(e.size(0), 4);
        assert!(inc.is_isomorphism());
        // identity vs negation on Z/4 agree on {0, 2}
        let neg = ModelHom::new(z4.clone(), z4.clone(), vec![vec![0, 3, 2, 1]]).unwrap();
        let (e, inc) = equalizer_of_models(&id, &neg).unwrap();
        assert_eq!(e.size(0), 2);
        assert!(check_model(&e).holds);
        ModelHom::new(inc.source.clone(), inc.target.clone(), inc.maps.clone()).unwrap();
    }

    fn reflexive_diagram(a: Arc<Model>, b: Arc<Model>, f: Vec<Vec<usize>>, g: Vec<Vec<usize>>, s: Vec<Vec<usize>>) -> (Arc<FinCat>, Vec<Arc<Model>>, Vec<ModelHom>) {
        let shape = Arc::new(shapes::reflexive_pair());
        let objects = vec![a.clone(), b.clone()];
        let arrows = (0..shape.num_morphisms())
            .map(|u| {
                let name = shape.morphism(u).name.as_str();
                let (src, dst) = (objects[shape.src(u)].clone(), objects[shape.dst(u)].clone());
                let maps = match name {
                    "f" => f.clone(),
                    "g" => g.clone(),
                    "s" => s.clone(),
                    _ if shape.is_identity(u) => (0..src.carriers().len()).map(|so| (0..src.size(so)).collect()).collect(),
                    _ => {
                        // composites s∘f, s∘g
                        let first = if name.contains('f') { &f } else { &g };
                        first.iter().zip(&s).map(|(x, y)| x.iter().map(|&v| y[v]).collect()).collect()
                    }
                };
                ModelHom::new(src, dst, maps).unwrap()
            })
            .collect();
        (shape, objects, arrows)
    }

    #[test]
    fn reflexive_coequalizer_of_identities() {
        let shape = shapes::reflexive_pair();
        for u in 0..shape.num_morphisms() {
            assert!(["id_P", "id_Q", "f", "g", "s", "sf", "sg"].contains(&shape.morphism(u).name.as_str()), "{}", shape.morphism(u).name);
        }
        let m = Arc::new(cyclic(3));
        let id = vec![vec![0, 1, 2]];
        let (shape, objects, arrows) = reflexive_diagram(m.clone(), m.clone(), id.clone(), id.clone(), id);
        let (c, legs) = sifted_colimit_of_models(&shape, &objects, &arrows).unwrap();
        assert_eq!(c.size(0), 3);
        assert!(legs[1].is_isomorphism());
    }

    #[test]
    fn reflexive_coequalizer_collapsing_generators() {
        // R = {(x, y) | q x = q y} ⊆ M × M for q: M → {1, a} collapsing a, b;
        // the projections R ⇉ M with the diagonal as common section
        let m = Arc::new(left_zero_monoid());
        let t = m.theory().clone();
        let small = Arc::new(Model::new(Structure::new(t.clone(), vec![2], vec![vec![0, 1, 1, 1], vec![0]]).unwrap()).unwrap());
        let q = ModelHom::new(m.clone(), small, vec![vec![0, 1, 1]]).unwrap();
        let (mm, proj) = product_of_models(&t, &[m.clone(), m.clone()]).unwrap();
        let (r, inc) = equalizer_of_models(&proj[0].then(&q), &proj[1].then(&q)).unwrap();
        assert_eq!(r.size(0), 5);
        let f = inc.then(&proj[0]).maps;
        let g = inc.then(&proj[1]).maps;
        let diag: Vec<usize> = (0..3).map(|x| inc.maps[0].iter().position(|&p| p == x * 3 + x).unwrap()).collect();
        let _ = mm;
        let (shape, objects, arrows) = reflexive_diagram(r, m, f, g, vec![diag]);
        let (c, legs) = sifted_colimit_of_models(&shape, &objects, &arrows).unwrap();
        assert_eq!(c.size(0), 2);
        assert_eq!(legs[1].maps[0][1], legs[1].maps[0][2]);
        assert!(check_model(&c).holds);
    }

    #[test]
    fn colimit_over_a_point_and_refusal_of_non_sifted_shapes() {
        let z3 = Arc::new(cyclic(3));
        let shape = Arc::new(shapes::terminal());
        let (c, _) = sifted_colimit_of_models(&shape, std::slice::from_ref(&z3), &[ModelHom::identity(z3.clone())]).unwrap();
        assert_eq!(*c, *z3);
        let two = Arc::new(shapes::discrete(2));
        let ids = [ModelHom::identity(z3.clone()), ModelHom::identity(z3.clone())];
        assert!(matches!(sifted_colimit_of_models(&two, &[z3.clone(), z3], &ids), Err(ModelError::NotSifted(_))));
    }
}
