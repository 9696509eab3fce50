//! Eilenberg–Moore algebras of the term monad on a finite carrier, found
//! without reference to the equations, and compared with models.
//!
//! A structure map `a: T(X) → X` with `a ∘ η = id` is determined by its
//! values on the basic elements `nf(f(x₁, …, xₖ))` that are not variables:
//! on a normal form `f(t₁, …, tₖ)`, the multiplication law forces
//! `a(f(t…)) = a(nf(f(a t₁, …, a tₖ)))`. Flattened AC nodes are folded from
//! the left in the term order. The search fixes those values subject to
//! `a ∘ μ = a ∘ T(a)` on every `f(t₁, …, tₖ)` with `tᵢ` in a slice of `T(X)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{MonadError, TermMonad};
use crate::models::{check_model, enumerate_models, hom_models, Model, Structure, DEFAULT_HOM_BOUND};
use crate::rewrite::Term;
use crate::theory::TheoryPresentation;

/// Algebras and models are refused beyond this many.
const LIMIT: usize = 100_000;
/// Re-checking samples this many instances when the deeper slice has more.
const MAX_VERIFY: usize = 20_000;
/// Model pairs compared for hom agreement.
const MAX_HOM_PAIRS: usize = 64;

/// The basic elements of `T(X)` for `|X| = size` and, per operation, the
/// lookup from arguments in `X` to a variable or a basic element.
#[derive(Debug)]
struct Basics {
    size: usize,
    terms: Vec<Term>,
    /// `flat[op][code]`: `Ok(variable) | Err(basic index)`, arguments coded
    /// in mixed radix, last fastest.
    flat: Vec<Vec<Result<usize, usize>>>,
}

fn arity(sig: &crate::rewrite::Signature, op: usize) -> usize {
    if sig.is_ac(op) {
        2
    } else {
        sig.op(op).args.len()
    }
}

impl Basics {
    fn new(m: &TermMonad, size: usize) -> Basics {
        let sig = m.theory().signature().clone();
        let mut terms: Vec<Term> = Vec::new();
        let mut index: HashMap<Term, usize> = HashMap::new();
        let mut flat = Vec::new();
        for op in 0..sig.ops().len() {
            let mut row = Vec::new();
            for args in tuples(size, arity(&sig, op)) {
                let t = m.nf(&sig.app(op, args.iter().map(|&c| Term::Var(c)).collect()));
                row.push(match t {
                    Term::Var(v) => Ok(v),
                    t => Err(*index.entry(t.clone()).or_insert_with(|| {
                        terms.push(t);
                        terms.len() - 1
                    })),
                });
            }
            flat.push(row);
        }
        Basics { size, terms, flat }
    }

    fn lookup(&self, op: usize, args: &[usize], values: &[Option<usize>]) -> Option<usize> {
        let code = args.iter().fold(0, |acc, &x| acc * self.size + x);
        match self.flat[op][code] {
            Ok(v) => Some(v),
            Err(b) => values[b],
        }
    }

    /// `a(t)` for a normal form over the carrier.
    fn eval(&self, m: &TermMonad, t: &Term, values: &[Option<usize>]) -> Option<usize> {
        match t {
            Term::Var(v) => Some(*v),
            Term::App { op, args, .. } => {
                if args.len() > 2 && m.theory().signature().is_ac(*op) {
                    let mut acc = self.eval(m, &args[0], values)?;
                    for a in &args[1..] {
                        let b = self.eval(m, a, values)?;
                        acc = self.lookup(*op, &[acc, b], values)?;
                    }
                    Some(acc)
                } else {
                    let mut vals = [0usize; 8];
                    let mut long = Vec::new();
                    let vals: &mut [usize] = if args.len() <= 8 {
                        &mut vals[..args.len()]
                    } else {
                        long.resize(args.len(), 0);
                        &mut long
                    };
                    for (v, a) in vals.iter_mut().zip(args) {
                        *v = self.eval(m, a, values)?;
                    }
                    self.lookup(*op, vals, values)
                }
            }
        }
    }
}

fn tuples(size: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..size).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

/// An instance of the multiplication law: `τ = f(t₁, …, tₖ)` with the
/// `tᵢ` given by slice index and `nf(f(t…))` precomputed.
struct Instance {
    op: usize,
    args: Vec<usize>,
    joined: Term,
}

/// Every instance over `T(size)`, or `max` seeded samples when there are
/// more.
fn instances(m: &TermMonad, size: usize, max: usize) -> Vec<Instance> {
    let sig = m.theory().signature().clone();
    let slice = m.slice(size);
    let shapes: Vec<(usize, usize)> = (0..sig.ops().len()).map(|op| (op, arity(&sig, op))).collect();
    let total: u128 = shapes.iter().map(|&(_, k)| (slice.len() as u128).pow(k as u32)).sum();
    let make = |op: usize, args: Vec<usize>| {
        let joined = m.nf(&sig.app(op, args.iter().map(|&i| slice.elements[i].clone()).collect()));
        Instance { op, args, joined }
    };
    if total <= max as u128 {
        return shapes.iter().flat_map(|&(op, k)| tuples(slice.len(), k).into_iter().map(move |a| (op, a))).map(|(op, a)| make(op, a)).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let compound: Vec<(usize, usize)> = shapes.into_iter().filter(|&(_, k)| k > 0).collect();
    (0..max)
        .map(|_| {
            let (op, k) = compound[rng.gen_range(0..compound.len())];
            make(op, (0..k).map(|_| rng.gen_range(0..slice.len())).collect())
        })
        .collect()
}

impl Instance {
    /// `a(μτ) = a(T(a)τ)`, given `a` on the slice elements.
    fn holds(&self, m: &TermMonad, b: &Basics, on_slice: &[Option<usize>], values: &[Option<usize>]) -> Option<bool> {
        let left = b.eval(m, &self.joined, values)?;
        let inner = self.args.iter().map(|&i| on_slice[i]).collect::<Option<Vec<_>>>()?;
        // T(a)τ = nf(f(a t₁, …)) is a variable or a basic element
        Some(left == b.lookup(self.op, &inner, values)?)
    }
}

fn on_slice(m: &TermMonad, b: &Basics, size: usize, values: &[Option<usize>]) -> Vec<Option<usize>> {
    m.slice(size).elements.iter().map(|t| b.eval(m, t, values)).collect()
}

/// An algebra `a: T(X) → X` by its values on the basic elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmAlgebra {
    pub size: usize,
    pub values: Vec<usize>,
}

/// The constraint depth: deep enough to see every rule's redex one level
/// down, and associativity of AC operations.
fn constraint_depth(t: &TheoryPresentation) -> u32 {
    let lhs = t.rules().rules().iter().map(|r| r.lhs.depth()).max().unwrap_or(0);
    let ac = (0..t.signature().ops().len()).any(|o| t.signature().is_ac(o));
    lhs.saturating_sub(1).max(ac as u32)
}

fn search(m: &TermMonad, b: &Basics, inst: &[Instance]) -> Result<Vec<Vec<usize>>, MonadError> {
    // instances still undetermined are passed down; decided ones drop out
    fn go(
        m: &TermMonad,
        b: &Basics,
        pending: Vec<&Instance>,
        values: &mut Vec<Option<usize>>,
        at: usize,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), MonadError> {
        let known = on_slice(m, b, b.size, values);
        let mut open = Vec::with_capacity(pending.len());
        for i in pending {
            match i.holds(m, b, &known, values) {
                Some(false) => return Ok(()),
                Some(true) => {}
                None => open.push(i),
            }
        }
        if at == values.len() {
            out.push(values.iter().map(|v| v.unwrap()).collect());
            if out.len() > LIMIT {
                return Err(MonadError::SearchSpaceTooLarge(format!("more than {LIMIT} algebras")));
            }
            return Ok(());
        }
        for x in 0..b.size {
            values[at] = Some(x);
            go(m, b, open.clone(), values, at + 1, out)?;
        }
        values[at] = None;
        Ok(())
    }
    let mut out = Vec::new();
    if b.size == 0 && !b.terms.is_empty() {
        return Ok(out);
    }
    go(m, b, inst.iter().collect(), &mut vec![None; b.terms.len()], 0, &mut out)?;
    Ok(out)
}

/// Every Eilenberg–Moore algebra on `{0, …, size-1}`.
pub fn enumerate_em_algebras(t: Arc<TheoryPresentation>, size: usize) -> Result<Vec<EmAlgebra>, MonadError> {
    let m = TermMonad::new(t.clone(), constraint_depth(&t))?;
    let b = Basics::new(&m, size);
    let inst = instances(&m, size, usize::MAX);
    let mut found: Vec<EmAlgebra> =
        search(&m, &b, &inst)?.into_iter().map(|values| EmAlgebra { size, values }).collect();
    found.sort();
    Ok(found)
}

#[derive(Clone, Debug, Serialize)]
pub struct EmReport {
    pub theory: String,
    pub size: usize,
    pub models: usize,
    pub algebras: usize,
    /// Depth of the slice the search constrained on.
    pub constraint_depth: u32,
    /// Depth of the slice the algebras were re-checked on.
    pub verify_depth: u32,
    pub verified_instances: usize,
    pub algebras_verified: bool,
    pub model_to_algebra: bool,
    pub algebra_to_model: bool,
    pub mutually_inverse: bool,
    pub hom_pairs_checked: usize,
    pub homs_agree: bool,
    pub holds: bool,
}

/// Compares the models of `t` on a carrier of `size` elements with the
/// algebras of its term monad, both ways, and homomorphisms on both sides.
pub fn em_model_correspondence(t: Arc<TheoryPresentation>, size: usize, depth: u32) -> Result<EmReport, MonadError> {
    let cd = constraint_depth(&t);
    let m = TermMonad::new(t.clone(), cd)?;
    let b = Basics::new(&m, size);
    let algebras: Vec<EmAlgebra> = enumerate_em_algebras(t.clone(), size)?;
    let models = enumerate_models(&t, &[size], LIMIT)?;

    // re-check every algebra on a deeper slice
    let vd = depth.max(cd + 1);
    let deep = m.at_depth(vd);
    let deep_inst = instances(&deep, size, MAX_VERIFY);
    let verify = deep_inst.len();
    let mut algebras_verified = true;
    for a in &algebras {
        let vals: Vec<Option<usize>> = a.values.iter().map(|&v| Some(v)).collect();
        let known = on_slice(&deep, &b, size, &vals);
        if deep_inst.iter().any(|i| i.holds(&deep, &b, &known, &vals) != Some(true)) {
            algebras_verified = false;
        }
    }

    let to_algebra = |model: &Model| EmAlgebra {
        size,
        values: b.terms.iter().map(|u| model.eval(u, &(0..size).collect::<Vec<_>>())).collect(),
    };
    let to_structure = |a: &EmAlgebra| -> Structure {
        let vals: Vec<Option<usize>> = a.values.iter().map(|&v| Some(v)).collect();
        let sig = t.signature();
        let tables = (0..sig.ops().len())
            .map(|op| {
                tuples(size, arity(sig, op)).into_iter().map(|args| b.lookup(op, &args, &vals).unwrap()).collect()
            })
            .collect();
        Structure::new(t.clone(), vec![size], tables).expect("tables of the right shape")
    };
    let algebra_set: BTreeSet<&EmAlgebra> = algebras.iter().collect();
    let model_tables: BTreeSet<Vec<Vec<usize>>> = models.iter().map(|m| m.tables().to_vec()).collect();
    let model_to_algebra = models.iter().all(|x| algebra_set.contains(&to_algebra(x)));
    let algebra_to_model = algebras.iter().all(|a| {
        let s = to_structure(a);
        check_model(&s).holds && model_tables.contains(s.tables())
    });
    let mutually_inverse = models.iter().all(|x| to_structure(&to_algebra(x)).tables() == x.tables())
        && algebras.iter().all(|a| {
            let s = to_structure(a);
            Model::new(s).map(|x| to_algebra(&x) == *a).unwrap_or(false)
        });

    // homomorphisms: model homs versus maps commuting with the structure
    // maps; commuting on the terms of depth ≤ 1 gives all of T(X) by
    // induction
    let flat = m.at_depth(1);
    let slice = flat.slice(size);
    let models: Vec<Arc<Model>> = models.into_iter().map(Arc::new).collect();
    let mut hom_pairs = 0;
    let mut homs_agree = true;
    'pairs: for x in &models {
        for y in &models {
            if hom_pairs == MAX_HOM_PAIRS {
                break 'pairs;
            }
            hom_pairs += 1;
            let mut lhs: Vec<Vec<usize>> =
                hom_models(x, y, DEFAULT_HOM_BOUND)?.into_iter().map(|h| h.maps[0].clone()).collect();
            lhs.sort();
            let (ax, ay) = (to_algebra(x), to_algebra(y));
            let (vx, vy): (Vec<Option<usize>>, Vec<Option<usize>>) =
                (ax.values.iter().map(|&v| Some(v)).collect(), ay.values.iter().map(|&v| Some(v)).collect());
            let rhs: Vec<Vec<usize>> = tuples(size, size)
                .into_iter()
                .filter(|h| {
                    slice.elements.iter().all(|u| h[b.eval(&flat, u, &vx).unwrap()] == b.eval(&flat, &flat.map(h, u), &vy).unwrap())
                })
                .collect();
            if lhs != rhs {
                homs_agree = false;
            }
        }
    }
    let holds = algebras_verified && model_to_algebra && algebra_to_model && mutually_inverse && homs_agree;
    Ok(EmReport {
        theory: t.name().into(),
        size,
        models: models.len(),
        algebras: algebras.len(),
        constraint_depth: cd,
        verify_depth: vd,
        verified_instances: verify,
        algebras_verified,
        model_to_algebra,
        algebra_to_model,
        mutually_inverse,
        hom_pairs_checked: hom_pairs,
        homs_agree,
        holds,
    })
}
