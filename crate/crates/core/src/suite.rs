//! Batteries of checks: the worked examples (`paper-examples`) and seeded
//! randomized properties (`properties`). Each check carries the criterion it
//! belongs to and a one-line detail.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fincat::{is_sifted, shapes, FinCat, FinFunctor};
use crate::finset::{is_bijection, SetFunctor};
use crate::models::{
    enumerate_models, equalizer_of_models, hom_models, left_adjoint_algebraic, product_of_models,
    sifted_colimit_of_models, AdjointOptions, Model, ModelHom, Structure, DEFAULT_HOM_BOUND,
};
use crate::monadic::{em_model_correspondence, roundtrip_check, TermMonad};
use crate::presheaf::fixtures::{gph, inj, rgph};
use crate::presheaf::{
    commutes_products_colimit, count_nat_transformations, decompose_into_representables, exhaustive_pairs,
    exponential, finite_colimit, finite_limit, is_strongly_finitely_presentable, lan_weight_comparison,
    nat_transformations, preserves_colimit, uncurry, ColimitShape, LimitShape, Presheaf, PresheafMap,
};
use crate::theory::{builtin, TheoryMorphism, TheoryPresentation};

pub const SUITES: [&str; 2] = ["paper-examples", "properties"];

/// Randomized instances per property.
pub const DEFAULT_INSTANCES: usize = 500;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, seed: Option<u64>, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport { suite: suite.into(), seed, checks, passed }
    }

    /// Whether every check of a criterion passed; `None` if it has none.
    pub fn criterion_passed(&self, k: u8) -> Option<bool> {
        let mut it = self.checks.iter().filter(|c| c.criterion == k).peekable();
        it.peek()?;
        Some(it.all(|c| c.passed))
    }
}

fn check(criterion: u8, id: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { criterion, id: id.into(), passed, detail: detail.into() }
}

fn failed(criterion: u8, id: impl Into<String>, err: impl std::fmt::Display) -> Check {
    check(criterion, id, false, format!("error: {err}"))
}

pub fn run(name: &str, seed: u64, instances: usize) -> Option<SuiteReport> {
    match name {
        "paper-examples" => Some(paper_examples()),
        "properties" => Some(properties(seed, instances)),
        _ => None,
    }
}

/// Criteria 1–8.
pub fn paper_examples() -> SuiteReport {
    let checks = (1..=8).flat_map(criterion).collect();
    SuiteReport::new("paper-examples", None, checks)
}

/// Criterion 9.
pub fn properties(seed: u64, instances: usize) -> SuiteReport {
    SuiteReport::new("properties", Some(seed), property_checks(seed, instances))
}

/// The checks of one worked-example criterion (1–8).
pub fn criterion(k: u8) -> Vec<Check> {
    match k {
        1 => graph_products(),
        2 => graph_non_preservation(),
        3 => reflexive_graph_counterexample(),
        4 => injection_binomials(),
        5 => siftedness_vs_commutation(3),
        6 => roundtrips(),
        7 => em_algebras(),
        8 => adjoints(),
        _ => Vec::new(),
    }
}

/// Summands of a decomposition in upper case, `V + E + V` style.
pub fn show_summands(names: &[String]) -> String {
    if names.is_empty() {
        return "0".into();
    }
    names.iter().map(|n| n.to_uppercase()).collect::<Vec<_>>().join(" + ")
}

fn graph_products() -> Vec<Check> {
    let (v, e) = (gph::vertex(), gph::edge());
    let cases = [("V⊗V", &v, &v, vec!["V"]), ("V⊗E", &v, &e, vec!["V", "V"]), ("E⊗V", &e, &v, vec!["V", "V"]), ("E⊗E", &e, &e, vec!["E", "V", "V"])];
    cases
        .into_iter()
        .map(|(id, a, b, expected)| {
            let p = Arc::new(a.product(b).expect("same base"));
            match decompose_into_representables(&p) {
                Ok(d) => {
                    let mut names = d.summand_names();
                    let shown = show_summands(&names);
                    names.sort();
                    let ok = names == expected && d.isomorphism.is_isomorphism();
                    check(1, id, ok, format!("{id} ≅ {shown}"))
                }
                Err(w) => failed(1, id, w),
            }
        })
        .collect()
}

fn graph_non_preservation() -> Vec<Check> {
    let cocone = gph::reflexive_coequalizer().colimit(&gph::base());
    let one = Arc::new(gph::terminal());
    let mut out = vec![check(
        2,
        "coequalizer",
        cocone.apex.is_isomorphic(&one) && cocone.verify().is_ok(),
        format!("colimit of E+V ⇉ E has sizes {:?} (terminal graph: [1, 1])", cocone.apex.sizes()),
    )];
    let to_e = count_nat_transformations(&one, &gph::edge()).unwrap_or(usize::MAX);
    let to_one = count_nat_transformations(&one, &one).unwrap_or(usize::MAX);
    out.push(check(2, "hom-sets", to_e == 0 && to_one == 1, format!("|Nat(1, E)| = {to_e}, |Nat(1, 1)| = {to_one}")));
    out.push(match preserves_colimit(&one, &cocone) {
        Ok(p) => check(
            2,
            "not-preserved",
            !p.preserved && p.image_colimit == 0 && p.hom_into_apex == 1,
            format!("colim Nat(1, D) has {} elements, Nat(1, colim D) has {}", p.image_colimit, p.hom_into_apex),
        ),
        Err(e) => failed(2, "not-preserved", e),
    });
    out
}

fn reflexive_graph_counterexample() -> Vec<Check> {
    let e = rgph::edge();
    let exe = Arc::new(e.product(&e).expect("same base"));
    let reps = [("V", rgph::vertex()), ("E", rgph::edge())];
    let mut out = vec![check(
        3,
        "E×E",
        !is_strongly_finitely_presentable(&exe),
        format!("E×E (sizes {:?}) is not a finite sum of representables after splitting idempotents", exe.sizes()),
    )];
    for (name, y) in reps {
        out.push(check(3, name, is_strongly_finitely_presentable(&Arc::new(y)), format!("{name} is representable")));
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Multiplicities of `𝕀(k, −)` in `𝕀(m, −) × 𝕀(n, −)` truncated at `m + n`.
pub fn injection_product_multiplicities(m: usize, n: usize) -> Result<BTreeMap<usize, usize>, String> {
    let k = m + n;
    let p = Arc::new(inj::representable(m, k).product(&inj::representable(n, k)).map_err(|e| e.to_string())?);
    let d = decompose_into_representables(&p).map_err(|e| e.to_string())?;
    let mut mult = BTreeMap::new();
    for c in d.summands {
        *mult.entry(c).or_insert(0) += 1;
    }
    Ok(mult)
}

fn injection_binomials() -> Vec<Check> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for n in 1..=3 {
            let id = format!("𝕀({m})⊗𝕀({n})");
            let observed = match injection_product_multiplicities(m, n) {
                Ok(x) => x,
                Err(e) => {
                    out.push(failed(4, id, e));
                    continue;
                }
            };
            let stated: BTreeMap<usize, usize> =
                (m.max(n)..=m + n).map(|k| (k, binomial(m, m + n - k) * binomial(n, m + n - k))).collect();
            let counted: BTreeMap<usize, usize> = (m.max(n)..=m + n)
                .map(|k| {
                    let j = m + n - k;
                    (k, binomial(m, j) * binomial(n, j) * factorial(j))
                })
                .collect();
            let show = |x: &BTreeMap<usize, usize>| {
                x.iter().filter(|(_, &c)| c > 0).map(|(k, c)| format!("{c}·𝕀({k})")).collect::<Vec<_>>().join(" + ")
            };
            let ok = observed == stated;
            let detail = if ok {
                format!("{} (binomial formula)", show(&observed))
            } else {
                format!(
                    "observed {} but binom(m,j)·binom(n,j) gives {}; binom(m,j)·binom(n,j)·j! gives {}",
                    show(&observed),
                    show(&stated),
                    show(&counted)
                )
            };
            out.push(check(4, id, ok, detail));
        }
    }
    out
}

/// The five index categories of criterion 5.
pub fn commutation_shapes() -> Vec<(&'static str, FinCat)> {
    vec![
        ("reflexive-pair", shapes::reflexive_pair()),
        ("discrete-2", shapes::discrete(2)),
        ("span", shapes::span()),
        ("terminal", shapes::terminal()),
        ("parallel-pair", shapes::parallel_pair()),
    ]
}

pub fn siftedness_vs_commutation(max_size: usize) -> Vec<Check> {
    commutation_shapes()
        .into_iter()
        .map(|(name, shape)| {
            let shape = Arc::new(shape);
            let sifted = is_sifted(&shape).sifted;
            let v = commutes_products_colimit(&shape, exhaustive_pairs(&shape, max_size));
            let detail = match &v.failure {
                None => format!("sifted = {sifted}; no counterexample in {} pairs", v.checked),
                Some(f) => format!(
                    "sifted = {sifted}; counterexample {:?} × {:?}: |colim(D₁×D₂)| = {} vs {}",
                    f.left_sizes, f.right_sizes, f.colimit_of_product, f.product_of_colimits
                ),
            };
            check(5, name, sifted == v.commutes, detail)
        })
        .collect()
}

fn theory(name: &str) -> Arc<TheoryPresentation> {
    Arc::new(builtin(name).expect("builtin theory"))
}

fn roundtrips() -> Vec<Check> {
    let cases: [(&str, usize, u32, fn(usize, usize) -> Option<usize>); 3] = [
        ("empty", 3, 1, |m, n| Some(m.pow(n as u32))),
        ("pointed", 3, 1, |m, n| Some((m + 1).pow(n as u32))),
        ("monoid", 2, 4, |_, _| None),
    ];
    cases
        .into_iter()
        .map(|(name, arity, depth, closed)| match roundtrip_check(theory(name), arity, depth, 500, 0) {
            Ok(r) => {
                let sizes_ok = r.cells.iter().all(|c| closed(c.source, c.target).is_none_or(|s| s == c.monad_size));
                let exact_ok = name == "monoid" || !r.truncated;
                let detail = format!(
                    "{} hom-sets bijective, identities {}, {} composites checked ({} failed){}",
                    r.cells.iter().filter(|c| c.bijective).count(),
                    if r.identities_preserved { "preserved" } else { "broken" },
                    r.compositions_checked,
                    r.compositions_failed,
                    if r.truncated { format!(", truncated at depth {depth}") } else { String::new() }
                );
                check(6, format!("{name} arity≤{arity}"), r.holds && sizes_ok && exact_ok, detail)
            }
            Err(e) => failed(6, name, e),
        })
        .collect()
}

fn em_algebras() -> Vec<Check> {
    let mut out = Vec::new();
    for name in ["pointed", "group"] {
        for n in 0..=3 {
            let id = format!("{name} |X|={n}");
            out.push(match em_model_correspondence(theory(name), n, 0) {
                Ok(r) => check(
                    7,
                    id,
                    r.holds && r.models == r.algebras,
                    format!(
                        "{} models, {} algebras, mutually inverse: {}, homs agree on {} pairs: {}",
                        r.models, r.algebras, r.mutually_inverse, r.hom_pairs_checked, r.homs_agree
                    ),
                ),
                Err(e) => failed(7, id, e),
            });
        }
    }
    out
}

/// The monoid `{1, a, b}` with `a`, `b` left zeros.
pub fn left_zero_monoid() -> Model {
    let s = Structure::with_names(
        theory("monoid"),
        vec![3],
        vec![vec!["1".into(), "a".into(), "b".into()]],
        vec![vec![0, 1, 2, 1, 1, 1, 2, 2, 2], vec![0]],
    )
    .expect("tables");
    Model::new(s).expect("a monoid")
}

fn adjoints() -> Vec<Check> {
    let opts = AdjointOptions { certify_size: 3, ..AdjointOptions::default() };
    let mut out = Vec::new();
    let abel = TheoryMorphism::parse(theory("monoid"), theory("commutative-monoid"), "m(x, y) = m(x, y)\ne = e\n");
    let m = Arc::new(left_zero_monoid());
    out.push(match abel.map_err(|e| e.to_string()).and_then(|g| left_adjoint_algebraic(&g, &m, &opts).map_err(|e| e.to_string())) {
        Ok(adj) => {
            let c = &adj.certificate;
            check(
                8,
                "abelianization",
                c.holds && c.naturality_squares > 0 && adj.model.size(0) == 2,
                format!(
                    "G_!A has {} elements; bijection checked against {} models of size ≤ {}, {} naturality squares",
                    adj.model.size(0),
                    c.models_checked,
                    c.certify_size,
                    c.naturality_squares
                ),
            )
        }
        Err(e) => failed(8, "abelianization", e),
    });
    let sets = theory("empty");
    let two = Arc::new(Model::new(Structure::new(sets.clone(), vec![2], vec![]).expect("a set")).expect("a set"));
    let free = TheoryMorphism::parse(sets, theory("semilattice"), "");
    out.push(match free.map_err(|e| e.to_string()).and_then(|g| left_adjoint_algebraic(&g, &two, &opts).map_err(|e| e.to_string())) {
        Ok(adj) => {
            let c = &adj.certificate;
            check(
                8,
                "free-semilattice",
                c.holds && c.naturality_squares > 0 && adj.model.size(0) == 4,
                format!(
                    "free semilattice with unit on 2 generators has {} elements; {} models, {} naturality squares",
                    adj.model.size(0),
                    c.models_checked,
                    c.naturality_squares
                ),
            )
        }
        Err(e) => failed(8, "free-semilattice", e),
    });
    out
}

// ---- randomized properties ----

struct Pools {
    bases: Vec<(&'static str, Arc<FinCat>, Vec<Presheaf>)>,
}

impl Pools {
    fn new() -> Pools {
        let bases: Vec<(&'static str, Arc<FinCat>)> = vec![
            ("gph", gph::base()),
            ("rgph", rgph::base()),
            ("reflexive-pair", Arc::new(shapes::reflexive_pair())),
            ("span", Arc::new(shapes::span())),
            ("Z/2", Arc::new(shapes::cyclic_group(2))),
            ("idempotent", Arc::new(shapes::idempotent())),
        ];
        let bases = bases
            .into_iter()
            .map(|(name, c)| {
                let op = Arc::new(c.opposite());
                let all = SetFunctor::enumerate_all(&op, 2).iter().map(|f| Presheaf::from_covariant(f, c.clone())).collect();
                (name, c, all)
            })
            .collect();
        Pools { bases }
    }

    fn pick<'a, R: Rng>(&'a self, rng: &mut R) -> (&'static str, &'a Arc<FinCat>, &'a [Presheaf]) {
        let (n, c, all) = &self.bases[rng.gen_range(0..self.bases.len())];
        (n, c, all)
    }
}

fn property_checks(seed: u64, instances: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools = Pools::new();
    vec![
        property("yoneda", || yoneda(&pools, &mut rng, instances)),
        property("pointwise-limits", || pointwise_limits(&pools, &mut rng, instances)),
        property("exponential", || exponentials(&pools, &mut rng, instances)),
        property("lan-weight", || lan_weights(&mut rng, instances)),
        property("monad-laws", || monad_laws(&mut rng, instances)),
        property("mod-products-commute", || model_products_commute(&mut rng, instances)),
    ]
}

// no timings in the detail: reports must be reproducible byte for byte
fn property<F: FnOnce() -> Result<usize, String>>(id: &str, f: F) -> Check {
    match f() {
        Ok(n) => check(9, id, true, format!("{n} instances, 0 failures")),
        Err(e) => check(9, id, false, e),
    }
}

fn yoneda<R: Rng>(pools: &Pools, rng: &mut R, instances: usize) -> Result<usize, String> {
    for i in 0..instances {
        let (name, c, all) = pools.pick(rng);
        let g = Arc::new(all.choose(rng).unwrap().clone());
        let o = rng.gen_range(0..c.num_objects());
        let y = Arc::new(Presheaf::representable(c, o));
        let nats = nat_transformations(&y, &g).map_err(|e| e.to_string())?;
        // α ↦ α_c(id_c) must be a bijection onto G(c)
        let id_pos = c.hom_index(c.identity(o));
        let image: Vec<usize> = nats.iter().map(|a| a.apply(o, id_pos)).collect();
        if !is_bijection(&image, g.size(o)) {
            return Err(format!("instance {i} on {name}: Nat(y({o}), G) has {} elements, G({o}) has {}", nats.len(), g.size(o)));
        }
    }
    Ok(instances)
}

/// A random natural map `p → q`, if any.
fn random_map<R: Rng>(p: &Arc<Presheaf>, q: &Arc<Presheaf>, rng: &mut R) -> Option<PresheafMap> {
    nat_transformations(p, q).ok()?.choose(rng).cloned()
}

fn pointwise_limits<R: Rng>(pools: &Pools, rng: &mut R, instances: usize) -> Result<usize, String> {
    let mut done = 0;
    while done < instances {
        let (name, c, all) = pools.pick(rng);
        let p = Arc::new(all.choose(rng).unwrap().clone());
        let q = Arc::new(all.choose(rng).unwrap().clone());
        let (Some(f), Some(g)) = (random_map(&p, &q, rng), random_map(&p, &q, rng)) else { continue };
        done += 1;
        let fail = |what: &str| format!("instance {done} on {name}: {what}");
        let prod = finite_limit(LimitShape::Product(vec![p.clone(), q.clone()])).map_err(|e| fail(&e.to_string()))?;
        let sum = finite_colimit(ColimitShape::Coproduct(vec![p.clone(), q.clone()])).map_err(|e| fail(&e.to_string()))?;
        let eq = finite_limit(LimitShape::Equalizer(f.clone(), g.clone())).map_err(|e| fail(&e.to_string()))?;
        let coeq = finite_colimit(ColimitShape::Coequalizer(f.clone(), g.clone())).map_err(|e| fail(&e.to_string()))?;
        for o in 0..c.num_objects() {
            // brute-force sizes at each object
            let (a, b) = (p.size(o), q.size(o));
            let equal = (0..a).filter(|&x| f.apply(o, x) == g.apply(o, x)).count();
            let mut classes: Vec<usize> = (0..b).collect();
            fn root(c: &mut [usize], x: usize) -> usize {
                if c[x] == x { x } else { let r = root(c, c[x]); c[x] = r; r }
            }
            for x in 0..a {
                let (u, v) = (root(&mut classes, f.apply(o, x)), root(&mut classes, g.apply(o, x)));
                classes[u] = v;
            }
            let quotient = (0..b).filter(|&y| root(&mut classes, y) == y).count();
            let sizes = [prod.apex.size(o), sum.apex.size(o), eq.apex.size(o), coeq.apex.size(o)];
            if sizes != [a * b, a + b, equal, quotient] {
                return Err(fail(&format!("sizes at object {o}: {sizes:?} vs {:?}", [a * b, a + b, equal, quotient])));
            }
        }
        for r in [prod.verify(), eq.verify()] {
            r.map_err(|e| fail(&e.to_string()))?;
        }
        for r in [sum.verify(), coeq.verify()] {
            r.map_err(|e| fail(&e.to_string()))?;
        }
    }
    Ok(done)
}

fn exponentials<R: Rng>(pools: &Pools, rng: &mut R, instances: usize) -> Result<usize, String> {
    let mut done = 0;
    while done < instances {
        let (name, _, all) = pools.pick(rng);
        let small: Vec<&Presheaf> = all.iter().filter(|p| p.total_size() <= 3).collect();
        let f = Arc::new((*small.choose(rng).unwrap()).clone());
        let g = Arc::new((*small.choose(rng).unwrap()).clone());
        let h = Arc::new((*small.choose(rng).unwrap()).clone());
        done += 1;
        let fail = |what: String| format!("instance {done} on {name}: {what}");
        let exp = exponential(&f, &g).map_err(|e| fail(e.to_string()))?;
        let hf = Arc::new(h.product(&f).map_err(|e| fail(e.to_string()))?);
        let left = nat_transformations(&hf, &g).map_err(|e| fail(e.to_string()))?;
        let right = nat_transformations(&h, &exp.object).map_err(|e| fail(e.to_string()))?;
        if left.len() != right.len() {
            return Err(fail(format!("|Nat(H×F, G)| = {} but |Nat(H, G^F)| = {}", left.len(), right.len())));
        }
        for k in &left {
            let back = uncurry(&exp, &exp.curry(&h, k).map_err(|e| fail(e.to_string()))?).map_err(|e| fail(e.to_string()))?;
            if back.components() != k.components() {
                return Err(fail("uncurry ∘ curry ≠ id".into()));
            }
        }
        for m in &right {
            let k = uncurry(&exp, m).map_err(|e| fail(e.to_string()))?;
            if exp.curry(&h, &k).map_err(|e| fail(e.to_string()))?.components() != m.components() {
                return Err(fail("curry ∘ uncurry ≠ id".into()));
            }
        }
    }
    Ok(done)
}

/// Every functor `a → b`, by brute force over object and morphism maps.
pub fn all_functors(a: &Arc<FinCat>, b: &Arc<FinCat>) -> Vec<FinFunctor> {
    let mut out = Vec::new();
    let no = a.num_objects();
    let mut obs = vec![0usize; no];
    loop {
        // morphism maps respecting the object map
        let choices: Vec<Vec<usize>> = (0..a.num_morphisms())
            .map(|f| {
                if a.is_identity(f) {
                    vec![b.identity(obs[a.src(f)])]
                } else {
                    b.hom(obs[a.src(f)], obs[a.dst(f)]).to_vec()
                }
            })
            .collect();
        let radices: Vec<usize> = choices.iter().map(Vec::len).collect();
        if radices.iter().all(|&r| r > 0) {
            for pick in crate::finset::tuples(&radices) {
                let mors = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
                if let Ok(f) = FinFunctor::new(a.clone(), b.clone(), obs.clone(), mors) {
                    out.push(f);
                }
            }
        }
        let mut j = 0;
        loop {
            if j == no {
                return out;
            }
            obs[j] += 1;
            if obs[j] < b.num_objects() {
                break;
            }
            obs[j] = 0;
            j += 1;
        }
    }
}

fn lan_weights<R: Rng>(rng: &mut R, instances: usize) -> Result<usize, String> {
    let cats: Vec<Arc<FinCat>> = [
        shapes::terminal(),
        shapes::free_arrow(),
        shapes::discrete(2),
        shapes::parallel_pair(),
        shapes::reflexive_pair(),
        shapes::cyclic_group(2),
        shapes::idempotent(),
    ]
    .into_iter()
    .map(Arc::new)
    .collect();
    let mut setups = Vec::new();
    for a in &cats {
        let weights: Vec<Presheaf> = SetFunctor::enumerate_all(&Arc::new(a.opposite()), 2)
            .iter()
            .map(|f| Presheaf::from_covariant(f, a.clone()))
            .collect();
        for b in &cats {
            let functors = all_functors(a, b);
            if functors.is_empty() {
                continue;
            }
            setups.push((weights.clone(), functors, SetFunctor::enumerate_all(b, 2)));
        }
    }
    for i in 0..instances {
        let (weights, functors, diagrams) = setups.choose(rng).unwrap();
        let w = weights.choose(rng).unwrap();
        let j = functors.choose(rng).unwrap();
        let s = diagrams.choose(rng).unwrap();
        let (left, right, cmp) = lan_weight_comparison(w, j, s).map_err(|e| format!("instance {i}: {e}"))?;
        if left.size != right.size || !is_bijection(&cmp, right.size) {
            return Err(format!("instance {i}: W * SJ has {} elements, Lan_J W * S has {}", left.size, right.size));
        }
    }
    Ok(instances)
}

fn monad_laws<R: Rng>(rng: &mut R, instances: usize) -> Result<usize, String> {
    let monads: Vec<TermMonad> = crate::theory::BUILTINS
        .iter()
        .map(|n| TermMonad::new(theory(n), 2).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut total = 0;
    while total < instances {
        let m = monads.choose(rng).unwrap();
        let n = rng.gen_range(1..=3);
        let r = m.check_laws(n, 10, rng);
        if !r.holds {
            return Err(format!("{} on {n} variables: {:?}", m.theory().name(), r.failures));
        }
        total += r.associativity_checks;
    }
    Ok(total)
}

/// `R ⇉ M` for the kernel pair `R` of a homomorphism `q: M → N`, with the
/// diagonal as common section; the reflexive-pair shape's seven arrows.
fn kernel_pair_diagram(q: &ModelHom) -> Result<(Vec<Arc<Model>>, Vec<ModelHom>), String> {
    let m = q.source.clone();
    let t = m.theory().clone();
    let (_, proj) = product_of_models(&t, &[m.clone(), m.clone()]).map_err(|e| e.to_string())?;
    let (r, inc) = equalizer_of_models(&proj[0].then(q), &proj[1].then(q)).map_err(|e| e.to_string())?;
    let f = inc.then(&proj[0]);
    let g = inc.then(&proj[1]);
    let n = m.size(0);
    let diag: Vec<usize> = (0..n).map(|x| inc.maps[0].iter().position(|&p| p == x * n + x).expect("diagonal")).collect();
    let s = ModelHom::new(m.clone(), r.clone(), vec![diag]).map_err(|e| e.to_string())?;
    let shape = shapes::reflexive_pair();
    let arrows = (0..shape.num_morphisms())
        .map(|u| match shape.morphism(u).name.as_str() {
            "id_P" => ModelHom::identity(r.clone()),
            "id_Q" => ModelHom::identity(m.clone()),
            "f" => f.clone(),
            "g" => g.clone(),
            "s" => s.clone(),
            "sf" => f.then(&s),
            "sg" => g.then(&s),
            other => unreachable!("reflexive pair has no arrow {other}"),
        })
        .collect();
    Ok((vec![r, m], arrows))
}

fn model_products_commute<R: Rng>(rng: &mut R, instances: usize) -> Result<usize, String> {
    let shape = Arc::new(shapes::reflexive_pair());
    let mut pools = Vec::new();
    for name in ["monoid", "commutative-monoid", "semilattice", "pointed", "group"] {
        let t = theory(name);
        let mut models = Vec::new();
        for n in 1..=3 {
            models.extend(enumerate_models(&t, &[n], 10_000).map_err(|e| e.to_string())?.into_iter().map(Arc::new));
        }
        // homomorphisms between random pairs, kept per theory
        let mut homs = Vec::new();
        for a in &models {
            for b in &models {
                if a.size(0) * b.size(0) <= 6 {
                    homs.extend(hom_models(a, b, DEFAULT_HOM_BOUND).map_err(|e| e.to_string())?);
                }
            }
        }
        pools.push((name, t, homs));
    }
    for i in 0..instances {
        let (name, t, homs) = pools.choose(rng).unwrap();
        let (q1, q2) = (homs.choose(rng).unwrap(), homs.choose(rng).unwrap());
        let fail = |what: String| format!("instance {i} in {name}: {what}");
        let (o1, a1) = kernel_pair_diagram(q1).map_err(fail)?;
        let (o2, a2) = kernel_pair_diagram(q2).map_err(fail)?;
        let (c1, _) = sifted_colimit_of_models(&shape, &o1, &a1).map_err(|e| fail(e.to_string()))?;
        let (c2, _) = sifted_colimit_of_models(&shape, &o2, &a2).map_err(|e| fail(e.to_string()))?;
        // the product diagram, objectwise and arrowwise
        let mut objects = Vec::new();
        let mut projections = Vec::new();
        for j in 0..2 {
            let (p, pr) = product_of_models(t, &[o1[j].clone(), o2[j].clone()]).map_err(|e| fail(e.to_string()))?;
            objects.push(p);
            projections.push(pr);
        }
        let arrows = (0..shape.num_morphisms())
            .map(|u| {
                let (s, d) = (shape.src(u), shape.dst(u));
                let (x, y) = (&a1[u].maps[0], &a2[u].maps[0]);
                let ny = o2[d].size(0);
                let ms = o2[s].size(0);
                let map = (0..objects[s].size(0)).map(|k| x[k / ms] * ny + y[k % ms]).collect();
                ModelHom::new(objects[s].clone(), objects[d].clone(), vec![map]).map_err(|e| fail(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (cp, legs) = sifted_colimit_of_models(&shape, &objects, &arrows).map_err(|e| fail(e.to_string()))?;
        let (pc, _) = product_of_models(t, &[c1.clone(), c2.clone()]).map_err(|e| fail(e.to_string()))?;
        if cp.size(0) != pc.size(0) {
            return Err(fail(format!("|colim(D₁×D₂)| = {} but |colim D₁ × colim D₂| = {}", cp.size(0), pc.size(0))));
        }
        // the comparison colim(D₁×D₂) → colim D₁ × colim D₂ is an isomorphism of models
        let (_, l1) = sifted_colimit_of_models(&shape, &o1, &a1).map_err(|e| fail(e.to_string()))?;
        let (_, l2) = sifted_colimit_of_models(&shape, &o2, &a2).map_err(|e| fail(e.to_string()))?;
        let mut cmp = vec![usize::MAX; cp.size(0)];
        let m2 = o2[1].size(0);
        for k in 0..objects[1].size(0) {
            let v = l1[1].maps[0][k / m2] * c2.size(0) + l2[1].maps[0][k % m2];
            let slot = &mut cmp[legs[1].maps[0][k]];
            if *slot != usize::MAX && *slot != v {
                return Err(fail("comparison map is not well defined".into()));
            }
            *slot = v;
        }
        let h = ModelHom::new(cp.clone(), pc.clone(), vec![cmp]).map_err(|e| fail(e.to_string()))?;
        if !h.is_isomorphism() {
            return Err(fail("comparison is not an isomorphism".into()));
        }
    }
    Ok(instances)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(factorial(3), 6);
    }

    #[test]
    fn functors_into_a_point() {
        let a = Arc::new(shapes::reflexive_pair());
        let t = Arc::new(shapes::terminal());
        assert_eq!(all_functors(&a, &t).len(), 1);
        assert_eq!(all_functors(&t, &a).len(), 2);
        // functors from the free arrow pick out morphisms
        let arrow = Arc::new(shapes::free_arrow());
        assert_eq!(all_functors(&arrow, &a).len(), a.num_morphisms());
    }

    #[test]
    fn injection_products_pin_the_counting_formula() {
        // independent count: pairs of injections m → K, n → K up to the
        // common image; j shared points give binom(m,j) binom(n,j) j!
        for (m, n) in [(1, 1), (1, 2), (2, 2)] {
            let mult = injection_product_multiplicities(m, n).unwrap();
            for (&k, &c) in &mult {
                let j = m + n - k;
                assert_eq!(c, binomial(m, j) * binomial(n, j) * factorial(j), "({m},{n}) at {k}");
            }
        }
    }
}
