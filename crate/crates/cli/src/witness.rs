//! Witnesses of negative verdicts and their independent re-checks. Each
//! check recomputes the claim from the referenced inputs by brute force,
//! without calling the routine that produced the witness.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use lawvere::fincat::FinCat;
use lawvere::presheaf::{Presheaf, PresheafMap};
use lawvere::rewrite::{parse_term, RewriteSystem, Term};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{refs, CliError, EXIT_BUDGET};

/// Largest naive search a witness check will run.
const SEARCH_LIMIT: u128 = 2_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Witness {
    /// An equation instance that fails in a structure.
    NotAModel { model: String, equation: String, assignment: Vec<String>, left: String, right: String },
    /// A source equation whose translated sides have different normal forms.
    MorphismFailure { source: String, target: String, map: String, equation: String, left: String, right: String },
    /// A peak rewriting to two terms with different normal forms.
    CriticalPair { theory: String, variables: Vec<String>, peak: String, left: String, right: String },
    /// A connected component of elements that no element generates.
    NotDecomposable { presheaf: String, component: Vec<(String, String)> },
    /// `colim Nat(P, D_j) → Nat(P, colim D)` is not a bijection.
    NotPreserved { presheaf: String, colimit: String, image_colimit: usize, hom_into_apex: usize },
    /// A category with no objects.
    SiftedEmpty { category: String },
    /// A pair of objects whose cospan category is not connected.
    SiftedDisconnected { category: String, a: String, b: String, components: usize },
}

impl Witness {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("witness serializes")
    }
}

/// Reads a witness, or a report carrying one under `witness`.
pub fn load(src: &str) -> Result<Witness, CliError> {
    let v: Value = serde_json::from_str(src).map_err(|e| CliError::input(format!("witness is not JSON: {e}")))?;
    let v = match v.get("witness") {
        Some(w) if !w.is_null() => w.clone(),
        _ => v,
    };
    serde_json::from_value(v).map_err(|e| CliError::input(format!("not a witness: {e}")))
}

/// `Ok(Err(reason))` when the witness is well-formed but wrong.
pub fn verify(w: &Witness, allow_unsafe: bool) -> Result<Result<(), String>, CliError> {
    match w {
        Witness::NotAModel { model, equation, assignment, left, right } => {
            let s = refs::structure(model, allow_unsafe)?;
            let t = s.theory().clone();
            let Some(eq) = t.equations().into_iter().find(|e| &e.label == equation) else {
                return Ok(Err(format!("no equation `{equation}`")));
            };
            if assignment.len() != eq.ctx.len() {
                return Ok(Err("assignment has the wrong length".into()));
            }
            let mut asg = Vec::new();
            for (name, &so) in assignment.iter().zip(&eq.ctx) {
                match s.names(so).iter().position(|n| n == name) {
                    Some(x) => asg.push(x),
                    None => return Ok(Err(format!("`{name}` is not an element"))),
                }
            }
            let res = t.signature().sort_of(&eq.lhs, &eq.ctx)?;
            let (l, r) = (eval(&s, &eq.lhs, &asg), eval(&s, &eq.rhs, &asg));
            let names = s.names(res);
            if l == r {
                return Ok(Err(format!("both sides evaluate to {}", names[l])));
            }
            if (&names[l], &names[r]) != (left, right) {
                return Ok(Err(format!("sides evaluate to {} and {}", names[l], names[r])));
            }
            Ok(Ok(()))
        }
        Witness::MorphismFailure { source, target, map, equation, left, right } => {
            let g = refs::morphism(source, target, map, allow_unsafe)?;
            let Some(eq) = g.source.equations().into_iter().find(|e| &e.label == equation) else {
                return Ok(Err(format!("no equation `{equation}`")));
            };
            let rs = g.target.rules();
            let mut names = lawvere::rewrite::default_names(eq.ctx.len());
            let (l, r) = (rs.nf(&g.translate(&eq.lhs))?, rs.nf(&g.translate(&eq.rhs))?);
            if l == r {
                return Ok(Err("both sides have the same normal form".into()));
            }
            let sig = g.target.signature();
            let (pl, pr) = (parse_term(sig, left, &mut names)?, parse_term(sig, right, &mut names)?);
            if (sig.canonical(&pl), sig.canonical(&pr)) != (l, r) {
                return Ok(Err("stated sides are not the normal forms".into()));
            }
            Ok(Ok(()))
        }
        Witness::CriticalPair { theory, variables, peak, left, right } => {
            let t = refs::theory(theory, true)?;
            let sig = t.signature();
            let mut names = variables.clone();
            let mut parse = |s: &str| parse_term(sig, s, &mut names).map(|x| sig.canonical(&x));
            let (p, l, r) = (parse(peak)?, parse(left)?, parse(right)?);
            let rs = t.rules();
            for side in [&l, &r] {
                if !reachable(rs, &p, side, 3, 100_000) {
                    return Ok(Err(format!("`{}` is not reachable from the peak", sig.show(side, &names))));
                }
            }
            let (ln, rn) = (rs.nf(&l)?, rs.nf(&r)?);
            if !rs.is_normal(&ln) || !rs.is_normal(&rn) {
                return Ok(Err("normalization did not reach a normal form".into()));
            }
            if ln == rn {
                return Ok(Err("the two sides are joinable".into()));
            }
            Ok(Ok(()))
        }
        Witness::NotDecomposable { presheaf, component } => {
            let p = refs::presheaf(presheaf)?;
            let c = p.base().clone();
            let mut elems = Vec::new();
            for (o, x) in component {
                let Some(o) = c.object_id(o) else { return Ok(Err(format!("no object `{o}`"))) };
                let Some(x) = (0..p.size(o)).find(|&i| &p.label(o, i) == x) else {
                    return Ok(Err(format!("no element `{x}` over {}", c.object_name(o))));
                };
                elems.push((o, x));
            }
            let set: HashSet<(usize, usize)> = elems.iter().copied().collect();
            if set.is_empty() || set.len() != elems.len() {
                return Ok(Err("component is empty or repeats elements".into()));
            }
            // connected component: closed under the action in both directions
            let start = elems[0];
            let mut seen = HashSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some((o, x)) = queue.pop_front() {
                for f in 0..c.num_morphisms() {
                    let (s, d) = (c.src(f), c.dst(f));
                    let mut next = Vec::new();
                    if d == o {
                        next.push((s, p.act(f, x)));
                    }
                    if s == o {
                        next.extend((0..p.size(d)).filter(|&y| p.act(f, y) == x).map(|y| (d, y)));
                    }
                    for e in next {
                        if seen.insert(e) {
                            queue.push_back(e);
                        }
                    }
                }
            }
            if seen != set {
                return Ok(Err("the elements are not a connected component".into()));
            }
            // Yoneda: (o, x) generates iff u ↦ P(u)x is a bijection hom(-, o) → component
            for &(o, x) in &elems {
                let mut hit = HashSet::new();
                let mut injective = true;
                for d in 0..c.num_objects() {
                    for &u in c.hom(d, o) {
                        injective &= hit.insert((d, p.act(u, x)));
                    }
                }
                if injective && hit == set {
                    return Ok(Err(format!("{} generates the component", p.label(o, x))));
                }
            }
            Ok(Ok(()))
        }
        Witness::NotPreserved { presheaf, colimit, image_colimit, hom_into_apex } => {
            let p = refs::presheaf(presheaf)?;
            let (diagram, base) = refs::diagram(colimit)?;
            let cocone = diagram.colimit(&base);
            let shape = diagram.shape().clone();
            let homs: Vec<Vec<Vec<Vec<usize>>>> =
                diagram.objects().iter().map(|q| naturals(&p, q)).collect::<Result<_, _>>()?;
            let apex = naturals(&p, &cocone.apex)?;
            let compose = |a: &[Vec<usize>], m: &PresheafMap| -> Vec<Vec<usize>> {
                a.iter().enumerate().map(|(o, f)| f.iter().map(|&x| m.apply(o, x)).collect()).collect()
            };
            // the image diagram's colimit: a disjoint union modulo D(u) ∘ -
            let offsets: Vec<usize> = homs.iter().scan(0, |acc, l| { let o = *acc; *acc += l.len(); Some(o) }).collect();
            let total: usize = homs.iter().map(Vec::len).sum();
            let mut parent: Vec<usize> = (0..total).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for u in 0..shape.num_morphisms() {
                let (j, k) = (shape.src(u), shape.dst(u));
                for (i, a) in homs[j].iter().enumerate() {
                    let b = compose(a, diagram.arrow(u));
                    let Some(pos) = homs[k].iter().position(|h| *h == b) else {
                        return Ok(Err("composite is not natural".into()));
                    };
                    let (x, y) = (find(&mut parent, offsets[j] + i), find(&mut parent, offsets[k] + pos));
                    parent[x] = y;
                }
            }
            let mut classes: HashMap<usize, usize> = HashMap::new();
            for j in 0..shape.num_objects() {
                for (i, a) in homs[j].iter().enumerate() {
                    let r = find(&mut parent, offsets[j] + i);
                    let Some(img) = apex.iter().position(|h| *h == compose(a, &cocone.legs[j])) else {
                        return Ok(Err("leg composite is not natural".into()));
                    };
                    if let Some(&old) = classes.get(&r) {
                        if old != img {
                            return Ok(Err("comparison is not well defined".into()));
                        }
                    }
                    classes.insert(r, img);
                }
            }
            if (classes.len(), apex.len()) != (*image_colimit, *hom_into_apex) {
                return Ok(Err(format!("recomputed sizes are {} and {}", classes.len(), apex.len())));
            }
            let image: HashSet<usize> = classes.values().copied().collect();
            if image.len() == classes.len() && image.len() == apex.len() {
                return Ok(Err("the comparison is a bijection".into()));
            }
            Ok(Ok(()))
        }
        Witness::SiftedEmpty { category } => {
            let c = refs::category(category)?;
            Ok(if c.num_objects() == 0 { Ok(()) } else { Err("the category has objects".into()) })
        }
        Witness::SiftedDisconnected { category, a, b, components } => {
            let c = refs::category(category)?;
            let (Some(x), Some(y)) = (c.object_id(a), c.object_id(b)) else {
                return Ok(Err("unknown object".into()));
            };
            let n = cospan_components(&c, x, y);
            if n == 1 {
                return Ok(Err("the cospan category is connected".into()));
            }
            if n != *components {
                return Ok(Err(format!("found {n} components")));
            }
            Ok(Ok(()))
        }
    }
}

fn eval(s: &lawvere::models::Structure, t: &Term, asg: &[usize]) -> usize {
    match t {
        Term::Var(v) => asg[*v],
        Term::App { op, args, .. } => {
            let xs: Vec<usize> = args.iter().map(|a| eval(s, a, asg)).collect();
            if s.theory().signature().is_ac(*op) {
                // flattened AC nodes fold left through the binary table
                xs[1..].iter().fold(xs[0], |acc, &x| s.apply(*op, &[acc, x]))
            } else {
                s.apply(*op, &xs)
            }
        }
    }
}

/// Breadth-first search for `goal` within `steps` rewrites.
fn reachable(rs: &RewriteSystem, from: &Term, goal: &Term, steps: usize, cap: usize) -> bool {
    let mut frontier = vec![from.clone()];
    let mut seen = HashSet::from([from.clone()]);
    for _ in 0..=steps {
        if frontier.contains(goal) {
            return true;
        }
        let mut next = Vec::new();
        for t in &frontier {
            for u in rs.one_step(t) {
                if seen.len() < cap && seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    false
}

/// Natural transformations `P → Q` by trying every family of functions.
fn naturals(p: &Presheaf, q: &Presheaf) -> Result<Vec<Vec<Vec<usize>>>, CliError> {
    let c = p.base();
    let n = c.num_objects();
    let space = (0..n).fold(1u128, |acc, o| acc.saturating_mul((q.size(o) as u128).saturating_pow(p.size(o) as u32)));
    if space > SEARCH_LIMIT {
        return Err(CliError { code: EXIT_BUDGET, message: format!("{space} candidate transformations") });
    }
    let mut out = Vec::new();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|o| (0..p.size(o)).map(move |x| (o, x))).collect();
    let mut vals = vec![0usize; slots.len()];
    if slots.iter().any(|&(o, _)| q.size(o) == 0) {
        return Ok(out);
    }
    loop {
        let mut comps: Vec<Vec<usize>> = (0..n).map(|o| vec![0; p.size(o)]).collect();
        for (&(o, x), &v) in slots.iter().zip(&vals) {
            comps[o][x] = v;
        }
        let natural = (0..c.num_morphisms()).all(|f| {
            let (s, d) = (c.src(f), c.dst(f));
            (0..p.size(d)).all(|x| comps[s][p.act(f, x)] == q.act(f, comps[d][x]))
        });
        if natural {
            out.push(comps);
        }
        let mut i = slots.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < q.size(slots[i].0) {
                break;
            }
            vals[i] = 0;
        }
    }
}

/// Connected components of the cospans `a → x ← b`, by search.
fn cospan_components(c: &Arc<FinCat>, a: usize, b: usize) -> usize {
    let cospans: Vec<(usize, usize, usize)> = (0..c.num_objects())
        .flat_map(|x| c.hom(a, x).iter().flat_map(move |&u| c.hom(b, x).iter().map(move |&v| (x, u, v))))
        .collect();
    let mut seen = vec![false; cospans.len()];
    let mut count = 0;
    for s in 0..cospans.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            let (x, u, v) = cospans[i];
            for (j, &(y, u2, v2)) in cospans.iter().enumerate() {
                if seen[j] {
                    continue;
                }
                let forward = c.hom(x, y).iter().any(|&h| c.compose(h, u) == u2 && c.compose(h, v) == v2);
                let backward = c.hom(y, x).iter().any(|&h| c.compose(h, u2) == u && c.compose(h, v2) == v);
                if forward || backward {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}
