//! Congruence closure over partial operation tables. Elements are created
//! on demand for undefined table entries and merged by union-find until the
//! tables are total, compatible with the merges, and satisfy every equation
//! of the theory. Every merge is forced, so the result is the initial model
//! under the given generators and relations.

use std::collections::HashMap;
use std::sync::Arc;

use super::{table_args, Model, ModelError, ModelHom, Structure};
use crate::finset::{tuple_index, tuples};
use crate::rewrite::{enumerate_normal_forms, OpId, SortId, Term};
use crate::theory::TheoryPresentation;

/// `term` under `asg` must equal `value`.
pub(crate) struct Relation {
    pub term: Term,
    pub asg: Vec<usize>,
    pub value: usize,
}

pub(crate) struct Closure {
    theory: Arc<TheoryPresentation>,
    sort: Vec<SortId>,
    parent: Vec<usize>,
    names: Vec<String>,
    table: HashMap<(OpId, Vec<usize>), usize>,
}

impl Closure {
    pub fn new(theory: Arc<TheoryPresentation>) -> Self {
        Closure { theory, sort: Vec::new(), parent: Vec::new(), names: Vec::new(), table: HashMap::new() }
    }

    pub fn add(&mut self, sort: SortId, name: String) -> usize {
        self.sort.push(sort);
        self.parent.push(self.parent.len());
        self.names.push(name);
        self.parent.len() - 1
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// The smaller element becomes the representative.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        true
    }

    pub fn set(&mut self, op: OpId, args: Vec<usize>, value: usize) -> bool {
        let args: Vec<usize> = args.into_iter().map(|a| self.find(a)).collect();
        match self.table.get(&(op, args.clone())) {
            Some(&old) => self.union(old, value),
            None => {
                self.table.insert((op, args), value);
                false
            }
        }
    }

    fn get(&mut self, op: OpId, args: &[usize]) -> Option<usize> {
        let args: Vec<usize> = args.iter().map(|&a| self.find(a)).collect();
        self.table.get(&(op, args)).copied().map(|v| self.find(v))
    }

    /// Re-keys the table after merges; conflicting entries merge their
    /// values. True if anything merged.
    fn rebuild(&mut self) -> bool {
        let mut merged = false;
        loop {
            let old = std::mem::take(&mut self.table);
            let mut changed = false;
            for ((op, args), v) in old {
                changed |= self.set(op, args, v);
            }
            if !changed {
                return merged;
            }
            merged = true;
        }
    }

    pub fn eval(&mut self, t: &Term, asg: &[usize]) -> Option<usize> {
        match t {
            Term::Var(v) => Some(self.find(asg[*v])),
            Term::App { op, args, .. } => {
                let vals = args.iter().map(|a| self.eval(a, asg)).collect::<Option<Vec<_>>>()?;
                if self.theory.signature().is_ac(*op) && vals.len() > 2 {
                    vals[1..].iter().try_fold(vals[0], |acc, &v| self.get(*op, &[acc, v]))
                } else {
                    self.get(*op, &vals)
                }
            }
        }
    }

    fn reps(&mut self, sort: SortId) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.sort[x] == sort && self.parent[x] == x).collect()
    }

    fn impose(&mut self, relations: &[Relation]) -> bool {
        let mut merged = false;
        for eq in self.theory.clone().equations() {
            let pools: Vec<Vec<usize>> = eq.ctx.iter().map(|&s| self.reps(s)).collect();
            let radices: Vec<usize> = pools.iter().map(Vec::len).collect();
            for t in tuples(&radices) {
                let asg: Vec<usize> = t.iter().zip(&pools).map(|(&i, p)| p[i]).collect();
                if let (Some(l), Some(r)) = (self.eval(&eq.lhs, &asg), self.eval(&eq.rhs, &asg)) {
                    merged |= self.union(l, r);
                }
            }
        }
        for r in relations {
            if let Some(v) = self.eval(&r.term, &r.asg) {
                merged |= self.union(v, r.value);
            }
        }
        merged
    }

    /// Creates an element for every undefined entry on representatives.
    fn fill(&mut self, max_elements: usize) -> Result<bool, ModelError> {
        let sig = self.theory.signature().clone();
        let mut added = false;
        for op in 0..sig.ops().len() {
            let args = table_args(&self.theory, op);
            let pools: Vec<Vec<usize>> = args.iter().map(|&s| self.reps(s)).collect();
            let radices: Vec<usize> = pools.iter().map(Vec::len).collect();
            for t in tuples(&radices) {
                let xs: Vec<usize> = t.iter().zip(&pools).map(|(&i, p)| p[i]).collect();
                if self.get(op, &xs).is_some() {
                    continue;
                }
                if self.len() >= max_elements {
                    return Err(ModelError::Truncated(max_elements));
                }
                let name = if xs.is_empty() {
                    sig.op(op).name.clone()
                } else {
                    let parts: Vec<&str> = xs.iter().map(|&x| self.names[x].as_str()).collect();
                    format!("{}({})", sig.op(op).name, parts.join(", "))
                };
                let v = self.add(sig.op(op).result, name);
                self.set(op, xs, v);
                added = true;
            }
        }
        Ok(added)
    }

    /// Alternates merging to a fixpoint with filling undefined entries.
    pub fn close(&mut self, relations: &[Relation], max_elements: usize) -> Result<(), ModelError> {
        loop {
            loop {
                let a = self.rebuild();
                let b = self.impose(relations);
                if !a && !b {
                    break;
                }
            }
            if !self.fill(max_elements)? {
                return Ok(());
            }
        }
    }

    /// The closed tables as a model; classes are numbered by their smallest
    /// element within each sort. Also returns each element's class.
    pub fn into_model(mut self) -> (Model, Vec<usize>) {
        let sig = self.theory.signature().clone();
        let sorts = sig.sorts().len();
        let mut class = vec![usize::MAX; self.len()];
        let mut carriers = vec![0; sorts];
        let mut names = vec![Vec::new(); sorts];
        for x in 0..self.len() {
            if self.find(x) == x {
                let s = self.sort[x];
                class[x] = carriers[s];
                carriers[s] += 1;
                names[s].push(self.names[x].clone());
            }
        }
        for x in 0..self.len() {
            let r = self.find(x);
            class[x] = class[r];
        }
        let mut tables = Vec::new();
        for op in 0..sig.ops().len() {
            let args = table_args(&self.theory, op);
            let pools: Vec<Vec<usize>> = args.iter().map(|&s| self.reps(s)).collect();
            let radices: Vec<usize> = pools.iter().map(Vec::len).collect();
            let table = tuples(&radices)
                .map(|t| {
                    let xs: Vec<usize> = t.iter().zip(&pools).map(|(&i, p)| p[i]).collect();
                    class[self.get(op, &xs).expect("closed tables are total")]
                })
                .collect();
            tables.push(table);
        }
        let s = Structure::with_names(self.theory.clone(), carriers, names, tables).expect("closure builds valid tables");
        debug_assert!(super::check_model(&s).holds);
        (Model::new_unchecked(s), class)
    }
}

/// A quotient model with the quotient map from the original carriers.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub model: Arc<Model>,
    pub map: Vec<Vec<usize>>,
}

impl Quotient {
    /// The quotient map as a homomorphism, when the source is a model.
    pub fn hom(&self, source: Arc<Model>) -> Result<ModelHom, ModelError> {
        ModelHom::new(source, self.model.clone(), self.map.clone())
    }
}

/// The smallest congruence containing `pairs` (`(sort, x, y)`) and every
/// equation instance, and the quotient by it. Any structure is accepted;
/// for a model with no pairs this is the identity.
pub fn quotient_by_congruence(s: &Structure, pairs: &[(SortId, usize, usize)]) -> Result<Quotient, ModelError> {
    let t = s.theory().clone();
    let sig = t.signature().clone();
    let mut cl = Closure::new(t.clone());
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for (so, &n) in s.carriers().iter().enumerate() {
        ids.push((0..n).map(|x| cl.add(so, s.names(so)[x].clone())).collect());
    }
    for op in 0..sig.ops().len() {
        let args = table_args(&t, op);
        let res = sig.op(op).result;
        for xs in tuples(&s.radices(op)) {
            let v = ids[res][s.table(op)[tuple_index(&s.radices(op), &xs)]];
            let xs = xs.iter().zip(&args).map(|(&x, &so)| ids[so][x]).collect();
            cl.set(op, xs, v);
        }
    }
    for &(so, x, y) in pairs {
        if so >= ids.len() || x >= ids[so].len() || y >= ids[so].len() {
            return Err(ModelError::Shape(format!("pair ({x}, {y}) is not in sort {so}")));
        }
        cl.union(ids[so][x], ids[so][y]);
    }
    cl.close(&[], usize::MAX)?;
    let (model, class) = cl.into_model();
    let map = ids.iter().map(|l| l.iter().map(|&i| class[i]).collect()).collect();
    Ok(Quotient { model: Arc::new(model), map })
}

/// Normal forms over generators whose tables leave the bound undefined.
#[derive(Clone, Debug)]
pub struct TruncatedFreeModel {
    pub theory: Arc<TheoryPresentation>,
    pub depth: u32,
    pub terms: Vec<Vec<Term>>,
    pub names: Vec<Vec<String>>,
    /// Same layout as model tables; `None` where the result is deeper.
    pub tables: Vec<Vec<Option<usize>>>,
}

#[derive(Clone, Debug)]
pub enum FreeModel {
    Exact {
        model: Arc<Model>,
        /// The normal form behind each element.
        terms: Vec<Vec<Term>>,
        /// Position of each generator in its carrier.
        generators: Vec<Vec<usize>>,
    },
    Truncated(TruncatedFreeModel),
}

/// Free model on named generators per sort, from the normal forms of depth
/// `≤ depth`; exact when enumeration saturates.
pub fn free_model(t: &Arc<TheoryPresentation>, generators: &[Vec<String>], depth: u32) -> Result<FreeModel, ModelError> {
    let sig = t.signature();
    if generators.len() != sig.sorts().len() {
        return Err(ModelError::Shape(format!("expected generators for {} sorts", sig.sorts().len())));
    }
    let ctx: Vec<SortId> = generators.iter().enumerate().flat_map(|(s, g)| std::iter::repeat_n(s, g.len())).collect();
    let var_names: Vec<String> = generators.concat();
    let nf = enumerate_normal_forms(t.rules(), &ctx, depth);
    let index: Vec<HashMap<&Term, usize>> =
        nf.by_sort.iter().map(|l| l.iter().enumerate().map(|(i, u)| (u, i)).collect()).collect();
    let names: Vec<Vec<String>> = nf.by_sort.iter().map(|l| l.iter().map(|u| sig.show(u, &var_names)).collect()).collect();
    let mut tables = Vec::new();
    for op in 0..sig.ops().len() {
        let args = table_args(t, op);
        let res = sig.op(op).result;
        let radices: Vec<usize> = args.iter().map(|&s| nf.by_sort[s].len()).collect();
        let table = tuples(&radices)
            .map(|xs| {
                let terms = xs.iter().zip(&args).map(|(&x, &s)| nf.by_sort[s][x].clone()).collect();
                let value = t.nf(&sig.app(op, terms)).expect("normalization within budget");
                index[res].get(&value).copied()
            })
            .collect();
        tables.push(table);
    }
    if !nf.saturated {
        return Ok(FreeModel::Truncated(TruncatedFreeModel { theory: t.clone(), depth, terms: nf.by_sort, names, tables }));
    }
    let tables: Vec<Vec<usize>> = tables.into_iter().map(|tb| tb.into_iter().map(|v| v.expect("saturated")).collect()).collect();
    let carriers = nf.by_sort.iter().map(Vec::len).collect();
    let model = Model::new(Structure::with_names(t.clone(), carriers, names, tables)?)?;
    let mut v = 0;
    let gens = generators
        .iter()
        .enumerate()
        .map(|(s, g)| {
            g.iter()
                .map(|_| {
                    v += 1;
                    index[s][&Term::Var(v - 1)]
                })
                .collect()
        })
        .collect();
    Ok(FreeModel::Exact { model: Arc::new(model), terms: nf.by_sort, generators: gens })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tests::{cyclic, left_zero_monoid, theory};
    use crate::models::check_model;

    fn names(xs: &[&str]) -> Vec<Vec<String>> {
        vec![xs.iter().map(|s| s.to_string()).collect()]
    }

    fn exact(f: FreeModel) -> (Arc<Model>, Vec<Vec<usize>>) {
        match f {
            FreeModel::Exact { model, generators, .. } => (model, generators),
            FreeModel::Truncated(_) => panic!("expected an exact free model"),
        }
    }

    #[test]
    fn free_pointed_set() {
        let (m, g) = exact(free_model(&theory("pointed"), &names(&["a", "b"]), 0).unwrap());
        let mut carrier = m.names(0).to_vec();
        carrier.sort();
        assert_eq!(carrier, ["*", "a", "b"]);
        assert_eq!(g, [vec![0, 1]]);
    }

    #[test]
    fn free_semilattice_is_the_powerset() {
        for n in 0..4 {
            let gens: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
            let (m, _) = exact(free_model(&theory("semilattice"), &[gens], n as u32).unwrap());
            assert_eq!(m.size(0), 1 << n);
        }
    }

    #[test]
    fn free_monoid_on_nothing() {
        let (m, _) = exact(free_model(&theory("monoid"), &names(&[]), 0).unwrap());
        assert_eq!(m.names(0), ["e"]);
        match free_model(&theory("monoid"), &names(&["a"]), 3).unwrap() {
            FreeModel::Truncated(tr) => {
                assert_eq!(tr.terms[0].len(), 5);
                assert!(tr.tables[0].iter().any(Option::is_none));
            }
            FreeModel::Exact { .. } => panic!("the free monoid on one generator is infinite"),
        }
    }

    #[test]
    fn identity_quotient() {
        let z4 = cyclic(4);
        let q = quotient_by_congruence(&z4, &[]).unwrap();
        assert_eq!(*q.model, z4);
        assert_eq!(q.map, [vec![0, 1, 2, 3]]);
    }

    #[test]
    fn z4_mod_two() {
        let z4 = Arc::new(cyclic(4));
        let q = quotient_by_congruence(&z4, &[(0, 0, 2)]).unwrap();
        assert_eq!(q.model.size(0), 2);
        assert_eq!(q.map, [vec![0, 1, 0, 1]]);
        q.hom(z4).unwrap();
    }

    #[test]
    fn left_zero_monoid_collapses() {
        let m = left_zero_monoid();
        // ab = a, ba = b: identify them
        let (ab, ba) = (m.apply(0, &[1, 2]), m.apply(0, &[2, 1]));
        let q = quotient_by_congruence(&m, &[(0, ab, ba)]).unwrap();
        assert_eq!(q.model.size(0), 2);
        assert_eq!(q.map[0][1], q.map[0][2]);
        assert!(check_model(&q.model).holds);
    }

    #[test]
    fn raw_structures_are_reflected() {
        // a magma table on two points reflected into groups: x·x must be
        // e for Z/2, but the table's e is not a unit, so everything merges
        let s = Structure::new(theory("group"), vec![2], vec![vec![1, 1, 1, 1], vec![0], vec![0, 1]]).unwrap();
        let q = quotient_by_congruence(&s, &[]).unwrap();
        assert_eq!(q.model.size(0), 1);
    }

    #[test]
    fn closure_is_minimal() {
        // a quotient of Z/6 by (0, 3) has three elements; its kernel is a
        // congruence, and no coarser-than-needed merge happened
        let z6 = Arc::new(cyclic(6));
        let q = quotient_by_congruence(&z6, &[(0, 0, 3)]).unwrap();
        assert_eq!(q.model.size(0), 3);
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(q.map[0][x] == q.map[0][y], (x + 6 - y) % 3 == 0);
            }
        }
    }
}
