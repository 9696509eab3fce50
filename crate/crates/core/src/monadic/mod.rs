//! The finitary monad of a single-sorted presentation, restricted to finite
//! sets and bounded depth: `T(n)` is the set of normal forms over `n`
//! variables, `η` picks out the variables and `μ` substitutes and
//! normalizes. Also the way back from the monad to a theory, and
//! Eilenberg–Moore algebras against models.

mod em;
mod roundtrip;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::models::ModelError;
use crate::rewrite::{enumerate_normal_forms, Signature, Term};
use crate::theory::{TheoryError, TheoryPresentation};

pub use em::{em_model_correspondence, enumerate_em_algebras, EmAlgebra, EmReport};
pub use roundtrip::{roundtrip_check, theory_from_monad, HomCell, MonadTheory, RoundtripReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonadError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("term monads are built from single-sorted theories; `{0}` is not")]
    NotSingleSorted(String),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
}

/// `T(n)` at the monad's depth.
#[derive(Clone, Debug)]
pub struct Slice {
    pub n: usize,
    pub elements: Vec<Term>,
    pub index: HashMap<Term, usize>,
    /// No deeper normal forms exist: the slice is all of `T(n)`.
    pub saturated: bool,
}

impl Slice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }
}

#[derive(Debug)]
pub struct TermMonad {
    theory: Arc<TheoryPresentation>,
    depth: u32,
    cache: Mutex<HashMap<usize, Arc<Slice>>>,
}

impl TermMonad {
    pub fn new(theory: Arc<TheoryPresentation>, depth: u32) -> Result<Self, MonadError> {
        if !theory.is_single_sorted() {
            return Err(MonadError::NotSingleSorted(theory.name().into()));
        }
        if theory.is_waived() {
            return Err(TheoryError::UnsafeTheory.into());
        }
        Ok(TermMonad { theory, depth, cache: Mutex::new(HashMap::new()) })
    }

    pub fn theory(&self) -> &Arc<TheoryPresentation> {
        &self.theory
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// A monad on the same theory at another depth.
    pub fn at_depth(&self, depth: u32) -> TermMonad {
        TermMonad { theory: self.theory.clone(), depth, cache: Mutex::new(HashMap::new()) }
    }

    pub fn slice(&self, n: usize) -> Arc<Slice> {
        let mut cache = self.cache.lock().expect("slice cache");
        cache
            .entry(n)
            .or_insert_with(|| {
                let nf = enumerate_normal_forms(self.theory.rules(), &vec![0; n], self.depth);
                let elements = nf.by_sort.into_iter().next().unwrap_or_default();
                let index = elements.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
                Arc::new(Slice { n, elements, index, saturated: nf.saturated })
            })
            .clone()
    }

    pub fn nf(&self, t: &Term) -> Term {
        self.theory.nf(t).expect("presentations normalize within budget")
    }

    /// `η_n(i)`.
    pub fn unit(&self, i: usize) -> Term {
        Term::Var(i)
    }

    /// `μ`: a term whose variables stand for the given terms.
    pub fn multiply(&self, outer: &Term, inner: &[Term]) -> Term {
        self.nf(&self.theory.signature().substitute(outer, inner).expect("every variable has a value"))
    }

    /// `T(f)` for `f: n → m` given as a table.
    pub fn map(&self, f: &[usize], t: &Term) -> Term {
        let image: Vec<Term> = f.iter().map(|&y| Term::Var(y)).collect();
        self.multiply(t, &image)
    }

    /// Checks the unit laws on every element of `T(n)`, and associativity
    /// and naturality on `samples` random elements of `T³(n)` and maps
    /// `n → n`.
    pub fn check_laws<R: Rng>(&self, n: usize, samples: usize, rng: &mut R) -> LawReport {
        let s = self.slice(n);
        let sig = self.theory.signature().clone();
        let mut failures = Vec::new();
        let names = crate::rewrite::default_names(n);
        for (i, t) in s.elements.iter().enumerate() {
            // μ ∘ η_T: the element seen as a variable of T(T n)
            if self.multiply(&Term::Var(i), &s.elements) != *t {
                failures.push(format!("μ∘ηT fails at {}", sig.show(t, &names)));
            }
            // μ ∘ T(η): variables replaced by their units
            let units: Vec<Term> = (0..n).map(|v| self.unit(v)).collect();
            if self.multiply(t, &units) != *t {
                failures.push(format!("μ∘Tη fails at {}", sig.show(t, &names)));
            }
        }
        let mut assoc = 0;
        let mut natural = 0;
        if !s.is_empty() {
            for _ in 0..samples {
                // an element of T³(n): outer term over k middles, each a term
                // over elements of T(n)
                let k = rng.gen_range(1..=3);
                let outer = random_term(&sig, k, 2, rng);
                let middles: Vec<Term> = (0..k).map(|_| random_term(&sig, s.len(), 2, rng)).collect();
                let flat_first = self.multiply(&self.multiply(&outer, &middles), &s.elements);
                let middle_first: Vec<Term> = middles.iter().map(|m| self.multiply(m, &s.elements)).collect();
                let other = self.multiply(&outer, &middle_first);
                assoc += 1;
                if flat_first != other {
                    failures.push(format!("μ∘μT ≠ μ∘Tμ at {}", sig.show(&outer, &[])));
                }
                // naturality of η and μ for a random f: n → n
                let f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n.max(1))).collect();
                if n > 0 {
                    let x = rng.gen_range(0..n);
                    natural += 1;
                    if self.map(&f, &self.unit(x)) != self.unit(f[x]) {
                        failures.push("T(f)∘η ≠ η∘f".into());
                    }
                    let tt = random_term(&sig, s.len(), 2, rng);
                    let lhs = self.map(&f, &self.multiply(&tt, &s.elements));
                    let mapped: Vec<Term> = s.elements.iter().map(|e| self.map(&f, e)).collect();
                    let rhs = self.multiply(&tt, &mapped);
                    natural += 1;
                    if lhs != rhs {
                        failures.push("T(f)∘μ ≠ μ∘TT(f)".into());
                    }
                }
            }
        }
        failures.truncate(10);
        LawReport {
            n,
            depth: self.depth,
            saturated: s.saturated,
            elements: s.len(),
            unit_checks: 2 * s.len(),
            associativity_checks: assoc,
            naturality_checks: natural,
            holds: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub n: usize,
    pub depth: u32,
    pub saturated: bool,
    pub elements: usize,
    pub unit_checks: usize,
    pub associativity_checks: usize,
    pub naturality_checks: usize,
    pub holds: bool,
    pub failures: Vec<String>,
}

/// The monad's slice `T(n)` with its law report.
pub fn monad_from_theory<R: Rng>(
    t: Arc<TheoryPresentation>,
    n: usize,
    depth: u32,
    samples: usize,
    rng: &mut R,
) -> Result<(TermMonad, Arc<Slice>, LawReport), MonadError> {
    let m = TermMonad::new(t, depth)?;
    let s = m.slice(n);
    let report = m.check_laws(n, samples, rng);
    Ok((m, s, report))
}

/// A random canonical term of depth at most about `depth` over `nvars`
/// variables of the only sort.
pub fn random_term<R: Rng>(sig: &Signature, nvars: usize, depth: u32, rng: &mut R) -> Term {
    let consts: Vec<usize> = sig.constants().collect();
    let leaves = nvars + consts.len();
    let compound: Vec<usize> = (0..sig.ops().len()).filter(|&o| !sig.op(o).args.is_empty()).collect();
    if leaves == 0 && compound.is_empty() {
        panic!("no terms over an empty context and signature");
    }
    let stop = depth == 0 || compound.is_empty() || (leaves > 0 && rng.gen_bool(0.4));
    if stop && leaves > 0 {
        let k = rng.gen_range(0..leaves);
        return if k < nvars { Term::Var(k) } else { sig.constant(consts[k - nvars]) };
    }
    let op = compound[rng.gen_range(0..compound.len())];
    let arity = sig.op(op).args.len();
    let args = (0..arity).map(|_| random_term(sig, nvars, depth.saturating_sub(1), rng)).collect();
    sig.app(op, args)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::theory::builtin;

    fn th(name: &str) -> Arc<TheoryPresentation> {
        Arc::new(builtin(name).unwrap())
    }

    #[test]
    fn identity_monad() {
        let m = TermMonad::new(th("empty"), 3).unwrap();
        for n in 0..4 {
            let s = m.slice(n);
            assert_eq!(s.len(), n);
            assert!(s.saturated);
        }
        assert!(m.check_laws(3, 50, &mut ChaCha8Rng::seed_from_u64(1)).holds);
    }

    #[test]
    fn pointed_and_semilattice_sizes() {
        let p = TermMonad::new(th("pointed"), 0).unwrap();
        assert_eq!(p.slice(2).len(), 3);
        let sl = TermMonad::new(th("semilattice"), 3).unwrap();
        for n in 0..4 {
            assert_eq!(sl.slice(n).len(), 1 << n);
            assert!(sl.slice(n).saturated);
        }
    }

    #[test]
    fn laws_hold_for_builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in crate::theory::BUILTINS {
            let m = TermMonad::new(th(name), 2).unwrap();
            for n in 0..3 {
                let r = m.check_laws(n, 40, &mut rng);
                assert!(r.holds, "{name} {n}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn a_non_confluent_system_breaks_associativity() {
        // f(x) → a and f(x) → b both apply; innermost-first picks the first
        // rule, so the failure shows up only as a confluence report, which
        // the monad refuses to build on
        let src = "op f : S -> S\nop a : -> S\nop b : -> S\nrule f(x) -> a\nrule f(x) -> b\n";
        let t = Arc::new(TheoryPresentation::parse(src, true).unwrap());
        assert!(TermMonad::new(t, 2).is_err());
    }
}
