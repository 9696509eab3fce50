//! From the term monad back to a theory: `hom(m, n) = T(m)ⁿ` composed in the
//! Kleisli way, compared with the presentation's own hom-sets.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{MonadError, TermMonad};
use crate::rewrite::Term;
use crate::theory::{compose_hom, hom_enumerate, TheoryHom, TheoryPresentation, MAX_HOMS};

/// Composable pairs are checked exhaustively up to this many per triple of
/// arities, and sampled beyond it.
const EXHAUSTIVE_PAIRS: usize = 4096;

/// The Kleisli theory of a term monad on arities `0..=max_arity`.
#[derive(Debug)]
pub struct MonadTheory {
    pub monad: Arc<TermMonad>,
    pub max_arity: usize,
    /// `homs[m][n]`: `n`-tuples of indices into `T(m)`.
    pub homs: Vec<Vec<Vec<Vec<usize>>>>,
}

impl MonadTheory {
    pub fn hom(&self, m: usize, n: usize) -> &[Vec<usize>] {
        &self.homs[m][n]
    }

    /// `(η, …, η)`.
    pub fn identity(&self, m: usize) -> Vec<usize> {
        let s = self.monad.slice(m);
        (0..m).map(|i| s.position(&self.monad.unit(i)).expect("variables are normal")).collect()
    }

    pub fn terms(&self, m: usize, tuple: &[usize]) -> Vec<Term> {
        let s = self.monad.slice(m);
        tuple.iter().map(|&i| s.elements[i].clone()).collect()
    }

    /// Kleisli composite of `f: m → n` then `g: n → k`, as terms over `m`.
    pub fn compose(&self, m: usize, f: &[usize], n: usize, g: &[usize]) -> Vec<Term> {
        let fs = self.terms(m, f);
        self.terms(n, g).iter().map(|gj| self.monad.multiply(gj, &fs)).collect()
    }
}

pub fn theory_from_monad(monad: Arc<TermMonad>, max_arity: usize) -> Result<MonadTheory, MonadError> {
    let mut homs = Vec::with_capacity(max_arity + 1);
    for m in 0..=max_arity {
        let size = monad.slice(m).len();
        let mut row = Vec::with_capacity(max_arity + 1);
        for n in 0..=max_arity {
            let total = (size as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if total > MAX_HOMS {
                return Err(MonadError::SearchSpaceTooLarge(format!("|T({m})|^{n} = {total}")));
            }
            let mut tuples = Vec::with_capacity(total as usize);
            if total > 0 {
                let mut idx = vec![0usize; n];
                'next: loop {
                    tuples.push(idx.clone());
                    for j in (0..n).rev() {
                        idx[j] += 1;
                        if idx[j] < size {
                            continue 'next;
                        }
                        idx[j] = 0;
                    }
                    break;
                }
            }
            row.push(tuples);
        }
        homs.push(row);
    }
    Ok(MonadTheory { monad, max_arity, homs })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomCell {
    pub source: usize,
    pub target: usize,
    pub theory_size: usize,
    pub monad_size: usize,
    pub bijective: bool,
    pub truncated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub theory: String,
    pub max_arity: usize,
    pub depth: u32,
    pub cells: Vec<HomCell>,
    pub identities_preserved: bool,
    pub compositions_checked: usize,
    pub compositions_failed: usize,
    /// Some hom-set is cut off by the depth bound.
    pub truncated: bool,
    pub holds: bool,
}

/// Compares `T ↦ monad ↦ theory` with `T` on arities `≤ max_arity`: a
/// bijection on each hom-set, identities, and composition on every
/// composable pair (or `samples` seeded pairs when there are too many).
pub fn roundtrip_check(
    t: Arc<TheoryPresentation>,
    max_arity: usize,
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<RoundtripReport, MonadError> {
    let monad = Arc::new(TermMonad::new(t.clone(), depth)?);
    let mt = theory_from_monad(monad.clone(), max_arity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = Vec::new();
    let mut theory_homs: Vec<Vec<Vec<TheoryHom>>> = Vec::new();
    let mut identities_preserved = true;
    let mut truncated = false;
    for m in 0..=max_arity {
        let slice = monad.slice(m);
        let mut row = Vec::new();
        for n in 0..=max_arity {
            let hs = hom_enumerate(&t, &t.power(m)?, &t.power(n)?, depth)?;
            truncated |= hs.truncated;
            let mut image: Vec<Vec<usize>> = Vec::with_capacity(hs.len());
            let mut all = true;
            for h in &hs.homs {
                match h.terms.iter().map(|u| slice.position(u)).collect::<Option<Vec<usize>>>() {
                    Some(tuple) => image.push(tuple),
                    None => all = false,
                }
            }
            image.sort();
            image.dedup();
            let monad_size = mt.hom(m, n).len();
            let bijective = all && image.len() == hs.len() && image.len() == monad_size;
            cells.push(HomCell { source: m, target: n, theory_size: hs.len(), monad_size, bijective, truncated: hs.truncated });
            row.push(hs.homs);
        }
        let id = TheoryHom::identity(&t.power(m)?);
        if mt.terms(m, &mt.identity(m)) != id.terms {
            identities_preserved = false;
        }
        theory_homs.push(row);
    }
    let mut checked = 0;
    let mut failed = 0;
    for m in 0..=max_arity {
        let slice_m = monad.slice(m);
        for n in 0..=max_arity {
            let slice_n = monad.slice(n);
            for k in 0..=max_arity {
                let fs = &theory_homs[m][n];
                let gs = &theory_homs[n][k];
                let total = fs.len() * gs.len();
                let pairs: Vec<(usize, usize)> = if total <= EXHAUSTIVE_PAIRS {
                    (0..total).map(|p| (p / gs.len().max(1), p % gs.len().max(1))).collect()
                } else {
                    (0..samples).map(|_| (rng.gen_range(0..fs.len()), rng.gen_range(0..gs.len()))).collect()
                };
                for (i, j) in pairs {
                    let (f, g) = (&fs[i], &gs[j]);
                    let composite = compose_hom(&t, f, g)?;
                    let ft: Option<Vec<usize>> = f.terms.iter().map(|u| slice_m.position(u)).collect();
                    let gt: Option<Vec<usize>> = g.terms.iter().map(|u| slice_n.position(u)).collect();
                    checked += 1;
                    let agrees = match (ft, gt) {
                        (Some(ft), Some(gt)) => mt.compose(m, &ft, n, &gt) == composite.terms,
                        _ => false,
                    };
                    if !agrees {
                        failed += 1;
                    }
                }
            }
        }
    }
    let holds = identities_preserved && failed == 0 && cells.iter().all(|c| c.bijective);
    Ok(RoundtripReport {
        theory: t.name().into(),
        max_arity,
        depth,
        cells,
        identities_preserved,
        compositions_checked: checked,
        compositions_failed: failed,
        truncated,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::builtin;

    fn check(name: &str, arity: usize, depth: u32) -> RoundtripReport {
        roundtrip_check(Arc::new(builtin(name).unwrap()), arity, depth, 300, 11).unwrap()
    }

    #[test]
    fn hom_counts_match_closed_forms() {
        let r = check("pointed", 3, 1);
        assert!(r.holds);
        for c in &r.cells {
            assert_eq!(c.monad_size, (c.source + 1).pow(c.target as u32));
        }
        let r = check("empty", 3, 1);
        assert!(r.holds);
        for c in &r.cells {
            assert_eq!(c.monad_size, c.source.pow(c.target as u32));
        }
    }

    #[test]
    fn monoid_at_depth_four() {
        let r = check("monoid", 2, 4);
        assert!(r.holds, "{r:?}");
        let c22 = r.cells.iter().find(|c| c.source == 2 && c.target == 2).unwrap();
        assert_eq!(c22.monad_size, 63 * 63);
        assert!(r.truncated);
    }

    #[test]
    fn kleisli_identity_is_neutral() {
        let monad = Arc::new(TermMonad::new(Arc::new(builtin("group").unwrap()), 1).unwrap());
        let mt = theory_from_monad(monad, 2).unwrap();
        let id = mt.identity(2);
        for f in mt.hom(2, 2) {
            assert_eq!(mt.compose(2, f, 2, &id), mt.terms(2, f));
            assert_eq!(mt.compose(2, &id, 2, f), mt.terms(2, f));
        }
    }

    #[test]
    fn ac_and_group_theories_round_trip() {
        assert!(check("commutative-monoid", 2, 2).holds);
        assert!(check("semilattice", 3, 3).holds);
        assert!(check("group", 2, 1).holds);
    }
}
