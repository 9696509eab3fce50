//! Resolution of command-line references: built-in fixtures by name, or
//! files on disk.

use std::path::Path;
use std::sync::Arc;

use lawvere::fincat::{shapes, FinCat};
use lawvere::files::{parse_category, parse_presheaf, parse_structure, FileError};
use lawvere::models::Structure;
use lawvere::presheaf::fixtures::{gph, inj, rgph};
use lawvere::presheaf::{Presheaf, PresheafDiagram};
use lawvere::theory::{builtin, TheoryMorphism, TheoryPresentation, BUILTINS};

use crate::CliError;

pub fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{path}: {e}")))
}

fn relative(base: &Path, r: &str) -> String {
    if Path::new(r).is_absolute() {
        return r.into();
    }
    let dir = base.parent().map(Path::to_path_buf).unwrap_or_default();
    dir.join(r).to_string_lossy().into_owned()
}

/// A built-in theory name or a `.thy` file.
pub fn theory(r: &str, allow_unsafe: bool) -> Result<Arc<TheoryPresentation>, CliError> {
    if BUILTINS.contains(&r) {
        return Ok(Arc::new(builtin(r).expect("listed builtin")));
    }
    let src = read(r)?;
    Ok(Arc::new(TheoryPresentation::parse(&src, allow_unsafe)?))
}

pub fn morphism(source: &str, target: &str, map: &str, allow_unsafe: bool) -> Result<TheoryMorphism, CliError> {
    let (s, t) = (theory(source, allow_unsafe)?, theory(target, allow_unsafe)?);
    Ok(TheoryMorphism::parse(s, t, &read(map)?)?)
}

/// `gph`, `rgph`, `inj@K`, `shape:NAME` or a category file.
pub fn category(r: &str) -> Result<Arc<FinCat>, CliError> {
    if let Some(c) = builtin_category(r)? {
        return Ok(c);
    }
    Ok(Arc::new(parse_category(&read(r)?)?))
}

fn builtin_category(r: &str) -> Result<Option<Arc<FinCat>>, CliError> {
    let bad = || CliError::input(format!("unknown built-in category `{r}`"));
    Ok(Some(match r {
        "gph" => gph::base(),
        "rgph" => rgph::base(),
        _ => {
            if let Some(k) = r.strip_prefix("inj@") {
                inj::base(k.parse().map_err(|_| bad())?)
            } else if let Some(name) = r.strip_prefix("shape:") {
                Arc::new(shape(name).ok_or_else(bad)?)
            } else {
                return Ok(None);
            }
        }
    }))
}

fn shape(name: &str) -> Option<FinCat> {
    let numbered = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    Some(match name {
        "empty" => shapes::empty(),
        "terminal" => shapes::terminal(),
        "free-arrow" => shapes::free_arrow(),
        "parallel-pair" => shapes::parallel_pair(),
        "reflexive-pair" => shapes::reflexive_pair(),
        "span" => shapes::span(),
        "cospan" => shapes::cospan(),
        "idempotent" => shapes::idempotent(),
        _ => {
            if let Some(n) = numbered("discrete-") {
                shapes::discrete(n)
            } else {
                let n = numbered("cyclic-")?;
                shapes::cyclic_group(n)
            }
        }
    })
}

/// `gph:EXPR`, `rgph:EXPR`, `inj:EXPR@K` or a presheaf file. Expressions
/// combine atoms with `x` (product) and `+` (coproduct) and parentheses;
/// atoms are `V`, `E`, `1`, `0` for graphs and `y(n)`, `1`, `0` for
/// injections.
pub fn presheaf(r: &str) -> Result<Arc<Presheaf>, CliError> {
    let (family, rest) = match r.split_once(':') {
        Some((f @ ("gph" | "rgph" | "inj"), rest)) => (f, rest),
        _ => {
            let src = read(r)?;
            let base = Path::new(r).to_path_buf();
            return Ok(Arc::new(parse_presheaf(&src, |b| match builtin_category(b).map_err(|e| FileError::Shape(e.message))? {
                Some(c) => Ok(c),
                None => {
                    let path = relative(&base, b);
                    Ok(Arc::new(parse_category(&std::fs::read_to_string(&path).map_err(FileError::Io)?)?))
                }
            })
            .map_err(CliError::from)?));
        }
    };
    let (expr, k) = match family {
        "inj" => {
            let (e, k) = rest.rsplit_once('@').ok_or_else(|| CliError::input("inj presheaves need a truncation `@K`"))?;
            (e, Some(k.parse::<usize>().map_err(|_| CliError::input(format!("bad truncation `{k}`")))?))
        }
        _ => (rest, None),
    };
    let mut p = Expr { src: expr.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, family, k };
    let out = p.sum()?;
    if p.pos != p.src.len() {
        return Err(CliError::input(format!("unexpected `{}` in `{expr}`", p.src[p.pos..].iter().collect::<String>())));
    }
    Ok(Arc::new(out))
}

struct Expr<'a> {
    src: Vec<char>,
    pos: usize,
    family: &'a str,
    k: Option<usize>,
}

impl Expr<'_> {
    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        let chars: Vec<char> = s.chars().collect();
        if self.src[self.pos..].starts_with(&chars) {
            self.pos += chars.len();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Presheaf, CliError> {
        let mut parts = vec![self.product()?];
        while self.eat("+") {
            parts.push(self.product()?);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        Ok(Presheaf::coproduct(&parts.iter().collect::<Vec<_>>())?)
    }

    fn product(&mut self) -> Result<Presheaf, CliError> {
        let mut acc = self.atom()?;
        while self.eat("x") || self.eat("×") || self.eat("⊗") || self.eat("*") {
            acc = acc.product(&self.atom()?)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Presheaf, CliError> {
        if self.eat("(") {
            let p = self.sum()?;
            if !self.eat(")") {
                return Err(CliError::input("missing `)`"));
            }
            return Ok(p);
        }
        let base = match (self.family, self.k) {
            ("gph", _) => gph::base(),
            ("rgph", _) => rgph::base(),
            (_, Some(k)) => inj::base(k),
            _ => unreachable!(),
        };
        for (name, which) in [("terminal", 1), ("initial", 0), ("1", 1), ("0", 0)] {
            if self.eat(name) {
                return Ok(if which == 1 { Presheaf::terminal(&base) } else { Presheaf::initial(&base) });
            }
        }
        match self.family {
            "gph" | "rgph" => {
                let o = if self.eat("V") {
                    0
                } else if self.eat("E") {
                    1
                } else {
                    return Err(CliError::input(format!("expected V, E, 1 or 0 at `{}`", self.rest())));
                };
                Ok(Presheaf::representable(&base, o))
            }
            _ => {
                if !self.eat("y(") {
                    return Err(CliError::input(format!("expected y(n), 1 or 0 at `{}`", self.rest())));
                }
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let n: usize = self.src[start..self.pos].iter().collect::<String>().parse().map_err(|_| CliError::input("expected a number in y(n)"))?;
                if !self.eat(")") {
                    return Err(CliError::input("missing `)` after y(n"));
                }
                let k = self.k.unwrap();
                if n > k {
                    return Err(CliError::input(format!("y({n}) lies outside the truncation {k}")));
                }
                Ok(inj::representable(n, k))
            }
        }
    }

    fn rest(&self) -> String {
        self.src[self.pos..].iter().collect()
    }
}

/// Built-in colimit diagrams of presheaves.
pub fn diagram(r: &str) -> Result<(PresheafDiagram, Arc<FinCat>), CliError> {
    match r {
        "gph:reflexive-coeq" => Ok((gph::reflexive_coequalizer(), gph::base())),
        _ => Err(CliError::input(format!("unknown built-in diagram `{r}` (known: gph:reflexive-coeq)"))),
    }
}

/// A model file; its `theory` reference is a built-in name or a path
/// relative to the file.
pub fn structure(path: &str, allow_unsafe: bool) -> Result<Structure, CliError> {
    let src = read(path)?;
    let base = Path::new(path).to_path_buf();
    let mut failure = None;
    let s = parse_structure(&src, |r| {
        let r = if BUILTINS.contains(&r) { r.to_string() } else { relative(&base, r) };
        theory(&r, allow_unsafe).map_err(|e| {
            let msg = e.message.clone();
            failure = Some(e);
            FileError::Shape(msg)
        })
    });
    match (s, failure) {
        (Ok(s), _) => Ok(s),
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(e.into()),
    }
}
