use super::TheoryPresentation;

pub const BUILTINS: [&str; 6] = ["empty", "pointed", "monoid", "commutative-monoid", "group", "semilattice"];

const EMPTY: &str = "theory empty\n";

const POINTED: &str = "\
theory pointed
op * : -> S
";

const MONOID: &str = "\
theory monoid
op m : S S -> S
op e : -> S
rule m(e, x) -> x
rule m(x, e) -> x
rule m(m(x, y), z) -> m(x, m(y, z))
";

const COMMUTATIVE_MONOID: &str = "\
theory commutative-monoid
op m : S S -> S
op e : -> S
ac m unit e
";

// the standard complete system for groups
const GROUP: &str = "\
theory group
op m : S S -> S
op e : -> S
op inv : S -> S
rule m(e, x) -> x
rule m(x, e) -> x
rule m(inv(x), x) -> e
rule m(x, inv(x)) -> e
rule m(m(x, y), z) -> m(x, m(y, z))
rule m(inv(x), m(x, y)) -> y
rule m(x, m(inv(x), y)) -> y
rule inv(e) -> e
rule inv(inv(x)) -> x
rule inv(m(x, y)) -> m(inv(y), inv(x))
";

// join-semilattices with a bottom element
const SEMILATTICE: &str = "\
theory semilattice
op m : S S -> S
op e : -> S
ac m unit e
rule m(x, x) -> x
";

pub fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "empty" => EMPTY,
        "pointed" => POINTED,
        "monoid" => MONOID,
        "commutative-monoid" => COMMUTATIVE_MONOID,
        "group" => GROUP,
        "semilattice" => SEMILATTICE,
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Option<TheoryPresentation> {
    builtin_source(name).map(|s| TheoryPresentation::parse(s, false).expect("builtin theories load"))
}
