use std::sync::Arc;

use lawvere::fincat::{is_sifted, SiftedWitness};
use lawvere::files::structure_to_toml;
use lawvere::models::{
    check_model, free_model, hom_models, left_adjoint_algebraic, quotient_by_congruence, AdjointOptions, FreeModel, Model,
    Structure, DEFAULT_HOM_BOUND,
};
use lawvere::monadic::{em_model_correspondence, monad_from_theory, roundtrip_check};
use lawvere::presheaf::{decompose_into_representables, preserves_colimit};
use lawvere::rewrite::{default_names, local_confluence_report};
use lawvere::suite;
use lawvere::theory::{check_theory_morphism, hom_enumerate, CONFLUENCE_DEPTH};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::witness::{self, Witness};
use crate::{
    refs, AdjointCmd, CategoryCmd, Cli, CliError, Command, ModelCmd, MonadCmd, Outcome, PresheafCmd, TheoryCmd, EXIT_BUDGET,
    EXIT_FALSE, EXIT_OK,
};

/// Homs and elements listed in a report before eliding the rest.
const SHOW_LIMIT: usize = 1000;

fn verdict(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

fn with_witness(mut report: Value, text: &mut String, w: Option<Witness>) -> Value {
    if let Some(w) = w {
        let v = w.to_value();
        *text += &format!("witness: {}\n", serde_json::to_string(&v).expect("json"));
        report["witness"] = v;
    }
    report
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let unsafe_ = cli.allow_unsafe;
    match &cli.command {
        Command::Theory(TheoryCmd::Check { theory }) => {
            let t = refs::theory(theory, true)?;
            let sig = t.signature();
            let ops: Vec<String> = sig
                .ops()
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let args: String = d.args.iter().map(|&s| format!(" {}", sig.sorts()[s])).collect();
                    let ac = if sig.is_ac(i) { " (ac)" } else { "" };
                    format!("{} :{args} -> {}{ac}", d.name, sig.sorts()[d.result])
                })
                .collect();
            let pairs = local_confluence_report(t.rules(), CONFLUENCE_DEPTH);
            let mut text = format!(
                "theory {}\nsorts: {}\noperations: {}\nrules: {}\nlocally confluent: {}\n",
                t.name(),
                sig.sorts().join(" "),
                ops.join(", "),
                t.rules().rules().len(),
                pairs.is_empty()
            );
            let w = pairs.first().map(|c| {
                let nv = [&c.peak, &c.left, &c.right].iter().filter_map(|t| t.max_var()).max().map_or(0, |v| v + 1);
                let names = default_names(nv);
                Witness::CriticalPair {
                    theory: theory.clone(),
                    variables: names.clone(),
                    peak: sig.show(&c.peak, &names),
                    left: sig.show(&c.left, &names),
                    right: sig.show(&c.right, &names),
                }
            });
            let report = json!({
                "theory": t.name(),
                "sorts": sig.sorts(),
                "operations": ops,
                "rules": t.rules().rules().len(),
                "locally_confluent": pairs.is_empty(),
                "unjoinable_pairs": pairs.len(),
            });
            let report = with_witness(report, &mut text, w);
            Ok(Outcome { code: verdict(pairs.is_empty()), report, text })
        }
        Command::Theory(TheoryCmd::Hom { theory, m, n }) => {
            let t = refs::theory(theory, unsafe_)?;
            let depth = cli.depth.unwrap_or(3);
            let (src, dst) = (t.power(*m)?, t.power(*n)?);
            let homs = hom_enumerate(&t, &src, &dst, depth)?;
            if let Some(b) = cli.bound {
                if homs.len() as u128 > b {
                    return Err(CliError { code: EXIT_BUDGET, message: format!("{} homs exceed the bound {b}", homs.len()) });
                }
            }
            let shown: Vec<String> = homs.homs.iter().take(SHOW_LIMIT).map(|h| h.show(&t)).collect();
            let mut text = format!(
                "hom({m}, {n}) at depth {depth}: {} morphisms{}\n",
                homs.len(),
                if homs.truncated { " (truncated: deeper normal forms exist)" } else { "" }
            );
            for s in &shown {
                text += &format!("  {s}\n");
            }
            if homs.len() > shown.len() {
                text += &format!("  ... {} more\n", homs.len() - shown.len());
            }
            let report = json!({
                "theory": t.name(), "m": m, "n": n, "depth": depth,
                "count": homs.len(), "truncated": homs.truncated, "homs": shown,
            });
            Ok(Outcome { code: EXIT_OK, report, text })
        }
        Command::Theory(TheoryCmd::Morphism { source, target, map }) => {
            let g = refs::morphism(source, target, map, unsafe_)?;
            let v = check_theory_morphism(&g)?;
            let mut text = format!(
                "{} -> {}: {} ({} equations checked)\n",
                g.source.name(),
                g.target.name(),
                if v.valid { "valid" } else { "not a morphism" },
                v.checked
            );
            let w = v.failure.as_ref().map(|f| Witness::MorphismFailure {
                source: source.clone(),
                target: target.clone(),
                map: map.clone(),
                equation: f.equation.clone(),
                left: f.left.clone(),
                right: f.right.clone(),
            });
            let report = json!({ "source": g.source.name(), "target": g.target.name(), "valid": v.valid, "checked": v.checked });
            let report = with_witness(report, &mut text, w);
            Ok(Outcome { code: verdict(v.valid), report, text })
        }
        Command::Model(ModelCmd::Check { model }) => {
            let s = refs::structure(model, unsafe_)?;
            let v = check_model(&s);
            let mut text = format!(
                "{} structure with carriers {:?}: {} ({} equation instances checked)\n",
                s.theory().name(),
                s.carriers(),
                if v.holds { "model" } else { "not a model" },
                v.checked
            );
            let w = v.failure.as_ref().map(|f| Witness::NotAModel {
                model: model.clone(),
                equation: f.equation.clone(),
                assignment: f.assignment.clone(),
                left: f.left.clone(),
                right: f.right.clone(),
            });
            let report = json!({ "theory": s.theory().name(), "carriers": s.carriers(), "holds": v.holds, "checked": v.checked });
            let report = with_witness(report, &mut text, w);
            Ok(Outcome { code: verdict(v.holds), report, text })
        }
        Command::Model(ModelCmd::Free { theory, generators }) => {
            let t = refs::theory(theory, unsafe_)?;
            if !t.is_single_sorted() {
                return Err(CliError::input(format!("theory `{}` is not single-sorted", t.name())));
            }
            let depth = cli.depth.unwrap_or(3);
            let names = default_names(*generators);
            match free_model(&t, std::slice::from_ref(&names), depth)? {
                FreeModel::Exact { model, terms, .. } => {
                    let shown: Vec<String> = terms[0].iter().map(|u| t.signature().show(u, &names)).collect();
                    let toml = structure_to_toml(model.structure(), theory);
                    let text = format!("free model on {generators} generators: {} elements\n{toml}", shown.len());
                    let report = json!({ "theory": t.name(), "generators": generators, "depth": depth, "exact": true, "elements": shown, "toml": toml });
                    Ok(Outcome { code: EXIT_OK, report, text })
                }
                FreeModel::Truncated(f) => {
                    let shown: Vec<String> = f.terms[0].iter().take(SHOW_LIMIT).map(|u| t.signature().show(u, &names)).collect();
                    let text = format!(
                        "free model on {generators} generators does not close at depth {depth}; {} normal forms listed\n",
                        f.terms[0].len()
                    );
                    let report = json!({ "theory": t.name(), "generators": generators, "depth": depth, "exact": false, "elements": shown });
                    Ok(Outcome { code: EXIT_BUDGET, report, text })
                }
            }
        }
        Command::Model(ModelCmd::Hom { source, target }) => {
            let a = Arc::new(Model::new(refs::structure(source, unsafe_)?)?);
            let b = Arc::new(Model::new(refs::structure(target, unsafe_)?)?);
            let homs = hom_models(&a, &b, cli.bound.unwrap_or(DEFAULT_HOM_BOUND))?;
            let (sa, sb) = (a.structure(), b.structure());
            let shown: Vec<Vec<Vec<String>>> = homs
                .iter()
                .map(|h| {
                    h.maps.iter().enumerate().map(|(so, f)| {
                        f.iter().enumerate().map(|(x, &y)| format!("{}={}", sa.names(so)[x], sb.names(so)[y])).collect()
                    }).collect()
                })
                .collect();
            let mut text = format!("{} homomorphisms\n", homs.len());
            for h in &shown {
                let parts: Vec<String> = h.iter().map(|m| m.join(",")).collect();
                text += &format!("  {}\n", parts.join(" | "));
            }
            let report = json!({ "count": homs.len(), "homs": shown });
            Ok(Outcome { code: EXIT_OK, report, text })
        }
        Command::Model(ModelCmd::Quotient { model, relate }) => {
            let s = refs::structure(model, unsafe_)?;
            let pairs = relate.iter().map(|r| parse_relation(&s, r)).collect::<Result<Vec<_>, _>>()?;
            let q = quotient_by_congruence(&s, &pairs)?;
            let sig = s.theory().signature();
            let mut classes = Vec::new();
            for (so, sort) in sig.sorts().iter().enumerate() {
                let mut by_class = vec![Vec::new(); q.model.structure().size(so)];
                for (x, &c) in q.map[so].iter().enumerate() {
                    by_class[c].push(s.names(so)[x].clone());
                }
                classes.push(json!({ "sort": sort, "classes": by_class }));
            }
            let toml = structure_to_toml(q.model.structure(), s.theory().name());
            let text = format!("quotient with carriers {:?}\n{toml}", q.model.structure().carriers());
            let report = json!({ "carriers": q.model.structure().carriers(), "classes": classes, "toml": toml });
            Ok(Outcome { code: EXIT_OK, report, text })
        }
        Command::Adjoint(AdjointCmd::Apply { source, target, map, model, certify_size }) => {
            let g = refs::morphism(source, target, map, unsafe_)?;
            let a = Arc::new(Model::new(refs::structure(model, unsafe_)?)?);
            let opts = AdjointOptions {
                certify_size: *certify_size,
                hom_bound: cli.bound.unwrap_or(DEFAULT_HOM_BOUND),
                ..AdjointOptions::default()
            };
            let la = left_adjoint_algebraic(&g, &a, &opts)?;
            let toml = structure_to_toml(la.model.structure(), target);
            let (sa, sl) = (a.structure(), la.model.structure());
            let unit: Vec<Vec<String>> = la
                .unit
                .maps
                .iter()
                .enumerate()
                .map(|(so, f)| {
                    let to = g.sort_map[so];
                    f.iter().enumerate().map(|(x, &y)| format!("{}={}", sa.names(so)[x], sl.names(to)[y])).collect()
                })
                .collect();
            let c = &la.certificate;
            let text = format!(
                "left adjoint: carriers {:?}\nunit: {}\ncertificate: {} ({} target models, {} naturality squares){}\n{toml}",
                sl.carriers(),
                unit.iter().map(|m| m.join(",")).collect::<Vec<_>>().join(" | "),
                if c.holds { "holds" } else { "fails" },
                c.models_checked,
                c.naturality_squares,
                c.failure.as_ref().map_or(String::new(), |f| format!(": {f}")),
            );
            let report = json!({ "carriers": sl.carriers(), "unit": unit, "certificate": c, "toml": toml });
            Ok(Outcome { code: verdict(c.holds), report, text })
        }
        Command::Monad(MonadCmd::Build { theory, set, samples }) => {
            let t = refs::theory(theory, unsafe_)?;
            let depth = cli.depth.unwrap_or(4);
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let (_, slice, laws) = monad_from_theory(t.clone(), *set, depth, *samples, &mut rng)?;
            let names = default_names(*set);
            let shown: Vec<String> = slice.elements.iter().take(SHOW_LIMIT).map(|u| t.signature().show(u, &names)).collect();
            let mut text = format!(
                "T({set}) at depth {depth}: {} elements{}\nlaws: {} ({} unit, {} associativity, {} naturality checks)\n",
                slice.len(),
                if slice.saturated { "" } else { " (truncated)" },
                if laws.holds { "hold" } else { "fail" },
                laws.unit_checks,
                laws.associativity_checks,
                laws.naturality_checks
            );
            for f in &laws.failures {
                text += &format!("  {f}\n");
            }
            let report = json!({ "theory": t.name(), "elements": shown, "laws": laws });
            Ok(Outcome { code: verdict(laws.holds), report, text })
        }
        Command::Monad(MonadCmd::Roundtrip { theory, arity, samples }) => {
            let t = refs::theory(theory, unsafe_)?;
            let depth = cli.depth.unwrap_or(4);
            let r = roundtrip_check(t, *arity, depth, *samples, cli.seed)?;
            let mut text = format!("roundtrip of {} on arities <= {arity} at depth {depth}\n", r.theory);
            for c in &r.cells {
                text += &format!(
                    "  hom({}, {}): theory {} / monad {}{}{}\n",
                    c.source,
                    c.target,
                    c.theory_size,
                    c.monad_size,
                    if c.bijective { "" } else { " MISMATCH" },
                    if c.truncated { " (truncated)" } else { "" }
                );
            }
            text += &format!(
                "identities: {}\ncompositions: {} checked, {} failed\nholds: {}\n",
                r.identities_preserved, r.compositions_checked, r.compositions_failed, r.holds
            );
            Ok(Outcome { code: verdict(r.holds), report: serde_json::to_value(&r).expect("json"), text })
        }
        Command::Monad(MonadCmd::Em { theory, carrier }) => {
            let t = refs::theory(theory, unsafe_)?;
            let r = em_model_correspondence(t, *carrier, cli.depth.unwrap_or(0))?;
            let text = format!(
                "{} on {} elements: {} models, {} algebras\nalgebras verified: {} ({} instances at depth {})\nbijection: {}\nhoms agree: {} ({} pairs)\nholds: {}\n",
                r.theory, r.size, r.models, r.algebras, r.algebras_verified, r.verified_instances, r.verify_depth,
                r.mutually_inverse, r.homs_agree, r.hom_pairs_checked, r.holds
            );
            Ok(Outcome { code: verdict(r.holds), report: serde_json::to_value(&r).expect("json"), text })
        }
        Command::Presheaf(PresheafCmd::Decompose { presheaf }) => {
            let p = refs::presheaf(presheaf)?;
            match decompose_into_representables(&p) {
                Ok(d) => {
                    let names = d.summand_names();
                    let sum = if names.is_empty() { "0".to_string() } else { names.join(" + ") };
                    let generators: Vec<(String, String)> =
                        d.generators.iter().map(|&(o, x)| (p.base().object_name(o).to_string(), p.label(o, x))).collect();
                    let report = json!({ "presheaf": presheaf, "decomposable": true, "summands": names, "generators": generators });
                    Ok(Outcome { code: EXIT_OK, report, text: format!("{sum}\n") })
                }
                Err(nd) => {
                    let component: Vec<(String, String)> =
                        nd.elements.iter().map(|&(o, x)| (p.base().object_name(o).to_string(), p.label(o, x))).collect();
                    let mut text = format!("not a coproduct of representables: {nd}\n");
                    let report = json!({ "presheaf": presheaf, "decomposable": false });
                    let w = Witness::NotDecomposable { presheaf: presheaf.clone(), component };
                    let report = with_witness(report, &mut text, Some(w));
                    Ok(Outcome { code: EXIT_FALSE, report, text })
                }
            }
        }
        Command::Presheaf(PresheafCmd::Preserves { presheaf, colimit }) => {
            let p = refs::presheaf(presheaf)?;
            let (diagram, base) = refs::diagram(colimit)?;
            if **p.base() != *base {
                return Err(CliError::input("presheaf and diagram live over different bases"));
            }
            let cocone = diagram.colimit(&base);
            let pr = preserves_colimit(&p, &cocone)?;
            let mut text = format!(
                "{}: colim Nat(P, D) has {} elements, Nat(P, colim D) has {}\n",
                if pr.preserved { "preserved" } else { "not preserved" },
                pr.image_colimit,
                pr.hom_into_apex
            );
            let w = (!pr.preserved).then(|| Witness::NotPreserved {
                presheaf: presheaf.clone(),
                colimit: colimit.clone(),
                image_colimit: pr.image_colimit,
                hom_into_apex: pr.hom_into_apex,
            });
            let report = json!({
                "presheaf": presheaf, "colimit": colimit, "preserved": pr.preserved,
                "image_colimit": pr.image_colimit, "hom_into_apex": pr.hom_into_apex, "image_sizes": pr.image_sizes,
            });
            let report = with_witness(report, &mut text, w);
            Ok(Outcome { code: verdict(pr.preserved), report, text })
        }
        Command::Category(CategoryCmd::Check { category }) => {
            let c = refs::category(category)?;
            c.validate()?;
            let text = format!(
                "valid category: {} objects, {} morphisms, {}connected, idempotents {}split\n",
                c.num_objects(),
                c.num_morphisms(),
                if c.is_connected() { "" } else { "not " },
                if c.idempotents_split() { "" } else { "do not " }
            );
            let report = json!({
                "objects": c.objects(), "morphisms": c.num_morphisms(),
                "connected": c.is_connected(), "idempotents_split": c.idempotents_split(),
            });
            Ok(Outcome { code: EXIT_OK, report, text })
        }
        Command::Category(CategoryCmd::Sifted { category }) => {
            let c = refs::category(category)?;
            let v = is_sifted(&c);
            let mut text = format!("{}\n", if v.sifted { "sifted" } else { "not sifted" });
            let w = v.witness.as_ref().map(|w| match w {
                SiftedWitness::Empty => Witness::SiftedEmpty { category: category.clone() },
                SiftedWitness::Disconnected { a, b, components } => Witness::SiftedDisconnected {
                    category: category.clone(),
                    a: a.clone(),
                    b: b.clone(),
                    components: components.len(),
                },
            });
            let report = json!({ "category": category, "sifted": v.sifted, "detail": v.witness });
            let report = with_witness(report, &mut text, w);
            Ok(Outcome { code: verdict(v.sifted), report, text })
        }
        Command::Suite { name, instances } => {
            let r = suite::run(name, cli.seed, *instances).ok_or_else(|| {
                CliError::input(format!("unknown suite `{name}` (known: {})", suite::SUITES.join(", ")))
            })?;
            let mut text = String::new();
            for c in &r.checks {
                text += &format!("{} [{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.criterion, c.id, c.detail);
            }
            let failed = r.checks.iter().filter(|c| !c.passed).count();
            text += &format!("{}: {} checks, {failed} failed\n", r.suite, r.checks.len());
            Ok(Outcome { code: verdict(r.passed), report: serde_json::to_value(&r).expect("json"), text })
        }
        Command::VerifyWitness { file } => {
            let w = witness::load(&refs::read(file)?)?;
            let kind = w.to_value()["kind"].as_str().unwrap_or_default().to_string();
            let result = witness::verify(&w, unsafe_)?;
            let text = match &result {
                Ok(()) => format!("witness confirmed ({kind})\n"),
                Err(why) => format!("witness rejected ({kind}): {why}\n"),
            };
            let report = json!({ "kind": kind, "confirmed": result.is_ok(), "reason": result.err() });
            let code = verdict(report["confirmed"].as_bool().unwrap_or(false));
            Ok(Outcome { code, report, text })
        }
    }
}

/// `a=b` for single-sorted structures, `sort:a=b` otherwise.
fn parse_relation(s: &Structure, r: &str) -> Result<(usize, usize, usize), CliError> {
    let sig = s.theory().signature();
    let (sort, pair) = match r.split_once(':') {
        Some((so, rest)) => (sig.sort_id(so)?, rest),
        None if sig.sorts().len() == 1 => (0, r),
        None => return Err(CliError::input(format!("`{r}`: name the sort as SORT:A=B"))),
    };
    let (a, b) = pair.split_once('=').ok_or_else(|| CliError::input(format!("`{r}` is not of the form A=B")))?;
    let find = |x: &str| {
        s.names(sort)
            .iter()
            .position(|n| n == x.trim())
            .ok_or_else(|| CliError::input(format!("no element `{x}` in sort {}", sig.sorts()[sort])))
    };
    Ok((sort, find(a)?, find(b)?))
}
