use proptest::prelude::*;

use tolerance_lab::consequence::{decide, Mode, SearchBounds};
use tolerance_lab::parameter::{parse_parameter, Parameter};
use tolerance_lab::semantics::{crispify, eval_closed, Model, ModelBuilder, TruthValue, ValueSet};
use tolerance_lab::syntax::{parse_formula, parse_sequent, Formula, Sequent, Term};

const CONSTS: [&str; 3] = ["a", "b", "c"];

fn term() -> impl Strategy<Value = Term> {
    prop::sample::select(CONSTS.to_vec()).prop_map(Term::constant)
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        term().prop_map(|t| Formula::pred("P", [t])),
        term().prop_map(|t| Formula::pred("Q", [t])),
        (term(), term()).prop_map(|(t, u)| Formula::sim("P", t, u)),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), prop::sample::select(CONSTS.to_vec()), any::<bool>()).prop_map(|(f, c, universal)| {
                let body = f.abstract_constant(c, "x");
                if universal {
                    Formula::forall("x", body)
                } else {
                    Formula::exists("x", body)
                }
            }),
        ]
    })
}

fn qf_formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn sequent() -> impl Strategy<Value = Sequent> {
    (prop::collection::vec(qf_formula(), 0..3), prop::collection::vec(qf_formula(), 0..3))
        .prop_map(|(l, r)| Sequent::new(l, r))
}

/// Models over `d1..dn` with every value drawn from `values`.
fn model_over(values: Vec<TruthValue>) -> impl Strategy<Value = Model> {
    (1usize..=3).prop_flat_map(move |n| {
        let pick = prop::sample::select(values.clone());
        (
            prop::collection::vec(0..n, 3),
            prop::collection::vec(pick.clone(), 2 * n),
            prop::collection::vec(pick, n * n),
        )
            .prop_map(move |(consts, preds, sims)| {
                let names: Vec<String> = (1..=n).map(|i| format!("d{i}")).collect();
                let mut b = ModelBuilder::new(names.clone());
                for (c, &e) in CONSTS.iter().zip(&consts) {
                    b = b.constant(c, &names[e]).unwrap();
                }
                for (i, d) in names.iter().enumerate() {
                    b = b.pred("P", &[d], preds[i]).unwrap().pred("Q", &[d], preds[n + i]).unwrap();
                    for (j, e) in names.iter().enumerate().skip(i + 1) {
                        b = b.sim("P", d, e, sims[i * n + j]).unwrap();
                    }
                }
                b.sim_base("P").build().unwrap()
            })
    })
}

fn twelfths() -> Vec<TruthValue> {
    (0..=12).map(|k| TruthValue::of(k, 12)).collect()
}

fn value(m: &Model, f: &Formula) -> TruthValue {
    eval_closed(m, f).unwrap()
}

fn rename(f: &Formula, from: &str, to: &str) -> Formula {
    f.abstract_constant(from, "zren").substitute("zren", &Term::constant(to))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn formulas_round_trip(f in formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn sequents_round_trip(s in sequent()) {
        prop_assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn connective_laws(m in model_over(twelfths()), a in formula(), b in formula()) {
        let v = |f: &Formula| value(&m, f);
        prop_assert_eq!(v(&Formula::not(Formula::not(a.clone()))), v(&a));
        prop_assert_eq!(
            v(&Formula::not(Formula::and(a.clone(), b.clone()))),
            v(&Formula::or(Formula::not(a.clone()), Formula::not(b.clone())))
        );
        prop_assert_eq!(
            v(&Formula::not(Formula::or(a.clone(), b.clone()))),
            v(&Formula::and(Formula::not(a.clone()), Formula::not(b.clone())))
        );
        prop_assert_eq!(
            v(&Formula::implies(a.clone(), b.clone())),
            v(&Formula::or(Formula::not(a.clone()), b.clone()))
        );
        let body = a.abstract_constant("a", "y");
        prop_assert_eq!(
            v(&Formula::forall("y", body.clone())),
            v(&Formula::not(Formula::exists("y", Formula::not(body))))
        );
    }

    #[test]
    fn crispification_keeps_sides_of_one_half(m in model_over(twelfths()), f in formula(), tie in any::<bool>()) {
        let before = value(&m, &f);
        let after = value(&crispify(&m, |_| tie), &f);
        prop_assert!(after.is_crisp());
        if before > TruthValue::HALF {
            prop_assert_eq!(after, TruthValue::ONE);
        }
        if before < TruthValue::HALF {
            prop_assert_eq!(after, TruthValue::ZERO);
        }
    }

    #[test]
    fn dyadic_values_are_closed(
        (values, m) in (1usize..=4).prop_flat_map(|k| {
            let values = Parameter::dyadic(k).unwrap().v.as_finite().unwrap().to_vec();
            (Just(values.clone()), model_over(values))
        }),
        f in formula(),
    ) {
        let v = ValueSet::finite(values);
        prop_assert!(v.is_closed());
        prop_assert!(v.contains(value(&m, &f)));
    }

    #[test]
    fn permuting_the_domain_preserves_values(m in model_over(twelfths()), f in formula(), rot in 0usize..3) {
        let n = m.domain_size();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        prop_assert_eq!(value(&m.permuted(&perm), &f), value(&m, &f));
    }

    #[test]
    fn symmetric_parameters_mirror(k in 0i64..=12) {
        let x = TruthValue::of(k, 12);
        for p in [Parameter::st(), Parameter::smith(), Parameter::vn(5).unwrap(), Parameter::dyadic(3).unwrap()] {
            prop_assert!(p.is_symmetric());
            prop_assert_eq!(p.in_t(x), p.in_f(x.complement()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renaming_constants_preserves_verdicts(s in sequent(), tolerant in any::<bool>()) {
        let mode = if tolerant { Mode::Tolerant } else { Mode::Plain };
        // a -> e, b -> f, c -> g is injective and avoids the originals.
        let r = |f: &Formula| rename(&rename(&rename(f, "a", "e"), "b", "f"), "c", "g");
        let renamed = Sequent::new(s.left.iter().map(r), s.right.iter().map(r));
        let bounds = SearchBounds::default();
        for p in [Parameter::st(), Parameter::smith(), parse_parameter("V={0,1/4,1/2,3/4,1} T={1} F={0,1/4}").unwrap()] {
            let before = decide(&s, &p, mode, &bounds).unwrap().status();
            let after = decide(&renamed, &p, mode, &bounds).unwrap().status();
            prop_assert_eq!(before, after, "{} under {}", s, p.label());
        }
    }
}

#[test]
fn asymmetry_witnesses_are_real() {
    for spec in [
        "V=[0,1] T={1} F=[0,1/2)",
        "V={0,1/4,1/2,3/4,1} T={1} F={0,1/4}",
        "V={0,1/4,1/2,3/4,1} T={3/4,1} F={0}",
    ] {
        let p = parse_parameter(spec).unwrap();
        let w = p.asymmetry_witness().unwrap_or_else(|| panic!("{spec}"));
        let broken = p.in_t(w) != p.in_f(w.complement()) || p.in_f(w) != p.in_t(w.complement());
        assert!(broken, "{spec}: {w}");
    }
}
