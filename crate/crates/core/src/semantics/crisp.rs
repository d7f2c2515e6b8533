use super::model::{index_tuple, Element, Model};
use super::value::TruthValue;

/// One atomic cell of a model. Similarity cells are unordered pairs with
/// `left < right`; the diagonal is always 1 and never asked about.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomCell {
    Pred { name: String, tuple: Vec<Element> },
    Sim { base: String, left: Element, right: Element },
}

fn round(v: TruthValue, cell: impl FnOnce() -> AtomCell, tie_break: &mut impl FnMut(&AtomCell) -> bool) -> TruthValue {
    if v > TruthValue::HALF {
        TruthValue::ONE
    } else if v < TruthValue::HALF {
        TruthValue::ZERO
    } else if tie_break(&cell()) {
        TruthValue::ONE
    } else {
        TruthValue::ZERO
    }
}

/// Rounds every atom value to 0 or 1: above one half goes to 1, below to 0,
/// and cells at exactly one half go to 1 when `tie_break` says so.
pub fn crispify(m: &Model, mut tie_break: impl FnMut(&AtomCell) -> bool) -> Model {
    let n = m.domain_size();
    let mut out = m.clone();
    let (preds, sims) = out.tables_mut();
    for (name, table) in preds.iter_mut() {
        for (idx, v) in table.values.iter_mut().enumerate() {
            let arity = table.arity;
            *v = round(
                *v,
                || AtomCell::Pred {
                    name: name.clone(),
                    tuple: index_tuple(n, arity, idx),
                },
                &mut tie_break,
            );
        }
    }
    for (base, table) in sims.iter_mut() {
        for d in 0..n {
            for e in d + 1..n {
                let v = round(
                    table[d * n + e],
                    || AtomCell::Sim {
                        base: base.clone(),
                        left: d,
                        right: e,
                    },
                    &mut tie_break,
                );
                table[d * n + e] = v;
                table[e * n + d] = v;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_closed, ModelBuilder};
    use crate::syntax::parse_formula;

    fn sample() -> Model {
        ModelBuilder::new(["d1", "d2"])
            .constant("a", "d1")
            .unwrap()
            .constant("b", "d2")
            .unwrap()
            .pred("P", &["d1"], TruthValue::of(7, 10))
            .unwrap()
            .pred("P", &["d2"], TruthValue::HALF)
            .unwrap()
            .sim("P", "d1", "d2", TruthValue::HALF)
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn rounds_away_from_half() {
        let c = crispify(&sample(), |_| true);
        assert_eq!(c.pred_value("P", &[0]), Some(TruthValue::ONE));
    }

    #[test]
    fn half_follows_tie_break() {
        let up = crispify(&sample(), |_| true);
        let down = crispify(&sample(), |_| false);
        assert_eq!(up.pred_value("P", &[1]), Some(TruthValue::ONE));
        assert_eq!(down.pred_value("P", &[1]), Some(TruthValue::ZERO));
        assert_eq!(up.sim_value("P", 1, 0), Some(TruthValue::ONE));
        assert_eq!(down.sim_value("P", 0, 1), Some(TruthValue::ZERO));
        assert_eq!(down.sim_value("P", 1, 1), Some(TruthValue::ONE));
    }

    #[test]
    fn compound_above_half_goes_to_one() {
        let m = sample();
        let f = parse_formula("P(a) | !P(a)").unwrap();
        assert_eq!(eval_closed(&m, &f).unwrap(), TruthValue::of(7, 10));
        for choice in [true, false] {
            let c = crispify(&m, |_| choice);
            assert_eq!(eval_closed(&c, &f).unwrap(), TruthValue::ONE);
        }
    }

    #[test]
    fn tie_break_sees_unordered_pairs_once() {
        let mut seen = Vec::new();
        crispify(&sample(), |cell| {
            seen.push(cell.clone());
            false
        });
        assert_eq!(
            seen,
            vec![
                AtomCell::Pred {
                    name: "P".into(),
                    tuple: vec![1]
                },
                AtomCell::Sim {
                    base: "P".into(),
                    left: 0,
                    right: 1
                },
            ]
        );
    }
}
