use std::collections::BTreeMap;

use super::crisp::AtomCell;
use super::model::{index_tuple, Element, Model, Table};
use super::value::TruthValue;
use crate::syntax::Signature;

/// How constants are placed in an enumerated domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantMapping {
    /// Every function from constants to elements.
    AllFunctions,
    /// One fixed placement.
    Fixed(BTreeMap<String, Element>),
}

/// Element names used by enumerated models.
pub fn element_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("d{i}")).collect()
}

/// A model over `n` elements with every cell at `fill`, similarity
/// diagonals at 1, and similarity off-diagonals at `sim_fill`.
pub fn blank_model(
    sig: &Signature,
    n: usize,
    constants: BTreeMap<String, Element>,
    fill: TruthValue,
    sim_fill: TruthValue,
) -> Model {
    let preds = sig
        .predicates
        .iter()
        .map(|(name, &arity)| {
            (
                name.clone(),
                Table {
                    arity,
                    values: vec![fill; n.pow(arity as u32)],
                },
            )
        })
        .collect();
    let sims = sig
        .sim_bases
        .iter()
        .map(|base| {
            let mut table = vec![sim_fill; n * n];
            for d in 0..n {
                table[d * n + d] = TruthValue::ONE;
            }
            (base.clone(), table)
        })
        .collect();
    Model::from_tables(element_names(n), constants, preds, sims).expect("blank model is well formed")
}

/// Every predicate cell and, optionally, every free similarity cell of a
/// signature over `n` elements, in a fixed order.
pub fn signature_cells(sig: &Signature, n: usize, with_sims: bool) -> Vec<AtomCell> {
    let mut cells = Vec::new();
    for (name, &arity) in &sig.predicates {
        for idx in 0..n.pow(arity as u32) {
            cells.push(AtomCell::Pred {
                name: name.clone(),
                tuple: index_tuple(n, arity, idx),
            });
        }
    }
    if with_sims {
        for base in &sig.sim_bases {
            for d in 0..n {
                for e in d + 1..n {
                    cells.push(AtomCell::Sim {
                        base: base.clone(),
                        left: d,
                        right: e,
                    });
                }
            }
        }
    }
    cells
}

/// Odometer over assignments of `values` to `cells`, updating a working
/// model in place. The first call to `advance` yields the all-first-value
/// model.
pub struct CellOdometer {
    model: Model,
    cells: Vec<AtomCell>,
    values: Vec<TruthValue>,
    digits: Vec<usize>,
    started: bool,
}

impl CellOdometer {
    pub fn new(mut model: Model, cells: Vec<AtomCell>, values: Vec<TruthValue>) -> CellOdometer {
        assert!(!values.is_empty(), "value set must be nonempty");
        for cell in &cells {
            model.set_cell(cell, values[0]);
        }
        let digits = vec![0; cells.len()];
        CellOdometer {
            model,
            cells,
            values,
            digits,
            started: false,
        }
    }

    /// Moves to the next assignment; false once every assignment was seen.
    pub fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        for (i, digit) in self.digits.iter_mut().enumerate() {
            *digit += 1;
            if *digit < self.values.len() {
                self.model.set_cell(&self.cells[i], self.values[*digit]);
                return true;
            }
            *digit = 0;
            self.model.set_cell(&self.cells[i], self.values[0]);
        }
        false
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn model_mut(&mut self) -> &mut Model {
        &mut self.model
    }

    /// Number of assignments, saturating.
    pub fn size(&self) -> u128 {
        (self.values.len() as u128).saturating_pow(self.cells.len() as u32)
    }
}

/// Every model over a domain of `n` elements whose atom values come from
/// `values`, in a deterministic order. Without `sim_constrained`, similarity
/// relations are the identity (1 on the diagonal, 0 elsewhere).
pub fn enumerate_models(
    sig: &Signature,
    n: usize,
    values: &[TruthValue],
    sim_constrained: bool,
    constants: ConstantMapping,
) -> impl Iterator<Item = Model> {
    assert!(n >= 1, "domain must be nonempty");
    let names: Vec<String> = sig.constants.iter().cloned().collect();
    let placements: Vec<BTreeMap<String, Element>> = match constants {
        ConstantMapping::Fixed(map) => vec![map],
        ConstantMapping::AllFunctions => {
            let total = n.pow(names.len() as u32);
            (0..total)
                .map(|idx| {
                    names
                        .iter()
                        .cloned()
                        .zip(index_tuple(n, names.len(), idx))
                        .collect()
                })
                .collect()
        }
    };
    let cells = signature_cells(sig, n, sim_constrained);
    let values = values.to_vec();
    let sig = sig.clone();
    placements.into_iter().flat_map(move |placement| {
        let base = blank_model(&sig, n, placement, values[0], TruthValue::ZERO);
        let mut odometer = CellOdometer::new(base, cells.clone(), values.clone());
        std::iter::from_fn(move || odometer.advance().then(|| odometer.model().clone()))
    })
}
