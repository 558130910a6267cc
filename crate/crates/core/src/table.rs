//! Pauli-coefficient tables with an explicit resolution floor.

use crate::error::Result;
use crate::linalg::DenseOperator;
use crate::pauli::{distance, pauli_coefficient, PauliString};
use crate::scalar::Real;

/// What a table is indexed by: a temperature or a series order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableKey {
    Beta(f64),
    Order(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEntry {
    pub operator: PauliString,
    pub n_body: usize,
    pub distance: usize,
    pub value: f64,
    /// `|value|` does not exceed the floor; the value is kept, not zeroed.
    pub below_floor: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub key: TableKey,
    pub l_a: usize,
    pub floor: f64,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientTable {
    /// Coefficients of `x` on `ops`, in the order given. `floor` is compared
    /// at the working precision before the values are rounded to f64.
    pub fn from_operator<T: Real>(
        key: TableKey,
        x: &DenseOperator<T>,
        l_a: usize,
        ops: &[PauliString],
        floor: T,
    ) -> Result<Self> {
        let entries = ops
            .iter()
            .map(|o| {
                let c = pauli_coefficient(x, o)?;
                Ok(CoefficientEntry {
                    operator: *o,
                    n_body: o.n_body(),
                    distance: distance(o, l_a)?,
                    value: c.to_f64(),
                    below_floor: c.abs() <= floor,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefficientTable {
            key,
            l_a,
            floor: floor.to_f64(),
            entries,
        })
    }

    pub fn get(&self, o: &PauliString) -> Option<&CoefficientEntry> {
        self.entries.iter().find(|e| e.operator == *o)
    }

    pub fn value(&self, o: &PauliString) -> Option<f64> {
        self.get(o).map(|e| e.value)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value.abs()))
    }
}
