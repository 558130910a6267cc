pub mod analysis;
pub mod error;
pub mod hmf;
pub mod linalg;
pub mod model;
pub mod pauli;
pub mod perturbation;
pub mod scalar;
pub mod table;

pub use error::{Error, Result};
pub use linalg::{DenseOperator, SpectralDecomposition};
pub use model::{bipartition, build_xxz, Bipartition, FieldMode, ModelSpec, Term};
pub use pauli::{Axis, PauliString, PhasedPauli, SignAssignment};
pub use scalar::{Backend, Cplx, Dd, Real, F256};
pub use hmf::{
    compute_hmf, deviation_table, entanglement_hamiltonian, rescaled_distance, EntanglementResult,
    HmfResult, HmfSolver,
};
pub use table::{CoefficientEntry, CoefficientTable, TableKey};
pub use perturbation::{
    k0_lower_bound, k0_numeric, series_coefficient, series_deviation_table, truncation_error,
    OrderReport, SeriesCoefficient, SeriesEngine,
};
pub use analysis::{fit_beta_exponent, fit_skin_depth, fit_skin_law, Family, FitResult};
