//! One-dimensional rough-flux conservation law on the unit torus and its
//! kinetic (entropy-defect) measure.

mod entropy;
mod flux;
mod initial;
mod io;
mod scheme;

pub use entropy::{
    default_v_levels, entropy_defect, entropy_defect_with, KineticMeasure, DEFAULT_MAX_BINS, DEFAULT_V_LEVELS,
    DEFAULT_V_MARGIN, NEGATIVE_TOLERANCE,
};
pub use flux::{check_nondegeneracy, make_flux, Flux, NumericalFlux, DEFAULT_V_RANGE};
pub use initial::InitialData;
pub use io::{read_solution_binary, write_measure_csv, write_solution_binary, write_solution_csv};
pub use scheme::{path_ref, solve_rough, solve_rough_with, total_variation, GridSolution, SolveOptions};

