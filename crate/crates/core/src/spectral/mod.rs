//! Spectral analysis of return-time sets and reconstruction of the rotation.

mod cesaro;
mod compare;
pub mod lattice;
mod reconstruct;
mod relations;
mod scan;

pub use cesaro::{cesaro_average, Indicator};
pub use compare::{compare_systems, Verdict};
pub use reconstruct::{reconstruct_group, PeakAssignment, ReconstructOptions, ReconstructionResult};
pub use relations::{
    detect_relations, detect_relations_auto, detect_relations_lll, relation_tolerance, RelationLattice, RelationMode,
    EXHAUSTIVE_MAX_FREQS, EXHAUSTIVE_MAX_HEIGHT,
};
pub use scan::{
    default_grid, default_threshold, dyadic_schedule, estimate_coefficient, refine_peak, refine_peak_with,
    scan_spectrum, spectral_length, spectrum_grid, CoefficientEstimate, Convergence, Spectrum, SpectrumPeak,
};
