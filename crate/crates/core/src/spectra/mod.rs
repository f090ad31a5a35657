mod eigen;
mod ess;
mod set;

pub use eigen::{eig_dense, eig_matrix, pseudospectrum, symmetrizable_tridiagonal, tridiagonal_eigenvalues, Region};
pub use ess::{
    asymptotic_spectrum, bloch_spectrum, certificate_from, crosscheck_against, essential_spectrum, is_fredholm,
    scaling_formula, sum_formula, truncation_crosscheck, CrosscheckMode, CrosscheckReport, EssentialSpectrum,
    FredholmCertificate, QuasiOrbitRecord, SpectraOptions, Verdict, Witness, WitnessStatus, FINITE_SECTION_CAVEAT,
};
pub use set::{Circle, PointIndex, SpectralSet};
