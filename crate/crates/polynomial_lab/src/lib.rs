//! Exact rational polynomials for the contact-order gap expansion, with
//! Sturm-sequence root isolation.

pub mod checks;
pub mod families;
pub mod poly;

pub use checks::{
    check_critical_values, check_wp_identities, run_polylab, sigma_report, wp_real_roots, CriticalReport, Failure,
    PolyLabReport, SigmaReport,
};
pub use families::{p_sigma, p_sigma_closed, p_sigma_f64, p_sigma_sum, wp, wp_tilde, Branch, PathMismatch};
pub use poly::{real_roots, sturm_sequence, PolynomialExact, RealRoot, Q};
