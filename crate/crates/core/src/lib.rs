//! Exact stability and hyperstability checks for the Cauchy and Jensen
//! equations on metric abelian groups.
//!
//! All arithmetic is over exact rationals. Groups are integer lattices,
//! dyadic lattices (both with the L1 norm) and finitely supported binary
//! sequences with the harmonic norm.

pub mod certify;
pub mod defect;
pub mod error;
pub mod functions;
pub mod groups;
pub mod hyper;
pub mod rational;
pub mod window;

pub use certify::{
    budget_from_scan, certify_cauchy, certify_cauchy_with, certify_jensen, certify_jensen_with, pick_cauchy_witnesses,
    pick_jensen_witness, CauchyCertificate, Certificate, JensenCertificate, StabilityBudget,
};
pub use defect::{
    adversarial_sharpness_search, cauchy_defect, defect, jensen_defect, jensen_quad_defect, sup_defect_scan,
    weighted_defect, Equation, ScanReport, SearchConfig, SearchMethod, SearchResult,
};
pub use error::{Error, Result};
pub use functions::{
    make_additive, make_extremal_cauchy, make_extremal_jensen, make_hyper_counterexample, Base, CodomainValue,
    TestFunction,
};
pub use groups::{Element, GroupDescriptor, GroupKind};
pub use hyper::{
    certify_hyper_cauchy, certify_hyper_jensen, pick_hyper_cauchy_witnesses, pick_hyper_jensen_witness,
    weighted_profile, HyperBudget, HyperCertificate, WeightFunction,
};
pub use rational::Rational;
pub use window::Window;
