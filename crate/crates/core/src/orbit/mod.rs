//! Orbits of self-maps, Cauchy and special-limit detection, contraction
//! certificates and the fixed-point solvers built on them.

mod checks;
mod maps;
mod phi;
mod solver;
mod trace;

pub use checks::{
    check_cauchy_tail_bound, check_min_condition, check_nonexpansive, check_orbital_continuity_at,
    check_orbitally_phi_contractive, check_orbitally_r_contractive, orbit_prefix, ContinuityReport,
    IndexFailure, MinConditionReport, MinVariant, NonExpansiveReport, OrbitInequalityReport,
    PairFailure, PhiContractiveReport, RContractiveReport,
};
pub use maps::{SelfMap, MAP_NAMES};
pub use phi::PhiFunction;
pub use solver::{
    solve_fixed_point, Condition, FixedPointCertificate, SolverOptions, TheoremVariant,
};
pub use trace::{
    check_special_limit, iterate_orbit, CauchyVerdict, LimitVerdict, OrbitOptions, OrbitTrace,
    SpecialLimitReport, TailStats,
};
