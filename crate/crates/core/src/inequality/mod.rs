//! Defect-based checkers for BM, PL(K) and BBL_p(0,N), plus the growth and
//! diameter estimates built on them.

mod bm;
mod extremal;
mod growth;
mod report;
mod search;

pub use bm::{bm_check, bm_defect, layer_cake, level_set_inclusion, superlevel, BmMode, EXHAUSTIVE_LIMIT};
pub use extremal::{bbl_defect, bbl_extremal_h, pl_defect, pl_extremal_w};
pub use growth::{
    bishop_gromov_check, bonnet_myers_bound, bonnet_myers_check, estimate_growth_exponent, global_growth_exponent,
    BishopGromovCheck, BonnetMyers, BONNET_MYERS_C,
};
pub use report::{holds, DefectReport, InequalityKind, Params, SearchInfo, TracePoint, Witness, DEFECT_TOL_REL};
pub use search::{
    bbl_check, default_p_grid, distinct_balls, estimate_k_star, pl_check, pl_check_fields, Family, KStarEstimate,
    SearchStrategy, DEFAULT_SEED, DEFAULT_TOL_K, DEFAULT_T_GRID,
};
