//! Weighted max-min fair joint TDM/FDM subcarrier allocation for OFDMA systems
//! operating under a per-subcarrier PSD mask.
//!
//! Every solver is generic over the [`Scalar`] type (`f32` or `f64`); the
//! aliases at the crate root fix the double-precision types used by the
//! simulator and the command-line tool.
//!
//! ```
//! use ofdma_maxmin::{solve_maxmin, RateMatrixF64, WeightVectorF64};
//!
//! let r = RateMatrixF64::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
//! let res = solve_maxmin(&r, &WeightVectorF64::uniform(2)).unwrap();
//! assert!((res.c - 2.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod lp;
pub mod maxmin;
pub mod rates;
pub mod scalar;
pub mod services;
pub mod sim;
pub mod two_user;

pub use error::{Error, Result};
pub use lp::{solve as solve_lp, LinearProgram, LpSolution, LpStatus, PivotRule, Relation, SolverOptions};
pub use maxmin::{
    build_maxmin_lp, count_shared_bins, solve_maxmin, verify_kkt, AllocationMatrix, KktReport,
    MaxMinResult, WeightVector,
};
pub use rates::{compute_rate_matrix, snr_db_to_linear, ChannelRealization, RateMatrix};
pub use scalar::Scalar;
pub use services::{check_feasibility, solve_mixed, MixedResult, MixedStatus, ServiceClass, ServiceProfile};
pub use sim::{run_case1, run_case2, SimConfig, SimOutput};
pub use two_user::{solve_two_user, TwoUserInstance, TwoUserSolution};

pub type ChannelRealizationF64 = ChannelRealization<f64>;
pub type ChannelRealizationF32 = ChannelRealization<f32>;
pub type RateMatrixF64 = RateMatrix<f64>;
pub type RateMatrixF32 = RateMatrix<f32>;
pub type WeightVectorF64 = WeightVector<f64>;
pub type WeightVectorF32 = WeightVector<f32>;
pub type AllocationMatrixF64 = AllocationMatrix<f64>;
pub type AllocationMatrixF32 = AllocationMatrix<f32>;
pub type MaxMinResultF64 = MaxMinResult<f64>;
pub type MaxMinResultF32 = MaxMinResult<f32>;
pub type LinearProgramF64 = LinearProgram<f64>;
pub type LinearProgramF32 = LinearProgram<f32>;
pub type TwoUserInstanceF64 = TwoUserInstance<f64>;
pub type TwoUserInstanceF32 = TwoUserInstance<f32>;
pub type ServiceProfileF64 = ServiceProfile<f64>;
pub type ServiceProfileF32 = ServiceProfile<f32>;
