//! Full-rank baselines: Wiener solution, LMS and RLS filters, hard
//! decisions and second-order moment estimation.

mod adaptive;
mod moments;
mod wiener;

pub use adaptive::{decide, detect, FullRankLms, FullRankRls, RlsInverse};
pub use moments::{estimate_moments, exact_moments, exhaustive_moments, moments_from_samples, SecondOrderMoments};
pub use wiener::{mse, wiener_solution, WIENER_LOADING};
