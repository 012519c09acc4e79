use std::sync::Arc;

use num_complex::Complex64;

use super::spec::{Algorithm, AlgorithmSpec, OrderSearch};
use crate::error::{Error, Result};
use crate::generic::GenericFilter;
use crate::linalg::{inner, CVec};
use crate::linear::{FullRankLms, FullRankRls};
use crate::order::{select_branch_count, step_with_branch_count, BranchSelectConfig, OrderAdapter};
use crate::saabf::{OffsetPolicy, PositionBook, SaabfFilter};

/// Per-trial knowledge available to oracle-assisted receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOracle {
    pub w: CVec,
    pub mmse: f64,
}

impl TrialOracle {
    /// Stand-in used when only checking that a receiver can be built. The
    /// unit MMSE keeps relative tolerances well defined.
    pub fn placeholder(m: usize) -> Self {
        TrialOracle {
            w: CVec::zeros(m),
            mmse: 1.0,
        }
    }
}

/// Per-symbol outcome. `e` is the a priori error against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub e: Complex64,
    pub branch: Option<usize>,
    pub branches_evaluated: Option<usize>,
    pub order: Option<usize>,
}

impl StepInfo {
    fn plain(e: Complex64) -> Self {
        StepInfo {
            e,
            branch: None,
            branches_evaluated: None,
            order: None,
        }
    }
}

/// Any of the receivers a run can compare.
#[derive(Debug, Clone)]
pub enum Receiver {
    FullLms(FullRankLms),
    FullRls(FullRankRls),
    Generic(GenericFilter),
    Saabf {
        filter: SaabfFilter,
        search: Option<BranchSelectConfig>,
    },
    Order(OrderAdapter),
    Wiener(CVec),
}

impl Receiver {
    pub fn build(spec: &AlgorithmSpec, m: usize, policy: OffsetPolicy, oracle: &TrialOracle) -> Result<Self> {
        Ok(match &spec.algorithm {
            Algorithm::FullLms { mu } => Receiver::FullLms(FullRankLms::new(m, *mu)?),
            Algorithm::FullRls { lambda, delta } => Receiver::FullRls(FullRankRls::new(m, *lambda, *delta)?),
            Algorithm::GenericLms {
                rank,
                mu_w,
                mu_t,
                n_iter,
            } => Receiver::Generic(GenericFilter::new_lms(m, *rank, *mu_w, *mu_t, *n_iter)?),
            Algorithm::GenericRls {
                rank,
                lambda,
                delta_w,
                delta_t,
                n_iter,
            } => Receiver::Generic(GenericFilter::new_rls(m, *rank, *lambda, *delta_w, *delta_t, *n_iter)?),
            Algorithm::Wiener => {
                Error::check_len("Wiener filter", m, oracle.w.len())?;
                Receiver::Wiener(oracle.w.clone())
            }
            Algorithm::Saabf(p) => match p.order {
                Some(order) => {
                    let mut adapter = match order {
                        OrderSearch::Rank { d_min, d_max, lambda } => {
                            let q =
                                p.q.ok_or_else(|| Error::config("rank adaptation needs an explicit q"))?;
                            OrderAdapter::rank(m, q, p.branches, policy, d_min, d_max, lambda, &p.adaptation)?
                        }
                        OrderSearch::BlockLen { q_min, q_max, lambda } => {
                            OrderAdapter::block_len(m, p.rank, p.branches, policy, q_min, q_max, lambda, &p.adaptation)?
                        }
                    };
                    adapter.extremal.adapt_psi = !p.freeze_psi;
                    Receiver::Order(adapter)
                }
                None => {
                    let book = match p.q {
                        None if p.branches == 1 => PositionBook::dense(m, p.rank)?,
                        None => return Err(Error::config("q = M allows a single branch only")),
                        Some(q) => PositionBook::with_policy(m, p.rank, q, p.branches, policy)?,
                    };
                    let mut filter = p.adaptation.build(Arc::new(book))?;
                    filter.adapt_psi = !p.freeze_psi;
                    let search = match &p.branch_search {
                        Some(s) => {
                            let cfg = s.resolve(oracle.mmse);
                            cfg.validate(&filter.book)?;
                            Some(cfg)
                        }
                        None => None,
                    };
                    Receiver::Saabf { filter, search }
                }
            },
        })
    }

    /// Soft estimate of the desired symbol with the current state. Switched
    /// receivers take the branch whose output lies nearest the constellation.
    pub fn output(&self, r: &CVec) -> Result<Complex64> {
        Ok(match self {
            Receiver::FullLms(f) => f.output(r),
            Receiver::FullRls(f) => f.output(r),
            Receiver::Generic(f) => f.output(r)?,
            Receiver::Saabf { filter, .. } => filter.blind_output(r).1,
            Receiver::Order(a) => a.output(r),
            Receiver::Wiener(w) => inner(w, r),
        })
    }

    /// Soft estimate when the reference `d` is known: switched receivers use
    /// the branch their selection rule picks against `d`, which is the
    /// output the next [`Receiver::step`] adapts. Other receivers ignore `d`.
    pub fn reference_output(&self, r: &CVec, d: Complex64) -> Result<Complex64> {
        Ok(match self {
            Receiver::Saabf { filter, search } => {
                filter.check_input(r, d)?;
                let e = match search {
                    Some(cfg) => select_branch_count(filter, cfg, r, d).e,
                    None => filter.select_branch(r, d).e,
                };
                d - e
            }
            Receiver::Order(a) => {
                a.extremal.check_input(r, d)?;
                a.reference_output(r, d)
            }
            _ => self.output(r)?,
        })
    }

    /// Adapts to one sample with reference `d`.
    pub fn step(&mut self, r: &CVec, d: Complex64) -> Result<StepInfo> {
        Ok(match self {
            Receiver::FullLms(f) => StepInfo::plain(f.step(r, d)?),
            Receiver::FullRls(f) => StepInfo::plain(f.step(r, d)?),
            Receiver::Generic(f) => {
                let e = d - f.output(r)?;
                f.step(r, d)?;
                StepInfo::plain(e)
            }
            Receiver::Saabf { filter, search } => {
                let s = match search {
                    Some(cfg) => step_with_branch_count(filter, cfg, r, d)?,
                    None => filter.step(r, d)?,
                };
                StepInfo {
                    e: s.e,
                    branch: Some(s.branch),
                    branches_evaluated: Some(s.branches_evaluated),
                    order: None,
                }
            }
            Receiver::Order(a) => {
                let s = a.step(r, d)?;
                StepInfo {
                    e: s.e,
                    branch: Some(s.branch),
                    branches_evaluated: None,
                    order: Some(s.order),
                }
            }
            Receiver::Wiener(w) => StepInfo::plain(d - inner(w, r)),
        })
    }
}
