//! Run-time selection of the SAABF structure: how many branches to search
//! per symbol, the rank `D` and the block length `q`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, CVec};
use crate::saabf::{project, BranchDecision, OffsetPolicy, PositionBook, SaabfAdaptation, SaabfFilter, SaabfStep};

/// Early-stopping branch search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSelectConfig {
    pub c_min: usize,
    pub c_max: usize,
    /// Squared-error tolerance above the target.
    pub gamma: f64,
    /// Target squared error, typically the MMSE of the environment.
    pub e_target_sq: f64,
}

impl BranchSelectConfig {
    pub fn validate(&self, book: &PositionBook) -> Result<()> {
        if !(1 <= self.c_min && self.c_min <= self.c_max && self.c_max <= book.branches()) {
            return Err(Error::config(format!(
                "branch range {}..={} invalid for a book of {} branches",
                self.c_min,
                self.c_max,
                book.branches()
            )));
        }
        if !(self.gamma > 0.0) || !(self.e_target_sq >= 0.0) {
            return Err(Error::config("gamma must be positive and the target nonnegative"));
        }
        Ok(())
    }
}

/// Evaluates branches `0..c_min`, then one more at a time while the best
/// squared error so far is not below `e_target_sq + γ`, up to `c_max`.
/// `errors.len()` in the result is the number of branches evaluated.
pub fn select_branch_count(filter: &SaabfFilter, cfg: &BranchSelectConfig, r: &CVec, d: Complex64) -> BranchDecision {
    let threshold = cfg.e_target_sq + cfg.gamma;
    let mut errors: Vec<Complex64> = (0..cfg.c_min).map(|c| filter.branch_error(c, r, d)).collect();
    let mut best = errors.iter().map(|e| e.norm_sqr()).fold(f64::INFINITY, f64::min);
    while best >= threshold && errors.len() < cfg.c_max {
        let e = filter.branch_error(errors.len(), r, d);
        best = best.min(e.norm_sqr());
        errors.push(e);
    }
    BranchDecision::from_errors(&errors)
}

/// Branch-count selection followed by adaptation through the chosen branch.
pub fn step_with_branch_count(
    filter: &mut SaabfFilter,
    cfg: &BranchSelectConfig,
    r: &CVec,
    d: Complex64,
) -> Result<SaabfStep> {
    filter.check_input(r, d)?;
    let decision = select_branch_count(filter, cfg, r, d);
    filter.adapt(decision.branch, r, decision.e)?;
    Ok(SaabfStep {
        e: decision.e,
        branch: decision.branch,
        branches_evaluated: decision.errors.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderAxis {
    Rank,
    BlockLen,
}

/// Per-symbol result of an order-adaptive step.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStep {
    /// Error of the sub-filter that was selected before this symbol.
    pub e: Complex64,
    /// Branch of that sub-filter.
    pub branch: usize,
    /// Order selected after this symbol.
    pub order: usize,
}

/// Adapts only the largest filter and reads smaller sub-filters out of it,
/// choosing the order whose sub-filter has the lowest exponentially weighted
/// a posteriori squared error.
#[derive(Debug, Clone)]
pub struct OrderAdapter {
    pub axis: OrderAxis,
    pub orders: Vec<usize>,
    pub books: Vec<Arc<PositionBook>>,
    pub lambda: f64,
    pub costs: Vec<f64>,
    /// A posteriori squared errors of the last step, one per order.
    pub last_errors: Vec<f64>,
    pub extremal: SaabfFilter,
    selected: usize,
}

fn check_range(lo: usize, hi: usize, lambda: f64) -> Result<()> {
    if !(1 <= lo && lo <= hi) {
        return Err(Error::config(format!("order range {lo}..={hi} is empty")));
    }
    if !(lambda > 0.9 && lambda <= 1.0) {
        return Err(Error::config(format!(
            "order forgetting factor {lambda} outside (0.9, 1]"
        )));
    }
    Ok(())
}

impl OrderAdapter {
    fn build(
        axis: OrderAxis,
        orders: Vec<usize>,
        books: Vec<Arc<PositionBook>>,
        lambda: f64,
        adaptation: &SaabfAdaptation,
    ) -> Result<Self> {
        let extremal = adaptation.build(books.last().expect("nonempty order range").clone())?;
        let n = orders.len();
        Ok(OrderAdapter {
            axis,
            orders,
            books,
            lambda,
            costs: vec![0.0; n],
            last_errors: vec![0.0; n],
            extremal,
            selected: 0,
        })
    }

    /// Rank adaptation over `d_min..=d_max` at fixed `q` and branch count.
    pub fn rank(
        m: usize,
        q: usize,
        branches: usize,
        policy: OffsetPolicy,
        d_min: usize,
        d_max: usize,
        lambda: f64,
        adaptation: &SaabfAdaptation,
    ) -> Result<Self> {
        check_range(d_min, d_max, lambda)?;
        let orders: Vec<usize> = (d_min..=d_max).collect();
        let books = orders
            .iter()
            .map(|&d| PositionBook::with_policy(m, d, q, branches, policy).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Self::build(OrderAxis::Rank, orders, books, lambda, adaptation)
    }

    /// Block-length adaptation over `q_min..=q_max` at fixed `D` and branch
    /// count.
    pub fn block_len(
        m: usize,
        rank: usize,
        branches: usize,
        policy: OffsetPolicy,
        q_min: usize,
        q_max: usize,
        lambda: f64,
        adaptation: &SaabfAdaptation,
    ) -> Result<Self> {
        check_range(q_min, q_max, lambda)?;
        let orders: Vec<usize> = (q_min..=q_max).collect();
        let books = orders
            .iter()
            .map(|&q| PositionBook::with_policy(m, rank, q, branches, policy).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Self::build(OrderAxis::BlockLen, orders, books, lambda, adaptation)
    }

    pub fn selected_order(&self) -> usize {
        self.orders[self.selected]
    }

    /// `(w̄, ψ)` of the sub-filter at position `idx` of `orders`.
    pub fn extract(&self, idx: usize) -> (CVec, CVec) {
        let w = &self.extremal.w_bar;
        let psi = &self.extremal.psi;
        match self.axis {
            OrderAxis::Rank => {
                let rank = self.orders[idx];
                let q = self.books[idx].block_len();
                (w.rows(0, rank).into_owned(), psi.rows(0, q * rank).into_owned())
            }
            OrderAxis::BlockLen => {
                let q = self.orders[idx];
                let q_max = self.extremal.book.block_len();
                let rank = w.len();
                let sub = CVec::from_fn(q * rank, |i, _| psi[(i / q) * q_max + i % q]);
                (w.clone(), sub)
            }
        }
    }

    fn sub_decision(&self, idx: usize, r: &CVec, d: Complex64) -> BranchDecision {
        let (w, psi) = self.extract(idx);
        let book = &self.books[idx];
        let errors: Vec<Complex64> = (0..book.branches())
            .map(|c| d - inner(&w, &project(book, c, &psi, r)))
            .collect();
        BranchDecision::from_errors(&errors)
    }

    /// Soft output of the selected sub-filter through the branch nearest the
    /// constellation.
    pub fn output(&self, r: &CVec) -> Complex64 {
        let (w, psi) = self.extract(self.selected);
        let book = &self.books[self.selected];
        let outputs: Vec<Complex64> = (0..book.branches())
            .map(|c| inner(&w, &project(book, c, &psi, r)))
            .collect();
        outputs[BranchDecision::blind(&outputs).branch]
    }

    /// Soft output of the selected sub-filter through the branch chosen
    /// against the reference `d`.
    pub fn reference_output(&self, r: &CVec, d: Complex64) -> Complex64 {
        d - self.sub_decision(self.selected, r, d).e
    }

    pub fn step(&mut self, r: &CVec, d: Complex64) -> Result<OrderStep> {
        self.extremal.check_input(r, d)?;
        let prior = self.sub_decision(self.selected, r, d);
        self.extremal.step(r, d)?;
        for idx in 0..self.orders.len() {
            let post = self.sub_decision(idx, r, d).e.norm_sqr();
            self.last_errors[idx] = post;
            self.costs[idx] = self.lambda * self.costs[idx] + post;
        }
        let mut best = 0;
        for (idx, &cost) in self.costs.iter().enumerate() {
            if cost < self.costs[best] {
                best = idx;
            }
        }
        let out = OrderStep {
            e: prior.e,
            branch: prior.branch,
            order: self.orders[best],
        };
        self.selected = best;
        Ok(out)
    }
}
