//! Sensitivity of the TEME state to the seven mean elements.
//!
//! Forward mode: each element is seeded as one tangent direction of a
//! [`Dual<7>`] and carried through initialization and propagation, so the
//! element-dependent init constants are differentiated as well. Branch
//! selects keep the tangent of the selected side. The Kepler iteration is
//! differentiated as executed.

use std::ops::Range;

use crate::batch::partition_work;
use crate::dual::Dual;
use crate::elements::{Elements, MeanElements};
use crate::gravity::GravityModel;
use crate::kernel::{sgp4_init, sgp4_propagate, Branches, ErrorCode, StateVector};

pub const STATE_LABELS: [&str; 6] = ["rx", "ry", "rz", "vx", "vy", "vz"];
pub const ELEMENT_LABELS: [&str; 7] = ["no_kozai", "ecco", "inclo", "nodeo", "argpo", "mo", "bstar"];

/// Smallest finite-difference step per element, in element units. The drag
/// term is tiny by construction and its column is small at short times, so a
/// 1e-9 step there leaves the difference dominated by rounding.
pub const FD_ABS_FLOOR: [f64; 7] = [1e-9, 1e-9, 1e-9, 1e-9, 1e-9, 1e-9, 1e-7];

/// ∂(r, v)/∂(no_kozai, ecco, inclo, nodeo, argpo, mo, bstar).
/// Rows are km or km/s; columns are per rad/min, per unit, per radian (×4),
/// and per inverse Earth radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateJacobian {
    pub matrix: [[f64; 7]; 6],
    pub state: [f64; 6],
    pub error_code: ErrorCode,
}

impl StateJacobian {
    /// Finite only when propagation succeeded.
    pub fn is_valid(&self) -> bool {
        self.error_code.is_ok()
    }

    pub fn column(&self, j: usize) -> [f64; 6] {
        std::array::from_fn(|i| self.matrix[i][j])
    }
}

pub fn jacobian_state_wrt_elements(elems: &MeanElements, grav: &GravityModel, tsince_min: f64) -> StateJacobian {
    let seeded: [Dual<7>; 7] = std::array::from_fn(|k| Dual::variable(elems.kernel_array()[k], k));
    let sat = sgp4_init(&Elements::from_array(seeded), grav);
    let out: StateVector<Dual<7>> = sgp4_propagate(&sat, Dual::constant(tsince_min));
    let comps = out.components();
    StateJacobian {
        matrix: std::array::from_fn(|i| comps[i].tangents),
        state: comps.map(|d| d.value),
        error_code: out.error_code,
    }
}

/// `‖a[:, j] − b[:, j]‖₂ / ‖b[:, j]‖₂` for each column `j`. Zero when both
/// columns vanish. Entries whose exact derivative is zero (∂rz/∂node, the
/// drag column at epoch) make an entrywise ratio meaningless, so the error
/// is measured against the column's scale.
pub fn column_relative_error(a: &StateJacobian, b: &StateJacobian) -> [f64; 7] {
    std::array::from_fn(|j| {
        let (mut diff, mut norm) = (0.0, 0.0);
        for i in 0..6 {
            diff += (a.matrix[i][j] - b.matrix[i][j]).powi(2);
            norm += b.matrix[i][j].powi(2);
        }
        match (diff == 0.0, norm == 0.0) {
            (true, _) => 0.0,
            (false, true) => f64::INFINITY,
            (false, false) => (diff / norm).sqrt(),
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepUnderflow {
    pub element: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDifference {
    pub jacobian: StateJacobian,
    pub steps: [f64; 7],
    /// Elements whose magnitude is below [`FD_ABS_FLOOR`], so the step is
    /// the floor alone and carries no relative scale.
    pub underflow: Vec<StepUnderflow>,
    /// Elements whose stencil `x ± h` lands on a different side of an init
    /// guard than `x`. Those columns difference across a discontinuity.
    pub straddled: Vec<usize>,
}

fn state_at(elems: &MeanElements, grav: &GravityModel, t: f64) -> (Branches, StateVector<f64>) {
    let sat = sgp4_init(&elems.to_kernel::<f64>(), grav);
    (sat.branches, sgp4_propagate(&sat, t))
}

/// Central differences with step `h_k = max(rel_step·|x_k|, floor_k)`.
pub fn finite_difference_jacobian(
    elems: &MeanElements,
    grav: &GravityModel,
    tsince_min: f64,
    rel_step: f64,
) -> FiniteDifference {
    let x = elems.kernel_array();
    let (base_branches, base) = state_at(elems, grav, tsince_min);
    let mut matrix = [[0.0; 7]; 6];
    let mut steps = [0.0; 7];
    let mut underflow = Vec::new();
    let mut straddled = Vec::new();
    let mut error_code = base.error_code;
    for k in 0..7 {
        let h = (rel_step * x[k].abs()).max(FD_ABS_FLOOR[k]);
        if x[k].abs() < FD_ABS_FLOOR[k] {
            underflow.push(StepUnderflow { element: k });
        }
        let (mut up, mut down) = (x, x);
        up[k] += h;
        down[k] -= h;
        let h2 = up[k] - down[k];
        steps[k] = h2 / 2.0;
        let (bp, plus) = state_at(&elems.with_kernel_array(up), grav, tsince_min);
        let (bm, minus) = state_at(&elems.with_kernel_array(down), grav, tsince_min);
        if bp != base_branches || bm != base_branches {
            straddled.push(k);
        }
        if !plus.error_code.is_ok() {
            error_code = plus.error_code;
        }
        if !minus.error_code.is_ok() {
            error_code = minus.error_code;
        }
        let (p, m) = (plus.components(), minus.components());
        for i in 0..6 {
            matrix[i][k] = (p[i] - m[i]) / h2;
        }
    }
    FiniteDifference {
        jacobian: StateJacobian {
            matrix,
            state: base.components(),
            error_code,
        },
        steps,
        underflow,
        straddled,
    }
}

/// Scalar Jacobians for many satellites, split over `workers` threads.
/// Entry `i` equals `jacobian_state_wrt_elements(&elems[i], ..)` exactly.
pub fn batch_jacobians(
    elems: &[MeanElements],
    grav: &GravityModel,
    tsince_min: f64,
    workers: usize,
) -> Vec<StateJacobian> {
    let run = |r: Range<usize>| -> Vec<StateJacobian> {
        elems[r]
            .iter()
            .map(|e| jacobian_state_wrt_elements(e, grav, tsince_min))
            .collect()
    };
    let ranges = partition_work(elems.len(), 1, workers);
    if ranges.len() <= 1 {
        return run(0..elems.len());
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges.into_iter().map(|r| scope.spawn(move || run(r))).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("jacobian worker panicked"))
            .collect()
    })
}
