//! Minimal safe wrapper over the HiGHS C API.

use std::ffi::CString;
use std::os::raw::c_void;
use std::path::Path;

use highs_sys::*;

use super::SolveError;
use crate::lp::{RowSense, SparseLP, VarBound};
use crate::rational::q_to_f64;

pub(crate) struct FloatSolution {
    pub objective: f64,
    pub col_values: Vec<f64>,
    pub col_basic: Vec<bool>,
    pub row_basic: Vec<bool>,
    pub iterations: usize,
}

struct Handle(*mut c_void);

impl Handle {
    fn new() -> Handle {
        // SAFETY: Highs_create has no preconditions and returns an owned handle.
        let ptr = unsafe { Highs_create() };
        assert!(!ptr.is_null(), "Highs_create returned null");
        let h = Handle(ptr);
        h.set_bool("output_flag", false);
        h
    }

    fn set_bool(&self, name: &str, value: bool) {
        let name = CString::new(name).expect("option name");
        // SAFETY: valid handle and NUL-terminated option name.
        unsafe { Highs_setBoolOptionValue(self.0, name.as_ptr(), value as HighsInt) };
    }

    fn set_double(&self, name: &str, value: f64) {
        let name = CString::new(name).expect("option name");
        // SAFETY: valid handle and NUL-terminated option name.
        unsafe { Highs_setDoubleOptionValue(self.0, name.as_ptr(), value) };
    }

    fn set_string(&self, name: &str, value: &str) {
        let name = CString::new(name).expect("option name");
        let value = CString::new(value).expect("option value");
        // SAFETY: valid handle and NUL-terminated strings.
        unsafe { Highs_setStringOptionValue(self.0, name.as_ptr(), value.as_ptr()) };
    }

    fn run(&self) -> Result<(), SolveError> {
        // SAFETY: valid handle with a model loaded.
        unsafe { Highs_run(self.0) };
        let status = unsafe { Highs_getModelStatus(self.0) };
        match status {
            s if s == kHighsModelStatusOptimal => Ok(()),
            s if s == kHighsModelStatusInfeasible => Err(SolveError::Infeasible),
            s if s == kHighsModelStatusUnbounded || s == kHighsModelStatusUnboundedOrInfeasible => Err(SolveError::Unbounded),
            s => Err(SolveError::NumericalBreakdown(format!("HiGHS stopped with model status {s}"))),
        }
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        // SAFETY: the handle came from Highs_create and is dropped once.
        unsafe { Highs_destroy(self.0) };
    }
}

/// Solves `lp` in double precision, by dual simplex for small models and by
/// interior point plus crossover for large ones.
pub(crate) fn solve_float(lp: &SparseLP) -> Result<FloatSolution, SolveError> {
    let (n, m) = (lp.cols(), lp.rows());
    let inf = f64::INFINITY;
    let cost: Vec<f64> = lp.objective.iter().map(q_to_f64).collect();
    let lower: Vec<f64> = lp.bounds.iter().map(|b| if *b == VarBound::Free { -inf } else { 0.0 }).collect();
    let upper = vec![inf; n];
    let (mut row_lo, mut row_hi) = (Vec::with_capacity(m), Vec::with_capacity(m));
    for (s, r) in lp.senses.iter().zip(&lp.rhs) {
        let r = q_to_f64(r);
        let (lo, hi) = match s {
            RowSense::Le => (-inf, r),
            RowSense::Eq => (r, r),
            RowSense::Ge => (r, inf),
        };
        row_lo.push(lo);
        row_hi.push(hi);
    }
    let columns = lp.columns();
    let mut start: Vec<HighsInt> = Vec::with_capacity(n + 1);
    let mut index: Vec<HighsInt> = Vec::with_capacity(lp.triplets.len());
    let mut value: Vec<f64> = Vec::with_capacity(lp.triplets.len());
    for col in &columns {
        start.push(index.len() as HighsInt);
        for (r, v) in col {
            index.push(*r as HighsInt);
            value.push(q_to_f64(v));
        }
    }
    start.push(index.len() as HighsInt);

    let h = Handle::new();
    // Interior point with crossover is an order of magnitude faster on the
    // large saddle-point LPs and still ends on a basis.
    let method = if index.len() > super::EXACT_NNZ_LIMIT { "ipm" } else { "simplex" };
    h.set_string("solver", method);
    h.set_double("primal_feasibility_tolerance", 1e-9);
    h.set_double("dual_feasibility_tolerance", 1e-9);
    // SAFETY: every array has the length HiGHS expects for a column-wise
    // model with `n` columns, `m` rows and `index.len()` nonzeros.
    let status = unsafe {
        Highs_passLp(
            h.0,
            n as HighsInt,
            m as HighsInt,
            index.len() as HighsInt,
            kHighsMatrixFormatColwise,
            kHighsObjSenseMaximize,
            0.0,
            cost.as_ptr(),
            lower.as_ptr(),
            upper.as_ptr(),
            row_lo.as_ptr(),
            row_hi.as_ptr(),
            start.as_ptr(),
            index.as_ptr(),
            value.as_ptr(),
        )
    };
    if status < 0 {
        return Err(SolveError::NumericalBreakdown("HiGHS rejected the model".into()));
    }
    h.run()?;

    let mut col_values = vec![0.0; n];
    let mut col_dual = vec![0.0; n];
    let mut row_values = vec![0.0; m];
    let mut row_dual = vec![0.0; m];
    let mut col_status: Vec<HighsInt> = vec![0; n];
    let mut row_status: Vec<HighsInt> = vec![0; m];
    // SAFETY: output buffers sized to the model dimensions.
    let objective = unsafe {
        Highs_getSolution(h.0, col_values.as_mut_ptr(), col_dual.as_mut_ptr(), row_values.as_mut_ptr(), row_dual.as_mut_ptr());
        Highs_getBasis(h.0, col_status.as_mut_ptr(), row_status.as_mut_ptr());
        Highs_getObjectiveValue(h.0)
    };
    // SAFETY: valid handle after a successful run.
    let iterations = unsafe { Highs_getSimplexIterationCount(h.0) }.max(0) as usize;
    Ok(FloatSolution {
        objective,
        col_values,
        col_basic: col_status.iter().map(|&s| s == kHighsBasisStatusBasic).collect(),
        row_basic: row_status.iter().map(|&s| s == kHighsBasisStatusBasic).collect(),
        iterations,
    })
}

/// Reads an LP or MPS file with HiGHS's own parser and returns the optimal
/// objective value.
pub fn solve_model_file(path: &Path) -> Result<f64, SolveError> {
    let h = Handle::new();
    let c = CString::new(path.to_string_lossy().as_bytes()).map_err(|_| SolveError::NumericalBreakdown("path contains NUL".into()))?;
    // SAFETY: valid handle and NUL-terminated path.
    let status = unsafe { Highs_readModel(h.0, c.as_ptr()) };
    if status < 0 {
        return Err(SolveError::NumericalBreakdown(format!("HiGHS could not read {}", path.display())));
    }
    h.run()?;
    // SAFETY: valid handle after a successful run.
    Ok(unsafe { Highs_getObjectiveValue(h.0) })
}
