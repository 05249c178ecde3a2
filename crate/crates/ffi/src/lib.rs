//! C interface to `madbound`.
//!
//! Objects cross the boundary as opaque handles created by a `*_new`
//! function and released by the matching `*_free`. Every fallible function
//! returns a [`MadStatus`] and writes results through out-pointers; on
//! failure [`mad_last_error_message`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use madbound::newsvendor::{order_interval_beta, order_interval_mad, NewsvendorInput};
use madbound::stoploss::{reinsurer_benefit_bound, retention_bound, Layer};
use madbound::tail_bounds::{self, BoundCurve, BoundKind, DiscreteDistribution, Mode};
use madbound::{AmbiguitySet, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MadStatus {
    Ok = 0,
    InvalidSet = 1,
    OutOfRange = 2,
    InvalidInput = 3,
    Numerical = 4,
    Infeasible = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MadMode {
    Sup = 0,
    Inf = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MadCurveKind {
    Sup = 0,
    Inf = 1,
    SupBeta = 2,
    InfBeta = 3,
    Cantelli = 4,
}

/// Ambiguity set handle.
pub struct MadSet(AmbiguitySet);

/// Extremal distribution handle.
pub struct MadDistribution(DiscreteDistribution);

/// Sampled bound curve handle.
pub struct MadCurve(BoundCurve);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MadStatus {
    match e {
        Error::InvalidSet(_) => MadStatus::InvalidSet,
        Error::OutOfRange { .. } => MadStatus::OutOfRange,
        Error::InvalidInput(_) => MadStatus::InvalidInput,
        Error::SqrtDomain(_) | Error::Numerical(_) => MadStatus::Numerical,
        Error::Infeasible(_) => MadStatus::Infeasible,
    }
}

/// Run `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), MadStatus>) -> MadStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MadStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            MadStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, MadStatus>;
}

impl<T> OrStatus<T> for madbound::Result<T> {
    fn or_status(self) -> Result<T, MadStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, MadStatus> {
    p.as_ref().ok_or_else(|| {
        set_error(format!("{name} is null"));
        MadStatus::NullPointer
    })
}

unsafe fn write<T>(p: *mut T, value: T, name: &str) -> Result<(), MadStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(MadStatus::NullPointer);
    }
    p.write(value);
    Ok(())
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mad_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create a mean-MAD set on `[a, b]`.
///
/// # Safety
/// `out` must be null or point to writable storage for a pointer.
#[no_mangle]
pub unsafe extern "C" fn mad_set_new(a: f64, b: f64, mu: f64, d: f64, out: *mut *mut MadSet) -> MadStatus {
    guard(|| {
        let set = AmbiguitySet::new(a, b, mu, d).or_status()?;
        write(out, Box::into_raw(Box::new(MadSet(set))), "out")
    })
}

/// Create a set that also fixes `beta = P(X >= mu)`.
///
/// # Safety
/// `out` must be null or point to writable storage for a pointer.
#[no_mangle]
pub unsafe extern "C" fn mad_set_new_beta(
    a: f64,
    b: f64,
    mu: f64,
    d: f64,
    beta: f64,
    out: *mut *mut MadSet,
) -> MadStatus {
    guard(|| {
        let set = AmbiguitySet::with_beta(a, b, mu, d, beta).or_status()?;
        write(out, Box::into_raw(Box::new(MadSet(set))), "out")
    })
}

/// Release a set. Null is ignored.
///
/// # Safety
/// `set` must be null or come from `mad_set_new*` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mad_set_free(set: *mut MadSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Largest MAD compatible with the set's support and mean.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_set_d_max(set: *const MadSet, out: *mut f64) -> MadStatus {
    guard(|| write(out, deref(set, "set")?.0.d_max(), "out"))
}

/// Knots `tau1 <= mu <= tau2` of the plain bounds.
///
/// # Safety
/// `set` must be a live handle or null; out-pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_knots(set: *const MadSet, tau1: *mut f64, tau2: *mut f64) -> MadStatus {
    guard(|| {
        let k = tail_bounds::mad_knots(&deref(set, "set")?.0).or_status()?;
        write(tau1, k.tau1, "tau1")?;
        write(tau2, k.tau2, "tau2")
    })
}

unsafe fn tail(
    set: *const MadSet,
    out: *mut f64,
    f: impl FnOnce(&AmbiguitySet) -> madbound::Result<tail_bounds::BoundValue>,
) -> MadStatus {
    guard(|| {
        let v = f(&deref(set, "set")?.0).or_status()?;
        write(out, v.value, "out")
    })
}

/// Largest `P(X >= t)` over the set.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_sup_tail(set: *const MadSet, t: f64, out: *mut f64) -> MadStatus {
    tail(set, out, |s| tail_bounds::sup_tail(s, t))
}

/// Smallest `P(X > t)` over the set.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_inf_tail(set: *const MadSet, t: f64, out: *mut f64) -> MadStatus {
    tail(set, out, |s| tail_bounds::inf_tail(s, t))
}

/// Largest `P(X >= t)` given `beta`; the set must carry one.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_sup_tail_beta(set: *const MadSet, t: f64, out: *mut f64) -> MadStatus {
    tail(set, out, |s| tail_bounds::sup_tail_beta(s, t))
}

/// Smallest `P(X > t)` given `beta`; the set must carry one.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_inf_tail_beta(set: *const MadSet, t: f64, out: *mut f64) -> MadStatus {
    tail(set, out, |s| tail_bounds::inf_tail_beta(s, t))
}

/// Member of the set attaining the bound at `t`.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_worst_case_new(
    set: *const MadSet,
    t: f64,
    mode: MadMode,
    out: *mut *mut MadDistribution,
) -> MadStatus {
    guard(|| {
        let mode = match mode {
            MadMode::Sup => Mode::Sup,
            MadMode::Inf => Mode::Inf,
        };
        let dist = tail_bounds::worst_case_distribution(&deref(set, "set")?.0, t, mode).or_status()?;
        write(out, Box::into_raw(Box::new(MadDistribution(dist))), "out")
    })
}

/// Number of atoms.
///
/// # Safety
/// `dist` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_distribution_len(dist: *const MadDistribution, out: *mut usize) -> MadStatus {
    guard(|| write(out, deref(dist, "dist")?.0.atoms.len(), "out"))
}

/// Location and probability of atom `i`, in increasing order of location.
///
/// # Safety
/// `dist` must be a live handle or null; out-pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_distribution_atom(
    dist: *const MadDistribution,
    i: usize,
    x: *mut f64,
    p: *mut f64,
) -> MadStatus {
    guard(|| {
        let atoms = &deref(dist, "dist")?.0.atoms;
        let atom = atoms.get(i).ok_or_else(|| {
            set_error(format!("atom index {i} out of range for {} atoms", atoms.len()));
            MadStatus::OutOfRange
        })?;
        write(x, atom.x, "x")?;
        write(p, atom.p, "p")
    })
}

/// Release a distribution. Null is ignored.
///
/// # Safety
/// `dist` must be null or come from `mad_worst_case_new` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mad_distribution_free(dist: *mut MadDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Evaluate a bound at `n >= 2` evenly spaced thresholds from `t_min` to
/// `t_max`. `sigma` is read only by the Cantelli kind.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_curve_new(
    set: *const MadSet,
    kind: MadCurveKind,
    sigma: f64,
    t_min: f64,
    t_max: f64,
    n: usize,
    out: *mut *mut MadCurve,
) -> MadStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let kind = match kind {
            MadCurveKind::Sup => BoundKind::Sup,
            MadCurveKind::Inf => BoundKind::Inf,
            MadCurveKind::SupBeta => BoundKind::SupBeta,
            MadCurveKind::InfBeta => BoundKind::InfBeta,
            MadCurveKind::Cantelli => BoundKind::Cantelli { sigma },
        };
        if n < 2 {
            set_error(format!("curve needs at least 2 points, got {n}"));
            return Err(MadStatus::InvalidInput);
        }
        let grid = tail_bounds::linspace(t_min, t_max, n);
        let curve = tail_bounds::curve(kind, set, &grid).or_status()?;
        write(out, Box::into_raw(Box::new(MadCurve(curve))), "out")
    })
}

/// Number of points.
///
/// # Safety
/// `curve` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_curve_len(curve: *const MadCurve, out: *mut usize) -> MadStatus {
    guard(|| write(out, deref(curve, "curve")?.0.points.len(), "out"))
}

/// Threshold and bound value of point `i`.
///
/// # Safety
/// `curve` must be a live handle or null; out-pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_curve_point(curve: *const MadCurve, i: usize, t: *mut f64, value: *mut f64) -> MadStatus {
    guard(|| {
        let pts = &deref(curve, "curve")?.0.points;
        let pt = pts.get(i).ok_or_else(|| {
            set_error(format!("point index {i} out of range for {} points", pts.len()));
            MadStatus::OutOfRange
        })?;
        write(t, pt.t, "t")?;
        write(value, pt.value, "value")
    })
}

/// Release a curve. Null is ignored.
///
/// # Safety
/// `curve` must be null or come from `mad_curve_new` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mad_curve_free(curve: *mut MadCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Interval containing the optimal order quantity at critical ratio `eta`.
/// With `use_beta` the set's `beta` is used as well.
///
/// # Safety
/// `set` must be a live handle or null; out-pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_newsvendor_interval(
    set: *const MadSet,
    eta: f64,
    use_beta: bool,
    lo: *mut f64,
    hi: *mut f64,
) -> MadStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let input = NewsvendorInput::new(set, eta).or_status()?;
        let q = if use_beta { order_interval_beta(&input) } else { order_interval_mad(&input) }.or_status()?;
        write(lo, q.lo, "lo")?;
        write(hi, q.hi, "hi")
    })
}

/// Maxmin price and its worst-case revenue; the set must start at 0.
///
/// # Safety
/// `set` must be a live handle or null; out-pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_optimal_price(set: *const MadSet, price: *mut f64, profit: *mut f64) -> MadStatus {
    guard(|| {
        let s = madbound::pricing::optimal_price(&deref(set, "set")?.0).or_status()?;
        write(price, s.r_star, "price")?;
        write(profit, s.profit, "profit")
    })
}

/// Upper bound on the insurer's expected payment `E[min(X, z)]`.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_retention_bound(set: *const MadSet, z: f64, out: *mut f64) -> MadStatus {
    guard(|| write(out, retention_bound(&deref(set, "set")?.0, z).or_status()?, "out"))
}

/// Upper bound on the reinsurer's payment `E[min((X - z)+, cap)]`. A NaN or
/// infinite `cap` means no cap.
///
/// # Safety
/// `set` must be a live handle or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_layer_bound(set: *const MadSet, z: f64, cap: f64, out: *mut f64) -> MadStatus {
    guard(|| {
        let cap = (cap.is_finite()).then_some(cap);
        let layer = Layer::new(z, cap).or_status()?;
        write(out, reinsurer_benefit_bound(&deref(set, "set")?.0, layer).or_status()?, "out")
    })
}

/// Safety margin `kappa = min(u, d / (2 eps))` for noise on `[-1, u]`.
///
/// # Safety
/// `out` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn mad_chance_kappa(u: f64, d: f64, eps: f64, out: *mut f64) -> MadStatus {
    guard(|| {
        let noise = madbound::chance::NoiseSet::new(u, d).or_status()?;
        let k = madbound::chance::reform_rhs_asym(&noise, eps).or_status()?;
        write(out, k.kappa, "out")
    })
}
