//! C ABI for the consensus analysis library: opaque network handles created
//! from the JSON network-file format, status codes, and flat result structs.
//!
//! Every function returns a [`PnStatus`]; on failure a thread-local message
//! is retrievable with [`pn_last_error`]. Pointers returned through out
//! parameters are only valid when the call returned `PN_STATUS_OK`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use passinet::digraph;
use passinet::error::Error;
use passinet::gains;
use passinet::netfile::NetworkFile;
use passinet::passify;
use passinet::sim;

/// Status codes mirroring the library's error taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The JSON document could not be parsed.
    ParseError = 3,
    /// Arguments violate a documented precondition.
    InvalidInput = 4,
    /// The agent is not hyper-minimum-phase (assumption A1).
    PassifiabilityViolated = 5,
    /// The digraph has no directed spanning tree (assumption A2).
    TopologyViolated = 6,
    /// An iterative numerical routine failed.
    NumericalFailure = 7,
    /// The simulation hit the state overflow guard.
    Diverged = 8,
    /// The callee panicked; treat the handle as poisoned.
    InternalPanic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(err: &Error) -> PnStatus {
    match err {
        Error::Parse(_) => PnStatus::ParseError,
        Error::Passifiability(_) => PnStatus::PassifiabilityViolated,
        Error::Topology(_) => PnStatus::TopologyViolated,
        Error::Diverged { .. } => PnStatus::Diverged,
        Error::InvalidInput(_) | Error::Dimension(_) | Error::Domain(_) | Error::Bracket(_) => {
            PnStatus::InvalidInput
        }
        _ => PnStatus::NumericalFailure,
    }
}

fn fail(err: Error) -> PnStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn guarded(f: impl FnOnce() -> PnStatus) -> PnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            PnStatus::InternalPanic
        }
    }
}

/// Opaque network handle: parsed network file plus validated agent/graph.
pub struct PnNetwork {
    file: NetworkFile,
    agent: passinet::passify::AgentModel,
    graph: passinet::digraph::WeightedDigraph,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pn_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copy the last error message for this thread into `buf` (truncated to
/// `len - 1` bytes, always NUL-terminated when `len > 0`). Returns the full
/// message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn pn_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parse a JSON network document (see the README for the schema) into an
/// opaque handle. On success `*out` owns the network; release it with
/// [`pn_network_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_network_from_json(
    json: *const c_char,
    out: *mut *mut PnNetwork,
) -> PnStatus {
    if json.is_null() || out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("network JSON is not valid UTF-8");
            return PnStatus::InvalidUtf8;
        }
    };
    guarded(|| {
        let file = match NetworkFile::parse_str(text) {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        let agent = match file.agent_model() {
            Ok(a) => a,
            Err(e) => return fail(e),
        };
        let graph = match file.digraph() {
            Ok(g) => g,
            Err(e) => return fail(e),
        };
        *out = Box::into_raw(Box::new(PnNetwork { file, agent, graph }));
        PnStatus::Ok
    })
}

/// Release a handle created by [`pn_network_from_json`]. Null is ignored.
///
/// # Safety
/// `net` must be null or a pointer previously returned by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pn_network_free(net: *mut PnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of agents (vertices) in the network.
///
/// # Safety
/// `net` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_network_agent_count(
    net: *const PnNetwork,
    out: *mut usize,
) -> PnStatus {
    if net.is_null() || out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    *out = (*net).graph.n();
    PnStatus::Ok
}

/// Flat analysis summary. `sufficient_gain` is NaN when either assumption
/// fails; `spectral_gap` is NaN when the spectrum has no nonzero eigenvalue.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PnAnalysis {
    /// Assumption A1: the agent is hyper-minimum-phase (0/1).
    pub is_hmp: i32,
    /// Assumption A2: the digraph has a directed spanning tree (0/1).
    pub has_spanning_tree: i32,
    /// Multiplicity of the zero Laplace eigenvalue.
    pub zero_multiplicity: usize,
    /// Passification constant kappa_0 (NaN when A1 fails).
    pub kappa0: f64,
    /// kappa_0 was clamped to zero: the agent is already strictly passive (0/1).
    pub already_passive: i32,
    /// r(L): minimum real part over nonzero Laplace eigenvalues.
    pub spectral_gap: f64,
    /// Sufficient identical gain threshold kappa_0 / r(L).
    pub sufficient_gain: f64,
}

/// Passifiability and spectral analysis of the network.
///
/// # Safety
/// `net` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_analyze(net: *const PnNetwork, out: *mut PnAnalysis) -> PnStatus {
    if net.is_null() || out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    let net = &*net;
    guarded(|| {
        let pass = match passify::passify_report(&net.agent) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let rep = match digraph::spectrum_report(&net.graph, None) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let sufficient = match (pass.kappa0, rep.r, rep.has_spanning_tree) {
            (Some(k0), Some(r), true) => k0 / r,
            _ => f64::NAN,
        };
        *out = PnAnalysis {
            is_hmp: pass.is_hmp as i32,
            has_spanning_tree: rep.has_spanning_tree as i32,
            zero_multiplicity: rep.zero_multiplicity,
            kappa0: pass.kappa0.unwrap_or(f64::NAN),
            already_passive: pass.already_passive as i32,
            spectral_gap: rep.r.unwrap_or(f64::NAN),
            sufficient_gain: sufficient,
        };
        PnStatus::Ok
    })
}

/// Exact identical-gain threshold located by bisection of the spectral test
/// inside [k_lo, k_hi].
///
/// # Safety
/// `net` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_exact_threshold(
    net: *const PnNetwork,
    k_lo: f64,
    k_hi: f64,
    out: *mut f64,
) -> PnStatus {
    if net.is_null() || out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    let net = &*net;
    guarded(|| match gains::threshold_bisection(&net.agent, &net.graph, k_lo, k_hi) {
        Ok(k) => {
            *out = k;
            PnStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Exact gain threshold for a directed cycle of N double integrators:
/// 0.5 * cot^2(pi / N).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_cycle_threshold(n: usize, out: *mut f64) -> PnStatus {
    if out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    match gains::cycle_threshold(n) {
        Ok(k) => {
            *out = k;
            PnStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Exact double-integrator threshold max sin^2(arg lambda) / Re lambda over
/// a spectrum given as parallel re/im arrays of length `len`.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pn_general_threshold(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut f64,
) -> PnStatus {
    if (re.is_null() || im.is_null()) && len > 0 {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    if out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    let spectrum: Vec<passinet::linalg::Complex64> = (0..len)
        .map(|i| passinet::linalg::Complex64::new(*re.add(i), *im.add(i)))
        .collect();
    match gains::general_threshold(&spectrum) {
        Ok(k) => {
            *out = k;
            PnStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Flat simulation summary. `final_error_to_c` is NaN when the consensus
/// vector is unavailable.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PnSimSummary {
    /// Terminal disagreement fell below the tolerance (0/1).
    pub converged: i32,
    /// e(t_end).
    pub final_disagreement: f64,
    /// max_i ||x_i(t_end) - c(t_end)||_2.
    pub final_error_to_c: f64,
}

/// Integrate the closed loop. Non-positive `t_end` / `dt` fall back to the
/// file's values (or the defaults 25 s / 1e-3 s); `seed` feeds the initial
/// state draw when the file has no x0 block. Requires a gains block.
///
/// # Safety
/// `net` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_simulate(
    net: *const PnNetwork,
    t_end: f64,
    dt: f64,
    seed: u64,
    out: *mut PnSimSummary,
) -> PnStatus {
    if net.is_null() || out.is_null() {
        set_error("null argument");
        return PnStatus::NullArgument;
    }
    let net = &*net;
    guarded(|| {
        let (spec, mut opts) = match net.file.resolve(None, seed) {
            Ok(pair) => pair,
            Err(e) => return fail(e),
        };
        if t_end > 0.0 {
            opts.t_end = t_end;
        }
        if dt > 0.0 {
            opts.dt = dt;
        }
        match sim::simulate(&spec, &opts) {
            Ok(trace) => {
                *out = PnSimSummary {
                    converged: trace.converged as i32,
                    final_disagreement: *trace.e.last().unwrap(),
                    final_error_to_c: trace.final_error_to_c.unwrap_or(f64::NAN),
                };
                PnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
