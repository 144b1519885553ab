//! C ABI over the netobs library.
//!
//! Conventions: every fallible call returns a NetobsStatus and writes its
//! result through out-pointers only on NETOBS_STATUS_OK. On failure,
//! netobs_last_error() returns a thread-local message that stays valid
//! until the next failing call on the same thread. Graph handles are
//! opaque; free them exactly once with netobs_graph_free.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};

use netobs::city::{CityProfile, CitySource, LnoFit};
use netobs::exact;
use netobs::generators::{self, Family};
use netobs::graph::Graph;
use netobs::mc::{self, MetricLevel, MetricTarget, ObservationScope};
use netobs::Error;

/// Result code for every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NetobsStatus {
    Ok = 0,
    InvalidInput = 1,
    Undefined = 2,
    Budget = 3,
    Io = 4,
    NullArgument = 5,
    Panic = 6,
}

/// What is being observed.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NetobsTarget {
    Edge = 0,
    Node = 1,
}

/// Whole-graph average or per-node average.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NetobsLevel {
    Global = 0,
    Local = 1,
}

/// Synthetic graph family for netobs_graph_generate.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NetobsFamily {
    Complete = 0,
    ErdosRenyi = 1,
    BarabasiAlbert = 2,
    WattsStrogatz = 3,
}

/// Opaque graph handle.
pub struct NetobsGraph(Graph);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes stripped");
    });
}

fn status_of(err: &Error) -> NetobsStatus {
    match err {
        Error::InvalidInput(_) => NetobsStatus::InvalidInput,
        Error::Undefined(_) => NetobsStatus::Undefined,
        Error::Budget(_) => NetobsStatus::Budget,
        Error::Io(_) => NetobsStatus::Io,
    }
}

fn fail(err: Error) -> NetobsStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn null_arg(name: &str) -> NetobsStatus {
    set_error(&format!("{name} must not be null"));
    NetobsStatus::NullArgument
}

/// Runs a body that returns a status, converting panics into NETOBS_STATUS_PANIC.
fn guarded(body: impl FnOnce() -> NetobsStatus) -> NetobsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            NetobsStatus::Panic
        }
    }
}

fn scope_of(target: NetobsTarget, level: NetobsLevel, hops: u32) -> Result<ObservationScope, Error> {
    let target = match target {
        NetobsTarget::Edge => MetricTarget::Edge,
        NetobsTarget::Node => MetricTarget::Node,
    };
    let level = match level {
        NetobsLevel::Global => MetricLevel::Global,
        NetobsLevel::Local => MetricLevel::Local,
    };
    ObservationScope::new(target, level, hops as usize)
}

/// Message for the most recent failure on this thread. Never null; empty
/// before the first failure. Owned by the library, do not free.
#[no_mangle]
pub extern "C" fn netobs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Reads an edge-list file (`u v` per line, `#` comments, optional `# n=`
/// directive) into a new graph handle.
/// # Safety
/// `path` must point to a NUL-terminated string; `out` must be a valid
/// pointer. The returned handle must be released with netobs_graph_free.
#[no_mangle]
pub unsafe extern "C" fn netobs_graph_read_file(
    path: *const c_char,
    out: *mut *mut NetobsGraph,
) -> NetobsStatus {
    guarded(|| {
        if path.is_null() {
            return null_arg("path");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(_) => return fail(Error::input("path is not valid UTF-8")),
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) => return fail(Error::Io(e)),
        };
        match Graph::read_edge_list(BufReader::new(file)) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(NetobsGraph(graph)));
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Generates a synthetic graph at a target density (parameters are chosen
/// the same way as the CLI's `generate --density`).
/// # Safety
/// `out` must be a valid pointer. The returned handle must be released
/// with netobs_graph_free.
#[no_mangle]
pub unsafe extern "C" fn netobs_graph_generate(
    family: NetobsFamily,
    n: usize,
    density: f64,
    seed: u64,
    out: *mut *mut NetobsGraph,
) -> NetobsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let family = match family {
            NetobsFamily::Complete => Family::Complete,
            NetobsFamily::ErdosRenyi => Family::Er,
            NetobsFamily::BarabasiAlbert => Family::Ba,
            NetobsFamily::WattsStrogatz => Family::Ws,
        };
        let spec = match generators::params_for_density(family, n, density) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match spec.generate(seed) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(NetobsGraph(graph)));
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Frees a graph handle. Null is a no-op.
/// # Safety
/// `graph` must be a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn netobs_graph_free(graph: *mut NetobsGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count, or 0 for a null handle.
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn netobs_graph_node_count(graph: *const NetobsGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    (*graph).0.node_count()
}

/// Edge count, or 0 for a null handle.
/// # Safety
/// `graph` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn netobs_graph_edge_count(graph: *const NetobsGraph) -> usize {
    if graph.is_null() {
        return 0;
    }
    (*graph).0.edge_count()
}

/// Edge density 2|E|/(n(n-1)); NETOBS_STATUS_UNDEFINED when n < 2.
/// # Safety
/// `graph` must be null or a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn netobs_graph_density(
    graph: *const NetobsGraph,
    out: *mut f64,
) -> NetobsStatus {
    guarded(|| {
        if graph.is_null() {
            return null_arg("graph");
        }
        if out.is_null() {
            return null_arg("out");
        }
        match (*graph).0.density() {
            Ok(v) => {
                *out = v;
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exact 1-hop observability for n_c uniformly compromised nodes.
/// Local metrics are undefined at n_c = n.
/// # Safety
/// `graph` must be null or a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn netobs_exact_observability(
    graph: *const NetobsGraph,
    target: NetobsTarget,
    level: NetobsLevel,
    n_c: usize,
    out: *mut f64,
) -> NetobsStatus {
    guarded(|| {
        if graph.is_null() {
            return null_arg("graph");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let g = &(*graph).0;
        let result = match (target, level) {
            (NetobsTarget::Edge, NetobsLevel::Global) => {
                exact::global_edge_observability(g.node_count(), n_c)
            }
            (NetobsTarget::Edge, NetobsLevel::Local) => {
                exact::local_edge_observability(g.node_count(), n_c)
            }
            (NetobsTarget::Node, NetobsLevel::Global) => exact::global_node_observability(g, n_c),
            (NetobsTarget::Node, NetobsLevel::Local) => exact::local_node_observability(g, n_c),
        };
        match result {
            Ok(r) => {
                *out = r.value;
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Monte-Carlo estimate of a k-hop metric over `trials` uniform compromised
/// sets of size n_c. Writes the mean and the standard error of the mean.
/// # Safety
/// `graph` must be null or a live handle; `out_mean` and `out_stderr`
/// must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn netobs_mc_estimate(
    graph: *const NetobsGraph,
    target: NetobsTarget,
    level: NetobsLevel,
    hops: u32,
    n_c: usize,
    trials: usize,
    seed: u64,
    out_mean: *mut f64,
    out_stderr: *mut f64,
) -> NetobsStatus {
    guarded(|| {
        if graph.is_null() {
            return null_arg("graph");
        }
        if out_mean.is_null() {
            return null_arg("out_mean");
        }
        if out_stderr.is_null() {
            return null_arg("out_stderr");
        }
        let scope = match scope_of(target, level, hops) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match mc::estimate(&(*graph).0, scope, n_c, trials, seed) {
            Ok(est) => {
                *out_mean = est.mean;
                *out_stderr = est.stderr;
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Fitted local node-observability for a density of compromised devices
/// per square kilometer (default fit, clamped to [0, 1]).
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn netobs_lno_approx(
    compromised_per_km2: f64,
    out: *mut f64,
) -> NetobsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        match netobs::city::lno_approx(compromised_per_km2) {
            Ok(v) => {
                *out = v;
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// City-scale estimate under the exponential block-density model: a city of
/// `population` people over `area_km2`, fraction `x` of devices compromised.
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn netobs_city_exponential(
    population: f64,
    area_km2: f64,
    x: f64,
    samples: usize,
    seed: u64,
    out: *mut f64,
) -> NetobsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let profile = match CityProfile::new(population, area_km2) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let source = CitySource::Exponential {
            profile,
            samples,
            seed,
        };
        match source.estimate(x, &LnoFit::default()) {
            Ok(v) => {
                *out = v;
                NetobsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
