//! C ABI for slicecount.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns an [`ScStatus`];
//! the message of the last failure on the calling thread is available from
//! [`sc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use slicecount::digraph::{Digraph, WeightSemigroup};
use slicecount::error::Error;
use slicecount::mso::parse_formula;
use slicecount::ordering::{search_min_dvsn_ordering, zigzag_number, OrderedDigraph};
use slicecount::pipeline::{count_subgraphs, preset_query, CountQuery, PRESETS};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Parse = 3,
    Resource = 4,
    Internal = 5,
}

pub struct ScGraph {
    inner: OrderedDigraph,
}

pub struct ScCount {
    value: BigUint,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::Parse { .. } | Error::Syntax { .. } | Error::UnboundVariable(_) | Error::DanglingVertex { .. } => {
            ScStatus::Parse
        }
        Error::Resource(_) | Error::BudgetExceeded(_) => ScStatus::Resource,
        _ => ScStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), ScStatus>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ScStatus::Internal
        }
    }
}

fn fail(e: Error) -> ScStatus {
    set_error(e.to_string());
    status_of(&e)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, ScStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(ScStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        ScStatus::InvalidArgument
    })
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a digraph in edge-list format. The ordering starts as the
/// identity.
///
/// # Safety
/// `edge_list` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_parse(edge_list: *const c_char, out: *mut *mut ScGraph) -> ScStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Err(ScStatus::NullArgument);
        }
        *out = ptr::null_mut();
        let g = Digraph::parse_edge_list(text(edge_list)?, &WeightSemigroup::trivial()).map_err(fail)?;
        let n = g.n();
        let inner = OrderedDigraph::new(g, (0..n).collect()).map_err(fail)?;
        *out = Box::into_raw(Box::new(ScGraph { inner }));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`sc_graph_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_free(g: *mut ScGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_vertex_count(g: *const ScGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.graph.n())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_edge_count(g: *const ScGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.graph.m())
}

/// Replaces the vertex ordering. `ordering` lists every vertex once.
///
/// # Safety
/// `g` must be a live graph handle and `ordering` must point to `len`
/// readable values.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_set_ordering(g: *mut ScGraph, ordering: *const usize, len: usize) -> ScStatus {
    guard(|| {
        let Some(g) = g.as_mut() else {
            set_error("null graph");
            return Err(ScStatus::NullArgument);
        };
        if ordering.is_null() && len > 0 {
            set_error("null ordering");
            return Err(ScStatus::NullArgument);
        }
        let ord = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(ordering, len).to_vec() };
        g.inner = OrderedDigraph::new(g.inner.graph.clone(), ord).map_err(fail)?;
        Ok(())
    })
}

/// Replaces the ordering by one of minimum directed vertex separation
/// number and stores that number in `dvsn`.
///
/// # Safety
/// `g` must be a live graph handle; `dvsn` may be null.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_search_ordering(g: *mut ScGraph, dvsn: *mut usize) -> ScStatus {
    guard(|| {
        let Some(g) = g.as_mut() else {
            set_error("null graph");
            return Err(ScStatus::NullArgument);
        };
        let (ord, d) = search_min_dvsn_ordering(&g.inner.graph, None).map_err(fail)?;
        g.inner = OrderedDigraph::new(g.inner.graph.clone(), ord).map_err(fail)?;
        if !dvsn.is_null() {
            *dvsn = d;
        }
        Ok(())
    })
}

/// Writes the current ordering into `buf`, which holds `len` values.
///
/// # Safety
/// `g` must be a live graph handle and `buf` must point to `len` writable
/// values.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_ordering(g: *const ScGraph, buf: *mut usize, len: usize) -> ScStatus {
    guard(|| {
        let Some(g) = g.as_ref() else {
            set_error("null graph");
            return Err(ScStatus::NullArgument);
        };
        if len < g.inner.ordering.len() || (buf.is_null() && len > 0) {
            set_error("buffer too small");
            return Err(ScStatus::InvalidArgument);
        }
        for (i, &v) in g.inner.ordering.iter().enumerate() {
            *buf.add(i) = v;
        }
        Ok(())
    })
}

/// Exact zig-zag number of the current ordering.
///
/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_graph_zigzag(g: *const ScGraph, out: *mut usize) -> ScStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            set_error("null argument");
            return Err(ScStatus::NullArgument);
        };
        *out = zigzag_number(&g.inner.graph, &g.inner.ordering).map_err(fail)?;
        Ok(())
    })
}

/// Counts subgraphs with `l` vertices (any size when `l < 0`) that are
/// unions of `k` directed paths of zig-zag number at most `z` under the
/// graph's ordering and satisfy `query`: a preset name or formula text.
///
/// # Safety
/// `g` must be a live graph handle, `query` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_count(
    g: *const ScGraph,
    query: *const c_char,
    k: usize,
    z: usize,
    l: i64,
    out: *mut *mut ScCount,
) -> ScStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), out.is_null()) else {
            set_error("null argument");
            return Err(ScStatus::NullArgument);
        };
        *out = ptr::null_mut();
        let query = text(query)?;
        let l = usize::try_from(l).ok();
        let q = if PRESETS.contains(&query) {
            preset_query(query, g.inner.clone(), k, z, l).map_err(fail)?
        } else {
            CountQuery::new(g.inner.clone(), parse_formula(query).map_err(fail)?, k, z, l)
        };
        let r = count_subgraphs(&q).map_err(fail)?;
        *out = Box::into_raw(Box::new(ScCount { value: r.count }));
        Ok(())
    })
}

/// Stores the count in `out` if it fits in 64 bits.
///
/// # Safety
/// `c` must be a live count handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_count_u64(c: *const ScCount, out: *mut u64) -> ScStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), out.is_null()) else {
            set_error("null argument");
            return Err(ScStatus::NullArgument);
        };
        let digits = c.value.to_u64_digits();
        match digits.len() {
            0 => *out = 0,
            1 => *out = digits[0],
            _ => {
                set_error("count exceeds 64 bits");
                return Err(ScStatus::Resource);
            }
        }
        Ok(())
    })
}

/// Decimal digits of the count. Release with [`sc_string_free`].
///
/// # Safety
/// `c` must be a live count handle.
#[no_mangle]
pub unsafe extern "C" fn sc_count_to_string(c: *const ScCount) -> *mut c_char {
    match c.as_ref() {
        Some(c) => CString::new(c.value.to_str_radix(10)).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `c` must come from [`sc_count`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_count_free(c: *mut ScCount) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
