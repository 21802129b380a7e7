use std::ffi::{CStr, CString};
use std::ptr;

use slicecount_ffi::*;

fn graph(text: &str) -> *mut ScGraph {
    let t = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sc_graph_parse(t.as_ptr(), &mut g) }, ScStatus::Ok);
    assert!(!g.is_null());
    g
}

fn count(g: *const ScGraph, query: &str, k: usize, z: usize, l: i64) -> Result<u64, ScStatus> {
    let q = CString::new(query).unwrap();
    let mut c = ptr::null_mut();
    let s = unsafe { sc_count(g, q.as_ptr(), k, z, l, &mut c) };
    if s != ScStatus::Ok {
        assert!(c.is_null());
        return Err(s);
    }
    let mut v = 0;
    assert_eq!(unsafe { sc_count_u64(c, &mut v) }, ScStatus::Ok);
    let text = unsafe { sc_count_to_string(c) };
    assert_eq!(unsafe { CStr::from_ptr(text) }.to_str().unwrap(), v.to_string());
    unsafe {
        sc_string_free(text);
        sc_count_free(c);
    }
    Ok(v)
}

const K4: &str = "4 12\n0 1\n0 2\n0 3\n1 0\n1 2\n1 3\n2 0\n2 1\n2 3\n3 0\n3 1\n3 2\n";

#[test]
fn hamiltonian_cycles_of_k4() {
    let g = graph(K4);
    unsafe {
        assert_eq!(sc_graph_vertex_count(g), 4);
        assert_eq!(sc_graph_edge_count(g), 12);
        let mut d = 0;
        assert_eq!(sc_graph_search_ordering(g, &mut d), ScStatus::Ok);
        assert_eq!(d, 3);
        let mut z = 0;
        assert_eq!(sc_graph_zigzag(g, &mut z), ScStatus::Ok);
        assert_eq!(count(g, "hamiltonian", 2, z, -1), Ok(6));
        assert_eq!(count(g, "(hamiltonian-cycle)", 2, z, 4), Ok(6));
        sc_graph_free(g);
    }
}

#[test]
fn orderings_round_trip() {
    let g = graph("3 2\n0 1\n1 2\n");
    unsafe {
        let ord = [2usize, 0, 1];
        assert_eq!(sc_graph_set_ordering(g, ord.as_ptr(), 3), ScStatus::Ok);
        let mut buf = [0usize; 3];
        assert_eq!(sc_graph_ordering(g, buf.as_mut_ptr(), 3), ScStatus::Ok);
        assert_eq!(buf, ord);
        assert_eq!(sc_graph_ordering(g, buf.as_mut_ptr(), 2), ScStatus::InvalidArgument);
        let bad = [0usize, 0, 1];
        assert_eq!(sc_graph_set_ordering(g, bad.as_ptr(), 3), ScStatus::InvalidArgument);
        sc_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    let bad = CString::new("2 1\n0 7\n").unwrap();
    unsafe {
        assert_eq!(sc_graph_parse(bad.as_ptr(), &mut g), ScStatus::Parse);
        assert!(g.is_null());
        assert!(!CStr::from_ptr(sc_last_error()).to_bytes().is_empty());
        assert_eq!(sc_graph_parse(ptr::null(), &mut g), ScStatus::NullArgument);
        assert_eq!(sc_graph_zigzag(ptr::null(), ptr::null_mut()), ScStatus::NullArgument);
        sc_graph_free(ptr::null_mut());
        sc_count_free(ptr::null_mut());
    }
    let g = graph("2 2\n0 1\n1 0\n");
    assert_eq!(count(g, "(exists X", 1, 1, -1), Err(ScStatus::Parse));
    assert_eq!(count(g, "hamiltonian", 2, 0, -1), Err(ScStatus::InvalidArgument));
    assert_eq!(count(g, "hamiltonian", 2, 2, -1), Ok(1));
    unsafe { sc_graph_free(g) };
}

#[test]
fn header_declares_the_api() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/slicecount.h");
    let header = std::fs::read_to_string(path).unwrap();
    for name in [
        "sc_graph_parse",
        "sc_graph_free",
        "sc_graph_set_ordering",
        "sc_graph_search_ordering",
        "sc_count",
        "sc_count_u64",
        "sc_count_to_string",
        "sc_last_error",
        "typedef struct ScGraph ScGraph",
        "SC_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", path])
        .output()
    else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
