//! Exercise the C ABI the way a foreign binding would: NUL-terminated JSON
//! in, status codes and flat structs out.

use std::ffi::CString;

use passinet_ffi::*;

const THREE_NODE: &str = r#"{
    "agent": {"A": [[0,0],[1,0]], "B": [[2],[0]], "C": [[0.5],[0.5]], "g": [1]},
    "graph": {"n": 3, "arcs": [[2,1,1.0],[3,2,1.0],[3,1,1.0]]},
    "gains": [1.0, 1.0, 0.5],
    "x0": [2.0,-2.0,-7.0,3.0,1.0,-3.0],
    "sim": {"t_end": 25.0, "dt": 0.001, "tol": 0.01}
}"#;

fn parse(json: &str) -> *mut PnNetwork {
    let cjson = CString::new(json).unwrap();
    let mut net: *mut PnNetwork = std::ptr::null_mut();
    let status = unsafe { pn_network_from_json(cjson.as_ptr(), &mut net) };
    assert_eq!(status, PnStatus::Ok);
    assert!(!net.is_null());
    net
}

fn last_error() -> String {
    let needed = unsafe { pn_last_error(std::ptr::null_mut(), 0) };
    let mut buf = vec![0u8; needed + 1];
    unsafe { pn_last_error(buf.as_mut_ptr() as *mut _, buf.len()) };
    String::from_utf8_lossy(&buf[..needed]).into_owned()
}

#[test]
fn parse_analyze_simulate_free() {
    let net = parse(THREE_NODE);

    let mut count = 0usize;
    assert_eq!(unsafe { pn_network_agent_count(net, &mut count) }, PnStatus::Ok);
    assert_eq!(count, 3);

    let mut analysis = PnAnalysis {
        is_hmp: 0,
        has_spanning_tree: 0,
        zero_multiplicity: 0,
        kappa0: 0.0,
        already_passive: 0,
        spectral_gap: 0.0,
        sufficient_gain: 0.0,
    };
    assert_eq!(unsafe { pn_analyze(net, &mut analysis) }, PnStatus::Ok);
    assert_eq!(analysis.is_hmp, 1);
    assert_eq!(analysis.has_spanning_tree, 1);
    assert_eq!(analysis.zero_multiplicity, 1);
    assert!((analysis.kappa0 - 1.0).abs() < 1e-6);
    assert!((analysis.spectral_gap - 1.0).abs() < 1e-9);
    assert!((analysis.sufficient_gain - 1.0).abs() < 1e-6);

    let mut summary = PnSimSummary {
        converged: 0,
        final_disagreement: 0.0,
        final_error_to_c: 0.0,
    };
    assert_eq!(unsafe { pn_simulate(net, 0.0, 0.0, 42, &mut summary) }, PnStatus::Ok);
    assert_eq!(summary.converged, 1);
    assert!(summary.final_disagreement < 1e-2);
    assert!(summary.final_error_to_c < 1e-2);

    unsafe { pn_network_free(net) };
}

#[test]
fn closed_form_thresholds() {
    let mut out = 0.0f64;
    assert_eq!(unsafe { pn_cycle_threshold(10, &mut out) }, PnStatus::Ok);
    assert!((out - 4.7360679).abs() < 1e-6);
    assert_eq!(unsafe { pn_cycle_threshold(2, &mut out) }, PnStatus::InvalidInput);

    // 3-cycle spectrum 1.5 +/- i sqrt(3)/2 gives the cot law at N = 3
    let half_sqrt3 = 3.0f64.sqrt() / 2.0;
    let re = [1.5, 1.5];
    let im = [half_sqrt3, -half_sqrt3];
    assert_eq!(
        unsafe { pn_general_threshold(re.as_ptr(), im.as_ptr(), 2, &mut out) },
        PnStatus::Ok
    );
    assert!((out - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn bisection_through_ffi() {
    let json = r#"{
        "agent": {"A": [[0,0],[1,0]], "B": [[2],[0]], "C": [[0.5],[0.5]], "g": [1]},
        "graph": {"n": 3, "arcs": [[1,2,1.0],[2,3,1.0],[3,1,1.0]]}
    }"#;
    let net = parse(json);
    let mut out = 0.0f64;
    assert_eq!(unsafe { pn_exact_threshold(net, 0.0, 2.0, &mut out) }, PnStatus::Ok);
    assert!((out - 1.0 / 6.0).abs() < 1e-5, "threshold {out}");
    unsafe { pn_network_free(net) };
}

#[test]
fn error_paths_set_messages() {
    let mut net: *mut PnNetwork = std::ptr::null_mut();

    let status = unsafe { pn_network_from_json(std::ptr::null(), &mut net) };
    assert_eq!(status, PnStatus::NullArgument);

    let bad = CString::new("{\"agent\": }").unwrap();
    let status = unsafe { pn_network_from_json(bad.as_ptr(), &mut net) };
    assert_eq!(status, PnStatus::ParseError);
    assert!(last_error().contains("parse error"));

    // non-HMP agent: analysis still succeeds and reports is_hmp = 0, but the
    // threshold search refuses
    let flipped = r#"{
        "agent": {"A": [[0,0],[1,0]], "B": [[2],[0]], "C": [[0.5],[0.5]], "g": [-1]},
        "graph": {"n": 3, "arcs": [[1,2,1.0],[2,3,1.0],[3,1,1.0]]}
    }"#;
    let net = parse(flipped);
    let mut analysis = PnAnalysis {
        is_hmp: 0,
        has_spanning_tree: 0,
        zero_multiplicity: 0,
        kappa0: 0.0,
        already_passive: 0,
        spectral_gap: 0.0,
        sufficient_gain: 0.0,
    };
    assert_eq!(unsafe { pn_analyze(net, &mut analysis) }, PnStatus::Ok);
    assert_eq!(analysis.is_hmp, 0);
    assert!(analysis.kappa0.is_nan());
    assert!(analysis.sufficient_gain.is_nan());
    unsafe { pn_network_free(net) };

    // no spanning tree
    let isolated = r#"{
        "agent": {"A": [[0,0],[1,0]], "B": [[2],[0]], "C": [[0.5],[0.5]], "g": [1]},
        "graph": {"n": 2, "arcs": []}
    }"#;
    let net = parse(isolated);
    let mut out = 0.0;
    assert_eq!(
        unsafe { pn_exact_threshold(net, 0.0, 2.0, &mut out) },
        PnStatus::TopologyViolated
    );
    assert!(last_error().contains("A2"));
    unsafe { pn_network_free(net) };

    // divergence surfaces as its own status
    let unstable = r#"{
        "agent": {"A": [[1.0]], "B": [[1.0]], "C": [[1.0]], "g": [1]},
        "graph": {"n": 1, "arcs": []},
        "gains": [1.0],
        "x0": [1.0]
    }"#;
    let net = parse(unstable);
    let mut summary = PnSimSummary {
        converged: 0,
        final_disagreement: 0.0,
        final_error_to_c: 0.0,
    };
    assert_eq!(
        unsafe { pn_simulate(net, 40.0, 0.01, 42, &mut summary) },
        PnStatus::Diverged
    );
    unsafe { pn_network_free(net) };

    unsafe { pn_network_free(std::ptr::null_mut()) }; // no-op
}

#[test]
fn generated_header_exports_the_surface() {
    let header = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/passinet.h"),
    )
    .expect("cbindgen header exists after build");
    for symbol in [
        "pn_version",
        "pn_last_error",
        "pn_network_from_json",
        "pn_network_free",
        "pn_network_agent_count",
        "pn_analyze",
        "pn_exact_threshold",
        "pn_cycle_threshold",
        "pn_general_threshold",
        "pn_simulate",
        "PnStatus",
        "PnAnalysis",
        "PnSimSummary",
    ] {
        assert!(header.contains(symbol), "header missing {symbol}");
    }
    // the handle stays opaque
    assert!(header.contains("typedef struct PnNetwork PnNetwork;"));
}
