use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hopcap_ffi::*;

fn last_error() -> String {
    let mut len = 0;
    unsafe {
        hopcap_last_error_message(ptr::null_mut(), 0, &mut len);
        let mut buf = vec![0 as c_char; len];
        assert_eq!(
            hopcap_last_error_message(buf.as_mut_ptr(), len, &mut len),
            HopcapStatus::Ok
        );
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn take_string(f: impl Fn(*mut c_char, usize, *mut usize) -> HopcapStatus) -> String {
    let mut len = 0;
    assert_eq!(
        f(ptr::null_mut(), 0, &mut len),
        HopcapStatus::BufferTooSmall
    );
    let mut buf = vec![0 as c_char; len];
    assert_eq!(f(buf.as_mut_ptr(), len, &mut len), HopcapStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned() }
}

struct Scenario(*mut HopcapScenario);

impl Scenario {
    fn new() -> Self {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { hopcap_scenario_new(&mut p) }, HopcapStatus::Ok);
        Scenario(p)
    }

    fn set(&self, key: &str, value: &str) -> HopcapStatus {
        let k = CString::new(key).unwrap();
        let v = CString::new(value).unwrap();
        unsafe { hopcap_scenario_set(self.0, k.as_ptr(), v.as_ptr()) }
    }
}

impl Drop for Scenario {
    fn drop(&mut self) {
        unsafe { hopcap_scenario_free(self.0) }
    }
}

#[test]
fn capacity_through_the_handle() {
    let s = Scenario::new();
    assert_eq!(s.set("mode", "nc"), HopcapStatus::Ok);
    assert_eq!(s.set("z", "3"), HopcapStatus::Ok);
    assert_eq!(s.set("hops", "3"), HopcapStatus::Ok);
    assert_eq!(s.set("num_streams", "2"), HopcapStatus::Ok);
    let mut c = HopcapCapacity::default();
    assert_eq!(
        unsafe { hopcap_scenario_capacity(s.0, 0, &mut c) },
        HopcapStatus::Ok
    );
    let direct = hopcap::capacity::Scenario {
        layout: hopcap::layout::LayoutConfig::default(),
        radio: hopcap::radio::RadioConfig::default(),
        mode: hopcap::schedule::Mode::NetworkCoded,
        z: 3,
        hops: 3,
        phase: hopcap::capacity::SlotPhase::Aligned,
    }
    .analyze()
    .unwrap();
    assert_eq!(c.capacity_bps, direct.streams[0].capacity_per_timeslot_bps);
    assert_eq!(
        unsafe { hopcap_scenario_capacity(s.0, 2, &mut c) },
        HopcapStatus::InvalidArgument
    );
    assert!(last_error().contains("out of range"));
}

#[test]
fn errors_set_and_clear_the_message() {
    let s = Scenario::new();
    assert_eq!(s.set("bogus", "1"), HopcapStatus::InvalidArgument);
    assert!(last_error().contains("unknown key"));
    assert_eq!(s.set("row_separation_m", "400"), HopcapStatus::Ok);
    assert_eq!(last_error(), "");
    assert_eq!(s.set("mode", "xx"), HopcapStatus::InvalidArgument);
    assert_eq!(
        unsafe { hopcap_scenario_set(s.0, ptr::null(), ptr::null()) },
        HopcapStatus::NullPointer
    );
    assert_eq!(
        unsafe { hopcap_scenario_capacity(ptr::null(), 0, ptr::null_mut()) },
        HopcapStatus::NullPointer
    );
}

#[test]
fn error_messages_are_per_thread() {
    let s = Scenario::new();
    assert_eq!(s.set("bogus", "1"), HopcapStatus::InvalidArgument);
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, "");
    assert!(!last_error().is_empty());
}

#[test]
fn sweep_csv_matches_library_output() {
    let s = Scenario::new();
    assert_eq!(s.set("streams", "1"), HopcapStatus::Ok);
    assert_eq!(s.set("hop_counts", "3"), HopcapStatus::Ok);
    assert_eq!(s.set("z_values", "2,3,4"), HopcapStatus::Ok);
    let csv = take_string(|b, c, l| unsafe { hopcap_scenario_sweep_csv(s.0, b, c, l) });
    let spec = hopcap::harness::ExperimentSpec {
        streams: vec![1],
        hop_counts: vec![3],
        z_values: vec![2, 3, 4],
        ..Default::default()
    };
    let mut expected = Vec::new();
    hopcap::harness::write_rows(&hopcap::harness::run_sweep(&spec).unwrap(), &mut expected)
        .unwrap();
    assert_eq!(csv.as_bytes(), expected.as_slice());
}

#[test]
fn trace_queries() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(
            hopcap_simulate(HopcapMode::Traditional, 5, 3, 20, &mut t),
            HopcapStatus::Ok
        );
        let mut n = 0;
        assert_eq!(hopcap_trace_slot_count(t, &mut n), HopcapStatus::Ok);
        assert_eq!(n, 120);
        let mut lat = 0;
        assert_eq!(
            hopcap_trace_latency(t, HopcapFlow::Forward, &mut lat),
            HopcapStatus::Ok
        );
        assert_eq!(lat, 7);
        let (mut num, mut den) = (0, 0);
        assert_eq!(
            hopcap_trace_delivery_rate(t, &mut num, &mut den),
            HopcapStatus::Ok
        );
        assert_eq!((num, den), (1, 3));
        let table = take_string(|b, c, l| hopcap_trace_render(t, b, c, l));
        assert!(table.starts_with("# TR n_o=5 Z=3"));
        hopcap_trace_free(t);

        assert_eq!(
            hopcap_simulate(HopcapMode::NetworkCoded, 2, 3, 20, &mut t),
            HopcapStatus::InvalidArgument
        );
        hopcap_trace_free(ptr::null_mut());
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libhopcap_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let exe = tempfile::tempdir().unwrap();
    let out = exe.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "c smoke ok\n");
}
