//! C interface to `hopcap`.
//!
//! Every fallible function returns a [`HopcapStatus`]; on failure the
//! message is kept per thread and can be copied out with
//! [`hopcap_last_error_message`]. Scenarios and traces are opaque handles
//! released with their `_free` function.
//!
//! Strings are returned through caller buffers: the required size
//! (including the terminating NUL) is always written to `out_len`, and
//! `HOPCAP_STATUS_BUFFER_TOO_SMALL` is returned if `buf` cannot hold it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hopcap::capacity::{optimum_z, Scenario};
use hopcap::harness::{run_sweep, write_rows, ExperimentSpec};
use hopcap::packetsim::{measured_delivery_rate, measured_latency, run_sim, SimTrace};
use hopcap::schedule::{Flow, Mode};
use hopcap::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopcapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The analytical and packet engines disagree.
    Consistency = 3,
    BufferTooSmall = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopcapMode {
    Traditional = 0,
    NetworkCoded = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopcapFlow {
    Forward = 0,
    Reverse = 1,
}

/// Bottleneck rates and capacity of one stream, in bits per second.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HopcapCapacity {
    pub forward_bottleneck_bps: f64,
    pub reverse_bottleneck_bps: f64,
    pub capacity_bps: f64,
}

/// Experiment parameters plus the single configuration that
/// `hopcap_scenario_capacity` evaluates.
pub struct HopcapScenario {
    spec: ExperimentSpec,
    mode: Mode,
    z: usize,
    hops: usize,
    streams: usize,
}

pub struct HopcapTrace {
    trace: SimTrace,
}

impl From<HopcapMode> for Mode {
    fn from(m: HopcapMode) -> Self {
        match m {
            HopcapMode::Traditional => Mode::Traditional,
            HopcapMode::NetworkCoded => Mode::NetworkCoded,
        }
    }
}

impl From<HopcapFlow> for Flow {
    fn from(f: HopcapFlow) -> Self {
        match f {
            HopcapFlow::Forward => Flow::Forward,
            HopcapFlow::Reverse => Flow::Reverse,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(message: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
}

struct Failure(HopcapStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Consistency(_) => HopcapStatus::Consistency,
            _ => HopcapStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: HopcapStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> HopcapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            HopcapStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside hopcap");
            HopcapStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(HopcapStatus::NullPointer, format!("{name} is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(HopcapStatus::NullPointer, format!("{name} is null")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(HopcapStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            HopcapStatus::InvalidArgument,
            format!("{name} is not UTF-8"),
        )
    })
}

unsafe fn copy_out(
    s: &str,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> Result<(), Failure> {
    let needed = s.len() + 1;
    deref_mut(out_len, "out_len").map(|l| *l = needed)?;
    if buf.is_null() || cap < needed {
        return Err(fail(
            HopcapStatus::BufferTooSmall,
            format!("buffer holds {cap} bytes, {needed} needed"),
        ));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message (empty after a
/// successful call).
///
/// # Safety
/// `buf` must be valid for `cap` bytes or null; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hopcap_last_error_message(
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> HopcapStatus {
    let message = LAST_ERROR.with(|e| e.borrow().clone());
    // Deliberately not through `guard`, which would overwrite the message.
    match copy_out(&message, buf, cap, out_len) {
        Ok(()) => HopcapStatus::Ok,
        Err(Failure(status, _)) => status,
    }
}

/// Creates a scenario with the default parameters: NC, Z = 4, 4 hops,
/// one stream.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hopcap_scenario_new(out: *mut *mut HopcapScenario) -> HopcapStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        *out = Box::into_raw(Box::new(HopcapScenario {
            spec: ExperimentSpec::default(),
            mode: Mode::NetworkCoded,
            z: 4,
            hops: 4,
            streams: 1,
        }));
        Ok(())
    })
}

/// Sets one parameter. Besides the experiment config keys this accepts
/// `mode`, `z`, `hops` and `num_streams` for the single configuration.
///
/// # Safety
/// `scenario` must come from `hopcap_scenario_new`; `key` and `value`
/// must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn hopcap_scenario_set(
    scenario: *mut HopcapScenario,
    key: *const c_char,
    value: *const c_char,
) -> HopcapStatus {
    guard(|| {
        let s = deref_mut(scenario, "scenario")?;
        let key = text(key, "key")?;
        let value = text(value, "value")?.trim();
        let bad = |e: String| fail(HopcapStatus::InvalidArgument, format!("{key}: {e}"));
        let number = |v: &str| v.parse::<usize>().map_err(|e| bad(e.to_string()));
        match key {
            "mode" => s.mode = value.parse().map_err(bad)?,
            "z" => s.z = number(value)?,
            "hops" => s.hops = number(value)?,
            "num_streams" => s.streams = number(value)?,
            _ => s.spec.set(key, value).map_err(bad)?,
        }
        Ok(())
    })
}

/// Evaluates the single configuration and reports stream `stream`
/// (0-based).
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hopcap_scenario_capacity(
    scenario: *const HopcapScenario,
    stream: usize,
    out: *mut HopcapCapacity,
) -> HopcapStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let out = deref_mut(out, "out")?;
        let report = single(s).analyze()?;
        let r = report.streams.get(stream).ok_or_else(|| {
            fail(
                HopcapStatus::InvalidArgument,
                format!(
                    "stream {stream} out of range ({} streams)",
                    report.streams.len()
                ),
            )
        })?;
        *out = HopcapCapacity {
            forward_bottleneck_bps: r.forward_bottleneck_bps,
            reverse_bottleneck_bps: r.reverse_bottleneck_bps,
            capacity_bps: r.capacity_per_timeslot_bps,
        };
        Ok(())
    })
}

fn single(s: &HopcapScenario) -> Scenario {
    Scenario {
        layout: s.spec.layout_for(s.streams),
        radio: s.spec.radio,
        mode: s.mode,
        z: s.z,
        hops: s.hops,
        phase: s.spec.phase,
    }
}

/// Best period among `z_values` for stream 1, ties to the smaller period.
///
/// # Safety
/// `z_values` must point to `count` values; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn hopcap_scenario_optimum_z(
    scenario: *const HopcapScenario,
    z_values: *const usize,
    count: usize,
    out_z: *mut usize,
    out_capacity_bps: *mut f64,
) -> HopcapStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        if z_values.is_null() {
            return Err(fail(HopcapStatus::NullPointer, "z_values is null"));
        }
        let zs = std::slice::from_raw_parts(z_values, count);
        let base = single(s);
        let (z, cap) = optimum_z(zs.iter().copied(), |z| {
            Ok(base.with_z(z).analyze()?.streams[0].capacity_per_timeslot_bps)
        })?;
        *deref_mut(out_z, "out_z")? = z;
        *deref_mut(out_capacity_bps, "out_capacity_bps")? = cap;
        Ok(())
    })
}

/// Runs the configured sweep and copies its CSV.
///
/// # Safety
/// `scenario` must be a live handle; see the module notes on buffers.
#[no_mangle]
pub unsafe extern "C" fn hopcap_scenario_sweep_csv(
    scenario: *const HopcapScenario,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> HopcapStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let mut bytes = Vec::new();
        write_rows(&run_sweep(&s.spec)?, &mut bytes)?;
        let csv =
            String::from_utf8(bytes).map_err(|e| fail(HopcapStatus::Internal, e.to_string()))?;
        copy_out(&csv, buf, cap, out_len)
    })
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hopcap_scenario_free(scenario: *mut HopcapScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Packet-level simulation of one route of `nodes` nodes for `periods`
/// schedule cycles.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hopcap_simulate(
    mode: HopcapMode,
    nodes: usize,
    z: usize,
    periods: usize,
    out: *mut *mut HopcapTrace,
) -> HopcapStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let trace = run_sim(mode.into(), nodes, z, periods)?;
        *out = Box::into_raw(Box::new(HopcapTrace { trace }));
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hopcap_trace_slot_count(
    trace: *const HopcapTrace,
    out: *mut usize,
) -> HopcapStatus {
    guard(|| {
        *deref_mut(out, "out")? = deref(trace, "trace")?.trace.len();
        Ok(())
    })
}

/// Steady-state latency in timeslots, counting both the injection and the
/// delivery slot.
///
/// # Safety
/// `trace` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hopcap_trace_latency(
    trace: *const HopcapTrace,
    flow: HopcapFlow,
    out: *mut u64,
) -> HopcapStatus {
    guard(|| {
        let t = deref(trace, "trace")?;
        *deref_mut(out, "out")? = measured_latency(&t.trace, flow.into())?;
        Ok(())
    })
}

/// Steady-state deliveries per timeslot as a reduced fraction.
///
/// # Safety
/// `trace` must be a live handle; outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hopcap_trace_delivery_rate(
    trace: *const HopcapTrace,
    out_numer: *mut u64,
    out_denom: *mut u64,
) -> HopcapStatus {
    guard(|| {
        let t = deref(trace, "trace")?;
        let rate = measured_delivery_rate(&t.trace)?;
        *deref_mut(out_numer, "out_numer")? = *rate.numer();
        *deref_mut(out_denom, "out_denom")? = *rate.denom();
        Ok(())
    })
}

/// Copies the slot-by-slot text table.
///
/// # Safety
/// `trace` must be a live handle; see the module notes on buffers.
#[no_mangle]
pub unsafe extern "C" fn hopcap_trace_render(
    trace: *const HopcapTrace,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> HopcapStatus {
    guard(|| {
        copy_out(
            &deref(trace, "trace")?.trace.render_table(),
            buf,
            cap,
            out_len,
        )
    })
}

/// # Safety
/// `trace` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hopcap_trace_free(trace: *mut HopcapTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
