//! C interface to coactive critiquing sessions and simulated experiments.
//!
//! Functions return a [`CoactiveStatus`]; on anything but `Ok` the message
//! is available from [`coactive_last_error`] on the same thread. Strings
//! handed out by the library must be released with
//! [`coactive_string_free`], sessions with [`coactive_session_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coactive::consistency::ConsistencyMethod;
use coactive::experiment::{run_experiment, ExperimentConfig};
use coactive::session::{Next, Session, SessionDomainSpec, SessionError, Status};
use coactive::trip::Route;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoactiveStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    WrongState = 4,
    Infeasible = 5,
    InvalidCritique = 6,
    DuplicateCritique = 7,
    Internal = 8,
    Panic = 9,
}

/// Session phase, mirroring the service's status names.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoactivePhase {
    Suggesting = 0,
    AwaitingImprovement = 1,
    AwaitingCritique = 2,
    Done = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoactiveNext {
    CritiqueNeeded = 0,
    SuggestionReady = 1,
    Done = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoactiveFormat {
    Csv = 0,
    Json = 1,
}

/// Opaque session handle.
pub struct CoactiveSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

type Outcome = Result<(), (CoactiveStatus, String)>;

/// Runs `f`, recording its error and turning panics into a status.
fn guard(f: impl FnOnce() -> Outcome) -> CoactiveStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CoactiveStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CoactiveStatus::Panic
        }
    }
}

fn session_error(e: SessionError) -> (CoactiveStatus, String) {
    let status = match e {
        SessionError::WrongStatus(_) => CoactiveStatus::WrongState,
        SessionError::Infeasible(_) => CoactiveStatus::Infeasible,
        SessionError::Dsl(_) => CoactiveStatus::InvalidCritique,
        SessionError::DuplicateCritique(_) => CoactiveStatus::DuplicateCritique,
        SessionError::TripData(_) => CoactiveStatus::InvalidArgument,
        SessionError::Domain(_) => CoactiveStatus::Internal,
    };
    let msg = match &e {
        SessionError::Infeasible(p) => format!("{e}: {}", p.join("; ")),
        _ => e.to_string(),
    };
    (status, msg)
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CoactiveStatus, String)> {
    if p.is_null() {
        return Err((CoactiveStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            CoactiveStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

fn json<T: serde::de::DeserializeOwned>(
    s: &str,
    what: &str,
) -> Result<T, (CoactiveStatus, String)> {
    serde_json::from_str(s).map_err(|e| (CoactiveStatus::InvalidArgument, format!("{what}: {e}")))
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Outcome {
    let c = CString::new(s).map_err(|_| {
        (
            CoactiveStatus::Internal,
            "output contains a nul byte".to_string(),
        )
    })?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn session_mut<'a>(
    s: *mut CoactiveSession,
) -> Result<&'a mut Session, (CoactiveStatus, String)> {
    s.as_mut()
        .map(|s| &mut s.inner)
        .ok_or((CoactiveStatus::NullPointer, "session is null".to_string()))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn coactive_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn coactive_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn coactive_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a trip session from a JSON domain spec such as
/// `{"kind":"trip","horizon":6,"seed":1}`.
///
/// # Safety
/// `domain_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_new(
    domain_json: *const c_char,
    out: *mut *mut CoactiveSession,
) -> CoactiveStatus {
    guard(|| {
        if out.is_null() {
            return Err((CoactiveStatus::NullPointer, "out is null".into()));
        }
        let spec: SessionDomainSpec = json(read_str(domain_json, "domain_json")?, "domain spec")?;
        let domain = spec.build().map_err(session_error)?;
        let inner = Session::new("ffi", domain, ConsistencyMethod::default());
        *out = Box::into_raw(Box::new(CoactiveSession { inner }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library not freed yet.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_free(s: *mut CoactiveSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_phase(
    s: *const CoactiveSession,
    out: *mut CoactivePhase,
) -> CoactiveStatus {
    guard(|| {
        let s = s
            .as_ref()
            .ok_or((CoactiveStatus::NullPointer, "session is null".to_string()))?;
        if out.is_null() {
            return Err((CoactiveStatus::NullPointer, "out is null".into()));
        }
        *out = match s.inner.status {
            Status::Suggesting => CoactivePhase::Suggesting,
            Status::AwaitingImprovement => CoactivePhase::AwaitingImprovement,
            Status::AwaitingCritique => CoactivePhase::AwaitingCritique,
            Status::Done => CoactivePhase::Done,
        };
        Ok(())
    })
}

/// Writes the current suggestion as a JSON array of city ids.
///
/// # Safety
/// `s` must be a live handle; `route_json` must be writable. The returned
/// string is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_suggest(
    s: *mut CoactiveSession,
    route_json: *mut *mut c_char,
) -> CoactiveStatus {
    guard(|| {
        let session = session_mut(s)?;
        if route_json.is_null() {
            return Err((CoactiveStatus::NullPointer, "route_json is null".into()));
        }
        let route = session.suggest().map_err(session_error)?;
        give_string(
            route_json,
            serde_json::to_string(&route).expect("routes serialize"),
        )
    })
}

/// # Safety
/// `s` must be a live handle; `route_json` a nul-terminated JSON array;
/// `next` writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_improve(
    s: *mut CoactiveSession,
    route_json: *const c_char,
    next: *mut CoactiveNext,
) -> CoactiveStatus {
    guard(|| {
        let session = session_mut(s)?;
        if next.is_null() {
            return Err((CoactiveStatus::NullPointer, "next is null".into()));
        }
        let route: Route = json(read_str(route_json, "route_json")?, "route")?;
        *next = match session.submit_improvement(route).map_err(session_error)? {
            Next::CritiqueNeeded => CoactiveNext::CritiqueNeeded,
            Next::SuggestionReady => CoactiveNext::SuggestionReady,
            Next::Done => CoactiveNext::Done,
        };
        Ok(())
    })
}

/// Applies a critique expression; writes the new feature's catalog index.
///
/// # Safety
/// `s` must be a live handle; `expression` nul-terminated; `index` writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_critique(
    s: *mut CoactiveSession,
    expression: *const c_char,
    index: *mut usize,
) -> CoactiveStatus {
    guard(|| {
        let session = session_mut(s)?;
        if index.is_null() {
            return Err((CoactiveStatus::NullPointer, "index is null".into()));
        }
        let expr = read_str(expression, "expression")?;
        *index = session.submit_critique(expr).map_err(session_error)?;
        Ok(())
    })
}

/// Serializes the full session state, for persistence by the caller.
///
/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_to_json(
    s: *const CoactiveSession,
    out: *mut *mut c_char,
) -> CoactiveStatus {
    guard(|| {
        let s = s
            .as_ref()
            .ok_or((CoactiveStatus::NullPointer, "session is null".to_string()))?;
        if out.is_null() {
            return Err((CoactiveStatus::NullPointer, "out is null".into()));
        }
        give_string(
            out,
            serde_json::to_string(&s.inner).expect("sessions serialize"),
        )
    })
}

/// Restores a session written by [`coactive_session_to_json`].
///
/// # Safety
/// `state_json` must be nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_session_from_json(
    state_json: *const c_char,
    out: *mut *mut CoactiveSession,
) -> CoactiveStatus {
    guard(|| {
        if out.is_null() {
            return Err((CoactiveStatus::NullPointer, "out is null".into()));
        }
        let inner: Session = json(read_str(state_json, "state_json")?, "session state")?;
        *out = Box::into_raw(Box::new(CoactiveSession { inner }));
        Ok(())
    })
}

/// Runs a simulated experiment from a JSON config and writes the results
/// table as CSV or JSON. `workers` of 0 means one thread.
///
/// # Safety
/// `config_json` must be nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coactive_run_experiment(
    config_json: *const c_char,
    workers: u32,
    format: CoactiveFormat,
    out: *mut *mut c_char,
) -> CoactiveStatus {
    guard(|| {
        if out.is_null() {
            return Err((CoactiveStatus::NullPointer, "out is null".into()));
        }
        let config: ExperimentConfig =
            json(read_str(config_json, "config_json")?, "experiment config")?;
        let table = run_experiment(&config, workers.max(1) as usize)
            .map_err(|e| (CoactiveStatus::InvalidArgument, e.to_string()))?;
        let text = match format {
            CoactiveFormat::Csv => table.to_csv(),
            CoactiveFormat::Json => table.to_json(),
        };
        give_string(out, text)
    })
}
