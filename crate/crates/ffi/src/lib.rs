//! C ABI over the relanalogy engine.
//!
//! Networks and match results are opaque heap handles owned by the caller
//! and released with their `_free` function. Every fallible call returns a
//! [`RaStatus`]; on failure, [`ra_last_error_message`] describes the error
//! for the calling thread. Strings returned through `char **` out-parameters
//! are released with [`ra_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relanalogy::chess::network_from_fen;
use relanalogy::lean::{parse_proof_state, parse_schema, proof_network, Classified, KnownHeads};
use relanalogy::matcher::{match_networks, MatchConfig, MatchResult};
use relanalogy::relnet::{NetworkRecord, RelationalNetwork};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Panic = 5,
}

/// Classification written by [`ra_parse_schema`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaTacticKind {
    Schema = 0,
    Shortcut = 1,
    Unparseable = 2,
}

/// Opaque relational network.
pub struct RaNetwork(RelationalNetwork);

/// Opaque match result.
pub struct RaMatchResult(MatchResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|b| *b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), (RaStatus, String)>) -> RaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RaStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RaStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RaStatus, String)> {
    if p.is_null() {
        return Err((RaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (RaStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RaStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (RaStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), (RaStatus, String)> {
    if p.is_null() {
        Err((RaStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn c_string(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|b| *b != 0);
    CString::new(bytes).expect("nul bytes removed").into_raw()
}

unsafe fn emit_network(out: *mut *mut RaNetwork, net: RelationalNetwork) {
    *out = Box::into_raw(Box::new(RaNetwork(net)));
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ra_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a network from one network-record JSON object.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ra_network_from_json(
    json: *const c_char,
    out: *mut *mut RaNetwork,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let json = text(json, "json")?;
        let rec: NetworkRecord =
            serde_json::from_str(json).map_err(|e| (RaStatus::Parse, e.to_string()))?;
        let net = rec
            .into_network(&mut Vec::new())
            .map_err(|e| (RaStatus::Invalid, e.to_string()))?;
        emit_network(out, net);
        Ok(())
    })
}

/// Extracts the chess relation network of a FEN position.
///
/// # Safety
/// `fen` and `id` must be nul-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_chess_network_from_fen(
    fen: *const c_char,
    id: *const c_char,
    out: *mut *mut RaNetwork,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let (fen, id) = (text(fen, "fen")?, text(id, "id")?);
        let net = network_from_fen(fen, id).map_err(|e| (RaStatus::Parse, e.to_string()))?;
        emit_network(out, net);
        Ok(())
    })
}

/// Extracts the network of a serialized proof state
/// (`name : type` lines, then `⊢ goal` lines).
///
/// # Safety
/// `state` and `id` must be nul-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_proof_network_from_text(
    state: *const c_char,
    id: *const c_char,
    out: *mut *mut RaNetwork,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let (state, id) = (text(state, "state")?, text(id, "id")?);
        let parsed = parse_proof_state(state).map_err(|e| (RaStatus::Parse, e.to_string()))?;
        emit_network(out, proof_network(&parsed, id));
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_network_free(net: *mut RaNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_entity_count(
    net: *const RaNetwork,
    out: *mut usize,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = handle(net, "net")?.0.entity_count();
        Ok(())
    })
}

/// # Safety
/// `net` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_relation_count(
    net: *const RaNetwork,
    out: *mut usize,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = handle(net, "net")?.0.relations().len();
        Ok(())
    })
}

/// Serializes the network as a network-record JSON object.
///
/// # Safety
/// `net` must be a live handle and `out` writable. Free the string with
/// [`ra_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ra_network_to_json(
    net: *const RaNetwork,
    out: *mut *mut c_char,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let rec = handle(net, "net")?.0.to_record();
        let json = serde_json::to_string(&rec).map_err(|e| (RaStatus::Invalid, e.to_string()))?;
        *out = c_string(json);
        Ok(())
    })
}

/// Runs the multi-restart matcher with default iteration cap and unit
/// weights. `restarts` must be at least 1.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_match(
    a: *const RaNetwork,
    b: *const RaNetwork,
    restarts: usize,
    seed: u64,
    out: *mut *mut RaMatchResult,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        let config = MatchConfig {
            restarts,
            seed,
            ..MatchConfig::default()
        };
        let r =
            match_networks(&a.0, &b.0, &config).map_err(|e| (RaStatus::Invalid, e.to_string()))?;
        *out = Box::into_raw(Box::new(RaMatchResult(r)));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_match_result_free(r: *mut RaMatchResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Raw and normalized score.
///
/// # Safety
/// `r` must be a live handle; `raw` and `normalized` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_match_result_score(
    r: *const RaMatchResult,
    raw: *mut f64,
    normalized: *mut f64,
) -> RaStatus {
    guard(|| {
        out_ptr(raw, "raw")?;
        out_ptr(normalized, "normalized")?;
        let s = handle(r, "result")?.0.score;
        *raw = s.raw;
        *normalized = s.normalized;
        Ok(())
    })
}

/// Number of `(source, target)` pairs in the assignment.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_match_result_pair_count(
    r: *const RaMatchResult,
    out: *mut usize,
) -> RaStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = handle(r, "result")?.0.assignment.len();
        Ok(())
    })
}

/// The `index`-th assignment pair, in ascending source order.
///
/// # Safety
/// `r` must be a live handle; `source` and `target` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_match_result_pair(
    r: *const RaMatchResult,
    index: usize,
    source: *mut usize,
    target: *mut usize,
) -> RaStatus {
    guard(|| {
        out_ptr(source, "source")?;
        out_ptr(target, "target")?;
        let pairs = handle(r, "result")?.0.assignment.pairs();
        let &(s, t) = pairs.get(index).ok_or_else(|| {
            (
                RaStatus::Invalid,
                format!("pair index {index} out of range for {} pairs", pairs.len()),
            )
        })?;
        *source = s;
        *target = t;
        Ok(())
    })
}

/// Classifies a tactic string. For a schema, `key_out` receives
/// `head|arity|with|lemma`; for a shortcut, the identifier; otherwise null.
///
/// # Safety
/// `tactic` must be a nul-terminated string; `kind_out` and `key_out`
/// writable. Free a non-null key with [`ra_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ra_parse_schema(
    tactic: *const c_char,
    kind_out: *mut RaTacticKind,
    key_out: *mut *mut c_char,
) -> RaStatus {
    guard(|| {
        out_ptr(kind_out, "kind_out")?;
        out_ptr(key_out, "key_out")?;
        let tactic = text(tactic, "tactic")?;
        let (kind, key) = match parse_schema(tactic, &KnownHeads::default()) {
            Classified::Schema(s) => (RaTacticKind::Schema, c_string(s.key())),
            Classified::Shortcut(h) => (RaTacticKind::Shortcut, c_string(h)),
            Classified::Unparseable => (RaTacticKind::Unparseable, ptr::null_mut()),
        };
        *kind_out = kind;
        *key_out = key;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
