//! C interface to the recunfold engine.
//!
//! Programs and results are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns a
//! [`RuStatus`] code; on anything but [`RuStatus::Ok`] the message is
//! available from [`ru_last_error`] on the same thread. Strings returned by
//! the library are freed with [`ru_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use recunfold::bench::parse_input;
use recunfold::format::format_deck;
use recunfold::parse::parse_program;
use recunfold::{programs, Engine, Error, ExitCode, Mode, Program, Query, RunOutcome};

/// Status codes. The first five match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuStatus {
    Ok = 0,
    /// The query has no answer.
    Failure = 1,
    /// A full round-robin cycle made no progress.
    NoProgress = 2,
    /// Parse errors, unknown programs or schemes, bad inputs.
    Config = 3,
    /// A step or round limit was hit.
    ResourceLimit = 4,
    /// A null pointer, invalid UTF-8 or an unknown mode was passed.
    InvalidArgument = 5,
    /// The engine panicked.
    Internal = 6,
}

/// `mode` value for plain SLD evaluation.
pub const RU_MODE_NAIVE: i32 = 0;
/// `mode` value for unfolding followed by meta-interpretation.
pub const RU_MODE_UNFOLD: i32 = 1;

/// A loaded program.
pub struct RuProgram {
    program: Program,
}

/// The answer and statistics of one query.
pub struct RuResult {
    outcome: RunOutcome,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RuStats {
    pub rule_applications: u64,
    pub recursive_applications: u64,
    pub rounds: u64,
    pub unfold_steps: u64,
    pub deck_size: u64,
    pub unfold_ms: f64,
    pub interp_ms: f64,
    pub total_ms: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Engine(Error),
    Argument(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

fn status_of(code: ExitCode) -> RuStatus {
    match code {
        ExitCode::Success => RuStatus::Ok,
        ExitCode::Failure => RuStatus::Failure,
        ExitCode::NoProgress => RuStatus::NoProgress,
        ExitCode::Config => RuStatus::Config,
        ExitCode::ResourceLimit => RuStatus::ResourceLimit,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<RuStatus, Failure>) -> RuStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure::Engine(e))) => {
            set_error(e.to_string());
            status_of(e.exit_code())
        }
        Ok(Err(Failure::Argument(msg))) => {
            set_error(msg);
            RuStatus::InvalidArgument
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            RuStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Argument(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Argument(format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::Argument(format!("{what} is null")))
}

unsafe fn program_arg<'a>(p: *const RuProgram) -> Result<&'a Program, Failure> {
    p.as_ref()
        .map(|p| &p.program)
        .ok_or_else(|| Failure::Argument("program is null".into()))
}

unsafe fn inputs_arg(args: *const *const c_char, nargs: usize) -> Result<Vec<recunfold::Term>, Failure> {
    if nargs == 0 {
        return Ok(Vec::new());
    }
    if args.is_null() {
        return Err(Failure::Argument("args is null".into()));
    }
    std::slice::from_raw_parts(args, nargs)
        .iter()
        .enumerate()
        .map(|(i, &a)| Ok(parse_input(str_arg(a, &format!("args[{i}]"))?)?))
        .collect()
}

fn mode_arg(mode: i32) -> Result<Mode, Failure> {
    match mode {
        RU_MODE_NAIVE => Ok(Mode::Naive),
        RU_MODE_UNFOLD => Ok(Mode::Unfold),
        _ => Err(Failure::Argument(format!("unknown mode {mode}"))),
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ru_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads one of the shipped programs: "sum", "fib", "gcd", "rev", "sort".
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ru_program_builtin(name: *const c_char, out: *mut *mut RuProgram) -> RuStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let program = programs::builtin(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(RuProgram { program }));
        Ok(RuStatus::Ok)
    })
}

/// Parses a program from rule-file text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ru_program_parse(text: *const c_char, out: *mut *mut RuProgram) -> RuStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let program = parse_program(str_arg(text, "text")?).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(RuProgram { program }));
        Ok(RuStatus::Ok)
    })
}

/// # Safety
/// `program` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ru_program_free(program: *mut RuProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

unsafe fn run_query(
    program: *const RuProgram,
    make_query: impl FnOnce(&Program) -> Result<Query, Failure>,
    mode: i32,
    out: *mut *mut RuResult,
) -> RuStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let program = program_arg(program)?;
        let mode = mode_arg(mode)?;
        let query = make_query(program)?;
        let outcome = Engine::new().run(program, &query, mode)?;
        let status = if outcome.solved { RuStatus::Ok } else { RuStatus::Failure };
        if !outcome.solved {
            set_error(format!("no answer for `{}`", query.goal));
        }
        *out = Box::into_raw(Box::new(RuResult { outcome }));
        Ok(status)
    })
}

/// Runs the program's entry predicate on `nargs` inputs (integers may be
/// written `2^k`, `2^k+1`, `2^k-1`); the remaining arguments are the
/// outputs `R` or `R1`, `R2`, .... A result is stored in `out` for
/// [`RuStatus::Ok`] and [`RuStatus::Failure`].
///
/// # Safety
/// `program` must be a live handle, `args` must point to `nargs`
/// nul-terminated strings, and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ru_run(
    program: *const RuProgram,
    args: *const *const c_char,
    nargs: usize,
    mode: i32,
    out: *mut *mut RuResult,
) -> RuStatus {
    run_query(
        program,
        |p| Ok(Query::for_program(p, inputs_arg(args, nargs)?)?),
        mode,
        out,
    )
}

/// Runs a full goal such as `s(10,Total)`.
///
/// # Safety
/// As for [`ru_run`], with `query` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ru_run_query(
    program: *const RuProgram,
    query: *const c_char,
    mode: i32,
    out: *mut *mut RuResult,
) -> RuStatus {
    run_query(program, |_| Ok(Query::parse(str_arg(query, "query")?)?), mode, out)
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ru_result_solved(result: *const RuResult) -> bool {
    result.as_ref().is_some_and(|r| r.outcome.solved)
}

/// The answer as text, one `Name = value` line per variable, or `false`.
/// Null when `result` is null.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ru_result_answer(result: *const RuResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => into_c_string(r.outcome.answer_text()),
        None => ptr::null_mut(),
    }
}

/// The value of one query variable, or null if there is none.
///
/// # Safety
/// `result` must be a live handle and `name` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ru_result_value(result: *const RuResult, name: *const c_char) -> *mut c_char {
    let (Some(r), Ok(name)) = (result.as_ref(), str_arg(name, "name")) else {
        return ptr::null_mut();
    };
    r.outcome
        .value(name)
        .map_or(ptr::null_mut(), |t| into_c_string(t.to_string()))
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ru_result_stats(result: *const RuResult, out: *mut RuStats) -> RuStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = result
            .as_ref()
            .ok_or_else(|| Failure::Argument("result is null".into()))?;
        let s = &r.outcome.stats;
        *out = RuStats {
            rule_applications: s.rule_applications,
            recursive_applications: s.recursive_applications,
            rounds: s.rounds,
            unfold_steps: s.unfold_steps,
            deck_size: s.deck_size() as u64,
            unfold_ms: s.unfold_time.as_secs_f64() * 1e3,
            interp_ms: s.interp_time.as_secs_f64() * 1e3,
            total_ms: s.total_time.as_secs_f64() * 1e3,
        };
        Ok(RuStatus::Ok)
    })
}

/// # Safety
/// `result` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ru_result_free(result: *mut RuResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Unfolds every deck of the program against the query built from `args`
/// and stores the decks as rule-file text in `out`, most unfolded rule
/// first.
///
/// # Safety
/// As for [`ru_run`]; the string stored in `out` is freed with
/// [`ru_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ru_unfold_dump(
    program: *const RuProgram,
    args: *const *const c_char,
    nargs: usize,
    out: *mut *mut c_char,
) -> RuStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let program = program_arg(program)?;
        let query = Query::for_program(program, inputs_arg(args, nargs)?)?;
        let results = Engine::new().unfold_decks(program, &query)?;
        let several = results.len() > 1;
        let mut text = String::new();
        for r in &results {
            if several {
                text.push_str(":- deck.\n");
            }
            text.push_str(&format_deck(&r.deck));
        }
        *out = into_c_string(text);
        Ok(RuStatus::Ok)
    })
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ru_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
