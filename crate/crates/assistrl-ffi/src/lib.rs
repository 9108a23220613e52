//! C ABI for the assistrl library.
//!
//! Handles are opaque pointers created and freed by this library; every
//! fallible call returns an [`AssistrlStatus`] and writes results through out
//! pointers. A thread-local message describing the most recent failure is
//! available via [`assistrl_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use assistrl::envs::random_walk::rms_error;
use assistrl::envs::{FourTankEnv, RandomWalkEnv, TempControlEnv};
use assistrl::error::Error;
use assistrl::mdp::{Environment, RewardChoice};
use assistrl::rng::{RngStream, StreamPurpose};
use assistrl::schedule::{blend, BetaSchedule};
use assistrl::td::{run_td_experiment, StepSize};

/// Result code of a C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssistrlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ContractViolation = 4,
    RunFailed = 5,
    InternalError = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = CString::new(msg.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn status_from(err: &Error) -> AssistrlStatus {
    set_error(&err.to_string());
    match err {
        Error::DimensionMismatch { .. } => AssistrlStatus::DimensionMismatch,
        Error::Contract(_) => AssistrlStatus::ContractViolation,
        Error::InvalidParameter(_) | Error::Config(_) => AssistrlStatus::InvalidArgument,
        Error::EpisodeOverflow { .. } | Error::RunFailed { .. } => AssistrlStatus::RunFailed,
        Error::MissingColumn { .. } | Error::Io(_) => AssistrlStatus::InternalError,
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn assistrl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn assistrl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque annealing-schedule handle.
pub struct AssistrlSchedule {
    inner: BetaSchedule,
}

unsafe fn write_out<T>(out: *mut T, value: T) -> AssistrlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return AssistrlStatus::NullPointer;
    }
    unsafe { out.write(value) };
    AssistrlStatus::Ok
}

fn boxed_schedule(
    result: Result<BetaSchedule, Error>,
    out: *mut *mut AssistrlSchedule,
) -> AssistrlStatus {
    match result {
        Ok(inner) => unsafe {
            write_out(out, Box::into_raw(Box::new(AssistrlSchedule { inner })))
        },
        Err(e) => status_from(&e),
    }
}

/// Creates `beta(e) = beta0 * lambda^e` (snapped to 0 below 1e-6).
///
/// # Safety
/// `out` must be a valid pointer to a schedule-handle slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_schedule_exponential(
    beta0: f64,
    lambda: f64,
    out: *mut *mut AssistrlSchedule,
) -> AssistrlStatus {
    boxed_schedule(BetaSchedule::exponential(beta0, lambda), out)
}

/// Creates `beta(e) = max(0, (end_episode - e) * beta0 / end_episode)`.
///
/// # Safety
/// `out` must be a valid pointer to a schedule-handle slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_schedule_linear(
    beta0: f64,
    end_episode: usize,
    out: *mut *mut AssistrlSchedule,
) -> AssistrlStatus {
    boxed_schedule(BetaSchedule::linear(beta0, end_episode), out)
}

/// Creates the target-reward-only baseline schedule (`beta(e) = 0`).
///
/// # Safety
/// `out` must be a valid pointer to a schedule-handle slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_schedule_constant_zero(
    out: *mut *mut AssistrlSchedule,
) -> AssistrlStatus {
    boxed_schedule(Ok(BetaSchedule::constant_zero()), out)
}

/// Evaluates the schedule at an episode index.
///
/// # Safety
/// `sched` must be a live handle from a schedule constructor; `out` must be
/// a valid f64 slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_schedule_beta_at(
    sched: *const AssistrlSchedule,
    episode: usize,
    out: *mut f64,
) -> AssistrlStatus {
    if sched.is_null() {
        set_error("schedule handle is null");
        return AssistrlStatus::NullPointer;
    }
    let beta = unsafe { &(*sched).inner }.beta_at(episode);
    unsafe { write_out(out, beta) }
}

/// Releases a schedule handle; a null pointer is a no-op.
///
/// # Safety
/// `sched` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn assistrl_schedule_free(sched: *mut AssistrlSchedule) {
    if !sched.is_null() {
        drop(unsafe { Box::from_raw(sched) });
    }
}

/// `beta * r_assist + (1 - beta) * r_target`; `beta` must lie in [0, 1].
///
/// # Safety
/// `out` must be a valid f64 slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_blend(
    r_target: f64,
    r_assist: f64,
    beta: f64,
    out: *mut f64,
) -> AssistrlStatus {
    if !(0.0..=1.0).contains(&beta) {
        set_error("beta must lie in [0, 1]");
        return AssistrlStatus::InvalidArgument;
    }
    unsafe { write_out(out, blend(r_target, r_assist, beta)) }
}

enum EnvKind {
    RandomWalk(RandomWalkEnv),
    TempControl(TempControlEnv),
    FourTank(FourTankEnv),
}

impl EnvKind {
    fn as_env(&self) -> &dyn Environment {
        match self {
            EnvKind::RandomWalk(e) => e,
            EnvKind::TempControl(e) => e,
            EnvKind::FourTank(e) => e,
        }
    }
}

/// Opaque environment handle owning its deterministic random streams.
pub struct AssistrlEnv {
    env: EnvKind,
    init: RngStream,
    dynamics: RngStream,
}

fn boxed_env(env: EnvKind, seed: u64, out: *mut *mut AssistrlEnv) -> AssistrlStatus {
    let handle = AssistrlEnv {
        env,
        init: RngStream::for_run(seed, 0, StreamPurpose::InitState),
        dynamics: RngStream::for_run(seed, 0, StreamPurpose::DynamicsNoise),
    };
    unsafe { write_out(out, Box::into_raw(Box::new(handle))) }
}

/// Creates a random-walk environment sized by its total state count
/// (terminals included: 5, 11, 33, ...).
///
/// # Safety
/// `out` must be a valid pointer to an environment-handle slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_random_walk(
    total_states: usize,
    seed: u64,
    out: *mut *mut AssistrlEnv,
) -> AssistrlStatus {
    match RandomWalkEnv::from_total_states(total_states) {
        Ok(env) => boxed_env(EnvKind::RandomWalk(env), seed, out),
        Err(e) => status_from(&e),
    }
}

/// Creates the three-source temperature-control environment.
///
/// # Safety
/// `out` must be a valid pointer to an environment-handle slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_temp_control(
    omega: f64,
    seed: u64,
    out: *mut *mut AssistrlEnv,
) -> AssistrlStatus {
    match TempControlEnv::new(omega) {
        Ok(env) => boxed_env(EnvKind::TempControl(env), seed, out),
        Err(e) => status_from(&e),
    }
}

/// Creates the four-tank environment. `coeffs` is either null (library
/// defaults) or a pointer to 10 positive model coefficients.
///
/// # Safety
/// `coeffs` must be null or point to 10 readable f64 values; `out` must be a
/// valid pointer to an environment-handle slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_four_tank(
    coeffs: *const f64,
    omega: f64,
    seed: u64,
    out: *mut *mut AssistrlEnv,
) -> AssistrlStatus {
    let build = if coeffs.is_null() {
        FourTankEnv::new()
    } else {
        let mut c = [0.0; 10];
        unsafe { std::ptr::copy_nonoverlapping(coeffs, c.as_mut_ptr(), 10) };
        FourTankEnv::with_coeffs(c)
    };
    match build.and_then(|env| env.with_omega(omega)) {
        Ok(env) => boxed_env(EnvKind::FourTank(env), seed, out),
        Err(e) => status_from(&e),
    }
}

/// State vector length of the environment.
///
/// # Safety
/// `env` must be a live environment handle; `out` must be a valid slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_state_dim(
    env: *const AssistrlEnv,
    out: *mut usize,
) -> AssistrlStatus {
    if env.is_null() {
        set_error("environment handle is null");
        return AssistrlStatus::NullPointer;
    }
    let dim = unsafe { &*env }.env.as_env().spec().state_dim;
    unsafe { write_out(out, dim) }
}

/// Action vector length of the environment (0 for the random walk).
///
/// # Safety
/// `env` must be a live environment handle; `out` must be a valid slot.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_action_dim(
    env: *const AssistrlEnv,
    out: *mut usize,
) -> AssistrlStatus {
    if env.is_null() {
        set_error("environment handle is null");
        return AssistrlStatus::NullPointer;
    }
    let dim = unsafe { &*env }.env.as_env().spec().action_dim;
    unsafe { write_out(out, dim) }
}

/// Samples an initial state into `state_out` (length `state_len ==
/// state_dim`), advancing the handle's init stream.
///
/// # Safety
/// `env` must be a live environment handle; `state_out` must point to
/// `state_len` writable f64 values.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_reset(
    env: *mut AssistrlEnv,
    state_out: *mut f64,
    state_len: usize,
) -> AssistrlStatus {
    if env.is_null() || state_out.is_null() {
        set_error("null pointer argument");
        return AssistrlStatus::NullPointer;
    }
    let handle = unsafe { &mut *env };
    let dim = handle.env.as_env().spec().state_dim;
    if state_len != dim {
        set_error("state buffer length does not match state_dim");
        return AssistrlStatus::DimensionMismatch;
    }
    let state = handle.env.as_env().reset(&mut handle.init);
    unsafe { std::ptr::copy_nonoverlapping(state.as_ptr(), state_out, dim) };
    AssistrlStatus::Ok
}

/// Advances one transition, writing the successor state and both rewards.
///
/// # Safety
/// `env` must be a live environment handle; `state` must point to
/// `state_len` readable values, `action` to `action_len` readable values
/// (`action_len == 0` with a null `action` is valid for the random walk);
/// `next_state_out` must hold `state_len` writable values and the three
/// scalar out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_step(
    env: *mut AssistrlEnv,
    state: *const f64,
    state_len: usize,
    action: *const f64,
    action_len: usize,
    next_state_out: *mut f64,
    r_target_out: *mut f64,
    r_assist_out: *mut f64,
    terminated_out: *mut bool,
) -> AssistrlStatus {
    if env.is_null()
        || state.is_null()
        || next_state_out.is_null()
        || r_target_out.is_null()
        || r_assist_out.is_null()
        || terminated_out.is_null()
        || (action.is_null() && action_len != 0)
    {
        set_error("null pointer argument");
        return AssistrlStatus::NullPointer;
    }
    let handle = unsafe { &mut *env };
    let state_slice = unsafe { std::slice::from_raw_parts(state, state_len) };
    let action_slice = if action_len == 0 {
        &[][..]
    } else {
        unsafe { std::slice::from_raw_parts(action, action_len) }
    };
    match handle
        .env
        .as_env()
        .step(state_slice, action_slice, &mut handle.dynamics)
    {
        Ok(step) => {
            unsafe {
                std::ptr::copy_nonoverlapping(
                    step.next_state.as_ptr(),
                    next_state_out,
                    step.next_state.len(),
                );
                *r_target_out = step.r_target;
                *r_assist_out = step.r_assist;
                *terminated_out = step.terminated;
            }
            AssistrlStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}

/// Releases an environment handle; a null pointer is a no-op.
///
/// # Safety
/// `env` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn assistrl_env_free(env: *mut AssistrlEnv) {
    if !env.is_null() {
        drop(unsafe { Box::from_raw(env) });
    }
}

/// Exact state values of the random walk under the target reward, solved
/// from the Bellman system. `values_out` must hold `total_states - 2`
/// entries (the non-terminal states).
///
/// # Safety
/// `values_out` must point to `values_len` writable f64 values.
#[no_mangle]
pub unsafe extern "C" fn assistrl_random_walk_true_values(
    total_states: usize,
    values_out: *mut f64,
    values_len: usize,
) -> AssistrlStatus {
    if values_out.is_null() {
        set_error("values_out is null");
        return AssistrlStatus::NullPointer;
    }
    let env = match RandomWalkEnv::from_total_states(total_states) {
        Ok(env) => env,
        Err(e) => return status_from(&e),
    };
    if values_len != env.n_nonterminal() {
        set_error("values buffer must hold total_states - 2 entries");
        return AssistrlStatus::DimensionMismatch;
    }
    let values = env.true_values(RewardChoice::Target);
    unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), values_out, values.len()) };
    AssistrlStatus::Ok
}

/// Root-mean-square deviation between two equally sized vectors.
///
/// # Safety
/// `a` and `b` must point to `len` readable f64 values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn assistrl_rms_error(
    a: *const f64,
    b: *const f64,
    len: usize,
    out: *mut f64,
) -> AssistrlStatus {
    if a.is_null() || b.is_null() {
        set_error("null pointer argument");
        return AssistrlStatus::NullPointer;
    }
    let av = unsafe { std::slice::from_raw_parts(a, len) };
    let bv = unsafe { std::slice::from_raw_parts(b, len) };
    match rms_error(av, bv) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => status_from(&e),
    }
}

/// Runs the tabular TD(0) experiment on a random walk and writes the
/// per-episode RMS curve (mean over `runs` seeded runs) into `curve_out`
/// (`curve_len == episodes`).
///
/// # Safety
/// `sched` must be a live schedule handle; `curve_out` must point to
/// `curve_len` writable f64 values.
#[no_mangle]
pub unsafe extern "C" fn assistrl_td_mean_rms_curve(
    total_states: usize,
    sched: *const AssistrlSchedule,
    episodes: usize,
    runs: usize,
    alpha: f64,
    master_seed: u64,
    curve_out: *mut f64,
    curve_len: usize,
) -> AssistrlStatus {
    if sched.is_null() || curve_out.is_null() {
        set_error("null pointer argument");
        return AssistrlStatus::NullPointer;
    }
    if curve_len != episodes {
        set_error("curve buffer length must equal episodes");
        return AssistrlStatus::DimensionMismatch;
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        set_error("alpha must lie in (0, 1]");
        return AssistrlStatus::InvalidArgument;
    }
    let env = match RandomWalkEnv::from_total_states(total_states) {
        Ok(env) => env,
        Err(e) => return status_from(&e),
    };
    let schedule = unsafe { &(*sched).inner };
    match run_td_experiment(
        &env,
        schedule,
        episodes,
        runs,
        StepSize::Constant(alpha),
        master_seed,
    ) {
        Ok(result) => {
            unsafe {
                std::ptr::copy_nonoverlapping(result.mean_rms.as_ptr(), curve_out, episodes)
            };
            AssistrlStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}
