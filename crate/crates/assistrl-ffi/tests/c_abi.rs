//! Exercises the C ABI exactly as a foreign caller would: through raw
//! pointers and status codes.

use std::ffi::CStr;
use std::ptr;

use assistrl_ffi::*;

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(assistrl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn schedule_lifecycle_and_values() {
    let mut sched: *mut AssistrlSchedule = ptr::null_mut();
    let status = unsafe { assistrl_schedule_linear(1.0, 4000, &mut sched) };
    assert_eq!(status, AssistrlStatus::Ok);
    let mut beta = f64::NAN;
    unsafe {
        assert_eq!(
            assistrl_schedule_beta_at(sched, 2000, &mut beta),
            AssistrlStatus::Ok
        );
    }
    assert_eq!(beta, 0.5);
    unsafe {
        assert_eq!(
            assistrl_schedule_beta_at(sched, 4000, &mut beta),
            AssistrlStatus::Ok
        );
    }
    assert_eq!(beta, 0.0);
    unsafe { assistrl_schedule_free(sched) };
}

#[test]
fn invalid_schedule_parameters_report_errors() {
    let mut sched: *mut AssistrlSchedule = ptr::null_mut();
    let status = unsafe { assistrl_schedule_exponential(1.5, 0.9, &mut sched) };
    assert_eq!(status, AssistrlStatus::InvalidArgument);
    let msg = unsafe { CStr::from_ptr(assistrl_last_error_message()) };
    assert!(msg.to_str().unwrap().contains("beta0"));
    assert!(sched.is_null());
}

#[test]
fn blend_validates_beta() {
    let mut out = f64::NAN;
    assert_eq!(
        unsafe { assistrl_blend(-1.0, -100.0, 0.5, &mut out) },
        AssistrlStatus::Ok
    );
    assert_eq!(out, -50.5);
    assert_eq!(
        unsafe { assistrl_blend(0.0, 0.0, 1.5, &mut out) },
        AssistrlStatus::InvalidArgument
    );
}

#[test]
fn random_walk_env_round_trip() {
    let mut env: *mut AssistrlEnv = ptr::null_mut();
    assert_eq!(
        unsafe { assistrl_env_random_walk(5, 42, &mut env) },
        AssistrlStatus::Ok
    );
    let mut state_dim = 0usize;
    let mut action_dim = 99usize;
    unsafe {
        assert_eq!(assistrl_env_state_dim(env, &mut state_dim), AssistrlStatus::Ok);
        assert_eq!(assistrl_env_action_dim(env, &mut action_dim), AssistrlStatus::Ok);
    }
    assert_eq!(state_dim, 1);
    assert_eq!(action_dim, 0);

    let mut state = [f64::NAN];
    unsafe {
        assert_eq!(assistrl_env_reset(env, state.as_mut_ptr(), 1), AssistrlStatus::Ok);
    }
    assert_eq!(state[0], 2.0); // center of the 3 interior states

    let mut next = [f64::NAN];
    let (mut rt, mut ra, mut term) = (f64::NAN, f64::NAN, false);
    let status = unsafe {
        assistrl_env_step(
            env,
            state.as_ptr(),
            1,
            ptr::null(),
            0,
            next.as_mut_ptr(),
            &mut rt,
            &mut ra,
            &mut term,
        )
    };
    assert_eq!(status, AssistrlStatus::Ok);
    assert!((next[0] - state[0]).abs() == 1.0);
    assert!(rt == 0.0 || rt == 1.0);

    // Stepping from a terminal is a contract violation through the ABI too.
    let terminal = [0.0f64];
    let status = unsafe {
        assistrl_env_step(
            env,
            terminal.as_ptr(),
            1,
            ptr::null(),
            0,
            next.as_mut_ptr(),
            &mut rt,
            &mut ra,
            &mut term,
        )
    };
    assert_eq!(status, AssistrlStatus::ContractViolation);
    unsafe { assistrl_env_free(env) };
}

#[test]
fn temp_control_env_dimensions_and_rewards() {
    let mut env: *mut AssistrlEnv = ptr::null_mut();
    assert_eq!(
        unsafe { assistrl_env_temp_control(1.0, 7, &mut env) },
        AssistrlStatus::Ok
    );
    let state = [0.0f64; 3];
    let action = [1.0f64; 3];
    let mut next = [f64::NAN; 3];
    let (mut rt, mut ra, mut term) = (f64::NAN, f64::NAN, true);
    let status = unsafe {
        assistrl_env_step(
            env,
            state.as_ptr(),
            3,
            action.as_ptr(),
            3,
            next.as_mut_ptr(),
            &mut rt,
            &mut ra,
            &mut term,
        )
    };
    assert_eq!(status, AssistrlStatus::Ok);
    assert!((rt - -3.0).abs() < 1e-9);
    assert_eq!(ra, 0.0);
    assert!(!term);
    unsafe { assistrl_env_free(env) };
}

#[test]
fn four_tank_null_coeffs_use_defaults() {
    let mut env: *mut AssistrlEnv = ptr::null_mut();
    assert_eq!(
        unsafe { assistrl_env_four_tank(ptr::null(), 1.0, 3, &mut env) },
        AssistrlStatus::Ok
    );
    let mut state = [f64::NAN; 4];
    unsafe {
        assert_eq!(assistrl_env_reset(env, state.as_mut_ptr(), 4), AssistrlStatus::Ok);
    }
    assert!(state.iter().all(|s| (3.0..=30.0).contains(s)));
    unsafe { assistrl_env_free(env) };

    let bad = [0.0f64; 10];
    let status = unsafe { assistrl_env_four_tank(bad.as_ptr(), 1.0, 3, &mut env) };
    assert_eq!(status, AssistrlStatus::InvalidArgument);
}

#[test]
fn true_values_and_rms_through_the_abi() {
    let mut values = [f64::NAN; 3];
    assert_eq!(
        unsafe { assistrl_random_walk_true_values(5, values.as_mut_ptr(), 3) },
        AssistrlStatus::Ok
    );
    for (v, e) in values.iter().zip([0.25, 0.5, 0.75]) {
        assert!((v - e).abs() < 1e-12);
    }
    let zeros = [0.0f64; 3];
    let mut rms = f64::NAN;
    assert_eq!(
        unsafe { assistrl_rms_error(zeros.as_ptr(), values.as_ptr(), 3, &mut rms) },
        AssistrlStatus::Ok
    );
    assert!((rms - (0.875f64 / 3.0).sqrt()).abs() < 1e-12);

    // Wrong buffer length is a dimension error.
    assert_eq!(
        unsafe { assistrl_random_walk_true_values(5, values.as_mut_ptr(), 2) },
        AssistrlStatus::DimensionMismatch
    );
}

#[test]
fn td_curve_is_deterministic_through_the_abi() {
    let mut sched: *mut AssistrlSchedule = ptr::null_mut();
    unsafe {
        assert_eq!(
            assistrl_schedule_exponential(1.0, 0.95, &mut sched),
            AssistrlStatus::Ok
        );
    }
    let mut a = vec![0.0f64; 20];
    let mut b = vec![0.0f64; 20];
    for curve in [&mut a, &mut b] {
        let status = unsafe {
            assistrl_td_mean_rms_curve(5, sched, 20, 10, 0.1, 99, curve.as_mut_ptr(), 20)
        };
        assert_eq!(status, AssistrlStatus::Ok);
    }
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    assert!(a[19] < a[0]);
    unsafe { assistrl_schedule_free(sched) };
}

#[test]
fn null_pointers_are_rejected_not_dereferenced() {
    let mut out = f64::NAN;
    assert_eq!(
        unsafe { assistrl_schedule_beta_at(ptr::null(), 0, &mut out) },
        AssistrlStatus::NullPointer
    );
    assert_eq!(
        unsafe { assistrl_env_state_dim(ptr::null(), ptr::null_mut()) },
        AssistrlStatus::NullPointer
    );
    unsafe {
        assistrl_env_free(ptr::null_mut());
        assistrl_schedule_free(ptr::null_mut());
    }
}
