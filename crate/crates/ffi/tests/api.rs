use std::ffi::CStr;
use std::ptr;

use sepscan_ffi::*;

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn new_state(amps: &[(f64, f64)]) -> *mut SepscanState {
    let flat: Vec<f64> = amps.iter().flat_map(|&(re, im)| [re, im]).collect();
    let mut s = ptr::null_mut();
    let st = unsafe { sepscan_state_new(flat.as_ptr(), amps.len(), &mut s) };
    assert_eq!(st, SepscanStatus::Ok);
    assert!(!s.is_null());
    s
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { sepscan_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

/// `|0> (x) Bell` on qubits A2 A3.
fn zero_bell() -> Vec<(f64, f64)> {
    let mut a = vec![(0.0, 0.0); 8];
    a[0] = (R, 0.0);
    a[3] = (R, 0.0);
    a
}

#[test]
fn state_round_trip_and_qubits() {
    let s = new_state(&zero_bell());
    let mut n = 0;
    assert_eq!(
        unsafe { sepscan_state_qubits(s, &mut n) },
        SepscanStatus::Ok
    );
    assert_eq!(n, 3);
    unsafe { sepscan_state_free(s) };
    unsafe { sepscan_state_free(ptr::null_mut()) };
}

#[test]
fn single_and_block_verdicts() {
    let s = new_state(&zero_bell());
    let (mut sep, mut xi) = (false, 0.0);
    unsafe {
        assert_eq!(
            sepscan_one_part_separable(s, 1, SEPSCAN_DEFAULT_TOLERANCE, &mut sep, &mut xi),
            SepscanStatus::Ok
        );
        assert!(sep);
        assert!((xi - 1.0).abs() < 1e-12);
        assert_eq!(
            sepscan_one_part_separable(s, 2, SEPSCAN_DEFAULT_TOLERANCE, &mut sep, &mut xi),
            SepscanStatus::Ok
        );
        assert!(!sep);
        assert!(xi.abs() < 1e-12);

        let mut residual = 1.0;
        let block = [2usize, 3];
        assert_eq!(
            sepscan_block_separable(
                s,
                block.as_ptr(),
                2,
                SEPSCAN_DEFAULT_TOLERANCE,
                &mut sep,
                &mut residual
            ),
            SepscanStatus::Ok
        );
        assert!(sep);
        assert!(residual.abs() < 1e-12);

        assert_eq!(
            sepscan_fully_separable(s, SEPSCAN_DEFAULT_TOLERANCE, &mut sep),
            SepscanStatus::Ok
        );
        assert!(!sep);
        sepscan_state_free(s);
    }
}

#[test]
fn schmidt_coefficients_with_buffer_protocol() {
    let s = new_state(&zero_bell());
    let block = [3usize];
    let mut len = 0;
    let mut small = [0.0f64; 1];
    let mut big = [0.0f64; 4];
    unsafe {
        assert_eq!(
            sepscan_schmidt_coefficients(s, block.as_ptr(), 1, small.as_mut_ptr(), 1, &mut len),
            SepscanStatus::BufferTooSmall
        );
        assert_eq!(len, 2);
        assert!(last_error().contains("need 2"));
        assert_eq!(
            sepscan_schmidt_coefficients(
                s,
                block.as_ptr(),
                1,
                big.as_mut_ptr(),
                big.len(),
                &mut len
            ),
            SepscanStatus::Ok
        );
        sepscan_state_free(s);
    }
    assert!((big[0] - R).abs() < 1e-12 && (big[1] - R).abs() < 1e-12);
}

#[test]
fn factorization_handle() {
    let s = new_state(&zero_bell());
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(
            sepscan_factorize(s, SEPSCAN_DEFAULT_TOLERANCE, &mut f),
            SepscanStatus::Ok
        );
        let mut count = 0;
        assert_eq!(
            sepscan_factorization_block_count(f, &mut count),
            SepscanStatus::Ok
        );
        assert_eq!(count, 2);

        let mut labels = [0usize; 3];
        let mut len = 0;
        let mut ent = true;
        assert_eq!(
            sepscan_factorization_block_labels(f, 0, labels.as_mut_ptr(), 3, &mut len),
            SepscanStatus::Ok
        );
        assert_eq!(&labels[..len], &[1]);
        assert_eq!(
            sepscan_factorization_block_entangled(f, 0, &mut ent),
            SepscanStatus::Ok
        );
        assert!(!ent);
        assert_eq!(
            sepscan_factorization_block_labels(f, 1, labels.as_mut_ptr(), 3, &mut len),
            SepscanStatus::Ok
        );
        assert_eq!(&labels[..len], &[2, 3]);
        assert_eq!(
            sepscan_factorization_block_entangled(f, 1, &mut ent),
            SepscanStatus::Ok
        );
        assert!(ent);

        assert_eq!(
            sepscan_factorization_block_labels(f, 2, labels.as_mut_ptr(), 3, &mut len),
            SepscanStatus::InvalidInput
        );
        sepscan_factorization_free(f);
        sepscan_state_free(s);
    }
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    let seven = [0.0f64; 14];
    unsafe {
        assert_eq!(
            sepscan_state_new(seven.as_ptr(), 7, &mut s),
            SepscanStatus::InvalidInput
        );
        assert!(last_error().contains("power of two"));
        let zeros = [0.0f64; 8];
        assert_eq!(
            sepscan_state_new(zeros.as_ptr(), 4, &mut s),
            SepscanStatus::InvalidInput
        );
        assert_eq!(
            sepscan_state_new(ptr::null(), 4, &mut s),
            SepscanStatus::NullPointer
        );
        assert!(s.is_null());

        let mut n = 0;
        assert_eq!(
            sepscan_state_qubits(ptr::null(), &mut n),
            SepscanStatus::NullPointer
        );

        let st = new_state(&zero_bell());
        let mut sep = false;
        let mut xi = 0.0;
        assert_eq!(
            sepscan_one_part_separable(st, 4, 1e-9, &mut sep, &mut xi),
            SepscanStatus::InvalidInput
        );
        assert_eq!(
            sepscan_one_part_separable(st, 1, -1.0, &mut sep, &mut xi),
            SepscanStatus::InvalidInput
        );
        assert!(last_error().contains("tolerance"));
        let all = [1usize, 2, 3];
        let mut r = 0.0;
        assert_eq!(
            sepscan_block_separable(st, all.as_ptr(), 3, 1e-9, &mut sep, &mut r),
            SepscanStatus::InvalidInput
        );
        assert_eq!(
            sepscan_one_part_separable(st, 1, 1e-9, ptr::null_mut(), &mut xi),
            SepscanStatus::NullPointer
        );
        sepscan_state_free(st);
    }
}

#[test]
fn too_large_state() {
    let amps = vec![0.0f64; 2 << 15];
    let mut amps = amps;
    amps[0] = 1.0;
    let mut s = ptr::null_mut();
    let st = unsafe { sepscan_state_new(amps.as_ptr(), 1 << 15, &mut s) };
    assert_eq!(st, SepscanStatus::TooLarge);
}

#[test]
fn errors_are_per_thread() {
    let mut s = ptr::null_mut();
    let zeros = [0.0f64; 4];
    assert_eq!(
        unsafe { sepscan_state_new(zeros.as_ptr(), 2, &mut s) },
        SepscanStatus::InvalidInput
    );
    let other = std::thread::spawn(|| unsafe { sepscan_last_error_message(ptr::null_mut(), 0) })
        .join()
        .unwrap();
    assert_eq!(other, 0);
    assert!(last_error().contains("zero"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sepscan_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sepscan.h")).unwrap();
    for name in [
        "sepscan_state_new",
        "sepscan_state_free",
        "sepscan_state_qubits",
        "sepscan_one_part_separable",
        "sepscan_block_separable",
        "sepscan_fully_separable",
        "sepscan_schmidt_coefficients",
        "sepscan_factorize",
        "sepscan_factorization_free",
        "sepscan_factorization_block_count",
        "sepscan_factorization_block_labels",
        "sepscan_factorization_block_entangled",
        "sepscan_last_error_message",
        "sepscan_version",
        "SEPSCAN_STATUS_BUFFER_TOO_SMALL",
        "typedef struct SepscanState SepscanState",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
