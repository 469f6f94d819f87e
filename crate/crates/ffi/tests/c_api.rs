use std::ffi::{CStr, CString};
use std::ptr;

use stefan_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(stefan_last_error()) }.to_string_lossy().into_owned()
}

fn circle(order: usize, r: f64) -> Vec<f64> {
    let mut c = vec![0.0; 2 * order + 1];
    c[order] = r;
    c
}

fn forward_params(coeffs: &[f64], order: usize, steps: usize, preset: StefanPreset) -> StefanForwardParams {
    StefanForwardParams {
        dt: 0.05,
        steps,
        order,
        boundary_vertices: 32,
        rings: 4,
        initial_coeffs: coeffs.as_ptr(),
        preset: preset as i32,
        um_values: ptr::null(),
    }
}

#[test]
fn forward_then_reconstruct_round_trips() {
    let mut coeffs = circle(3, 1.0);
    coeffs[5] = 0.05;
    coeffs[1] = -0.03;
    let params = forward_params(&coeffs, 3, 10, StefanPreset::Quadratic);
    let mut tube = ptr::null_mut();
    unsafe {
        assert_eq!(stefan_forward(&params, &mut tube), StefanStatus::Ok, "{}", last_error());
        assert_eq!(stefan_tube_record_count(tube), 11);
        assert_eq!(stefan_tube_order(tube), 3);
        assert_eq!(stefan_tube_dt(tube), 0.05);

        let mut t = 0.0;
        let mut buf = [0.0; 7];
        assert_eq!(stefan_tube_record(tube, 0, &mut t, buf.as_mut_ptr(), 7), StefanStatus::Ok);
        assert_eq!(t, 0.0);
        assert_eq!(buf.to_vec(), coeffs);

        let inverse = StefanInverseParams {
            order: 3,
            boundary_vertices: 32,
            rings: 4,
            um0: 0.3125,
        };
        let mut schedule = ptr::null_mut();
        assert_eq!(stefan_reconstruct(tube, &inverse, &mut schedule), StefanStatus::Ok, "{}", last_error());
        let n = stefan_schedule_len(schedule);
        assert_eq!(n, 11);
        let mut values = vec![0.0; n];
        let mut slopes = vec![0.0; n - 1];
        assert_eq!(
            stefan_schedule_get(schedule, n, ptr::null_mut(), values.as_mut_ptr(), slopes.as_mut_ptr(), ptr::null_mut()),
            StefanStatus::Ok
        );
        for (k, a) in slopes.iter().enumerate() {
            let want = ((0.05 * (k + 1) as f64 - 2.5f64).powi(2) - (0.05 * k as f64 - 2.5f64).powi(2)) / 20.0 / 0.05;
            assert!((a - want).abs() < 1e-8, "{k}: {a} vs {want}");
        }
        stefan_schedule_free(schedule);
        stefan_tube_free(tube);
    }
}

#[test]
fn files_and_noise() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs: Vec<f64> = [circle(2, 1.0), circle(2, 1.1), circle(2, 1.2)].concat();
    let mut tube = ptr::null_mut();
    unsafe {
        assert_eq!(stefan_tube_new(0.0, 0.1, 2, 3, coeffs.as_ptr(), &mut tube), StefanStatus::Ok);
        let mut noisy = ptr::null_mut();
        assert_eq!(stefan_tube_add_noise(tube, 0.01, 9, &mut noisy), StefanStatus::Ok);
        let path = CString::new(dir.path().join("noisy.csv").to_str().unwrap()).unwrap();
        assert_eq!(stefan_tube_write(noisy, path.as_ptr()), StefanStatus::Ok);
        let text = std::fs::read_to_string(dir.path().join("noisy.csv")).unwrap();
        assert!(text.starts_with("# stefan-tube v1, M=2, dt=0.1, delta=0.01, seed=9"));

        let mut back = ptr::null_mut();
        assert_eq!(stefan_tube_read(path.as_ptr(), &mut back), StefanStatus::Ok);
        let (mut t1, mut t2) = (0.0, 0.0);
        let (mut a, mut b) = ([0.0; 5], [0.0; 5]);
        for k in 0..3 {
            stefan_tube_record(noisy, k, &mut t1, a.as_mut_ptr(), 5);
            stefan_tube_record(back, k, &mut t2, b.as_mut_ptr(), 5);
            assert_eq!((t1, a), (t2, b));
        }
        stefan_tube_free(back);
        stefan_tube_free(noisy);
        stefan_tube_free(tube);
    }
}

#[test]
fn errors_are_reported_with_codes() {
    unsafe {
        let mut tube = ptr::null_mut();
        assert_eq!(stefan_forward(ptr::null(), &mut tube), StefanStatus::NullPointer);
        assert!(tube.is_null());
        assert!(last_error().contains("params"));

        let coeffs = circle(3, 1.0);
        let mut params = forward_params(&coeffs, 3, 4, StefanPreset::Cosine);
        params.boundary_vertices = 6;
        assert_eq!(stefan_forward(&params, &mut tube), StefanStatus::InvalidArgument);
        assert!(!last_error().is_empty());

        params.boundary_vertices = 32;
        params.preset = 7;
        assert_eq!(stefan_forward(&params, &mut tube), StefanStatus::InvalidArgument);
        params.preset = StefanPreset::Custom as i32;
        assert_eq!(stefan_forward(&params, &mut tube), StefanStatus::NullPointer);

        let bad = circle(3, -1.0);
        let params = forward_params(&bad, 3, 4, StefanPreset::Cosine);
        assert_eq!(stefan_forward(&params, &mut tube), StefanStatus::NonPositiveRadius);

        let missing = CString::new("/nonexistent/dir/tube.csv").unwrap();
        assert_eq!(stefan_tube_read(missing.as_ptr(), &mut tube), StefanStatus::Io);

        let dir = tempfile::tempdir().unwrap();
        let garbage = dir.path().join("bad.csv");
        std::fs::write(&garbage, "not a tube\n").unwrap();
        let garbage = CString::new(garbage.to_str().unwrap()).unwrap();
        assert_eq!(stefan_tube_read(garbage.as_ptr(), &mut tube), StefanStatus::Parse);

        let coeffs = [circle(2, 1.0), circle(2, 1.0)].concat();
        assert_eq!(stefan_tube_new(0.0, 0.1, 2, 2, coeffs.as_ptr(), &mut tube), StefanStatus::Ok);
        let mut t = 0.0;
        let mut small = [0.0; 2];
        assert_eq!(stefan_tube_record(tube, 0, &mut t, small.as_mut_ptr(), 2), StefanStatus::InvalidArgument);
        assert_eq!(stefan_tube_record(tube, 5, &mut t, small.as_mut_ptr(), 5), StefanStatus::InvalidArgument);
        stefan_tube_free(tube);

        assert_eq!(stefan_tube_record_count(ptr::null()), 0);
        assert!(stefan_tube_dt(ptr::null()).is_nan());
        stefan_tube_free(ptr::null_mut());
        stefan_schedule_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_the_last_error() {
    unsafe {
        let mut tube = ptr::null_mut();
        stefan_forward(ptr::null(), &mut tube);
        assert!(!last_error().is_empty());
        let coeffs = [circle(1, 1.0), circle(1, 1.0)].concat();
        assert_eq!(stefan_tube_new(0.0, 0.1, 1, 2, coeffs.as_ptr(), &mut tube), StefanStatus::Ok);
        assert!(last_error().is_empty());
        stefan_tube_free(tube);
    }
}
