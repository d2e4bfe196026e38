use std::ffi::{c_char, CStr, CString};
use std::ptr;

use structlight_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let need = unsafe { sl_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(need >= 1);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

const LAMBDA: f64 = 0.729e-6;
const WAIST: f64 = 1e-6;

#[test]
fn beam_lifecycle_and_field() {
    let mut beam: *mut SlBeam = ptr::null_mut();
    assert_eq!(
        unsafe { sl_beam_lg(1, 0, -1, LAMBDA, WAIST, &mut beam) },
        SlStatus::Ok
    );
    let mut s = SlFieldSample::default();
    assert_eq!(
        unsafe { sl_beam_field(beam, 0.0, 0.0, 0.0, &mut s) },
        SlStatus::Ok
    );
    // The anti-aligned vortex has a longitudinal field on axis and no
    // transverse one.
    assert!(s.e[2].re.hypot(s.e[2].im) > 0.0);
    assert!(s.e[0].re.hypot(s.e[0].im) < 1e-12);
    unsafe { sl_beam_free(beam) };
    unsafe { sl_beam_free(ptr::null_mut()) };
}

#[test]
fn azimuthal_beam_has_no_longitudinal_field() {
    let mut beam = ptr::null_mut();
    assert_eq!(
        unsafe { sl_beam_azimuthal(LAMBDA, WAIST, &mut beam) },
        SlStatus::Ok
    );
    let mut s = SlFieldSample::default();
    assert_eq!(
        unsafe { sl_beam_field(beam, 0.31e-6, -0.52e-6, 0.0, &mut s) },
        SlStatus::Ok
    );
    let transverse = s.e[0].re.hypot(s.e[0].im).max(s.e[1].re.hypot(s.e[1].im));
    assert!(s.e[2].re.hypot(s.e[2].im) < 1e-12 * transverse);
    unsafe { sl_beam_free(beam) };
}

#[test]
fn strengths_follow_the_selection_rule_on_axis() {
    let mut beam = ptr::null_mut();
    assert_eq!(
        unsafe { sl_beam_lg(1, 0, 1, LAMBDA, WAIST, &mut beam) },
        SlStatus::Ok
    );
    let mut values = Vec::new();
    for dm in -2..=2 {
        let t = SlTransition {
            twice_j1: 1,
            twice_m1: 1,
            twice_j2: 5,
            twice_m2: 1 + 2 * dm,
            multipole: SlMultipole::E2DeltaJ2,
        };
        let mut mu = SlComplex::default();
        assert_eq!(
            unsafe { sl_strength(beam, 0.0, 0.0, 0.0, &t, ptr::null(), &mut mu) },
            SlStatus::Ok
        );
        values.push(mu.re.hypot(mu.im));
    }
    assert!(values[4] > 0.0);
    assert!(values[..4].iter().all(|v| *v == 0.0));

    let bad = SlTransition {
        twice_j1: 1,
        twice_m1: 3,
        twice_j2: 5,
        twice_m2: 1,
        multipole: SlMultipole::E2DeltaJ2,
    };
    let mut mu = SlComplex::default();
    assert_eq!(
        unsafe { sl_strength(beam, 0.0, 0.0, 0.0, &bad, ptr::null(), &mut mu) },
        SlStatus::InvalidArgument
    );
    assert!(last_error().contains("projection"));

    let tilt = SlGeometry {
        theta_rad: 0.5,
        axis: [0.0, 2.0, 0.0],
    };
    let t = SlTransition {
        twice_j1: 1,
        twice_m1: 1,
        twice_j2: 5,
        twice_m2: 1,
        multipole: SlMultipole::E2DeltaJ2,
    };
    assert_eq!(
        unsafe { sl_strength(beam, 0.0, 0.0, 0.0, &t, &tilt, &mut mu) },
        SlStatus::InvalidArgument
    );
    unsafe { sl_beam_free(beam) };
}

#[test]
fn angular_momentum_helpers() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { sl_clebsch_gordan(2, 0, 2, 0, 0, 0, &mut v) },
        SlStatus::Ok
    );
    assert!((v + 1.0 / 3f64.sqrt()).abs() < 1e-12);
    assert_eq!(
        unsafe { sl_clebsch_gordan(2, 4, 2, 0, 0, 0, &mut v) },
        SlStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { sl_wigner_small_d(2, 2, 2, 0.7, &mut v) },
        SlStatus::Ok
    );
    assert!((v - (1.0 + 0.7f64.cos()) / 2.0).abs() < 1e-14);
    assert_eq!(
        unsafe { sl_wigner_small_d(2, 2, 2, 0.7, ptr::null_mut()) },
        SlStatus::NullPointer
    );
}

#[test]
fn scan_through_json() {
    let mut beam = ptr::null_mut();
    unsafe { sl_beam_radial(LAMBDA, WAIST, &mut beam) };
    let config = format!(
        r#"{{"grid": {{"x_min": -2e-6, "x_max": 2e-6, "y_min": -2e-6, "y_max": 2e-6, "nx": 9, "ny": 7, "z": 0.0}},
            "beam": {},
            "observable": {{"kind": "field", "component": "Ez"}}}}"#,
        r#"{"terms": [{"weight": [0.7071067811865476, 0.0], "mode": {"family": "lg", "l": 1, "p": 0, "sigma": -1}},
                     {"weight": [0.7071067811865476, 0.0], "mode": {"family": "lg", "l": -1, "p": 0, "sigma": 1}}],
            "wavelength_m": 0.729e-6, "waist_m": 1e-6, "amplitude": 1.0}"#
    );
    let text = CString::new(config).unwrap();
    let mut map = ptr::null_mut();
    let status = unsafe { sl_scan_from_json(text.as_ptr(), &mut map) };
    assert_eq!(status, SlStatus::Ok, "{}", last_error());
    let (mut nx, mut ny) = (0, 0);
    assert_eq!(unsafe { sl_map_dims(map, &mut nx, &mut ny) }, SlStatus::Ok);
    assert_eq!((nx, ny), (9, 7));
    let mut small = vec![0.0; 10];
    assert_eq!(
        unsafe { sl_map_values(map, small.as_mut_ptr(), small.len()) },
        SlStatus::BufferTooSmall
    );
    let mut values = vec![0.0; nx * ny];
    assert_eq!(
        unsafe { sl_map_values(map, values.as_mut_ptr(), values.len()) },
        SlStatus::Ok
    );
    // Radial polarization peaks in E_z on the axis, the centre node here.
    assert_eq!(values[3 * 9 + 4], 1.0);
    let mut scale = 0.0;
    assert_eq!(
        unsafe { sl_map_scale_factor(map, &mut scale) },
        SlStatus::Ok
    );
    assert!(scale > 0.0);
    unsafe { sl_map_free(map) };
    unsafe { sl_beam_free(beam) };

    let junk = CString::new(r#"{"grid": 1}"#).unwrap();
    let mut map = ptr::null_mut();
    assert_eq!(
        unsafe { sl_scan_from_json(junk.as_ptr(), &mut map) },
        SlStatus::InvalidArgument
    );
    assert!(map.is_null());
}

#[test]
fn invalid_arguments_are_reported() {
    let mut beam = ptr::null_mut();
    assert_eq!(
        unsafe { sl_beam_lg(1, 0, 2, LAMBDA, WAIST, &mut beam) },
        SlStatus::InvalidArgument
    );
    assert!(beam.is_null());
    assert_eq!(
        unsafe { sl_beam_lg(1, 0, 1, LAMBDA, WAIST, ptr::null_mut()) },
        SlStatus::NullPointer
    );
    assert_eq!(
        unsafe { sl_beam_from_json(ptr::null(), &mut beam) },
        SlStatus::NullPointer
    );
    let need = unsafe { sl_last_error_message(ptr::null_mut(), 0) };
    assert_eq!(need, last_error().len() + 1);
    let version = unsafe { CStr::from_ptr(sl_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/structlight.h"
    ))
    .unwrap();
    for name in [
        "sl_last_error_message",
        "sl_version",
        "sl_beam_lg",
        "sl_beam_hg",
        "sl_beam_radial",
        "sl_beam_azimuthal",
        "sl_beam_from_json",
        "sl_beam_free",
        "sl_beam_field",
        "sl_strength",
        "sl_clebsch_gordan",
        "sl_wigner_small_d",
        "sl_scan_from_json",
        "sl_map_dims",
        "sl_map_scale_factor",
        "sl_map_values",
        "sl_map_free",
        "typedef struct SlBeam SlBeam",
        "SL_STATUS_BUFFER_TOO_SMALL = 4",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
