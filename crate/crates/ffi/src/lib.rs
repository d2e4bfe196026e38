//! C interface to `structlight`.
//!
//! Beams and maps are opaque handles created and destroyed through this
//! interface. Every fallible call returns an [`SlStatus`]; on failure the
//! message is kept per thread and can be read with
//! [`sl_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use structlight::beam::{
    make_radial_azimuthal, sample_field, Backend, BeamError, BeamSpec, DerivativeOrder, Sigma,
    VectorBeamKind,
};
use structlight::coupling::{Convention, Geometry, Multipole, StrengthFunctional, TransitionSpec};
use structlight::scan::{run_scan, MapDataset, ScanConfig};
use structlight::special::{clebsch_gordan, wigner_small_d, HalfInt};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Multipole order of a transition.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlMultipole {
    E1 = 0,
    E2DeltaJ1 = 1,
    E2DeltaJ2 = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SlComplex {
    pub re: f64,
    pub im: f64,
}

/// Field value and Jacobian; `jacobian[3 * i + j] = d_i E_j`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SlFieldSample {
    pub e: [SlComplex; 3],
    pub jacobian: [SlComplex; 9],
}

/// Quantization-axis tilt: rotation by `theta_rad` about the unit vector `axis`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlGeometry {
    pub theta_rad: f64,
    pub axis: [f64; 3],
}

/// Sub-transition `|j1 m1> -> |j2 m2>`, all quantum numbers doubled.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlTransition {
    pub twice_j1: i32,
    pub twice_m1: i32,
    pub twice_j2: i32,
    pub twice_m2: i32,
    pub multipole: SlMultipole,
}

/// Opaque beam handle.
pub struct SlBeam(BeamSpec);

/// Opaque map handle.
pub struct SlMap(MapDataset);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: SlStatus, msg: impl Into<String>) -> SlStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SlStatus) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SlStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn c(v: Complex64) -> SlComplex {
    SlComplex { re: v.re, im: v.im }
}

fn sigma(s: i32) -> Result<Sigma, BeamError> {
    Sigma::try_from(i64::from(s))
}

fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SlStatus> {
    if p.is_null() {
        return Err(fail(SlStatus::NullPointer, "null string argument"));
    }
    // SAFETY: caller passes a NUL-terminated string that outlives the call.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(SlStatus::InvalidArgument, "string argument is not UTF-8"))
}

fn store<T>(out: *mut *mut T, value: T) -> SlStatus {
    // SAFETY: `out` was checked for null by the caller.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SlStatus::Ok
}

fn make_beam(
    out: *mut *mut SlBeam,
    build: impl FnOnce() -> Result<BeamSpec, BeamError>,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "null output handle");
        }
        match build() {
            Ok(b) => store(out, SlBeam(b)),
            Err(e) => fail(SlStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the length the full message needs, including
/// the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: `buf` is valid for `len >= n + 1` bytes.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Laguerre-Gauss beam. Lengths in metres, `sigma` in {-1, 0, 1}.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_lg(
    l: i32,
    p: u32,
    sigma_index: i32,
    wavelength: f64,
    waist: f64,
    out: *mut *mut SlBeam,
) -> SlStatus {
    make_beam(out, || {
        BeamSpec::lg(l, p, sigma(sigma_index)?, wavelength, waist)
    })
}

/// Hermite-Gauss beam.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_hg(
    m: u32,
    n: u32,
    sigma_index: i32,
    wavelength: f64,
    waist: f64,
    out: *mut *mut SlBeam,
) -> SlStatus {
    make_beam(out, || {
        BeamSpec::hg(m, n, sigma(sigma_index)?, wavelength, waist)
    })
}

/// Radially polarized beam.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_radial(
    wavelength: f64,
    waist: f64,
    out: *mut *mut SlBeam,
) -> SlStatus {
    make_beam(out, || {
        make_radial_azimuthal(VectorBeamKind::Radial, waist, wavelength)
    })
}

/// Azimuthally polarized beam.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_azimuthal(
    wavelength: f64,
    waist: f64,
    out: *mut *mut SlBeam,
) -> SlStatus {
    make_beam(out, || {
        make_radial_azimuthal(VectorBeamKind::Azimuthal, waist, wavelength)
    })
}

/// Beam from its JSON description (the `beam.spec` object of a sidecar).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_from_json(json: *const c_char, out: *mut *mut SlBeam) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "null output handle");
        }
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<BeamSpec>(text) {
            Ok(b) => store(out, SlBeam(b)),
            Err(e) => fail(SlStatus::InvalidArgument, format!("beam JSON: {e}")),
        }
    })
}

/// Releases a beam. Null is ignored.
///
/// # Safety
/// `beam` must come from one of the `sl_beam_*` constructors and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_free(beam: *mut SlBeam) {
    if !beam.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(beam) });
    }
}

/// Field value and Jacobian at `(x, y, z)` in metres, by the analytic backend.
///
/// # Safety
/// `beam` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_beam_field(
    beam: *const SlBeam,
    x: f64,
    y: f64,
    z: f64,
    out: *mut SlFieldSample,
) -> SlStatus {
    guard(|| {
        if beam.is_null() || out.is_null() {
            return fail(SlStatus::NullPointer, "null beam or output");
        }
        // SAFETY: checked for null; validity is the caller's contract.
        let beam = unsafe { &(*beam).0 };
        let s = match sample_field(beam, [x, y, z], DerivativeOrder::First, Backend::Auto) {
            Ok(s) => s,
            Err(e) => return fail(SlStatus::Numerical, e.to_string()),
        };
        if !s.is_finite() {
            return fail(
                SlStatus::Numerical,
                format!("non-finite field at ({x}, {y}, {z})"),
            );
        }
        let mut r = SlFieldSample::default();
        for j in 0..3 {
            r.e[j] = c(s.e[j]);
            for i in 0..3 {
                r.jacobian[3 * i + j] = c(s.jacobian[i][j]);
            }
        }
        // SAFETY: checked for null.
        unsafe { *out = r };
        SlStatus::Ok
    })
}

fn transition(t: &SlTransition) -> Result<TransitionSpec, SlStatus> {
    let multipole = match t.multipole {
        SlMultipole::E1 => Multipole::E1,
        SlMultipole::E2DeltaJ1 => Multipole::E2DeltaJ1,
        SlMultipole::E2DeltaJ2 => Multipole::E2DeltaJ2,
    };
    let h = HalfInt::from_twice;
    TransitionSpec::new(
        h(t.twice_j1),
        h(t.twice_m1),
        h(t.twice_j2),
        h(t.twice_m2),
        multipole,
    )
    .map_err(|e| fail(SlStatus::InvalidArgument, e.to_string()))
}

/// Relative transition strength at `(x, y, z)`. A null `geometry` means an
/// untilted quantization axis along `z`.
///
/// # Safety
/// `beam` and `trans` must be valid, `geometry` null or valid, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_strength(
    beam: *const SlBeam,
    x: f64,
    y: f64,
    z: f64,
    trans: *const SlTransition,
    geometry: *const SlGeometry,
    out: *mut SlComplex,
) -> SlStatus {
    guard(|| {
        if beam.is_null() || trans.is_null() || out.is_null() {
            return fail(SlStatus::NullPointer, "null beam, transition or output");
        }
        // SAFETY: checked for null.
        let (beam, trans) = unsafe { (&(*beam).0, &*trans) };
        let trans = match transition(trans) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let geom = if geometry.is_null() {
            Geometry::default()
        } else {
            // SAFETY: checked for null.
            let g = unsafe { &*geometry };
            match Geometry::new(g.theta_rad, g.axis) {
                Ok(g) => g,
                Err(e) => return fail(SlStatus::InvalidArgument, e.to_string()),
            }
        };
        let f = StrengthFunctional::new(&trans, &geom, Convention::Covariant);
        let s = match sample_field(
            beam,
            [x, y, z],
            trans.multipole().field_order(),
            Backend::Auto,
        ) {
            Ok(s) => s,
            Err(e) => return fail(SlStatus::Numerical, e.to_string()),
        };
        let mu = f.evaluate(&s);
        if !mu.is_finite() {
            return fail(SlStatus::Numerical, "non-finite strength");
        }
        // SAFETY: checked for null.
        unsafe { *out = c(mu) };
        SlStatus::Ok
    })
}

/// `<j1 m1; j2 m2 | j m>` with doubled quantum numbers.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_clebsch_gordan(
    twice_j1: i32,
    twice_m1: i32,
    twice_j2: i32,
    twice_m2: i32,
    twice_j: i32,
    twice_m: i32,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "null output");
        }
        let h = HalfInt::from_twice;
        match clebsch_gordan(
            h(twice_j1),
            h(twice_m1),
            h(twice_j2),
            h(twice_m2),
            h(twice_j),
            h(twice_m),
        ) {
            // SAFETY: checked for null.
            Ok(v) => unsafe {
                *out = v;
                SlStatus::Ok
            },
            Err(e) => fail(SlStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Wigner small-d element `d^j_{m_out, m_in}(theta)` with doubled quantum numbers.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_wigner_small_d(
    twice_j: i32,
    twice_m_out: i32,
    twice_m_in: i32,
    theta: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "null output");
        }
        let h = HalfInt::from_twice;
        match wigner_small_d(h(twice_j), h(twice_m_out), h(twice_m_in), theta) {
            // SAFETY: checked for null.
            Ok(v) => unsafe {
                *out = v;
                SlStatus::Ok
            },
            Err(e) => fail(SlStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Runs one scan described by a JSON scan configuration
/// (`grid`, `beam`, `observable`, optional `backend` and `keep_complex`).
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_scan_from_json(
    config_json: *const c_char,
    out: *mut *mut SlMap,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "null output handle");
        }
        let text = match str_arg(config_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config: ScanConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(SlStatus::InvalidArgument, format!("scan JSON: {e}")),
        };
        match run_scan(&config) {
            Ok(map) => store(out, SlMap(map)),
            Err(e) => {
                let status = if e.is_numerical() {
                    SlStatus::Numerical
                } else {
                    SlStatus::InvalidArgument
                };
                fail(status, e.to_string())
            }
        }
    })
}

/// Grid size of a map.
///
/// # Safety
/// `map` must be a live handle; `nx` and `ny` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_map_dims(
    map: *const SlMap,
    nx: *mut usize,
    ny: *mut usize,
) -> SlStatus {
    if map.is_null() || nx.is_null() || ny.is_null() {
        return fail(SlStatus::NullPointer, "null map or output");
    }
    // SAFETY: checked for null.
    unsafe {
        let g = (*map).0.grid();
        *nx = g.nx;
        *ny = g.ny;
    }
    SlStatus::Ok
}

/// Global maximum of the raw moduli (zero for an identically zero map).
///
/// # Safety
/// `map` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_map_scale_factor(map: *const SlMap, out: *mut f64) -> SlStatus {
    if map.is_null() || out.is_null() {
        return fail(SlStatus::NullPointer, "null map or output");
    }
    // SAFETY: checked for null.
    unsafe { *out = (*map).0.scale_factor };
    SlStatus::Ok
}

/// Copies the normalized values, row-major with `y` outer, into `buf`.
///
/// # Safety
/// `map` must be a live handle; `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_map_values(map: *const SlMap, buf: *mut f64, len: usize) -> SlStatus {
    if map.is_null() || buf.is_null() {
        return fail(SlStatus::NullPointer, "null map or buffer");
    }
    // SAFETY: checked for null.
    let values = unsafe { &(*map).0.values };
    if len < values.len() {
        return fail(
            SlStatus::BufferTooSmall,
            format!("buffer holds {len} values, map has {}", values.len()),
        );
    }
    // SAFETY: `buf` is valid for at least `values.len()` doubles.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    SlStatus::Ok
}

/// Releases a map. Null is ignored.
///
/// # Safety
/// `map` must come from [`sl_scan_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sl_map_free(map: *mut SlMap) {
    if !map.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(map) });
    }
}
