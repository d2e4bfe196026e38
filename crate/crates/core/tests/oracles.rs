//! Independent oracles: exact rational arithmetic for the polynomials and
//! Clebsch-Gordan coefficients, a matrix exponential for rotation matrices,
//! finite differences for field derivatives, and frozen spot values.

use std::f64::consts::{PI, SQRT_2};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use structlight::beam::{
    fd_hessian, fd_jacobian, hg_mode, lg_mode, sample_field, Backend, BeamPreset, BeamSpec,
    DerivativeOrder, FieldComponents, FieldSource, Sigma, FD_STEP_WAVELENGTHS,
};
use structlight::coupling::{Convention, Geometry, Multipole, StrengthFunctional, TransitionSpec};
use structlight::motion::{lamb_dicke, zero_point_length, LambDicke, ATOMIC_MASS_UNIT};
use structlight::scan::{
    compare_maps, run_scan, run_scans, Component, Grid, Observable, ScanConfig,
};
use structlight::special::{
    clebsch_gordan, gauss_hermite, hermite, laguerre, wigner_big_d_matrix, wigner_small_d_matrix,
    HalfInt,
};

const LAMBDA: f64 = 0.729e-6;
const WAIST: f64 = 1e-6;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fact(n: i64) -> BigRational {
    (1..=n).fold(BigRational::one(), |acc, k| acc * rat(k, 1))
}

fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

fn exact_laguerre(p: i64, alpha: i64, x: &BigRational) -> BigRational {
    // Explicit sum: sum_k (-1)^k C(p + alpha, p - k) x^k / k!
    let mut sum = BigRational::zero();
    let mut xk = BigRational::one();
    for k in 0..=p {
        let binom = fact(p + alpha) / (fact(p - k) * fact(alpha + k));
        let term = binom * xk.clone() / fact(k);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        xk *= x.clone();
    }
    sum
}

fn exact_hermite(n: i64, x: &BigRational) -> BigRational {
    // n! sum_m (-1)^m (2x)^(n - 2m) / (m! (n - 2m)!)
    let two_x = x.clone() * rat(2, 1);
    let mut sum = BigRational::zero();
    for m in 0..=n / 2 {
        let mut pow = BigRational::one();
        for _ in 0..n - 2 * m {
            pow *= two_x.clone();
        }
        let term = pow / (fact(m) * fact(n - 2 * m));
        if m % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum * fact(n)
}

#[test]
fn polynomials_match_exact_sums() {
    for &(num, den) in &[(0, 1), (1, 3), (3, 2), (7, 3), (5, 1), (-4, 5)] {
        let xr = rat(num, den);
        let x = num as f64 / den as f64;
        for n in 0..=14 {
            let want = to_f64(&exact_hermite(n, &xr));
            let got = hermite(n as u32, x);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "H_{n}({x}): {got} vs {want}"
            );
        }
        if num < 0 {
            continue;
        }
        for p in 0..=10 {
            for alpha in 0..=4 {
                let want = to_f64(&exact_laguerre(p, alpha, &xr));
                let got = laguerre(p as u32, alpha as u32, x);
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "L_{p}^{alpha}({x}): {got} vs {want}"
                );
            }
        }
    }
}

/// Clebsch-Gordan from the explicit sum, in exact arithmetic up to the final
/// square root. Arguments are doubled quantum numbers.
fn exact_cg(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || j > j1 + j2 || j < (j1 - j2).abs() || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    let h = |t: i64| t / 2;
    let pre = rat(j + 1, 1) * fact(h(j + j1 - j2)) * fact(h(j - j1 + j2)) * fact(h(j1 + j2 - j))
        / fact(h(j1 + j2 + j) + 1)
        * fact(h(j + m))
        * fact(h(j - m))
        * fact(h(j1 - m1))
        * fact(h(j1 + m1))
        * fact(h(j2 - m2))
        * fact(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in 0..=(j1 + j2 + j) {
        let args = [
            k,
            h(j1 + j2 - j) - k,
            h(j1 - m1) - k,
            h(j2 + m2) - k,
            h(j - j2 + m1) + k,
            h(j - j1 - m2) + k,
        ];
        if args.iter().any(|a| *a < 0) {
            continue;
        }
        let term = args
            .iter()
            .fold(BigRational::one(), |acc, a| acc * fact(*a))
            .recip();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    sign * (to_f64(&(sum.clone() * sum)) * to_f64(&pre)).sqrt()
}

#[test]
fn clebsch_gordan_matches_exact_formula() {
    let hi = HalfInt::from_twice;
    for j1 in 0..=6 {
        for j2 in 0..=6 {
            for j in ((j1 - j2) as i64).abs()..=(j1 + j2) as i64 {
                if (j1 as i64 + j2 as i64 + j) % 2 != 0 {
                    continue;
                }
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        let m = m1 + m2;
                        if m.abs() as i64 > j {
                            continue;
                        }
                        let got =
                            clebsch_gordan(hi(j1), hi(m1), hi(j2), hi(m2), hi(j as i32), hi(m))
                                .unwrap();
                        let want =
                            exact_cg(j1 as i64, m1 as i64, j2 as i64, m2 as i64, j, m as i64);
                        assert!(
                            (got - want).abs() < 1e-13,
                            "{j1} {m1} {j2} {m2} {j} {m}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }
}

type CMat = Vec<Vec<Complex64>>;

fn matmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `exp(-i theta n.J)` by scaling and squaring a Taylor series, in the basis
/// `m = -j ..= j`.
fn rotation_by_exponential(twice_j: i32, axis: [f64; 3], theta: f64) -> CMat {
    let dim = (twice_j + 1) as usize;
    let j = f64::from(twice_j) / 2.0;
    let ms: Vec<f64> = (0..dim).map(|k| -j + k as f64).collect();
    let mut gen = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for a in 0..dim {
        gen[a][a] += axis[2] * ms[a];
        if a + 1 < dim {
            // <m+1| J+ |m>
            let up = (j * (j + 1.0) - ms[a] * (ms[a] + 1.0)).sqrt();
            let jx = 0.5 * up;
            let jy = Complex64::new(0.0, -0.5 * up);
            gen[a + 1][a] += axis[0] * jx + axis[1] * jy;
            gen[a][a + 1] += axis[0] * jx + axis[1] * jy.conj();
        }
    }
    let squarings = 10;
    let scale = Complex64::new(0.0, -theta / f64::from(1 << squarings));
    let a: CMat = gen
        .iter()
        .map(|r| r.iter().map(|v| v * scale).collect())
        .collect();
    let mut result: CMat = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|k| Complex64::new(f64::from(u8::from(i == k)), 0.0))
                .collect()
        })
        .collect();
    let mut term = result.clone();
    for n in 1..30 {
        term = matmul(&term, &a);
        term.iter_mut().flatten().for_each(|v| *v /= n as f64);
        for (r, t) in result.iter_mut().flatten().zip(term.iter().flatten()) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

#[test]
fn rotation_matrices_match_the_exponential() {
    let axes = [
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.48, -0.6, 0.64],
        [-0.36, 0.48, 0.8],
    ];
    for twice_j in 0..=8 {
        for theta in [0.0, 0.3, PI / 4.0, PI / 2.0, 2.7, -1.9] {
            let small = wigner_small_d_matrix(HalfInt::from_twice(twice_j), theta).unwrap();
            let want = rotation_by_exponential(twice_j, [0.0, 1.0, 0.0], theta);
            for (r, row) in small.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    assert!(
                        (want[r][c] - v).norm() < 1e-12,
                        "j={twice_j}/2 theta={theta} [{r}][{c}]"
                    );
                }
            }
            for axis in axes {
                let big = wigner_big_d_matrix(HalfInt::from_twice(twice_j), axis, theta).unwrap();
                let want = rotation_by_exponential(twice_j, axis, theta);
                for (r, row) in big.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        assert!(
                            (want[r][c] - v).norm() < 1e-12,
                            "j={twice_j}/2 axis={axis:?} theta={theta}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn gauss_hermite_integrates_moments() {
    for n in [1usize, 2, 5, 16, 24] {
        let (x, w) = gauss_hermite(n);
        for k in 0..(2 * n).min(30) {
            let got: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(k as i32))
                .sum();
            let size: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| (wi * xi.powi(k as i32)).abs())
                .sum();
            // int x^k exp(-x^2) = Gamma((k+1)/2) for even k: (k-1)!! sqrt(pi) / 2^(k/2)
            let want = if k % 2 == 1 {
                0.0
            } else {
                let dfact: f64 = (1..k).step_by(2).map(|v| v as f64).product();
                dfact * PI.sqrt() / 2f64.powi(k as i32 / 2)
            };
            assert!(
                (got - want).abs() <= 1e-12 * size,
                "n={n} k={k}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn frozen_spot_values() {
    let close = |a: f64, b: f64, tol: f64| assert!((a / b - 1.0).abs() < tol, "{a} vs {b}");
    let mass = 40.0 * ATOMIC_MASS_UNIT;
    let omega = 2.0 * PI * 1e6;
    close(
        zero_point_length(mass, omega).unwrap(),
        1.124031815421366e-8,
        1e-12,
    );
    close(
        lamb_dicke(
            LambDicke::Longitudinal {
                wavenumber: 2.0 * PI / LAMBDA,
            },
            mass,
            omega,
        )
        .unwrap(),
        0.09687928926554079,
        1e-12,
    );
    close(
        lamb_dicke(LambDicke::Transverse { waist: WAIST }, mass, omega).unwrap(),
        0.01589621037907747,
        1e-12,
    );

    let k = 2.0 * PI / LAMBDA;
    close(
        lg_mode(0, 0, 1.0, k, [0.0; 3]).re,
        0.7978845608028654,
        1e-14,
    );
    close(
        lg_mode(0, 0, 1.0, k, [1.0, 0.0, 0.0]).re,
        0.2935253263474798,
        1e-14,
    );
    close(
        hg_mode(1, 0, 1.0, k, [0.5, 0.0, 0.0]).re,
        0.6213931207538555,
        1e-14,
    );
    assert_eq!(laguerre(2, 0, 3.0), -0.5);
    assert_eq!(hermite(3, 1.0), -4.0);
}

fn beams() -> Vec<BeamSpec> {
    let b = |p: BeamPreset, s: Sigma| p.build(s, LAMBDA, WAIST).unwrap();
    vec![
        b(BeamPreset::Gaussian, Sigma::Plus),
        b(BeamPreset::Hg { m: 1, n: 0 }, Sigma::Linear),
        b(BeamPreset::Lg { l: 1, p: 0 }, Sigma::Plus),
        b(BeamPreset::Lg { l: -2, p: 1 }, Sigma::Minus),
        b(BeamPreset::Radial, Sigma::Plus),
        b(BeamPreset::Azimuthal, Sigma::Plus),
    ]
}

#[test]
fn field_value_routes_agree() {
    // The jet route and the elementary route evaluate the same field.
    let points = [
        [0.0, 0.0, 0.0],
        [0.3e-6, -0.8e-6, 0.4e-6],
        [0.7e-6, 0.0, 0.0],
        [1.3e-6, 0.2e-6, -2e-6],
    ];
    for beam in beams() {
        let scale = points
            .iter()
            .flat_map(|&p| beam.field(p))
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        for p in points {
            let jet = sample_field(&beam, p, DerivativeOrder::Value, Backend::Analytic)
                .unwrap()
                .e;
            for (a, b) in jet.iter().zip(&beam.field(p)) {
                assert!((a - b).norm() < 1e-11 * scale, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn fields_are_divergence_free_to_the_paraxial_order() {
    // The longitudinal component is built so that div E vanishes at leading
    // order; what is left is small compared with k |E|.
    for beam in beams() {
        for p in [[0.2e-6, 0.1e-6, 0.0], [-0.5e-6, 0.7e-6, 0.3e-6]] {
            let s = sample_field(&beam, p, DerivativeOrder::First, Backend::Analytic).unwrap();
            let e = s.e.iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(s.divergence().norm() < 0.2 * beam.wavenumber() * e);
        }
    }
}

#[test]
fn analytic_and_finite_difference_maps_agree() {
    let grid = Grid::square(2.0 * WAIST, 24, 0.3e-6);
    let transition = TransitionSpec::new(
        HalfInt::from_twice(1),
        HalfInt::from_twice(1),
        HalfInt::from_twice(5),
        HalfInt::from_twice(3),
        Multipole::E2DeltaJ2,
    )
    .unwrap();
    let observables = [
        Observable::Field {
            component: Component::SigmaPlus,
        },
        Observable::Strength {
            transition,
            geometry: Geometry::about_y(0.5),
            convention: Convention::Covariant,
        },
    ];
    for beam in beams() {
        let a = run_scans(&grid, &beam, &observables, Backend::Analytic, false).unwrap();
        let f = run_scans(&grid, &beam, &observables, Backend::FiniteDifference, false).unwrap();
        for (x, y) in a.iter().zip(&f) {
            let d = compare_maps(x, y).unwrap();
            assert!(
                d.max_abs_diff < 1e-6,
                "{:?}: {}",
                beam.terms(),
                d.max_abs_diff
            );
        }
    }
}

#[test]
fn aligned_vortex_ring_sits_at_the_lg_radius() {
    // |LG_10| peaks at rho = w0 / sqrt2 in the focal plane.
    let beam = BeamSpec::lg(1, 0, Sigma::Plus, LAMBDA, WAIST).unwrap();
    let map = run_scan(&ScanConfig {
        grid: Grid {
            x_min: 0.0,
            x_max: 1.5 * WAIST,
            y_min: -1e-12,
            y_max: 1e-12,
            nx: 1501,
            ny: 2,
            z: 0.0,
        },
        beam,
        observable: Observable::Field {
            component: Component::SigmaPlus,
        },
        backend: Backend::Auto,
        keep_complex: false,
    })
    .unwrap();
    let (i, _) = map.argmax();
    assert!((map.grid().x(i) - WAIST / SQRT_2).abs() < 2e-9);
}

#[test]
fn components_project_circular_light() {
    let beam = BeamSpec::lg(0, 0, Sigma::Plus, LAMBDA, WAIST).unwrap();
    let c = FieldComponents::from_field(&beam.field([0.0; 3]));
    assert!(c.sigma_minus.norm() < 1e-15 * c.sigma_plus.norm());
    let beam = BeamSpec::lg(0, 0, Sigma::Minus, LAMBDA, WAIST).unwrap();
    let c = FieldComponents::from_field(&beam.field([0.0; 3]));
    assert!(c.sigma_plus.norm() < 1e-15 * c.sigma_minus.norm());
}

#[test]
fn axis_relabelling_only_permutes_channels() {
    // Rotating the quantization axis by 2 pi about any axis is the identity,
    // and a pi rotation about z maps the dm channel onto itself up to the phase
    // (-1)^dm.
    let beam = BeamSpec::hg(1, 0, Sigma::Plus, LAMBDA, WAIST).unwrap();
    let s = sample_field(
        &beam,
        [0.3e-6, -0.2e-6, 0.1e-6],
        DerivativeOrder::First,
        Backend::Analytic,
    )
    .unwrap();
    for dm in -2..=2 {
        let t = TransitionSpec::new(
            HalfInt::from_twice(1),
            HalfInt::from_twice(1),
            HalfInt::from_twice(5),
            HalfInt::from_twice(1 + 2 * dm),
            Multipole::E2DeltaJ2,
        )
        .unwrap();
        let f = StrengthFunctional::new(&t, &Geometry::default(), Convention::Covariant);
        let base = f.evaluate(&s);
        let tol = 1e-12 * f.term_magnitude(&s);
        let full = StrengthFunctional::new(
            &t,
            &Geometry::new(2.0 * PI, [0.48, -0.6, 0.64]).unwrap(),
            Convention::Covariant,
        )
        .evaluate(&s);
        assert!((full - base).norm() < tol, "{full} vs {base}");
        let half = StrengthFunctional::new(
            &t,
            &Geometry::new(PI, [0.0, 0.0, 1.0]).unwrap(),
            Convention::Covariant,
        )
        .evaluate(&s);
        let phase = if dm % 2 == 0 { 1.0 } else { -1.0 };
        assert!((half - phase * base).norm() < tol, "dm={dm}");
    }
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_derivatives_match_finite_differences(
        which in 0usize..6,
        x in -1.8f64..1.8, y in -1.8f64..1.8, z in -1.0f64..1.0,
    ) {
        let beam = &beams()[which];
        let p = [x * WAIST, y * WAIST, z * WAIST];
        let s = sample_field(beam, p, DerivativeOrder::Second, Backend::Analytic).unwrap();
        let step = FD_STEP_WAVELENGTHS * LAMBDA;
        let fj = fd_jacobian(beam, p, step);
        let fh = fd_hessian(beam, p, step);
        let aj: Vec<Complex64> = s.jacobian.iter().flatten().copied().collect();
        let bj: Vec<Complex64> = fj.iter().flatten().copied().collect();
        prop_assert!(rel_err(&aj, &bj) < 1e-6);
        let ah: Vec<Complex64> = s.hessian.iter().flatten().flatten().copied().collect();
        let bh: Vec<Complex64> = fh.iter().flatten().flatten().copied().collect();
        prop_assert!(rel_err(&ah, &bh) < 1e-5);
    }

    #[test]
    fn hessian_is_symmetric_in_the_derivative_slots(which in 0usize..6, x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let beam = &beams()[which];
        let s = sample_field(beam, [x * WAIST, y * WAIST, 0.2 * WAIST], DerivativeOrder::Second, Backend::Analytic).unwrap();
        let scale = s.hessian.iter().flatten().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        for p in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((s.hessian[p][i][j] - s.hessian[i][p][j]).norm() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn scaling_the_amplitude_leaves_normalized_maps_unchanged(a in 0.01f64..100.0) {
        let beam = BeamSpec::lg(1, 0, Sigma::Minus, LAMBDA, WAIST).unwrap();
        let scaled = beam.clone().with_amplitude(a).unwrap();
        let cfg = |b: BeamSpec| ScanConfig {
            grid: Grid::square(1.5 * WAIST, 9, 0.0),
            beam: b,
            observable: Observable::Field { component: Component::Ez },
            backend: Backend::Auto,
            keep_complex: false,
        };
        let m1 = run_scan(&cfg(beam)).unwrap();
        let m2 = run_scan(&cfg(scaled)).unwrap();
        prop_assert!(compare_maps(&m1, &m2).unwrap().max_abs_diff < 1e-13);
        prop_assert!((m2.scale_factor / m1.scale_factor / a - 1.0).abs() < 1e-13);
    }
}
