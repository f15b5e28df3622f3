//! Properties of the boundary solve and the phase decomposition over random
//! rails, suspensions and frequencies.

use proptest::prelude::*;
#[path = "support/checks.rs"]
mod checks;

use checks::{boundary_residuals, max_abs_shape};
use railnoise_core::{
    hz_to_omega, Complex64, phase_response_exact, solve_amplitudes, CrossSection, InterferometerSpec,
    Material, RailSpec, SuspensionEnd, SuspensionSpec,
};

fn rail_strategy() -> impl Strategy<Value = RailSpec> {
    (1e9f64..3e11, 1000f64..9000.0, 1e-3f64..5e-2, 0.05f64..0.9, 0.2f64..3.0).prop_map(
        |(e, rho, area, i_frac, half)| {
            // I_y below A²/12·(aspect) keeps the section physical.
            let i_y = i_frac * area * area / 4.0;
            RailSpec::new(
                Material::new(e, rho).unwrap(),
                CrossSection::new(area, i_y).unwrap(),
                half,
            )
            .unwrap()
        },
    )
}

fn end_strategy() -> impl Strategy<Value = SuspensionEnd> {
    (1e3f64..1e8, 1f64..5e3).prop_map(|(k, mu)| SuspensionEnd::new(k, mu).unwrap())
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1f64..1.0, -1f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn nu_strategy() -> impl Strategy<Value = f64> {
    (-1f64..3.7).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn boundary_conditions_hold(
        rail in rail_strategy(),
        minus in end_strategy(),
        plus in end_strategy(),
        nu in nu_strategy(),
        xm in complex(),
        xp in complex(),
    ) {
        let susp = SuspensionSpec::new(minus, plus, None).unwrap();
        let omega = hz_to_omega(nu);
        let amps = solve_amplitudes(&rail, &susp, omega, xm, xp).unwrap();
        let (torque, force) = boundary_residuals(&rail, [minus, plus], &amps, omega, [xm, xp]);
        prop_assert!(torque < 1e-9, "torque residual {torque}");
        prop_assert!(force < 1e-9, "force residual {force}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn superposition(
        rail in rail_strategy(),
        minus in end_strategy(),
        plus in end_strategy(),
        nu in nu_strategy(),
        x1 in (complex(), complex()),
        x2 in (complex(), complex()),
        k in complex(),
    ) {
        let susp = SuspensionSpec::new(minus, plus, None).unwrap();
        let omega = hz_to_omega(nu);
        let s1 = solve_amplitudes(&rail, &susp, omega, x1.0, x1.1).unwrap();
        let s2 = solve_amplitudes(&rail, &susp, omega, x2.0, x2.1).unwrap();
        let s = solve_amplitudes(&rail, &susp, omega, x1.0 * k + x2.0, x1.1 * k + x2.1).unwrap();
        let half = rail.half_length;
        let scale = max_abs_shape(&s1, half) * k.norm() + max_abs_shape(&s2, half);
        for i in 0..=10 {
            let z = -half + 0.2 * half * i as f64;
            let lin = s1.shape(z).unwrap() * k + s2.shape(z).unwrap();
            prop_assert!((s.shape(z).unwrap() - lin).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn mirror_symmetry(
        rail in rail_strategy(),
        end in end_strategy(),
        nu in nu_strategy(),
        xm in complex(),
        xp in complex(),
    ) {
        let susp = SuspensionSpec::symmetric(end, None).unwrap();
        let omega = hz_to_omega(nu);
        let s = solve_amplitudes(&rail, &susp, omega, xm, xp).unwrap();
        let m = solve_amplitudes(&rail, &susp, omega, xp, xm).unwrap();
        let half = rail.half_length;
        let scale = max_abs_shape(&s, half);
        for i in 0..=10 {
            let z = -half + 0.2 * half * i as f64;
            prop_assert!((m.shape(z).unwrap() - s.shape(-z).unwrap()).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn separation_of_odd_and_even_parts(
        rail in rail_strategy(),
        end in end_strategy(),
        nu in nu_strategy(),
        xm in complex(),
        xp in complex(),
        shift in complex(),
    ) {
        let susp = SuspensionSpec::symmetric(end, None).unwrap();
        let omega = hz_to_omega(nu);
        let s = solve_amplitudes(&rail, &susp, omega, xm, xp).unwrap();
        // Same difference, different sum: a and c unchanged.
        let t = solve_amplitudes(&rail, &susp, omega, xm + shift, xp + shift).unwrap();
        prop_assert!((s.a - t.a).norm() <= 1e-12 * s.a.norm().max(t.a.norm()).max(1e-300));
        prop_assert!((s.c - t.c).norm() <= 1e-12 * s.c.norm().max(t.c.norm()).max(1e-300));
        // Same sum, different difference: b and d unchanged.
        let u = solve_amplitudes(&rail, &susp, omega, xm - shift, xp + shift).unwrap();
        prop_assert!((s.b - u.b).norm() <= 1e-12 * s.b.norm().max(u.b.norm()).max(1e-300));
        prop_assert!((s.d - u.d).norm() <= 1e-12 * s.d.norm().max(u.d.norm()).max(1e-300));
    }

    #[test]
    fn phase_parts_close(
        rail in rail_strategy(),
        minus in end_strategy(),
        plus in end_strategy(),
        nu in nu_strategy(),
        l12_frac in 0.05f64..1.0,
        u in 100f64..3000.0,
        p in 1u32..6,
        xm in complex(),
        xp in complex(),
    ) {
        let susp = SuspensionSpec::new(minus, plus, None).unwrap();
        let ifm = InterferometerSpec::new(1.8727e7, l12_frac * rail.half_length, u, p).unwrap();
        let parts = phase_response_exact(&rail, &susp, &ifm, hz_to_omega(nu), xm, xp).unwrap();
        prop_assert!((parts.sum_of_parts() - parts.total).norm() <= 1e-12 * parts.total.norm(), "{parts:?}");
    }
}
