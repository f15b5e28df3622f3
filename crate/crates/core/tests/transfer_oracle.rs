//! The exact transfer checked against a direct transcription of the closed
//! form for identical ends: unscaled boundary coefficients, `a` and `b` from
//! them, and the three-line phase expression.

use proptest::prelude::*;
use railnoise_core::{
    hz_to_omega, Complex64, phase_response_exact, CrossSection, InterferometerSpec, Material, RailSpec,
    SuspensionEnd, SuspensionSpec,
};

#[path = "support/checks.rs"]
mod checks;

use checks::{closed_form_phase, SymmetricEnds};

#[derive(Debug)]
struct Case {
    rail: RailSpec,
    susp: SuspensionSpec,
    ifm: InterferometerSpec,
    ends: SymmetricEnds,
}

fn closed_form(case: &Case, omega: f64, xm: Complex64, xp: Complex64) -> [Complex64; 3] {
    closed_form_phase(&case.rail, case.ends, &case.ifm, omega, xm, xp)
}

fn case_strategy() -> impl Strategy<Value = (Case, f64, Complex64, Complex64)> {
    (
        (5e9f64..2e11, 1500f64..9000.0, 0.4f64..1.2),
        (1e4f64..1e7, 10f64..2000.0, 20f64..120.0),
        (0.15f64..1.0, 300f64..2000.0, 1u32..4),
        (0f64..(2000f64).log10()),
        (-1f64..1.0, -1f64..1.0, -1f64..1.0, -1f64..1.0),
    )
        .prop_map(|((e, rho, half), (k, mu, mass), (l12_frac, u, p), log_nu, (a, b, c, d))| {
            let rail = RailSpec::new(
                Material::new(e, rho).unwrap(),
                CrossSection::new(1.49e-2, 3.3e-5).unwrap(),
                half,
            )
            .unwrap();
            let susp =
                SuspensionSpec::symmetric(SuspensionEnd::new(k, mu).unwrap(), Some(mass)).unwrap();
            let ifm = InterferometerSpec::new(1.8727e7, l12_frac * half, u, p).unwrap();
            let case = Case { rail, susp, ifm, ends: SymmetricEnds { stiffness: k, damping: mu, mass } };
            (case, 10f64.powf(log_nu), Complex64::new(a, b), Complex64::new(c, d))
        })
}

// The bending line cancels to O((κL₁₂)²(κL)²) at low frequency, so both sides
// lose digits there; parts are compared against the size of the whole phase.
fn close(got: Complex64, want: Complex64, reference: f64) -> bool {
    (got - want).norm() <= 1e-10 * want.norm().max(reference)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_transfer_matches_closed_form((case, nu, xm, xp) in case_strategy()) {
        let omega = hz_to_omega(nu);
        let parts = phase_response_exact(&case.rail, &case.susp, &case.ifm, omega, xm, xp).unwrap();
        let [bending, sagnac, accel] = closed_form(&case, omega, xm, xp);
        let total = bending + sagnac + accel;
        prop_assert!((parts.total - total).norm() <= 1e-10 * total.norm(),
            "total {} vs {}", parts.total, total);
        let reference = total.norm();
        prop_assert!(close(parts.bending, bending, reference), "bending {} vs {}", parts.bending, bending);
        prop_assert!(close(parts.sagnac, sagnac, reference), "sagnac {} vs {}", parts.sagnac, sagnac);
        prop_assert!(close(parts.acceleration, accel, reference), "accel {} vs {}", parts.acceleration, accel);
    }
}

#[test]
fn paper_geometry_sweep() {
    let rail = RailSpec::new(
        Material::new(72.4e9, 2790.0).unwrap(),
        CrossSection::new(1.49e-2, 3.3e-5).unwrap(),
        0.7,
    )
    .unwrap();
    let susp = SuspensionSpec::symmetric(SuspensionEnd::new(1e6, 560.0).unwrap(), Some(58.0)).unwrap();
    let ifm = InterferometerSpec::new(1.8727e7, 0.605, 1065.0, 1).unwrap();
    let case = Case { rail, susp, ifm, ends: SymmetricEnds { stiffness: 1e6, damping: 560.0, mass: 58.0 } };
    let (xm, xp) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    for i in 0..=400 {
        let nu = 10f64.powf(i as f64 / 400.0 * (2000f64).log10());
        let omega = hz_to_omega(nu);
        let parts = phase_response_exact(&case.rail, &case.susp, &case.ifm, omega, xm, xp).unwrap();
        let total: Complex64 = closed_form(&case, omega, xm, xp).iter().sum();
        assert!((parts.total - total).norm() <= 1e-10 * total.norm(), "{nu} Hz");
    }
}
