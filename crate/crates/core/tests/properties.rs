mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use spss_core::constants::Quotient;
use spss_core::functionals::{self, dilate, ModelParams};
use spss_core::io::{parse_field_csv, parse_value_list, write_field_csv};
use spss_core::{RadialField, RadialGrid};

fn field(bumps: &[(f64, f64, f64)], grid: &RadialGrid) -> RadialField {
    RadialField::from_fn(grid, |r| {
        bumps
            .iter()
            .map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
            .sum()
    })
    .unwrap()
    .with_dirichlet()
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.05f64..3.0, 0.0f64..3.0, 0.4f64..2.0), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_nodes_are_exact(r in 0.1f64..500.0, n in 16usize..5000) {
        let g = RadialGrid::new(r, n).unwrap();
        prop_assert_eq!(g.node(0), 0.0);
        prop_assert_eq!(g.node(n), r);
        prop_assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(g.len(), n + 1);
    }

    #[test]
    fn integrals_are_nonnegative_and_homogeneous(b in bumps(), c in 0.1f64..5.0, alpha in 0.0f64..1.9) {
        let g = RadialGrid::new(12.0, 600).unwrap();
        let f = field(&b, &g);
        let m = functionals::mass(&f);
        let k = functionals::kinetic_integral(&f);
        let d = functionals::coulomb_energy(&f);
        let p = functionals::power_integral(&f, alpha);
        prop_assert!(m > 0.0 && k > 0.0 && d > 0.0 && p > 0.0);
        let s = f.scaled(c);
        prop_assert!((functionals::mass(&s) / m - c * c).abs() < 1e-12 * c * c);
        prop_assert!((functionals::coulomb_energy(&s) / d - c.powi(4)).abs() < 1e-11 * c.powi(4));
        prop_assert!((functionals::power_integral(&s, alpha) / p - c.powf(2.0 * alpha + 2.0)).abs() < 1e-11 * c.powf(2.0 * alpha + 2.0));
    }

    #[test]
    fn energy_identity_is_exact(b in bumps(), alpha in 0.0f64..1.9, c in 0.0f64..20.0) {
        let g = RadialGrid::new(12.0, 600).unwrap();
        let f = field(&b, &g);
        let p = ModelParams::new(alpha, c, 1.0).unwrap();
        let e = functionals::energy(&f, &p);
        prop_assert_eq!(e.total, 0.5 * e.kinetic_integral + 0.25 * e.coulomb - c / (2.0 * alpha + 2.0) * e.power_integral);
        if c == 0.0 {
            prop_assert!(e.total >= 0.0);
        }
    }

    #[test]
    fn lions_inequality(b in bumps()) {
        let g = RadialGrid::new(15.0, 1500).unwrap();
        let f = field(&b, &g);
        let p3 = functionals::power_integral(&f, 0.5);
        let bound = functionals::kinetic_integral(&f) * functionals::coulomb_energy(&f) / (4.0 * PI);
        prop_assert!(p3 * p3 <= bound);
    }

    #[test]
    fn dilation_is_exact_on_node_mapped_grids(b in bumps(), lambda in 0.05f64..20.0, alpha in 0.1f64..1.0) {
        let g = RadialGrid::new(12.0, 600).unwrap();
        let f = field(&b, &g);
        let s = dilate(&f, lambda).unwrap();
        prop_assert!((functionals::mass(&s) / functionals::mass(&f) - 1.0).abs() < 1e-12);
        let k = functionals::kinetic_integral(&s) / functionals::kinetic_integral(&f);
        prop_assert!((k / (lambda * lambda) - 1.0).abs() < 1e-11);
        let d = functionals::coulomb_energy(&s) / functionals::coulomb_energy(&f);
        prop_assert!((d / lambda - 1.0).abs() < 1e-11);
        let p = functionals::power_integral(&s, alpha) / functionals::power_integral(&f, alpha);
        prop_assert!((p / lambda.powf(3.0 * alpha) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn dilation_family_matches_energies(b in bumps(), lambda in 0.1f64..10.0, alpha in 0.1f64..0.66, c in 0.1f64..10.0) {
        let g = RadialGrid::new(12.0, 600).unwrap();
        let f = field(&b, &g);
        let p = ModelParams::new(alpha, c, 1.0).unwrap();
        let fam = functionals::energy(&f, &p).family();
        let direct = functionals::energy(&dilate(&f, lambda).unwrap(), &p).total;
        prop_assert!((fam.energy(lambda) - direct).abs() < 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn quotients_never_exceed_estimates(b in bumps()) {
        let g = RadialGrid::new(15.0, 1500).unwrap();
        let f = field(&b, &g);
        // Gaussian-class quotients stay below the sharp values
        prop_assert!(Quotient::Weinstein.evaluate(&f, 1.0) <= 0.040736103);
        prop_assert!(Quotient::Interpolation.evaluate(&f, 0.5) <= 1.0 / (2.0 * PI.sqrt()));
    }

    #[test]
    fn csv_round_trip(b in bumps(), n in 16usize..300, r in 0.5f64..50.0) {
        let g = RadialGrid::new(r, n).unwrap();
        let f = field(&b, &g);
        let back = parse_field_csv(&write_field_csv(&f)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn value_lists_round_trip(v in prop::collection::vec(-1e6f64..1e6, 1..10)) {
        let text: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
        prop_assert_eq!(parse_value_list(&text.join(",")).unwrap(), v);
    }

    #[test]
    fn parsers_never_panic(s in ".{0,200}") {
        let _ = parse_field_csv(&s);
        let _ = parse_value_list(&s);
    }

    #[test]
    fn resample_onto_same_grid_is_identity(b in bumps()) {
        let g = RadialGrid::new(10.0, 200).unwrap();
        let f = field(&b, &g);
        let same = f.resample(&RadialGrid::new(10.0, 200).unwrap()).unwrap();
        prop_assert_eq!(same.values(), f.values());
    }
}
