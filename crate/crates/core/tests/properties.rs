//! Randomized invariants. Each case draws a seed, a dimension and a grid size;
//! the discrete fields come from a generator seeded with that seed.

use proptest::prelude::*;

use macflow::convection::{trilinear_b, upwind_dissipation, ConvectionScheme};
use macflow::fields::{l2_norm, PressureField};
use macflow::harness::checks;
use macflow::io::{read_pressure_csv, read_velocity_csv, write_pressure_csv, write_velocity_csv};
use macflow::random::{random_divergence_free, random_grid, random_grid_spec, random_pressure, random_velocity, seeded};
use macflow::spatial_ops::divergence;
use macflow::{GridSpec, MacGrid};

fn grid(seed: u64, dim: usize, max_cells: usize) -> (rand_chacha::ChaCha8Rng, MacGrid) {
    let mut rng = seeded(seed);
    let g = random_grid(&mut rng, dim, max_cells).unwrap();
    (rng, g)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn cells_and_dual_cells_partition_the_box(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=9) {
        let (_, g) = grid(seed, dim, n);
        let cells: f64 = g.cell_volume.iter().sum();
        prop_assert!((cells - g.volume()).abs() <= 1e-14);
        for i in 0..dim {
            let dual: f64 = g.faces[i].dual_measure.iter().sum();
            prop_assert!((dual - g.volume()).abs() <= 1e-14, "direction {i}: {dual}");
        }
    }

    #[test]
    fn divergence_and_gradient_are_dual(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=10) {
        let (mut rng, g) = grid(seed, dim, n);
        let q = random_pressure(&mut rng, &g);
        let v = random_velocity(&mut rng, &g);
        let (a, b, scale) = checks::duality_terms(&g, &q, &v).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * scale);
    }

    #[test]
    fn laplacian_is_self_adjoint(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=10) {
        let (mut rng, g) = grid(seed, dim, n);
        let u = random_velocity(&mut rng, &g);
        let v = random_velocity(&mut rng, &g);
        let (a, b, scale) = checks::laplacian_terms(&g, &u, &v).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * scale);
    }

    #[test]
    fn centred_form_is_skew_and_upwind_dissipates(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=8) {
        let (mut rng, g) = grid(seed, dim, n);
        let u = random_divergence_free(&mut rng, &g).unwrap();
        let v = random_velocity(&mut rng, &g);
        let w = random_velocity(&mut rng, &g);
        let scale = checks::trilinear_scale(&g, &u, &v, &w);
        let bvw = trilinear_b(&g, &u, &v, &w, ConvectionScheme::Centred).unwrap();
        let bwv = trilinear_b(&g, &u, &w, &v, ConvectionScheme::Centred).unwrap();
        prop_assert!((bvw + bwv).abs() <= 1e-11 * scale);
        let bvv = trilinear_b(&g, &u, &v, &v, ConvectionScheme::Upwind).unwrap();
        prop_assert!(bvv >= -1e-12 * checks::trilinear_scale(&g, &u, &v, &v));
        prop_assert!(upwind_dissipation(&g, &u, &v).unwrap() >= 0.0);
    }

    #[test]
    fn integration_by_parts_holds(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=10) {
        let (mut rng, g) = grid(seed, dim, n);
        prop_assert!(checks::integration_by_parts(&mut rng, &g).unwrap() <= 1e-12);
    }

    #[test]
    fn reconstruction_is_stable(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=10) {
        let (mut rng, g) = grid(seed, dim, n);
        prop_assert!(checks::reconstruction_stability(&mut rng, &g).unwrap() <= 1e-12);
    }

    #[test]
    fn fortin_commutes_with_divergence_on_polynomials(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=8) {
        let (mut rng, g) = grid(seed, dim, n);
        prop_assert!(checks::fortin_polynomial(&mut rng, &g).unwrap() <= 1e-12);
    }

    #[test]
    fn potential_fields_are_divergence_free(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=8) {
        let (mut rng, g) = grid(seed, dim, n);
        let u = random_divergence_free(&mut rng, &g).unwrap();
        prop_assert!(u.is_admissible(&g));
        let div = divergence(&g, &u).unwrap();
        // |div| is at most a sum of 2d fluxes of size |u| / h
        prop_assert!(div.max_abs() <= 1e-13 / g.h().min(1.0) * u.max_abs() * (2 * dim) as f64);
    }

    #[test]
    fn csv_dumps_round_trip(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=6) {
        let (mut rng, g) = grid(seed, dim, n);
        let u = random_velocity(&mut rng, &g);
        let mut p = random_pressure(&mut rng, &g);
        p.project_zero_mean(&g);
        let mut bu = Vec::new();
        write_velocity_csv(&g, &u, &mut bu).unwrap();
        let mut bp = Vec::new();
        write_pressure_csv(&g, &p, &mut bp).unwrap();
        let u2 = read_velocity_csv(&g, &String::from_utf8(bu).unwrap()).unwrap();
        let p2: PressureField = read_pressure_csv(&g, &String::from_utf8(bp).unwrap()).unwrap();
        prop_assert_eq!(u2.comps, u.comps);
        prop_assert_eq!(p2.values, p.values);
    }

    #[test]
    fn grid_text_round_trips(seed in any::<u64>(), dim in 2usize..=3, n in 2usize..=12) {
        let mut rng = seeded(seed);
        let cells = vec![n; dim];
        let spec = random_grid_spec(&mut rng, &cells, 4.0).unwrap();
        let back = GridSpec::parse(&spec.to_text()).unwrap();
        prop_assert_eq!(MacGrid::new(&back).unwrap().hash(), MacGrid::new(&spec).unwrap().hash());
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), a in -3.0f64..3.0) {
        let (mut rng, g) = grid(seed, 2, 8);
        let mut u = random_velocity(&mut rng, &g);
        let base = l2_norm(&g, &u).unwrap();
        u.scale(a);
        prop_assert!((l2_norm(&g, &u).unwrap() - a.abs() * base).abs() <= 1e-13 * (1.0 + base));
    }
}
