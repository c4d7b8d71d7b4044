use mgroupoid::connection::{anchor, christoffel_map, material_connection, torsion, ChristoffelField, TangentVector};
use mgroupoid::constitutive::{
    ArchetypeDescriptor, ImplantSpec, MaterialModel, ModelDescriptor, ParamField, ParamGenerator, ProbeSet,
    StiffnessSpec,
};
use mgroupoid::groupoid::{interchange, random_groupoid, random_transitive_groupoid};
use mgroupoid::io::{body_to_string, parse_body, BodyFile};
use mgroupoid::uniformity::GaugeField;
use mgroupoid::{invert3, mat_exp, Grid, GridField, Mat3};
use proptest::prelude::*;

fn mat(entries: [f64; 9]) -> Mat3 {
    Mat3::from_row_slice(&entries)
}

fn well_conditioned() -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-0.4..0.4f64).prop_map(|e| Mat3::identity() + mat(e))
}

fn skew(a: [f64; 3]) -> Mat3 {
    Mat3::new(0.0, -a[2], a[1], a[2], 0.0, -a[0], -a[1], a[0], 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_groupoids_satisfy_the_axioms(seed in any::<u64>(), budget in 1usize..=50) {
        let g = random_groupoid(seed, budget);
        prop_assert!(g.num_arrows() <= budget);
        prop_assert!(g.validate_axioms().is_valid());
        for a in g.arrows() {
            let inv = g.inverse(a.id).unwrap();
            prop_assert_eq!(g.inverse(inv).unwrap(), a.id);
            prop_assert_eq!(g.source(inv).unwrap(), a.target);
        }
        for (&(x, y), &xy) in g.composition_table() {
            let lhs = g.inverse(xy).unwrap();
            let rhs = g.compose(g.inverse(y).unwrap(), g.inverse(x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn interchange_round_trips(seed in any::<u64>()) {
        let g = random_groupoid(seed, 40);
        let text = interchange::write(&g);
        let back = interchange::parse(&text).unwrap();
        prop_assert_eq!(interchange::write(&back), text);
        prop_assert_eq!(back.orbit_decomposition(), g.orbit_decomposition());
    }

    #[test]
    fn orbits_partition_the_objects(seed in any::<u64>()) {
        let g = random_groupoid(seed, 50);
        let orbits = g.orbit_decomposition();
        let mut all: Vec<_> = orbits.blocks.iter().flatten().copied().collect();
        all.sort();
        let expected: Vec<_> = g.objects().collect();
        prop_assert_eq!(all, expected);
        prop_assert!(random_transitive_groupoid(seed, 50).orbit_decomposition().is_transitive);
    }

    #[test]
    fn torsion_is_exactly_antisymmetric(values in prop::collection::vec(prop::array::uniform32(-5.0..5.0f64), 8)) {
        let grid = Grid::cube(2, 0.5).unwrap();
        let gamma: Vec<[f64; 27]> = values.iter().map(|v| std::array::from_fn(|k| v[k])).collect();
        let t = torsion(&ChristoffelField::from_values(grid.clone(), gamma).unwrap());
        for node in 0..grid.len() {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        prop_assert_eq!(t.get(node, i, j, k), -t.get(node, i, k, j));
                    }
                }
            }
        }
    }

    #[test]
    fn anchor_inverts_the_christoffel_map(
        values in prop::collection::vec(prop::array::uniform32(-1e3..1e3f64), 8),
        node in 0usize..8,
        v in prop::array::uniform3(-1e6..1e6f64),
    ) {
        let grid = Grid::cube(2, 0.5).unwrap();
        let gamma: Vec<[f64; 27]> = values.iter().map(|v| std::array::from_fn(|k| v[k])).collect();
        let gamma = ChristoffelField::from_values(grid, gamma).unwrap();
        let tv = TangentVector { node, components: v };
        prop_assert_eq!(anchor(&christoffel_map(&gamma, &tv).unwrap()), tv);
    }

    #[test]
    fn constant_right_factor_leaves_gamma_unchanged(g in well_conditioned(), a in prop::array::uniform3(-0.5..0.5f64)) {
        prop_assume!(g.determinant().abs() > 0.2);
        let grid = Grid::cube(5, 0.25).unwrap();
        let gauge = GaugeField::new(GridField::from_fn(grid, |x| {
            let mut p = mat_exp(&(skew(a) * x[0]));
            p[(0, 1)] += 0.3 * x[2];
            p
        }));
        let g0 = material_connection(&gauge).unwrap();
        let g1 = material_connection(&gauge.right_translated(&g)).unwrap();
        prop_assert!(g0.max_abs_diff(&g1) < 1e-12, "{}", g0.max_abs_diff(&g1));
    }

    #[test]
    fn residual_vanishes_both_ways_on_implanted_bodies(
        x in 0usize..125,
        y in 0usize..125,
        slopes in prop::array::uniform9(-0.3..0.3f64),
    ) {
        let implant = ImplantSpec::Affine {
            constant: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            slopes: [slopes, [0.0; 9], [0.0; 9]],
        };
        let grid = Grid::cube(5, 0.25).unwrap();
        prop_assume!((0..grid.len()).all(|n| implant.eval(n, grid.coords(n)).determinant() > 0.2));
        let model = MaterialModel::new(
            grid.clone(),
            ModelDescriptor::ImplantedArchetype {
                archetype: ArchetypeDescriptor::SvkAnisotropic { stiffness: StiffnessSpec::generic_default() },
                implant: implant.clone(),
            },
        )
        .unwrap();
        let probes = ProbeSet::default();
        let px = implant.eval(x, grid.coords(x));
        let py = implant.eval(y, grid.coords(y));
        let p = py * invert3(&px).unwrap();
        prop_assert!(model.iso_residual(x, y, &p, &probes).unwrap() < 1e-10);
        prop_assert!(model.iso_residual(y, x, &invert3(&p).unwrap(), &probes).unwrap() < 1e-10);
        prop_assert!(model.iso_residual(x, y, &(-p), &probes).unwrap() < 1e-10);
    }

    #[test]
    fn isotropic_isomorphisms_form_a_coset(a in prop::array::uniform3(-3.0..3.0f64), node in 0usize..27) {
        let grid = Grid::cube(3, 0.5).unwrap();
        let implant = ImplantSpec::shear(1, 2, 3, 0.4);
        let model = MaterialModel::new(
            grid.clone(),
            ModelDescriptor::ImplantedArchetype {
                archetype: ArchetypeDescriptor::NeoHookeanIsotropic { mu: 1.0 },
                implant: implant.clone(),
            },
        )
        .unwrap();
        let x = grid.center();
        let p = implant.eval(node, grid.coords(node)) * invert3(&implant.eval(x, grid.coords(x))).unwrap();
        // Symmetries at the source are P(X) R P(X)⁻¹ for rotations R of the archetype.
        let px = implant.eval(x, grid.coords(x));
        let g = px * mat_exp(&skew(a)) * invert3(&px).unwrap();
        let probes = ProbeSet::default();
        prop_assert!(model.iso_residual(x, x, &g, &probes).unwrap() < 1e-10);
        prop_assert!(model.iso_residual(x, node, &(p * g), &probes).unwrap() < 1e-10);
    }

    #[test]
    fn body_files_round_trip_bit_exact(mu in 1e-3..1e3f64, rate in -2.0..2.0f64, h in 1e-3..1.0f64, n in 1usize..6) {
        let grid = Grid::cube(n, h).unwrap();
        let model = ModelDescriptor::NeoHookeanIsotropic {
            mu: ParamField::Generator(ParamGenerator::Exponential { base: mu, rate, axis: 2 }),
        };
        let file = BodyFile::new(grid, model, None);
        let text = body_to_string(&file);
        let back = parse_body(&text).unwrap();
        prop_assert_eq!(&back.file, &file);
        prop_assert_eq!(body_to_string(&back.file), text);
    }
}
