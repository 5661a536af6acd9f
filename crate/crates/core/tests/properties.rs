use proptest::prelude::*;

use spherebasis::bases::{cube_basis, simplex_basis};
use spherebasis::decompose::{decompose, oracle_decompose};
use spherebasis::{enumerate_cells, Ambient, Chain, Family};

fn ambient_strategy() -> impl Strategy<Value = Ambient> {
    (
        prop_oneof![Just(Family::Cube), Just(Family::Simplex)],
        1usize..=5,
    )
        .prop_map(|(f, n)| Ambient::new(f, n).unwrap())
}

/// A k-chain given by a bit mask over the canonical k-cells.
fn chain_strategy() -> impl Strategy<Value = Chain> {
    ambient_strategy()
        .prop_flat_map(|a| (Just(a), 0..=a.n()))
        .prop_flat_map(|(a, k)| {
            let cells = enumerate_cells(&a, k).unwrap();
            let len = cells.len();
            (
                Just(a),
                Just(k),
                Just(cells),
                prop::collection::vec(any::<bool>(), len),
            )
        })
        .prop_map(|(a, k, cells, mask)| {
            let picked = cells
                .into_iter()
                .zip(mask)
                .filter(|(_, m)| *m)
                .map(|(c, _)| c);
            Chain::from_cells(a, k as i32, picked).unwrap()
        })
}

fn pair_strategy() -> impl Strategy<Value = (Chain, Chain)> {
    chain_strategy().prop_flat_map(|x| {
        let a = x.ambient();
        let cells = enumerate_cells(&a, x.k() as usize).unwrap();
        let len = cells.len();
        (Just(x), prop::collection::vec(any::<bool>(), len)).prop_map(move |(x, mask)| {
            let picked = cells
                .clone()
                .into_iter()
                .zip(mask)
                .filter(|(_, m)| *m)
                .map(|(c, _)| c);
            let y = Chain::from_cells(a, x.k(), picked).unwrap();
            (x, y)
        })
    })
}

proptest! {
    #[test]
    fn boundary_squares_to_zero(z in chain_strategy()) {
        prop_assert!(z.boundary().boundary().is_empty());
    }

    #[test]
    fn addition_is_a_group_and_boundary_is_linear((x, y) in pair_strategy()) {
        let s = x.add(&y).unwrap();
        prop_assert_eq!(&s, &y.add(&x).unwrap());
        prop_assert!(x.add(&x).unwrap().is_empty());
        prop_assert_eq!(s.boundary(), x.boundary().add(&y.boundary()).unwrap());
        prop_assert_eq!(s.add(&y).unwrap(), x);
    }

    #[test]
    fn codec_round_trips(z in chain_strategy()) {
        let a = z.ambient();
        for c in z.cells() {
            prop_assert_eq!(&a.parse_cell(&c.to_string()).unwrap(), c);
        }
        let text = serde_json::to_string(&z).unwrap();
        let back: Chain = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, z);
    }

    #[test]
    fn faces_and_cofaces_are_dual(a in ambient_strategy(), j in 0usize..5) {
        prop_assume!(j < a.n());
        for c in enumerate_cells(&a, j).unwrap() {
            for f in c.cofaces(&a).unwrap() {
                prop_assert!(f.facets().contains(&c));
            }
            let up = c.cofaces(&a).unwrap();
            for f in enumerate_cells(&a, j + 1).unwrap() {
                prop_assert_eq!(f.facets().contains(&c), up.contains(&f));
            }
        }
    }

    #[test]
    fn cube_peel_recovers_coefficients(mask in prop::collection::vec(any::<bool>(), 31)) {
        let b = cube_basis(5, 2).unwrap();
        let idx: Vec<usize> = (0..b.len()).filter(|&i| mask[i]).collect();
        let z = b.sum(&idx).unwrap();
        prop_assert_eq!(decompose(&z, &b).unwrap().basis_indices, idx.clone());
        prop_assert_eq!(oracle_decompose(&z, &b).unwrap().basis_indices, idx);
    }

    #[test]
    fn simplex_cone_recovers_coefficients(mask in prop::collection::vec(any::<bool>(), 20)) {
        let b = simplex_basis(5, 2).unwrap();
        let idx: Vec<usize> = (0..b.len()).filter(|&i| mask[i]).collect();
        let z = b.sum(&idx).unwrap();
        prop_assert_eq!(decompose(&z, &b).unwrap().basis_indices, idx.clone());
        prop_assert_eq!(oracle_decompose(&z, &b).unwrap().basis_indices, idx);
    }

    #[test]
    fn every_cycle_lies_in_the_span(z in chain_strategy()) {
        let (a, k) = (z.ambient(), z.k() as usize);
        prop_assume!(k >= 1 && k < a.n());
        let b = spherebasis::basis(a.family(), a.n(), k).unwrap();
        let o = oracle_decompose(&z, &b).unwrap();
        // in the span exactly when the chain is a cycle
        prop_assert_eq!(o.is_success(), z.is_cycle());
        prop_assert_eq!(b.sum(&o.basis_indices).unwrap().add(&o.residual).unwrap(), z);
    }
}
