use std::collections::HashSet;
use std::sync::Arc;

use cantorchain_core::bs::{k_table, level_data, multiplicative_order, BsParams};
use cantorchain_core::perm::{
    normal_core, oracle, GeneratedGroup, GroupElement, Permutation, Portrait,
};
use cantorchain_core::tree::{path_metric, PathPrefix, TreeSignature, VertexAddress};
use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut images: Vec<u32> = (0..n as u32).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

fn random_portrait(rng: &mut ChaCha8Rng, sig: &Arc<TreeSignature>) -> Portrait {
    let mut entries = Vec::new();
    for k in 0..sig.horizon() {
        for v in sig.level(k).unwrap() {
            entries.push((v, random_perm(rng, sig.degree(k + 1))));
        }
    }
    Portrait::from_vertex_perms(Arc::clone(sig), entries).unwrap()
}

fn random_leaf(rng: &mut ChaCha8Rng, sig: &Arc<TreeSignature>) -> PathPrefix {
    let word = (1..=sig.horizon())
        .map(|k| rng.gen_range(0..sig.degree(k)))
        .collect();
    PathPrefix::new(Arc::clone(sig), VertexAddress::new(word)).unwrap()
}

fn signature() -> impl Strategy<Value = Arc<TreeSignature>> {
    prop::collection::vec(2usize..5, 1..5).prop_map(|d| Arc::new(TreeSignature::new(d).unwrap()))
}

proptest! {
    #[test]
    fn automorphisms_are_isometries(sig in signature(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_portrait(&mut rng, &sig);
        let (x, y) = (random_leaf(&mut rng, &sig), random_leaf(&mut rng, &sig));
        let n = sig.horizon();
        let gx = PathPrefix::new(Arc::clone(&sig), g.apply(x.leaf()).unwrap()).unwrap();
        let gy = PathPrefix::new(Arc::clone(&sig), g.apply(y.leaf()).unwrap()).unwrap();
        prop_assert_eq!(path_metric(&gx, &gy).unwrap(), path_metric(&x, &y).unwrap());
        prop_assert!(g.preserves_edges());
        prop_assert_eq!(g.apply(&x.vertex(n - 1)).unwrap(), gx.vertex(n - 1));
    }

    #[test]
    fn level_image_is_a_homomorphism(sig in signature(), seed in any::<u64>(), level in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = level.min(sig.horizon());
        let g = random_portrait(&mut rng, &sig);
        let h = random_portrait(&mut rng, &sig);
        prop_assert_eq!(
            g.compose(&h).level_image(n).unwrap(),
            g.level_image(n).unwrap().compose(&h.level_image(n).unwrap())
        );
        prop_assert!(g.compose(&g.inverse()).is_identity());
        prop_assert_eq!(g.truncate(n).unwrap().level_image(n).unwrap(), g.level_image(n).unwrap());
    }

    #[test]
    fn leaf_action_round_trip(sig in signature(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_portrait(&mut rng, &sig);
        let leaves = g.level_image(sig.horizon()).unwrap();
        prop_assert_eq!(Portrait::from_leaf_action(Arc::clone(&sig), &leaves).unwrap(), g.clone());
        prop_assert_eq!(Portrait::from_json(Arc::clone(&sig), &g.to_json()).unwrap(), g);
    }

    #[test]
    fn normal_core_matches_intersection_of_conjugates(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = vec![random_perm(&mut rng, n), random_perm(&mut rng, n)];
        let g = GeneratedGroup::new(Permutation::identity(n), gens);
        let elems = g.enumerate().unwrap();
        let h = g.subgroup(vec![elems[rng.gen_range(0..elems.len())].clone()]);
        let core = normal_core(&g, &h).unwrap();
        let got: HashSet<_> = core.elements().unwrap().iter().cloned().collect();
        prop_assert_eq!(got, oracle::brute_force_core(&g, &h).unwrap());
        prop_assert!(oracle::brute_force_is_normal(&g, &core).unwrap());
    }

    #[test]
    fn bs_level_and_k_invariants(q in 2u64..12, d in 2u64..8, horizon in 1usize..4) {
        prop_assume!(num_integer::gcd(q, d) == 1);
        let params = BsParams::new(q, d, horizon).unwrap();
        let levels = level_data(&params).unwrap();
        let k = k_table(&params, &levels).unwrap();
        let qb = BigUint::from(q);
        for n in 0..=horizon {
            let dn = BigUint::from(d).pow(n as u32);
            prop_assert!(((qb.modpow(&levels.s[n], &dn) + &dn - 1u32) % &dn) == BigUint::ZERO);
            prop_assert_eq!(&levels.c[n] * &dn, levels.modulus[n].clone());
            prop_assert_eq!(k.get(0, n), &levels.s[n]);
            prop_assert!(k.get(n, n).is_one());
            for m in 0..n {
                prop_assert!((&levels.s[n] % &levels.s[m]) == BigUint::ZERO);
                prop_assert!((&levels.modulus[n] % &levels.modulus[m]) == BigUint::ZERO);
                prop_assert!(k.get(m, n) >= k.get(m, n - 1));
                let ratio = &levels.modulus[n] / &levels.modulus[m];
                prop_assert_eq!(k.get(m, n), &multiplicative_order(&qb, &ratio, 1 << 20).unwrap());
            }
        }
    }
}
