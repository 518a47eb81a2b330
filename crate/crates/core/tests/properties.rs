use congruent_core::altsim::{build_malt, build_malt_bits, in_x, sample_assignment, Table3Label};
use congruent_core::lfun::{verify_table2, LCache};
use congruent_core::monsky::*;
use congruent_core::numtheory::{factor_squarefree, PrimeSieve};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

const LIMIT: u64 = 2_000_000;

fn sieve() -> &'static PrimeSieve {
    static S: OnceLock<PrimeSieve> = OnceLock::new();
    S.get_or_init(|| PrimeSieve::new(LIMIT).unwrap())
}

fn label() -> impl Strategy<Value = Table3Label> {
    prop::sample::select(Table3Label::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn twist_data_obeys_reciprocity(n in 1..LIMIT) {
        let Ok(f) = factor_squarefree(n, sieve()) else { return Ok(()) };
        let t = build_twist(&f);
        prop_assert!(t.a.row_sums().is_zero());
        for i in 0..t.r() {
            for j in 0..t.r() {
                if i != j {
                    prop_assert_eq!(t.a.get(i, j) ^ t.a.get(j, i), t.y.get(i) & t.y.get(j));
                }
            }
        }
    }

    #[test]
    fn table2_columns_agree(n in 1..LIMIT / 2) {
        let Ok(f) = factor_squarefree(n, sieve()) else { return Ok(()) };
        let mut cache = LCache::new();
        for row in verify_table2(&f, &mut cache) {
            prop_assert!(row.equal(), "n = {} row {}", n, row.row);
        }
    }

    #[test]
    fn main_recursion_holds(seed in any::<u64>(), r in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, y, z) = sample_constrained(r, &mut rng);
        let lhs = assemble_mx(RowLabel::R1, &a, &y, &z).unwrap().det().unwrap();
        prop_assert_eq!(main_rec_sum(&a, &y, &z).unwrap(), lhs);
    }

    #[test]
    fn sampled_malt_is_alternating(seed in any::<u64>(), r in 1usize..=40, label in label()) {
        let cfg = label.config();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = sample_assignment(&cfg, r, &mut rng).unwrap();
        prop_assert!(bits.is_consistent(&cfg));
        let m = build_malt_bits(&cfg, &bits).unwrap();
        prop_assert_eq!(m.nrows(), 2 * r + cfg.t());
        prop_assert!(m.is_alternating());
        prop_assert_eq!(m.corank().unwrap() % 2, cfg.t() % 2);
    }

    #[test]
    fn malt_of_members_is_alternating(n in 1..LIMIT, label in label()) {
        let cfg = label.config();
        let Ok(f) = factor_squarefree(n, sieve()) else { return Ok(()) };
        if !in_x(&cfg, &f) {
            prop_assert!(build_malt(&cfg, &f).is_err());
            return Ok(());
        }
        let m = build_malt(&cfg, &f).unwrap();
        prop_assert!(m.is_alternating());
        prop_assert_eq!(m.corank().unwrap() % 2, cfg.t() % 2);
    }
}
