use arcadia_core::fixed::{fixed_mul, Angle, Fixed};
use arcadia_core::games::{level_stream, Difficulty, GameId};
use arcadia_core::grid::{GridLayout, Tile};
use arcadia_core::levelgen::maze::{MAX_CELLS, MIN_CELLS};
use arcadia_core::levelgen::platforms::ideal_jump;
use arcadia_core::levelgen::{
    cellular_automata_cave, kruskal_maze, platform_sequence, CaveParams, Platform, PlatformGame,
};
use arcadia_core::params::Params;
use arcadia_core::rng::{derive_stream, labels, RngStream};
use proptest::prelude::*;

proptest! {
    #[test]
    fn bounded_draws_stay_in_range(key in any::<u64>(), bound in 1u32..=u32::MAX) {
        let mut r = RngStream::from_key(key);
        for _ in 0..16 {
            prop_assert!(r.below(bound) < bound);
        }
    }

    #[test]
    fn inclusive_range_hits_both_ends_only(key in any::<u64>(), lo in -50i32..50, span in 0i32..4) {
        let mut r = RngStream::from_key(key);
        let hi = lo + span;
        let draws: Vec<i32> = (0..200).map(|_| r.range(lo, hi)).collect();
        prop_assert!(draws.iter().all(|d| (lo..=hi).contains(d)));
        prop_assert!(draws.contains(&lo) && draws.contains(&hi));
    }

    #[test]
    fn streams_are_pure_functions_of_their_inputs(global in any::<u32>(), level in any::<u32>(), salt in any::<u64>()) {
        let mut a = derive_stream(global, level, labels::LAYOUT).fork(salt);
        let mut b = derive_stream(global, level, labels::LAYOUT).fork(salt);
        for _ in 0..8 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut other = derive_stream(global, level, labels::ENTITIES).fork(salt);
        let mut again = derive_stream(global, level, labels::LAYOUT).fork(salt);
        prop_assert_ne!(other.next_u64(), again.next_u64());
    }

    #[test]
    fn level_streams_ignore_the_global_seed(seed in any::<u32>()) {
        let mut a = level_stream(GameId::Maze, seed, labels::LAYOUT);
        let mut b = derive_stream(0, seed, labels::LAYOUT).fork(GameId::Maze as u64);
        prop_assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn shuffle_preserves_the_multiset(key in any::<u64>(), mut v in proptest::collection::vec(0u8..10, 0..40)) {
        let mut s = v.clone();
        RngStream::from_key(key).shuffle(&mut s);
        s.sort_unstable();
        v.sort_unstable();
        prop_assert_eq!(s, v);
    }

    #[test]
    fn fixed_product_matches_floor_of_exact_product(a in -40_000i32..40_000, b in -40_000i32..40_000) {
        let got = fixed_mul(Fixed::from_raw(a), Fixed::from_raw(b)).unwrap();
        let exact = (i64::from(a) * i64::from(b)).div_euclid(256);
        prop_assert_eq!(i64::from(got.raw()), exact);
    }

    #[test]
    fn angle_rotation_is_modular(a in any::<u8>(), s in -1000i32..1000) {
        prop_assert_eq!(Angle(a).rotate(s).rotate(-s), Angle(a));
        prop_assert_eq!(Angle(a).rotate(s + 256), Angle(a).rotate(s));
    }

    #[test]
    fn kruskal_is_a_spanning_tree(key in any::<u64>(), w in MIN_CELLS..=MAX_CELLS, h in MIN_CELLS..=MAX_CELLS) {
        let g = kruskal_maze(&mut RngStream::from_key(key), w, h).unwrap();
        let cells = (w * h) as usize;
        prop_assert_eq!(g.components(Tile::Open), 1);
        prop_assert_eq!(g.count(Tile::Open) - cells, cells - 1);
    }

    #[test]
    fn caves_are_one_bounded_cavity(key in any::<u64>(), w in 16u32..48, h in 16u32..48) {
        let g = cellular_automata_cave(&RngStream::from_key(key), w, h, &CaveParams::default()).unwrap();
        prop_assert_eq!(g.components(Tile::Open), 1);
        let open = g.count(Tile::Open) as f64 / f64::from(w * h);
        prop_assert!((0.25..=0.75).contains(&open), "open fraction {}", open);
        for x in 0..w as i32 {
            prop_assert_eq!(g.get(x, 0), Some(Tile::Wall));
            prop_assert_eq!(g.get(x, h as i32 - 1), Some(Tile::Wall));
        }
    }
}

#[test]
fn kruskal_over_a_thousand_seeds() {
    for seed in 0..1000u32 {
        let mut r = level_stream(GameId::Maze, seed, labels::LAYOUT);
        let (w, h) = (r.range(3, 25) as u32, r.range(3, 25) as u32);
        let g = kruskal_maze(&mut r, w, h).unwrap();
        assert_eq!(g.components(Tile::Open), 1, "seed {seed}");
        assert_eq!(g.count(Tile::Open), (2 * w * h - 1) as usize, "seed {seed}");
    }
}

#[test]
fn easy_section_counts_stay_in_range() {
    for (game, recipe) in [
        (PlatformGame::CoinRun, &Params::builtin(Difficulty::Easy).coinrun.recipe),
        (PlatformGame::Ninja, &Params::builtin(Difficulty::Easy).ninja.recipe),
    ] {
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..500 {
            let l = platform_sequence(&mut RngStream::from_key(seed), recipe, game);
            assert!((recipe.sections.0..=recipe.sections.1).contains(&l.sections));
            seen.insert(l.sections);
        }
        assert_eq!(seen.len() as u32, recipe.sections.1 - recipe.sections.0 + 1);
    }
}

/// The two platforms alone, before obstacles are placed on them.
fn bare_pair(height: u32, a: &Platform, b: &Platform, game: PlatformGame) -> GridLayout {
    let mut g = GridLayout::filled((b.x1 + 2) as u32, height, Tile::Open);
    for p in [a, b] {
        let bottom = if game == PlatformGame::CoinRun { height as i32 - 1 } else { p.top };
        for x in p.x0..=p.x1 {
            for y in p.top..=bottom {
                g.set(x, y, Tile::Platform);
            }
        }
    }
    g
}

#[test]
fn consecutive_critical_platforms_are_jumpable() {
    for d in [Difficulty::Easy, Difficulty::Hard] {
        let p = Params::builtin(d);
        for (game, recipe) in [(PlatformGame::CoinRun, &p.coinrun.recipe), (PlatformGame::Ninja, &p.ninja.recipe)] {
            for seed in 0..200 {
                let l = platform_sequence(&mut RngStream::from_key(seed), recipe, game);
                let critical: Vec<_> = l.platforms.iter().filter(|q| q.critical).collect();
                assert_eq!(critical.len() as u32, l.sections + 2);
                for w in critical.windows(2) {
                    let bare = bare_pair(recipe.world_height, w[0], w[1], game);
                    assert!(
                        ideal_jump(&bare, &recipe.body, w[0], w[1]),
                        "{game:?} {d:?} seed {seed}: {:?} -> {:?}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }
}

#[test]
fn caves_reproduce_per_seed() {
    let p = &Params::builtin(Difficulty::Hard).caveflyer.cave;
    for key in 0..50 {
        let a = cellular_automata_cave(&RngStream::from_key(key), 40, 40, p).unwrap();
        let b = cellular_automata_cave(&RngStream::from_key(key), 40, 40, p).unwrap();
        assert_eq!(a, b);
    }
}
