use std::collections::BTreeSet;
use std::ffi::{CStr, CString};

use arcadia_core::engine::{Env, EnvConfig, Mode};
use arcadia_core::ffi::{
    arcadia_last_error, arcadia_vec_create, arcadia_vec_destroy, arcadia_vec_observe, arcadia_vec_step,
    config_from_pairs,
};
use arcadia_core::games::{Difficulty, GameId, NOOP, NUM_ACTIONS};
use arcadia_core::params::Params;
use arcadia_core::render::OBS_BYTES;
use arcadia_core::rng::RngStream;
use arcadia_core::vec_env::VecEnv;
use std::sync::Arc;

fn actions(rng: &mut RngStream, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.below(u32::from(NUM_ACTIONS)) as u8).collect()
}

#[test]
fn single_slot_batch_matches_a_bare_env() {
    let mut c = EnvConfig::new(GameId::Chaser);
    c.rand_seed = 8;
    c.max_episode_steps = 120;
    let mut v = VecEnv::new(&c, 1, Some(1)).unwrap();
    let mut e = Env::new(&c).unwrap();
    let mut obs = vec![0u8; OBS_BYTES];
    e.observe(&mut obs);
    assert_eq!(v.observation(0), &obs[..]);
    let mut rng = RngStream::from_key(1);
    for _ in 0..500 {
        let a = actions(&mut rng, 1);
        v.step(&a).unwrap();
        let r = e.step_into(a[0], &mut obs, true).unwrap();
        assert_eq!(v.observation(0), &obs[..]);
        assert_eq!(v.rewards()[0], r.reward as f32);
        assert_eq!(v.dones()[0], u8::from(r.done));
        assert_eq!(v.infos()[0], r.info);
    }
}

#[test]
fn slots_draw_distinct_levels() {
    let v = VecEnv::new(&EnvConfig::new(GameId::Leaper), 64, Some(1)).unwrap();
    let seeds: BTreeSet<u32> = v.infos().iter().map(|i| i.level_seed).collect();
    assert_eq!(seeds.len(), 64);
}

#[test]
fn batch_slots_equal_separate_envs() {
    let mut c = EnvConfig::new(GameId::Heist);
    c.max_episode_steps = 200;
    let params = Arc::new(Params::builtin(Difficulty::Hard).clone());
    let mut v = VecEnv::with_params(&c, params.clone(), 4, Some(1)).unwrap();
    let mut envs: Vec<Env> = (0..4).map(|i| Env::with_slot(&c, params.clone(), i).unwrap()).collect();
    let mut obs = vec![0u8; OBS_BYTES];
    let mut rng = RngStream::from_key(2);
    for _ in 0..1000 {
        let a = actions(&mut rng, 4);
        v.step(&a).unwrap();
        for (i, e) in envs.iter_mut().enumerate() {
            let r = e.step_into(a[i], &mut obs, true).unwrap();
            assert_eq!(v.observation(i), &obs[..]);
            assert_eq!(v.rewards()[i], r.reward as f32);
        }
    }
}

#[test]
fn thread_count_does_not_change_results() {
    for g in [GameId::Miner, GameId::BigFish, GameId::Ninja] {
        let mut c = EnvConfig::new(g);
        c.max_episode_steps = 100;
        let mut one = VecEnv::new(&c, 8, Some(1)).unwrap();
        let mut four = VecEnv::new(&c, 8, Some(4)).unwrap();
        assert_eq!(four.threads(), 4);
        let mut rng = RngStream::from_key(3);
        for _ in 0..300 {
            let a = actions(&mut rng, 8);
            one.step(&a).unwrap();
            four.step(&a).unwrap();
            assert_eq!(one.observations(), four.observations());
            assert_eq!(one.rewards(), four.rewards());
            assert_eq!(one.infos(), four.infos());
        }
    }
}

#[test]
fn unsupported_memory_mode_is_a_config_error() {
    for g in [GameId::Chaser, GameId::Leaper, GameId::Ninja, GameId::BigFish] {
        let mut c = EnvConfig::new(g);
        c.mode = Mode::Memory;
        let e = VecEnv::new(&c, 2, Some(1)).err().unwrap();
        assert_eq!(e.code(), 2, "{g}");
    }
}

#[test]
fn noop_maze_never_pays() {
    let mut c = EnvConfig::new(GameId::Maze);
    c.max_episode_steps = 50;
    let mut v = VecEnv::new(&c, 16, Some(1)).unwrap();
    for _ in 0..500 {
        v.step(&[NOOP; 16]).unwrap();
        assert!(v.rewards().iter().all(|&r| r == 0.0));
    }
}

#[test]
fn a_bad_action_leaves_every_slot_untouched() {
    let mut v = VecEnv::new(&EnvConfig::new(GameId::Maze), 4, Some(1)).unwrap();
    v.step(&[7, 7, 7, 7]).unwrap();
    let before: Vec<u32> = (0..4).map(|i| v.env(i).step_count()).collect();
    let frames = v.observations().to_vec();
    assert_eq!(v.step(&[7, 7, 15, 7]).unwrap_err().code(), 1);
    assert_eq!(v.step(&[7, 7]).unwrap_err().code(), 1);
    let after: Vec<u32> = (0..4).map(|i| v.env(i).step_count()).collect();
    assert_eq!(before, after);
    assert_eq!(frames, v.observations());
}

#[test]
fn thread_variable_is_read_when_unset() {
    let c = EnvConfig::new(GameId::Maze);
    std::env::set_var(arcadia_core::vec_env::THREADS_ENV, "3");
    let v = VecEnv::new(&c, 2, None).unwrap();
    std::env::remove_var(arcadia_core::vec_env::THREADS_ENV);
    assert_eq!(v.threads(), 3);
}

struct Pairs {
    _owned: Vec<CString>,
    keys: Vec<*const std::ffi::c_char>,
    values: Vec<*const std::ffi::c_char>,
}

fn pairs(kv: &[(&str, &str)]) -> Pairs {
    let owned: Vec<CString> =
        kv.iter().flat_map(|(k, v)| [CString::new(*k).unwrap(), CString::new(*v).unwrap()]).collect();
    let keys = owned.iter().step_by(2).map(|s| s.as_ptr()).collect();
    let values = owned.iter().skip(1).step_by(2).map(|s| s.as_ptr()).collect();
    Pairs { _owned: owned, keys, values }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(arcadia_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn c_interface_round_trip_matches_the_rust_batch() {
    let kv = [
        ("env_name", "caveflyer"),
        ("num_levels", "20"),
        ("start_level", "5"),
        ("rand_seed", "4"),
        ("max_episode_steps", "90"),
    ];
    let p = pairs(&kv);
    let n = 3;
    let handle = unsafe { arcadia_vec_create(p.keys.as_ptr(), p.values.as_ptr(), kv.len(), n) };
    assert!(!handle.is_null(), "{}", last_error());

    let (config, threads) = config_from_pairs(&kv).unwrap();
    let mut reference = VecEnv::new(&config, n, threads).unwrap();
    let mut obs = vec![0u8; n * OBS_BYTES];
    let mut rewards = vec![0f32; n];
    let mut dones = vec![0u8; n];
    let mut seeds = vec![0u32; n];
    let mut complete = vec![0u8; n];
    let mut returns = vec![0f32; n];
    let mut rng = RngStream::from_key(6);
    for _ in 0..400 {
        let a = actions(&mut rng, n);
        let wide: Vec<i32> = a.iter().map(|&x| i32::from(x)).collect();
        assert_eq!(unsafe { arcadia_vec_step(handle, wide.as_ptr(), n) }, 0);
        reference.step(&a).unwrap();
        let rc = unsafe {
            arcadia_vec_observe(
                handle,
                obs.as_mut_ptr(),
                rewards.as_mut_ptr(),
                dones.as_mut_ptr(),
                seeds.as_mut_ptr(),
                complete.as_mut_ptr(),
                returns.as_mut_ptr(),
            )
        };
        assert_eq!(rc, 0);
        assert_eq!(obs, reference.observations());
        assert_eq!(rewards, reference.rewards());
        assert_eq!(dones, reference.dones());
        for (i, info) in reference.infos().iter().enumerate() {
            assert_eq!(seeds[i], info.level_seed);
            assert!((5..25).contains(&seeds[i]));
            assert_eq!(complete[i], u8::from(info.level_complete));
            if dones[i] == 1 {
                assert_eq!(returns[i], info.episode_return.unwrap() as f32);
            }
        }
    }
    // Null outputs are skipped.
    let rc = unsafe {
        arcadia_vec_observe(
            handle,
            std::ptr::null_mut(),
            rewards.as_mut_ptr(),
            std::ptr::null_mut(),
            std::ptr::null_mut(),
            std::ptr::null_mut(),
            std::ptr::null_mut(),
        )
    };
    assert_eq!(rc, 0);

    let bad = [3, 15, 0];
    assert_eq!(unsafe { arcadia_vec_step(handle, bad.as_ptr(), n) }, 1);
    assert!(last_error().contains("15"));
    assert_eq!(unsafe { arcadia_vec_step(handle, bad.as_ptr(), 2) }, 1);
    unsafe { arcadia_vec_destroy(handle) };
}

#[test]
fn c_interface_reports_config_errors() {
    let p = pairs(&[("env_name", "maze"), ("distribution_mode", "nightmare")]);
    let handle = unsafe { arcadia_vec_create(p.keys.as_ptr(), p.values.as_ptr(), 2, 4) };
    assert!(handle.is_null());
    assert!(last_error().contains("distribution_mode"));

    let p = pairs(&[("env_name", "leaper"), ("distribution_mode", "memory")]);
    assert!(unsafe { arcadia_vec_create(p.keys.as_ptr(), p.values.as_ptr(), 2, 1) }.is_null());
    assert!(last_error().contains("memory"));

    assert_eq!(unsafe { arcadia_vec_step(std::ptr::null_mut(), [0].as_ptr(), 1) }, 1);
    unsafe { arcadia_vec_destroy(std::ptr::null_mut()) };
}
