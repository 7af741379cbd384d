//! C-compatible interface over [`VecEnv`].
//!
//! ```c
//! typedef struct ArcadiaVecEnv ArcadiaVecEnv;
//! ArcadiaVecEnv *arcadia_vec_create(const char *const *keys, const char *const *values,
//!                                   size_t num_pairs, size_t num_envs);
//! int32_t arcadia_vec_step(ArcadiaVecEnv *env, const int32_t *actions, size_t num_actions);
//! int32_t arcadia_vec_observe(const ArcadiaVecEnv *env, uint8_t *obs, float *rewards,
//!                             uint8_t *dones, uint32_t *level_seeds, uint8_t *level_complete,
//!                             float *episode_returns);
//! void arcadia_vec_destroy(ArcadiaVecEnv *env);
//! const char *arcadia_last_error(void);
//! ```
//!
//! Return codes: 0 ok, 1 usage or domain error, 2 config error, 4 generation
//! fault. `arcadia_vec_create` returns null on failure. The message for the
//! most recent failure on the calling thread is available from
//! `arcadia_last_error` until the next failing call on that thread.
//!
//! `obs` receives `num_envs * 64 * 64 * 3` bytes, slot-major, row-major, RGB.
//! The per-slot arrays receive `num_envs` entries; any of them may be null.
//! `episode_returns[i]` is meaningful only where `dones[i]` is 1. Calls on one
//! handle must be serialized by the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crate::engine::{EnvConfig, Mode};
use crate::error::{Error, Result};
use crate::games::{Difficulty, GameId};
use crate::render::OBS_BYTES;
use crate::vec_env::VecEnv;

/// Keys accepted by [`config_from_pairs`].
pub const CONFIG_KEYS: [&str; 8] = [
    "env_name",
    "num_levels",
    "start_level",
    "rand_seed",
    "distribution_mode",
    "use_sequential_levels",
    "num_threads",
    "max_episode_steps",
];

/// Builds an environment config and worker count from string pairs.
pub fn config_from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<(EnvConfig, Option<usize>)> {
    let get = |key: &str| pairs.iter().rev().find(|(k, _)| k.as_ref() == key).map(|(_, v)| v.as_ref());
    if let Some((k, _)) = pairs.iter().find(|(k, _)| !CONFIG_KEYS.contains(&k.as_ref())) {
        return Err(Error::Config(format!("unknown config key `{}`", k.as_ref())));
    }
    let name = get("env_name").ok_or_else(|| Error::Config("missing config key `env_name`".into()))?;
    let mut c = EnvConfig::new(GameId::from_name(name)?);
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
        v.trim().parse().map_err(|_| Error::Config(format!("`{key}` = `{v}` is not a valid number")))
    }
    if let Some(v) = get("num_levels") {
        c.num_levels = num("num_levels", v)?;
    }
    if let Some(v) = get("start_level") {
        c.start_level = num("start_level", v)?;
    }
    if let Some(v) = get("rand_seed") {
        c.rand_seed = num("rand_seed", v)?;
    }
    if let Some(v) = get("max_episode_steps") {
        c.max_episode_steps = num("max_episode_steps", v)?;
    }
    match get("distribution_mode").unwrap_or("hard") {
        "easy" => c.difficulty = Difficulty::Easy,
        "hard" => c.difficulty = Difficulty::Hard,
        "memory" => c.mode = Mode::Memory,
        "exploration" => c.mode = Mode::Exploration,
        other => {
            return Err(Error::Config(format!(
                "`distribution_mode` = `{other}`: expected easy, hard, memory or exploration"
            )))
        }
    }
    let sequential = match get("use_sequential_levels").unwrap_or("false") {
        "1" | "true" | "True" => true,
        "0" | "false" | "False" => false,
        other => return Err(Error::Config(format!("`use_sequential_levels` = `{other}` is not a boolean"))),
    };
    if sequential {
        if c.mode != Mode::Standard {
            return Err(Error::Config(format!("sequential levels cannot combine with {} mode", c.mode.name())));
        }
        c.mode = Mode::Sequential;
    }
    let threads = get("num_threads").map(|v| num("num_threads", v)).transpose()?;
    Ok((c, threads))
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guarded<T>(fallback: T, f: impl FnOnce() -> Result<T>) -> (T, i32) {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => (v, 0),
        Ok(Err(e)) => {
            let code = e.code();
            set_error(e.to_string());
            (fallback, code)
        }
        Err(_) => {
            set_error("internal panic".into());
            (fallback, 1)
        }
    }
}

/// Opaque handle.
pub struct ArcadiaVecEnv {
    inner: VecEnv,
    actions: Vec<u8>,
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str> {
    if p.is_null() {
        return Err(Error::Usage(format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Error::Config(format!("{what} is not UTF-8")))
}

/// # Safety
/// `keys` and `values` must each point to `num_pairs` valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn arcadia_vec_create(
    keys: *const *const c_char,
    values: *const *const c_char,
    num_pairs: usize,
    num_envs: usize,
) -> *mut ArcadiaVecEnv {
    guarded(std::ptr::null_mut(), || {
        if num_pairs > 0 && (keys.is_null() || values.is_null()) {
            return Err(Error::Usage("config arrays are null".into()));
        }
        let mut pairs = Vec::with_capacity(num_pairs);
        for i in 0..num_pairs {
            pairs.push((c_str(*keys.add(i), "config key")?, c_str(*values.add(i), "config value")?));
        }
        let (config, threads) = config_from_pairs(&pairs)?;
        let inner = VecEnv::new(&config, num_envs, threads)?;
        Ok(Box::into_raw(Box::new(ArcadiaVecEnv { actions: vec![0; num_envs], inner })))
    })
    .0
}

/// # Safety
/// `env` must come from `arcadia_vec_create`; `actions` must hold `num_actions` values.
#[no_mangle]
pub unsafe extern "C" fn arcadia_vec_step(env: *mut ArcadiaVecEnv, actions: *const i32, num_actions: usize) -> i32 {
    guarded((), || {
        let env = env.as_mut().ok_or_else(|| Error::Usage("null handle".into()))?;
        if actions.is_null() {
            return Err(Error::Usage("actions is null".into()));
        }
        if num_actions != env.inner.len() {
            return Err(Error::Domain(format!("expected {} actions, got {num_actions}", env.inner.len())));
        }
        let src = std::slice::from_raw_parts(actions, num_actions);
        for (dst, &a) in env.actions.iter_mut().zip(src) {
            *dst = u8::try_from(a).map_err(|_| Error::Domain(format!("action {a} outside 0..=14")))?;
        }
        env.inner.step(&env.actions)
    })
    .1
}

/// # Safety
/// Non-null output pointers must be writable for the sizes in the module docs.
#[no_mangle]
pub unsafe extern "C" fn arcadia_vec_observe(
    env: *const ArcadiaVecEnv,
    obs: *mut u8,
    rewards: *mut f32,
    dones: *mut u8,
    level_seeds: *mut u32,
    level_complete: *mut u8,
    episode_returns: *mut f32,
) -> i32 {
    guarded((), || {
        let env = &env.as_ref().ok_or_else(|| Error::Usage("null handle".into()))?.inner;
        let n = env.len();
        if !obs.is_null() {
            std::ptr::copy_nonoverlapping(env.observations().as_ptr(), obs, n * OBS_BYTES);
        }
        if !rewards.is_null() {
            std::ptr::copy_nonoverlapping(env.rewards().as_ptr(), rewards, n);
        }
        if !dones.is_null() {
            std::ptr::copy_nonoverlapping(env.dones().as_ptr(), dones, n);
        }
        for (i, info) in env.infos().iter().enumerate() {
            if !level_seeds.is_null() {
                *level_seeds.add(i) = info.level_seed;
            }
            if !level_complete.is_null() {
                *level_complete.add(i) = u8::from(info.level_complete);
            }
            if !episode_returns.is_null() {
                *episode_returns.add(i) = info.episode_return.unwrap_or(0.0) as f32;
            }
        }
        Ok(())
    })
    .1
}

/// # Safety
/// `env` must come from `arcadia_vec_create` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn arcadia_vec_destroy(env: *mut ArcadiaVecEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Message for the last failure on this thread; empty if none.
#[no_mangle]
pub extern "C" fn arcadia_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_map_onto_config() {
        let (c, t) = config_from_pairs(&[
            ("env_name", "coinrun"),
            ("num_levels", "500"),
            ("start_level", "7"),
            ("distribution_mode", "easy"),
            ("use_sequential_levels", "1"),
            ("num_threads", "4"),
        ])
        .unwrap();
        assert_eq!(c.game, GameId::CoinRun);
        assert_eq!((c.num_levels, c.start_level), (500, 7));
        assert_eq!(c.difficulty, Difficulty::Easy);
        assert_eq!(c.mode, Mode::Sequential);
        assert_eq!(t, Some(4));
    }

    #[test]
    fn bad_pairs_name_the_key() {
        let e = config_from_pairs(&[("env_name", "maze"), ("levels", "3")]).unwrap_err();
        assert!(e.to_string().contains("levels"));
        let e = config_from_pairs(&[("env_name", "maze"), ("rand_seed", "x")]).unwrap_err();
        assert!(e.to_string().contains("rand_seed"));
        let e = config_from_pairs(&[("env_name", "starpilot")]).unwrap_err();
        assert!(e.to_string().contains("starpilot"));
        assert_eq!(e.code(), 2);
    }
}
