//! C ABI over the wavelab core.
//!
//! Objects cross the boundary as opaque handles created by `wl_*_new` style
//! constructors and released by the matching `wl_*_free`. Every fallible call
//! returns a [`WlStatus`]; on failure the message is kept per thread and can be
//! copied out with [`wl_last_error_message`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use wavelab::diagnostics::critical_norm;
use wavelab::evolve::{evolve, EvolveConfig, Termination};
use wavelab::models::{self, data, ModelSpec, State};
use wavelab::radial_spectral::{RadialField, RadialGrid};
use wavelab::stationary_ode::{stable_manifold, AutonomousModel, ManifoldOptions};
use wavelab::WaveLabError;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IllPosed = 3,
    OutOfRange = 4,
    Domain = 5,
    Escape = 6,
    Numerical = 7,
    Config = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Why an evolution stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlTermination {
    Completed = 0,
    Blowup = 1,
    Overflow = 2,
}

/// Autonomous models of the stationary ODE.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlStationaryModel {
    Cubic = 0,
    PendulumSin = 1,
    PendulumSinh = 2,
}

/// Radial grid handle.
pub struct WlGrid(Arc<RadialGrid>);

/// Nonlinearity handle.
pub struct WlModel(ModelSpec);

/// Cauchy data (u, u_t) at one time.
pub struct WlState(State);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &WaveLabError) -> WlStatus {
    match err {
        WaveLabError::GridMismatch | WaveLabError::InvalidArgument(_) => WlStatus::InvalidArgument,
        WaveLabError::IllPosed(_) => WlStatus::IllPosed,
        WaveLabError::OutOfRange(_) => WlStatus::OutOfRange,
        WaveLabError::Domain(_) => WlStatus::Domain,
        WaveLabError::Escape { .. } => WlStatus::Escape,
        WaveLabError::NonFinite(_)
        | WaveLabError::Unresolved { .. }
        | WaveLabError::Integrator(_)
        | WaveLabError::Quadrature(_) => WlStatus::Numerical,
        WaveLabError::Config(_) | WaveLabError::Json(_) => WlStatus::Config,
        WaveLabError::Io(_) => WlStatus::Io,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard<F: FnOnce() -> Result<(), (WlStatus, String)>>(f: F) -> WlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            WlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WlStatus::Panic
        }
    }
}

fn lib<T>(r: wavelab::Result<T>) -> Result<T, (WlStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (WlStatus, String) {
    (WlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, (WlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (WlStatus, String)> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (WlStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], (WlStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a grid with `n` nodes on (0, r_max].
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn wl_grid_new(n: usize, r_max: f64, out: *mut *mut WlGrid) -> WlStatus {
    guard(|| put(out, WlGrid(lib(RadialGrid::new(n, r_max))?)))
}

/// # Safety
/// `grid` must be null or a handle from [`wl_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wl_grid_free(grid: *mut WlGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn wl_grid_len(grid: *const WlGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.n())
}

/// Copies the radial nodes into `out`, which must hold `len` ≥ n values.
///
/// # Safety
/// `grid` must be a live grid handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_grid_nodes(grid: *const WlGrid, out: *mut f64, len: usize) -> WlStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        let nodes = g.0.nodes();
        if len < nodes.len() {
            return Err((WlStatus::BufferTooSmall, format!("need {} values, buffer holds {len}", nodes.len())));
        }
        slice_mut(out, len, "output buffer")?[..nodes.len()].copy_from_slice(nodes);
        Ok(())
    })
}

/// Parses a model from its JSON form, e.g. `{"kind": "cubic_focusing"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn wl_model_from_json(json: *const c_char, out: *mut *mut WlModel) -> WlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (WlStatus::InvalidArgument, "model JSON is not UTF-8".to_string()))?;
        let model: ModelSpec = serde_json::from_str(text).map_err(|e| (WlStatus::Config, e.to_string()))?;
        lib(model.validate())?;
        put(out, WlModel(model))
    })
}

/// # Safety
/// `model` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn wl_model_free(model: *mut WlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// State from node values of u and u_t (`len` must equal the grid size).
///
/// # Safety
/// `grid` must be live, `u` and `ut` must point to `len` doubles, `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn wl_state_from_values(
    grid: *const WlGrid,
    t: f64,
    u: *const f64,
    ut: *const f64,
    len: usize,
    out: *mut *mut WlState,
) -> WlStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        let u = lib(RadialField::new(g.0.clone(), slice(u, len, "u")?.to_vec()))?;
        let ut = lib(RadialField::new(g.0.clone(), slice(ut, len, "ut")?.to_vec()))?;
        put(out, WlState(lib(State::new(t, u, ut))?))
    })
}

/// Gaussian data (A e^{−r²/2w²}, 0) at t = 0.
///
/// # Safety
/// `grid` must be live and `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn wl_state_gaussian(
    grid: *const WlGrid,
    amplitude: f64,
    width: f64,
    out: *mut *mut WlState,
) -> WlStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        if !(width > 0.0 && amplitude.is_finite()) {
            return Err((WlStatus::InvalidArgument, format!("bad gaussian parameters ({amplitude}, {width})")));
        }
        put(out, WlState(data::gaussian(g.0.clone(), amplitude, width)))
    })
}

/// # Safety
/// `state` must be null or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn wl_state_free(state: *mut WlState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Time of a state, NaN for a null handle.
///
/// # Safety
/// `state` must be null or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn wl_state_time(state: *const WlState) -> f64 {
    state.as_ref().map_or(f64::NAN, |s| s.0.t)
}

/// Copies u and u_t into caller buffers holding at least the grid size.
///
/// # Safety
/// `state` must be live; `u` and `ut` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_state_values(state: *const WlState, u: *mut f64, ut: *mut f64, len: usize) -> WlStatus {
    guard(|| {
        let s = get(state, "state")?;
        let n = s.0.u.values().len();
        if len < n {
            return Err((WlStatus::BufferTooSmall, format!("need {n} values, buffer holds {len}")));
        }
        slice_mut(u, len, "u")?[..n].copy_from_slice(s.0.u.values());
        slice_mut(ut, len, "ut")?[..n].copy_from_slice(s.0.ut.values());
        Ok(())
    })
}

/// ‖(u, u_t)‖ in Ḣ^{3/2} × Ḣ^{1/2}.
///
/// # Safety
/// `state` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wl_critical_norm(state: *const WlState, out: *mut f64) -> WlStatus {
    guard(|| {
        let s = get(state, "state")?;
        let v = lib(critical_norm(&s.0))?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Conserved energy of a state under a model.
///
/// # Safety
/// `model` and `state` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wl_energy(model: *const WlModel, state: *const WlState, out: *mut f64) -> WlStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = get(state, "state")?;
        let v = lib(models::energy(&m.0, &s.0))?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Evolves `state` to `t_end` with the spectral splitting scheme. The final
/// state (the last one before blow-up, if detected) is returned in `out`.
///
/// # Safety
/// `model` and `state` must be live; `out` and `termination` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wl_evolve(
    model: *const WlModel,
    state: *const WlState,
    dt: f64,
    t_end: f64,
    out: *mut *mut WlState,
    termination: *mut WlTermination,
) -> WlStatus {
    guard(|| {
        let m = get(model, "model")?;
        let s = get(state, "state")?;
        let term = termination.as_mut().ok_or_else(|| null("termination"))?;
        let mut cfg = EvolveConfig::new(dt, t_end);
        cfg.snapshot_stride = usize::MAX;
        let traj = lib(evolve(&m.0, &s.0, &cfg))?;
        let why = match traj.termination {
            Termination::Completed => WlTermination::Completed,
            Termination::Blowup => WlTermination::Blowup,
            Termination::Overflow => WlTermination::Overflow,
        };
        put(out, WlState(traj.last().clone()))?;
        *term = why;
        Ok(())
    })
}

/// The stationary profile φ_ℓ(log r)/r at `n` radii; fails with
/// `WL_STATUS_ESCAPE` when a radius lies beyond the trajectory's escape point.
///
/// # Safety
/// `radii` must point to `n` doubles and `out` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wl_stationary_profile(
    model: WlStationaryModel,
    ell: f64,
    radii: *const f64,
    n: usize,
    out: *mut f64,
) -> WlStatus {
    guard(|| {
        let r = slice(radii, n, "radii")?;
        let dst = slice_mut(out, n, "out")?;
        if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err((WlStatus::InvalidArgument, "radii must be positive and finite".into()));
        }
        if ell == 0.0 {
            dst.fill(0.0);
            return Ok(());
        }
        let am = match model {
            WlStationaryModel::Cubic => AutonomousModel::Cubic,
            WlStationaryModel::PendulumSin => AutonomousModel::PendulumSin,
            WlStationaryModel::PendulumSinh => AutonomousModel::PendulumSinh,
        };
        let s_min = r.iter().fold(0.0f64, |m, x| m.min(x.ln()));
        let profile = lib(stable_manifold(am, ell, s_min, ManifoldOptions::default()))?;
        dst.copy_from_slice(&lib(profile.physical_at(r))?);
        Ok(())
    })
}
