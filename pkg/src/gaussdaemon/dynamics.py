"""Open Gaussian dynamics under continuous general-dyne monitoring.

A system of n modes coupled to m white-noise environment modes through a
Hamiltonian matrix H_S and a coupling matrix C undergoes unconditional
diffusive dynamics with

    A = Omega H_S + Omega C Omega_m C^T / 2   (drift),
    D = Omega C sigma_in C^T Omega^T          (diffusion),
    d = Omega C mean_in                       (drive),

where sigma_in and mean_in describe the environment state.  Continuously
measuring the output with a general-dyne setting per environment mode turns
the evolution into a Gaussian filter: the conditional covariance matrix obeys
the deterministic Riccati equation

    d sigma_c / dt = A sigma_c + sigma_c A^T + D - (E - sigma_c B)(E - sigma_c B)^T,

with B = C Omega_m (sigma_in + sigma_m)^(-1/2) and
E = Omega C sigma_in (sigma_in + sigma_m)^(-1/2), while the conditional means
diffuse as

    d mean_c = (A mean_c + d) dt + (E - sigma_c B) dw,
    dy = -B^T mean_c dt + dw,

with dy the measurement record.  The Wiener increments used here have
per-component variance dt/2: second moments of this package's covariance
matrices are anticommutator-based without the conventional 1/2, which doubles
the innovation covariance to E[{dw, dw^T}] = I dt.  This is the single place
the convention enters; it is guarded by the ensemble identity
sigma_unc = sigma_c + Sigma with Sigma the excess noise of the conditional
means across trajectories.

The homodyne limit of (sigma_in + sigma_m)^(-1/2) is rank-deficient: the
diverging pointer directions drop out and the kept directions contribute
K (K^T (sigma_in + sigma_m,fin) K)^(-1/2) K^T with K the orthonormal basis of
the non-diverging directions.  For a single homodyned mode this reduces to
u u^T / sqrt(u^T sigma_in u).

The environment is normalized at model construction: a symplectic pre-pass
brings sigma_in to thermal-diagonal form (nu_j I per mode), folding the
transformation into C and mean_in; (A, D, d) are invariant under the fold and
measurement settings are interpreted in the normalized basis.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .exceptions import (
    ConvergenceError,
    NoSteadyStateError,
    NumericError,
    StepSizeError,
    SymmetryError,
)
from .measurement import GeneralDyneSetting, measured_quadrature, measurement_cm
from .symplectic import (
    TOL_HURWITZ,
    TOL_SYM,
    GaussianState,
    symplectic_eigenvalues,
    symplectic_form,
    validate_state,
    williamson_single_mode,
)

# Conditional-CM transient integration: validity slack for fixed-step output.
STEP_VALIDITY_TOL = 1e-6
# Steady-state Riccati iteration: flow-derivative threshold, step cap, block size.
SS_FLOW_TOL = 1e-12
SS_RESIDUAL_TOL = 1e-9
SS_STEP_CAP = 10_000_000
_SS_BLOCK = 50
_TRAJ_CHUNK = 256


@dataclass(frozen=True)
class DiffusiveModel:
    """System-environment model (H_S, C, sigma_in, mean_in) for n system and m input modes.

    The constructor validates shapes and physicality and normalizes the
    environment to thermal-diagonal form; the stored ``c``, ``sigma_in`` and
    ``mean_in`` refer to the normalized basis.  Correlations between input
    modes are not supported.
    """

    h_s: np.ndarray
    c: np.ndarray
    sigma_in: np.ndarray
    mean_in: np.ndarray
    n: int = field(init=False)
    m: int = field(init=False)

    def __post_init__(self):
        h_s = np.asarray(self.h_s, dtype=float)
        c = np.asarray(self.c, dtype=float)
        sigma_in = np.asarray(self.sigma_in, dtype=float)
        mean_in = np.asarray(self.mean_in, dtype=float).reshape(-1)
        if h_s.ndim != 2 or h_s.shape[0] != h_s.shape[1] or h_s.shape[0] % 2:
            raise ValueError(f"H_S must be square of even size, got {h_s.shape}")
        n = h_s.shape[0] // 2
        if np.abs(h_s - h_s.T).max() > TOL_SYM:
            raise SymmetryError("Hamiltonian matrix H_S must be symmetric")
        if c.ndim != 2 or c.shape[0] != 2 * n or c.shape[1] % 2 or c.shape[1] == 0:
            raise ValueError(f"coupling matrix must be 2n x 2m with n = {n}, got {c.shape}")
        m = c.shape[1] // 2
        if sigma_in.shape != (2 * m, 2 * m):
            raise ValueError(f"input CM shape {sigma_in.shape} does not match m = {m} input modes")
        if mean_in.size != 2 * m:
            raise ValueError(f"input mean length {mean_in.size} does not match m = {m} input modes")
        validate_state(np.zeros(2 * m), sigma_in)

        c, sigma_in, mean_in = _normalize_environment(c, sigma_in, mean_in, m)
        object.__setattr__(self, "h_s", 0.5 * (h_s + h_s.T))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "sigma_in", sigma_in)
        object.__setattr__(self, "mean_in", mean_in)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)


def _normalize_environment(c, sigma_in, mean_in, m):
    """Fold a per-mode symplectic into (c, mean_in) so that sigma_in = nu_j I per mode.

    Leaves A, D and d invariant: C sigma_in C^T, C Omega_m C^T and C mean_in
    are unchanged when C -> C S^{-1}, sigma_in -> S sigma_in S^T,
    mean_in -> S mean_in with S symplectic.
    """
    blocks = [sigma_in[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] for j in range(m)]
    off = sigma_in.copy()
    for j in range(m):
        off[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = 0.0
    if np.abs(off).max() > 1e-12:
        raise ValueError("correlated input modes are not supported; sigma_in must be block-diagonal")
    needs_fold = any(np.abs(b - 0.5 * np.trace(b) * np.eye(2)).max() > 1e-13 for b in blocks)
    if not needs_fold:
        return c, 0.5 * (sigma_in + sigma_in.T), mean_in
    s_blocks = []
    nus = []
    for b in blocks:
        nu, s = williamson_single_mode(b)
        s_blocks.append(s)
        nus.append(nu)
    s_full = np.zeros((2 * m, 2 * m))
    for j, s in enumerate(s_blocks):
        s_full[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = s
    c_new = c @ np.linalg.inv(s_full)
    sigma_new = np.kron(np.diag(nus), np.eye(2))
    return c_new, sigma_new, s_full @ mean_in


@dataclass(frozen=True)
class DriftDiffusion:
    """Unconditional dynamics: drift matrix ``a``, diffusion matrix ``d``, drive vector."""

    a: np.ndarray
    d: np.ndarray
    drive: np.ndarray


def drift_diffusion(model: DiffusiveModel) -> DriftDiffusion:
    """Drift, diffusion and drive of the unconditional diffusive dynamics."""
    om_n = symplectic_form(model.n)
    om_m = symplectic_form(model.m)
    a = om_n @ model.h_s + 0.5 * om_n @ model.c @ om_m @ model.c.T
    d = om_n @ model.c @ model.sigma_in @ model.c.T @ om_n.T
    drive = om_n @ model.c @ model.mean_in
    return DriftDiffusion(a=a, d=0.5 * (d + d.T), drive=drive)


def is_hurwitz(a: np.ndarray, tol: float = TOL_HURWITZ) -> bool:
    """True iff every eigenvalue of a has real part below -tol."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"drift matrix must be square, got {a.shape}")
    return bool(np.linalg.eigvals(a).real.max() < -tol)


def steady_state_unconditional(dd: DriftDiffusion) -> GaussianState:
    """Steady state of the unconditional dynamics (Lyapunov equation + linear solve)."""
    if not is_hurwitz(dd.a):
        raise NoSteadyStateError("drift matrix is not Hurwitz; the unconditional dynamics has no steady state")
    sigma = solve_continuous_lyapunov(dd.a, -dd.d)
    sigma = 0.5 * (sigma + sigma.T)
    res = np.abs(dd.a @ sigma + sigma @ dd.a.T + dd.d).max()
    if res > 1e-10:
        raise NumericError(f"Lyapunov solve left residual {res:.3e} > 1e-10")
    mean = np.linalg.solve(dd.a, -dd.drive)
    return GaussianState(mean, sigma)


def _inverse_sqrt_sum(sigma_in: np.ndarray, settings) -> np.ndarray:
    """(sigma_in + sigma_m)^(-1/2) with the exact rank-deficient homodyne limit.

    Diverging pointer directions are dropped; the kept orthonormal directions
    K contribute K (K^T (sigma_in + sigma_m,fin) K)^(-1/2) K^T.
    """
    dim = sigma_in.shape[0]
    fin = np.zeros((dim, dim))
    cols = []
    for j, setting in enumerate(settings):
        sl = slice(2 * j, 2 * j + 2)
        if setting.homodyne:
            u = np.zeros(dim)
            u[sl] = measured_quadrature(setting)
            cols.append(u)
        else:
            fin[sl, sl] = measurement_cm(setting)
            for q in (0, 1):
                e = np.zeros(dim)
                e[2 * j + q] = 1.0
                cols.append(e)
    k = np.column_stack(cols)
    kept = k.T @ (sigma_in + fin) @ k
    w, q = np.linalg.eigh(0.5 * (kept + kept.T))
    if w.min() <= 0:
        raise NumericError(f"sigma_in + sigma_m is singular on the kept directions: min eig = {w.min():.3e}")
    return k @ q @ np.diag(w**-0.5) @ q.T @ k.T


@dataclass(frozen=True)
class MonitoredModel:
    """A diffusive model together with its measurement matrices B and E."""

    base: DiffusiveModel
    settings: tuple
    b: np.ndarray
    e: np.ndarray


def monitored(model: DiffusiveModel, setting) -> MonitoredModel:
    """Attach a general-dyne setting (one per input mode, or one broadcast) to a model."""
    if isinstance(setting, GeneralDyneSetting):
        settings = (setting,) * model.m
    else:
        settings = tuple(setting)
    if len(settings) != model.m:
        raise ValueError(f"expected {model.m} measurement settings, got {len(settings)}")
    isq = _inverse_sqrt_sum(model.sigma_in, settings)
    om_n = symplectic_form(model.n)
    om_m = symplectic_form(model.m)
    b = model.c @ om_m @ isq
    e = om_n @ model.c @ model.sigma_in @ isq
    return MonitoredModel(base=model, settings=settings, b=b, e=e)


def _riccati_rhs(dd: DriftDiffusion, mm: MonitoredModel):
    a, d, b, e = dd.a, dd.d, mm.b, mm.e

    def rhs(sigma):
        gain = e - sigma @ b
        out = a @ sigma + sigma @ a.T + d - gain @ gain.T
        return 0.5 * (out + out.T)

    return rhs


def _rk4(rhs, y, h):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve_conditional_cm(mm: MonitoredModel, sigma0: np.ndarray, t_grid) -> np.ndarray:
    """Integrate the conditional-CM Riccati flow along a time grid.

    Fixed-step classical 4th-order integration with one step per grid
    interval; the grid spacing is the step size.  Every output CM is checked
    for validity within STEP_VALIDITY_TOL; a violation raises StepSizeError.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1 or (t.size > 1 and np.diff(t).min() <= 0):
        raise ValueError("time grid must be one-dimensional and strictly increasing")
    sigma = np.asarray(sigma0, dtype=float)
    validate_state(np.zeros(sigma.shape[0]), sigma)
    dd = drift_diffusion(mm.base)
    rhs = _riccati_rhs(dd, mm)
    omega = symplectic_form(mm.base.n)
    out = np.empty((t.size,) + sigma.shape)
    out[0] = sigma
    for i in range(1, t.size):
        sigma = _rk4(rhs, sigma, t[i] - t[i - 1])
        sigma = 0.5 * (sigma + sigma.T)
        wmin = np.linalg.eigvalsh(sigma + 1j * omega).min()
        if wmin < -STEP_VALIDITY_TOL:
            raise StepSizeError(
                f"conditional CM left the physical set at t = {t[i]:.6g} "
                f"(min eig(sigma + i Omega) = {wmin:.3e}); refine the time grid"
            )
        out[i] = sigma
    return out


def riccati_residual(mm: MonitoredModel, sigma: np.ndarray) -> float:
    """Max-norm residual of the algebraic Riccati equation at sigma.

    Uses the rearranged form At sigma + sigma At^T + Dt - sigma B B^T sigma
    with At = A + E B^T and Dt = D - E E^T, algebraically identical to the
    flow right-hand side.
    """
    dd = drift_diffusion(mm.base)
    at = dd.a + mm.e @ mm.b.T
    dt = dd.d - mm.e @ mm.e.T
    bbt = mm.b @ mm.b.T
    return float(np.abs(at @ sigma + sigma @ at.T + dt - sigma @ bbt @ sigma).max())


def steady_state_conditional(mm: MonitoredModel, sigma0: np.ndarray | None = None) -> np.ndarray:
    """Steady-state conditional CM by integrating the Riccati flow to convergence.

    Starts from the unconditional steady state (or ``sigma0``, e.g. to warm
    start a parameter sweep) and advances in blocks with a step size set by
    the local stiffness until the flow derivative falls below SS_FLOW_TOL.
    Integrate-to-convergence is robust in the rank-deficient homodyne limit
    where direct algebraic solvers need special care.
    """
    dd = drift_diffusion(mm.base)
    if not is_hurwitz(dd.a):
        raise NoSteadyStateError("drift matrix is not Hurwitz; conditional steady state undefined")
    if sigma0 is None:
        sigma = steady_state_unconditional(dd).cm
    else:
        sigma = np.asarray(sigma0, dtype=float)
        sigma = 0.5 * (sigma + sigma.T)
    rhs = _riccati_rhs(dd, mm)
    at = dd.a + mm.e @ mm.b.T
    bbt = mm.b @ mm.b.T
    at_norm = np.linalg.norm(at, 2)
    steps = 0
    while steps < SS_STEP_CAP:
        scale = at_norm + np.linalg.norm(bbt @ sigma, 2)
        h = 0.25 / max(scale, 1e-12)
        for _ in range(_SS_BLOCK):
            sigma = _rk4(rhs, sigma, h)
            sigma = 0.5 * (sigma + sigma.T)
        steps += _SS_BLOCK
        if np.abs(rhs(sigma)).max() < SS_FLOW_TOL:
            break
    else:
        raise ConvergenceError(
            f"Riccati flow not converged after {SS_STEP_CAP} steps; "
            f"residual {riccati_residual(mm, sigma):.3e}"
        )
    res = riccati_residual(mm, sigma)
    if res > SS_RESIDUAL_TOL:
        raise ConvergenceError(f"Riccati steady state has algebraic residual {res:.3e} > {SS_RESIDUAL_TOL:.1e}")
    return sigma


def unconditional_path(dd: DriftDiffusion, state0: GaussianState, t_grid) -> tuple[np.ndarray, np.ndarray]:
    """Unconditional first and second moments along a time grid (fixed-step RK4)."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1 or (t.size > 1 and np.diff(t).min() <= 0):
        raise ValueError("time grid must be one-dimensional and strictly increasing")
    means = np.empty((t.size, state0.mean.size))
    cms = np.empty((t.size,) + state0.cm.shape)
    mean = state0.mean.copy()
    cm = state0.cm.copy()
    means[0] = mean
    cms[0] = cm

    def rhs_cm(sigma):
        out = dd.a @ sigma + sigma @ dd.a.T + dd.d
        return 0.5 * (out + out.T)

    def rhs_mean(r):
        return dd.a @ r + dd.drive

    for i in range(1, t.size):
        h = t[i] - t[i - 1]
        cm = _rk4(rhs_cm, cm, h)
        cm = 0.5 * (cm + cm.T)
        mean = _rk4(rhs_mean, mean, h)
        means[i] = mean
        cms[i] = cm
    return means, cms


@dataclass(frozen=True)
class TrajectoryBatch:
    """Ensemble of monitored trajectories sharing one deterministic CM path.

    ``means`` has shape (n_traj, n_stored, 2n); ``records`` holds the measured
    dy increments summed over each storage window, shape
    (n_traj, n_stored - 1, 2m); ``sigma_c`` is the common conditional CM path.
    """

    times: np.ndarray
    means: np.ndarray
    records: np.ndarray
    sigma_c: np.ndarray
    seed: int

    @property
    def n_traj(self) -> int:
        return self.means.shape[0]


def simulate_trajectories(
    mm: MonitoredModel,
    state0: GaussianState,
    dt: float,
    T: float,
    n_traj: int,
    master_seed: int,
    *,
    n_threads: int = 1,
    store_stride: int = 1,
) -> TrajectoryBatch:
    """Euler-Maruyama ensemble of conditional means with the shared Riccati CM path.

    Trajectory k draws its Wiener increments from an independent substream
    keyed by (master_seed, k), so results are byte-identical for a fixed seed
    regardless of ``n_threads`` or chunking.  Increments have per-component
    variance dt/2 (see module docstring).  ``store_stride`` decimates storage:
    means are stored every ``store_stride`` steps and records are summed over
    each storage window.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if n_traj < 1:
        raise ValueError(f"need at least one trajectory, got {n_traj}")
    n_steps = int(round(T / dt))
    if n_steps < 1 or abs(n_steps * dt - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"T = {T} must be a positive integer multiple of dt = {dt}")
    stride = int(store_stride)
    if stride < 1 or n_steps % stride:
        raise ValueError(f"store_stride = {store_stride} must divide the {n_steps} steps")
    validate_state(state0.mean, state0.cm)
    if state0.n != mm.base.n:
        raise ValueError(f"initial state has {state0.n} modes, model has {mm.base.n}")

    dd = drift_diffusion(mm.base)
    rhs = _riccati_rhs(dd, mm)
    two_n = 2 * mm.base.n
    two_m = mm.b.shape[1]
    n_stored = n_steps // stride + 1

    # Shared deterministic CM path and per-step noise gains at full resolution.
    gains = np.empty((n_steps, two_n, two_m))
    sigma_c = np.empty((n_stored, two_n, two_n))
    sigma = state0.cm.copy()
    sigma_c[0] = sigma
    for t in range(n_steps):
        gains[t] = mm.e - sigma @ mm.b
        sigma = _rk4(rhs, sigma, dt)
        sigma = 0.5 * (sigma + sigma.T)
        if (t + 1) % stride == 0:
            sigma_c[(t + 1) // stride] = sigma

    means = np.empty((n_traj, n_stored, two_n))
    records = np.empty((n_traj, n_stored - 1, two_m))
    a_t = dd.a.T
    b = mm.b
    drive = dd.drive
    root = math.sqrt(0.5 * dt)

    def run_chunk(k0: int, k1: int) -> None:
        nt = k1 - k0
        dw = np.empty((nt, n_steps, two_m))
        for i, k in enumerate(range(k0, k1)):
            rng = np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(k,)))
            dw[i] = rng.standard_normal((n_steps, two_m))
        dw *= root
        r = np.tile(state0.mean, (nt, 1))
        means[k0:k1, 0] = r
        acc = np.zeros((nt, two_m))
        for t in range(n_steps):
            inc = dw[:, t, :]
            acc += inc - (r @ b) * dt
            r = r + (r @ a_t + drive) * dt + inc @ gains[t].T
            if (t + 1) % stride == 0:
                j = (t + 1) // stride
                means[k0:k1, j] = r
                records[k0:k1, j - 1] = acc
                acc[:] = 0.0

    chunks = [(k, min(k + _TRAJ_CHUNK, n_traj)) for k in range(0, n_traj, _TRAJ_CHUNK)]
    if n_threads <= 1:
        for k0, k1 in chunks:
            run_chunk(k0, k1)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(lambda span: run_chunk(*span), chunks))

    # Slice of the full step grid, so runs with different strides share times.
    times = (np.arange(n_steps + 1) * dt)[::stride]
    return TrajectoryBatch(times=times, means=means, records=records, sigma_c=sigma_c, seed=master_seed)


def excess_noise(batch: TrajectoryBatch, t_index: int = -1) -> np.ndarray:
    """Excess noise Sigma at a stored time: twice the sample covariance of the means.

    The anticommutator convention doubles the classical covariance, so the
    ensemble identity reads sigma_unc = sigma_c + Sigma.
    """
    if batch.n_traj < 2:
        raise ValueError("excess noise needs at least two trajectories")
    x = batch.means[:, t_index, :]
    return 2.0 * np.cov(x, rowvar=False)


def daemonic_ergotropy_path(mm: MonitoredModel, state0: GaussianState, t_grid) -> np.ndarray:
    """Daemonic ergotropy of the monitored system along a time grid.

    At each time: tr sigma_unc / 4 + |mean_unc|^2 / 2 - (1/2) sum_j nu_j(sigma_c).
    The outcome-averaged conditional energy equals the unconditional energy,
    so only the passive energy reflects the monitoring.
    """
    dd = drift_diffusion(mm.base)
    means, cms = unconditional_path(dd, state0, t_grid)
    sig_c = evolve_conditional_cm(mm, state0.cm, t_grid)
    out = np.empty(len(sig_c))
    for i in range(len(sig_c)):
        e = 0.25 * float(np.trace(cms[i])) + 0.5 * float(means[i] @ means[i])
        passive = 0.5 * float(symplectic_eigenvalues(sig_c[i]).sum())
        v = e - passive
        if v < 0.0:
            if v < -1e-9:
                raise NumericError(f"daemonic ergotropy evaluated to {v:.3e} at t = {t_grid[i]:.6g}")
            v = 0.0
        out[i] = v
    return out


def daemonic_ergotropy_t(mm: MonitoredModel, state0: GaussianState, t: float, dt: float | None = None) -> float:
    """Daemonic ergotropy at a single time t (uniform grid from 0, default t/10000 step)."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t == 0:
        grid = np.array([0.0])
    else:
        h = dt if dt is not None else t / 10000.0
        n = max(1, int(round(t / h)))
        grid = np.linspace(0.0, t, n + 1)
    return float(daemonic_ergotropy_path(mm, state0, grid)[-1])
