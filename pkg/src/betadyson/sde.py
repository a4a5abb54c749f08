"""Path simulation of beta-Dyson Brownian motion and the Dyson Ornstein-Uhlenbeck process.

States are held internally as ``(k, paths)`` arrays so that every pairwise
interaction is a contiguous vector operation; public functions take and
return ``(paths, k)``.

Schemes
-------
``trapezoidal`` (default)
    Drift-implicit trapezoidal step. With ``c = (beta/2) dt`` and ``F`` the
    pairwise repulsion ``F_i(x) = sum_{j != i} 1/(x_i - x_j)``,

        x' = x + dW + c/2 F(x) + c/2 F(x').

    ``x'`` is the unique minimiser of the convex barrier problem
    ``1/2 |x' - y|^2 - c/2 sum_{i<j} log(x'_j - x'_i)`` on the ordered chamber,
    so order is preserved by construction. Since ``x . F(x) = k(k-1)/2`` the
    bias of ``|x|^2`` per step is ``c^2/4 (|F(x)|^2 - |F(x')|^2)``, which
    telescopes along the path. The first step is fully implicit because the
    start may be arbitrarily close to a collision.
``implicit``
    Backward Euler in the drift, ``x' = x + dW + c F(x')``; biased by
    ``-c^2 |F(x')|^2`` per step in ``|x|^2``.
``euler_sorted``
    Explicit Euler-Maruyama, re-sorted after each step. A step that leaves a
    gap below ``sqrt(dt) * 1e-3`` is redone as four Brownian-bridge
    sub-steps, recursively up to ``guard_levels`` times.
``euler_reflect``
    Explicit Euler-Maruyama without refinement; crossed neighbours are
    reflected about their midpoint until the state is ordered.

The explicit schemes carry a per-step bias ``dt^2 |b(x)|^2`` in ``|x|^2``
whose mean is infinite once ``beta <= 1``; they are kept for comparison.

For the DOU process every scheme except the explicit ones integrates the
linear pull exactly: the step is the DBM step in the clock ``s = e^t - 1``
under ``Y(t) = e^{-t/2} X(s)``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from ._kernel import theta_step
from .partitions import Partition
from .stats import Estimate, two_sample_z

IMPLICIT_WEIGHTS = {"trapezoidal": 0.5, "implicit": 1.0}
SCHEMES = ("trapezoidal", "implicit", "euler_sorted", "euler_reflect")
DEFAULT_SCHEME = "trapezoidal"
GUARD_FACTOR = 1e-3
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 60
EXPERIMENTAL_BETA = 0.5


class SimulationError(ArithmeticError):
    """A step produced non-finite values."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite state at step {step}")


class Process(str, Enum):
    DBM = "dbm"
    DOU = "dou"


@dataclass(frozen=True)
class SdeConfig:
    """Simulation settings. ``dt`` defaults to ``1e-3 * t_final``."""

    beta: float
    dim: int
    t_final: float = 1.0
    dt: float | None = None
    scheme: str = DEFAULT_SCHEME
    paths: int = 100_000
    seed: int | None = None
    antithetic: bool = True
    guard_levels: int = 4
    retries: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.dim < 1:
            raise ValueError(f"dim must be at least 1, got {self.dim}")
        if self.t_final < 0:
            raise ValueError(f"t_final must be non-negative, got {self.t_final}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.paths < 1:
            raise ValueError(f"paths must be at least 1, got {self.paths}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.beta < EXPERIMENTAL_BETA:
            warnings.warn(f"beta={self.beta} is below {EXPERIMENTAL_BETA}; gap statistics are not validated there",
                          stacklevel=3)

    @property
    def theta(self) -> float:
        return self.beta / 2

    @property
    def step(self) -> float:
        if self.dt is not None:
            return self.dt
        return 1e-3 * self.t_final if self.t_final > 0 else 1e-3

    def grid(self) -> np.ndarray:
        """Step sizes summing to ``t_final``; the last step absorbs the remainder."""
        if self.t_final == 0:
            return np.zeros(0)
        n = max(1, int(math.ceil(self.t_final / self.step - 1e-9)))
        steps = np.full(n, self.t_final / n)
        return steps


# -- initial ties ---------------------------------------------------------------

def semicircle_quantiles(m: int) -> np.ndarray:
    """Ordered ``(i - 1/2)/m`` quantiles of the semicircle law on ``[-2, 2]``."""
    def cdf(x):
        return 0.5 + (x * math.sqrt(max(4 - x * x, 0.0)) / 4 + math.asin(x / 2)) / math.pi

    return np.array([brentq(lambda x: cdf(x) - (i - 0.5) / m, -2, 2, xtol=1e-14) for i in range(1, m + 1)])


def split_ties(x0, dt0: float) -> np.ndarray:
    """Spread every block of equal coordinates by ``sqrt(dt0)`` times the
    semicircle quantiles of the block size. Strict inputs are returned as is.
    """
    x = np.array(x0, dtype=float)
    if np.any(np.diff(x) < 0):
        raise ValueError("initial state must be weakly increasing")
    out = x.copy()
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[j + 1] == x[i]:
            j += 1
        if j > i:
            out[i : j + 1] = x[i] + math.sqrt(dt0) * semicircle_quantiles(j - i + 1)
        i = j + 1
    if np.any(np.diff(out) <= 0):
        raise ValueError("tie splitting overlapped a neighbour; reduce the initial step")
    return out


# -- single steps on (k, n) arrays ------------------------------------------------

def repulsion(x: np.ndarray) -> np.ndarray:
    """``sum_{j != i} 1/(x_i - x_j)`` for ordered columns of ``x``."""
    k = x.shape[0]
    out = np.zeros_like(x)
    for i in range(k):
        for j in range(i + 1, k):
            inv = 1.0 / (x[j] - x[i])
            out[i] -= inv
            out[j] += inv
    return out


def _explicit(x, h, beta, ou, dw):
    drift = 0.5 * beta * repulsion(x)
    if ou:
        drift -= 0.5 * x
    return x + drift * h + dw


def _reflect(x):
    """Odd-even transposition: each crossed neighbour pair is reflected about its midpoint."""
    k = x.shape[0]
    for _ in range(k):
        changed = False
        for start in (0, 1):
            for i in range(start, k - 1, 2):
                lo, hi = x[i], x[i + 1]
                bad = lo > hi
                if bad.any():
                    changed = True
                    x[i], x[i + 1] = np.where(bad, hi, lo), np.where(bad, lo, hi)
        if not changed:
            break
    return x


def _euler_sorted(x, h, beta, ou, dw, rng, level, levels):
    new = np.sort(_explicit(x, h, beta, ou, dw), axis=0)
    if levels == 0 or x.shape[0] < 2:
        return new
    bad = (np.diff(new, axis=0) < math.sqrt(h) * GUARD_FACTOR).any(axis=0)
    if level >= levels or not bad.any():
        return new
    idx = np.flatnonzero(bad)
    sub = x[:, idx]
    z = rng.standard_normal((4,) + sub.shape) * math.sqrt(h / 4)
    bridge = z - z.mean(axis=0) + dw[:, idx] / 4
    for piece in bridge:
        sub = _euler_sorted(sub, h / 4, beta, ou, piece, rng, level + 1, levels)
    new[:, idx] = sub
    return new


def _solve_spd(H: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Solve ``H s = g`` column-wise for ``H`` of shape ``(k, k, n)``, SPD per column."""
    k = g.shape[0]
    H = H.copy()
    s = g.copy()
    for p in range(k):
        for r in range(p + 1, k):
            f = H[r, p] / H[p, p]
            H[r, p:] -= f * H[p, p:]
            s[r] -= f * s[p]
    for p in range(k - 1, -1, -1):
        acc = s[p]
        for q in range(p + 1, k):
            acc = acc - H[p, q] * s[q]
        s[p] = acc / H[p, p]
    return s


def _barrier_start(y, c):
    """Feasible start for the implicit solve: sorted ``y`` with gaps at least ``sqrt(c)``."""
    x = np.sort(y, axis=0)
    gap = math.sqrt(c)
    for i in range(1, x.shape[0]):
        x[i] = np.maximum(x[i], x[i - 1] + gap)
    x += y.mean(axis=0) - x.mean(axis=0)
    return x


def _barrier(x, y, c):
    val = 0.5 * ((x - y) ** 2).sum(axis=0)
    for i in range(x.shape[0]):
        for j in range(i + 1, x.shape[0]):
            val -= c * np.log(x[j] - x[i])
    return val


def _barrier_derivatives(x, y, c):
    k = x.shape[0]
    grad = x - y
    H = np.zeros((k, k, x.shape[1]))
    for i in range(k):
        H[i, i] = 1.0
    for i in range(k):
        for j in range(i + 1, k):
            inv = 1.0 / (x[j] - x[i])
            grad[i] += c * inv
            grad[j] -= c * inv
            w = c * inv * inv
            H[i, i] += w
            H[j, j] += w
            H[i, j] = -w
            H[j, i] = -w
    return grad, H


def _backtrack(x, y, c, grad, step, alpha, max_halvings: int = 60):
    phi0 = _barrier(x, y, c)
    slope = (grad * step).sum(axis=0)
    for _ in range(max_halvings):
        short = _barrier(x - alpha * step, y, c) > phi0 - 1e-4 * alpha * slope
        if not short.any():
            break
        alpha = np.where(short, alpha / 2, alpha)
    return alpha


def implicit_solve(y: np.ndarray, c: float, guess: np.ndarray | None = None, tol: float = NEWTON_TOL) -> np.ndarray:
    """Ordered ``x`` with ``x = y + c * repulsion(x)`` for each column of ``y``.

    Newton on the barrier objective with steps cut to stay inside the chamber
    (fraction to boundary 0.99) and Armijo backtracking. ``guess`` columns that are not
    strictly ordered are replaced by a safe start.
    """
    k, n = y.shape
    if k == 1:
        return y.copy()
    if k == 2:
        mid = 0.5 * (y[0] + y[1])
        d = y[1] - y[0]
        g = 0.5 * (d + np.sqrt(d * d + 8 * c))
        return np.stack([mid - g / 2, mid + g / 2])
    if guess is None:
        x = _barrier_start(y, c)
    else:
        x = guess.copy()
        bad = ~(np.diff(x, axis=0) > 0).all(axis=0)
        if bad.any():
            x[:, bad] = _barrier_start(y[:, bad], c)
    scale = 1.0 + np.abs(y).max(axis=0)
    active = None
    for _ in range(NEWTON_MAX_ITER):
        if active is None:
            xa, ya, sc = x, y, scale
        else:
            xa, ya, sc = x[:, active], y[:, active], scale[active]
        grad, H = _barrier_derivatives(xa, ya, c)
        step = _solve_spd(H, grad)
        gap = np.diff(xa, axis=0)
        dgap = np.diff(step, axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            limit = np.where(dgap > 0, gap / dgap, np.inf).min(axis=0)
        alpha = np.minimum(1.0, 0.99 * limit)
        size = np.abs(step).max(axis=0)
        min_gap = gap.min(axis=0)
        # Armijo backtracking, skipped once the step is tiny against the
        # smallest gap: the objective is locally quadratic there and flat to
        # rounding, so the full Newton step is taken
        search = np.flatnonzero(size > 1e-3 * min_gap)
        if search.size:
            alpha[search] = _backtrack(xa[:, search], ya[:, search], c, grad[:, search], step[:, search], alpha[search])
        new = xa - alpha * step
        # quadratic convergence: after a full step the error is O(size^2 / gap)
        done = (alpha == 1.0) & ((size <= tol * sc) | (size * size <= tol * sc * min_gap))
        if active is None:
            x = new
            active = np.flatnonzero(~done)
        else:
            x[:, active] = new
            active = active[~done]
        if active.size == 0:
            return x
    raise ArithmeticError(f"implicit step did not converge on {active.size} paths")


def _theta_step(x, h, beta, ou, dw, weight, step_index):
    """Drift-implicit step with implicit weight ``weight`` (1 = backward, 1/2 = trapezoid).

    The DOU coefficients are those of the DBM step in the clock
    ``s = e^t - 1`` under ``Y(t) = e^{-t/2} X(s)``, which integrates the linear
    pull exactly.
    """
    if ou:
        decay = math.exp(-h / 2)
        noise = math.sqrt(-math.expm1(-h) / h)
        c_imp = 0.5 * beta * -math.expm1(-h) * weight
        c_exp = beta * math.sinh(h / 2) * (1 - weight)
    else:
        decay, noise = 1.0, 1.0
        c_imp = 0.5 * beta * h * weight
        c_exp = 0.5 * beta * h * (1 - weight)
    new, failed = theta_step(x, dw * noise if noise != 1.0 else dw, decay, c_exp, c_imp, NEWTON_TOL, NEWTON_MAX_ITER)
    if failed >= 0:
        raise SimulationError(step_index, f"implicit solve did not converge at step {step_index} (path {failed})")
    return new


# -- path simulation -------------------------------------------------------------

def _initial(x0, cfg: SdeConfig) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 1:
        if x0.size != cfg.dim:
            raise ValueError(f"initial state has {x0.size} coordinates, expected {cfg.dim}")
        x0 = split_ties(x0, cfg.step)
        return np.repeat(x0[:, None], cfg.paths, axis=1)
    if x0.shape != (cfg.paths, cfg.dim):
        raise ValueError(f"initial states must have shape {(cfg.paths, cfg.dim)}, got {x0.shape}")
    if np.any(np.diff(x0, axis=1) < 0):
        raise ValueError("initial states must be weakly increasing")
    x = x0.T.copy()
    if cfg.dim > 1 and np.any(np.diff(x, axis=0) == 0):
        tied = np.flatnonzero((np.diff(x, axis=0) == 0).any(axis=0))
        for p in tied:
            x[:, p] = split_ties(x[:, p], cfg.step)
    return x


def _run(x: np.ndarray, cfg: SdeConfig, ou: bool, rng: np.random.Generator, record=()) -> tuple[np.ndarray, list]:
    """Advance ``(k, n)`` states to ``t_final``, copying the state after each
    step index in ``record``. With antithetic pairing column ``p + n // 2``
    receives the negated increments of column ``p``.
    """
    k, n = x.shape
    half = n // 2 if cfg.antithetic else 0
    record = set(record)
    snaps = []
    for s, h in enumerate(cfg.grid()):
        if half:
            z = rng.standard_normal((k, n - half)) * math.sqrt(h)
            dw = np.concatenate([z[:, :half], -z[:, :half], z[:, half:]], axis=1)
        else:
            dw = rng.standard_normal((k, n)) * math.sqrt(h)
        if cfg.scheme in IMPLICIT_WEIGHTS:
            # the first step is fully implicit: starts may sit arbitrarily close to a collision
            weight = 1.0 if s == 0 else IMPLICIT_WEIGHTS[cfg.scheme]
            x = _theta_step(x, h, cfg.beta, ou, dw, weight, s)
        elif cfg.scheme == "euler_sorted":
            x = _euler_sorted(x, h, cfg.beta, ou, dw, rng, 0, cfg.guard_levels)
        else:
            x = _reflect(_explicit(x, h, cfg.beta, ou, dw))
        if not np.isfinite(x).all():
            raise SimulationError(s)
        if s in record:
            snaps.append(x.copy())
    return x, snaps


def _shares(cfg: SdeConfig) -> list[int]:
    base, extra = divmod(cfg.paths, cfg.workers)
    return [base + (1 if w < extra else 0) for w in range(cfg.workers)]


def _record_steps(cfg: SdeConfig, times) -> list[int]:
    grid = np.cumsum(cfg.grid())
    steps = []
    for t in times:
        s = int(np.argmin(np.abs(grid - t))) if grid.size else -1
        if s < 0 or abs(grid[s] - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"time {t} is not on the step grid")
        steps.append(s)
    return steps


def _simulate(process, x0, cfg: SdeConfig, rng=None, times=()) -> tuple[np.ndarray, np.ndarray]:
    ou = Process(process) is Process.DOU
    if rng is not None and cfg.workers > 1:
        raise ValueError("pass either an explicit rng or workers > 1, not both")
    attempt = cfg
    for retry in range(cfg.retries + 1):
        try:
            steps = _record_steps(attempt, times)
            x_all = _initial(x0, attempt)
            if rng is not None:
                x, snaps = _run(x_all, attempt, ou, rng, steps)
                return x.T, _stack(snaps, steps)
            rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(attempt.seed).spawn(attempt.workers)]
            bounds = np.cumsum([0] + _shares(attempt))
            sub = [replace(attempt, paths=int(b - a), workers=1) for a, b in zip(bounds[:-1], bounds[1:])]

            def work(w):
                return _run(x_all[:, bounds[w] : bounds[w + 1]], sub[w], ou, rngs[w], steps)

            if attempt.workers == 1:
                parts = [work(0)]
            else:
                with ThreadPoolExecutor(max_workers=attempt.workers) as pool:
                    parts = list(pool.map(work, range(attempt.workers)))
            x = np.concatenate([p[0] for p in parts], axis=1)
            snaps = [np.concatenate([p[1][i] for p in parts], axis=1) for i in range(len(set(steps)))]
            return x.T, _stack(snaps, steps)
        except SimulationError:
            if retry == cfg.retries:
                raise
            attempt = replace(attempt, dt=attempt.step / 2)
    raise AssertionError("unreachable")


def _stack(snaps, steps) -> np.ndarray:
    by_step = dict(zip(sorted(set(steps)), snaps))
    if not steps:
        return np.zeros((0,))
    return np.stack([by_step[s].T for s in steps])


def simulate_dbm(x0, cfg: SdeConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Endpoints at ``cfg.t_final`` of ``cfg.paths`` Dyson Brownian motion paths, shape ``(paths, k)``.

    ``x0`` is one weakly increasing start shared by all paths or one start per
    path. Without ``rng`` the streams derive from ``cfg.seed`` (one per worker).
    On :class:`SimulationError` the run is repeated with half the step, up to
    ``cfg.retries`` times.
    """
    return _simulate(Process.DBM, x0, cfg, rng)[0]


def simulate_dou(y0, cfg: SdeConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """As :func:`simulate_dbm` for the Dyson Ornstein-Uhlenbeck process."""
    return _simulate(Process.DOU, y0, cfg, rng)[0]


def simulate(process, x0, cfg: SdeConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    return _simulate(process, x0, cfg, rng)[0]


def simulate_snapshots(process, x0, cfg: SdeConfig, times, rng: np.random.Generator | None = None) -> np.ndarray:
    """States at each of ``times`` (which must lie on the step grid), shape ``(len(times), paths, k)``."""
    return _simulate(process, x0, cfg, rng, tuple(times))[1]


# -- estimators ------------------------------------------------------------------

def pair_means(values: np.ndarray, cfg: SdeConfig) -> np.ndarray:
    """Average antithetic partners: within each worker share of size ``m``,
    column ``p`` pairs with ``p + m // 2``; an odd leftover stands alone.
    """
    values = np.asarray(values, dtype=float)
    if not cfg.antithetic:
        return values
    out, start = [], 0
    for m in _shares(cfg):
        block = values[start : start + m]
        h = m // 2
        out.append(0.5 * (block[:h] + block[h : 2 * h]))
        out.append(block[2 * h :])
        start += m
    return np.concatenate(out)


def estimate(values, cfg: SdeConfig) -> Estimate:
    values = np.asarray(values, dtype=float)
    est = Estimate.from_samples(pair_means(values, cfg))
    return Estimate(est.mean, est.std_error, values.size)


def statistics(x: np.ndarray, theta: float, kappa=(2,)) -> dict[str, np.ndarray]:
    """Symmetric statistics ``p1, p2, p1^2`` and ``J_kappa`` of each row of ``x``."""
    from .jack import JackParams, build_jack

    x = np.asarray(x, dtype=float)
    p1 = x.sum(axis=1)
    kappa = Partition(kappa)
    jack = build_jack(JackParams(theta, x.shape[1]), kappa)
    return {
        "p1": p1,
        "p2": (x * x).sum(axis=1),
        "p1^2": p1 * p1,
        f"J{kappa}": np.broadcast_to(jack.eval(x), p1.shape).astype(float),
    }


def mc_jack_moment(process, x0, cfg: SdeConfig, kappa, rng: np.random.Generator | None = None) -> Estimate:
    """Monte Carlo estimate of ``E[J_kappa(X(t_final))]`` with antithetic pairing."""
    from .jack import JackParams, build_jack

    kappa = Partition(kappa)
    if len(kappa) > cfg.dim:
        raise ValueError(f"{kappa} has more than {cfg.dim} parts")
    if not kappa:
        return Estimate(1.0, 0.0, cfg.paths)
    x = simulate(process, x0, cfg, rng)
    return estimate(build_jack(JackParams(cfg.theta, cfg.dim), kappa).eval(x), cfg)


@dataclass
class PipelineReport:
    """Comparison of the two routes to the time-``t`` law of the lower level."""

    beta: float
    k: int
    t: float
    x_top: tuple
    lhs: dict[str, Estimate]
    rhs: dict[str, Estimate]

    @property
    def z_scores(self) -> dict[str, float]:
        return {name: two_sample_z(self.lhs[name], self.rhs[name]) for name in self.lhs}

    def passed(self, z_max: float = 3.0) -> bool:
        return all(abs(z) <= z_max for z in self.z_scores.values())

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "k": self.k,
            "t": self.t,
            "x_top": list(self.x_top),
            "statistics": {
                name: {"lhs": self.lhs[name].to_dict(), "rhs": self.rhs[name].to_dict(), "z": z}
                for name, z in self.z_scores.items()
            },
        }


def _duplicate_for_pairs(x: np.ndarray, cfg: SdeConfig) -> np.ndarray:
    """Arrange per-path starts so antithetic partners share a start."""
    if not cfg.antithetic:
        return x
    out, start = [], 0
    for m in _shares(cfg):
        h = m // 2
        block = x[start : start + m]
        out.append(np.concatenate([block[:h], block[:h], block[2 * h :]]))
        start += m
    return np.concatenate(out)


def mc_intertwining(x_top, cfg: SdeConfig, kappa=(2,), t: float | None = None, rng: np.random.Generator | None = None,
                    process=Process.DBM) -> PipelineReport:
    """Compare ``Lambda P^(k)(t)`` with ``P^(k+1)(t) Lambda`` started from ``x_top``.

    ``cfg.dim`` is the lower dimension ``k``; ``x_top`` has ``k + 1`` strictly
    increasing entries and ``t`` overrides ``cfg.t_final``. Without ``rng`` the
    kernel draws and both simulations use separate substreams of ``cfg.seed``.
    Antithetic partners on the lower route share their start.
    """
    from .dixon_anderson import as_ordered, da_sample, da_sample_batch

    x_top = as_ordered(x_top, strict=True, name="x_top")
    k = cfg.dim
    if x_top.size != k + 1:
        raise ValueError(f"x_top must have {k + 1} entries for dim={k}")
    if t is not None:
        cfg = replace(cfg, t_final=t)
    theta = cfg.theta
    upper_cfg = replace(cfg, dim=k + 1)
    if rng is not None:
        cfg, upper_cfg = replace(cfg, workers=1), replace(upper_cfg, workers=1)
        draw_lower = draw_upper = rng
        sim_lower = sim_upper = rng
    else:
        children = np.random.SeedSequence(cfg.seed).spawn(4)
        draw_lower, draw_upper = (np.random.default_rng(c) for c in children[:2])
        cfg = replace(cfg, seed=int(children[2].generate_state(1)[0]))
        upper_cfg = replace(upper_cfg, seed=int(children[3].generate_state(1)[0]))
        sim_lower = sim_upper = None
    starts = _duplicate_for_pairs(da_sample(x_top, theta, draw_lower, size=cfg.paths), cfg)
    lower_end = simulate(process, starts, cfg, sim_lower)
    upper_end = simulate(process, x_top, upper_cfg, sim_upper)
    projected = da_sample_batch(upper_end, theta, draw_upper)
    lhs = {name: estimate(v, cfg) for name, v in statistics(lower_end, theta, kappa).items()}
    rhs = {name: estimate(v, upper_cfg) for name, v in statistics(projected, theta, kappa).items()}
    return PipelineReport(cfg.beta, k, cfg.t_final, tuple(float(v) for v in x_top), lhs, rhs)


def squared_radius_slope(beta: float, k: int) -> float:
    """Dimension ``beta k(k-1)/2 + k`` of the squared Bessel process ``|X|^2``."""
    return beta * k * (k - 1) / 2 + k


def dou_mean_square(y0, beta: float, t: float) -> float:
    y0 = np.asarray(y0, dtype=float)
    return float(y0 @ y0 * math.exp(-t) + squared_radius_slope(beta, y0.size) * -math.expm1(-t))


def bessel_slope_mc(x0, cfg: SdeConfig, n_times: int = 10, rng: np.random.Generator | None = None) -> Estimate:
    """Per-path least-squares slope of ``|X(t)|^2`` over ``n_times`` equally
    spaced grid times; its mean is the squared Bessel dimension.
    """
    steps = len(cfg.grid())
    if n_times < 2 or steps % n_times:
        raise ValueError(f"n_times must be >= 2 and divide the {steps} steps")
    times = np.cumsum(cfg.grid())[steps // n_times - 1 :: steps // n_times]
    snaps = simulate_snapshots(Process.DBM, x0, cfg, times, rng)
    r = (snaps**2).sum(axis=2)
    tc = times - times.mean()
    slopes = (tc[:, None] * r).sum(axis=0) / (tc @ tc)
    return estimate(slopes, cfg)


def dou_relaxation_mc(y0, cfg: SdeConfig, times, rng: np.random.Generator | None = None) -> list[tuple[float, Estimate, float]]:
    """``(t, estimate of E|Y(t)|^2, closed form)`` for each of ``times``."""
    snaps = simulate_snapshots(Process.DOU, y0, cfg, times, rng)
    return [(float(t), estimate((snap**2).sum(axis=1), cfg), dou_mean_square(y0, cfg.beta, t)) for t, snap in zip(times, snaps)]
