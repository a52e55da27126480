"""Double-precision reference simulator and the Gaussian-pulse benchmark.

The analysis modules are exact; this one is deliberately not. It advances a
scheme on a periodic n x n grid in float64, seeds a Gaussian density pulse,
and measures how anisotropic the evolved density is by comparing radial
profiles along four lattice rays: (1,0), (0,1), (1,1) and (2,1), i.e. the
angles 0, pi/2, pi/4 and arctan(1/2). Node values along each ray are
interpolated onto a common radial grid with a sliding six-point Lagrange
quintic, and the anisotropy metrics are max-abs differences against the
angle-0 profile.

Two initializations are provided. ``init_gaussian`` zeroes every
non-conserved moment; ``init_equilibrium`` puts them at their linear
equilibria. Benchmark runs default to the latter: a zero start is an order-1
departure from equilibrium, and with relaxation rates close to 2 that
transient decays so slowly that its node-level anisotropy survives the whole
run and buries any density-profile signal below roughly 1e-5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .scheme import Scheme, scheme_from_config, scheme_step_matrix

PROFILE_DIRECTIONS = ((1, 0), (0, 1), (1, 1), (2, 1))
PROFILE_NAMES = {(1, 0): "rho_0", (0, 1): "rho_pi2",
                 (1, 1): "rho_pi4", (2, 1): "rho_atan12"}
COMMON_GRID_STEP = 0.005
COMMON_GRID_MAX = 0.5


class DivergenceError(RuntimeError):
    """The float field produced a NaN; carries the failing step index."""


@dataclass(frozen=True)
class SimConfig:
    scheme: Scheme
    grid: int = 100
    dx: float = 0.02
    lam: float = 1.0
    steps: int = 12
    init: str = "equilibrium"    # "equilibrium" or "zero" non-conserved moments

    def __post_init__(self):
        if self.init not in ("equilibrium", "zero"):
            raise ValueError(f"init must be 'equilibrium' or 'zero', got {self.init!r}")

    @property
    def dt(self):
        return self.dx / self.lam

    def coordinates(self):
        """Node coordinates of one axis: x_i = -1 + i dx (periodic box)."""
        return -1.0 + self.dx * np.arange(self.grid)

    @property
    def center(self):
        return self.grid // 2


@dataclass(frozen=True)
class RadialProfile:
    direction: tuple
    radii: np.ndarray       # strictly increasing, radii[0] = 0 (center node)
    values: np.ndarray


def step_matrix_float(scheme: Scheme) -> np.ndarray:
    """Float64 image of the exact one-step matrix M^-1 J M."""
    return np.array([[float(v) for v in row]
                     for row in scheme_step_matrix(scheme)])


def _pulse(config: SimConfig) -> np.ndarray:
    x = config.coordinates()
    X, Y = np.meshgrid(x, x, indexing="ij")
    return np.exp(-10.0 * X * X - 10.0 * Y * Y)


def init_gaussian(config: SimConfig) -> np.ndarray:
    """Field with density exp(-10 x^2 - 10 y^2) and all other moments zero."""
    rho = _pulse(config)
    minv_col0 = np.array([float(row[0]) for row in config.scheme.basis.M_inv])
    return minv_col0[:, None, None] * rho[None, :, :]


def init_equilibrium(config: SimConfig) -> np.ndarray:
    """Same Gaussian density, non-conserved moments at equilibrium E (rho,0,0).

    With zero momentum only the density column of E contributes, so the moment
    vector at each node is rho * (1, 0, 0, E[:,0]). This start carries no
    relaxation transient, which is what lets runs resolve anisotropy levels
    far below the transient's own node-level anisotropy.
    """
    rho = _pulse(config)
    scheme = config.scheme
    moments = [1.0, 0.0, 0.0] + [float(row[0]) for row in scheme.E]
    minv = scheme.basis.M_inv
    weights = np.array([
        sum(float(minv[j][k]) * moments[k] for k in range(scheme.q))
        for j in range(scheme.q)
    ])
    return weights[:, None, None] * rho[None, :, :]


def step(field: np.ndarray, scheme: Scheme, step_index=None,
         matrix: np.ndarray | None = None) -> np.ndarray:
    """One update: relax in moment space, then stream with periodic wrap."""
    if matrix is None:
        matrix = step_matrix_float(scheme)
    collided = np.tensordot(matrix, field, axes=([1], [0]))
    out = np.empty_like(collided)
    for j, (vx, vy) in enumerate(scheme.velocities):
        out[j] = np.roll(collided[j], shift=(vx, vy), axis=(0, 1))
    if np.isnan(out).any():
        where = "" if step_index is None else f" at step {step_index}"
        raise DivergenceError(f"field diverged (NaN){where}")
    return out


def simulate(config: SimConfig) -> np.ndarray:
    if config.init == "zero":
        field = init_gaussian(config)
    else:
        field = init_equilibrium(config)
    matrix = step_matrix_float(config.scheme)
    for k in range(config.steps):
        field = step(field, config.scheme, step_index=k, matrix=matrix)
    return field


def density(field: np.ndarray) -> np.ndarray:
    """Density = sum of populations (the moment matrix's all-ones row)."""
    return field.sum(axis=0)


def extract_profile(field: np.ndarray, direction, config: SimConfig) -> RadialProfile:
    """Node samples along the lattice ray from the center, r in physical units.

    The ray is truncated at half the (periodic) domain; every sample is an
    exact node read, no interpolation here.
    """
    if direction not in PROFILE_DIRECTIONS:
        raise ValueError(f"direction must be one of {PROFILE_DIRECTIONS}")
    p, q = direction
    n = config.grid
    c = config.center
    k_max = (n // 2 - 1) // max(p, q)
    rho = density(field)
    radii = np.empty(k_max + 1)
    values = np.empty(k_max + 1)
    span = math.hypot(p, q) * config.dx
    for k in range(k_max + 1):
        radii[k] = k * span
        values[k] = rho[(c + k * p) % n, (c + k * q) % n]
    return RadialProfile(direction, radii, values)


def quintic_interpolate(profile: RadialProfile, r_grid) -> np.ndarray:
    """Sliding six-point Lagrange interpolation (degree five per window)."""
    rs, vs = profile.radii, profile.values
    m = len(rs)
    if m < 6:
        raise ValueError(f"need at least 6 samples for quintic interpolation, got {m}")
    r_grid = np.asarray(r_grid, dtype=float)
    out = np.empty_like(r_grid)
    for t_idx, t in enumerate(r_grid):
        lo = int(np.searchsorted(rs, t)) - 3
        lo = min(max(lo, 0), m - 6)
        xw = rs[lo:lo + 6]
        yw = vs[lo:lo + 6]
        acc = 0.0
        for i in range(6):
            term = yw[i]
            for j in range(6):
                if i != j:
                    term *= (t - xw[j]) / (xw[i] - xw[j])
            acc += term
        out[t_idx] = acc
    return out


def common_grid() -> np.ndarray:
    count = int(round(COMMON_GRID_MAX / COMMON_GRID_STEP)) + 1
    return COMMON_GRID_STEP * np.arange(count)


@dataclass(frozen=True)
class AnisotropyMetrics:
    err_pi4: float        # max |rho_0 - rho_pi4| on the common radial grid
    err_atan12: float     # max |rho_0 - rho_atan12|
    err_pi2: float        # max |rho_0 - rho_pi2|
    table: dict = dataclass_field(repr=False, default_factory=dict)


def anisotropy_error(field: np.ndarray, config: SimConfig) -> AnisotropyMetrics:
    """Interpolate the four ray profiles onto the common grid and compare."""
    grid = common_grid()
    table = {"r": grid}
    for direction in PROFILE_DIRECTIONS:
        profile = extract_profile(field, direction, config)
        table[PROFILE_NAMES[direction]] = quintic_interpolate(profile, grid)
    base = table["rho_0"]
    return AnisotropyMetrics(
        err_pi4=float(np.max(np.abs(base - table["rho_pi4"]))),
        err_atan12=float(np.max(np.abs(base - table["rho_atan12"]))),
        err_pi2=float(np.max(np.abs(base - table["rho_pi2"]))),
        table=table,
    )


def run_benchmark(config: SimConfig) -> AnisotropyMetrics:
    return anisotropy_error(simulate(config), config)


def profiles_csv(metrics: AnisotropyMetrics) -> str:
    """CSV of the common-grid profiles, 17 significant digits."""
    table = metrics.table
    lines = ["r,rho_0,rho_pi2,rho_pi4,rho_atan12"]
    for row in zip(table["r"], table["rho_0"], table["rho_pi2"],
                   table["rho_pi4"], table["rho_atan12"]):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


# The four demonstration parameter sets of increasing isotropy quality used
# by the pulse benchmark; relaxation rates are exact decimal strings.
_BENCH_S_E = "1.9977944349438221"
_BENCH_S_XX = "1.9985290825952098"
_BENCH_CONFIGS = (
    {"scheme": "d2q9", "c0_squared": "1/3",
     "E": {"e_rho": -2, "eps2_rho": 6, "phix_qx": -2, "phiy_qy": -2},
     "s": {"e": _BENCH_S_E, "eps2": "0.99889721747191105",
           "phix": "1.3", "phiy": "1.3",
           "pxx": _BENCH_S_XX, "pxy": _BENCH_S_XX}},
    {"scheme": "d2q9", "c0_squared": "1/3",
     "E": {"e_rho": -2, "eps2_rho": 6, "phix_qx": -1, "phiy_qy": -1},
     "s": {"e": _BENCH_S_E, "eps2": "0.99889721747191105",
           "phix": "1.3", "phiy": "1.3",
           "pxx": _BENCH_S_XX, "pxy": _BENCH_S_XX}},
    {"scheme": "d2q9", "c0_squared": "1/3",
     "E": {"e_rho": -2, "eps2_rho": 1, "phix_qx": -1, "phiy_qy": -1},
     "s": {"e": _BENCH_S_E, "eps2": "0.99889721747191105",
           "phix": "1.3", "phiy": "1.3",
           "pxx": _BENCH_S_XX, "pxy": _BENCH_S_XX}},
    {"scheme": "d2q9", "c0_squared": "1/3",
     "E": {"e_rho": -2, "eps2_rho": 1, "phix_qx": -1, "phiy_qy": -1},
     "s": {"e": _BENCH_S_E, "eps2": _BENCH_S_E,
           "phix": "0.0022055650561781941", "phiy": "0.0022055650561781941",
           "pxx": _BENCH_S_E, "pxy": _BENCH_S_E}},
)


def benchmark_schemes() -> list:
    """The four pulse-benchmark schemes, isotropy improving along the list."""
    return [scheme_from_config(cfg) for cfg in _BENCH_CONFIGS]
