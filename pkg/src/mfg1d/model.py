"""Domain types for the 1-D stationary mean-field game in current form.

The system on the unit torus reads

    (u_x + p)^2 / 2 + eps*V(x) = g(m) + h_bar,      m * (u_x + p) = j,

with unknowns (u, m, h_bar) and given coupling g, potential V, current j
and potential strength eps.  Everything downstream (solver, verifier,
sweep harness) shares the immutable types defined here.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

MONO_INCREASING = "strictly_increasing"
MONO_DECREASING = "strictly_decreasing"


class MFGError(Exception):
    """Base class for all package errors."""


class ConfigError(MFGError):
    """Invalid problem configuration (bad key, bad value, failed validation)."""


class HypothesesError(MFGError):
    """The structural hypotheses required by a solution regime do not hold."""


class SolverError(MFGError):
    """The solver cannot produce a solution for this specification."""


class Regime(str, Enum):
    """Solution-construction regime, keyed by coupling monotonicity, current
    and the location of the minimizer of the auxiliary function."""

    A_INC_JNZ = "A_inc_jnz"            # increasing g, j != 0
    B_INC_J0 = "B_inc_j0"              # increasing g, j == 0
    C_DEC_MSTAR_GT1 = "C_dec_mstar_gt1"  # decreasing g, j != 0, m* > 1 (lower branch)
    D_DEC_MSTAR_LT1 = "D_dec_mstar_lt1"  # decreasing g, j != 0, m* < 1 (upper branch)
    E_DEC_MSTAR_EQ1 = "E_dec_mstar_eq1"  # decreasing g, j != 0, m* = 1 (piecewise)
    F_DEC_J0 = "F_dec_j0"              # decreasing g, j == 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# coupling g
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Coupling:
    """The coupling g: (0, inf) -> R with derivative and (partial) inverse.

    ``g_second`` is optional; when absent, consumers fall back to a centered
    finite difference of ``g_prime``.
    """

    family: str
    monotonicity: str
    g: Callable
    g_prime: Callable
    g_inverse: Callable
    g_second: Callable | None = None
    params: tuple = ()

    @property
    def increasing(self) -> bool:
        return self.monotonicity == MONO_INCREASING

    @staticmethod
    def power_increasing(theta: float) -> "Coupling":
        """g(m) = m**theta with theta > 0 (strictly increasing on m > 0)."""
        if theta <= 0:
            raise ConfigError(f"power_increasing requires theta > 0, got {theta}")
        return Coupling(
            family="power_increasing",
            monotonicity=MONO_INCREASING,
            g=lambda m: np.power(m, theta),
            g_prime=lambda m: theta * np.power(m, theta - 1.0),
            g_inverse=lambda y: np.power(y, 1.0 / theta),
            g_second=lambda m: theta * (theta - 1.0) * np.power(m, theta - 2.0),
            params=(theta,),
        )

    @staticmethod
    def linear_decreasing() -> "Coupling":
        """g(m) = -m."""
        return Coupling(
            family="linear_decreasing",
            monotonicity=MONO_DECREASING,
            g=lambda m: -np.asarray(m, dtype=float),
            g_prime=lambda m: np.full_like(np.asarray(m, dtype=float), -1.0),
            g_inverse=lambda y: -np.asarray(y, dtype=float),
            g_second=lambda m: np.zeros_like(np.asarray(m, dtype=float)),
        )

    @staticmethod
    def affine(a: float, b: float = 0.0) -> "Coupling":
        """g(m) = a*m + b with a != 0."""
        if a == 0:
            raise ConfigError("affine coupling requires a != 0")
        mono = MONO_INCREASING if a > 0 else MONO_DECREASING
        return Coupling(
            family="affine",
            monotonicity=mono,
            g=lambda m: a * np.asarray(m, dtype=float) + b,
            g_prime=lambda m: np.full_like(np.asarray(m, dtype=float), a),
            g_inverse=lambda y: (np.asarray(y, dtype=float) - b) / a,
            g_second=lambda m: np.zeros_like(np.asarray(m, dtype=float)),
            params=(a, b),
        )

    @staticmethod
    def custom(g, g_prime, g_inverse, monotonicity: str, g_second=None) -> "Coupling":
        if monotonicity not in (MONO_INCREASING, MONO_DECREASING):
            raise ConfigError(f"unknown monotonicity {monotonicity!r}")
        return Coupling(
            family="custom",
            monotonicity=monotonicity,
            g=g,
            g_prime=g_prime,
            g_inverse=g_inverse,
            g_second=g_second,
        )


# ---------------------------------------------------------------------------
# potential V
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Potential:
    """1-periodic potential V with known extrema.

    ``argmax`` is the location of the maximum; ``single_max`` records whether
    it is the only one (required by the piecewise decreasing regime).
    """

    family: str
    v: Callable
    v_max: float
    v_min: float
    argmax: float
    single_max: bool

    @property
    def span(self) -> float:
        return self.v_max - self.v_min

    @property
    def abs_max(self) -> float:
        return max(abs(self.v_max), abs(self.v_min))

    @staticmethod
    def cosine(amplitude: float = 1.0) -> "Potential":
        """V(x) = A*cos(2 pi x); maximum at x = 0 for A > 0."""
        if amplitude == 0:
            raise ConfigError("cosine potential requires nonzero amplitude")
        a = float(amplitude)
        v = lambda x: a * np.cos(2.0 * np.pi * np.asarray(x, dtype=float))
        if a > 0:
            return Potential("cosine", v, a, -a, 0.0, True)
        return Potential("cosine", v, -a, a, 0.5, True)

    @staticmethod
    def shifted_cosine(amplitude: float = 1.0, shift: float = 0.0) -> "Potential":
        """V(x) = A*cos(2 pi (x - shift)); maximum at x = shift for A > 0."""
        if amplitude == 0:
            raise ConfigError("shifted_cosine potential requires nonzero amplitude")
        a = float(amplitude)
        s = float(shift) % 1.0
        v = lambda x: a * np.cos(2.0 * np.pi * (np.asarray(x, dtype=float) - s))
        if a > 0:
            return Potential("shifted_cosine", v, a, -a, s, True)
        return Potential("shifted_cosine", v, -a, a, (s + 0.5) % 1.0, True)

    @staticmethod
    def custom(v: Callable, n_probe: int = 1 << 14) -> "Potential":
        """Wrap a user callable; extrema located by dense sampling plus a
        parabolic refinement of the maximum."""
        xs = np.arange(n_probe) / n_probe
        vals = np.asarray(v(xs), dtype=float)
        k = int(np.argmax(vals))
        vmax = float(vals[k])
        vmin = float(np.min(vals))
        # parabolic refinement of the argmax through the three nearest samples
        xm = xs[k]
        h = 1.0 / n_probe
        fm1, f0, fp1 = vals[(k - 1) % n_probe], vals[k], vals[(k + 1) % n_probe]
        denom = fm1 - 2.0 * f0 + fp1
        if denom < 0:
            xm = (xm + 0.5 * h * (fm1 - fp1) / denom) % 1.0
            vmax = max(vmax, float(v(xm)))
        # a second cluster of near-maximal samples means multiple maxima
        near = np.nonzero(vals >= vmax - 1e-9 * max(1.0, abs(vmax)))[0]
        dist = np.minimum((xs[near] - xm) % 1.0, (xm - xs[near]) % 1.0)
        single = bool(np.all(dist <= 2.5 * h))
        return Potential("custom", v, vmax, vmin, float(xm), single)

    def reflected(self) -> "Potential":
        """The potential x -> V(-x) (used to canonicalize negative currents)."""
        base = self.v
        v_ref = lambda x: base((-np.asarray(x, dtype=float)) % 1.0)
        return Potential(
            family="custom",
            v=v_ref,
            v_max=self.v_max,
            v_min=self.v_min,
            argmax=(-self.argmax) % 1.0,
            single_max=self.single_max,
        )


# ---------------------------------------------------------------------------
# problem specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """Validated, immutable problem instance on a uniform N-point grid of
    [0, 1); node 0 sits at x = 0."""

    coupling: Coupling
    potential: Potential
    j: float
    epsilon: float
    n_grid: int
    tol_root: float = 1e-12
    tol_residual: float = 1e-8
    reflect: bool = False          # true when j < 0 (solved by reflection)
    x: np.ndarray = field(default=None, repr=False)
    v_x: np.ndarray = field(default=None, repr=False)

    def with_epsilon(self, epsilon: float, n_grid: int | None = None) -> "ProblemSpec":
        return make_problem(
            self.coupling,
            self.potential,
            self.j,
            epsilon,
            n_grid if n_grid is not None else self.n_grid,
            tol_root=self.tol_root,
            tol_residual=self.tol_residual,
        )


_MONO_PROBE = np.geomspace(0.1, 10.0, 64)


def make_problem(
    coupling_cfg,
    potential_cfg,
    j: float,
    epsilon: float,
    n_grid: int = 256,
    tol_root: float = 1e-12,
    tol_residual: float = 1e-8,
) -> ProblemSpec:
    """Validate inputs and build a ProblemSpec.

    Accepts Coupling/Potential objects or flat config mappings.  Rejects
    negative epsilon, couplings whose sampled derivative contradicts the
    declared monotonicity, inconsistent inverses, and potentials that fail
    the periodicity check.  A negative current is kept as given and flagged;
    the solver canonicalizes it by reflection.
    """
    coupling = coupling_from_config(coupling_cfg) if isinstance(coupling_cfg, Mapping) else coupling_cfg
    potential = potential_from_config(potential_cfg) if isinstance(potential_cfg, Mapping) else potential_cfg

    if epsilon < 0:
        raise ConfigError(f"negative epsilon: {epsilon}")
    if n_grid < 16:
        raise ConfigError(f"n_grid must be >= 16, got {n_grid}")
    if tol_root <= 0 or tol_residual <= 0:
        raise ConfigError("tolerances must be positive")

    # monotonicity of g by derivative sampling
    gp = np.asarray(coupling.g_prime(_MONO_PROBE), dtype=float)
    if coupling.increasing:
        if not np.all(gp > 0):
            raise ConfigError("coupling declared strictly_increasing but g' <= 0 at sampled points")
    else:
        if not np.all(gp < 0):
            raise ConfigError("coupling declared strictly_decreasing but g' >= 0 at sampled points")

    # inverse consistency on [0.1, 10]
    gm = np.asarray(coupling.g(_MONO_PROBE), dtype=float)
    back = np.asarray(coupling.g_inverse(gm), dtype=float)
    if not np.all(np.abs(back - _MONO_PROBE) <= 1e-8 * np.maximum(1.0, _MONO_PROBE)):
        raise ConfigError("g_inverse(g(m)) != m on sampled range")

    # periodicity of V
    v0 = float(potential.v(0.0))
    v1 = float(potential.v(1.0))
    if abs(v0 - v1) > 1e-9 * max(1.0, abs(v0)):
        raise ConfigError("potential fails periodicity check |V(0) - V(1)| > tol")

    x = np.arange(n_grid) / n_grid
    v_x = np.asarray(potential.v(x), dtype=float)

    # sanity of declared extrema against the grid
    if float(np.max(v_x)) > potential.v_max + 1e-9 * max(1.0, abs(potential.v_max)):
        raise ConfigError("sampled V exceeds declared v_max")
    if potential.single_max:
        tol_here = 1e-12 * max(1.0, abs(potential.v_max))
        winners = np.nonzero(v_x >= potential.v_max - tol_here)[0]
        dist = np.minimum((x[winners] - potential.argmax) % 1.0,
                          (potential.argmax - x[winners]) % 1.0)
        if np.any(dist > 1.5 / n_grid):
            raise ConfigError("single_max declared but several grid points attain v_max")

    return ProblemSpec(
        coupling=coupling,
        potential=potential,
        j=float(j),
        epsilon=float(epsilon),
        n_grid=int(n_grid),
        tol_root=float(tol_root),
        tol_residual=float(tol_residual),
        reflect=bool(j < 0),
        x=_readonly(x),
        v_x=_readonly(v_x),
    )


def reflected_spec(spec: ProblemSpec) -> ProblemSpec:
    """Canonical twin with j -> -j and V(x) -> V(-x)."""
    return make_problem(
        spec.coupling,
        spec.potential.reflected(),
        -spec.j,
        spec.epsilon,
        spec.n_grid,
        tol_root=spec.tol_root,
        tol_residual=spec.tol_residual,
    )


# ---------------------------------------------------------------------------
# solution and sweep records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionTriple:
    """Sampled solution (u, m) with the effective Hamiltonian h_bar and the
    momentum p that makes u periodic; u(0) = 0."""

    u: np.ndarray
    m: np.ndarray
    h_bar: float
    p: float
    regime: Regime
    d_switch: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))
        object.__setattr__(self, "m", _readonly(self.m))

    @property
    def n_grid(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    h_bar: float = math.nan
    err_h: float = math.nan
    err_m: float = math.nan
    err_u: float = math.nan
    res_hj: float = math.nan
    res_transport: float = math.nan
    d_switch: float | None = None
    margin_h: float = math.nan
    margin_m: float = math.nan
    margin_u: float = math.nan
    verified: bool = False
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    """Per-epsilon error table with fitted log-log slopes and the ratios of
    measured errors to the predicted constant bounds."""

    rows: tuple
    slope_h: object
    slope_m: object
    slope_u: object
    prediction: object
    n_grid: int
    h_bar_limit: float


# ---------------------------------------------------------------------------
# flat key=value configuration
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "coupling.family", "coupling.theta", "coupling.a", "coupling.b",
    "potential.family", "potential.amplitude", "potential.phase",
    "j", "epsilon", "n_grid", "tol_root", "tol_residual",
}


def parse_config(path) -> dict:
    """Parse a flat ``key = value`` text file; '#' starts a comment."""
    cfg: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            cfg[key] = value.strip()
    return cfg


def coupling_from_config(cfg: Mapping) -> Coupling:
    family = cfg.get("family") or cfg.get("coupling.family")
    if family is None:
        raise ConfigError("missing config key 'coupling.family'")
    get = lambda k: cfg.get(k) if k in cfg else cfg.get("coupling." + k)
    if family == "power_increasing":
        theta = get("theta")
        if theta is None:
            raise ConfigError("missing config key 'coupling.theta'")
        return Coupling.power_increasing(float(theta))
    if family == "linear_decreasing":
        return Coupling.linear_decreasing()
    if family == "affine":
        a = get("a")
        if a is None:
            raise ConfigError("missing config key 'coupling.a'")
        b = get("b")
        return Coupling.affine(float(a), float(b) if b is not None else 0.0)
    raise ConfigError(f"unknown coupling.family {family!r}")


def potential_from_config(cfg: Mapping) -> Potential:
    family = cfg.get("family") or cfg.get("potential.family") or "cosine"
    get = lambda k: cfg.get(k) if k in cfg else cfg.get("potential." + k)
    amplitude = float(get("amplitude") or 1.0)
    if family == "cosine":
        return Potential.cosine(amplitude)
    if family == "shifted_cosine":
        return Potential.shifted_cosine(amplitude, float(get("phase") or 0.0))
    raise ConfigError(f"unknown potential.family {family!r}")


def problem_from_config(cfg: Mapping) -> ProblemSpec:
    """Build a ProblemSpec from a flat config mapping (see parse_config)."""
    for key in ("j", "epsilon"):
        if key not in cfg:
            raise ConfigError(f"missing config key {key!r}")
    coupling = coupling_from_config(cfg)
    potential = potential_from_config(cfg)
    return make_problem(
        coupling,
        potential,
        j=float(cfg["j"]),
        epsilon=float(cfg["epsilon"]),
        n_grid=int(cfg.get("n_grid", 256)),
        tol_root=float(cfg.get("tol_root", 1e-12)),
        tol_residual=float(cfg.get("tol_residual", 1e-8)),
    )
