"""D2Q9 and D2Q13 scheme definitions.

Velocity sets, the orthogonalized moment matrix M, the equilibrium matrix E,
the relaxation vector s, the composite step matrix, and the physical
couplings (sound speed, viscosities). The conserved moments are always
W = (rho, qx, qy); the non-conserved moments relax toward E*W at rates s_k.
All analysis is nondimensional: lambda = dt = dx = 1, with E stored as the
dimensionless coefficients (the lambda powers stripped).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .algebra import (
    format_rational,
    mat_inv,
    mat_mul,
    rational,
)


class ConfigError(ValueError):
    """Invalid scheme configuration (bad key, malformed rational, bad range)."""


class InfeasibleFamilyError(ValueError):
    """A derived or supplied relaxation rate leaves no valid scheme."""


CONSERVED = ("rho", "qx", "qy")
N_CONSERVED = 3

D2Q9_VELOCITIES = (
    (0, 0), (1, 0), (0, 1), (-1, 0), (0, -1),
    (1, 1), (-1, 1), (-1, -1), (1, -1),
)
D2Q13_VELOCITIES = D2Q9_VELOCITIES + ((2, 0), (0, 2), (-2, 0), (0, -2))

# Moment order = conserved moments, then the equilibrium-matrix row order;
# the Gram-Schmidt sweep below runs in exactly this order.
D2Q9_MOMENTS = ("rho", "qx", "qy", "e", "eps2", "phix", "phiy", "pxx", "pxy")
D2Q13_MOMENTS = ("rho", "qx", "qy", "e", "pxx", "pxy", "phix", "phiy",
                 "xeps2", "yeps2", "eps2", "eps3", "pxxe")

_SCHEMES = {
    "d2q9": (D2Q9_VELOCITIES, D2Q9_MOMENTS),
    "d2q13": (D2Q13_VELOCITIES, D2Q13_MOMENTS),
}


def velocities_of(scheme_id):
    try:
        return _SCHEMES[scheme_id][0]
    except KeyError:
        raise ConfigError(f"unknown scheme {scheme_id!r}") from None


def moment_labels(scheme_id):
    try:
        return _SCHEMES[scheme_id][1]
    except KeyError:
        raise ConfigError(f"unknown scheme {scheme_id!r}") from None


def raw_moment_value(name, vx, vy):
    """Value of the raw (pre-orthogonalization) moment polynomial at a velocity."""
    half_v2 = Fraction(vx * vx + vy * vy, 2)
    if name == "rho":
        return Fraction(1)
    if name == "qx":
        return Fraction(vx)
    if name == "qy":
        return Fraction(vy)
    if name == "e":
        return half_v2
    if name == "eps2":
        return half_v2 ** 2
    if name == "eps3":
        return half_v2 ** 3
    if name == "phix":
        return half_v2 * vx
    if name == "phiy":
        return half_v2 * vy
    if name == "xeps2":
        return half_v2 ** 2 * vx
    if name == "yeps2":
        return half_v2 ** 2 * vy
    if name == "pxx":
        return Fraction(vx * vx - vy * vy)
    if name == "pxy":
        return Fraction(vx * vy)
    if name == "pxxe":
        return half_v2 * Fraction(vx * vx - vy * vy)
    raise KeyError(f"unknown moment {name!r}")


@dataclass(frozen=True)
class MomentBasis:
    scheme_id: str
    labels: tuple
    M: tuple          # q x q, rows = moments, columns = velocities
    M_inv: tuple

    @property
    def q(self):
        return len(self.labels)


def _gram_schmidt_rows(raw_rows):
    """Orthogonalize rows under the unweighted inner product.

    Each output row is rescaled to a primitive integer vector (content 1)
    whose coefficient on its own raw moment is positive. Gram-Schmidt only
    ever adds multiples of earlier raw moments, so that coefficient is the
    highest-degree one and the convention is well defined.
    """
    q = len(raw_rows)
    ortho = []
    combos = []   # representation of each ortho row over the raw rows
    for k, raw in enumerate(raw_rows):
        vec = list(raw)
        combo = [Fraction(1) if i == k else Fraction(0) for i in range(q)]
        for prev, prev_combo in zip(ortho, combos):
            denom = sum(p * p for p in prev)
            coeff = sum(v * p for v, p in zip(vec, prev)) / denom
            if coeff != 0:
                vec = [v - coeff * p for v, p in zip(vec, prev)]
                combo = [c - coeff * pc for c, pc in zip(combo, prev_combo)]
        if all(v == 0 for v in vec):
            raise RuntimeError("rank-deficient moment set")
        ortho.append(vec)
        combos.append(combo)
    rows = []
    for k, (vec, combo) in enumerate(zip(ortho, combos)):
        from math import gcd, lcm
        denom_lcm = lcm(*(v.denominator for v in vec))
        ints = [v * denom_lcm for v in vec]
        content = gcd(*(abs(int(v)) for v in ints))
        scale = Fraction(denom_lcm, content)
        if combo[k] * scale < 0:
            scale = -scale
        rows.append(tuple(v * scale for v in vec))
    return tuple(rows)


_BASIS_CACHE = {}


def build_moment_basis(scheme_id) -> MomentBasis:
    """Orthogonalized moment matrix for the scheme, cached per scheme_id."""
    if scheme_id in _BASIS_CACHE:
        return _BASIS_CACHE[scheme_id]
    velocities = velocities_of(scheme_id)
    labels = moment_labels(scheme_id)
    raw = [tuple(raw_moment_value(name, vx, vy) for vx, vy in velocities)
           for name in labels]
    M = _gram_schmidt_rows(raw)
    basis = MomentBasis(scheme_id, labels, M, mat_inv(M))
    _BASIS_CACHE[scheme_id] = basis
    return basis


# ---------------------------------------------------------------------------
# relaxation rates

def sigma_of_s(s):
    """Henon parameter sigma = 1/s - 1/2; requires 0 < s < 2."""
    s = Fraction(s)
    if not 0 < s < 2:
        raise ConfigError(f"relaxation rate {format_rational(s)} outside (0, 2)")
    return 1 / s - Fraction(1, 2)


def s_of_sigma(sigma):
    sigma = Fraction(sigma)
    if sigma <= 0:
        raise ConfigError(f"sigma {format_rational(sigma)} must be positive")
    return 1 / (sigma + Fraction(1, 2))


# ---------------------------------------------------------------------------
# the scheme itself

@dataclass(frozen=True)
class Scheme:
    scheme_id: str
    basis: MomentBasis
    E: tuple          # (q-3) x 3 equilibrium coefficients, moment row order
    s: tuple          # q-3 relaxation rates, same order
    c0_squared: Fraction | None = None
    comment: str | None = None

    @property
    def q(self):
        return self.basis.q

    @property
    def velocities(self):
        return velocities_of(self.scheme_id)

    @property
    def labels(self):
        return self.basis.labels

    def moment_index(self, name):
        return self.labels.index(name)

    def e_entry(self, moment, conserved):
        """Equilibrium coefficient E_moment^conserved."""
        row = self.labels.index(moment) - N_CONSERVED
        col = CONSERVED.index(conserved)
        if row < 0:
            raise KeyError(f"{moment} is conserved, it has no equilibrium row")
        return self.E[row][col]

    def s_entry(self, moment):
        row = self.labels.index(moment) - N_CONSERVED
        if row < 0:
            raise KeyError(f"{moment} is conserved, it has no relaxation rate")
        return self.s[row]

    def sigma(self, moment):
        return sigma_of_s(self.s_entry(moment))

    def with_e_entry(self, moment, conserved, value):
        row = self.labels.index(moment) - N_CONSERVED
        col = CONSERVED.index(conserved)
        E = [list(r) for r in self.E]
        E[row][col] = Fraction(value)
        return replace(self, E=tuple(tuple(r) for r in E))

    def with_s_entry(self, moment, value):
        row = self.labels.index(moment) - N_CONSERVED
        s = list(self.s)
        s[row] = Fraction(value)
        return replace(self, s=tuple(s))


def energy_equilibrium_from_c0(scheme_id, c0_squared):
    """Energy-at-equilibrium coefficient fixing the sound speed.

    The equilibrium momentum flux equals c0^2 * rho exactly when the energy
    row is (e_rho, 0, 0) with e_rho = 6*c0^2 - 4 (D2Q9) or 26*c0^2 - 28
    (D2Q13).
    """
    c0_squared = Fraction(c0_squared)
    if c0_squared <= 0:
        raise ConfigError("c0_squared must be positive")
    if scheme_id == "d2q9":
        return 6 * c0_squared - 4
    if scheme_id == "d2q13":
        return 26 * c0_squared - 28
    raise ConfigError(f"unknown scheme {scheme_id!r}")


def sound_speed_squared(scheme_id, e_rho):
    """Inverse of energy_equilibrium_from_c0."""
    e_rho = Fraction(e_rho)
    if scheme_id == "d2q9":
        return (e_rho + 4) / 6
    if scheme_id == "d2q13":
        return (e_rho + 28) / 26
    raise ConfigError(f"unknown scheme {scheme_id!r}")


def viscosities(scheme, c0_squared):
    """Shear and bulk viscosities (mu, zeta) with lambda = dx = 1; D2Q9 only."""
    if scheme.scheme_id != "d2q9":
        raise ConfigError("viscosity relations are given for the d2q9 scheme only")
    c0_squared = Fraction(c0_squared)
    mu = scheme.sigma("pxx") / 3
    zeta = scheme.sigma("e") * (Fraction(5, 9) - c0_squared)
    return mu, zeta


def relaxation_step_matrix(E, s):
    """Moment-space collision matrix J = [[I, 0], [S*E, I - S]].

    The top N rows reproduce the conserved moments; the non-conserved rows
    produce Y + S*(E*W - Y).
    """
    ny = len(s)
    n = N_CONSERVED
    q = n + ny
    rows = []
    for i in range(n):
        rows.append(tuple(Fraction(1) if j == i else Fraction(0) for j in range(q)))
    for k in range(ny):
        sk = Fraction(s[k])
        row = [sk * E[k][c] for c in range(n)]
        row += [Fraction(1) - sk if j == k else Fraction(0) for j in range(ny)]
        rows.append(tuple(row))
    return tuple(rows)


def scheme_step_matrix(scheme):
    """One collision in population space: M^-1 * J * M (streaming excluded)."""
    J = relaxation_step_matrix(scheme.E, scheme.s)
    return mat_mul(scheme.basis.M_inv, mat_mul(J, scheme.basis.M))


# ---------------------------------------------------------------------------
# configuration files

def coefficient_names(scheme_id):
    """All equilibrium coefficient names, e.g. "e_rho", "phix_qx"."""
    labels = moment_labels(scheme_id)
    return tuple(f"{m}_{c}" for m in labels[N_CONSERVED:] for c in CONSERVED)


def _parse_value(key, value):
    try:
        return rational(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{key}: {exc}") from None


def scheme_from_config(config) -> Scheme:
    """Build a Scheme from a config mapping.

    Layout: {"scheme": "d2q9"|"d2q13", "c0_squared": "p/q" (optional),
    "E": {coefficient-name: value, ...} (omitted entries are zero),
    "s": {moment-name: value, ...} (every non-conserved moment required)}.
    Values may be "p/q" strings, integers, or decimal strings; load files
    with `load_scheme` so JSON decimals stay exact. If c0_squared is given
    it must agree with E["e_rho"] when both are present; when e_rho is
    omitted it is derived from c0_squared.
    """
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    known_top = {"scheme", "c0_squared", "E", "s", "comment"}
    for key in config:
        if key not in known_top:
            raise ConfigError(f"unknown config key {key!r}")
    scheme_id = config.get("scheme")
    if scheme_id not in _SCHEMES:
        raise ConfigError(f"scheme must be 'd2q9' or 'd2q13', got {scheme_id!r}")
    labels = moment_labels(scheme_id)
    names = set(coefficient_names(scheme_id))

    c0_squared = None
    if "c0_squared" in config:
        c0_squared = _parse_value("c0_squared", config["c0_squared"])
        if c0_squared <= 0:
            raise ConfigError("c0_squared must be positive")

    e_conf = config.get("E", {})
    if not isinstance(e_conf, dict):
        raise ConfigError("E must be an object of coefficient-name: value")
    entries = {}
    for key, value in e_conf.items():
        if key not in names:
            raise ConfigError(f"unknown equilibrium coefficient {key!r}")
        entries[key] = _parse_value(f"E.{key}", value)
    if c0_squared is not None:
        derived = energy_equilibrium_from_c0(scheme_id, c0_squared)
        if "e_rho" in entries:
            if entries["e_rho"] != derived:
                raise ConfigError(
                    "e_rho inconsistent with c0_squared: "
                    f"{format_rational(entries['e_rho'])} vs {format_rational(derived)}")
        else:
            entries["e_rho"] = derived

    E = tuple(tuple(entries.get(f"{m}_{c}", Fraction(0)) for c in CONSERVED)
              for m in labels[N_CONSERVED:])

    s_conf = config.get("s")
    if not isinstance(s_conf, dict):
        raise ConfigError("s must be an object of moment-name: value")
    for key in s_conf:
        if key not in labels[N_CONSERVED:]:
            raise ConfigError(f"unknown relaxation key {key!r}")
    s = []
    for m in labels[N_CONSERVED:]:
        if m not in s_conf:
            raise ConfigError(f"missing relaxation rate s[{m!r}]")
        value = _parse_value(f"s.{m}", s_conf[m])
        if not 0 < value < 2:
            raise ConfigError(
                f"s.{m} = {format_rational(value)} outside the stability range (0, 2)")
        s.append(value)

    comment = config.get("comment")
    if comment is not None and not isinstance(comment, str):
        raise ConfigError("comment must be a string")
    return Scheme(scheme_id, build_moment_basis(scheme_id), E, tuple(s),
                  c0_squared, comment)


def scheme_to_config(scheme, comment=None):
    """Serialize a Scheme to the config mapping; zero E entries are omitted."""
    labels = scheme.labels
    e_obj = {}
    for r, m in enumerate(labels[N_CONSERVED:]):
        for c, cons in enumerate(CONSERVED):
            v = scheme.E[r][c]
            if v != 0:
                e_obj[f"{m}_{cons}"] = format_rational(v)
    s_obj = {m: format_rational(v)
             for m, v in zip(labels[N_CONSERVED:], scheme.s)}
    config = {"scheme": scheme.scheme_id}
    if scheme.c0_squared is not None:
        config["c0_squared"] = format_rational(scheme.c0_squared)
    config["E"] = e_obj
    config["s"] = s_obj
    comment = comment or scheme.comment
    if comment:
        config["comment"] = comment
    return config


def load_scheme(path) -> Scheme:
    """Read a scheme config JSON file; decimal literals are parsed exactly."""
    try:
        with open(path) as fh:
            config = json.load(fh, parse_float=str)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    return scheme_from_config(config)


def save_scheme(scheme, path, comment=None):
    with open(path, "w") as fh:
        json.dump(scheme_to_config(scheme, comment=comment), fh, indent=2)
        fh.write("\n")
