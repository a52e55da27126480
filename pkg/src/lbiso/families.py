"""Constructors for the parameter families that are isotropic by design.

Each family pins exactly the coefficients that the order demands and leaves
the rest free: a `FamilySpec` names the scheme, the target order, a case label
where the characterization branches, and values for any of the free
parameters. Free coefficients default to 0, free relaxation rates to 1, and
the squared sound speed to 1/3; every derived coefficient is computed by its
exact closed-form formula from the free ones.

Supplying a value for a constrained coefficient is accepted only when it
equals the derived value (so redundant specifications are harmless); anything
else is a configuration error. A relaxation rate, free or derived, that lands
outside (0, 2) makes the family infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import rational
from .isotropy import eq_defab
from .scheme import (
    ConfigError,
    InfeasibleFamilyError,
    Scheme,
    build_moment_basis,
    energy_equilibrium_from_c0,
    moment_labels,
    sigma_of_s,
)

D2Q9_CASES = {3: ("P6", "P7", "P8"), 4: ("even-equal", "sound-fixed")}
D2Q13_CASES = {3: ("annex-example-1", "annex-example-2", "annex-remark")}

_ALIASES = {"s_xx": "s_pxx", "s_xy": "s_pxy"}

P8_COMMENT = ("not acoustic-preferred: the tie s_e = s_pxx couples the bulk "
              "viscosity to the shear viscosity")


@dataclass(frozen=True)
class FamilySpec:
    scheme_id: str
    order: int
    case: str | None = None
    free: Mapping = field(default_factory=dict)


def _sphi_order3(s_xx):
    """s with sigma = 1/(12 sigma_xx)."""
    return 3 * (2 - s_xx) / (3 - s_xx)


def _sphi_order4(s_xx):
    """s with sigma = 1/(6 sigma_xx)."""
    return 6 * (2 - s_xx) / (6 - s_xx)


def _flux_coefficient(s_pxx, s_pxy):
    oxx, oxy = sigma_of_s(s_pxx), sigma_of_s(s_pxy)
    return (oxx - 4 * oxy) / (2 * oxy + oxx)


FREE, FIXED, DERIVED = "free", "fixed", "derived"

_Z = Fraction(0)
_ONE = Fraction(1)


def _zero_row(layout, moment):
    for c in ("rho", "qx", "qy"):
        layout[f"{moment}_{c}"] = (FIXED, _Z)


def _free_row(layout, moment):
    for c in ("rho", "qx", "qy"):
        layout[f"{moment}_{c}"] = (FREE, _Z)


def _free_s(layout, *moments):
    for m in moments:
        layout[f"s_{m}"] = (FREE, _ONE)


def _d2q9_layout(order, case, eps_rho):
    lay = {}
    comment = None
    lay["e_rho"] = (FIXED, eps_rho)
    lay["e_qx"] = (FIXED, _Z)
    lay["e_qy"] = (FIXED, _Z)
    _zero_row(lay, "pxx")
    _zero_row(lay, "pxy")
    _free_s(lay, "e", "eps2", "phix", "phiy", "pxx", "pxy")
    if order == 1:
        _free_row(lay, "eps2")
        _free_row(lay, "phix")
        _free_row(lay, "phiy")
        return lay, comment

    def flux(env):
        return _flux_coefficient(env["s_pxx"], env["s_pxy"])

    lay["phix_rho"] = (FIXED, _Z)
    lay["phiy_rho"] = (FIXED, _Z)
    lay["phix_qy"] = (FIXED, _Z)
    lay["phiy_qx"] = (FIXED, _Z)
    lay["phix_qx"] = (DERIVED, flux)
    lay["phiy_qy"] = (DERIVED, flux)
    if order == 2:
        _free_row(lay, "eps2")
        return lay, comment

    # order >= 3: equal stress relaxations force the flux coefficient to -1
    lay["s_pxy"] = (DERIVED, lambda env: env["s_pxx"])
    lay["phix_qx"] = (FIXED, Fraction(-1))
    lay["phiy_qy"] = (FIXED, Fraction(-1))
    energy_sq_rho = (Fraction(-4) - 3 * eps_rho) / 2
    sphi3 = (DERIVED, lambda env: _sphi_order3(env["s_pxx"]))
    if order == 3:
        if case == "P6":
            lay["eps2_rho"] = (FIXED, energy_sq_rho)
            lay["eps2_qx"] = (FIXED, _Z)
            lay["eps2_qy"] = (FIXED, _Z)
        elif case == "P7":
            lay["eps2_rho"] = (FREE, _Z)
            lay["eps2_qx"] = (FIXED, _Z)
            lay["eps2_qy"] = (FIXED, _Z)
            lay["s_phix"] = sphi3
            lay["s_phiy"] = sphi3
        elif case == "P8":
            _free_row(lay, "eps2")
            lay["s_phix"] = sphi3
            lay["s_phiy"] = sphi3
            lay["s_e"] = (DERIVED, lambda env: env["s_pxx"])
            comment = P8_COMMENT
        else:
            raise ConfigError(f"d2q9 order 3 needs a case in {D2Q9_CASES[3]}, "
                              f"got {case!r}")
        return lay, comment

    # order 4
    lay["eps2_rho"] = (FIXED, energy_sq_rho)
    lay["eps2_qx"] = (FIXED, _Z)
    lay["eps2_qy"] = (FIXED, _Z)
    lay["s_e"] = (DERIVED, lambda env: env["s_pxx"])
    sphi4 = (DERIVED, lambda env: _sphi_order4(env["s_pxx"]))
    lay["s_phix"] = sphi4
    lay["s_phiy"] = sphi4
    if case == "even-equal":
        lay["s_eps2"] = (DERIVED, lambda env: env["s_pxx"])
    elif case != "sound-fixed":
        raise ConfigError(f"d2q9 order 4 needs a case in {D2Q9_CASES[4]}, "
                          f"got {case!r}")
    return lay, comment


def _d2q13_layout(order, case, eps_rho):
    lay = {}
    lay["e_rho"] = (FIXED, eps_rho)
    lay["e_qx"] = (FIXED, _Z)
    lay["e_qy"] = (FIXED, _Z)
    _zero_row(lay, "pxx")
    _zero_row(lay, "pxy")
    _free_s(lay, "e", "pxx", "pxy", "phix", "phiy", "xeps2", "yeps2",
            "eps2", "eps3", "pxxe")
    if order == 1:
        for m in ("phix", "phiy", "xeps2", "yeps2", "eps2", "eps3", "pxxe"):
            _free_row(lay, m)
        return lay, None

    def ab(env):
        return eq_defab(sigma_of_s(env["s_pxx"]), sigma_of_s(env["s_pxy"]),
                        env["phix_qx"], -env["phix_qy"])

    lay["phix_rho"] = (FIXED, _Z)
    lay["phiy_rho"] = (FIXED, _Z)
    lay["xeps2_rho"] = (FIXED, _Z)
    lay["yeps2_rho"] = (FIXED, _Z)
    lay["phix_qx"] = (FREE, _Z)
    lay["phix_qy"] = (FREE, _Z)
    lay["phiy_qx"] = (DERIVED, lambda env: -env["phix_qy"])
    lay["phiy_qy"] = (DERIVED, lambda env: env["phix_qx"])
    lay["xeps2_qx"] = (DERIVED, lambda env: ab(env)[0])
    lay["xeps2_qy"] = (DERIVED, lambda env: ab(env)[1])
    lay["yeps2_qx"] = (DERIVED, lambda env: -ab(env)[1])
    lay["yeps2_qy"] = (DERIVED, lambda env: ab(env)[0])
    if order == 2:
        for m in ("eps2", "eps3", "pxxe"):
            _free_row(lay, m)
        return lay, None

    # order 3: the three template matrices
    if case not in D2Q13_CASES[3]:
        raise ConfigError(f"d2q13 order 3 needs a case in {D2Q13_CASES[3]}, "
                          f"got {case!r}")
    sphi3 = (DERIVED, lambda env: _sphi_order3(env["s_pxx"]))
    flux_diag = Fraction(-3) if case != "annex-remark" else Fraction(-1)
    sq_diag = Fraction(31, 6) if case != "annex-remark" else Fraction(-1, 12)
    for name, val in (("phix_qx", flux_diag), ("phiy_qy", flux_diag),
                      ("phix_qy", _Z), ("phiy_qx", _Z),
                      ("xeps2_qx", sq_diag), ("yeps2_qy", sq_diag),
                      ("xeps2_qy", _Z), ("yeps2_qx", _Z)):
        lay[name] = (FIXED, val)
    if case == "annex-example-1":
        _free_row(lay, "eps2")
        _free_row(lay, "pxxe")
        c = Fraction(67, 462)
        lay["eps3_rho"] = (DERIVED, lambda env: Fraction(274, 39)
                           - c * env["eps2_rho"] - Fraction(137, 3003) * eps_rho)
        lay["eps3_qx"] = (DERIVED, lambda env: -c * env["eps2_qx"])
        lay["eps3_qy"] = (DERIVED, lambda env: -c * env["eps2_qy"])
        lay["s_e"] = (DERIVED, lambda env: env["s_pxx"])
        for name in ("s_phix", "s_phiy", "s_xeps2", "s_yeps2"):
            lay[name] = sphi3
        return lay, None
    # the other two cases share the energy-square and energy-cube rows
    lay["eps2_rho"] = (FIXED, -Fraction(3234, 13) - Fraction(361, 26) * eps_rho)
    lay["eps2_qx"] = (FIXED, _Z)
    lay["eps2_qy"] = (FIXED, _Z)
    lay["eps3_rho"] = (FIXED, Fraction(1681, 39) + Fraction(307, 156) * eps_rho)
    lay["eps3_qx"] = (FIXED, _Z)
    lay["eps3_qy"] = (FIXED, _Z)
    _zero_row(lay, "pxxe")
    if case == "annex-example-2":
        lay["s_xeps2"] = sphi3
        lay["s_yeps2"] = sphi3

        def sphix(env):
            se, sxx = env["s_e"], env["s_pxx"]
            return (2 * (7 * se + 5 * sxx - 6 * sxx * se)
                    / (7 * se + 5 * sxx - 4 * sxx * se))

        lay["s_phix"] = (DERIVED, sphix)
        return lay, None
    # annex-remark: every even rate tied to the stress rate
    lay["s_e"] = (DERIVED, lambda env: env["s_pxx"])
    lay["s_pxy"] = (DERIVED, lambda env: env["s_pxx"])
    for name in ("s_phix", "s_phiy", "s_xeps2", "s_yeps2"):
        lay[name] = sphi3
    return lay, None


def _resolve_c0(scheme_id, order, case, user):
    c0_given = user.pop("c0_squared", None)
    erho_given = user.pop("e_rho", None)
    if case == "sound-fixed":
        c0 = Fraction(5, 9)
        if c0_given is not None and c0_given != c0:
            raise ConfigError("sound-fixed pins c0_squared = 5/9, "
                              f"got {c0_given}")
        if erho_given is not None and erho_given != Fraction(-2, 3):
            raise ConfigError("sound-fixed pins e_rho = -2/3, "
                              f"got {erho_given}")
        return c0
    if c0_given is None and erho_given is None:
        return Fraction(1, 3)
    if c0_given is None:
        # invert e_rho = 6 c0^2 - 4 (d2q9) or 26 c0^2 - 28 (d2q13)
        if scheme_id == "d2q9":
            c0_given = (erho_given + 4) / 6
        else:
            c0_given = (erho_given + 28) / 26
    if (erho_given is not None
            and energy_equilibrium_from_c0(scheme_id, c0_given) != erho_given):
        raise ConfigError("inconsistent c0_squared and e_rho")
    return c0_given


def build_family(spec: FamilySpec) -> Scheme:
    """Instantiate a family member, deriving every constrained coefficient."""
    scheme_id = spec.scheme_id
    labels = moment_labels(scheme_id)[3:]
    max_order = 4 if scheme_id == "d2q9" else 3
    if not 1 <= spec.order <= max_order:
        raise ConfigError(
            f"{scheme_id} families cover orders 1..{max_order}, got {spec.order}")
    cases = (D2Q9_CASES if scheme_id == "d2q9" else D2Q13_CASES).get(spec.order)
    if cases is None and spec.case is not None:
        raise ConfigError(
            f"{scheme_id} order {spec.order} takes no case, got {spec.case!r}")
    if cases is not None and spec.case not in cases:
        raise ConfigError(
            f"{scheme_id} order {spec.order} needs a case in {cases}, "
            f"got {spec.case!r}")

    user = {}
    for key, value in spec.free.items():
        key = _ALIASES.get(key, key)
        try:
            user[key] = rational(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"parameter {key}: {exc}") from exc

    c0 = _resolve_c0(scheme_id, spec.order, spec.case, user)
    eps_rho = energy_equilibrium_from_c0(scheme_id, c0)
    if scheme_id == "d2q9":
        layout, comment = _d2q9_layout(spec.order, spec.case, eps_rho)
    else:
        layout, comment = _d2q13_layout(spec.order, spec.case, eps_rho)

    unknown = set(user) - set(layout)
    if unknown:
        raise ConfigError(f"unknown parameter {sorted(unknown)[0]!r} "
                          f"for {scheme_id} order {spec.order}")

    env = {}
    pinned = {}
    for name, (kind, payload) in layout.items():
        if kind == FREE:
            env[name] = user.pop(name, payload)
            if name.startswith("s_") and not 0 < env[name] < 2:
                raise InfeasibleFamilyError(
                    f"relaxation rate {name} = {env[name]} outside (0, 2): "
                    "family infeasible")
        elif name in user:
            pinned[name] = user.pop(name)
    values = {}
    for name, (kind, payload) in layout.items():
        if kind == FREE:
            values[name] = env[name]
        elif kind == FIXED:
            values[name] = payload
        else:
            values[name] = payload(env)
    for name, wanted in pinned.items():
        if values[name] != wanted:
            raise ConfigError(
                f"parameter {name} is constrained to {values[name]} "
                f"by this family, got {wanted}")

    for m in labels:
        s_val = values[f"s_{m}"]
        if not 0 < s_val < 2:
            raise InfeasibleFamilyError(
                f"relaxation rate s_{m} = {s_val} outside (0, 2): "
                "family infeasible")

    E = tuple(tuple(values[f"{m}_{c}"] for c in ("rho", "qx", "qy"))
              for m in labels)
    s = tuple(values[f"s_{m}"] for m in labels)
    return Scheme(scheme_id, build_moment_basis(scheme_id), E, s, c0,
                  comment=comment)


def annex_d2q13_matrices(free=None):
    """The three third-order D2Q13 template schemes, fully populated.

    `free` (optional) supplies parameters applied to all three templates, so
    only keys free in every template are accepted (e.g. c0_squared, s_pxx).
    """
    free = dict(free or {})
    return [build_family(FamilySpec("d2q13", 3, case, free))
            for case in D2Q13_CASES[3]]
