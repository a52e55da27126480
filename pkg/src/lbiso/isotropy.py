"""Rotation-group action on equivalent-equation tensors and isotropy tests.

A scheme is isotropic at order m when every tensor A^(n), n <= m, is a fixed
point of the group action Phi_n, which rotates the conserved moments by the
block matrix R(r) = 1 (+) r and each of the n derivative indices by r. The
entries of Phi_n(r)A - A are trigonometric polynomials of degree at most
n + 2 in the rotation angle, so exact vanishing at 2(n+2)+1 distinct rational
circle points certifies vanishing for every rotation; no floating-point
tolerance is involved anywhere.

The closed-form checkers encode the parameter characterizations order by
order: complete for D2Q9 (orders 1 to 4, never 5) and for D2Q13 orders 1 to 2,
with order 3 decided by the necessary flux-proportionality relations plus
membership in one of the three known third-order parameter templates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    Rotation,
    SymTensor,
    derivs_string,
    format_rational,
    tensor_distance,
)
from .expansion import MAX_ORDER, equivalent_tensors
from .scheme import N_CONSERVED, sigma_of_s

PYTHAGOREAN_PAIRS = (
    (Fraction(3, 5), Fraction(4, 5)),
    (Fraction(5, 13), Fraction(12, 13)),
    (Fraction(8, 17), Fraction(15, 17)),
    (Fraction(20, 29), Fraction(21, 29)),
    (Fraction(7, 25), Fraction(24, 25)),
)


def required_sample_size(order):
    """Zeros needed to pin a degree-(order+2) trigonometric polynomial."""
    return 2 * (order + 2) + 1


def rational_rotations(count):
    """Deterministic list of `count` distinct exact rotations.

    Starts with the identity and the axis turns, then sign/swap variants of
    the Pythagorean pairs, then exact angle-addition compositions until the
    requested count is reached.
    """
    if count < 1:
        raise ValueError("rotation count must be >= 1")
    out = []
    seen = set()

    def add(c, s):
        if (c, s) not in seen:
            seen.add((c, s))
            out.append(Rotation(c, s))

    add(Fraction(1), Fraction(0))
    add(Fraction(0), Fraction(1))
    add(Fraction(-1), Fraction(0))
    add(Fraction(0), Fraction(-1))
    variants = []
    for c, s in PYTHAGOREAN_PAIRS:
        for cc, ss in ((c, s), (c, -s), (-c, s), (-c, -s),
                       (s, c), (s, -c), (-s, c), (-s, -c)):
            variants.append(Rotation(cc, ss))
            add(cc, ss)
    frontier = list(out)
    while len(out) < count:
        new = []
        for r1 in frontier:
            for r2 in variants:
                comp = r1.compose(r2)
                if (comp.c, comp.s) not in seen:
                    add(comp.c, comp.s)
                    new.append(comp)
                    if len(out) >= count:
                        return out
        if not new:
            raise RuntimeError("rotation generation stalled")
        frontier = new
    return out[:count]


def _contraction_coeffs(order, c, s):
    """C[a][p] = coefficient of z^p in (c z - s)^a (s z + c)^(order-a).

    C[a][p] sums the products of rotation entries over all index tuples with
    p x's rotated into a tuple with a x's; it only depends on the counts by
    symmetry of the tensor.
    """
    table = []
    for a in range(order + 1):
        poly = [Fraction(1)]
        for _ in range(a):
            # multiply by (-s + c z)
            nxt = [Fraction(0)] * (len(poly) + 1)
            for p, v in enumerate(poly):
                nxt[p] += -s * v
                nxt[p + 1] += c * v
            poly = nxt
        for _ in range(order - a):
            # multiply by (c + s z)
            nxt = [Fraction(0)] * (len(poly) + 1)
            for p, v in enumerate(poly):
                nxt[p] += c * v
                nxt[p + 1] += s * v
            poly = nxt
        poly += [Fraction(0)] * (order + 1 - len(poly))
        table.append(poly)
    return table


def apply_phi(rotation, tensor):
    """The group action Phi_n(r) on an order-n tensor, exact."""
    n = tensor.order
    C = _contraction_coeffs(n, rotation.c, rotation.s)
    R = rotation.conserved_matrix()
    Rinv = rotation.conserved_matrix_inv()
    rows, cols = tensor.rows, tensor.cols
    mid = [[[sum(C[a][p] * tensor.entry(l, k, p) for p in range(n + 1))
             for a in range(n + 1)]
            for k in range(cols)]
           for l in range(rows)]
    entries = {}
    for i in range(rows):
        for j in range(cols):
            for a in range(n + 1):
                v = Fraction(0)
                for l in range(rows):
                    if R[i][l] == 0:
                        continue
                    for k in range(cols):
                        if Rinv[k][j] != 0:
                            v += R[i][l] * Rinv[k][j] * mid[l][k][a]
                entries[(i, j, a)] = v
    return SymTensor(n, entries, rows, cols)


def is_fixed_point(tensor, sample):
    """Exact fixed-point test of Phi_n over a certifying rotation sample."""
    need = required_sample_size(tensor.order)
    if len(sample) < need:
        raise ValueError(
            f"sample of {len(sample)} rotations cannot certify order "
            f"{tensor.order}; need at least {need}")
    if len({(r.c, r.s) for r in sample}) != len(sample):
        raise ValueError("rotation sample has repeated points")
    return all(apply_phi(r, tensor) == tensor for r in sample)


def lack_of_isotropy(tensors, rotation):
    """Per-order defect tensors Phi_n(r)(A^(n)) - A^(n)."""
    return [apply_phi(rotation, t) - t for t in tensors]


@dataclass(frozen=True)
class IsotropyReport:
    order_achieved: int
    per_order_residuals: tuple    # (order, Fraction max over sample)
    first_failing_entry: tuple | None  # (order, i, j, derivs, Rotation)


def isotropy_order(scheme, m_max=None) -> IsotropyReport:
    """Largest m <= m_max with all tensors A^(n), n <= m, Phi-fixed points.

    Stops at the first failing order; the report carries the exact residual
    per tested order and the first offending tensor entry and rotation.
    """
    if m_max is None:
        m_max = 5 if scheme.scheme_id == "d2q9" else 3
    if not 1 <= m_max <= MAX_ORDER:
        raise ValueError(f"m_max must be between 1 and {MAX_ORDER}")
    conserved = scheme.labels[:N_CONSERVED]
    residuals = []
    witness = None
    achieved = m_max
    for n in range(1, m_max + 1):
        tensor = equivalent_tensors(scheme, n)[-1]
        sample = rational_rotations(required_sample_size(n))
        worst = Fraction(0)
        for r in sample:
            rotated = apply_phi(r, tensor)
            dist = tensor_distance(rotated, tensor)
            if dist > worst:
                worst = dist
            if dist != 0 and witness is None:
                for (i, j, nx), v in sorted(rotated.items()):
                    if v != tensor.entry(i, j, nx):
                        witness = (n, conserved[i], conserved[j],
                                   derivs_string(n, nx), r)
                        break
        residuals.append((n, worst))
        if worst != 0:
            achieved = n - 1
            break
    return IsotropyReport(achieved, tuple(residuals), witness)


# ---------------------------------------------------------------------------
# closed-form parameter characterizations

def _row_zero(scheme, moment):
    return all(scheme.e_entry(moment, c) == 0 for c in ("rho", "qx", "qy"))


def _order1_zeros(scheme):
    return (scheme.e_entry("e", "qx") == 0 and scheme.e_entry("e", "qy") == 0
            and _row_zero(scheme, "pxx") and _row_zero(scheme, "pxy"))


def check_d2q9(scheme, order) -> bool:
    """Closed-form isotropy conditions for the nine-velocity scheme."""
    if scheme.scheme_id != "d2q9":
        raise ValueError("check_d2q9 expects a d2q9 scheme")
    if order < 1:
        raise ValueError("order must be >= 1")
    if order >= 5:
        return False
    s_xx = sigma_of_s(scheme.s_entry("pxx"))
    s_xy = sigma_of_s(scheme.s_entry("pxy"))
    if order >= 1:
        if not _order1_zeros(scheme):
            return False
    if order >= 2:
        flux = (s_xx - 4 * s_xy) / (2 * s_xy + s_xx)
        if not (scheme.e_entry("phix", "rho") == 0
                and scheme.e_entry("phiy", "rho") == 0
                and scheme.e_entry("phix", "qy") == 0
                and scheme.e_entry("phiy", "qx") == 0
                and scheme.e_entry("phix", "qx") == flux
                and scheme.e_entry("phiy", "qy") == flux):
            return False
    if order >= 3:
        if not (s_xx == s_xy and scheme.e_entry("phix", "qx") == -1):
            return False
        s_e = sigma_of_s(scheme.s_entry("e"))
        s_px = sigma_of_s(scheme.s_entry("phix"))
        s_py = sigma_of_s(scheme.s_entry("phiy"))
        sq_prop = (scheme.e_entry("eps2", "qx") == 0
                   and scheme.e_entry("eps2", "qy") == 0)
        energy_link = 2 * scheme.e_entry("eps2", "rho") + 4 + 3 * scheme.e_entry("e", "rho") == 0
        flux_link = s_px == s_py == 1 / (12 * s_xx)
        p6 = energy_link and sq_prop
        p7 = flux_link and sq_prop
        p8 = flux_link and s_e == s_xx
        if not (p6 or p7 or p8):
            return False
    if order >= 4:
        s_e = sigma_of_s(scheme.s_entry("e"))
        s_eps2 = sigma_of_s(scheme.s_entry("eps2"))
        s_px = sigma_of_s(scheme.s_entry("phix"))
        s_py = sigma_of_s(scheme.s_entry("phiy"))
        if not (2 * scheme.e_entry("eps2", "rho") + 4 + 3 * scheme.e_entry("e", "rho") == 0
                and s_e == s_xx
                and scheme.e_entry("eps2", "qx") == 0
                and scheme.e_entry("eps2", "qy") == 0
                and s_px == s_py == 1 / (6 * s_xx)):
            return False
        if not (2 + 3 * scheme.e_entry("e", "rho") == 0 or s_eps2 == s_xx):
            return False
    return True


def eq_defab(sigma_xx, sigma_xy, e_phix_qx, e_phiy_qx):
    """The rotation-dilatation coefficients (a, b) of the order-five moments.

    Second-order isotropy ties the equilibrium of (x eps2, y eps2) to the heat
    flux equilibrium and the two stress relaxation times by these formulas.
    """
    denom = sigma_xx + sigma_xy
    a = -Fraction(1, 12) * (7 * (7 * sigma_xx + 2 * sigma_xy) * e_phix_qx
                            + 5 * (17 * sigma_xx - 4 * sigma_xy)) / denom
    b = Fraction(7, 12) * e_phiy_qx * (7 * sigma_xx + 2 * sigma_xy) / denom
    return a, b


def _sphi_of_sxx(s_xx):
    """The heat-flux rate 3(2 - s_xx)/(3 - s_xx), i.e. sigma_phi = 1/(12 sigma_xx)."""
    return 3 * (2 - s_xx) / (3 - s_xx)


def _annex_eps_rows_ok(scheme, template):
    """Shared eps2/eps3/pxxe row patterns of the third-order templates."""
    e_rho = scheme.e_entry("e", "rho")
    if template == "annex-example-1":
        c = Fraction(67, 462)
        expect_rho = (Fraction(274, 39) - c * scheme.e_entry("eps2", "rho")
                      - Fraction(137, 3003) * e_rho)
        return (scheme.e_entry("eps3", "rho") == expect_rho
                and scheme.e_entry("eps3", "qx") == -c * scheme.e_entry("eps2", "qx")
                and scheme.e_entry("eps3", "qy") == -c * scheme.e_entry("eps2", "qy"))
    expect_eps2 = -Fraction(3234, 13) - Fraction(361, 26) * e_rho
    expect_eps3 = Fraction(1681, 39) + Fraction(307, 156) * e_rho
    return (scheme.e_entry("eps2", "rho") == expect_eps2
            and scheme.e_entry("eps2", "qx") == 0
            and scheme.e_entry("eps2", "qy") == 0
            and scheme.e_entry("eps3", "rho") == expect_eps3
            and scheme.e_entry("eps3", "qx") == 0
            and scheme.e_entry("eps3", "qy") == 0
            and _row_zero(scheme, "pxxe"))


def _flux_diag(scheme, phi_value, xeps2_value):
    """E has phi and (x eps2, y eps2) proportional to momentum at these factors."""
    return (scheme.e_entry("phix", "rho") == 0
            and scheme.e_entry("phiy", "rho") == 0
            and scheme.e_entry("phix", "qx") == phi_value
            and scheme.e_entry("phiy", "qy") == phi_value
            and scheme.e_entry("phix", "qy") == 0
            and scheme.e_entry("phiy", "qx") == 0
            and scheme.e_entry("xeps2", "rho") == 0
            and scheme.e_entry("yeps2", "rho") == 0
            and scheme.e_entry("xeps2", "qx") == xeps2_value
            and scheme.e_entry("yeps2", "qy") == xeps2_value
            and scheme.e_entry("xeps2", "qy") == 0
            and scheme.e_entry("yeps2", "qx") == 0)


def _annex_member(scheme, template) -> bool:
    s = {m: scheme.s_entry(m) for m in scheme.labels[N_CONSERVED:]}
    if template == "annex-example-1":
        sphi = _sphi_of_sxx(s["pxx"])
        return (_flux_diag(scheme, Fraction(-3), Fraction(31, 6))
                and _annex_eps_rows_ok(scheme, template)
                and s["e"] == s["pxx"]
                and s["phix"] == s["phiy"] == s["xeps2"] == s["yeps2"] == sphi)
    if template == "annex-example-2":
        s_e, s_xx = s["e"], s["pxx"]
        denom = 7 * s_e + 5 * s_xx - 4 * s_xx * s_e
        if denom == 0:
            return False
        sphix = 2 * (7 * s_e + 5 * s_xx - 6 * s_xx * s_e) / denom
        return (_flux_diag(scheme, Fraction(-3), Fraction(31, 6))
                and _annex_eps_rows_ok(scheme, template)
                and s["xeps2"] == s["yeps2"] == _sphi_of_sxx(s_xx)
                and s["phix"] == sphix)
    if template == "annex-remark":
        sphi = _sphi_of_sxx(s["pxx"])
        return (_flux_diag(scheme, Fraction(-1), Fraction(-1, 12))
                and _annex_eps_rows_ok(scheme, template)
                and s["e"] == s["pxx"] == s["pxy"]
                and s["phix"] == s["phiy"] == s["xeps2"] == s["yeps2"] == sphi)
    raise ValueError(f"unknown annex template {template!r}")


ANNEX_TEMPLATES = ("annex-example-1", "annex-example-2", "annex-remark")


def check_d2q13(scheme, order) -> bool:
    """Closed-form isotropy conditions for the thirteen-velocity scheme.

    Orders 1 and 2 are complete characterizations. Order 3 checks the
    necessary flux-proportionality relations plus membership in one of the
    three known third-order parameter templates; the complete general
    characterization is not decided here, so a scheme outside the templates
    classifies false even if the exact classifier could accept it.
    """
    if scheme.scheme_id != "d2q13":
        raise ValueError("check_d2q13 expects a d2q13 scheme")
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > 3:
        raise ValueError("no closed-form conditions beyond order 3")
    if order >= 1:
        if not _order1_zeros(scheme):
            return False
    if order >= 2:
        s_xx = sigma_of_s(scheme.s_entry("pxx"))
        s_xy = sigma_of_s(scheme.s_entry("pxy"))
        a, b = eq_defab(s_xx, s_xy, scheme.e_entry("phix", "qx"),
                        scheme.e_entry("phiy", "qx"))
        if not (scheme.e_entry("phix", "rho") == 0
                and scheme.e_entry("phiy", "rho") == 0
                and scheme.e_entry("xeps2", "rho") == 0
                and scheme.e_entry("yeps2", "rho") == 0
                and scheme.e_entry("phiy", "qy") == scheme.e_entry("phix", "qx")
                and scheme.e_entry("phiy", "qx") == -scheme.e_entry("phix", "qy")
                and scheme.e_entry("xeps2", "qx") == a
                and scheme.e_entry("xeps2", "qy") == b
                and scheme.e_entry("yeps2", "qx") == -b
                and scheme.e_entry("yeps2", "qy") == a):
            return False
    if order >= 3:
        if not (scheme.e_entry("phix", "qy") == 0
                and scheme.e_entry("xeps2", "qy") == 0
                and scheme.e_entry("xeps2", "qx")
                == -Fraction(21, 8) * scheme.e_entry("phix", "qx") - Fraction(65, 24)):
            return False
        if not any(_annex_member(scheme, t) for t in ANNEX_TEMPLATES):
            return False
    return True


def closed_form_check(scheme, order) -> bool:
    if scheme.scheme_id == "d2q9":
        return check_d2q9(scheme, order)
    return check_d2q13(scheme, order)


def classification_report(scheme, m_max=None):
    """JSON-ready classifier output with the closed-form cross-check."""
    report = isotropy_order(scheme, m_max)
    closed_max = 5 if scheme.scheme_id == "d2q9" else 3
    closed = {f"order_{k}": closed_form_check(scheme, k)
              for k in range(1, closed_max + 1)}
    witness = None
    if report.first_failing_entry is not None:
        n, i, j, derivs, rot = report.first_failing_entry
        witness = {"order": n, "i": i, "j": j, "derivs": derivs,
                   "rotation": {"c": format_rational(rot.c),
                                "s": format_rational(rot.s)}}
    return {
        "scheme": scheme.scheme_id,
        "order_achieved": report.order_achieved,
        "residuals": [{"order": n, "max_abs": format_rational(v)}
                      for n, v in report.per_order_residuals],
        "witness": witness,
        "closed_form": closed,
    }
