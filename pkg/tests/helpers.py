"""Shared draw utilities for the test suite (deterministic rng everywhere)."""

from fractions import Fraction

from lbiso.algebra import SymTensor
from lbiso.scheme import Scheme, build_moment_basis

_BASIS = {sid: build_moment_basis(sid) for sid in ("d2q9", "d2q13")}


def basis(scheme_id):
    return _BASIS[scheme_id]


def make_scheme(scheme_id, E, s, c0=None):
    return Scheme(scheme_id, _BASIS[scheme_id],
                  tuple(tuple(Fraction(x) for x in row) for row in E),
                  tuple(Fraction(x) for x in s), c0)


def rand_s(rng):
    return Fraction(rng.randint(1, 39), 20)


def rand_e(rng):
    return Fraction(rng.randint(-8, 8), rng.randint(1, 5))


def rand_c0(rng):
    return Fraction(rng.randint(1, 12), rng.randint(12, 24))


def random_scheme(rng, scheme_id):
    rows = 6 if scheme_id == "d2q9" else 10
    E = tuple(tuple(rand_e(rng) for _ in range(3)) for _ in range(rows))
    s = tuple(rand_s(rng) for _ in range(rows))
    return make_scheme(scheme_id, E, s)


def random_tensor(rng, order, span=9):
    entries = {}
    for i in range(3):
        for j in range(3):
            for nx in range(order + 1):
                entries[(i, j, nx)] = Fraction(rng.randint(-span, span),
                                               rng.randint(1, 7))
    return SymTensor(order, entries)


# Every family the package constructs, with the keys it leaves free.
FAMILIES = (
    ("d2q9", 1, None), ("d2q9", 2, None),
    ("d2q9", 3, "P6"), ("d2q9", 3, "P7"), ("d2q9", 3, "P8"),
    ("d2q9", 4, "even-equal"), ("d2q9", 4, "sound-fixed"),
    ("d2q13", 1, None), ("d2q13", 2, None),
    ("d2q13", 3, "annex-example-1"), ("d2q13", 3, "annex-example-2"),
    ("d2q13", 3, "annex-remark"),
)

FREE_KEYS = {
    ("d2q9", 1, None): ["c0_squared", "eps2_rho", "eps2_qx", "eps2_qy",
                        "phix_rho", "phix_qx", "phix_qy", "phiy_rho",
                        "phiy_qx", "phiy_qy", "s_e", "s_eps2", "s_phix",
                        "s_phiy", "s_pxx", "s_pxy"],
    ("d2q9", 2, None): ["c0_squared", "eps2_rho", "eps2_qx", "eps2_qy",
                        "s_e", "s_eps2", "s_phix", "s_phiy", "s_pxx", "s_pxy"],
    ("d2q9", 3, "P6"): ["c0_squared", "s_e", "s_eps2", "s_phix", "s_phiy",
                        "s_pxx"],
    ("d2q9", 3, "P7"): ["c0_squared", "eps2_rho", "s_e", "s_eps2", "s_pxx"],
    ("d2q9", 3, "P8"): ["c0_squared", "eps2_rho", "eps2_qx", "eps2_qy",
                        "s_eps2", "s_pxx"],
    ("d2q9", 4, "even-equal"): ["c0_squared", "s_pxx"],
    ("d2q9", 4, "sound-fixed"): ["s_pxx", "s_eps2"],
    ("d2q13", 1, None): ["c0_squared", "s_e", "s_pxx", "s_pxy", "s_phix",
                         "s_phiy", "s_xeps2", "s_yeps2", "s_eps2", "s_eps3",
                         "s_pxxe", "phix_rho", "phix_qx", "phix_qy",
                         "phiy_rho", "phiy_qx", "phiy_qy", "xeps2_rho",
                         "xeps2_qx", "xeps2_qy", "yeps2_rho", "yeps2_qx",
                         "yeps2_qy", "eps2_rho", "eps2_qx", "eps2_qy",
                         "eps3_rho", "eps3_qx", "eps3_qy", "pxxe_rho",
                         "pxxe_qx", "pxxe_qy"],
    ("d2q13", 2, None): ["c0_squared", "phix_qx", "phix_qy", "eps2_rho",
                         "eps2_qx", "eps2_qy", "eps3_rho", "eps3_qx",
                         "eps3_qy", "pxxe_rho", "pxxe_qx", "pxxe_qy",
                         "s_e", "s_pxx", "s_pxy", "s_phix", "s_phiy",
                         "s_xeps2", "s_yeps2", "s_eps2", "s_eps3", "s_pxxe"],
    ("d2q13", 3, "annex-example-1"): ["c0_squared", "eps2_rho", "eps2_qx",
                                      "eps2_qy", "pxxe_rho", "pxxe_qx",
                                      "pxxe_qy", "s_pxx", "s_pxy", "s_eps2",
                                      "s_eps3", "s_pxxe"],
    ("d2q13", 3, "annex-example-2"): ["c0_squared", "s_e", "s_pxx", "s_pxy",
                                      "s_phiy", "s_eps2", "s_eps3", "s_pxxe"],
    ("d2q13", 3, "annex-remark"): ["c0_squared", "s_pxx", "s_eps2", "s_eps3",
                                   "s_pxxe"],
}


def draw_free(rng, family_key):
    out = {}
    for key in FREE_KEYS[family_key]:
        if key == "c0_squared":
            out[key] = rand_c0(rng)
        elif key.startswith("s_"):
            out[key] = rand_s(rng)
        else:
            out[key] = rand_e(rng)
    return out
