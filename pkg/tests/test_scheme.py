"""Scheme definitions: moment bases, rates, configs, step matrices."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lbiso.algebra import mat_identity, mat_mul, mat_vec
from lbiso.scheme import (
    ConfigError,
    Scheme,
    build_moment_basis,
    coefficient_names,
    energy_equilibrium_from_c0,
    relaxation_step_matrix,
    s_of_sigma,
    scheme_from_config,
    scheme_step_matrix,
    scheme_to_config,
    sigma_of_s,
    sound_speed_squared,
    velocities_of,
    viscosities,
)

from helpers import make_scheme, random_scheme
import random


@pytest.mark.parametrize("scheme_id, q", [("d2q9", 9), ("d2q13", 13)])
def test_basis_orthogonal_and_invertible(scheme_id, q):
    basis = build_moment_basis(scheme_id)
    assert basis.q == q and len(basis.M) == q
    for a in range(q):
        for b in range(a + 1, q):
            assert sum(x * y for x, y in zip(basis.M[a], basis.M[b])) == 0
    assert mat_mul(basis.M, basis.M_inv) == mat_identity(q)


def test_basis_conserved_rows_are_mass_and_momentum():
    for scheme_id in ("d2q9", "d2q13"):
        basis = build_moment_basis(scheme_id)
        vel = velocities_of(scheme_id)
        assert basis.M[0] == tuple(Fraction(1) for _ in vel)
        assert basis.M[1] == tuple(Fraction(vx) for vx, _ in vel)
        assert basis.M[2] == tuple(Fraction(vy) for _, vy in vel)


def test_d2q9_matrix_matches_classical_rows():
    basis = build_moment_basis("d2q9")
    vel = velocities_of("d2q9")
    rows = {
        "e": lambda vx, vy: 3 * (vx * vx + vy * vy) - 4,
        "eps2": lambda vx, vy: Fraction(
            9 * (vx * vx + vy * vy) ** 2 - 21 * (vx * vx + vy * vy) + 8, 2),
        "phix": lambda vx, vy: 3 * vx * (vx * vx + vy * vy) - 5 * vx,
        "phiy": lambda vx, vy: 3 * vy * (vx * vx + vy * vy) - 5 * vy,
        "pxx": lambda vx, vy: vx * vx - vy * vy,
        "pxy": lambda vx, vy: vx * vy,
    }
    for name, fn in rows.items():
        row = basis.M[basis.labels.index(name)]
        assert row == tuple(Fraction(fn(vx, vy)) for vx, vy in vel), name


@given(st.fractions(min_value="1/1000", max_value="1999/1000",
                    max_denominator=10**6))
def test_sigma_bijection(s):
    assert s_of_sigma(sigma_of_s(s)) == s
    assert sigma_of_s(s) > -Fraction(1, 2)


@pytest.mark.parametrize("bad", [0, 2, Fraction(5, 2), -1])
def test_sigma_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        sigma_of_s(bad)


def test_sound_speed_links():
    assert energy_equilibrium_from_c0("d2q9", Fraction(1, 3)) == -2
    assert energy_equilibrium_from_c0("d2q13", Fraction(1, 2)) == -15
    for sid in ("d2q9", "d2q13"):
        for c0 in (Fraction(1, 3), Fraction(5, 9), Fraction(7, 20)):
            assert sound_speed_squared(sid, energy_equilibrium_from_c0(sid, c0)) == c0
    with pytest.raises(ConfigError):
        energy_equilibrium_from_c0("d2q9", 0)


def test_viscosities_values():
    scheme = make_scheme(
        "d2q9",
        [(-2, 0, 0)] + [(0, 0, 0)] * 5,
        [Fraction(3, 2)] * 6, c0=Fraction(1, 3))
    mu, zeta = viscosities(scheme, Fraction(1, 3))
    sigma = sigma_of_s(Fraction(3, 2))
    assert mu == sigma / 3
    assert zeta == sigma * (Fraction(5, 9) - Fraction(1, 3))


def test_scheme_accessors_and_immutability():
    rng = random.Random(5)
    scheme = random_scheme(rng, "d2q9")
    assert scheme.q == 9
    assert scheme.e_entry("phix", "qx") == scheme.E[2][1]
    assert scheme.s_entry("pxy") == scheme.s[5]
    bumped = scheme.with_e_entry("phix", "qx", Fraction(7))
    assert bumped.e_entry("phix", "qx") == 7
    assert scheme.e_entry("phix", "qx") != 7 or scheme.E[2][1] == 7
    bumped = scheme.with_s_entry("e", Fraction(1, 9))
    assert bumped.s_entry("e") == Fraction(1, 9)


def test_relaxation_matrix_structure():
    rng = random.Random(6)
    scheme = random_scheme(rng, "d2q9")
    J = relaxation_step_matrix(scheme.E, scheme.s)
    for i in range(3):
        assert J[i] == tuple(Fraction(1) if j == i else Fraction(0)
                             for j in range(9))
    for k in range(6):
        row = J[3 + k]
        assert row[:3] == tuple(scheme.s[k] * scheme.E[k][c] for c in range(3))
        assert row[3 + k] == 1 - scheme.s[k]


def test_step_matrix_conserves_mass_and_momentum():
    rng = random.Random(7)
    for scheme_id in ("d2q9", "d2q13"):
        scheme = random_scheme(rng, scheme_id)
        G = scheme_step_matrix(scheme)
        vel = velocities_of(scheme_id)
        ones = tuple(Fraction(1) for _ in vel)
        vxs = tuple(Fraction(v[0]) for v in vel)
        vys = tuple(Fraction(v[1]) for v in vel)
        for weights in (ones, vxs, vys):
            # left action: the moment row must be reproduced exactly
            got = tuple(sum(weights[i] * G[i][j] for i in range(len(vel)))
                        for j in range(len(vel)))
            assert got == weights


def test_config_round_trip_exact():
    rng = random.Random(8)
    for scheme_id in ("d2q9", "d2q13"):
        scheme = random_scheme(rng, scheme_id)
        again = scheme_from_config(scheme_to_config(scheme))
        assert again.E == scheme.E and again.s == scheme.s


def test_config_comment_round_trip():
    config = {"scheme": "d2q9", "E": {"e_rho": "-2"},
              "s": {m: "1.5" for m in ("e", "eps2", "phix", "phiy", "pxx", "pxy")},
              "comment": "hand-built"}
    scheme = scheme_from_config(config)
    assert scheme.comment == "hand-built"
    assert scheme_to_config(scheme)["comment"] == "hand-built"


def test_config_decimal_parsed_exactly():
    config = {"scheme": "d2q9", "E": {},
              "s": {m: "1.9977944349438221"
                    for m in ("e", "eps2", "phix", "phiy", "pxx", "pxy")}}
    scheme = scheme_from_config(config)
    assert scheme.s[0] == Fraction(19977944349438221, 10**16)


@pytest.mark.parametrize("mutate, fragment", [
    (lambda c: c.pop("scheme"), "scheme"),
    (lambda c: c.__setitem__("scheme", "d3q27"), "scheme"),
    (lambda c: c["E"].__setitem__("zz_rho", "1"), "zz_rho"),
    (lambda c: c["s"].__setitem__("pxx", "2.5"), "pxx"),
    (lambda c: c["s"].__setitem__("pxx", "0"), "pxx"),
    (lambda c: c["s"].pop("pxx"), "pxx"),
    (lambda c: c["E"].__setitem__("e_rho", "nope"), "e_rho"),
    (lambda c: c.__setitem__("comment", 7), "comment"),
    (lambda c: c.__setitem__("c0_squared", "1/2"), "c0"),
])
def test_config_errors_name_the_offender(mutate, fragment):
    config = {"scheme": "d2q9", "E": {"e_rho": "-2"},
              "s": {m: "1.5" for m in ("e", "eps2", "phix", "phiy", "pxx", "pxy")}}
    mutate(config)
    with pytest.raises(ConfigError) as err:
        scheme_from_config(config)
    assert fragment in str(err.value)


def test_coefficient_names_cover_all_rows():
    names = coefficient_names("d2q9")
    assert "e_rho" in names and "pxy_qy" in names
    assert len(names) == 18
    assert len(coefficient_names("d2q13")) == 30
