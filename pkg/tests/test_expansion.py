"""Equivalent-equation expansion and the dispersion cross-check."""

import random
from fractions import Fraction

import pytest

from lbiso.algebra import DiffPoly
from lbiso.expansion import (
    MAX_ORDER,
    SingularRelaxationError,
    dispersion_check,
    equivalent_tensors,
    tensor_report,
    transport_matrices,
)
from lbiso.families import FamilySpec, build_family
from lbiso.scheme import build_moment_basis, velocities_of, MomentBasis

from helpers import make_scheme, random_scheme


def test_transport_lambda0_identity_and_lambda1_density_row():
    basis = build_moment_basis("d2q9")
    lam = transport_matrices(basis, velocities_of("d2q9"), 2)
    ident = lam[0]
    for i in range(9):
        for j in range(9):
            poly = ident.entry(i, j)
            assert poly.terms == ({(0, 0): Fraction(1)} if i == j else {})
    # density row of Lambda_1 is the divergence of the momentum moments
    row = [lam[1].entry(0, j) for j in range(9)]
    assert row[1].terms == {(1, 0): Fraction(1)}
    assert row[2].terms == {(0, 1): Fraction(1)}
    for j in (0, 3, 4, 5, 6, 7, 8):
        assert row[j].terms == {}


def test_order_bounds_and_singular_rate():
    rng = random.Random(1)
    scheme = random_scheme(rng, "d2q9")
    with pytest.raises(ValueError):
        equivalent_tensors(scheme, 0)
    with pytest.raises(ValueError):
        equivalent_tensors(scheme, MAX_ORDER + 1)
    dead = scheme.with_s_entry("eps2", Fraction(0))
    with pytest.raises(SingularRelaxationError) as err:
        equivalent_tensors(dead, 2)
    assert "eps2" in str(err.value)


def test_density_row_is_divergence_for_any_scheme():
    rng = random.Random(2)
    for scheme_id in ("d2q9", "d2q13"):
        for _ in range(5):
            scheme = random_scheme(rng, scheme_id)
            a1 = equivalent_tensors(scheme, 1)[0]
            assert a1.entry(0, 1, 1) == 1     # d_x q_x
            assert a1.entry(0, 2, 0) == 1     # d_y q_y
            assert a1.entry(0, 0, 0) == 0 and a1.entry(0, 0, 1) == 0
            assert a1.entry(0, 1, 0) == 0 and a1.entry(0, 2, 1) == 0


def test_component_counts_of_computed_tensors():
    rng = random.Random(3)
    scheme = random_scheme(rng, "d2q9")
    tensors = equivalent_tensors(scheme, 4)
    assert [t.component_count() for t in tensors] == [18, 27, 36, 45]


def test_sound_speed_entry_from_first_order_family():
    scheme = build_family(FamilySpec("d2q9", 1, free={"c0_squared": Fraction(7, 20)}))
    a1 = equivalent_tensors(scheme, 1)[0]
    assert a1.entry(1, 0, 1) == Fraction(7, 20)
    assert a1.entry(2, 0, 0) == Fraction(7, 20)


def test_moment_rescaling_leaves_tensors_invariant():
    """Rescaling a non-conserved basis row (with E rescaled to match) is a
    pure renormalization and cannot change the equivalent equations."""
    rng = random.Random(4)
    scheme = random_scheme(rng, "d2q9")
    tensors = equivalent_tensors(scheme, 3)

    k = 4                       # rescale the fifth moment row by 3
    c = Fraction(3)
    basis = scheme.basis
    M = tuple(tuple(v * c for v in row) if i == k else row
              for i, row in enumerate(basis.M))
    M_inv = tuple(tuple(v / c if j == k else v for j, v in enumerate(row))
                  for row in basis.M_inv)
    scaled_basis = MomentBasis(basis.scheme_id, basis.labels, M, M_inv)
    E = tuple(tuple(v * c for v in row) if i == k - 3 else row
              for i, row in enumerate(scheme.E))
    scaled = type(scheme)(scheme.scheme_id, scaled_basis, E, scheme.s,
                          scheme.c0_squared)
    assert equivalent_tensors(scaled, 3) == tensors


def test_tensor_report_lists_nonzero_entries_only():
    scheme = build_family(FamilySpec("d2q9", 1, free={}))
    tensors = equivalent_tensors(scheme, 2)
    report = tensor_report(scheme, tensors)
    assert [block["order"] for block in report] == [1, 2]
    first = report[0]["entries"]
    assert {"i": "rho", "j": "qx", "derivs": "x", "value": "1"} in first
    for block in report:
        for entry in block["entries"]:
            assert entry["value"] != "0"


def test_dispersion_slope_matches_analysis_order():
    scheme = build_family(FamilySpec("d2q9", 2, free={"s_pxx": Fraction(6, 5)}))
    tensors = equivalent_tensors(scheme, 2)
    result = dispersion_check(scheme, tensors)
    assert result.slope >= 2.8
    short = dispersion_check(scheme, tensors[:1])
    assert 1.8 <= short.slope < 2.6


def test_dispersion_detects_wrong_tensor():
    scheme = build_family(FamilySpec("d2q9", 2, free={"s_pxx": Fraction(6, 5)}))
    tensors = equivalent_tensors(scheme, 2)
    broken = tensors[1] + type(tensors[1])(
        2, {(1, 1, 2): Fraction(1, 1000)})
    result = dispersion_check(scheme, [tensors[0], broken])
    assert result.slope < 2.5


def test_dispersion_requires_tensors():
    scheme = build_family(FamilySpec("d2q9", 1, free={}))
    with pytest.raises(ValueError):
        dispersion_check(scheme, [])
