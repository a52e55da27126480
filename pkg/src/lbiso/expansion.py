"""Equivalent-equation tensors by Taylor expansion, plus a dispersion oracle.

The scheme in moment space reads m(t+1) = T J m(t), where J is the collision
matrix and T = sum_n ((-1)^n / n!) Lambda_n collects the streaming shifts,
Lambda_n = M diag((v_j . grad)^n) M^-1. Substituting the ansatz

    Y = (E + sum_k B_k) W,      d_t W = sum_k Theta_k W,

with B_k, Theta_k homogeneous of derivative degree k, and matching both
moment blocks degree by degree yields an exact triangular recursion for
Theta_k and B_k. The order-n tensor is A^(n) = symmetrize(-Theta_n), so the
conserved moments satisfy d_t W + sum_n A^(n) (x) grad^n W = 0 up to the
truncation order. Everything here is exact rational arithmetic except the
dispersion oracle, which runs in mpmath floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .algebra import DiffOpMatrix, DiffPoly, contract, mat_vec, symmetrize
from .scheme import N_CONSERVED, scheme_step_matrix

MAX_ORDER = 5


class SingularRelaxationError(ValueError):
    """A zero relaxation rate makes the defect recursion unsolvable."""


@dataclass(frozen=True)
class TransportFamily:
    """Streaming expansion matrices Lambda_0..Lambda_{m+1} in moment space."""

    matrices: tuple

    def __getitem__(self, n):
        return self.matrices[n]

    def __len__(self):
        return len(self.matrices)


_LAMBDA_CACHE = {}


def transport_matrices(basis, velocities, m) -> TransportFamily:
    """Exact Lambda_n = M diag((v_j . grad)^n) M^-1 for n = 0..m+1.

    Lambda_0 is the identity and every entry of Lambda_n is homogeneous of
    degree n. Cached per (basis matrix, velocity set) so custom bases that
    share a scheme id never collide.
    """
    if m < 1:
        raise ValueError("transport expansion order must be >= 1")
    cache_key = (basis.M, tuple(velocities))
    cached = _LAMBDA_CACHE.get(cache_key, [])
    if len(cached) < m + 2:
        q = basis.q
        M, Minv = basis.M, basis.M_inv
        shift = [DiffPoly({(1, 0): vx, (0, 1): vy}) for vx, vy in velocities]
        if not cached:
            cached = [DiffOpMatrix.identity(q)]
            powers = [DiffPoly.constant(1)] * q
        else:
            powers = None  # recomputed below up to the cached length
        n_have = len(cached)
        if powers is None:
            powers = [DiffPoly.constant(1)] * q
            for _ in range(n_have - 1):
                powers = [p * s for p, s in zip(powers, shift)]
        for _ in range(n_have, m + 2):
            powers = [p * s for p, s in zip(powers, shift)]
            rows = []
            for i in range(q):
                row = []
                for k in range(q):
                    acc = DiffPoly()
                    for j in range(q):
                        c = M[i][j] * Minv[j][k]
                        if c != 0 and powers[j].terms:
                            acc = acc + powers[j].scaled(c)
                    row.append(acc)
                rows.append(tuple(row))
            cached.append(DiffOpMatrix(rows))
        _LAMBDA_CACHE[cache_key] = cached
    return TransportFamily(tuple(cached[:m + 2]))


def equivalent_tensors(scheme, m):
    """Tensors A^(1)..A^(m) of the equivalent equations, exact.

    Raises SingularRelaxationError if any s_k = 0 and ValueError if m is
    outside 1..5.
    """
    if not 1 <= m <= MAX_ORDER:
        raise ValueError(f"expansion order must be between 1 and {MAX_ORDER}")
    labels = scheme.labels[N_CONSERVED:]
    for label, s in zip(labels, scheme.s):
        if s == 0:
            raise SingularRelaxationError(
                f"s[{label!r}] = 0 leaves the defect equations unsolvable")

    q, n = scheme.q, N_CONSERVED
    lam = transport_matrices(scheme.basis, scheme.velocities, m)
    TWW, TWY, TYW, TYY = [], [], [], []
    for deg in range(m + 1):
        T = lam[deg].scaled(Fraction((-1) ** deg, math.factorial(deg)))
        TWW.append(T.block(0, n, 0, n))
        TWY.append(T.block(0, n, n, q))
        TYW.append(T.block(n, q, 0, n))
        TYY.append(T.block(n, q, n, q))

    E_op = DiffOpMatrix.from_scalars(scheme.E)
    one_minus_s = [1 - s for s in scheme.s]
    inv_s = [1 / s for s in scheme.s]

    theta = {}
    B = {}
    X = {}
    power_memo = {}

    def theta_power(p, deg):
        """Degree part [Theta^p]_deg; needs theta[1..deg-1] only when p >= 2."""
        if p == 1:
            return theta[deg]
        key = (p, deg)
        if key not in power_memo:
            acc = DiffOpMatrix.zeros(n, n)
            for c in range(1, deg - p + 2):
                acc = acc + theta[c] @ theta_power(p - 1, deg - c)
            power_memo[key] = acc
        return power_memo[key]

    for deg in range(1, m + 1):
        K = TWW[deg] + TWY[deg] @ E_op
        for a in range(1, deg):
            K = K + TWY[a] @ B[deg - a].row_scaled(one_minus_s)
        R = DiffOpMatrix.zeros(n, n)
        for p in range(2, deg + 1):
            R = R + theta_power(p, deg).scaled(Fraction(1, math.factorial(p)))
        theta[deg] = K - R
        X[deg] = K
        rhs = TYW[deg] + TYY[deg] @ E_op
        for a in range(1, deg):
            rhs = rhs + TYY[a] @ B[deg - a].row_scaled(one_minus_s)
        rhs = rhs - E_op @ X[deg]
        for a in range(1, deg):
            rhs = rhs - B[a] @ X[deg - a]
        B[deg] = rhs.row_scaled(inv_s)

    return [symmetrize(-theta[deg], deg) for deg in range(1, m + 1)]


# ---------------------------------------------------------------------------
# tensor reports

def tensor_report(scheme, tensors):
    """JSON-ready report: one object per tensor, zero entries omitted."""
    from .algebra import derivs_string, format_rational
    conserved = scheme.labels[:N_CONSERVED]
    out = []
    for tensor in tensors:
        entries = []
        for (i, j, nx), value in sorted(tensor.items()):
            if value != 0:
                entries.append({
                    "i": conserved[i],
                    "j": conserved[j],
                    "derivs": derivs_string(tensor.order, nx),
                    "value": format_rational(value),
                })
        out.append({"order": tensor.order, "entries": entries})
    return out


# ---------------------------------------------------------------------------
# Fourier dispersion oracle

def amplification_symbol(scheme, k):
    """One-step symbol G(k) = diag(exp(-i k.v_j)) M^-1 J M, population space.

    Returned as an mpmath matrix at the caller's working precision; pass
    mpmath reals in k to keep full precision.
    """
    kx, ky = k
    G0 = scheme_step_matrix(scheme)
    q = scheme.q
    out = mp.matrix(q, q)
    for j, (vx, vy) in enumerate(scheme.velocities):
        phase = mp.exp(mp.mpc(0, -1) * (kx * vx + ky * vy))
        for i in range(q):
            entry = G0[j][i]
            if entry != 0:
                out[j, i] = phase * entry
    return out


@dataclass(frozen=True)
class DispersionResult:
    slope: float
    samples: tuple      # (|k|, eigenvalue error) pairs, floats
    skipped: tuple      # |k| values dropped for ambiguous mode matching

    def __float__(self):
        return self.slope


def _conserved_frame(scheme):
    """Orthonormal basis (as mpf column lists) of the k = 0 slow eigenspace.

    The columns M^-1 (e_i; E e_i) span the eigenvalue-1 eigenspace of the
    collision matrix; eigenvectors of G(k) for small k are selected by their
    overlap with this span rather than by eigenvalue distance to 1, because a
    tiny relaxation rate also parks fast eigenvalues near 1.
    """
    q, n = scheme.q, N_CONSERVED
    cols = []
    for i in range(n):
        w = [Fraction(1) if r == i else Fraction(0) for r in range(n)]
        y = [scheme.E[r][i] for r in range(q - n)]
        vec = mat_vec(scheme.basis.M_inv, tuple(w) + tuple(y))
        cols.append([mp.mpf(x.numerator) / x.denominator for x in vec])
    frame = []
    for col in cols:
        v = list(col)
        for u in frame:
            d = mp.fsum(ui * vi for ui, vi in zip(u, v))
            v = [vi - d * ui for vi, ui in zip(v, u)]
        norm = mp.sqrt(mp.fsum(vi * vi for vi in v))
        frame.append([vi / norm for vi in v])
    return frame


def dispersion_check(scheme, tensors, k_samples=None, direction=None,
                     dps=50) -> DispersionResult:
    """Fit the consistency order of the tensors against the exact symbol.

    For each small wavevector k the three eigenvalues of G(k) belonging to
    the conserved (slow) modes are compared with the eigenvalues of
    exp(-sum_n contract(A^(n), k)); analysis at order m must leave an error
    O(|k|^{m+1}), so the fitted log-log slope is the consistency order plus
    one. Samples where the slow/fast eigenvector split is ambiguous are
    skipped and reported.
    """
    if not tensors:
        raise ValueError("need at least one tensor")
    q, n = scheme.q, N_CONSERVED
    with mp.workdps(dps):
        if k_samples is None:
            count = 7
            k_samples = [mp.mpf(10) ** (mp.mpf(-3) + i / mp.mpf(count - 1))
                         for i in range(count)]
        else:
            k_samples = [mp.mpf(k) if not isinstance(k, mp.mpf) else k
                         for k in k_samples]
        if direction is None:
            angle = mp.mpf(9) / 10
            direction = (mp.cos(angle), mp.sin(angle))

        frame = _conserved_frame(scheme)
        samples = []
        skipped = []
        floor = mp.mpf(10) ** (5 - dps)
        for kmag in k_samples:
            kx, ky = kmag * direction[0], kmag * direction[1]
            G = amplification_symbol(scheme, (kx, ky))
            evals, evecs = mp.eig(G)
            overlaps = []
            for idx in range(q):
                v = [evecs[r, idx] for r in range(q)]
                norm2 = mp.fsum(abs(x) ** 2 for x in v)
                proj2 = mp.fsum(
                    abs(mp.fsum(u[r] * v[r] for r in range(q))) ** 2
                    for u in frame)
                overlaps.append(mp.sqrt(proj2 / norm2))
            ranked = sorted(range(q), key=lambda t: overlaps[t], reverse=True)
            # the slow eigenvectors perturb off the k=0 frame by O(k), so
            # demand the chosen three hug the span and beat the runner-up
            if (overlaps[ranked[2]] < mp.mpf("0.99")
                    or overlaps[ranked[2]] - overlaps[ranked[3]]
                    < mp.mpf("0.001")):
                skipped.append(float(kmag))
                continue
            slow = [evals[t] for t in ranked[:3]]
            P = mp.matrix(n, n)
            for tensor in tensors:
                vals = contract(tensor, (kx, ky))
                for i in range(n):
                    for j in range(n):
                        P[i, j] += vals[i][j]
            pred, _ = mp.eig(mp.expm(-P))
            best = None
            for perm in itertools.permutations(range(n)):
                worst = max(abs(slow[i] - pred[perm[i]]) for i in range(n))
                if best is None or worst < best:
                    best = worst
            samples.append((float(kmag), float(max(best, floor))))

        if len(samples) < 2:
            raise ValueError("dispersion fit needs at least two usable samples")
        xs = [math.log(k) for k, _ in samples]
        ys = [math.log(e) for _, e in samples]
        xbar = sum(xs) / len(xs)
        ybar = sum(ys) / len(ys)
        slope = (sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
                 / sum((x - xbar) ** 2 for x in xs))
    return DispersionResult(float(slope), tuple(samples), tuple(skipped))
