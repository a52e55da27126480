"""Exact rational scalars, derivative-operator matrices, and symmetric tensors.

Everything in this module is exact: scalars are `fractions.Fraction`, matrices
are tuples of tuples of Fractions, differential operators are polynomials in
the commuting symbols dx, dy with Fraction coefficients. No floats anywhere;
the only numeric escape hatch is `contract(..., wavevector=...)`, which
evaluates a tensor at a complex wavevector for the dispersion oracle.
"""

from __future__ import annotations

import math
from fractions import Fraction


# ---------------------------------------------------------------------------
# rational scalars

def rational(value):
    """Coerce `value` to an exact Fraction.

    Accepts Fraction, int, and strings: "p/q", integer literals, and decimal
    literals including exponent notation ("1.3", "1e-3"). Floats are rejected
    on purpose: a binary float already misrepresents a decimal input, so
    callers must pass the literal as a string.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("cannot build a rational from a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
    raise TypeError(f"cannot build an exact rational from {type(value).__name__}")


def format_rational(x) -> str:
    """Render a Fraction as "p/q", or plain "p" when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# exact dense matrices (tuples of tuples of Fractions)

def mat_zeros(rows, cols):
    return tuple(tuple(_ZERO for _ in range(cols)) for _ in range(rows))


def mat_identity(n):
    return tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n))


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a):
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a, b):
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_transpose(a):
    return tuple(zip(*a))


def mat_inv(a):
    """Exact inverse by Gauss-Jordan elimination. Raises on singular input."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    aug = [list(row) + [_ONE if i == j else _ZERO for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot_row is None:
            raise ValueError("matrix is singular")
        if pivot_row != col:
            aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [x / pivot for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


# ---------------------------------------------------------------------------
# polynomials in the commuting derivative symbols dx, dy

class DiffPoly:
    """Polynomial in dx, dy with Fraction coefficients.

    Terms are stored as {(a, b): coefficient} for the monomial dx^a dy^b;
    zero coefficients are never stored. Multiplication is commutative because
    mixed partial derivatives commute on smooth fields.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (a, b), coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff != 0:
                    clean[(int(a), int(b))] = coeff
        self.terms = clean

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): Fraction(c)})

    @classmethod
    def monomial(cls, a, b, coeff=_ONE):
        return cls({(a, b): Fraction(coeff)})

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(a + b for a, b in self.terms)

    def degrees(self):
        return {a + b for a, b in self.terms}

    def is_homogeneous(self, k):
        return all(a + b == k for a, b in self.terms)

    def homogeneous_part(self, k):
        return DiffPoly({key: c for key, c in self.terms.items() if key[0] + key[1] == k})

    def coefficient(self, a, b):
        return self.terms.get((a, b), _ZERO)

    def __add__(self, other):
        if not isinstance(other, DiffPoly):
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, _ZERO) + c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        result = DiffPoly.__new__(DiffPoly)
        result.terms = out
        return result

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        result = DiffPoly.__new__(DiffPoly)
        result.terms = {key: -c for key, c in self.terms.items()}
        return result

    def __mul__(self, other):
        if isinstance(other, DiffPoly):
            out = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    key = (a1 + a2, b1 + b2)
                    s = out.get(key, _ZERO) + c1 * c2
                    if s == 0:
                        out.pop(key, None)
                    else:
                        out[key] = s
            result = DiffPoly.__new__(DiffPoly)
            result.terms = out
            return result
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        return NotImplemented

    def scaled(self, c):
        c = Fraction(c)
        if c == 0:
            return DiffPoly()
        result = DiffPoly.__new__(DiffPoly)
        result.terms = {key: c * v for key, v in self.terms.items()}
        return result

    def eval_wavevector(self, kx, ky):
        """Substitute dx -> i*kx, dy -> i*ky; works for any complex-like field.

        Coefficients enter the arithmetic as exact Fractions so the result
        carries the precision of kx, ky (floats stay floats, mpmath values
        stay mpmath with no double rounding).
        """
        total = 0
        for (a, b), c in self.terms.items():
            total = total + c * (1j * kx) ** a * (1j * ky) ** b
        return total

    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "DiffPoly(0)"
        bits = []
        for (a, b), c in sorted(self.terms.items()):
            mono = "dx^%d dy^%d" % (a, b)
            bits.append(f"{format_rational(c)}*{mono}")
        return "DiffPoly(" + " + ".join(bits) + ")"


_ZERO_POLY = DiffPoly()


class DiffOpMatrix:
    """Matrix whose entries are DiffPoly values."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        entries = tuple(tuple(e for e in row) for row in entries)
        if not entries:
            raise ValueError("matrix needs at least one row")
        cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise ValueError("ragged matrix")
        for row in entries:
            for e in row:
                if not isinstance(e, DiffPoly):
                    raise TypeError("entries must be DiffPoly")
        self.rows = len(entries)
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, rows, cols):
        return cls(tuple(tuple(_ZERO_POLY for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n):
        one = DiffPoly.constant(1)
        return cls(tuple(tuple(one if i == j else _ZERO_POLY for j in range(n))
                         for i in range(n)))

    @classmethod
    def from_scalars(cls, mat):
        return cls(tuple(tuple(DiffPoly.constant(x) if x != 0 else _ZERO_POLY
                               for x in row) for row in mat))

    def entry(self, i, j):
        return self.entries[i][j]

    def __add__(self, other):
        self._check_shape(other)
        return DiffOpMatrix(tuple(tuple(a + b for a, b in zip(ra, rb))
                                  for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other):
        self._check_shape(other)
        return DiffOpMatrix(tuple(tuple(a - b for a, b in zip(ra, rb))
                                  for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self):
        return DiffOpMatrix(tuple(tuple(-e for e in row) for row in self.entries))

    def _check_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def __matmul__(self, other):
        if not isinstance(other, DiffOpMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        bt = tuple(zip(*other.entries))
        out = []
        for row in self.entries:
            out_row = []
            for col in bt:
                acc = _ZERO_POLY
                for x, y in zip(row, col):
                    if x.terms and y.terms:
                        acc = acc + x * y
                out_row.append(acc)
            out.append(tuple(out_row))
        return DiffOpMatrix(tuple(out))

    def scaled(self, c):
        return DiffOpMatrix(tuple(tuple(e.scaled(c) for e in row) for row in self.entries))

    def row_scaled(self, factors):
        """Multiply row i by factors[i]; used for diagonal relaxation matrices."""
        if len(factors) != self.rows:
            raise ValueError("factor count mismatch")
        return DiffOpMatrix(tuple(tuple(e.scaled(f) for e in row)
                                  for f, row in zip(factors, self.entries)))

    def block(self, r0, r1, c0, c1):
        return DiffOpMatrix(tuple(row[c0:c1] for row in self.entries[r0:r1]))

    def degrees(self):
        out = set()
        for row in self.entries:
            for e in row:
                out |= e.degrees()
        return out

    def is_homogeneous(self, k):
        return all(e.is_homogeneous(k) for row in self.entries for e in row)

    def homogeneous_part(self, k):
        return DiffOpMatrix(tuple(tuple(e.homogeneous_part(k) for e in row)
                                  for row in self.entries))

    def is_zero(self):
        return all(e.is_zero() for row in self.entries for e in row)

    def eval_wavevector(self, kx, ky):
        return [[e.eval_wavevector(kx, ky) for e in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, DiffOpMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        return f"DiffOpMatrix({self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# symmetric tensors on the conserved moments

class SymTensor:
    """Canonical representative of an order-n derivative tensor block.

    Entries are keyed by (i, j, nx): row conserved moment i, column conserved
    moment j, and the number nx of x's among the n derivative indices (the
    multiset representative; nx in 0..n). All rows*cols*(n+1) components are
    stored explicitly, including zeros, so the component count is an invariant
    of the representation.
    """

    __slots__ = ("order", "rows", "cols", "entries")

    def __init__(self, order, entries=None, rows=3, cols=3):
        if order < 1:
            raise ValueError("tensor order must be >= 1")
        self.order = int(order)
        self.rows = int(rows)
        self.cols = int(cols)
        full = {}
        for i in range(self.rows):
            for j in range(self.cols):
                for nx in range(self.order + 1):
                    full[(i, j, nx)] = _ZERO
        if entries:
            for key, value in entries.items():
                if key not in full:
                    raise KeyError(f"invalid tensor component key {key!r}")
                full[key] = Fraction(value)
        self.entries = full

    @classmethod
    def zero(cls, order, rows=3, cols=3):
        return cls(order, None, rows, cols)

    def component_count(self):
        return len(self.entries)

    def entry(self, i, j, nx):
        return self.entries[(i, j, nx)]

    def items(self):
        return self.entries.items()

    def __add__(self, other):
        self._check_shape(other)
        return SymTensor(self.order,
                         {k: v + other.entries[k] for k, v in self.entries.items()},
                         self.rows, self.cols)

    def __sub__(self, other):
        self._check_shape(other)
        return SymTensor(self.order,
                         {k: v - other.entries[k] for k, v in self.entries.items()},
                         self.rows, self.cols)

    def __neg__(self):
        return SymTensor(self.order, {k: -v for k, v in self.entries.items()},
                         self.rows, self.cols)

    def _check_shape(self, other):
        if (self.order, self.rows, self.cols) != (other.order, other.rows, other.cols):
            raise ValueError("tensor shape mismatch")

    def max_abs(self):
        return max(abs(v) for v in self.entries.values())

    def is_zero(self):
        return all(v == 0 for v in self.entries.values())

    def __eq__(self, other):
        if not isinstance(other, SymTensor):
            return NotImplemented
        return (self.order == other.order and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        nonzero = sum(1 for v in self.entries.values() if v != 0)
        return f"SymTensor(order={self.order}, nonzero={nonzero}/{len(self.entries)})"


def derivs_string(order, nx):
    """Canonical derivative multiset label, e.g. order 3 with nx=2 -> "xxy"."""
    return "x" * nx + "y" * (order - nx)


def parse_derivs(text):
    """Inverse of derivs_string; validates the canonical x-then-y form."""
    nx = len(text) - len(text.lstrip("x"))
    if text != "x" * nx + "y" * (len(text) - nx):
        raise ValueError(f"derivative label {text!r} not in canonical x..xy..y form")
    return len(text), nx


def symmetrize(op, order):
    """Convert a homogeneous degree-n DiffOpMatrix into its SymTensor.

    The full contraction over ordered index tuples puts binomial(n, a) copies
    of the symmetric entry with a x-indices on the monomial dx^a dy^(n-a), so
    the entry is the monomial coefficient divided by binomial(n, a).
    """
    if not isinstance(op, DiffOpMatrix):
        raise TypeError("symmetrize expects a DiffOpMatrix")
    entries = {}
    for i in range(op.rows):
        for j in range(op.cols):
            poly = op.entry(i, j)
            for (a, b), coeff in poly.terms.items():
                if a + b != order:
                    raise ValueError(
                        f"entry ({i},{j}) has degree {a + b}, expected {order}")
                entries[(i, j, a)] = coeff / math.comb(order, a)
    return SymTensor(order, entries, op.rows, op.cols)


def contract(tensor, wavevector=None):
    """Maximal contraction of a SymTensor.

    With no wavevector, returns the DiffOpMatrix Sum_a C(n,a) A[i,j,a]
    dx^a dy^(n-a). With wavevector=(kx, ky), substitutes dx -> i*kx,
    dy -> i*ky and returns a nested list of complex-like values (the entries
    follow the numeric type of kx, ky, so mpmath values stay mpmath).
    """
    n = tensor.order
    if wavevector is None:
        out = []
        for i in range(tensor.rows):
            row = []
            for j in range(tensor.cols):
                terms = {}
                for nx in range(n + 1):
                    v = tensor.entry(i, j, nx)
                    if v != 0:
                        terms[(nx, n - nx)] = v * math.comb(n, nx)
                row.append(DiffPoly(terms))
            out.append(tuple(row))
        return DiffOpMatrix(tuple(out))
    kx, ky = wavevector
    ikx, iky = 1j * kx, 1j * ky
    out = []
    for i in range(tensor.rows):
        row = []
        for j in range(tensor.cols):
            total = 0
            for nx in range(n + 1):
                v = tensor.entry(i, j, nx)
                if v != 0:
                    c = math.comb(n, nx) * v
                    total = total + c * ikx ** nx * iky ** (n - nx)
            row.append(total)
        out.append(row)
    return out


def tensor_distance(a, b):
    """Maximum absolute entry difference, exact. Raises on shape mismatch."""
    if (a.order, a.rows, a.cols) != (b.order, b.rows, b.cols):
        raise ValueError("tensor shape mismatch")
    return max(abs(a.entries[k] - b.entries[k]) for k in a.entries)


# ---------------------------------------------------------------------------
# exact rotations

class Rotation:
    """Point (c, s) on the unit circle with c^2 + s^2 = 1 exactly."""

    __slots__ = ("c", "s")

    def __init__(self, c, s):
        c = Fraction(c)
        s = Fraction(s)
        if c * c + s * s != 1:
            raise ValueError(f"({c}, {s}) is not on the unit circle")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    @classmethod
    def identity(cls):
        return cls(1, 0)

    @classmethod
    def quarter_turn(cls):
        return cls(0, 1)

    def compose(self, other):
        """Angle addition: self after other."""
        return Rotation(self.c * other.c - self.s * other.s,
                        self.s * other.c + self.c * other.s)

    def inverse(self):
        return Rotation(self.c, -self.s)

    def spatial_matrix(self):
        return ((self.c, -self.s), (self.s, self.c))

    def conserved_matrix(self):
        """The 3x3 block matrix acting on (rho, qx, qy): 1 (+) r."""
        return ((_ONE, _ZERO, _ZERO),
                (_ZERO, self.c, -self.s),
                (_ZERO, self.s, self.c))

    def conserved_matrix_inv(self):
        return ((_ONE, _ZERO, _ZERO),
                (_ZERO, self.c, self.s),
                (_ZERO, -self.s, self.c))

    def __eq__(self, other):
        if not isinstance(other, Rotation):
            return NotImplemented
        return self.c == other.c and self.s == other.s

    def __hash__(self):
        return hash((self.c, self.s))

    def __repr__(self):
        return f"Rotation({format_rational(self.c)}, {format_rational(self.s)})"
