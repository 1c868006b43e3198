"""Scalars over Q(zeta_m) and deterministic exact linear algebra.

Everything downstream rests on three types:

* ``Scalar`` -- an element of Q(zeta_m), exact and canonical,
* ``MatrixS`` -- a dense row-major matrix of scalars,
* ``Subspace`` -- a subspace of k^n held in reduced row echelon form,
  so that equal subspaces have identical bases entry for entry.

The subspace operations (sum, intersection, kernel, image, membership) are
pure functions of their inputs and always return canonical objects.  Two
independent intersection algorithms are provided (Zassenhaus blocks and the
kernel of the concatenated coordinate map); tests cross-check them.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .cyclo import get_field


class DimensionMismatch(ValueError):
    """Raised when operands live in incompatible ambient spaces."""


def _coerce_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class Scalar:
    """An element of the cyclotomic field Q(zeta_m) in reduced form.

    ``conductor`` is m and ``coeffs`` the coefficient vector of length
    phi(m) on the basis 1, zeta, ..., zeta^(phi(m)-1), reduced modulo the
    m-th cyclotomic polynomial.
    """

    __slots__ = ("field", "raw")

    def __init__(self, field, raw):
        self.field = field
        self.raw = raw

    # -- constructors -------------------------------------------------

    @staticmethod
    def rational(value, conductor: int = 1) -> "Scalar":
        field = get_field(conductor)
        return Scalar(field, field.from_fraction(_coerce_fraction(value)))

    @staticmethod
    def zero(conductor: int = 1) -> "Scalar":
        field = get_field(conductor)
        return Scalar(field, field.zero)

    @staticmethod
    def one(conductor: int = 1) -> "Scalar":
        field = get_field(conductor)
        return Scalar(field, field.one)

    @staticmethod
    def zeta(conductor: int, power: int = 1) -> "Scalar":
        field = get_field(conductor)
        return Scalar(field, field.zeta_power(power))

    @staticmethod
    def from_coeffs(coeffs: Sequence, conductor: int) -> "Scalar":
        field = get_field(conductor)
        return Scalar(field, field.from_coeffs([_coerce_fraction(c) for c in coeffs]))

    # -- properties ----------------------------------------------------

    @property
    def conductor(self) -> int:
        return self.field.conductor

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self.field.to_coeffs(self.raw)

    def is_zero(self) -> bool:
        return self.field.is_zero(self.raw)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------

    def _coerced(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field is self.field:
                return other
            if other.conductor == 1:
                return Scalar(self.field, self.field.from_fraction(other.coeffs[0]))
            if self.conductor == 1:
                raise DimensionMismatch("cannot mix conductors implicitly")
            raise DimensionMismatch(
                f"conductor mismatch: {self.conductor} vs {other.conductor}"
            )
        return Scalar(self.field, self.field.from_fraction(_coerce_fraction(other)))

    def __add__(self, other):
        other = self._coerced(other)
        return Scalar(self.field, self.field.add(self.raw, other.raw))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerced(other)
        return Scalar(self.field, self.field.sub(self.raw, other.raw))

    def __rsub__(self, other):
        return self._coerced(other).__sub__(self)

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.raw))

    def __mul__(self, other):
        other = self._coerced(other)
        return Scalar(self.field, self.field.mul(self.raw, other.raw))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerced(other)
        return Scalar(self.field, self.field.div(self.raw, other.raw))

    def __rtruediv__(self, other):
        return self._coerced(other).__truediv__(self)

    def __pow__(self, n: int):
        if n < 0:
            return Scalar(self.field, self.field.inv(self.raw)) ** (-n)
        out = Scalar.one(self.conductor)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.raw))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str)):
            try:
                other = self._coerced(other)
            except (TypeError, ValueError):
                return NotImplemented
        if not isinstance(other, Scalar):
            return NotImplemented
        if other.conductor != self.conductor:
            if other.is_rational() and self.is_rational():
                return other.coeffs[0] == self.coeffs[0]
            return False
        return self.raw == other.raw

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.conductor, self.coeffs))

    def __repr__(self):
        return f"Scalar({self}, m={self.conductor})"

    def __str__(self):
        return format_scalar(self)


# -- scalar literal syntax ---------------------------------------------

_TOKEN = re.compile(r"\s*(zeta|\^|\*|\+|-|/|\d+)")


def parse_scalar(text: str, conductor: int) -> Scalar:
    """Parse literals like ``"3/2"`` or ``"zeta^2 - 1/3"``.

    The grammar is a signed sum of terms ``coeff``, ``coeff*zeta^k``, or
    ``zeta^k``; ``zeta`` denotes the canonical primitive m-th root.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"bad scalar literal {text!r} at position {pos}")
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise ValueError("empty scalar literal")

    result = Scalar.zero(conductor)
    i = 0
    sign = 1
    first = True
    while i < len(tokens):
        tok = tokens[i]
        if tok in "+-":
            sign = 1 if tok == "+" else -1
            i += 1
            if i >= len(tokens):
                raise ValueError(f"dangling sign in {text!r}")
        elif not first:
            raise ValueError(f"expected '+' or '-' in {text!r}")
        coeff = Fraction(1)
        have_coeff = False
        if i < len(tokens) and tokens[i].isdigit():
            num = int(tokens[i])
            i += 1
            if i < len(tokens) and tokens[i] == "/":
                i += 1
                if i >= len(tokens) or not tokens[i].isdigit():
                    raise ValueError(f"bad fraction in {text!r}")
                coeff = Fraction(num, int(tokens[i]))
                i += 1
            else:
                coeff = Fraction(num)
            have_coeff = True
        if i < len(tokens) and tokens[i] == "*":
            i += 1
            if i >= len(tokens) or tokens[i] != "zeta":
                raise ValueError(f"expected zeta after '*' in {text!r}")
        if i < len(tokens) and tokens[i] == "zeta":
            if conductor == 1:
                raise ValueError("zeta literals need a conductor greater than 1")
            i += 1
            power = 1
            if i < len(tokens) and tokens[i] == "^":
                i += 1
                if i >= len(tokens) or not tokens[i].isdigit():
                    raise ValueError(f"bad zeta power in {text!r}")
                power = int(tokens[i])
                i += 1
            term = Scalar.zeta(conductor, power) * Scalar.rational(coeff, conductor)
        elif have_coeff:
            term = Scalar.rational(coeff, conductor)
        else:
            raise ValueError(f"expected a term in {text!r}")
        result = result + term * sign
        sign = 1
        first = False
    return result


def format_scalar(s: Scalar) -> str:
    """Canonical literal form; ``parse_scalar(format_scalar(s), m) == s``."""
    coeffs = s.coeffs
    parts: list[str] = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if k == 0:
            body = str(mag)
        else:
            zeta = "zeta" if k == 1 else f"zeta^{k}"
            body = zeta if mag == 1 else f"{mag}*{zeta}"
        parts.append((sign, body))
    if not parts:
        return "0"
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# -- matrices ----------------------------------------------------------


class MatrixS:
    """Dense row-major matrix of scalars over a fixed conductor."""

    __slots__ = ("rows", "cols", "entries", "conductor")

    def __init__(self, rows: int, cols: int, entries: Sequence[Scalar], conductor: int | None = None):
        entries = list(entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch("entry count does not match shape")
        if conductor is None:
            conductor = entries[0].conductor if entries else 1
        field = get_field(conductor)
        fixed = []
        for e in entries:
            if not isinstance(e, Scalar):
                e = Scalar.rational(e, conductor)
            elif e.conductor != conductor:
                if e.conductor == 1:
                    e = Scalar(field, field.from_fraction(e.coeffs[0]))
                else:
                    raise DimensionMismatch("mixed conductors in matrix")
            fixed.append(e)
        self.rows = rows
        self.cols = cols
        self.entries = tuple(fixed)
        self.conductor = conductor

    @staticmethod
    def from_rows(rows: Sequence[Sequence], conductor: int = 1) -> "MatrixS":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[Scalar] = []
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
            for x in r:
                flat.append(x if isinstance(x, Scalar) else Scalar.rational(x, conductor))
        return MatrixS(nrows, ncols, flat, conductor)

    @staticmethod
    def identity(n: int, conductor: int = 1) -> "MatrixS":
        one = Scalar.one(conductor)
        zero = Scalar.zero(conductor)
        return MatrixS(n, n, [one if i == j else zero for i in range(n) for j in range(n)], conductor)

    def __getitem__(self, key):
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Scalar]:
        return list(self.entries[i * self.cols : (i + 1) * self.cols])

    def row_list(self) -> list[list[Scalar]]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "MatrixS":
        return MatrixS(
            self.cols,
            self.rows,
            [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
            self.conductor,
        )

    def mul(self, other: "MatrixS") -> "MatrixS":
        if self.cols != other.rows:
            raise DimensionMismatch("matrix product shape mismatch")
        m = max(self.conductor, other.conductor)
        zero = Scalar.zero(m)
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i * self.cols + k]
                    if a.is_zero():
                        continue
                    acc = acc + a * other.entries[k * other.cols + j]
                out.append(acc)
        return MatrixS(self.rows, other.cols, out, m)

    def add(self, other: "MatrixS") -> "MatrixS":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix sum shape mismatch")
        return MatrixS(
            self.rows,
            self.cols,
            [a + b for a, b in zip(self.entries, other.entries)],
            max(self.conductor, other.conductor),
        )

    def scale(self, c: Scalar) -> "MatrixS":
        return MatrixS(self.rows, self.cols, [c * e for e in self.entries], self.conductor)

    def apply(self, vec: Sequence[Scalar]) -> list[Scalar]:
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length mismatch")
        out = []
        for i in range(self.rows):
            acc = Scalar.zero(self.conductor)
            for j, v in enumerate(vec):
                a = self.entries[i * self.cols + j]
                if not a.is_zero():
                    acc = acc + a * v
            out.append(acc)
        return out

    def __eq__(self, other):
        if not isinstance(other, MatrixS):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and all(a == b for a, b in zip(self.entries, other.entries))
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(
            " ".join(str(self[i, j]) for j in range(self.cols)) for i in range(self.rows)
        )
        return f"MatrixS[{self.rows}x{self.cols}: {body}]"


# -- raw row echelon engine ---------------------------------------------


def rref_raw(field, rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of raw-valued rows.  Returns (rows, pivots).

    Deterministic: scans columns left to right, takes the first row with a
    nonzero entry, normalizes the pivot to 1 and clears the column.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        sel = None
        for i in range(rank, len(rows)):
            if not field.is_zero(rows[i][col]):
                sel = i
                break
        if sel is None:
            continue
        rows[rank], rows[sel] = rows[sel], rows[rank]
        piv = rows[rank]
        c = piv[col]
        if not field.is_one(c):
            cinv = field.inv(c)
            for j in range(col, ncols):
                if not field.is_zero(piv[j]):
                    piv[j] = field.mul(cinv, piv[j])
        for i in range(len(rows)):
            if i == rank:
                continue
            factor = rows[i][col]
            if field.is_zero(factor):
                continue
            r = rows[i]
            for j in range(col, ncols):
                if not field.is_zero(piv[j]):
                    r[j] = field.sub(r[j], field.mul(factor, piv[j]))
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows[:rank], pivots


class Subspace:
    """A subspace of k^n held by its canonical RREF basis."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, basis: MatrixS, pivots: tuple[int, ...]):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = tuple(pivots)

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def conductor(self) -> int:
        return self.basis.conductor

    @staticmethod
    def from_vectors(vectors: Sequence[Sequence[Scalar]], ambient_dim: int, conductor: int = 1) -> "Subspace":
        vecs = list(vectors)
        if any(len(v) != ambient_dim for v in vecs):
            raise DimensionMismatch("vector length differs from ambient dimension")
        m = conductor
        for v in vecs:
            for x in v:
                if isinstance(x, Scalar):
                    m = max(m, x.conductor)
        field = get_field(m)

        def raw_of(x):
            if isinstance(x, Scalar):
                if x.conductor == m:
                    return x.raw
                return field.from_fraction(x.as_fraction())
            return field.from_fraction(_coerce_fraction(x))

        raw_rows = [[raw_of(x) for x in v] for v in vecs]
        rows, pivots = rref_raw(field, raw_rows)
        flat = [Scalar(field, x) for r in rows for x in r]
        return Subspace(ambient_dim, MatrixS(len(rows), ambient_dim, flat, m), tuple(pivots))

    @staticmethod
    def zero(ambient_dim: int, conductor: int = 1) -> "Subspace":
        return Subspace(ambient_dim, MatrixS(0, ambient_dim, [], conductor), ())

    @staticmethod
    def full(ambient_dim: int, conductor: int = 1) -> "Subspace":
        return Subspace(
            ambient_dim, MatrixS.identity(ambient_dim, conductor), tuple(range(ambient_dim))
        )

    def basis_rows(self) -> list[list[Scalar]]:
        return self.basis.row_list()

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspace sum needs equal ambient dimensions")
        return Subspace.from_vectors(
            self.basis_rows() + other.basis_rows(),
            self.ambient_dim,
            max(self.conductor, other.conductor),
        )

    def intersect(self, other: "Subspace") -> "Subspace":
        """Intersection via the Zassenhaus block construction."""
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("intersection needs equal ambient dimensions")
        n = self.ambient_dim
        m = max(self.conductor, other.conductor)
        field = get_field(m)
        zero = Scalar.zero(m)
        block: list[list[Scalar]] = []
        for row in self.basis_rows():
            block.append(list(row) + list(row))
        for row in other.basis_rows():
            block.append(list(row) + [zero] * n)
        raw_rows = [[(x.raw if x.conductor == m else field.from_fraction(x.as_fraction())) for x in r] for r in block]
        rows, _ = rref_raw(field, raw_rows)
        inter = []
        for r in rows:
            if all(field.is_zero(x) for x in r[:n]):
                inter.append([Scalar(field, x) for x in r[n:]])
        return Subspace.from_vectors(inter, n, m)

    def intersect_via_kernel(self, other: "Subspace") -> "Subspace":
        """Intersection through the kernel of [basis(self)^T | -basis(other)^T]."""
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("intersection needs equal ambient dimensions")
        m = max(self.conductor, other.conductor)
        a = self.basis_rows()
        b = other.basis_rows()
        if not a or not b:
            return Subspace.zero(self.ambient_dim, m)
        rows = []
        for i in range(self.ambient_dim):
            rows.append([v[i] for v in a] + [-v[i] for v in b])
        combined = MatrixS.from_rows(rows, m)
        ker = kernel(combined)
        vecs = []
        zero = Scalar.zero(m)
        for comb in ker.basis_rows():
            vec = [zero] * self.ambient_dim
            for coeff, row in zip(comb[: len(a)], a):
                if not coeff.is_zero():
                    for j, x in enumerate(row):
                        vec[j] = vec[j] + coeff * x
            vecs.append(vec)
        return Subspace.from_vectors(vecs, self.ambient_dim, m)

    def contains(self, vector: Sequence[Scalar]) -> bool:
        if len(vector) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        m = self.conductor
        field = get_field(m)
        vec = []
        for x in vector:
            if isinstance(x, Scalar):
                vec.append(x.raw if x.conductor == m else field.from_fraction(x.as_fraction()))
            else:
                vec.append(field.from_fraction(_coerce_fraction(x)))
        rows = self.basis.row_list()
        raw_rows = [[x.raw for x in r] for r in rows]
        for row, piv in zip(raw_rows, self.pivots):
            c = vec[piv]
            if not field.is_zero(c):
                for j in range(piv, self.ambient_dim):
                    if not field.is_zero(row[j]):
                        vec[j] = field.sub(vec[j], field.mul(c, row[j]))
        return all(field.is_zero(x) for x in vec)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.basis_rows())

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.pivots, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def rref(matrix: MatrixS) -> Subspace:
    """Row space of a matrix in canonical reduced row echelon form."""
    return Subspace.from_vectors(matrix.row_list(), matrix.cols, matrix.conductor)


def kernel(matrix: MatrixS) -> Subspace:
    """Exact right kernel {x : M x = 0} as a canonical subspace of k^cols."""
    field = get_field(matrix.conductor)
    raw_rows = [[x.raw for x in matrix.row(i)] for i in range(matrix.rows)]
    rows, pivots = rref_raw(field, raw_rows)
    pivot_set = set(pivots)
    free_cols = [j for j in range(matrix.cols) if j not in pivot_set]
    vecs = []
    for fc in free_cols:
        vec = [Scalar.zero(matrix.conductor)] * matrix.cols
        vec[fc] = Scalar.one(matrix.conductor)
        for row, piv in zip(rows, pivots):
            c = row[fc]
            if not field.is_zero(c):
                vec[piv] = Scalar(field, field.neg(c))
        vecs.append(vec)
    return Subspace.from_vectors(vecs, matrix.cols, matrix.conductor)


def image(matrix: MatrixS) -> Subspace:
    """Column space of a matrix as a canonical subspace of k^rows."""
    return rref(matrix.transpose())


def rank(matrix: MatrixS) -> int:
    return rref(matrix).dim
