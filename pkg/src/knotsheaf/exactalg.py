"""Exact dense linear algebra over the rationals and prime fields.

Scalars are :class:`fractions.Fraction` over ``QQ`` and :class:`Mod` residues
over ``GF(p)``.  A :class:`Matrix` is immutable and carries its field; mixing
fields raises :class:`~knotsheaf.errors.FieldMismatchError`.

Vectors are plain tuples of scalars.  Elimination always picks the leftmost
pivot column and, within it, the topmost usable row, so bases returned here
are canonical.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .errors import DimensionError, FieldMismatchError

MAX_PRIME = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Mod:
    """A residue modulo a prime ``p``, stored in ``[0, p)``."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other) -> int:
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldMismatchError(f"GF({self.p}) vs GF({other.p})")
            return other.value
        if isinstance(other, int):
            return other
        raise FieldMismatchError(f"cannot combine GF({self.p}) with {type(other).__name__}")

    def __add__(self, other):
        return Mod(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Mod(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Mod(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Mod(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.value, self.p)

    def inverse(self) -> "Mod":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return Mod(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * Mod(self._coerce(other), self.p).inverse()

    def __rtruediv__(self, other):
        return Mod(self._coerce(other), self.p) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return Mod(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Mod({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


Scalar = Union[Fraction, Mod]


class Field:
    """Common interface of :data:`QQ` and :func:`GF` fields."""

    name: str
    order: int | None

    def __call__(self, x) -> Scalar:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def parse(self, text: str) -> Scalar:
        text = str(text).strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return self(int(num)) / self(int(den))
        return self(int(text))

    def format(self, x: Scalar) -> str:
        return str(self(x))

    def random(self, rng: random.Random, *, nonzero: bool = False) -> Scalar:  # pragma: no cover
        raise NotImplementedError


class RationalField(Field):
    name = "Q"
    order = None

    def __call__(self, x) -> Fraction:
        if isinstance(x, Mod):
            raise FieldMismatchError("cannot coerce a residue into Q")
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)

    def random(self, rng: random.Random, *, nonzero: bool = False) -> Fraction:
        while True:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            if x or not nonzero:
                return x

    def contains(self, x) -> bool:
        return isinstance(x, (Fraction, int)) and not isinstance(x, bool)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField(Field):
    def __init__(self, p: int):
        if not (isinstance(p, int) and is_prime(p)):
            raise ValueError(f"{p!r} is not a prime")
        if p >= MAX_PRIME:
            raise ValueError(f"prime {p} exceeds the supported bound 2^31")
        self.p = p
        self.order = p
        self.name = f"GF({p})"

    def __call__(self, x) -> Mod:
        if isinstance(x, Mod):
            if x.p != self.p:
                raise FieldMismatchError(f"GF({x.p}) element given to GF({self.p})")
            return x
        if isinstance(x, Fraction):
            return Mod(x.numerator, self.p) / Mod(x.denominator, self.p)
        if isinstance(x, str):
            return self.parse(x)
        return Mod(int(x), self.p)

    def elements(self) -> list[Mod]:
        return [Mod(v, self.p) for v in range(self.p)]

    def units(self) -> list[Mod]:
        return [Mod(v, self.p) for v in range(1, self.p)]

    def random(self, rng: random.Random, *, nonzero: bool = False) -> Mod:
        lo = 1 if nonzero else 0
        return Mod(rng.randrange(lo, self.p), self.p)

    def contains(self, x) -> bool:
        return isinstance(x, Mod) and x.p == self.p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_of(x) -> Field:
    if isinstance(x, Mod):
        return GF(x.p)
    if isinstance(x, (Fraction, int)):
        return QQ
    raise FieldMismatchError(f"{x!r} is not a field element")


def field_to_json(field: Field) -> dict:
    if isinstance(field, PrimeField):
        return {"field": "Fp", "p": field.p}
    return {"field": "Q"}


def field_from_json(doc: dict) -> Field:
    kind = doc.get("field")
    if kind == "Q":
        return QQ
    if kind == "Fp":
        return GF(int(doc["p"]))
    raise ValueError(f"unknown field tag {kind!r}")


class Matrix:
    """Immutable dense matrix over a single field."""

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, field: Field, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(field(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise DimensionError("column count required for a matrix with no rows")
            ncols = len(data[0])
        for row in data:
            if len(row) != ncols:
                raise DimensionError("ragged matrix rows")
        self.field = field
        self.nrows = len(data)
        self.ncols = ncols
        self._rows = data

    @classmethod
    def _raw(cls, field: Field, rows: tuple, ncols: int) -> "Matrix":
        m = object.__new__(cls)
        m.field = field
        m.nrows = len(rows)
        m.ncols = ncols
        m._rows = rows
        return m

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one, zero = field.one, field.zero
        return cls._raw(field, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        zero = field.zero
        return cls._raw(field, tuple((zero,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        cols = [tuple(field(x) for x in c) for c in columns]
        for c in cols:
            if len(c) != nrows:
                raise DimensionError("column length mismatch")
        return cls._raw(field, tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @classmethod
    def diagonal(cls, field: Field, entries: Sequence) -> "Matrix":
        n = len(entries)
        zero = field.zero
        return cls._raw(
            field, tuple(tuple(field(entries[i]) if i == j else zero for j in range(n)) for i in range(n)), n
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self._rows[i][j]

    def _check_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.field, self.shape, self._rows))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} + {other.shape}")
        return Matrix._raw(
            self.field, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} - {other.shape}")
        return Matrix._raw(
            self.field, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.field, tuple(tuple(-a for a in r) for r in self._rows), self.ncols)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix._raw(self.field, tuple(tuple(c * a for a in r) for r in self._rows), self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.ncols != other.nrows:
            raise DimensionError(f"{self.shape} @ {other.shape}")
        zero = self.field.zero
        cols = other.columns()
        out = []
        for r in self._rows:
            out_row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(tuple(out_row))
        return Matrix._raw(self.field, tuple(out), other.ncols)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape} matrix")
        zero = self.field.zero
        out = []
        for r in self._rows:
            acc = zero
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.field, tuple(self.columns()), self.nrows)

    def trace(self) -> Scalar:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        acc = self.field.zero
        for i in range(self.nrows):
            acc = acc + self._rows[i][i]
        return acc

    def is_zero(self) -> bool:
        return not any(a for r in self._rows for a in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw(self.field, tuple(tuple(self._rows[i][j] for j in cols) for i in rows), len(cols))

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.nrows != other.nrows:
            raise DimensionError("hstack row mismatch")
        return Matrix._raw(
            self.field, tuple(r + s for r, s in zip(self._rows, other._rows)), self.ncols + other.ncols
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.ncols != other.ncols:
            raise DimensionError("vstack column mismatch")
        return Matrix._raw(self.field, self._rows + other._rows, self.ncols)

    def block_diag(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        zero = self.field.zero
        top = tuple(r + (zero,) * other.ncols for r in self._rows)
        bottom = tuple((zero,) * self.ncols + r for r in other._rows)
        return Matrix._raw(self.field, top + bottom, self.ncols + other.ncols)

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self._rows)
        return f"Matrix({self.field!r}, {self.nrows}x{self.ncols}, [{body}])"

    def tolist(self) -> list[list]:
        return [list(r) for r in self._rows]


def rref(A: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns of ``A``."""
    rows = [list(r) for r in A.rows()]
    pivots: list[int] = []
    r = 0
    for c in range(A.ncols):
        if r >= len(rows):
            break
        found = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if found is None:
            continue
        rows[r], rows[found] = rows[found], rows[r]
        inv = A.field.one / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1])


def kernel_basis(A: Matrix) -> list[tuple]:
    """Basis of ``{x : A x = 0}`` read off the reduced echelon form.

    One vector per free column, with a 1 in that column.
    """
    rows, pivots = rref(A)
    field = A.field
    free = [c for c in range(A.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * A.ncols
        v[f] = field.one
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def solve(A: Matrix, b: Sequence) -> tuple | None:
    """One solution of ``A x = b`` (free variables set to zero), or ``None``."""
    if len(b) != A.nrows:
        raise DimensionError(f"right-hand side of length {len(b)} for {A.shape} matrix")
    aug = A.hstack(Matrix.from_columns(A.field, [b], A.nrows))
    rows, pivots = rref(aug)
    if A.ncols in pivots:
        return None
    x = [A.field.zero] * A.ncols
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][A.ncols]
    return tuple(x)


def solve_matrix(A: Matrix, B: Matrix) -> Matrix | None:
    """A matrix ``X`` with ``A X = B``, or ``None`` if some column is unsolvable."""
    if A.nrows != B.nrows:
        raise DimensionError(f"{A.shape} vs right-hand side {B.shape}")
    cols = []
    for c in B.columns():
        x = solve(A, c)
        if x is None:
            return None
        cols.append(x)
    return Matrix.from_columns(A.field, cols, A.ncols)


def inverse(A: Matrix) -> Matrix:
    if not A.is_square:
        raise DimensionError("inverse of a non-square matrix")
    n = A.nrows
    rows, pivots = rref(A.hstack(Matrix.identity(A.field, n)))
    if n and pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return Matrix._raw(A.field, tuple(tuple(r[n:]) for r in rows), n)


def is_invertible(A: Matrix) -> bool:
    return A.is_square and rank(A) == A.nrows


def det(A: Matrix) -> Scalar:
    if not A.is_square:
        raise DimensionError("determinant of a non-square matrix")
    rows = [list(r) for r in A.rows()]
    n = len(rows)
    d = A.field.one
    for c in range(n):
        found = next((i for i in range(c, n) if rows[i][c]), None)
        if found is None:
            return A.field.zero
        if found != c:
            rows[c], rows[found] = rows[found], rows[c]
            d = -d
        d = d * rows[c][c]
        inv = A.field.one / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return d


def column_basis_indices(A: Matrix, order: Sequence[int] | None = None) -> list[int]:
    """Greedy choice of linearly independent columns, scanned in ``order``."""
    order = list(range(A.ncols)) if order is None else list(order)
    chosen: list[int] = []
    current = 0
    for j in order:
        trial = chosen + [j]
        r = rank(A.submatrix(range(A.nrows), trial))
        if r > current:
            chosen = trial
            current = r
    return chosen


def span_basis(vectors: Sequence[Sequence], field: Field, dim: int) -> list[tuple]:
    """Reduced row-echelon basis of the span of ``vectors`` (each of length ``dim``)."""
    if not vectors:
        return []
    rows, pivots = rref(Matrix(field, vectors, dim))
    return [tuple(rows[i]) for i in range(len(pivots))]


def in_span(basis: Sequence[Sequence], v: Sequence, field: Field, dim: int) -> bool:
    if not basis:
        return not any(v)
    return solve(Matrix.from_columns(field, basis, dim), v) is not None


def fixed_subspace(A: Matrix) -> list[tuple]:
    """Basis of ``ker(A - Id)``."""
    if not A.is_square:
        raise DimensionError("fixed subspace of a non-square matrix")
    return kernel_basis(A - Matrix.identity(A.field, A.nrows))


def rank_one_update(t: int, col: Sequence, field: Field) -> Matrix:
    """``Id_N - col * e_t^T`` with a 0-based column index ``t``."""
    n = len(col)
    if not 0 <= t < n:
        raise IndexError(f"index {t} out of range for length {n}")
    one, zero = field.one, field.zero
    col = [field(c) for c in col]
    return Matrix._raw(
        field,
        tuple(
            tuple(((one if i == j else zero) - (col[i] if j == t else zero)) for j in range(n)) for i in range(n)
        ),
        n,
    )


def extend_to_basis(vectors: Sequence[Sequence], field: Field, dim: int) -> list[tuple]:
    """Append standard basis vectors to an independent list until it spans ``field^dim``."""
    out = [tuple(field(x) for x in v) for v in vectors]
    current = len(span_basis(out, field, dim)) if out else 0
    if current != len(out):
        raise ValueError("input vectors are linearly dependent")
    for i in range(dim):
        if len(out) == dim:
            break
        e = tuple(field.one if k == i else field.zero for k in range(dim))
        if not in_span(out, e, field, dim):
            out.append(e)
    return out


def _combine(basis: Sequence[Sequence[Matrix]], coeffs: Sequence, field: Field) -> list[Matrix]:
    blocks = []
    for b in range(len(basis[0])):
        acc = Matrix.zeros(field, basis[0][b].nrows, basis[0][b].ncols)
        for c, elem in zip(coeffs, basis):
            if c:
                acc = acc + elem[b].scale(c)
        blocks.append(acc)
    return blocks


def search_invertible(
    basis: Sequence[Sequence[Matrix]],
    shapes: Sequence[int],
    field: Field,
    *,
    budget: int = 4096,
    samples: int = 64,
    rng: random.Random | None = None,
) -> tuple[list[Matrix] | None, bool]:
    """Look for an element of a linear space of block tuples whose blocks are all invertible.

    ``basis`` spans the space; ``shapes`` gives the (square) size of each block.
    Returns ``(element, exact)``: ``element`` is a witness or ``None``; ``exact``
    says whether a ``None`` answer is a proof of absence.

    Exactness comes from full enumeration when the space is small, or from a
    grid of ``deg + 1`` distinct values per coordinate, on which a nonzero
    determinant polynomial of total degree ``deg`` cannot vanish identically.
    """
    if not basis:
        if all(n == 0 for n in shapes):
            return [Matrix.zeros(field, 0, 0) for _ in shapes], True
        return None, True

    def good(blocks: list[Matrix]) -> bool:
        return all(is_invertible(b) for b in blocks)

    d = len(basis)
    deg = sum(shapes)
    grid: list | None = None
    if field.is_finite and field.order**d <= budget:
        grid = field.elements()
    elif (field.order is None or field.order > deg) and (deg + 1) ** d <= budget:
        grid = [field(i) for i in range(deg + 1)]
    if grid is not None:
        for coeffs in itertools.product(grid, repeat=d):
            blocks = _combine(basis, coeffs, field)
            if good(blocks):
                return blocks, True
        return None, True

    rng = rng or random.Random(0)
    for _ in range(samples):
        coeffs = [field.random(rng) for _ in range(d)]
        blocks = _combine(basis, coeffs, field)
        if good(blocks):
            return blocks, False
    return None, False


def iter_gl(field: PrimeField, n: int) -> Iterator[Matrix]:
    """All invertible ``n x n`` matrices over a prime field (desk-scale only)."""
    elems = field.elements()
    for entries in itertools.product(elems, repeat=n * n):
        m = Matrix._raw(field, tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n)), n)
        if is_invertible(m):
            yield m


def random_invertible(field: Field, n: int, rng: random.Random) -> Matrix:
    while True:
        m = Matrix(field, [[field.random(rng) for _ in range(n)] for _ in range(n)], n)
        if is_invertible(m):
            return m


def matrix_to_json(A: Matrix) -> dict:
    doc = field_to_json(A.field)
    doc.update(
        {
            "rows": A.nrows,
            "cols": A.ncols,
            "entries": [[A.field.format(x) for x in r] for r in A.rows()],
        }
    )
    return doc


def matrix_from_json(doc: dict) -> Matrix:
    field = field_from_json(doc)
    rows = [[field.parse(x) for x in r] for r in doc.get("entries", [])]
    m = Matrix(field, rows, int(doc["cols"]))
    if m.nrows != int(doc["rows"]):
        raise DimensionError(f"declared {doc['rows']} rows, found {m.nrows}")
    return m


def matrix_equation_kernel(
    field: Field,
    unknowns: Sequence[tuple[int, int]],
    equations: Sequence[Sequence[tuple[Matrix, int, Matrix]]],
) -> list[list[Matrix]]:
    """Basis of solutions of a homogeneous system of linear matrix equations.

    ``unknowns`` lists the shapes of the unknown blocks ``U_k``.  Each equation
    is a list of terms ``(L, k, R)`` and states ``sum L @ U_k @ R = 0``.
    Returns one list of blocks per basis vector.
    """
    offsets = []
    total = 0
    for r, c in unknowns:
        offsets.append(total)
        total += r * c
    zero = field.zero
    rows: list[list] = []
    for terms in equations:
        if not terms:
            continue
        L0, _, R0 = terms[0]
        out_r, out_c = L0.nrows, R0.ncols
        block = [[zero] * total for _ in range(out_r * out_c)]
        for L, k, R in terms:
            ur, uc = unknowns[k]
            if L.ncols != ur or R.nrows != uc or L.nrows != out_r or R.ncols != out_c:
                raise DimensionError("inconsistent term shapes in matrix equation")
            base = offsets[k]
            for i in range(out_r):
                for j in range(out_c):
                    row = block[i * out_c + j]
                    for a in range(ur):
                        la = L[i, a]
                        if not la:
                            continue
                        for b in range(uc):
                            rb = R[b, j]
                            if rb:
                                row[base + a * uc + b] = row[base + a * uc + b] + la * rb
        rows.extend(block)
    if total == 0:
        return []
    if not rows:
        vectors = [tuple(field.one if k == i else zero for k in range(total)) for i in range(total)]
    else:
        vectors = kernel_basis(Matrix(field, rows, total))
    out = []
    for v in vectors:
        blocks = []
        for (r, c), off in zip(unknowns, offsets):
            blocks.append(Matrix._raw(field, tuple(tuple(v[off + a * c + b] for b in range(c)) for a in range(r)), c))
        out.append(blocks)
    return out
