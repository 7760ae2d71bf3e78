"""Exact integer linear algebra: Smith normal form and lattice solvers.

All arithmetic is on arbitrary-precision Python ints.  Smith normal form
intermediates can grow far past any fixed width, so nothing here may be
replaced by fixed-width (numpy) arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @staticmethod
    def from_rows(rows: list[list[int]] | tuple, cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        ncols = len(data[0]) if data else (cols if cols is not None else 0)
        return IntMatrix(len(data), ncols, data)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def column(values: list[int] | tuple) -> "IntMatrix":
        return IntMatrix(len(values), 1, tuple((int(v),) for v in values))

    def __getitem__(self, pos: tuple[int, int]) -> int:
        return self.entries[pos[0]][pos[1]]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list["IntMatrix"]:
        return [IntMatrix.column(self.col(j)) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = other.entries
        out = []
        for i in range(self.rows):
            srow = self.entries[i]
            out.append(tuple(
                sum(srow[k] * ot[k][j] for k in range(self.cols))
                for j in range(other.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        return self.mul(other)

    def add(self, other: "IntMatrix") -> "IntMatrix":
        self._require_same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def sub(self, other: "IntMatrix") -> "IntMatrix":
        self._require_same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def neg(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-x for x in row) for row in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(c * x for x in row) for row in self.entries))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(
            tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("hstack row mismatch")
        return IntMatrix(self.rows, self.cols + other.cols, tuple(
            ra + rb for ra, rb in zip(self.entries, other.entries)))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("vstack column mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def take_rows(self, lo: int, hi: int) -> "IntMatrix":
        return IntMatrix(hi - lo, self.cols, self.entries[lo:hi])

    def take_cols(self, indices: list[int]) -> "IntMatrix":
        return IntMatrix(self.rows, len(indices), tuple(
            tuple(row[j] for j in indices) for row in self.entries))

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))

    def _require_same_shape(self, other: "IntMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.entries]!r})"


@dataclass(frozen=True)
class SnfResult:
    """U @ A @ V == S with U, V unimodular and S diagonal, d1 | d2 | ..."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return self.S.diagonal()


@dataclass(frozen=True)
class InvariantFactors:
    """Nontrivial invariant factors of a finitely generated abelian group.

    Nonzero factors are > 1 and each divides the next; trailing zeros encode
    free summands.
    """

    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        seen_zero = False
        prev = None
        for d in self.factors:
            if d < 0 or d == 1:
                raise ValueError("factors must be 0 or > 1")
            if d == 0:
                seen_zero = True
            else:
                if seen_zero:
                    raise ValueError("zeros must trail")
                if prev is not None and d % prev != 0:
                    raise ValueError("divisibility chain violated")
                prev = d

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.factors if d == 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d != 0)

    def is_trivial(self) -> bool:
        return not self.factors

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        """Group order; only meaningful when finite."""
        n = 1
        for d in self.torsion:
            n *= d
        return n


def _find_pivot(s: list[list[int]], t: int, rows: int, cols: int) -> tuple[int, int] | None:
    """Smallest-nonzero-absolute-value entry of the trailing submatrix.

    Row-major scan breaks ties deterministically so certificates are
    reproducible across runs.
    """
    best = None
    best_val = None
    for i in range(t, rows):
        for j in range(t, cols):
            v = abs(s[i][j])
            if v and (best_val is None or v < best_val):
                best, best_val = (i, j), v
                if v == 1:
                    return best
    return best


@lru_cache(maxsize=None)
def smith_normal_form(a: IntMatrix) -> SnfResult:
    rows, cols = a.rows, a.cols
    s = [list(r) for r in a.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i, k):
        s[i], s[k] = s[k], s[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in s:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def add_row(i, k, c):
        # row i += c * row k
        s[i] = [x + c * y for x, y in zip(s[i], s[k])]
        u[i] = [x + c * y for x, y in zip(u[i], u[k])]

    def add_col(j, k, c):
        # col j += c * col k
        for r in s:
            r[j] += c * r[k]
        for r in v:
            r[j] += c * r[k]

    t = 0
    while t < min(rows, cols):
        pos = _find_pivot(s, t, rows, cols)
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])
        while True:
            # Clear column t below the pivot; a nonzero remainder becomes the
            # new, strictly smaller pivot.
            restart = False
            for i in range(t + 1, rows):
                if s[i][t]:
                    q = s[i][t] // s[t][t]
                    add_row(i, t, -q)
                    if s[i][t]:
                        swap_rows(t, i)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, cols):
                if s[t][j]:
                    q = s[t][j] // s[t][t]
                    add_col(j, t, -q)
                    if s[t][j]:
                        swap_cols(t, j)
                        restart = True
                        break
            if restart:
                continue
            break
        # Enforce the divisibility chain: if the pivot misses an entry of the
        # trailing block, fold that row in and re-reduce.
        pivot = s[t][t]
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if s[i][j] % pivot:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1

    for i in range(min(rows, cols)):
        if s[i][i] < 0:
            s[i] = [-x for x in s[i]]
            u[i] = [-x for x in u[i]]

    return SnfResult(
        U=IntMatrix.from_rows(u, rows),
        S=IntMatrix.from_rows(s, cols),
        V=IntMatrix.from_rows(v, cols),
    )


def unimodular_inverse(u: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix (Gauss over Fraction)."""
    if u.rows != u.cols:
        raise ValueError("not square")
    n = u.rows
    a = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(u.entries)]
    for c in range(n):
        p = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    out = []
    for i in range(n):
        row = []
        for j in range(n, 2 * n):
            q = a[i][j]
            if q.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(q))
        out.append(row)
    return IntMatrix.from_rows(out, n)


def invariant_factors(relations: IntMatrix) -> InvariantFactors:
    """Invariant factors of Z^n / (column lattice of `relations`)."""
    n = relations.rows
    diag = smith_normal_form(relations).diagonal
    positive = [d for d in diag if d > 1]
    free = n - sum(1 for d in diag if d > 0)
    return InvariantFactors(tuple(positive) + (0,) * free)


def solve_matrix_equation(a: IntMatrix, b: IntMatrix,
                          relations_dst: IntMatrix) -> IntMatrix | None:
    """Some X with A·X ≡ B modulo the column lattice of relations_dst, or None.

    Decided exactly by SNF of [A | relations_dst]; the returned particular
    solution is deterministic.
    """
    if a.rows != b.rows:
        raise ValueError("A and B row counts differ")
    if relations_dst.rows != a.rows:
        raise ValueError("relation matrix lives in the wrong ambient group")
    m = a.hstack(relations_dst)
    snf = smith_normal_form(m)
    w = snf.U.mul(b)
    diag = snf.diagonal
    t_rows = []
    for i in range(m.cols):
        row = []
        d = diag[i] if i < len(diag) else 0
        for j in range(b.cols):
            wij = w[i, j] if i < m.rows else 0
            if d:
                if wij % d:
                    return None
                row.append(wij // d)
            else:
                if wij:
                    return None
                row.append(0)
        t_rows.append(row)
    for i in range(m.cols, m.rows):
        if any(w[i, j] for j in range(b.cols)):
            return None
    z = snf.V.mul(IntMatrix.from_rows(t_rows, b.cols))
    return z.take_rows(0, a.cols)


def kernel_generators(a: IntMatrix, relations_dst: IntMatrix) -> IntMatrix:
    """Columns generating { x : A·x lies in the column lattice of relations_dst }."""
    if relations_dst.rows != a.rows:
        raise ValueError("relation matrix lives in the wrong ambient group")
    m = a.hstack(relations_dst)
    snf = smith_normal_form(m)
    diag = snf.diagonal
    free_cols = [i for i in range(m.cols) if i >= len(diag) or diag[i] == 0]
    gens = snf.V.take_cols(free_cols).take_rows(0, a.cols)
    # Relation columns of the destination lift to kernel elements only through
    # the stacked system; the projection above already accounts for them.
    keep = [j for j in range(gens.cols) if any(gens[i, j] for i in range(gens.rows))]
    if not keep:
        return IntMatrix.zeros(a.cols, 0)
    return gens.take_cols(keep)


def lattice_contains(gens_a: IntMatrix, gens_b: IntMatrix,
                     relations: IntMatrix) -> bool:
    """Is every column of gens_a in the lattice spanned by gens_b plus relations?"""
    if gens_a.rows != gens_b.rows or gens_a.rows != relations.rows:
        raise ValueError("ambient row counts differ")
    if gens_a.cols == 0:
        return True
    return solve_matrix_equation(gens_b, gens_a, relations) is not None


def lattices_equal(gens_a: IntMatrix, gens_b: IntMatrix, relations: IntMatrix) -> bool:
    return (lattice_contains(gens_a, gens_b, relations)
            and lattice_contains(gens_b, gens_a, relations))


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product a ⊗ b."""
    rows = []
    for i in range(a.rows):
        for k in range(b.rows):
            rows.append(tuple(a.entries[i][j] * b.entries[k][l]
                              for j in range(a.cols) for l in range(b.cols)))
    return IntMatrix(a.rows * b.rows, a.cols * b.cols, tuple(rows))


def vec(a: IntMatrix) -> IntMatrix:
    """Column-major vectorization, so vec(L·X·R) = (Rᵀ ⊗ L)·vec(X)."""
    vals = [a.entries[i][j] for j in range(a.cols) for i in range(a.rows)]
    return IntMatrix.column(vals)


def unvec(v: IntMatrix, rows: int, cols: int) -> IntMatrix:
    if v.cols != 1 or v.rows != rows * cols:
        raise ValueError("bad vec shape")
    return IntMatrix(rows, cols, tuple(
        tuple(v[i + j * rows, 0] for j in range(cols)) for i in range(rows)))


class MatrixEquationSystem:
    """Simultaneous matrix equations  Σᵢ Lᵢ·X_{nameᵢ}·Rᵢ = T  over Z.

    Each unknown is a named integer matrix.  Used to decide factorization and
    well-definedness questions for presented abelian groups in one exact SNF
    solve; congruences modulo a relation lattice are expressed by adding a
    slack unknown multiplied by the relation matrix.
    """

    def __init__(self) -> None:
        self._shapes: dict[str, tuple[int, int]] = {}
        self._order: list[str] = []
        self._equations: list[tuple[list[tuple[IntMatrix, str, IntMatrix]], IntMatrix]] = []

    def add_unknown(self, name: str, rows: int, cols: int) -> str:
        if name in self._shapes:
            raise ValueError(f"duplicate unknown {name!r}")
        self._shapes[name] = (rows, cols)
        self._order.append(name)
        return name

    def add_equation(self, terms: list[tuple[IntMatrix, str, IntMatrix]],
                     target: IntMatrix) -> None:
        for left, name, right in terms:
            r, c = self._shapes[name]
            if left.cols != r or right.rows != c:
                raise ValueError(f"term shape mismatch for unknown {name!r}")
            if left.rows != target.rows or right.cols != target.cols:
                raise ValueError("term does not match target shape")
        self._equations.append((terms, target))

    def _assemble(self) -> tuple[IntMatrix, IntMatrix, dict[str, tuple[int, int]]]:
        offsets = {}
        pos = 0
        for name in self._order:
            r, c = self._shapes[name]
            offsets[name] = (pos, r * c)
            pos = pos + r * c
        total_cols = pos
        blocks = []
        targets = []
        for terms, target in self._equations:
            eq_rows = target.rows * target.cols
            block = [[0] * total_cols for _ in range(eq_rows)]
            for left, name, right in terms:
                coeff = kron(right.transpose(), left)
                off, _width = offsets[name]
                for i in range(eq_rows):
                    row = block[i]
                    crow = coeff.entries[i]
                    for j in range(coeff.cols):
                        row[off + j] += crow[j]
            blocks.extend(tuple(r) for r in block)
            targets.extend(vec(target).col(0))
        m = IntMatrix(len(blocks), total_cols, tuple(blocks))
        t = IntMatrix.column(targets)
        return m, t, offsets

    def solve(self) -> dict[str, IntMatrix] | None:
        m, t, offsets = self._assemble()
        z = solve_matrix_equation(m, t, IntMatrix.zeros(m.rows, 0))
        if z is None:
            return None
        return self._split(z, offsets)

    def solve_with_kernel(self) -> tuple[dict[str, IntMatrix], list[dict[str, IntMatrix]]] | None:
        m, t, offsets = self._assemble()
        z = solve_matrix_equation(m, t, IntMatrix.zeros(m.rows, 0))
        if z is None:
            return None
        basis = kernel_generators(m, IntMatrix.zeros(m.rows, 0))
        kernel = [self._split(basis.take_cols([j]), offsets) for j in range(basis.cols)]
        return self._split(z, offsets), kernel

    def _split(self, z: IntMatrix, offsets: dict[str, tuple[int, int]]) -> dict[str, IntMatrix]:
        out = {}
        for name in self._order:
            off, width = offsets[name]
            r, c = self._shapes[name]
            out[name] = unvec(z.take_rows(off, off + width), r, c)
        return out
