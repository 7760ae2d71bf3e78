"""Finitely generated abelian groups as presentations, with exact solvers.

A group is Z^n modulo the column lattice of its relation matrix.  Morphisms
are integer matrices on generators, well-defined when they carry source
relations into the target relation lattice; two matrices present the same
morphism when their difference does.  All factorization questions reduce to
one MatrixEquationSystem solve, so answers are exact and witnesses are the
deterministic SNF particular solutions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .zlinalg import (
    IntMatrix,
    InvariantFactors,
    MatrixEquationSystem,
    invariant_factors,
    kernel_generators,
    lattice_contains,
    smith_normal_form,
    solve_matrix_equation,
    unimodular_inverse,
)


@dataclass(frozen=True)
class FgAbObject:
    """Presentation Z^ngens / (column lattice of relations)."""

    relations: IntMatrix

    @property
    def ngens(self) -> int:
        return self.relations.rows

    @cached_property
    def invariants(self) -> InvariantFactors:
        return invariant_factors(self.relations)

    @cached_property
    def _snf(self):
        return smith_normal_form(self.relations)

    @cached_property
    def _u_inverse(self) -> IntMatrix:
        return unimodular_inverse(self._snf.U)

    def is_finite(self) -> bool:
        return self.invariants.is_finite()

    def is_trivial(self) -> bool:
        return self.invariants.is_trivial()

    def order(self) -> int | None:
        return self.invariants.order() if self.is_finite() else None

    def reduce_column(self, col: IntMatrix) -> IntMatrix:
        """Canonical representative of a column modulo the relation lattice."""
        z = self._snf.U.mul(col)
        diag = self._snf.diagonal
        vals = []
        for i in range(self.ngens):
            d = diag[i] if i < len(diag) else 0
            vals.append(z[i, 0] % d if d else z[i, 0])
        return self._u_inverse.mul(IntMatrix.column(vals))

    def elements(self) -> list[IntMatrix]:
        """All elements of a finite group as canonical coordinate columns."""
        if not self.is_finite():
            raise ValueError("group is infinite")
        diag = [d for d in self._snf.diagonal if d != 0]
        diag += [1] * (self.ngens - len(diag))
        out = []
        for residues in product(*[range(d) for d in diag]):
            out.append(self._u_inverse.mul(IntMatrix.column(list(residues))))
        return out

    def torsion_element_columns(self) -> list[IntMatrix]:
        """Representatives of all torsion elements (finite torsion subgroup)."""
        diag = self._snf.diagonal
        ranges = []
        for i in range(self.ngens):
            d = diag[i] if i < len(diag) else 0
            ranges.append(range(d) if d else range(1))
        out = []
        for residues in product(*ranges):
            out.append(self._u_inverse.mul(IntMatrix.column(list(residues))))
        return out

    def __repr__(self) -> str:
        facs = self.invariants.factors
        if not facs:
            return "FgAb(0)"
        return "FgAb(" + " + ".join("Z" if d == 0 else f"Z/{d}" for d in facs) + ")"


def free(n: int) -> FgAbObject:
    return FgAbObject(IntMatrix.zeros(n, 0))


def cyclic(d: int) -> FgAbObject:
    if d == 0:
        return free(1)
    return FgAbObject(IntMatrix.from_rows([[d]]))


def presented(relation_rows: list[list[int]], ngens: int | None = None) -> FgAbObject:
    return FgAbObject(IntMatrix.from_rows(relation_rows, ngens))


ZERO = FgAbObject(IntMatrix.zeros(0, 0))


@dataclass(frozen=True)
class FgAbMorphism:
    """Generator matrix (target gens x source gens), checked well-defined."""

    source: FgAbObject
    target: FgAbObject
    matrix: IntMatrix

    def __post_init__(self) -> None:
        if self.matrix.rows != self.target.ngens or self.matrix.cols != self.source.ngens:
            raise ValueError("matrix shape does not match the presentations")
        if not is_well_defined(self.matrix, self.source, self.target):
            raise ValueError("matrix does not map source relations into the target lattice")

    def canonical(self) -> "FgAbMorphism":
        cols = [self.target.reduce_column(c) for c in self.matrix.columns()]
        if not cols:
            return FgAbMorphism(self.source, self.target, IntMatrix.zeros(self.target.ngens, 0))
        m = cols[0]
        for c in cols[1:]:
            m = m.hstack(c)
        return FgAbMorphism(self.source, self.target, m)

    def __repr__(self) -> str:
        return f"FgAbMorphism({self.source!r} -> {self.target!r}, {[list(r) for r in self.matrix.entries]!r})"


def is_well_defined(matrix: IntMatrix, source: FgAbObject, target: FgAbObject) -> bool:
    carried = matrix.mul(source.relations)
    return lattice_contains(carried, IntMatrix.zeros(target.ngens, 0), target.relations)


def identity(obj: FgAbObject) -> FgAbMorphism:
    return FgAbMorphism(obj, obj, IntMatrix.identity(obj.ngens))


def zero_morphism(a: FgAbObject, b: FgAbObject) -> FgAbMorphism:
    return FgAbMorphism(a, b, IntMatrix.zeros(b.ngens, a.ngens))


def compose(g: FgAbMorphism, f: FgAbMorphism) -> FgAbMorphism:
    if f.target != g.source:
        raise ValueError("non-composable: target of f differs from source of g")
    return FgAbMorphism(f.source, g.target, g.matrix.mul(f.matrix))


def equal(f: FgAbMorphism, g: FgAbMorphism) -> bool:
    if f.source != g.source or f.target != g.target:
        raise ValueError("morphisms live in different hom-sets")
    diff = f.matrix.sub(g.matrix)
    return lattice_contains(diff, IntMatrix.zeros(f.target.ngens, 0), f.target.relations)


def group_kernel_generators(f: FgAbMorphism) -> IntMatrix:
    """Columns generating ker(f) inside the source's generator coordinates."""
    return kernel_generators(f.matrix, f.target.relations)


def is_mono(f: FgAbMorphism) -> bool:
    k = group_kernel_generators(f)
    return lattice_contains(k, IntMatrix.zeros(f.source.ngens, 0), f.source.relations)


def is_epi(f: FgAbMorphism) -> bool:
    ambient = IntMatrix.identity(f.target.ngens)
    return lattice_contains(ambient, f.matrix, f.target.relations)


def is_iso(f: FgAbMorphism) -> bool:
    # Abelian categories are balanced.
    return is_mono(f) and is_epi(f)


def _solve_map_system(build) -> IntMatrix | None:
    sys = MatrixEquationSystem()
    build(sys)
    sol = sys.solve()
    return None if sol is None else sol["g"]


def solve_right_factor(f: FgAbMorphism, p: FgAbMorphism) -> FgAbMorphism | None:
    """g with f∘g = p (shared target); exact via one stacked linear system."""
    if f.target != p.target:
        raise ValueError("f and p must share a target")
    a, b, c = f.source, f.target, p.source

    def build(sys: MatrixEquationSystem):
        sys.add_unknown("g", a.ngens, c.ngens)
        sys.add_unknown("y1", b.relations.cols, c.ngens)
        sys.add_unknown("y2", a.relations.cols, c.relations.cols)
        i_c = IntMatrix.identity(c.ngens)
        sys.add_equation([(f.matrix, "g", i_c), (b.relations, "y1", i_c)], p.matrix)
        i_rc = IntMatrix.identity(c.relations.cols)
        sys.add_equation([(IntMatrix.identity(a.ngens), "g", c.relations),
                          (a.relations, "y2", i_rc)],
                         IntMatrix.zeros(a.ngens, c.relations.cols))

    m = _solve_map_system(build)
    if m is None:
        return None
    g = FgAbMorphism(c, a, m)
    assert equal(compose(f, g), p)
    return g


def solve_left_factor(f: FgAbMorphism, p: FgAbMorphism) -> FgAbMorphism | None:
    """g with g∘f = p (shared source)."""
    if f.source != p.source:
        raise ValueError("f and p must share a source")
    a, b, c = f.source, f.target, p.target

    def build(sys: MatrixEquationSystem):
        sys.add_unknown("g", c.ngens, b.ngens)
        sys.add_unknown("y1", c.relations.cols, a.ngens)
        sys.add_unknown("y2", c.relations.cols, b.relations.cols)
        i_a = IntMatrix.identity(a.ngens)
        sys.add_equation([(IntMatrix.identity(c.ngens), "g", f.matrix),
                          (c.relations, "y1", i_a)], p.matrix)
        i_rb = IntMatrix.identity(b.relations.cols)
        sys.add_equation([(IntMatrix.identity(c.ngens), "g", b.relations),
                          (c.relations, "y2", i_rb)],
                         IntMatrix.zeros(c.ngens, b.relations.cols))

    m = _solve_map_system(build)
    if m is None:
        return None
    g = FgAbMorphism(b, c, m)
    assert equal(compose(g, f), p)
    return g


def solve_iso_pair(f_a: FgAbMorphism, f_b: FgAbMorphism,
                   p_x: FgAbMorphism, p_y: FgAbMorphism) -> FgAbMorphism | None:
    """g with f_a∘g = p_y and g∘f_b = p_x, both congruences in one system."""
    if not equal(compose(f_a, p_x), compose(p_y, f_b)):
        raise ValueError("square does not commute")
    xa, ya = f_a.source, f_a.target
    xb, yb = f_b.source, f_b.target

    def build(sys: MatrixEquationSystem):
        sys.add_unknown("g", xa.ngens, yb.ngens)
        sys.add_unknown("y1", ya.relations.cols, yb.ngens)
        sys.add_unknown("y2", xa.relations.cols, xb.ngens)
        sys.add_unknown("y3", xa.relations.cols, yb.relations.cols)
        i_yb = IntMatrix.identity(yb.ngens)
        sys.add_equation([(f_a.matrix, "g", i_yb), (ya.relations, "y1", i_yb)], p_y.matrix)
        i_xb = IntMatrix.identity(xb.ngens)
        sys.add_equation([(IntMatrix.identity(xa.ngens), "g", f_b.matrix),
                          (xa.relations, "y2", i_xb)], p_x.matrix)
        i_ryb = IntMatrix.identity(yb.relations.cols)
        sys.add_equation([(IntMatrix.identity(xa.ngens), "g", yb.relations),
                          (xa.relations, "y3", i_ryb)],
                         IntMatrix.zeros(xa.ngens, yb.relations.cols))

    m = _solve_map_system(build)
    if m is None:
        return None
    g = FgAbMorphism(yb, xa, m)
    assert equal(compose(f_a, g), p_y) and equal(compose(g, f_b), p_x)
    return g


def cancel_right_after(f: FgAbMorphism, p: FgAbMorphism) -> bool:
    """u∘f = v∘f implies u∘p = v∘p; by the cokernel argument this is
    im(p) ⊆ im(f) inside the shared target."""
    if f.target != p.target:
        raise ValueError("f and p must share a target")
    return lattice_contains(p.matrix, f.matrix, f.target.relations)


def cancel_left_before(f: FgAbMorphism, p: FgAbMorphism) -> bool:
    """f∘u = f∘v implies p∘u = p∘v; equivalently ker(f) ⊆ ker(p)."""
    if f.source != p.source:
        raise ValueError("f and p must share a source")
    k = group_kernel_generators(f)
    if k.cols == 0:
        return True
    return lattice_contains(p.matrix.mul(k), IntMatrix.zeros(p.target.ngens, 0),
                            p.target.relations)


def image_factorization(f: FgAbMorphism) -> tuple[FgAbMorphism, FgAbMorphism]:
    """f = m∘e with e onto the image subgroup and m its inclusion.

    The image is presented on the source generators with relations the full
    preimage of the target lattice, which makes e the identity matrix and m
    the matrix of f.
    """
    image = FgAbObject(kernel_generators(f.matrix, f.target.relations))
    e = FgAbMorphism(f.source, image, IntMatrix.identity(f.source.ngens))
    m = FgAbMorphism(image, f.target, f.matrix)
    assert equal(compose(m, e), f)
    assert is_epi(e) and is_mono(m)
    return e, m


def hom_is_finite(a: FgAbObject, b: FgAbObject) -> bool:
    # Hom(A, B) is finite iff A is finite or B is finite.
    return a.is_finite() or b.is_finite()


def enumerate_homs(a: FgAbObject, b: FgAbObject,
                   bound: int = 2) -> tuple[list[FgAbMorphism], bool]:
    """(morphisms, complete).  Complete whenever Hom(A, B) is finite.

    Finite case: generator images range over all of B (B finite) or over its
    torsion part (A finite), filtered by well-definedness and deduped modulo
    the target lattice.  Otherwise matrices with entries in [-bound, bound]
    are returned and flagged incomplete.
    """
    if a.ngens == 0:
        return [zero_morphism(a, b)], True
    complete = hom_is_finite(a, b)
    if complete:
        if b.is_finite():
            columns = b.elements()
        else:
            columns = b.torsion_element_columns()
        candidates = product(columns, repeat=a.ngens)
    else:
        cols = []
        for values in product(range(-bound, bound + 1), repeat=b.ngens):
            cols.append(IntMatrix.column(list(values)))
        candidates = product(cols, repeat=a.ngens)
    out = []
    seen = set()
    for col_choice in candidates:
        m = col_choice[0]
        for c in col_choice[1:]:
            m = m.hstack(c)
        if not is_well_defined(m, a, b):
            continue
        f = FgAbMorphism(a, b, m).canonical()
        key = f.matrix.entries
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out, complete


def torsion_inclusion(g: FgAbObject) -> FgAbMorphism:
    """Inclusion Tor(G) -> G computed from the SNF of the presentation."""
    snf = g._snf
    diag = snf.diagonal
    u_inv = g._u_inverse
    tor_indices = [i for i, d in enumerate(diag) if d > 1]
    if not tor_indices:
        return FgAbMorphism(ZERO, g, IntMatrix.zeros(g.ngens, 0))
    tor = FgAbObject(IntMatrix.from_rows(
        [[diag[i] if r == c else 0 for c, i in enumerate(tor_indices)]
         for r, _ in enumerate(tor_indices)]))
    cols = u_inv.take_cols(tor_indices)
    return FgAbMorphism(tor, g, cols)
