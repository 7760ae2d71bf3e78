"""Base-category abstraction: FinSet, FgAb, and the formal dual combinator.

Every decider talks to categories only through this interface, so systems
over Dual(C) work by delegation with the solver roles swapped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import finset as fs
from . import fgab as ab
from .zlinalg import IntMatrix


@dataclass(frozen=True)
class DualObject:
    under: Any

    def __repr__(self) -> str:
        return f"Dual({self.under!r})"


@dataclass(frozen=True)
class DualMorphism:
    """A morphism A -> B of Dual(C) wrapping an underlying B -> A of C."""

    under: Any

    def __repr__(self) -> str:
        return f"Dual({self.under!r})"


class Category:
    """Single dispatch point for all per-category solvers."""

    name: str = "?"

    def source(self, f) -> Any:
        raise NotImplementedError

    def target(self, f) -> Any:
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def identity(self, obj):
        raise NotImplementedError

    def equal(self, f, g) -> bool:
        raise NotImplementedError

    def solve_right_factor(self, f, p):
        """g with f∘g = p, or None."""
        raise NotImplementedError

    def solve_left_factor(self, f, p):
        """g with g∘f = p, or None."""
        raise NotImplementedError

    def solve_iso_pair(self, f_a, f_b, p_x, p_y):
        raise NotImplementedError

    def cancel_right_after(self, f, p) -> bool:
        raise NotImplementedError

    def cancel_left_before(self, f, p) -> bool:
        raise NotImplementedError

    def image_factorization(self, f):
        raise NotImplementedError

    def enumerate_homs(self, a, b, bound: int = 2) -> tuple[list, bool]:
        raise NotImplementedError

    def is_mono(self, f) -> bool:
        return self.cancel_left_before(f, self.identity(self.source(f)))

    def is_epi(self, f) -> bool:
        return self.cancel_right_after(f, self.identity(self.target(f)))

    def is_iso(self, f) -> bool:
        # FinSet and FgAb are balanced, and Dual preserves that.
        return self.is_mono(f) and self.is_epi(f)

    def is_zero_object(self, obj) -> bool:
        raise NotImplementedError

    def zero_object(self):
        """Terminal-flavored candidate object used by the stability ladder."""
        raise NotImplementedError

    def fingerprint(self, value) -> Any:
        """Hashable literal form of an object or morphism."""
        raise NotImplementedError

    def canonical_morphism(self, f):
        """Canonical representative in its hom-set (identity by default)."""
        return f


class FinSetCategory(Category):
    name = "finset"

    def source(self, f: fs.FinSetMorphism):
        return f.source

    def target(self, f: fs.FinSetMorphism):
        return f.target

    def compose(self, g, f):
        return fs.compose(g, f)

    def identity(self, obj):
        return fs.identity(obj)

    def equal(self, f, g):
        return fs.equal(f, g)

    def solve_right_factor(self, f, p):
        return fs.solve_right_factor(f, p)

    def solve_left_factor(self, f, p):
        return fs.solve_left_factor(f, p)

    def solve_iso_pair(self, f_a, f_b, p_x, p_y):
        return fs.solve_iso_pair(f_a, f_b, p_x, p_y)

    def cancel_right_after(self, f, p):
        return fs.cancel_right_after(f, p)

    def cancel_left_before(self, f, p):
        return fs.cancel_left_before(f, p)

    def image_factorization(self, f):
        return fs.image_factorization(f)

    def enumerate_homs(self, a, b, bound: int = 2):
        return fs.enumerate_homs(a, b), True

    def is_zero_object(self, obj):
        return obj.size == 1

    def zero_object(self):
        return fs.finset("*")

    def fingerprint(self, value):
        if isinstance(value, fs.FinSetObject):
            return ("finset-obj", value.elements)
        return ("finset-mor", value.source.elements, value.target.elements, value.images)


class FgAbCategory(Category):
    name = "fgab"

    def source(self, f: ab.FgAbMorphism):
        return f.source

    def target(self, f: ab.FgAbMorphism):
        return f.target

    def compose(self, g, f):
        return ab.compose(g, f)

    def identity(self, obj):
        return ab.identity(obj)

    def equal(self, f, g):
        return ab.equal(f, g)

    def solve_right_factor(self, f, p):
        return ab.solve_right_factor(f, p)

    def solve_left_factor(self, f, p):
        return ab.solve_left_factor(f, p)

    def solve_iso_pair(self, f_a, f_b, p_x, p_y):
        return ab.solve_iso_pair(f_a, f_b, p_x, p_y)

    def cancel_right_after(self, f, p):
        return ab.cancel_right_after(f, p)

    def cancel_left_before(self, f, p):
        return ab.cancel_left_before(f, p)

    def image_factorization(self, f):
        return ab.image_factorization(f)

    def enumerate_homs(self, a, b, bound: int = 2):
        return ab.enumerate_homs(a, b, bound)

    def is_mono(self, f):
        return ab.is_mono(f)

    def is_epi(self, f):
        return ab.is_epi(f)

    def is_zero_object(self, obj):
        return obj.is_trivial()

    def zero_object(self):
        return ab.ZERO

    def fingerprint(self, value):
        if isinstance(value, ab.FgAbObject):
            return ("fgab-obj", value.relations.entries)
        return ("fgab-mor", value.source.relations.entries,
                value.target.relations.entries, value.matrix.entries)

    def canonical_morphism(self, f):
        return f.canonical()


class DualCategory(Category):
    """Formal dual: all arrows reversed, solvers swapped."""

    def __init__(self, base: Category):
        self.base = base
        self.name = f"dual:{base.name}"

    def wrap_object(self, obj):
        return DualObject(obj)

    def wrap(self, f):
        return DualMorphism(f)

    def source(self, f: DualMorphism):
        return DualObject(self.base.target(f.under))

    def target(self, f: DualMorphism):
        return DualObject(self.base.source(f.under))

    def compose(self, g, f):
        return DualMorphism(self.base.compose(f.under, g.under))

    def identity(self, obj: DualObject):
        return DualMorphism(self.base.identity(obj.under))

    def equal(self, f, g):
        return self.base.equal(f.under, g.under)

    def solve_right_factor(self, f, p):
        g = self.base.solve_left_factor(f.under, p.under)
        return None if g is None else DualMorphism(g)

    def solve_left_factor(self, f, p):
        g = self.base.solve_right_factor(f.under, p.under)
        return None if g is None else DualMorphism(g)

    def solve_iso_pair(self, f_a, f_b, p_x, p_y):
        g = self.base.solve_iso_pair(f_b.under, f_a.under, p_y.under, p_x.under)
        return None if g is None else DualMorphism(g)

    def cancel_right_after(self, f, p):
        return self.base.cancel_left_before(f.under, p.under)

    def cancel_left_before(self, f, p):
        return self.base.cancel_right_after(f.under, p.under)

    def image_factorization(self, f):
        e_u, m_u = self.base.image_factorization(f.under)
        return DualMorphism(m_u), DualMorphism(e_u)

    def enumerate_homs(self, a: DualObject, b: DualObject, bound: int = 2):
        homs, complete = self.base.enumerate_homs(b.under, a.under, bound)
        return [DualMorphism(h) for h in homs], complete

    def is_zero_object(self, obj: DualObject):
        return self.base.is_zero_object(obj.under)

    def zero_object(self):
        return DualObject(self.base.zero_object())

    def fingerprint(self, value):
        return ("dual", self.base.fingerprint(value.under))

    def canonical_morphism(self, f):
        return DualMorphism(self.base.canonical_morphism(f.under))


FINSET = FinSetCategory()
FGAB = FgAbCategory()


def dualize(cat: Category) -> DualCategory:
    """Formal dual; Dual(Dual(C)) wraps twice and behaves as C."""
    return DualCategory(cat)


def by_name(name: str) -> Category:
    if name == "finset":
        return FINSET
    if name == "fgab":
        return FGAB
    if name.startswith("dual:"):
        return dualize(by_name(name[len("dual:"):]))
    raise ValueError(f"unknown category {name!r}")
