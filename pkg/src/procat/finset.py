"""Finite sets and functions, with the per-category solvers.

Witness selection is first-in-enumeration-order throughout, so certificates
are byte-stable across runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product


@dataclass(frozen=True)
class FinSetObject:
    """Ordered finite set of distinct labels; the order is the canonical form."""

    elements: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.elements)

    def index_of(self, label: str) -> int:
        return self.elements.index(label)

    def __repr__(self) -> str:
        return f"FinSetObject({list(self.elements)!r})"


def finset(*labels: str) -> FinSetObject:
    return FinSetObject(tuple(labels))


@dataclass(frozen=True)
class FinSetMorphism:
    """Total function; images aligned with the source's element order."""

    source: FinSetObject
    target: FinSetObject
    images: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.source.size:
            raise ValueError("table must be total on the source")
        for label in self.images:
            if label not in self.target.elements:
                raise ValueError(f"image label {label!r} not in target")

    @staticmethod
    def from_table(source: FinSetObject, target: FinSetObject,
                   table: dict[str, str]) -> "FinSetMorphism":
        return FinSetMorphism(source, target, tuple(table[x] for x in source.elements))

    @property
    def table(self) -> dict[str, str]:
        return dict(zip(self.source.elements, self.images))

    def __call__(self, label: str) -> str:
        return self.images[self.source.index_of(label)]

    def image_labels(self) -> tuple[str, ...]:
        seen = []
        for label in self.target.elements:
            if label in self.images:
                seen.append(label)
        return tuple(seen)

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_surjective(self) -> bool:
        return set(self.images) == set(self.target.elements)

    def __repr__(self) -> str:
        return f"FinSetMorphism({self.table!r})"


def identity(obj: FinSetObject) -> FinSetMorphism:
    return FinSetMorphism(obj, obj, obj.elements)


def compose(g: FinSetMorphism, f: FinSetMorphism) -> FinSetMorphism:
    """g after f."""
    if f.target != g.source:
        raise ValueError("non-composable: target of f differs from source of g")
    return FinSetMorphism(f.source, g.target, tuple(g(y) for y in f.images))


def equal(f: FinSetMorphism, g: FinSetMorphism) -> bool:
    if f.source != g.source or f.target != g.target:
        raise ValueError("morphisms live in different hom-sets")
    return f.images == g.images


def enumerate_homs(a: FinSetObject, b: FinSetObject) -> list[FinSetMorphism]:
    """All |b|^|a| functions, in lexicographic order of image tuples."""
    return [FinSetMorphism(a, b, imgs)
            for imgs in product(b.elements, repeat=a.size)]


def solve_right_factor(f: FinSetMorphism, p: FinSetMorphism) -> FinSetMorphism | None:
    """g with f∘g = p; exists iff im(p) ⊆ im(f)."""
    if f.target != p.target:
        raise ValueError("f and p must share a target")
    table = []
    for y in p.images:
        if y not in f.images:
            return None
        # first preimage in source order
        table.append(f.source.elements[f.images.index(y)])
    g = FinSetMorphism(p.source, f.source, tuple(table))
    assert equal(compose(f, g), p)
    return g


def solve_left_factor(f: FinSetMorphism, p: FinSetMorphism) -> FinSetMorphism | None:
    """g with g∘f = p; exists iff fibers of f are p-collapsed.

    Off im(f) the witness is the first target label, which keeps it
    deterministic.
    """
    if f.source != p.source:
        raise ValueError("f and p must share a source")
    assignment: dict[str, str] = {}
    for x in f.source.elements:
        y = f(x)
        want = p(x)
        if y in assignment and assignment[y] != want:
            return None
        assignment[y] = want
    if p.target.size == 0 and f.target.size > len(assignment):
        return None
    filler = p.target.elements[0] if p.target.size else None
    images = tuple(assignment.get(y, filler) for y in f.target.elements)
    g = FinSetMorphism(f.target, p.target, images)
    assert equal(compose(g, f), p)
    return g


def solve_iso_pair(f_a: FinSetMorphism, f_b: FinSetMorphism,
                   p_x: FinSetMorphism, p_y: FinSetMorphism) -> FinSetMorphism | None:
    """g: Y_b -> X_a with f_a∘g = p_y and g∘f_b = p_x.

    g is forced on im(f_b) by the second equation; off it the first equation
    constrains g(y) to the f_a-fiber of p_y(y), where the first admissible
    label is chosen.
    """
    if not equal(compose(f_a, p_x), compose(p_y, f_b)):
        raise ValueError("square does not commute")
    assignment: dict[str, str] = {}
    for x in f_b.source.elements:
        y = f_b(x)
        want = p_x(x)
        if y in assignment and assignment[y] != want:
            return None
        assignment[y] = want
    images = []
    for y in f_b.target.elements:
        if y in assignment:
            if f_a(assignment[y]) != p_y(y):
                return None
            images.append(assignment[y])
        else:
            want = p_y(y)
            candidates = [x for x in f_a.source.elements if f_a(x) == want]
            if not candidates:
                return None
            images.append(candidates[0])
    g = FinSetMorphism(f_b.target, f_a.source, tuple(images))
    assert equal(compose(f_a, g), p_y) and equal(compose(g, f_b), p_x)
    return g


def cancel_right_after(f: FinSetMorphism, p: FinSetMorphism) -> bool:
    """u∘f = v∘f implies u∘p = v∘p, for all u, v out of the shared target.

    Equivalent to im(p) ⊆ im(f).
    """
    if f.target != p.target:
        raise ValueError("f and p must share a target")
    return set(p.images) <= set(f.images)


def cancel_left_before(f: FinSetMorphism, p: FinSetMorphism) -> bool:
    """f∘u = f∘v implies p∘u = p∘v, for all u, v into the shared source.

    Equivalent to the f-fibers being p-collapsed.
    """
    if f.source != p.source:
        raise ValueError("f and p must share a source")
    collapse: dict[str, str] = {}
    for x in f.source.elements:
        y = f(x)
        if y in collapse and collapse[y] != p(x):
            return False
        collapse[y] = p(x)
    return True


def image_factorization(f: FinSetMorphism) -> tuple[FinSetMorphism, FinSetMorphism]:
    """f = m∘e with e surjective onto the image and m the inclusion."""
    image = FinSetObject(f.image_labels())
    e = FinSetMorphism(f.source, image, f.images)
    m = FinSetMorphism(image, f.target, image.elements)
    assert equal(compose(m, e), f)
    return e, m
