"""Pro-objects and pro-morphisms: towers, finite poset systems, levelization,
subtowers, reindexing, and FinSet tower inverse limits.

Towers are the only infinite index shape, and they are always eventually
periodic: objects and consecutive bonds repeat with a fixed period after a
finite prefix.  That is what makes image/kernel chains and bond composites
finitely analysable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Any, Callable

from .category import Category


class HorizonExhausted(Exception):
    """A bounded search ran out of room; carries the stuck index."""

    def __init__(self, index, message: str = ""):
        self.index = index
        super().__init__(message or f"horizon exhausted at index {index}")


@dataclass(frozen=True)
class Horizon:
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("horizon depth must be >= 1")


@dataclass(frozen=True)
class TowerIndex:
    prefix_len: int
    tail_period: int

    def __post_init__(self) -> None:
        if self.prefix_len < 0 or self.tail_period < 1:
            raise ValueError("need prefix_len >= 0 and tail_period >= 1")


@dataclass(frozen=True)
class FinitePosetIndex:
    """Finite directed poset; `le` holds all non-strict pairs (a, b): a <= b."""

    elements: tuple[str, ...]
    le: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        elems = self.elements
        if len(set(elems)) != len(elems):
            raise ValueError("duplicate poset elements")
        for (a, b) in self.le:
            if a not in elems or b not in elems:
                raise ValueError(f"relation mentions unknown element ({a}, {b})")
        for a in elems:
            if (a, a) not in self.le:
                raise ValueError(f"not reflexive at {a}")
        for (a, b) in self.le:
            if a != b and (b, a) in self.le:
                raise ValueError(f"not antisymmetric on ({a}, {b})")
        for (a, b) in self.le:
            for (c, d) in self.le:
                if b == c and (a, d) not in self.le:
                    raise ValueError(f"not transitive via ({a}, {b}, {d})")
        for a in elems:
            for b in elems:
                if not any((a, c) in self.le and (b, c) in self.le for c in elems):
                    raise ValueError(f"not directed: ({a}, {b}) has no upper bound")

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.le

    def strictly_above(self, a: str) -> list[str]:
        return [b for b in self.elements if b != a and self.leq(a, b)]

    def at_or_above(self, a: str) -> list[str]:
        return [b for b in self.elements if self.leq(a, b)]

    def maximum(self) -> str:
        # A finite directed poset always has one.
        for m in self.elements:
            if all(self.leq(a, m) for a in self.elements):
                return m
        raise AssertionError("directed finite poset must have a maximum")

    @staticmethod
    def from_pairs(elements: list[str], strict_pairs: list[tuple[str, str]]) -> "FinitePosetIndex":
        """Build from a <= generating set; reflexive/transitive closure applied."""
        le = {(a, a) for a in elements}
        le |= set(strict_pairs)
        changed = True
        while changed:
            changed = False
            for (a, b) in list(le):
                for (c, d) in list(le):
                    if b == c and (a, d) not in le:
                        le.add((a, d))
                        changed = True
        return FinitePosetIndex(tuple(elements), frozenset(le))


class TowerSystem:
    """Inverse system over the naturals with an eventually periodic tail.

    `objects` and `steps` have length prefix_len + tail_period; slot i of
    `steps` is the bond object_at(i+1) -> object_at(i), where the final slot
    wraps to the start of the period.
    """

    def __init__(self, category: Category, index: TowerIndex,
                 objects: tuple, steps: tuple):
        self.category = category
        self.index = index
        self.objects = tuple(objects)
        self.steps = tuple(steps)
        if len(self.objects) != index.prefix_len + index.tail_period:
            raise ValueError("need prefix_len + tail_period objects")
        if len(self.steps) != index.prefix_len + index.tail_period:
            raise ValueError("need prefix_len + tail_period step bonds")
        self._bond_cache: dict[tuple[int, int], Any] = {}

    @property
    def prefix_len(self) -> int:
        return self.index.prefix_len

    @property
    def period(self) -> int:
        return self.index.tail_period

    def _slot(self, n: int) -> int:
        p, q = self.prefix_len, self.period
        return n if n < p else p + (n - p) % q

    def object_at(self, n: int):
        return self.objects[self._slot(n)]

    def step_at(self, n: int):
        """Bond object_at(n+1) -> object_at(n)."""
        return self.steps[self._slot(n)]

    def bond(self, beta: int, alpha: int):
        """Composite bond object_at(beta) -> object_at(alpha), beta >= alpha."""
        if beta < alpha:
            raise ValueError("bond requires beta >= alpha")
        if beta == alpha:
            return self.category.identity(self.object_at(alpha))
        key = (self._slot(alpha), beta - alpha) if alpha >= self.prefix_len else (alpha, beta - alpha, "pre")
        cached = self._bond_cache.get(key)
        if cached is not None:
            return cached
        out = self.step_at(alpha)
        for n in range(alpha + 1, beta):
            # step_at(n): X_{n+1} -> X_n feeds the composite built so far
            out = self.category.compose(out, self.step_at(n))
        self._bond_cache[key] = out
        return out

    def is_constant_object(self) -> bool:
        """One object with identity bonds: the embedded image of an object."""
        if self.prefix_len != 0 or self.period != 1:
            return False
        ident = self.category.identity(self.objects[0])
        return self.category.equal(self.steps[0], ident)

    def fingerprint_at(self, n: int):
        return self.category.fingerprint(self.object_at(n))

    def __repr__(self) -> str:
        return (f"TowerSystem(prefix={self.prefix_len}, period={self.period}, "
                f"objects={list(self.objects)!r})")


class PosetSystem:
    """Inverse system over a finite directed poset; bonds given for all
    strict pairs (beta > alpha)."""

    def __init__(self, category: Category, index: FinitePosetIndex,
                 objects: dict, bonds: dict):
        self.category = category
        self.index = index
        self.objects = dict(objects)
        self.bonds = dict(bonds)
        for a in index.elements:
            if a not in self.objects:
                raise ValueError(f"missing object at {a!r}")
        for a in index.elements:
            for b in index.strictly_above(a):
                if (b, a) not in self.bonds:
                    raise ValueError(f"missing bond {b!r} -> {a!r}")

    def object_at(self, label: str):
        return self.objects[label]

    def bond(self, beta: str, alpha: str):
        if beta == alpha:
            return self.category.identity(self.objects[alpha])
        return self.bonds[(beta, alpha)]

    def __repr__(self) -> str:
        return f"PosetSystem({list(self.index.elements)!r})"


InverseSystem = Any  # TowerSystem | PosetSystem


def constant_system(category: Category, obj) -> TowerSystem:
    return TowerSystem(category, TowerIndex(0, 1), (obj,), (category.identity(obj),))


def default_horizon(*systems: InverseSystem) -> Horizon:
    """3 * (prefix + period), taken over the largest participating tower."""
    depth = 3
    for s in systems:
        if isinstance(s, TowerSystem):
            depth = max(depth, 3 * (s.prefix_len + s.period))
    return Horizon(depth)


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    detail: str = ""

    def __repr__(self) -> str:
        return f"Violation({self.kind} at {self.where}{': ' + self.detail if self.detail else ''})"


def validate_system(system: InverseSystem) -> Violation | None:
    """None when the system invariants hold, else the first violation found.

    Tower functoriality is automatic (bonds are generated by consecutive
    steps) so only shape and periodicity wiring is checked; posets are checked
    exhaustively on all composable triples.
    """
    cat = system.category
    if isinstance(system, TowerSystem):
        total = system.prefix_len + system.period
        for n in range(total):
            step = system.steps[n]
            src_expected = system.object_at(n + 1)
            if cat.source(step) != src_expected:
                return Violation("step-source", (n,),
                                 "step source does not match the next object")
            if cat.target(step) != system.objects[n]:
                return Violation("step-target", (n,),
                                 "step target does not match its object")
        return None
    if isinstance(system, PosetSystem):
        idx = system.index
        for a in idx.elements:
            for b in idx.strictly_above(a):
                bond = system.bond(b, a)
                if cat.source(bond) != system.object_at(b) or cat.target(bond) != system.object_at(a):
                    return Violation("bond-shape", (b, a))
        for a in idx.elements:
            for b in idx.strictly_above(a):
                for c in idx.strictly_above(b):
                    direct = system.bond(c, a)
                    composed = cat.compose(system.bond(b, a), system.bond(c, b))
                    if not cat.equal(direct, composed):
                        return Violation("functoriality", (a, b, c),
                                         "bond(c,a) != bond(b,a) o bond(c,b)")
        return None
    raise TypeError(f"not an inverse system: {system!r}")


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def joint_shape(*towers: TowerSystem, extra_prefix: int = 0,
                extra_periods: tuple[int, ...] = ()) -> tuple[int, int]:
    p = extra_prefix
    q = 1
    for t in towers:
        p = max(p, t.prefix_len)
        q = _lcm(q, t.period)
    for e in extra_periods:
        q = _lcm(q, e)
    return p, q


class LevelMorphism:
    """Level morphism of towers: one component per natural number.

    Components are stored for a finite window and extended by one of:
      periodic         f_{n+Q} is literally f_n beyond the prefix
      bond_determined  f_n is the unique solution of EY o f_n = f_{n-Q} o EX,
                       available when the target's period composites are mono
      bounded          nothing past the window (deciders go Unknown there)
    """

    def __init__(self, source: TowerSystem, target: TowerSystem,
                 comps: list, mode: str, prefix_len: int, period: int,
                 validate: bool = True):
        if source.category is not target.category and source.category.name != target.category.name:
            raise ValueError("source and target live in different categories")
        self.category = source.category
        self.source = source
        self.target = target
        self.mode = mode
        self.comp_prefix = prefix_len
        self.comp_period = period
        self._comps = list(comps)
        if mode not in ("periodic", "bond_determined", "bounded"):
            raise ValueError(f"unknown mode {mode!r}")
        if validate:
            self._validate()

    # -- construction -----------------------------------------------------

    @staticmethod
    def periodic(source: TowerSystem, target: TowerSystem, comps: list) -> "LevelMorphism":
        p, q = joint_shape(source, target)
        qf = len(comps) - p
        if qf < 1:
            raise ValueError("component list too short for the joint prefix")
        q = _lcm(q, qf)
        return LevelMorphism(source, target, comps, "periodic", p, qf)

    @staticmethod
    def bond_determined(source: TowerSystem, target: TowerSystem,
                        window: list) -> "LevelMorphism":
        p, q = joint_shape(source, target)
        if len(window) < p + q:
            raise ValueError("window must cover the joint prefix plus one period")
        return LevelMorphism(source, target, window, "bond_determined", p, q)

    @staticmethod
    def bounded(source: TowerSystem, target: TowerSystem, comps: list) -> "LevelMorphism":
        p, q = joint_shape(source, target)
        return LevelMorphism(source, target, comps, "bounded", p, q)

    # -- component access --------------------------------------------------

    @property
    def known_depth(self) -> int:
        return len(self._comps)

    def component_at(self, n: int):
        if n < len(self._comps):
            return self._comps[n]
        if self.mode == "periodic":
            p, q = self.comp_prefix, self.comp_period
            return self._comps[p + (n - p) % q]
        if self.mode == "bounded":
            raise HorizonExhausted(n, f"component {n} beyond the bounded window")
        while len(self._comps) <= n:
            self._generate_next()
        return self._comps[n]

    def _generate_next(self) -> None:
        cat = self.category
        n = len(self._comps)
        q = self.comp_period
        prev = self._comps[n - q]
        ey = self.target.bond(n, n - q)
        ex = self.source.bond(n, n - q)
        rhs = cat.compose(prev, ex)
        w = cat.solve_right_factor(ey, rhs)
        if w is None:
            raise HorizonExhausted(n, "bond-determined tail has no component")
        if not cat.is_mono(ey):
            raise HorizonExhausted(n, "bond-determined tail needs mono period bonds")
        self._comps.append(w)

    def components_are_periodic(self) -> bool:
        return self.mode == "periodic"

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        cat = self.category
        p, q = self.joint_structure()
        upto = p + q + 1
        if self.mode == "bounded":
            upto = min(upto, len(self._comps) - 1)
        for n in range(upto):
            f_n = self.component_at(n)
            if cat.source(f_n) != self.source.object_at(n):
                raise ValueError(f"component {n} has the wrong source")
            if cat.target(f_n) != self.target.object_at(n):
                raise ValueError(f"component {n} has the wrong target")
        for n in range(upto):
            lhs = cat.compose(self.target.step_at(n), self.component_at(n + 1))
            rhs = cat.compose(self.component_at(n), self.source.step_at(n))
            if not cat.equal(lhs, rhs):
                raise ValueError(f"components do not commute with bonds at level {n}")

    def joint_structure(self) -> tuple[int, int]:
        """(prefix, period) after which all tower data repeats.

        For bond_determined morphisms the component *law* repeats, not the
        components themselves.
        """
        p, q = joint_shape(self.source, self.target, extra_prefix=self.comp_prefix)
        if self.mode == "periodic":
            q = _lcm(q, self.comp_period)
        return p, q

    def __repr__(self) -> str:
        return f"LevelMorphism(mode={self.mode}, comps={len(self._comps)})"


class PosetLevelMorphism:
    """Level morphism of poset systems sharing one index."""

    def __init__(self, source: PosetSystem, target: PosetSystem, components: dict):
        if source.index != target.index:
            raise ValueError("poset level morphism needs a shared index")
        self.category = source.category
        self.source = source
        self.target = target
        self.components = dict(components)
        cat = self.category
        for a in source.index.elements:
            if a not in self.components:
                raise ValueError(f"missing component at {a!r}")
            f = self.components[a]
            if cat.source(f) != source.object_at(a) or cat.target(f) != target.object_at(a):
                raise ValueError(f"component at {a!r} has the wrong shape")
        for a in source.index.elements:
            for b in source.index.strictly_above(a):
                lhs = cat.compose(target.bond(b, a), self.components[b])
                rhs = cat.compose(self.components[a], source.bond(b, a))
                if not cat.equal(lhs, rhs):
                    raise ValueError(f"components do not commute with bonds on ({b}, {a})")

    def component_at(self, a: str):
        return self.components[a]


class ProMorphism:
    """Pro-morphism as a target-indexed family of representatives.

    Tower targets: entries[n] = (source index sigma(n), representative
    X_sigma(n) -> Y_n), materialized up to a finite depth.  Poset targets: a
    dict keyed by target index labels.  Constructors that know the entry
    family repeats may declare it via `tail_periodic = (prefix, period)`.
    """

    def __init__(self, source: InverseSystem, target: InverseSystem, entries,
                 tail_periodic: tuple[int, int] | None = None):
        self.source = source
        self.target = target
        self.category = source.category
        self.entries = entries
        self.tail_periodic = tail_periodic

    @property
    def depth(self) -> int:
        if isinstance(self.entries, dict):
            return len(self.entries)
        return len(self.entries)

    def entry(self, alpha):
        if isinstance(self.entries, dict):
            return self.entries[alpha]
        if alpha >= len(self.entries):
            raise HorizonExhausted(alpha, "pro-morphism entry beyond materialized depth")
        return self.entries[alpha]

    def is_level_shaped(self) -> bool:
        if isinstance(self.entries, dict):
            return all(sig == a for a, (sig, _rep) in self.entries.items())
        return all(sig == n for n, (sig, _rep) in enumerate(self.entries))

    def __repr__(self) -> str:
        return f"ProMorphism(depth={self.depth})"


def pro_from_level(f: LevelMorphism, depth: int) -> ProMorphism:
    entries = [(n, f.component_at(n)) for n in range(depth)]
    return ProMorphism(f.source, f.target, entries)


def reconcile_representatives(cat: Category, system: TowerSystem,
                              sig_a: int, rep_a, sig_b: int, rep_b,
                              horizon: Horizon) -> int | None:
    """Smallest gamma <= horizon with rep_a o bond(gamma, sig_a) ==
    rep_b o bond(gamma, sig_b); None if the horizon runs out."""
    start = max(sig_a, sig_b)
    # the smallest common index is always tried; the horizon bounds the rest
    for gamma in range(start, max(start + 1, horizon.depth + 1)):
        lhs = cat.compose(rep_a, system.bond(gamma, sig_a))
        rhs = cat.compose(rep_b, system.bond(gamma, sig_b))
        if cat.equal(lhs, rhs):
            return gamma
    return None


def verify_pro_compatibility(f: ProMorphism, horizon: Horizon) -> Violation | None:
    """Check p(Y)^{n+1}_n o f_{n+1} == f_n after pushing to a common source
    index, for consecutive target levels up to the horizon."""
    cat = f.category
    if isinstance(f.entries, dict):
        idx = f.target.index
        sidx = f.source.index
        for a in idx.elements:
            sig_a, rep_a = f.entry(a)
            for b in idx.strictly_above(a):
                sig_b, rep_b = f.entry(b)
                pushed = cat.compose(f.target.bond(b, a), rep_b)
                # common source index: any upper bound of sig_a, sig_b
                ub = next(c for c in sidx.elements
                          if sidx.leq(sig_a, c) and sidx.leq(sig_b, c))
                lhs = cat.compose(rep_a, f.source.bond(ub, sig_a))
                rhs = cat.compose(pushed, f.source.bond(ub, sig_b))
                if not cat.equal(lhs, rhs):
                    return Violation("pro-compat", (a, b))
        return None
    upto = min(f.depth - 1, horizon.depth)
    for n in range(upto):
        sig_n, rep_n = f.entry(n)
        sig_n1, rep_n1 = f.entry(n + 1)
        pushed = cat.compose(f.target.step_at(n), rep_n1)
        gamma = reconcile_representatives(cat, f.source, sig_n, rep_n,
                                          sig_n1, pushed, horizon)
        if gamma is None:
            return Violation("pro-compat", (n, n + 1), "no reconciling index within horizon")
    return None


def pro_compose(g: ProMorphism, f: ProMorphism) -> ProMorphism:
    """Composite g o f; depth limited by what f materializes."""
    cat = g.category
    if isinstance(g.entries, dict):
        entries = {}
        for a, (sig_g, rep_g) in g.entries.items():
            sig_f, rep_f = f.entry(sig_g)
            entries[a] = (sig_f, cat.compose(rep_g, rep_f))
        return ProMorphism(f.source, g.target, entries)
    entries = []
    for n in range(g.depth):
        sig_g, rep_g = g.entry(n)
        if sig_g >= f.depth:
            break
        sig_f, rep_f = f.entry(sig_g)
        entries.append((sig_f, cat.compose(rep_g, rep_f)))
    return ProMorphism(f.source, g.target, entries)


def pro_equal(f: ProMorphism, g: ProMorphism, horizon: Horizon) -> bool:
    """Equality of tower pro-morphisms sampled to the horizon."""
    cat = f.category
    upto = min(f.depth, g.depth, horizon.depth)
    for n in range(upto):
        sig_f, rep_f = f.entry(n)
        sig_g, rep_g = g.entry(n)
        if reconcile_representatives(cat, f.source, sig_f, rep_f,
                                     sig_g, rep_g, horizon) is None:
            return False
    return True


# -- subtowers ---------------------------------------------------------------


@dataclass(frozen=True)
class SubtowerSelector:
    """Strictly increasing cofinal selector: explicit head, arithmetic tail."""

    head: tuple[int, ...]
    stride: int = 1

    def __post_init__(self) -> None:
        if not self.head:
            raise ValueError("selector head must be nonempty")
        if any(b <= a for a, b in zip(self.head, self.head[1:])):
            raise ValueError("selector must be strictly increasing")
        if self.stride < 1:
            raise ValueError("selector tail must increase")

    def __call__(self, n: int) -> int:
        k = len(self.head)
        if n < k:
            return self.head[n]
        return self.head[-1] + self.stride * (n - k + 1)

    def is_identity(self) -> bool:
        return self.stride == 1 and all(self(n) == n for n in range(len(self.head)))


IDENTITY_SELECTOR = SubtowerSelector((0,), 1)


def subtower(x: TowerSystem, s: SubtowerSelector) -> TowerSystem:
    """The induced system X_s, again eventually periodic."""
    a = s.stride
    new_q = x.period // gcd(a, x.period)
    n = len(s.head) - 1
    while s(n) < x.prefix_len:
        n += 1
    new_p = n
    objects = [x.object_at(s(i)) for i in range(new_p + new_q)]
    steps = [x.bond(s(i + 1), s(i)) for i in range(new_p + new_q)]
    sys = TowerSystem(x.category, TowerIndex(new_p, new_q), tuple(objects), tuple(steps))
    bad = validate_system(sys)
    if bad is not None:
        raise AssertionError(f"subtower failed validation: {bad}")
    return sys


def subtower_level_morphism(f: LevelMorphism, s: SubtowerSelector) -> LevelMorphism:
    """Restriction f_s: X_s -> Y_s; periodic whenever f is.

    With stride a and component period q_f, the selected components repeat
    with period q_f / gcd(a, q_f) once the selector has entered all tails.
    """
    sub_x = subtower(f.source, s)
    sub_y = subtower(f.target, s)
    if f.components_are_periodic():
        a = s.stride
        t = f.comp_period // gcd(a, f.comp_period)
        p, q = joint_shape(sub_x, sub_y, extra_periods=(t,))
        n0 = max(p, len(s.head) - 1)
        while s(n0) < f.comp_prefix:
            n0 += 1
        comps = [f.component_at(s(n)) for n in range(n0 + q)]
        return LevelMorphism(sub_x, sub_y, comps, "periodic", n0, q)
    p, q = joint_shape(sub_x, sub_y)
    comps = []
    try:
        for n in range(p + 2 * q + 2):
            comps.append(f.component_at(s(n)))
    except HorizonExhausted:
        pass
    return LevelMorphism.bounded(sub_x, sub_y, comps)


def projection_morphism(x: TowerSystem, s: SubtowerSelector,
                        depth: int | None = None) -> ProMorphism:
    """p(X)_s : X -> X_s, represented by identities at the selected indices."""
    d = depth if depth is not None else default_horizon(x).depth
    target = subtower(x, s)
    entries = [(s(n), x.category.identity(x.object_at(s(n)))) for n in range(d)]
    return ProMorphism(x, target, entries)


def factor_through_subtower(f: ProMorphism, horizon: Horizon
                            ) -> tuple[SubtowerSelector, LevelMorphism]:
    """Subtower X_s and level g: X_s -> Y with g o p(X)_s = f.

    Follows the inductive construction: each new representative is pushed
    to the smallest index reconciling it with the previous level (the greedy
    choice; the construction is existential about it).
    """
    cat = f.category
    x, y = f.source, f.target
    if not isinstance(y, TowerSystem):
        raise TypeError("factor_through_subtower needs a tower target")
    depth = min(f.depth, horizon.depth)
    if depth < 1:
        raise HorizonExhausted(0, "no representatives available")
    s_vals: list[int] = []
    comps: list = []
    sig0, rep0 = f.entry(0)
    s_vals.append(sig0)
    comps.append(rep0)
    for n in range(1, depth):
        sig, rep = f.entry(n)
        alpha = max(sig, s_vals[-1] + 1)
        h = cat.compose(rep, x.bond(alpha, sig))
        # need s(n) >= alpha with g_{n-1} o p^{s(n)}_{s(n-1)} == step o h o p^{s(n)}_alpha
        pushed_prev = None
        found = None
        for cand in range(alpha, horizon.depth + 1):
            lhs = cat.compose(comps[-1], x.bond(cand, s_vals[-1]))
            rhs = cat.compose(cat.compose(y.step_at(n - 1), h), x.bond(cand, alpha))
            if cat.equal(lhs, rhs):
                found = cand
                break
        if found is None:
            raise HorizonExhausted(n, "could not reconcile representatives")
        s_vals.append(found)
        comps.append(cat.compose(h, x.bond(found, alpha)))
    stride = s_vals[-1] - s_vals[-2] if len(s_vals) >= 2 else 1
    selector = SubtowerSelector(tuple(s_vals), max(stride, 1))
    sub = subtower(x, selector)
    level = _level_from_window(sub, y, comps)
    return selector, level


def _level_from_window(source: TowerSystem, target: TowerSystem,
                       comps: list, forward_recursive: bool = False) -> LevelMorphism:
    """Wrap computed components, upgrading to periodic mode when that is
    actually justified.

    A repeating window proves tail periodicity only for families satisfying
    the forward recursion f_{n+1} determined by f_n and the bonds (bond
    composites toward a fixed level are the main case); otherwise the window
    is just a sample, and the morphism stays bounded.
    """
    cat = source.category
    p, q = joint_shape(source, target)
    if forward_recursive and len(comps) >= p + 2 * q:
        for start in range(p, len(comps) - 2 * q + 1):
            if all(cat.fingerprint(comps[n + q]) == cat.fingerprint(comps[n])
                   for n in range(start, len(comps) - q)):
                return LevelMorphism(source, target, comps[:start + q],
                                     "periodic", start, q)
    return LevelMorphism.bounded(source, target, comps)


def levelize(f: ProMorphism, horizon: Horizon
             ) -> tuple[LevelMorphism | PosetLevelMorphism, ProMorphism, ProMorphism]:
    """(level form, i, j) with j o level o i == f up to the horizon.

    Already-level entries are wrapped unchanged; a constant-object source is
    the special case with identity bonds; otherwise the morphism factors
    through a subtower and i is the (cofinal, hence iso) projection.
    """
    cat = f.category
    x, y = f.source, f.target
    if isinstance(y, PosetSystem):
        if not f.is_level_shaped():
            raise TypeError("general poset levelization is out of scope; "
                            "poset morphisms must be given levelwise")
        comps = {a: rep for a, (_sig, rep) in f.entries.items()}
        level = PosetLevelMorphism(x, y, comps)
        ident = identity_pro(x), identity_pro(y)
        return level, ident[0], ident[1]
    bad = verify_pro_compatibility(f, horizon)
    if bad is not None:
        raise HorizonExhausted(bad.where, f"incompatible representatives: {bad}")
    proj = _projection_shaped_selector(f)
    if proj is not None:
        # Identity representatives along a selector: the level form is the
        # identity family on the reindexed source, which is genuinely
        # periodic, and i is the (cofinal) projection.
        try:
            sub = subtower(x, proj)
            comps = [cat.identity(sub.object_at(n))
                     for n in range(sub.prefix_len + sub.period)]
            level = LevelMorphism.periodic(sub, y, comps)
            i = projection_morphism(x, proj, depth=min(f.depth, horizon.depth))
            return level, i, identity_pro(y)
        except ValueError:
            pass
    if f.is_level_shaped():
        comps = [rep for (_sig, rep) in f.entries]
        level = _level_from_window(x, y, comps)
        return level, identity_pro(x), identity_pro(y)
    if isinstance(x, TowerSystem) and x.is_constant_object():
        # Object-to-tower morphisms: constant source with identity bonds.
        comps = []
        for n in range(min(f.depth, horizon.depth)):
            _sig, rep = f.entry(n)
            comps.append(rep)
        if f.tail_periodic is not None:
            tp, tq = f.tail_periodic
            if len(comps) >= tp + tq:
                level = LevelMorphism(x, y, comps[:tp + tq], "periodic", tp, tq)
                return level, identity_pro(x), identity_pro(y)
        level = _level_from_window(x, y, comps)
        return level, identity_pro(x), identity_pro(y)
    selector, level = factor_through_subtower(f, horizon)
    i = projection_morphism(x, selector, depth=min(f.depth, horizon.depth))
    j = identity_pro(y)
    return level, i, j


def _projection_shaped_selector(f: ProMorphism) -> SubtowerSelector | None:
    """Selector when every representative is an identity at sigma(n) and the
    sigma sequence is strictly increasing with an eventually constant stride."""
    cat = f.category
    if isinstance(f.entries, dict) or f.depth < 3:
        return None
    sigs = []
    for n in range(f.depth):
        sig, rep = f.entry(n)
        src = cat.source(rep)
        if src != cat.target(rep):
            return None
        if not cat.equal(rep, cat.identity(src)):
            return None
        sigs.append(sig)
    if any(b <= a for a, b in zip(sigs, sigs[1:])):
        return None
    stride = sigs[-1] - sigs[-2]
    cut = len(sigs) - 1
    while cut > 1 and sigs[cut] - sigs[cut - 1] == stride:
        cut -= 1
    if cut > len(sigs) - 2:
        return None
    return SubtowerSelector(tuple(sigs[:cut + 1]), stride)


def identity_pro(x: InverseSystem, depth: int | None = None) -> ProMorphism:
    cat = x.category
    if isinstance(x, PosetSystem):
        entries = {a: (a, cat.identity(x.object_at(a))) for a in x.index.elements}
        return ProMorphism(x, x, entries)
    d = depth if depth is not None else default_horizon(x).depth
    entries = [(n, cat.identity(x.object_at(n))) for n in range(d)]
    return ProMorphism(x, x, entries)


def equalize_on_subtower(f, g: LevelMorphism, h: LevelMorphism,
                         s: SubtowerSelector, horizon: Horizon,
                         check_levels: int | None = None) -> SubtowerSelector:
    """t > s with (f o g) o p^{t}_{s} == (f o h) o p^{t}_{s} levelwise.

    f, g, h are level morphisms (g, h out of the subtower X_s); the
    precondition that the composites agree as pro-morphisms is exactly the
    success of the search at every checked level.
    """
    cat = g.category
    x_s = g.source
    if h.source is not x_s and h.source.objects != x_s.objects:
        raise ValueError("g and h must share the subtower source")
    levels = check_levels if check_levels is not None else x_s.prefix_len + x_s.period + 1
    t_vals: list[int] = []
    for n in range(levels):
        fg = cat.compose(f.component_at(n), g.component_at(n))
        fh = cat.compose(f.component_at(n), h.component_at(n))
        lo = t_vals[-1] + 1 if t_vals else s(n)
        lo = max(lo, s(n))
        found = None
        for cand in range(lo, horizon.depth + 1):
            # bond of X_s from position-with-value cand down to s(n) exists
            # only along selected indices; search over raw tower indices.
            bond = _selected_bond(g.source, s, cand, n)
            if bond is None:
                continue
            if cat.equal(cat.compose(fg, bond), cat.compose(fh, bond)):
                found = cand
                break
        if found is None:
            raise HorizonExhausted(n, "no equalizing index within horizon")
        t_vals.append(found)
    stride = max(t_vals[-1] - t_vals[-2] if len(t_vals) > 1 else 1, 1)
    return SubtowerSelector(tuple(t_vals), stride)


def _selected_bond(x_s: TowerSystem, s: SubtowerSelector, raw_target: int, pos: int):
    """Bond X_{raw_target} -> (X_s)_pos when raw_target = s(m) for some m >= pos."""
    m = pos
    while s(m) < raw_target:
        m += 1
    if s(m) != raw_target:
        return None
    return x_s.bond(m, pos)


@dataclass
class Sub2Data:
    """The canonical family {p(X)_alpha} presenting X inside pro-(pro-C)."""

    system: InverseSystem
    projections: list


def sub2(x: InverseSystem, depth: int | None = None) -> Sub2Data:
    cat = x.category
    if isinstance(x, PosetSystem):
        projections = []
        for a in x.index.elements:
            target = constant_system(cat, x.object_at(a))
            entries = [(a, cat.identity(x.object_at(a)))]
            projections.append((a, ProMorphism(x, target, entries)))
        return Sub2Data(x, projections)
    d = depth if depth is not None else default_horizon(x).depth
    projections = []
    for alpha in range(d):
        target = constant_system(cat, x.object_at(alpha))
        entries = [(alpha, cat.identity(x.object_at(alpha)))] * d
        projections.append((alpha, ProMorphism(x, target, list(entries))))
    return Sub2Data(x, projections)


def cofinite_reindex(z: PosetSystem) -> tuple[PosetSystem, ProMorphism]:
    """Reindex over finite subsets with a maximum, plus the canonical
    comparison morphism back to the original system."""
    idx = z.index
    cat = z.category
    subsets: list[tuple[str, ...]] = []

    def all_subsets(elems):
        if not elems:
            yield ()
            return
        head, rest = elems[0], elems[1:]
        for tail in all_subsets(rest):
            yield tail
            yield (head,) + tail

    for sub in all_subsets(list(idx.elements)):
        if not sub:
            continue
        maxima = [m for m in sub if all(idx.leq(a, m) for a in sub)]
        if maxima:
            subsets.append(tuple(sorted(sub)))
    labels = {sub: "{" + ",".join(sub) + "}" for sub in subsets}

    def max_of(sub):
        return next(m for m in sub if all(idx.leq(a, m) for a in sub))

    strict = []
    for a in subsets:
        for b in subsets:
            if a != b and set(a) <= set(b):
                strict.append((labels[a], labels[b]))
    new_index = FinitePosetIndex.from_pairs([labels[s] for s in subsets], strict)
    # each element has finitely many predecessors by construction; asserted
    for s_ in subsets:
        preds = [t for t in subsets if set(t) <= set(s_)]
        assert len(preds) <= 2 ** len(s_)
    objects = {labels[s_]: z.object_at(max_of(s_)) for s_ in subsets}
    bonds = {}
    for a in subsets:
        for b in subsets:
            if a != b and set(a) <= set(b):
                bonds[(labels[b], labels[a])] = z.bond(max_of(b), max_of(a))
    new_system = PosetSystem(cat, new_index, objects, bonds)
    entries = {a: (labels[tuple([a])], cat.identity(z.object_at(a)))
               for a in idx.elements}
    comparison = ProMorphism(new_system, z, entries)
    return new_system, comparison


def inverse_limit_finset_tower(x: TowerSystem):
    """(L, projection) for a FinSet tower: threads via eventual-image
    stabilization of the periodic tail."""
    from . import finset as fs
    cat = x.category
    if cat.name != "finset":
        raise TypeError("inverse limits are implemented for FinSet towers only")
    p, q = x.prefix_len, x.period
    base = x.object_at(p)
    e = x.bond(p + q, p)  # period endomorphism of X_p
    image = set(base.elements)
    while True:
        nxt = {e(lbl) for lbl in image}
        if nxt == image:
            break
        image = nxt
    stable = tuple(lbl for lbl in base.elements if lbl in image)
    # e restricted to the eventual image is a bijection
    inv = {}
    for lbl in stable:
        inv[e(lbl)] = lbl
    limit = fs.FinSetObject(tuple(f"t_{lbl}" for lbl in stable))
    # order of the inverse permutation: thread evaluations repeat with q*t
    perm_order = 1
    for lbl in stable:
        length = 1
        cur = inv[lbl]
        while cur != lbl:
            cur = inv[cur]
            length += 1
        perm_order = perm_order * length // gcd(perm_order, length)

    def thread_value(lbl: str, n: int) -> str:
        # value at level n of the thread whose level-p value is lbl:
        # at grid level p + k*q the value is inv^k(lbl), then push down.
        if n <= p:
            return x.bond(p, n)(lbl)
        grid = p
        cur = lbl
        while grid < n:
            grid += q
            cur = inv[cur]
        return x.bond(grid, n)(cur)

    entries = []
    depth = max(default_horizon(x).depth, p + 2 * q * perm_order)
    for n in range(depth):
        images = tuple(thread_value(lbl, n) for lbl in stable)
        rep = fs.FinSetMorphism(limit, x.object_at(n), images)
        entries.append((0, rep))
    proj = ProMorphism(constant_system(cat, limit), x, entries,
                       tail_periodic=(p, q * perm_order))
    return limit, proj


@dataclass
class HomClasses:
    """Classes of Mor(X, P) under bond-composition equivalence."""

    classes: list
    complete: bool


def pro_hom_to_object(x: TowerSystem, p_obj, horizon: Horizon) -> HomClasses:
    """Equivalence classes of pro-morphisms X -> P.

    Exact whenever Hom(X_b, P) is finite at the periodic base: the colimit
    along the period self-map tau(u) = u o E stabilizes on its eventual
    image, where tau acts bijectively.
    """
    cat = x.category
    b = x.prefix_len
    e = x.bond(b + x.period, b)
    homs, complete = cat.enumerate_homs(x.object_at(b), p_obj)
    if not complete:
        sample = []
        seen = set()
        for u in homs:
            key = cat.fingerprint(u)
            if key not in seen:
                seen.add(key)
                sample.append((b, u))
        return HomClasses([[item] for item in sample], False)

    def tau(u):
        return cat.canonical_morphism(cat.compose(u, e))

    current = {cat.fingerprint(cat.canonical_morphism(u)): cat.canonical_morphism(u)
               for u in homs}
    for _ in range(len(homs) + 1):
        nxt = {}
        for u in current.values():
            v = tau(u)
            nxt[cat.fingerprint(v)] = v
        if set(nxt.keys()) == set(current.keys()):
            break
        current = nxt
    classes = [[(b, u)] for u in current.values()]
    return HomClasses(classes, True)
