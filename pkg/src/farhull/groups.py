"""Supported group families, exact group laws, Hirsch length, Fitting subgroup and spectrum."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

from .exact import (
    PrimeSet,
    QMatrix,
    as_fraction,
    factor_int,
    in_localization,
    is_unipotent,
    jordan_chevalley,
    nilpotent_log,
    unipotent_power,
)
from .torus import has_rational_spectrum, unipotent_exponent_lattice
from .unipotent import LieBasis, MalcevLattice, lie_closure


class SpecError(ValueError):
    """Invalid or unsupported group description."""


class MembershipError(ValueError):
    pass


Vector = tuple


def _vec(v) -> Vector:
    return tuple(as_fraction(x) for x in v)


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class AbelianSpec:
    """The module sum_i Z[1/S] g_i inside Q^d, g_i linearly independent."""

    generators: tuple
    primes: PrimeSet = PrimeSet()
    kind = "abelian"

    def __post_init__(self):
        gens = tuple(_vec(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise SpecError("abelian spec needs at least one generator")
        if len({len(g) for g in gens}) != 1:
            raise SpecError("generators must have equal length")
        if QMatrix([list(g) for g in gens]).rank() != len(gens):
            raise SpecError("module generators must be linearly independent")

    @property
    def ambient(self) -> int:
        return len(self.generators[0])

    @property
    def rank(self) -> int:
        return len(self.generators)

    @cached_property
    def _basis(self) -> QMatrix:
        return QMatrix([list(g) for g in self.generators]).T  # d x k

    def coords(self, v) -> tuple | None:
        """Coordinates in the generators, or None if v is outside their Q-span."""
        return self._basis.solve(_vec(v))

    def contains(self, v) -> bool:
        c = self.coords(v)
        return c is not None and all(in_localization(x, self.primes) for x in c)

    def vector(self, coords) -> Vector:
        return self._basis.apply(coords)


@dataclass(frozen=True)
class UnipotentSpec:
    """The group generated by unipotent rational matrices (a lattice in its Zariski closure)."""

    generators: tuple
    kind = "unipotent"

    def __post_init__(self):
        gens = tuple(g if isinstance(g, QMatrix) else QMatrix(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise SpecError("unipotent spec needs at least one generator")
        for g in gens:
            if not g.is_square or g.rows != gens[0].rows or not is_unipotent(g):
                raise SpecError("generators must be unipotent square matrices of one size")

    @cached_property
    def closure(self) -> LieBasis:
        return lie_closure(self.generators)

    @cached_property
    def lie(self) -> LieBasis:
        return self.closure.adapted()

    @cached_property
    def lattice(self) -> MalcevLattice:
        return MalcevLattice.from_generators(self.lie, self.generators)


@dataclass(frozen=True)
class SplitSpec:
    """M x| Z^r with M = module (full rank in Q^d) and commuting actors A_j; (v,e)(w,f) = (v + A^e w, e+f)."""

    module: AbelianSpec
    actors: tuple
    kind = "split"

    def __post_init__(self):
        acts = tuple(a if isinstance(a, QMatrix) else QMatrix(a) for a in self.actors)
        object.__setattr__(self, "actors", acts)
        d = self.module.ambient
        if self.module.rank != d:
            raise SpecError("split module must have full rank in its ambient space")
        if not acts:
            raise SpecError("split spec needs at least one actor")
        for A in acts:
            if A.shape != (d, d) or A.det() == 0:
                raise SpecError("actors must be invertible d x d matrices")
            for B in (A, A.inverse()):
                for g in self.module.generators:
                    if not self.module.contains(B.apply(g)):
                        raise SpecError("actor does not preserve the module; enlarge the prime set")
        for i, A in enumerate(acts):
            for B in acts[i + 1:]:
                if A * B != B * A:
                    raise SpecError("actors must commute")

    @property
    def actor_rank(self) -> int:
        return len(self.actors)

    def actor_power(self, e: Sequence[int]) -> QMatrix:
        out = QMatrix.identity(self.module.ambient)
        for A, k in zip(self.actors, e):
            if k:
                out = out * A ** int(k)
        return out

    @cached_property
    def semisimple_actors(self) -> tuple:
        return tuple(jordan_chevalley(A)[0] for A in self.actors)

    @cached_property
    def unipotent_kernel(self) -> tuple:
        """Basis of K_u = {e : A^e unipotent}."""
        return tuple(unipotent_exponent_lattice(self.actors, self.semisimple_actors))


@dataclass(frozen=True)
class BSSpec:
    """BS(1,n) = <x, t | t^-1 x t = x^n> in the affine model; translations unit * Z[1/n]."""

    n: int
    unit: Fraction = Fraction(1)
    kind = "bs"

    def __post_init__(self):
        if self.n in (-1, 0, 1):
            raise SpecError("BS(1,n) needs |n| >= 2")
        object.__setattr__(self, "unit", as_fraction(self.unit))
        if self.unit <= 0:
            raise SpecError("unit must be positive")

    @property
    def primes(self) -> PrimeSet:
        return PrimeSet.of(factor_int(self.n))


GroupSpec = Union[AbelianSpec, UnipotentSpec, SplitSpec, BSSpec]


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class BSElement:
    scale: Fraction
    translation: Fraction

    def __post_init__(self):
        object.__setattr__(self, "scale", as_fraction(self.scale))
        object.__setattr__(self, "translation", as_fraction(self.translation))

    def t_exponent(self, n: int) -> int:
        """m with scale = n^-m."""
        a = abs(self.scale)
        big = a.denominator if a < 1 else a.numerator
        if (a.numerator if a < 1 else a.denominator) != 1:
            raise MembershipError(f"scale {self.scale} is not a power of 1/{n}")
        m = 0
        while big > 1 and big % abs(n) == 0:
            big //= abs(n)
            m += 1
        m = m if a < 1 else -m
        if big != 1 or Fraction(1, n) ** m != self.scale:
            raise MembershipError(f"scale {self.scale} is not a power of 1/{n}")
        return m


@dataclass(frozen=True)
class SplitElement:
    v: tuple
    e: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", _vec(self.v))
        object.__setattr__(self, "e", tuple(int(x) for x in self.e))


def bs_x(spec: BSSpec) -> BSElement:
    return BSElement(Fraction(1), spec.unit)


def bs_t(spec: BSSpec) -> BSElement:
    return BSElement(Fraction(1, spec.n), Fraction(0))


def generator_names(spec: GroupSpec) -> list[str]:
    if isinstance(spec, BSSpec):
        return ["x", "t"]
    if isinstance(spec, SplitSpec):
        return [f"m{i + 1}" for i in range(spec.module.rank)] + [f"t{j + 1}" for j in range(spec.actor_rank)]
    return [f"g{i + 1}" for i in range(len(spec.generators))]


def generators(spec: GroupSpec) -> list:
    if isinstance(spec, BSSpec):
        return [bs_x(spec), bs_t(spec)]
    if isinstance(spec, AbelianSpec):
        return list(spec.generators)
    if isinstance(spec, UnipotentSpec):
        return list(spec.generators)
    r = spec.actor_rank
    return ([SplitElement(g, (0,) * r) for g in spec.module.generators]
            + [SplitElement((0,) * spec.module.ambient, tuple(int(i == j) for i in range(r))) for j in range(r)])


def generator_dict(spec: GroupSpec) -> dict:
    return dict(zip(generator_names(spec), generators(spec)))


def identity(spec: GroupSpec):
    if isinstance(spec, BSSpec):
        return BSElement(1, 0)
    if isinstance(spec, AbelianSpec):
        return (Fraction(0),) * spec.ambient
    if isinstance(spec, UnipotentSpec):
        return QMatrix.identity(spec.generators[0].rows)
    return SplitElement((0,) * spec.module.ambient, (0,) * spec.actor_rank)


def contains(spec: GroupSpec, a) -> bool:
    if isinstance(spec, BSSpec):
        if not isinstance(a, BSElement):
            return False
        try:
            a.t_exponent(spec.n)
        except MembershipError:
            return False
        q = a.translation / spec.unit
        return in_localization(q, spec.primes)
    if isinstance(spec, AbelianSpec):
        return isinstance(a, tuple) and len(a) == spec.ambient and spec.contains(a)
    if isinstance(spec, UnipotentSpec):
        return isinstance(a, QMatrix) and spec.lattice.contains(a)
    return (isinstance(a, SplitElement) and len(a.e) == spec.actor_rank
            and len(a.v) == spec.module.ambient and spec.module.contains(a.v))


def _check(spec, *elts):
    for a in elts:
        if not contains(spec, a):
            raise MembershipError(f"{a!r} is not an element of the group")


def multiply(spec: GroupSpec, a, b, check: bool = True):
    if check:
        _check(spec, a, b)
    if isinstance(spec, BSSpec):
        return BSElement(a.scale * b.scale, a.translation + a.scale * b.translation)
    if isinstance(spec, AbelianSpec):
        return tuple(x + y for x, y in zip(a, b))
    if isinstance(spec, UnipotentSpec):
        return a * b
    Ae = spec.actor_power(a.e)
    return SplitElement(tuple(x + y for x, y in zip(a.v, Ae.apply(b.v))),
                        tuple(x + y for x, y in zip(a.e, b.e)))


def inverse(spec: GroupSpec, a, check: bool = True):
    if check:
        _check(spec, a)
    if isinstance(spec, BSSpec):
        s = 1 / a.scale
        return BSElement(s, -s * a.translation)
    if isinstance(spec, AbelianSpec):
        return tuple(-x for x in a)
    if isinstance(spec, UnipotentSpec):
        return a.inverse()
    neg = tuple(-x for x in a.e)
    return SplitElement(tuple(-x for x in spec.actor_power(neg).apply(a.v)), neg)


def power(spec: GroupSpec, a, k):
    """a^k; rational k is allowed where the root exists inside the group."""
    k = as_fraction(k)
    if k.denominator != 1:
        if isinstance(spec, AbelianSpec):
            out = tuple(k * x for x in a)
        elif isinstance(spec, UnipotentSpec):
            out = unipotent_power(a, k)
        elif isinstance(spec, BSSpec) and a.scale == 1:
            out = BSElement(1, k * a.translation)
        elif isinstance(spec, SplitSpec) and not any(a.e):
            out = SplitElement(tuple(k * x for x in a.v), a.e)
        else:
            raise MembershipError("fractional power is not defined for this element")
        _check(spec, out)
        return out
    k = int(k)
    base = a if k >= 0 else inverse(spec, a)
    k = abs(k)
    out = identity(spec)
    while k:
        if k & 1:
            out = multiply(spec, out, base, check=False)
        base = multiply(spec, base, base, check=False)
        k >>= 1
    return out


def product(spec: GroupSpec, elts: Sequence):
    out = identity(spec)
    for a in elts:
        out = multiply(spec, out, a)
    return out


def commutator(spec, a, b):
    return product(spec, [inverse(spec, a), inverse(spec, b), a, b])


def conjugate(spec, g, h):
    """g^-1 h g."""
    return product(spec, [inverse(spec, g), h, g])


def evaluate_word(spec: GroupSpec, word: str):
    """Element named by a word such as ``"t x^-2"`` or ``"m1^1/2 * t1"``; ``1`` is the identity."""
    names = generator_dict(spec)
    out = identity(spec)
    for tok in word.replace("*", " ").split():
        if tok in ("1", "e"):
            continue
        base, _, exp = tok.partition("^")
        if base not in names:
            raise SpecError(f"unknown generator {base!r}; expected one of {sorted(names)}")
        try:
            k = Fraction(exp) if exp else Fraction(1)
        except ValueError:
            raise SpecError(f"bad exponent in {tok!r}") from None
        out = multiply(spec, out, power(spec, names[base], k))
    return out


def random_element(spec: GroupSpec, rng: random.Random, size: int = 3):
    if isinstance(spec, BSSpec):
        m = rng.randint(-size, size)
        num = rng.randint(-5 * size, 5 * size)
        k = rng.randint(0, size)
        return BSElement(Fraction(1, spec.n) ** m, spec.unit * Fraction(num, abs(spec.n) ** k))
    if isinstance(spec, AbelianSpec):
        cs = [Fraction(rng.randint(-5 * size, 5 * size), _rand_denominator(spec.primes, rng, size))
              for _ in range(spec.rank)]
        return spec.vector(cs)
    if isinstance(spec, UnipotentSpec):
        out = identity(spec)
        for _ in range(size + 2):
            g = rng.choice(spec.generators)
            out = out * (g if rng.random() < 0.5 else g.inverse())
        return out
    cs = [Fraction(rng.randint(-5 * size, 5 * size), _rand_denominator(spec.module.primes, rng, size))
          for _ in range(spec.module.rank)]
    return SplitElement(spec.module.vector(cs), tuple(rng.randint(-2, 2) for _ in range(spec.actor_rank)))


def _rand_denominator(S: PrimeSet, rng, size) -> int:
    d = 1
    for p in S:
        d *= p ** rng.randint(0, size)
    return d


# ---------------------------------------------------------------------------
# structural invariants


def hirsch_length(spec: GroupSpec) -> int:
    if isinstance(spec, BSSpec):
        return 2
    if isinstance(spec, AbelianSpec):
        return spec.rank
    if isinstance(spec, UnipotentSpec):
        return spec.lattice.hirsch_length
    return spec.module.rank + spec.actor_rank


def spectrum(spec: GroupSpec) -> PrimeSet:
    if isinstance(spec, BSSpec):
        return spec.primes
    if isinstance(spec, AbelianSpec):
        return spec.primes
    if isinstance(spec, UnipotentSpec):
        return PrimeSet()
    return spec.module.primes


def is_virtually_nilpotent(spec: GroupSpec) -> bool:
    if isinstance(spec, BSSpec):
        return False
    if isinstance(spec, SplitSpec):
        K = spec.unipotent_kernel
        return len(K) == spec.actor_rank
    return True


@dataclass(frozen=True)
class FittingSubgroup:
    spec: object
    names: tuple
    generators: tuple
    hirsch_length: int
    description: str
    unipotent_exponents: tuple = field(default=())

    def contains(self, g) -> bool:
        spec = self.spec
        if not contains(spec, g):
            return False
        if isinstance(spec, BSSpec):
            return g.scale == 1
        if isinstance(spec, SplitSpec):
            if not self.unipotent_exponents:
                return not any(g.e)
            M = QMatrix([list(v) for v in self.unipotent_exponents]).T
            c = M.solve(g.e)
            return c is not None and all(x.denominator == 1 for x in c)
        return True


def fitting_subgroup(spec: GroupSpec) -> FittingSubgroup:
    if isinstance(spec, BSSpec):
        desc = f"translations {spec.unit} * Z[1/{spec.n}]" if spec.unit != 1 else f"translations Z[1/{abs(spec.n)}]"
        return FittingSubgroup(spec, ("x",), (bs_x(spec),), 1, desc)
    if isinstance(spec, (AbelianSpec, UnipotentSpec)):
        return FittingSubgroup(spec, tuple(generator_names(spec)), tuple(generators(spec)),
                               hirsch_length(spec), "whole group (nilpotent)")
    K = spec.unipotent_kernel
    d, r = spec.module.ambient, spec.actor_rank
    mods = [SplitElement(g, (0,) * r) for g in spec.module.generators]
    acts = [SplitElement((0,) * d, tuple(k)) for k in K]
    names = tuple(f"m{i + 1}" for i in range(len(mods))) + tuple(f"u{j + 1}" for j in range(len(acts)))
    desc = "module" if not K else f"module x| unipotent actor lattice of rank {len(K)}"
    return FittingSubgroup(spec, names, tuple(mods + acts), spec.module.rank + len(K), desc, tuple(K))


def validate_rational_actors(spec: SplitSpec) -> bool:
    return all(has_rational_spectrum(s) for s in spec.semisimple_actors)


def _bs_selftest():
    spec = BSSpec(2)
    x, t = bs_x(spec), bs_t(spec)
    lhs = product(spec, [inverse(spec, t), x, t])
    if lhs != power(spec, x, 2) or lhs != BSElement(1, 2):
        raise AssertionError("BS convention self-test failed")


_bs_selftest()
