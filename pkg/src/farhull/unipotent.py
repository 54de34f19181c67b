"""Unipotent matrix groups: Lie closures, Mal'tsev lattices, root subgroups, twisted fixed points."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import (
    PrimeSet,
    QMatrix,
    as_fraction,
    bracket,
    in_localization,
    is_unipotent,
    nilpotent_log,
    s_gcd,
    strip_primes,
    unipotent_exp,
    unipotent_power,
)

ENUMERATION_CAP = 10**6


class NotInSpanError(ValueError):
    pass


class CapExceededError(RuntimeError):
    def __init__(self, name: str, value: int, cap: int):
        super().__init__(f"{name} needs at least {value} elements, cap is {cap}")
        self.name, self.value, self.cap = name, value, cap


class ContainmentError(ValueError):
    pass


class EigenvalueOneError(ArithmeticError):
    def __init__(self, layer: int):
        super().__init__(f"induced map on central-series layer {layer} has eigenvalue 1")
        self.layer = layer


# ---------------------------------------------------------------------------
# spans of matrices


def _flat(X: QMatrix) -> tuple:
    return X.flat()


def independent_subset(mats: Iterable[QMatrix], start: Sequence[QMatrix] = ()) -> list[QMatrix]:
    """Greedily extend ``start`` by members of ``mats`` that raise the rank; returns the additions."""
    rows = [list(_flat(m)) for m in start]
    reduced = _Echelon(rows)
    added = []
    for m in mats:
        if reduced.add(list(_flat(m))):
            added.append(m)
    return added


class _Echelon:
    """Incremental row echelon form used for rank tests."""

    def __init__(self, rows=()):
        self.rows: list[tuple[int, list[Fraction]]] = []
        for r in rows:
            self.add(r)

    def reduce(self, v):
        v = [as_fraction(x) for x in v]
        for p, r in self.rows:
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, r)]
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            return False
        inv = 1 / v[p]
        v = [x * inv for x in v]
        for k, (q, r) in enumerate(self.rows):
            if r[p]:
                c = r[p]
                self.rows[k] = (q, [a - c * b for a, b in zip(r, v)])
        self.rows.append((p, v))
        return True

    def __len__(self):
        return len(self.rows)


def span_basis(mats: Iterable[QMatrix]) -> list[QMatrix]:
    return independent_subset(mats)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieBasis:
    """Ordered basis of a nilpotent matrix Lie algebra.

    ``layers`` holds the start index of each block of a central flag: the span of
    ``basis[layers[k]:]`` is an ideal whose bracket with the algebra lies in the
    span of the next block onwards.  ``recipes`` records how each element of a
    closure-order basis was produced.
    """

    ambient: int
    basis: tuple[QMatrix, ...]
    layers: tuple[int, ...] = (0,)
    recipes: tuple | None = None
    tails: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        for b in self.basis:
            if b.shape != (self.ambient, self.ambient):
                raise ValueError("basis matrix has wrong size")
        rows = [list(_flat(b)) for b in self.basis]
        if rows:
            M = QMatrix(rows)
            _, piv = M.rref()
            if len(piv) != len(rows):
                raise ValueError("basis matrices are linearly dependent")
            sub = QMatrix([[r[p] for p in piv] for r in rows])  # d x d
            object.__setattr__(self, "_piv", piv)
            object.__setattr__(self, "_solve", sub.inverse())
        else:
            object.__setattr__(self, "_piv", ())
            object.__setattr__(self, "_solve", None)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, X: QMatrix) -> tuple:
        if self.dim == 0:
            if X.is_zero():
                return ()
            raise NotInSpanError("nonzero matrix in the zero algebra")
        f = _flat(X)
        rhs = [f[p] for p in self._piv]
        # coefficients c with sum c_i b_i = X; restricted to pivots: c^T sub = rhs
        c = tuple(sum((rhs[k] * self._solve[k, i] for k in range(self.dim)), Fraction(0))
                  for i in range(self.dim))
        if self.element(c) != X:
            raise NotInSpanError("matrix is not in the span of the basis")
        return c

    def contains(self, X: QMatrix) -> bool:
        try:
            self.coords(X)
        except NotInSpanError:
            return False
        return True

    def element(self, coords: Sequence) -> QMatrix:
        out = QMatrix.zeros(self.ambient)
        for c, b in zip(coords, self.basis):
            if c:
                out = out + as_fraction(c) * b
        return out

    def group_element(self, coords: Sequence) -> QMatrix:
        return unipotent_exp(self.element(coords))

    def log_coords(self, g: QMatrix) -> tuple:
        return self.coords(nilpotent_log(g))

    def matrix_of(self, f) -> QMatrix:
        """Matrix (columns = images of basis vectors) of a linear map on the span."""
        if self.dim == 0:
            return QMatrix([[0]])
        cols = [self.coords(f(b)) for b in self.basis]
        return QMatrix(list(zip(*cols)))

    def apply_linear(self, M: QMatrix, X: QMatrix) -> QMatrix:
        return self.element(M.apply(self.coords(X)))

    def is_bracket_closed(self) -> bool:
        return all(self.contains(bracket(a, b)) for a, b in itertools.combinations(self.basis, 2))

    def layer_ranges(self) -> list[range]:
        bounds = list(self.layers) + [self.dim]
        return [range(bounds[i], bounds[i + 1]) for i in range(len(self.layers)) if bounds[i] < bounds[i + 1]]

    def layer_of(self, index: int) -> int:
        for k, r in enumerate(self.layer_ranges()):
            if index in r:
                return k
        raise IndexError(index)

    # -- series and adapted bases
    def lower_central_series(self) -> list[list[QMatrix]]:
        series = [list(self.basis)]
        while series[-1]:
            nxt = span_basis(bracket(a, b) for a in self.basis for b in series[-1])
            series.append(nxt)
        return series

    def nilpotency_class(self) -> int:
        return len(self.lower_central_series()) - 1

    def adapted(self, ideals: Sequence[Sequence[QMatrix]] = (), names: Sequence[str] = ()) -> "LieBasis":
        """Basis adapted to a central refinement of L >= ideals[0] >= ideals[1] >= ... >= 0.

        Each given ideal becomes a tail of the basis; its start index is stored in
        ``tails`` under the matching name.
        """
        chain = [list(self.basis)] + [span_basis(I) for I in ideals] + [[]]
        for I in chain[1:-1]:
            for b in I:
                if not self.contains(b):
                    raise NotInSpanError("ideal is not inside the algebra")
        steps: list[list[QMatrix]] = []
        marks: list[int] = []
        for top, bottom in zip(chain, chain[1:]):
            marks.append(len(steps))
            cur = top
            while True:
                steps.append(cur)
                nxt = span_basis(list(bottom) + [bracket(a, b) for a in self.basis for b in cur])
                if len(nxt) == len(bottom):
                    break
                if len(nxt) >= len(cur):
                    raise ValueError("chain is not a central filtration; algebra not nilpotent?")
                cur = nxt
        steps.append(chain[-1])
        # build bottom-up, preferring vectors that appear earlier in the chain lists
        basis_rev: list[list[QMatrix]] = []
        have: list[QMatrix] = []
        for k in range(len(steps) - 2, -1, -1):
            new = independent_subset(steps[k], have)
            basis_rev.append(new)
            have = have + new
        blocks = list(reversed(basis_rev))
        basis, layers = [], []
        for blk in blocks:
            if blk:
                layers.append(len(basis))
                basis.extend(blk)
        tails = {}
        for name, mark in zip(names, marks[1:]):
            tails[name] = sum(len(b) for b in blocks[:mark])
        return LieBasis(self.ambient, tuple(basis), tuple(layers) if layers else (0,), None, tails)

    def adapted_lcs(self) -> "LieBasis":
        return self.adapted()

    def same_span(self, other: "LieBasis") -> bool:
        return self.dim == other.dim and all(self.contains(b) for b in other.basis)


def lie_closure(generators: Sequence[QMatrix], conjugators: Sequence[QMatrix] = (),
                logs: Sequence[QMatrix] | None = None) -> LieBasis:
    """Smallest Lie algebra containing the logs of unipotent ``generators`` (or the given ``logs``),
    closed under brackets and under Ad(s) and Ad(s^-1) for every s in ``conjugators``."""
    if logs is None:
        for g in generators:
            if not is_unipotent(g):
                raise ValueError("lie_closure needs unipotent generators")
        logs = [nilpotent_log(g) for g in generators]
    if not logs and not generators:
        raise ValueError("no generators")
    n = (logs[0] if logs else generators[0]).rows
    conj = [(s, s.inverse()) for s in conjugators]
    ech = _Echelon()
    basis: list[QMatrix] = []
    recipes: list[tuple] = []

    def push(X, recipe):
        if ech.add(list(_flat(X))):
            basis.append(X)
            recipes.append(recipe)

    for j, X in enumerate(logs):
        push(X, ("log", j))
    i = 0
    while i < len(basis):
        for a in range(i):
            push(bracket(basis[a], basis[i]), ("br", a, i))
        for j, (s, si) in enumerate(conj):
            push(s * basis[i] * si, ("ad", j, 1, i))
            push(si * basis[i] * s, ("ad", j, -1, i))
        i += 1
    return LieBasis(n, tuple(basis), (0,), tuple(recipes))


# ---------------------------------------------------------------------------
# Mal'tsev lattices


@dataclass(frozen=True, eq=False)
class MalcevLattice:
    """A lattice {g_1^a_1 ... g_h^a_h : a_j in R_j} in a unipotent group.

    ``lie`` is a flag-adapted basis; ``table[j]`` is None or an element whose log
    has zero coordinates before position j and coordinate ``leads[j]`` at j.
    Positions whose ring is not Z must lie in an abelian tail ideal.
    """

    lie: LieBasis
    table: tuple
    leads: tuple
    rings: tuple
    generators: tuple = ()

    @property
    def hirsch_length(self) -> int:
        return sum(1 for g in self.table if g is not None)

    @property
    def sequence(self) -> list[QMatrix]:
        return [g for g in self.table if g is not None]

    @classmethod
    def from_generators(cls, lie: LieBasis, generators: Sequence[QMatrix],
                        rings: Sequence[PrimeSet] | PrimeSet | None = None,
                        max_rounds: int = 200) -> "MalcevLattice":
        h = lie.dim
        if rings is None:
            rings = PrimeSet()
        if isinstance(rings, PrimeSet):
            rings = [rings] * h
        rings = tuple(rings)
        table: list = [None] * h
        leads: list = [None] * h
        I = QMatrix.identity(lie.ambient)

        def insert(x: QMatrix) -> bool:
            changed = False
            while x != I:
                c = lie.log_coords(x)
                j = next(i for i, v in enumerate(c) if v)
                if table[j] is None:
                    table[j], leads[j] = x, c[j]
                    return True
                g, a, R = table[j], leads[j], rings[j]
                q = c[j] / a
                if in_localization(q, R):
                    x = unipotent_power(g, -q) * x
                    continue
                d, u, v = s_gcd(a, c[j], R)
                table[j], leads[j] = unipotent_power(g, u) * unipotent_power(x, v), d
                insert(g)
                changed = True
            return changed

        for g in generators:
            insert(g)
        for _ in range(max_rounds):
            changed = False
            seq = [g for g in table if g is not None]
            for a, b in itertools.combinations(seq, 2):
                comm = a * b * a.inverse() * b.inverse()
                if insert(comm):
                    changed = True
            if not changed:
                break
        else:
            raise CapExceededError("commutator closure rounds", max_rounds, max_rounds)
        for j, R in enumerate(rings):
            if len(R) and table[j] is not None:
                start = j
                tail = list(range(start, h))
                for a in tail:
                    for b in tail:
                        if not bracket(lie.basis[a], lie.basis[b]).is_zero():
                            raise ValueError("localized positions must form an abelian tail")
        return cls(lie, tuple(table), tuple(leads), rings, tuple(generators))

    def sift(self, x: QMatrix) -> tuple[tuple, QMatrix]:
        """Coordinates of the second kind and the unresolved remainder."""
        I = QMatrix.identity(self.lie.ambient)
        coords = [Fraction(0)] * self.lie.dim
        while x != I:
            c = self.lie.log_coords(x)
            j = next(i for i, v in enumerate(c) if v)
            if self.table[j] is None:
                break
            e = c[j] / self.leads[j]
            if not in_localization(e, self.rings[j]):
                break
            coords[j] = e
            x = unipotent_power(self.table[j], -e) * x
        return tuple(coords), x

    def membership(self, x: QMatrix) -> tuple[bool, tuple | None]:
        if x.shape != (self.lie.ambient, self.lie.ambient) or not is_unipotent(x):
            return False, None
        try:
            coords, rem = self.sift(x)
        except NotInSpanError:
            return False, None
        if not rem.is_identity():
            return False, None
        return True, tuple(c for c, g in zip(coords, self.table) if g is not None)

    def contains(self, x: QMatrix) -> bool:
        return self.membership(x)[0]

    def element(self, coords: Sequence) -> QMatrix:
        """Inverse of the coordinate map (coordinates on filled positions)."""
        out = QMatrix.identity(self.lie.ambient)
        for g, a in zip(self.sequence, coords):
            out = out * unipotent_power(g, a)
        return out

    def is_subgroup_of(self, other: "MalcevLattice") -> bool:
        return all(other.contains(g) for g in self.sequence)

    def __eq__(self, other):
        if not isinstance(other, MalcevLattice):
            return NotImplemented
        return (self.lie.ambient == other.lie.ambient and self.rings == other.rings
                and self.is_subgroup_of(other) and other.is_subgroup_of(self))

    __hash__ = None

    def restricted_to(self, start: int) -> "MalcevLattice":
        """Intersection with exp of the tail ideal spanned by basis[start:]."""
        table = tuple(g if i >= start else None for i, g in enumerate(self.table))
        leads = tuple(a if i >= start else None for i, a in enumerate(self.leads))
        return MalcevLattice(self.lie, table, leads, self.rings, tuple(g for g in table if g is not None))

    def layer_lattice_matrix(self, layer: range) -> QMatrix:
        """Columns: layer coordinates of the table elements sitting in ``layer``."""
        cols = []
        for j in layer:
            if self.table[j] is None:
                raise ValueError("lattice is not full rank on this layer")
            c = self.lie.log_coords(self.table[j])
            cols.append([c[i] for i in layer])
        return QMatrix(list(zip(*cols)))


def subgroup_index(sub: MalcevLattice, sup: MalcevLattice) -> int | None:
    """[sup : sub]; None when infinite.  Raises ContainmentError if sub is not inside sup."""
    if not sub.lie.same_span(sup.lie) or sub.lie.basis != sup.lie.basis:
        raise ValueError("lattices must share the adapted basis")
    if not sub.is_subgroup_of(sup):
        raise ContainmentError("first lattice is not contained in the second")
    out = 1
    for j in range(sup.lie.dim):
        gs, gp = sub.table[j], sup.table[j]
        if gp is None:
            continue
        if gs is None or sub.rings[j] != sup.rings[j]:
            return None
        ratio = sub.leads[j] / sup.leads[j]
        out *= strip_primes(ratio.numerator, sup.rings[j])
    return out


def root_subgroup(N: MalcevLattice, m: int, cap: int = ENUMERATION_CAP) -> MalcevLattice:
    """The lattice generated by all x with x^m in N."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return N
    lie = N.lie
    c = max(lie.nilpotency_class(), 1)
    seq = N.sequence
    h = len(seq)
    over = MalcevLattice.from_generators(
        lie, [unipotent_power(g, Fraction(1, m**c)) for g in seq], N.rings)

    def build(B: int) -> tuple[MalcevLattice, list[QMatrix]]:
        count = (2 * B + 1) ** h
        if count > cap:
            raise CapExceededError("root enumeration box", count, cap)
        roots = []
        for a in itertools.product(range(-B, B + 1), repeat=h):
            if any(a):
                n = N.element(a)
                roots.append(unipotent_exp(nilpotent_log(n) * Fraction(1, m)))
        L = MalcevLattice.from_generators(lie, list(seq) + roots, N.rings)
        return L, roots

    B = 1
    L, roots = build(B)
    while True:
        L2, roots2 = build(B + 1)
        if L2 == L:
            break
        L, roots, B = L2, roots2, B + 1
    if not L.is_subgroup_of(over):
        raise ArithmeticError("root subgroup escaped the overgroup bound")
    if not N.is_subgroup_of(L) or subgroup_index(N, L) is None:
        raise ArithmeticError("root subgroup has infinite index over N")
    used = _minimal_generators(lie, list(seq), roots, N.rings, L)
    for g in used:
        if not N.contains(g ** m):
            raise ArithmeticError("root generator does not power into N")
    return MalcevLattice(L.lie, L.table, L.leads, L.rings, tuple(used))


def _minimal_generators(lie, base, extra, rings, target) -> list[QMatrix]:
    gens = list(base)
    cur = MalcevLattice.from_generators(lie, gens, rings)
    for x in extra:
        if cur == target:
            break
        if not cur.contains(x):
            gens.append(x)
            cur = MalcevLattice.from_generators(lie, gens, rings)
    return gens


# ---------------------------------------------------------------------------


def layer_block(lie: LieBasis, phi: QMatrix, layer: range) -> QMatrix:
    return QMatrix([[phi[i, j] for j in layer] for i in layer])


def lie_map_apply(lie: LieBasis, phi: QMatrix, g: QMatrix) -> QMatrix:
    return lie.group_element(phi.apply(lie.log_coords(g)))


def twisted_fixed_point_solve(lie: LieBasis, phi: QMatrix, y: QMatrix) -> QMatrix:
    """The unique z with z * Phi(z)^-1 = y, Phi = exp . phi . log on a central-flag basis."""
    ranges = lie.layer_ranges()
    blocks = []
    for k, r in enumerate(ranges):
        B = layer_block(lie, phi, r)
        IB = QMatrix.identity(len(r)) - B
        if IB.det() == 0:
            raise EigenvalueOneError(k)
        blocks.append(IB.inverse())
    z = QMatrix.identity(lie.ambient)

    def F(z):
        return z * lie_map_apply(lie, phi, z).inverse()

    for r, inv in zip(ranges, blocks):
        e = F(z).inverse() * y
        c = lie.log_coords(e)
        v = inv.apply([c[i] for i in r])
        full = [Fraction(0)] * lie.dim
        for i, val in zip(r, v):
            full[i] = val
        z = z * lie.group_element(full)
    if F(z) != y:
        raise ArithmeticError("twisted fixed-point verification failed")
    return z
