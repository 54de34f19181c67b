"""Diagonalizable parts: joint eigenvalues, multiplicative relation lattices, torus ranks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .exact import (
    Poly,
    QMatrix,
    as_fraction,
    char_poly,
    cyclotomic_indices,
    factor,
    hermite_basis,
    integer_kernel,
    lattice_index,
    poly,
    poly_deg,
    poly_divmod,
    poly_monic,
    rational_roots,
    smith_normal_form,
    squarefree_part,
)


class UnsupportedSpectrumError(ValueError):
    """Raised for eigenvalue configurations outside the supported exact methods."""


@dataclass(frozen=True)
class TorusClosure:
    relations: tuple[tuple[int, ...], ...]
    rank: int
    component_count: int


def _relation_lattice(vectors: Sequence[Sequence[Fraction]], ncoord: int) -> tuple[list, list]:
    """(saturated kernel basis, relation lattice basis) for prod_i d_i^{e_i} = 1 over all d."""
    rows = []
    sign_rows = []
    for d in vectors:
        d = [as_fraction(x) for x in d]
        if any(x == 0 for x in d):
            raise ValueError("diagonal entries must be nonzero")
        facts = [factor(x).as_dict() for x in d]
        primes = sorted({p for f in facts for p in f})
        for p in primes:
            rows.append([f.get(p, 0) for f in facts])
        sign_rows.append([1 if x < 0 else 0 for x in d])
    K = integer_kernel(rows, ncoord) if rows else [tuple(int(i == j) for i in range(ncoord)) for j in range(ncoord)]
    if not K:
        return [], []
    # restrict to combinations c of K with the sign parity condition
    s = len(K)
    Srows = [[sum(r[i] * k[i] for i in range(ncoord)) for k in K] for r in sign_rows]
    aug = [row + [2 if a == b else 0 for b in range(len(Srows))] for a, row in enumerate(Srows)]
    if aug:
        sols = integer_kernel(aug, s + len(Srows))
        cs = hermite_basis([sol[:s] for sol in sols])
    else:
        cs = [tuple(int(i == j) for i in range(s)) for j in range(s)]
    L = [tuple(sum(c[j] * K[j][i] for j in range(s)) for i in range(ncoord)) for c in cs]
    return list(K), hermite_basis(L)


def torus_closure(diagonals: Sequence[Sequence]) -> TorusClosure:
    """Relations e with prod_i d_i^{e_i} = 1 for every input vector d, and the closure dimension."""
    diagonals = [tuple(as_fraction(x) for x in d) for d in diagonals]
    if not diagonals:
        raise ValueError("need at least one diagonal vector")
    n = len(diagonals[0])
    K, L = _relation_lattice(diagonals, n)
    comp = 1
    if K:
        # index of L inside the saturated lattice K
        coords = []
        KM = QMatrix([list(k) for k in K]).T
        for v in L:
            c = KM.solve(v)
            coords.append([int(x) for x in c])
        comp = lattice_index(coords, len(K)) if coords else (1 if not K else None)
        if comp is None:
            raise ArithmeticError("relation lattice is not of full rank in its saturation")
    return TorusClosure(tuple(L), n - len(L), comp)


def generator_relations(diagonals: Sequence[Sequence]) -> TorusClosure:
    """Relations among generators: e with prod_j d_j^{e_j} = 1 coordinatewise."""
    cols = list(zip(*diagonals))
    return torus_closure(cols)


# ---------------------------------------------------------------------------


def joint_eigenspaces(mats: Sequence[QMatrix]) -> list[tuple[tuple[Fraction, ...], int]]:
    """Joint eigenvalue tuples with multiplicities for commuting semisimple matrices
    with rational spectrum; raises UnsupportedSpectrumError otherwise."""
    n = mats[0].rows
    spaces: list[tuple[QMatrix | None, tuple]] = [(None, ())]
    for s in mats:
        roots = rational_roots(char_poly(s))
        new = []
        for V, vals in spaces:
            dimV = n if V is None else V.cols
            got = 0
            for lam in roots:
                D = s - lam * QMatrix.identity(n)
                if V is None:
                    null = D.nullspace()
                    if null:
                        W = QMatrix([list(v) for v in null]).T
                        new.append((W, vals + (lam,)))
                        got += len(null)
                else:
                    null = (D * V).nullspace()
                    if null:
                        W = V * QMatrix([list(v) for v in null]).T
                        new.append((W, vals + (lam,)))
                        got += len(null)
            if got != dimV:
                raise UnsupportedSpectrumError("matrix is not diagonalizable over Q on a joint eigenspace")
        spaces = new
    return [(vals, n if V is None else V.cols) for V, vals in spaces]


def diagonal_vectors(mats: Sequence[QMatrix]) -> list[tuple[Fraction, ...]]:
    """Per matrix, its diagonal in a common eigenbasis (joint eigenspaces repeated by dimension)."""
    js = joint_eigenspaces(mats)
    out = []
    for i in range(len(mats)):
        out.append(tuple(v[i] for v, d in js for _ in range(d)))
    return out


def has_rational_spectrum(A: QMatrix) -> bool:
    p = char_poly(A)
    rest = p
    for r in rational_roots(p):
        while True:
            q, rem = poly_divmod(rest, poly([-r, 1]))
            if rem:
                break
            rest = q
    return poly_deg(rest) == 0


def split_factors(p: Poly) -> tuple[list[Fraction], list[Poly]]:
    """Rational roots (distinct) and distinct irreducible non-linear monic factors of p."""
    roots = rational_roots(p)
    rest = poly_monic(p)
    for r in roots:
        while True:
            q, rem = poly_divmod(rest, poly([-r, 1]))
            if rem:
                break
            rest = q
    if poly_deg(rest) <= 0:
        return roots, []
    sf = squarefree_part(rest)
    if poly_deg(sf) == 2:
        return roots, [sf]
    import sympy  # only needed for higher-degree irrational spectra

    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(sf))
    _, facs = sympy.factor_list(expr, x)
    out = []
    for f, _ in facs:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(sympy.Poly(f, x).all_coeffs())]
        out.append(poly_monic(poly(coeffs)))
    return roots, out


def _squarefree_class(q: Fraction) -> int:
    """Squarefree integer representing q modulo squares."""
    fr = factor(q)
    out = fr.sign
    for p, e in fr.exponents:
        if e % 2:
            out *= p
    return out


def finite_order(s: QMatrix) -> int | None:
    """Multiplicative order of a semisimple matrix, or None if infinite."""
    ds = cyclotomic_indices(char_poly(s))
    if not ds:
        return None
    k = lcm(*ds)
    return k if (s**k).is_identity() else None


@dataclass(frozen=True)
class TorusInfo:
    rank: int
    rational: bool
    relations: tuple | None
    component_count: int | None
    generator_relations: tuple | None


def torus_info(mats: Sequence[QMatrix]) -> TorusInfo:
    """Dimension of the Zariski closure of the group generated by commuting semisimple matrices."""
    if not mats:
        return TorusInfo(0, True, (), 1, ())
    n = mats[0].rows
    if all(has_rational_spectrum(s) for s in mats):
        diags = diagonal_vectors(mats)
        tc = torus_closure(diags)
        gr = generator_relations(diags)
        return TorusInfo(tc.rank, True, tc.relations, tc.component_count, gr.relations)
    nontrivial = [s for s in mats if not s.is_identity()]
    if len(nontrivial) != 1:
        raise UnsupportedSpectrumError("irrational spectra are supported only for a single nontrivial generator")
    s = nontrivial[0]
    roots, quads = split_factors(char_poly(s))
    if any(poly_deg(q) > 2 for q in quads):
        raise UnsupportedSpectrumError("irreducible eigenvalue factors of degree > 2 are not supported")
    if len(quads) > 2 or len({_squarefree_class(q[1] ** 2 - 4 * q[0]) for q in quads}) != len(quads):
        raise UnsupportedSpectrumError("quadratic eigenvalue factors must lie in distinct fields (at most two)")
    rationals = [r for r in roots] + [q[0] for q in quads]  # q[0] = product of the two roots
    rows = []
    facts = [factor(x).as_dict() for x in rationals]
    primes = sorted({p for f in facts for p in f})
    for p in primes:
        rows.append([f.get(p, 0) for f in facts])
    rank = QMatrix(rows).rank() if rows else 0
    for q in quads:
        c, b = q[0], -q[1]
        tau = (b * b - 2 * c) / c
        if tau not in (-2, -1, 0, 1, 2):
            rank += 1
    order = finite_order(s)
    gens_rel = [tuple(int(i == j) for i in range(len(mats))) for j, m in enumerate(mats) if m.is_identity()]
    if order is not None:
        gens_rel += [tuple(order if m is s else 0 for m in mats)]
    return TorusInfo(rank, False, None, None, tuple(hermite_basis(gens_rel)))


def unipotent_exponent_lattice(mats: Sequence[QMatrix], semisimple: Sequence[QMatrix]) -> list[tuple[int, ...]]:
    """Basis of {e in Z^r : prod_j mats_j^{e_j} is unipotent}, given the commuting semisimple parts."""
    return [tuple(v) for v in torus_info(list(semisimple)).generator_relations]


def smith_index(vectors: Sequence[Sequence[int]]) -> list[int]:
    return list(smith_normal_form([list(v) for v in vectors]).diagonal)
