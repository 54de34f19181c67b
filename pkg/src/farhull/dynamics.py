"""Endomorphisms: relation checks, image index, Reidemeister numbers, tameness, zeta, scale invariance."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Sequence

from .exact import (
    Poly,
    PrimeSet,
    QMatrix,
    bracket,
    char_poly,
    clear_s_denominators,
    integer_matrix,
    nilpotent_log,
    poly,
    poly_deg,
    poly_divmod,
    poly_mul,
    rational_roots,
    root_of_unity_orders,
    smith_normal_form,
    strip_primes,
)
from .groups import (
    AbelianSpec,
    BSElement,
    BSSpec,
    GroupSpec,
    MembershipError,
    SpecError,
    SplitElement,
    SplitSpec,
    UnipotentSpec,
    conjugate,
    contains,
    generator_names,
    generators,
    identity,
    inverse,
    is_virtually_nilpotent,
    multiply,
    power,
)
from .hull import NonInjectiveError
from .unipotent import MalcevLattice, layer_block, lie_map_apply, subgroup_index

MAX_ORDER_SEARCH = 1000


class RelationError(ValueError):
    """A defining relation fails on the proposed generator images."""

    def __init__(self, relation: str, detail: str = ""):
        self.relation = relation
        super().__init__(f"relation {relation} fails" + (f": {detail}" if detail else ""))


class UnsupportedEndomorphismError(ValueError):
    pass


class InfiniteTermError(ArithmeticError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"R(phi^{k}) is infinite")


# ---------------------------------------------------------------------------
# endomorphisms


@dataclass(frozen=True, eq=False)
class Endomorphism:
    spec: object
    images: tuple
    verified: bool = False

    @property
    def names(self) -> tuple:
        return tuple(generator_names(self.spec))

    def image_dict(self) -> dict:
        return dict(zip(self.names, self.images))

    # -- linear data (valid once verified)
    @cached_property
    def abelian_matrix(self) -> QMatrix:
        """Coordinates of the images in the module generators (columns)."""
        return QMatrix(list(zip(*[self.spec.coords(h) for h in self.images])))

    @cached_property
    def lie_map(self) -> QMatrix:
        """Matrix of the induced Lie algebra map on ``spec.lie`` (columns = images)."""
        return _unipotent_lie_map(self.spec, self.images)

    @cached_property
    def module_map(self) -> QMatrix:
        """Split specs: the module map in ambient coordinates."""
        spec = self.spec
        d = spec.module.ambient
        H = QMatrix(list(zip(*[h.v for h in self.images[:d]])))
        return H * spec.module._basis.inverse()

    @cached_property
    def module_coords_map(self) -> QMatrix:
        B = self.spec.module._basis
        return B.inverse() * self.module_map * B

    @cached_property
    def quotient_map(self) -> QMatrix:
        """Induced map on the actor quotient Z^r (columns = images of t_j)."""
        spec = self.spec
        if isinstance(spec, BSSpec):
            return QMatrix([[self.images[1].t_exponent(spec.n)]])
        d = spec.module.ambient
        return QMatrix(list(zip(*[h.e for h in self.images[d:]])))

    @cached_property
    def bs_multiplier(self) -> Fraction:
        """BS specs: phi(x^c) = x^(beta c)."""
        return self.images[0].translation / self.spec.unit

    def __eq__(self, other):
        return isinstance(other, Endomorphism) and self.spec == other.spec and self.images == other.images

    __hash__ = None


def _unipotent_lie_map(spec: UnipotentSpec, images: Sequence[QMatrix]) -> QMatrix:
    clo = spec.closure
    logs = [nilpotent_log(h) for h in images]
    vals: list[QMatrix] = []
    for rec in clo.recipes:
        if rec[0] == "log":
            vals.append(logs[rec[1]])
        elif rec[0] == "br":
            vals.append(bracket(vals[rec[1]], vals[rec[2]]))
        else:
            raise AssertionError("unexpected recipe in a conjugation-free closure")

    def psi(X: QMatrix) -> QMatrix:
        out = QMatrix.zeros(clo.ambient)
        for c, v in zip(clo.coords(X), vals):
            if c:
                out = out + c * v
        return out

    for j, (g, lh) in enumerate(zip(spec.generators, logs)):
        if psi(nilpotent_log(g)) != lh:
            raise RelationError(f"log-linearity at g{j + 1}", "images violate a linear relation among generator logs")
    for a, b in itertools.combinations(clo.basis, 2):
        if psi(bracket(a, b)) != bracket(psi(a), psi(b)):
            raise RelationError("bracket compatibility", "images do not satisfy the commutator relations")
    return spec.lie.matrix_of(psi)


def check_endomorphism(spec: GroupSpec, images: Sequence) -> Endomorphism:
    """Validate generator images against the defining relations; raises RelationError."""
    names = generator_names(spec)
    images = tuple(images)
    if len(images) != len(names):
        raise SpecError(f"expected {len(names)} images ({', '.join(names)}), got {len(images)}")
    for nm, h in zip(names, images):
        if not contains(spec, h):
            raise MembershipError(f"image of {nm} is not an element of the group")
    phi = Endomorphism(spec, images, False)
    if isinstance(spec, BSSpec):
        x, t = images
        if conjugate(spec, t, x) != power(spec, x, spec.n):
            raise RelationError("t^-1 x t = x^n")
    elif isinstance(spec, UnipotentSpec):
        phi.lie_map  # noqa: B018  (raises on failure)
    elif isinstance(spec, SplitSpec):
        d, r = spec.module.ambient, spec.actor_rank
        for nm, h in zip(names[:d], images[:d]):
            if any(h.e):
                raise UnsupportedEndomorphismError(f"image of {nm} must lie in the module")
        L = phi.module_map
        for j in range(r):
            A_img = spec.actor_power(images[d + j].e)
            if A_img * L != L * spec.actors[j]:
                raise RelationError(f"t{j + 1} m t{j + 1}^-1 = A{j + 1} m")
        for j, k in itertools.combinations(range(r), 2):
            a, b = images[d + j], images[d + k]
            if multiply(spec, a, b) != multiply(spec, b, a):
                raise RelationError(f"[t{j + 1}, t{k + 1}] = 1")
    return Endomorphism(spec, images, True)


def identity_endomorphism(spec: GroupSpec) -> Endomorphism:
    return Endomorphism(spec, tuple(generators(spec)), True)


def apply(phi: Endomorphism, g, check: bool = True):
    """phi(g); with check=False, rational elements of the ambient completion are accepted."""
    spec = phi.spec
    if check and not contains(spec, g):
        raise MembershipError(f"{g!r} is not an element of the group")
    if isinstance(spec, AbelianSpec):
        c = spec.coords(g)
        return tuple(sum((ci * h[i] for ci, h in zip(c, phi.images)), Fraction(0)) for i in range(spec.ambient))
    if isinstance(spec, UnipotentSpec):
        return lie_map_apply(spec.lie, phi.lie_map, g)
    if isinstance(spec, BSSpec):
        k = g.t_exponent(spec.n)
        base = BSElement(1, phi.bs_multiplier * g.translation)
        return multiply(spec, base, power(spec, phi.images[1], k), check=False)
    d = spec.module.ambient
    out = SplitElement(phi.module_map.apply(g.v), (0,) * spec.actor_rank)
    for h, e in zip(phi.images[d:], g.e):
        if e:
            out = multiply(spec, out, power(spec, h, e), check=False)
    return out


def compose(phi: Endomorphism, psi: Endomorphism) -> Endomorphism:
    """phi o psi."""
    return Endomorphism(phi.spec, tuple(apply(phi, h) for h in psi.images), phi.verified and psi.verified)


def endo_power(phi: Endomorphism, k: int) -> Endomorphism:
    if k < 0:
        raise ValueError("endomorphism powers must be non-negative")
    out = identity_endomorphism(phi.spec)
    base = phi
    while k:
        if k & 1:
            out = compose(base, out)
        base = compose(base, base)
        k >>= 1
    return out


def _require_verified(phi: Endomorphism):
    if not phi.verified:
        raise ValueError("endomorphism has not been verified; use check_endomorphism")


# ---------------------------------------------------------------------------
# image index


def is_injective(phi: Endomorphism) -> bool:
    spec = phi.spec
    if isinstance(spec, AbelianSpec):
        return phi.abelian_matrix.det() != 0
    if isinstance(spec, UnipotentSpec):
        return phi.lie_map.det() != 0
    if isinstance(spec, BSSpec):
        return phi.bs_multiplier != 0
    return phi.module_map.det() != 0 and phi.quotient_map.det() != 0


def _coker(A: QMatrix, S: PrimeSet) -> tuple[int | None, list[int]]:
    snf = smith_normal_form(integer_matrix(clear_s_denominators(A, S)))
    diag = [strip_primes(d, S) if d else 0 for d in snf.diagonal]
    if any(d == 0 for d in diag):
        return None, diag
    return reduce(lambda a, b: a * b, diag, 1), diag


def image_index(phi: Endomorphism) -> int | None:
    """[Gamma : phi(Gamma)]; None when infinite.  Raises NonInjectiveError for non-injective phi."""
    _require_verified(phi)
    spec = phi.spec
    if not is_injective(phi):
        raise NonInjectiveError("endomorphism is not injective")
    if isinstance(spec, AbelianSpec):
        out = _coker(phi.abelian_matrix, spec.primes)[0]
    elif isinstance(spec, UnipotentSpec):
        img = MalcevLattice.from_generators(spec.lie, list(phi.images))
        out = subgroup_index(img, spec.lattice)
    elif isinstance(spec, BSSpec):
        fit = _coker(QMatrix([[phi.bs_multiplier]]), spec.primes)[0]
        out = fit * abs(int(phi.quotient_map.det()))
    else:
        fit = _coker(phi.module_coords_map, spec.module.primes)[0]
        out = None if fit is None else fit * abs(int(phi.quotient_map.det()))
    if out is None:
        raise AssertionError("injective endomorphism with infinite-index image")
    return out


# ---------------------------------------------------------------------------
# Reidemeister numbers


@dataclass(frozen=True)
class ReidemeisterResult:
    value: int | None
    certificate: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.value is not None


def reidemeister_abelian(M: QMatrix, S: PrimeSet = PrimeSet(), layer: str = "module") -> ReidemeisterResult:
    """Twisted classes of x -> Mx on Z[1/S]^k: the cokernel of I - M."""
    IM = QMatrix.identity(M.rows) - M
    if IM.det() == 0:
        vec = IM.nullspace()[0]
        return ReidemeisterResult(None, {"kind": "eigenvalue-one", "layer": layer, "vector": list(vec)})
    value, diag = _coker(IM, S)
    return ReidemeisterResult(value, {"kind": "cokernel", "layers": [{"layer": layer, "diagonal": diag}]})


def layer_maps(phi: Endomorphism) -> list[QMatrix]:
    """Induced maps on the layer lattices of a unipotent spec, in lattice coordinates."""
    spec = phi.spec
    lie, Phi = spec.lie, phi.lie_map
    out = []
    for r in lie.layer_ranges():
        for j in r:
            if any(Phi[i, j] for i in range(r.start)):
                raise AssertionError("layer filtration is not invariant")
        Lam = spec.lattice.layer_lattice_matrix(r)
        C = Lam.inverse() * layer_block(lie, Phi, r) * Lam
        if not C.is_integral():
            raise AssertionError("layer map does not preserve the layer lattice")
        out.append(C)
    return out


def reidemeister_nilpotent(phi: Endomorphism) -> ReidemeisterResult:
    """Product over central-series layers of the layer cokernel orders."""
    spec = phi.spec
    if isinstance(spec, AbelianSpec):
        return reidemeister_abelian(phi.abelian_matrix, spec.primes)
    value, layers = 1, []
    for k, C in enumerate(layer_maps(phi)):
        res = reidemeister_abelian(C, PrimeSet(), layer=f"layer {k + 1}")
        if not res.finite:
            return res
        value *= res.value
        layers += res.certificate["layers"]
    return ReidemeisterResult(value, {"kind": "cokernel", "layers": layers})


def _quotient_representatives(E: QMatrix) -> list[tuple[int, ...]]:
    """Representatives of Z^r / (I - E) Z^r (assumed finite)."""
    r = E.rows
    snf = smith_normal_form(integer_matrix(QMatrix.identity(r) - E))
    Linv = QMatrix([list(row) for row in snf.left]).inverse()
    reps = []
    for y in itertools.product(*[range(d) for d in snf.diagonal]):
        reps.append(tuple(int(v) for v in Linv.apply(y)))
    return reps


def reidemeister_bs(phi: Endomorphism) -> ReidemeisterResult:
    spec = phi.spec
    a = int(phi.quotient_map[0, 0])
    if a == 1:
        return ReidemeisterResult(None, {"kind": "quotient-identity", "quotient_map": [[1]]})
    total, fibers = 0, []
    for i in range(abs(1 - a)):
        c = phi.bs_multiplier * Fraction(1, spec.n) ** i
        res = reidemeister_abelian(QMatrix([[c]]), spec.primes, layer=f"fiber t^{i}")
        if not res.finite:
            return ReidemeisterResult(None, {"kind": "fiber", "representative": [i], "inner": res.certificate})
        total += res.value
        fibers.append({"representative": [i], "value": res.value})
    # finiteness transfers to the abelian quotient Z with the induced map x a
    assert reidemeister_abelian(QMatrix([[a]])).finite
    return ReidemeisterResult(total, {"kind": "fiber-sum", "quotient_map": [[a]], "fibers": fibers})


def reidemeister_split(phi: Endomorphism) -> ReidemeisterResult:
    spec = phi.spec
    E = phi.quotient_map
    q = reidemeister_abelian(E, PrimeSet(), layer="actor quotient")
    if not q.finite:
        return ReidemeisterResult(None, {"kind": "quotient", "inner": q.certificate})
    B = spec.module._basis
    Binv = B.inverse()
    total, fibers = 0, []
    for e in _quotient_representatives(E):
        F = Binv * spec.actor_power(e) * phi.module_map * B
        res = reidemeister_abelian(F, spec.module.primes, layer=f"fiber {list(e)}")
        if not res.finite:
            return ReidemeisterResult(None, {"kind": "fiber", "representative": list(e), "inner": res.certificate})
        total += res.value
        fibers.append({"representative": list(e), "value": res.value})
    return ReidemeisterResult(total, {"kind": "fiber-sum", "quotient_map": E.tolist(), "fibers": fibers})


def reidemeister(phi: Endomorphism) -> ReidemeisterResult:
    _require_verified(phi)
    spec = phi.spec
    if isinstance(spec, (AbelianSpec, UnipotentSpec)):
        return reidemeister_nilpotent(phi)
    if isinstance(spec, BSSpec):
        return reidemeister_bs(phi)
    return reidemeister_split(phi)


# ---------------------------------------------------------------------------
# tameness


@dataclass(frozen=True)
class TameResult:
    tame: bool
    obstruction: dict | None = None
    power: int | None = None


def _layer_matrices(phi: Endomorphism) -> list[tuple[str, QMatrix]]:
    spec = phi.spec
    if isinstance(spec, AbelianSpec):
        return [("module", phi.abelian_matrix)]
    if isinstance(spec, UnipotentSpec):
        return [(f"layer {k + 1}", C) for k, C in enumerate(layer_maps(phi))]
    if isinstance(spec, BSSpec):
        return [("actor quotient", phi.quotient_map)]
    out = [("actor quotient", phi.quotient_map)]
    if is_virtually_nilpotent(spec):
        out.append(("module", phi.module_coords_map))
    return out


def tame_check(phi: Endomorphism) -> TameResult:
    """Tame iff no layer map has a root-of-unity eigenvalue; obstructions are re-verified."""
    _require_verified(phi)
    if not is_injective(phi):
        raise NonInjectiveError("tameness is analysed for injective endomorphisms")
    for name, M in _layer_matrices(phi):
        orders = root_of_unity_orders(M)
        if orders:
            d = min(orders)
            res = reidemeister(endo_power(phi, d))
            assert not res.finite, "cyclotomic obstruction did not produce an infinite Reidemeister number"
            return TameResult(False, {"layer": name, "cyclotomic": d, "certificate": res.certificate}, d)
    if not is_virtually_nilpotent(phi.spec):
        raise AssertionError("monomorphism of a non-virtually-nilpotent group induced an infinite-order quotient map")
    return TameResult(True)


# ---------------------------------------------------------------------------
# zeta functions


def exp_series(terms: Sequence[int], divide: bool = True) -> list[Fraction]:
    """Coefficients c_0..c_N of exp(sum R_k z^k / k) (or without 1/k when divide is False)."""
    c = [Fraction(1)]
    for n in range(1, len(terms) + 1):
        if divide:
            s = sum(terms[k - 1] * c[n - k] for k in range(1, n + 1))
        else:
            s = sum(k * terms[k - 1] * c[n - k] for k in range(1, n + 1))
        c.append(Fraction(s, n))
    return c


def series_quotient(P: Sequence, Q: Sequence, count: int) -> list[Fraction]:
    """First ``count`` coefficients of P/Q, Q(0) != 0."""
    P = [Fraction(x) for x in P]
    Q = [Fraction(x) for x in Q]
    out = []
    for n in range(count):
        s = (P[n] if n < len(P) else 0) - sum(Q[j] * out[n - j] for j in range(1, min(n, len(Q) - 1) + 1))
        out.append(s / Q[0])
    return out


def log_terms(c: Sequence[Fraction]) -> list[Fraction]:
    """Inverse of exp_series: R_1..R_N from c_0 = 1, c_1, ..., c_N."""
    R: list[Fraction] = []
    for n in range(1, len(c)):
        R.append(n * c[n] - sum(R[k - 1] * c[n - k] for k in range(1, n)))
    return R


def pade(c: Sequence[Fraction]) -> tuple[Poly, Poly] | None:
    """P/Q with Q(0) = 1 and minimal deg P + deg Q < len(c) - 1 matching every coefficient."""
    M = len(c) - 1

    def coef(i):
        return c[i] if i >= 0 else Fraction(0)

    for total in range(M):
        for q in range(total + 1):
            p = total - q
            if q:
                A = QMatrix([[coef(i - j) for j in range(1, q + 1)] for i in range(p + 1, p + q + 1)])
                sol = A.solve([-coef(i) for i in range(p + 1, p + q + 1)])
                if sol is None:
                    continue
                Q = [Fraction(1)] + list(sol)
            else:
                Q = [Fraction(1)]
            conv = [sum(Q[j] * coef(i - j) for j in range(len(Q))) for i in range(M + 1)]
            if all(x == 0 for x in conv[p + 1:]):
                return poly(conv[:p + 1]), poly(Q)
    return None


def _integral_pair(P: Poly, Q: Poly) -> tuple[tuple[int, ...], tuple[int, ...]]:
    den = lcm(*(x.denominator for x in P + Q))
    Pi, Qi = [int(x * den) for x in P], [int(x * den) for x in Q]
    g = reduce(gcd, Pi + Qi)
    return tuple(x // g for x in Pi), tuple(x // g for x in Qi)


@dataclass(frozen=True)
class ZetaReport:
    terms: tuple
    coefficients: tuple
    numerator: tuple | None
    denominator: tuple | None
    matched_terms: int
    raw_coefficients: tuple
    raw_numerator: tuple | None
    raw_denominator: tuple | None
    convention: str = "exp(sum_n R(phi^n) z^n / n)"


def reconstruct(terms: Sequence[int], divide: bool = True):
    """(numerator, denominator, matched) for the zeta series of the given terms."""
    c = exp_series(terms, divide)
    pq = pade(c)
    if pq is None:
        return None, None, 0
    P, Q = _integral_pair(*pq)
    expanded = series_quotient(P, Q, len(c))
    back = log_terms(expanded) if divide else _raw_log_terms(expanded)
    matched = 0
    for a, b in zip(back, terms):
        if a != b:
            break
        matched += 1
    return P, Q, matched


def _raw_log_terms(c: Sequence[Fraction]) -> list[Fraction]:
    R: list[Fraction] = []
    for n in range(1, len(c)):
        R.append((n * c[n] - sum(k * R[k - 1] * c[n - k] for k in range(1, n))) / n)
    return R


def reidemeister_terms(phi: Endomorphism, N: int) -> list[int]:
    _require_verified(phi)
    out = []
    cur = phi
    for k in range(1, N + 1):
        res = reidemeister(cur)
        if not res.finite:
            raise InfiniteTermError(k)
        out.append(res.value)
        if k < N:
            cur = compose(phi, cur)
    return out


def zeta_partial(phi: Endomorphism, N: int) -> ZetaReport:
    if N < 1:
        raise ValueError("need at least one term")
    terms = reidemeister_terms(phi, N)
    P, Q, matched = reconstruct(terms, True)
    rP, rQ, _ = reconstruct(terms, False)
    return ZetaReport(tuple(terms), tuple(exp_series(terms, True)), P, Q, matched,
                      tuple(exp_series(terms, False)), rP, rQ)


# ---------------------------------------------------------------------------
# strong scale invariance


def schur_cohn_inside(p: Poly) -> tuple[bool, list[Fraction]]:
    """All roots of p strictly inside the unit circle?  Returns the Schur-Cohn discriminants."""
    f = list(p)
    deltas = []
    while len(f) > 1:
        a0, an = f[0], f[-1]
        delta = an * an - a0 * a0
        deltas.append(delta)
        if delta <= 0:
            return False, deltas
        rev = f[::-1]
        g = [an * x - a0 * y for x, y in zip(f, rev)]
        f = g[1:]
    return True, deltas


def roots_outside_unit_circle(p: Poly) -> tuple[bool, list[Fraction]]:
    """All roots of p of modulus > 1 (via the reversed polynomial)."""
    if p[0] == 0:
        return False, []
    return schur_cohn_inside(tuple(reversed(p)))


def _eigenvalue_list(p: Poly) -> list[Fraction]:
    out = []
    rest = p
    for r in rational_roots(p):
        while True:
            q, rem = poly_divmod(rest, poly([-r, 1]))
            if rem:
                break
            rest = q
            out.append(r)
    return out


@dataclass(frozen=True)
class SSICertificate:
    verdict: str  # "notSSI" | "ssiWitness" | "inconclusive"
    power: int | None = None
    fixed_element: object = None
    root_power: int | None = None
    gamma: object = None
    data: dict = field(default_factory=dict)
    reason: str = ""


def _linear_charpoly(phi: Endomorphism) -> Poly:
    spec = phi.spec
    if isinstance(spec, AbelianSpec):
        return char_poly(phi.abelian_matrix)
    if isinstance(spec, UnipotentSpec):
        return char_poly(phi.lie_map)
    return poly_mul(char_poly(phi.module_coords_map), char_poly(phi.quotient_map))


def ssi_analyze(phi: Endomorphism) -> SSICertificate:
    _require_verified(phi)
    if not is_injective(phi):
        raise NonInjectiveError("scale-invariance analysis needs an injective endomorphism")
    image_index(phi)
    spec = phi.spec
    if is_virtually_nilpotent(spec):
        p = _linear_charpoly(phi)
        ok, deltas = roots_outside_unit_circle(p)
        data = {"charpoly": list(p), "rational_eigenvalues": _eigenvalue_list(p), "schur_cohn": deltas,
                "all_outside_unit_circle": ok}
        if ok:
            return SSICertificate("ssiWitness", data=data)
        return SSICertificate("inconclusive", data=data, reason="some eigenvalue has modulus at most 1")
    if isinstance(spec, SplitSpec) and spec.unipotent_kernel:
        return SSICertificate("inconclusive", reason="non-abelian Fitting subgroup is not supported")
    E = phi.quotient_map
    n = next((k for k in range(1, MAX_ORDER_SEARCH + 1) if (E ** k).is_identity()), None)
    if n is None:
        return SSICertificate("inconclusive", reason="induced quotient map has no small finite order")
    phin = endo_power(phi, n)
    if isinstance(spec, BSSpec):
        x = generators(spec)[1]
        y = multiply(spec, inverse(spec, x), apply(phin, x))
        one_minus = 1 - phin.bs_multiplier
        if one_minus == 0 and y.translation:
            return SSICertificate("inconclusive", power=n, reason="fixed-point equation has no solution")
        z = BSElement(1, y.translation / one_minus if one_minus else 0)
    else:
        d = spec.module.ambient
        x = generators(spec)[d]
        y = multiply(spec, inverse(spec, x), apply(phin, x))
        sol = (QMatrix.identity(d) - phin.module_map).solve(y.v)
        if sol is None:
            return SSICertificate("inconclusive", power=n, reason="fixed-point equation has no solution")
        z = SplitElement(sol, (0,) * spec.actor_rank)
    gamma = multiply(spec, x, z, check=False)
    # phi^n(gamma) = gamma holds in the completion; find a power inside Gamma
    g = gamma
    for k in range(1, MAX_ORDER_SEARCH + 1):
        if contains(spec, g):
            break
        g = multiply(spec, g, gamma, check=False)
    else:
        return SSICertificate("inconclusive", power=n, gamma=gamma, reason="no small power of gamma lies in the group")
    if apply(phin, g) != g:
        raise AssertionError("fixed-point certificate failed to verify")
    return SSICertificate("notSSI", n, g, k, gamma)


def verify_ssi_certificate(phi: Endomorphism, cert: SSICertificate) -> bool:
    if cert.verdict != "notSSI":
        return False
    spec = phi.spec
    g = cert.fixed_element
    if not contains(spec, g) or apply(endo_power(phi, cert.power), g) != g:
        return False
    if isinstance(spec, BSSpec):
        return g.t_exponent(spec.n) != 0
    return any(g.e)
