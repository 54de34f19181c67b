"""Q-algebraic hulls: full representations, closures, axiom checks, endomorphism extension,
thickenings and unipotent shadows."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import (
    PrimeSet,
    QMatrix,
    bracket,
    char_poly,
    factor_int,
    in_localization,
    is_prime,
    jordan_chevalley,
    nilpotent_log,
    strip_primes,
)
from .groups import (
    AbelianSpec,
    BSElement,
    BSSpec,
    GroupSpec,
    SpecError,
    SplitElement,
    SplitSpec,
    UnipotentSpec,
    fitting_subgroup,
    generator_names,
    generators,
    hirsch_length,
    spectrum,
)
from .torus import TorusInfo, diagonal_vectors, has_rational_spectrum, torus_info
from .unipotent import (
    ENUMERATION_CAP,
    LieBasis,
    MalcevLattice,
    lie_closure,
    root_subgroup,
    subgroup_index,
)


class NonInjectiveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# full representation


def _affine(A: QMatrix, v: Sequence) -> QMatrix:
    d = A.rows
    rows = [list(A.row(i)) + [v[i]] for i in range(d)]
    rows.append([0] * d + [1])
    return QMatrix(rows)


def represent(spec: GroupSpec, g) -> QMatrix:
    """Image of a group element under the full representation."""
    if isinstance(spec, BSSpec):
        m = g.t_exponent(spec.n)
        return QMatrix.block_diag(QMatrix([[g.scale, g.translation], [0, 1]]), QMatrix([[1, m], [0, 1]]))
    if isinstance(spec, AbelianSpec):
        return _affine(QMatrix.identity(spec.ambient), g)
    if isinstance(spec, UnipotentSpec):
        return g
    r = spec.actor_rank
    return QMatrix.block_diag(_affine(spec.actor_power(g.e), g.v), _affine(QMatrix.identity(r), g.e))


@dataclass(frozen=True)
class Representation:
    spec: object
    names: tuple
    images: tuple
    blocks: tuple

    @property
    def size(self) -> int:
        return self.images[0].rows


def full_representation(spec: GroupSpec) -> Representation:
    if isinstance(spec, BSSpec):
        blocks = (("affine", 2), ("t-exponent", 2))
    elif isinstance(spec, AbelianSpec):
        blocks = (("unipotent", spec.ambient + 1),)
    elif isinstance(spec, UnipotentSpec):
        blocks = (("defining", spec.generators[0].rows),)
    else:
        blocks = (("affine", spec.module.ambient + 1), ("actor-exponent", spec.actor_rank + 1))
    return Representation(spec, tuple(generator_names(spec)),
                          tuple(represent(spec, g) for g in generators(spec)), blocks)


# ---------------------------------------------------------------------------
# closures


def ad_matrix(lie: LieBasis, s: QMatrix) -> QMatrix:
    si = s.inverse()
    return lie.matrix_of(lambda X: s * X * si)


@dataclass(frozen=True)
class ClosureData:
    """Zariski closure of the image of a representation: T x| U with T = closure of the semisimple parts."""

    names: tuple
    images: tuple
    semisimple: tuple
    unipotent: tuple
    closure: LieBasis
    lie: LieBasis
    torus: TorusInfo
    ad_action: tuple


def closure_data(names: Sequence[str], images: Sequence[QMatrix]) -> ClosureData:
    jc = [jordan_chevalley(g) for g in images]
    ss = tuple(s for s, _ in jc)
    us = tuple(u for _, u in jc)
    for i, a in enumerate(ss):
        for b in ss[i + 1:]:
            if a * b != b * a:
                raise SpecError("semisimple parts of generators do not commute")
    closure = lie_closure(us, conjugators=ss)
    lie = closure.adapted()
    ad = tuple(ad_matrix(lie, s) for s in ss)
    return ClosureData(tuple(names), tuple(images), ss, us, closure, lie, torus_info(list(ss)), ad)


@dataclass(frozen=True)
class HullData:
    spec: object
    names: tuple
    representation: tuple
    semisimple: tuple
    unipotent_parts: tuple
    closure: LieBasis
    lie: LieBasis
    torus_generators: tuple
    torus_action: tuple
    torus_rank: int
    relation_lattice: tuple | None
    component_count: int | None
    removed_rank: int
    embedding: dict = field(compare=False, default_factory=dict)

    @property
    def unipotent_dim(self) -> int:
        return self.lie.dim


def strong_unipotent_quotient(spec: GroupSpec, cd: ClosureData) -> HullData:
    """Divide out the torus directions that centralize the unipotent radical.

    The quotient torus is realized by the adjoint action of the semisimple parts
    on Lie(U), so only directions with a nonzero weight survive.
    """
    tau = cd.ad_action
    info = torus_info(list(tau)) if tau and tau[0].rows else TorusInfo(0, True, (), 1, ())
    embedding = {}
    diags = diagonal_vectors(list(tau)) if info.rational and tau else None
    for i, (name, u) in enumerate(zip(cd.names, cd.unipotent)):
        coords = cd.lie.coords(nilpotent_log(u))
        embedding[name] = (coords, diags[i] if diags else None)
    return HullData(spec, cd.names, cd.images, cd.semisimple, cd.unipotent, cd.closure, cd.lie,
                    tau, tau, info.rank, info.relations, info.component_count,
                    cd.torus.rank - info.rank, embedding)


def build_hull(spec: GroupSpec) -> HullData:
    rep = full_representation(spec)
    return strong_unipotent_quotient(spec, closure_data(rep.names, rep.images))


@dataclass(frozen=True)
class HullReport:
    axiom_i: bool
    axiom_ii: bool
    axiom_iii: bool
    entries_in_ZS: bool
    unipotent_dim: int
    hirsch_length: int
    torus_rank: int
    spectrum: PrimeSet
    failures: tuple

    @property
    def ok(self) -> bool:
        return self.axiom_i and self.axiom_ii and self.axiom_iii and self.entries_in_ZS


def verify_hull_axioms(spec: GroupSpec, hull: HullData) -> HullReport:
    failures = []
    # (i) density: recompute the closure from the generator images
    cd = closure_data(hull.names, hull.representation)
    dense = cd.lie.same_span(hull.lie)
    if not dense:
        failures.append("i: unipotent parts do not generate Lie(U)")
    for s, act in zip(cd.semisimple, hull.torus_action):
        if ad_matrix(hull.lie, s) != act:
            dense = False
            failures.append("i: torus action differs from Ad of the semisimple parts")
            break
    gen_info = torus_info(list(hull.torus_generators)) if hull.torus_generators else None
    if gen_info is not None and gen_info.rank != hull.torus_rank:
        dense = False
        failures.append("i: torus generators are not dense in the torus")
    # (ii) strong unipotent radical: the torus acts on U with finite kernel and faithfully on generators
    act_info = torus_info(list(hull.torus_action)) if hull.torus_action else None
    strong = True
    if gen_info is not None and act_info is not None:
        if gen_info.rank != act_info.rank:
            strong = False
        elif (gen_info.generator_relations is not None and act_info.generator_relations is not None
              and tuple(gen_info.generator_relations) != tuple(act_info.generator_relations)):
            strong = False
    if not strong:
        failures.append("ii: a torus direction centralizes the unipotent radical")
    # (iii)
    h = hirsch_length(spec)
    dim_ok = hull.lie.dim == h
    if not dim_ok:
        failures.append(f"iii: dim U = {hull.lie.dim} but h = {h}")
    S = spectrum(spec)
    entries = all(in_localization(x, S) for g in hull.representation for M in (g, g.inverse()) for x in M.flat())
    if not entries:
        failures.append(f"entries outside Z[1/S] for S = {S}")
    return HullReport(dense, strong, dim_ok, entries, hull.lie.dim, h, hull.torus_rank, S, tuple(failures))


def inject_trivial_torus(hull: HullData, value: int | None = None) -> HullData:
    """Negative control: adjoin a torus factor that acts trivially on U."""
    if value is None:
        used = set()
        for t in hull.torus_generators:
            for c in char_poly(t):
                for x in (c.numerator, c.denominator):
                    if x:
                        used |= set(factor_int(x))
        value = next(p for p in range(2, 1000) if is_prime(p) and p not in used)
    target = next((i for i, t in enumerate(hull.torus_generators) if not t.is_identity()), 0)
    gens = tuple(QMatrix.block_diag(t, QMatrix([[value if i == target else 1]]))
                 for i, t in enumerate(hull.torus_generators))
    info = torus_info(list(gens))
    return HullData(hull.spec, hull.names, hull.representation, hull.semisimple, hull.unipotent_parts,
                    hull.closure, hull.lie, gens, hull.torus_action, info.rank, info.relations,
                    info.component_count, 0, hull.embedding)


# ---------------------------------------------------------------------------
# endomorphisms


@dataclass(frozen=True)
class HullEndomorphism:
    lie_map: QMatrix
    torus_images: tuple
    unipotent_images: tuple


def extend_endomorphism(spec: GroupSpec, hull: HullData, images: Sequence) -> HullEndomorphism:
    """The extension Psi of an injective endomorphism given by generator images."""
    reps = [represent(spec, g) for g in images]
    jc = [jordan_chevalley(g) for g in reps]
    s_img = [s for s, _ in jc]
    u_img = [u for _, u in jc]
    conj = [(s, s.inverse()) for s in s_img]
    vals: list[QMatrix] = []
    for rec in hull.closure.recipes:
        if rec[0] == "log":
            vals.append(nilpotent_log(u_img[rec[1]]))
        elif rec[0] == "br":
            vals.append(bracket(vals[rec[1]], vals[rec[2]]))
        else:
            _, j, sign, a = rec
            s, si = conj[j] if sign == 1 else conj[j][::-1]
            vals.append(s * vals[a] * si)

    def psi(X: QMatrix) -> QMatrix:
        c = hull.closure.coords(X)
        out = QMatrix.zeros(hull.lie.ambient)
        for ci, v in zip(c, vals):
            if ci:
                out = out + ci * v
        return out

    for v in vals:
        if not hull.lie.contains(v):
            raise ArithmeticError("image leaves Lie(U)")
    L = hull.lie.matrix_of(psi)
    # intertwining checks
    for u, u2 in zip(hull.unipotent_parts, u_img):
        if psi(nilpotent_log(u)) != nilpotent_log(u2):
            raise ArithmeticError("extension does not intertwine unipotent parts")
    for s, s2 in zip(hull.semisimple, s_img):
        si, s2i = s.inverse(), s2.inverse()
        for b in hull.lie.basis:
            if psi(s * b * si) != s2 * psi(b) * s2i:
                raise ArithmeticError("extension does not intertwine the torus action")
    for a in hull.lie.basis:
        for b in hull.lie.basis:
            if psi(bracket(a, b)) != bracket(psi(a), psi(b)):
                raise ArithmeticError("extension is not a Lie algebra map")
    if L.det() == 0:
        raise NonInjectiveError("endomorphism is not injective (singular Lie map)")
    tau_img = tuple(ad_matrix(hull.lie, s) for s in s_img)
    info = torus_info(list(hull.torus_generators))
    if info.generator_relations:
        for rel in info.generator_relations:
            prod = QMatrix.identity(tau_img[0].rows)
            for t, e in zip(tau_img, rel):
                if e:
                    prod = prod * t ** e
            if not prod.is_identity():
                raise ArithmeticError("torus relation not preserved")
    return HullEndomorphism(L, tau_img, tuple(u_img))


# ---------------------------------------------------------------------------
# thickenings and shadows


@dataclass(frozen=True)
class Thickening:
    spec: object
    index: int
    m: int


def thicken(spec: GroupSpec, m: int, cap: int = ENUMERATION_CAP) -> Thickening:
    if m < 1:
        raise ValueError("m must be positive")
    q = Fraction(1, m)
    if isinstance(spec, AbelianSpec):
        new = AbelianSpec(tuple(tuple(q * x for x in g) for g in spec.generators), spec.primes)
        return Thickening(new, strip_primes(m ** spec.rank, spec.primes), m)
    if isinstance(spec, BSSpec):
        mm = strip_primes(m, spec.primes)
        return Thickening(BSSpec(spec.n, spec.unit / mm), mm, m)
    if isinstance(spec, UnipotentSpec):
        N = spec.lattice
        R = root_subgroup(N, m, cap)
        idx = subgroup_index(N, R)
        return Thickening(UnipotentSpec(tuple(R.sequence)), idx, m)
    if spec.unipotent_kernel:
        raise SpecError("thickening of split groups with unipotently acting actors is not supported")
    mod = AbelianSpec(tuple(tuple(q * x for x in g) for g in spec.module.generators), spec.module.primes)
    return Thickening(SplitSpec(mod, spec.actors), strip_primes(m ** spec.module.rank, spec.module.primes), m)


@dataclass(frozen=True)
class ShadowData:
    m_requested: int
    m: int
    thickened_fitting: MalcevLattice
    fitting: MalcevLattice
    supplement_names: tuple
    supplement: tuple
    unipotent_parts: tuple
    shadow: MalcevLattice
    good: bool
    fitting_tail: int
    index: int | None


def _fitting_lattice(spec, hull: HullData):
    fit = fitting_subgroup(spec)
    fimgs = [represent(spec, g) for g in fit.generators]
    if isinstance(spec, BSSpec):
        mod_imgs = fimgs
    else:
        mod_imgs = [represent(spec, SplitElement(g, (0,) * spec.actor_rank)) for g in spec.module.generators]
    F = lie_closure(fimgs)
    T = lie_closure(mod_imgs)
    lie = hull.closure.adapted([list(F.basis), list(T.basis)], names=["F", "T"])
    S = spectrum(spec)
    rings = tuple(S if i >= lie.tails["T"] else PrimeSet() for i in range(lie.dim))
    return lie, rings, MalcevLattice.from_generators(lie, fimgs, rings)


def unipotent_shadow(spec: GroupSpec, m: int, max_factor: int = 12, cap: int = ENUMERATION_CAP) -> ShadowData:
    if not isinstance(spec, (SplitSpec, BSSpec)):
        raise SpecError("unipotent shadows are defined here for split and BS(1,n) specs")
    hull = build_hull(spec)
    lie, rings, fitt = _fitting_lattice(spec, hull)
    if isinstance(spec, BSSpec):
        names, sup = ("t",), (generators(spec)[1],)
    else:
        names = tuple(f"t{j + 1}" for j in range(spec.actor_rank))
        sup = tuple(generators(spec)[spec.module.rank:])
    us = tuple(jordan_chevalley(represent(spec, c))[1] for c in sup)
    tail = lie.tails["F"]
    result = None
    for j in range(1, max_factor + 1):
        mj = m * j
        Fm = root_subgroup(fitt, mj, cap)
        theta = MalcevLattice.from_generators(lie, list(Fm.sequence) + list(us), rings)
        inter = theta.restricted_to(tail)
        good = inter == Fm
        result = ShadowData(m, mj, Fm, fitt, names, sup, us, theta, good, tail, subgroup_index(fitt, Fm))
        if good:
            break
    return result
