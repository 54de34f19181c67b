import time
from fractions import Fraction

import pytest

from farhull.exact import PrimeSet, QMatrix, char_poly, in_localization, nilpotent_log
from farhull.groups import (
    AbelianSpec,
    BSElement,
    BSSpec,
    SplitSpec,
    UnipotentSpec,
    generators,
    hirsch_length,
)
from farhull.hull import (
    build_hull,
    closure_data,
    extend_endomorphism,
    full_representation,
    inject_trivial_torus,
    strong_unipotent_quotient,
    thicken,
    unipotent_shadow,
    verify_hull_axioms,
)
from farhull.unipotent import CapExceededError

A_PAPER = QMatrix([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
Z2 = AbelianSpec(((1, 0), (0, 1)))
Z3A = SplitSpec(AbelianSpec(((1, 0, 0), (0, 1, 0), (0, 0, 1))), (A_PAPER,))
Z2M = SplitSpec(Z2, (QMatrix([[2, 1], [1, 1]]),))
HEIS = UnipotentSpec((QMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]]), QMatrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]])))


@pytest.mark.parametrize("spec, dim", [
    (BSSpec(2), 2), (BSSpec(6), 2), (Z2, 2), (HEIS, 3), (Z3A, 4), (Z2M, 3),
    (BSSpec(-5), 2), (AbelianSpec(((1,),), PrimeSet((3,))), 1),
])
def test_hull_axioms_and_dimension(spec, dim):
    t0 = time.perf_counter()
    hull = build_hull(spec)
    rep = verify_hull_axioms(spec, hull)
    assert time.perf_counter() - t0 < 1.0
    assert rep.ok, rep.failures
    assert rep.unipotent_dim == hirsch_length(spec) == dim


def test_bs2_hull_details():
    spec = BSSpec(2)
    rep = full_representation(spec)
    assert rep.blocks == (("affine", 2), ("t-exponent", 2))
    hull = build_hull(spec)
    assert hull.torus_rank == 1 and hull.removed_rank == 0
    assert all(in_localization(x, PrimeSet((2,))) for g in hull.representation for x in g.flat())


def test_abelian_hull_is_unipotent_block():
    rep = full_representation(Z2)
    assert rep.blocks == (("unipotent", 3),)
    hull = build_hull(Z2)
    assert hull.torus_rank == 0 and hull.unipotent_dim == 2


def test_polycyclic_example_hull():
    hull = build_hull(Z3A)
    assert hull.unipotent_dim == 4 and hull.torus_rank == 1
    assert [b[0] for b in full_representation(Z3A).blocks] == ["affine", "actor-exponent"]


def test_strong_unipotent_quotient_removes_trivial_torus():
    g = QMatrix.block_diag(QMatrix([[1, 1], [0, 1]]), QMatrix([[2]]))
    cd = closure_data(["g"], [g])
    assert cd.torus.rank == 1
    hull = strong_unipotent_quotient(None, cd)
    assert hull.torus_rank == 0 and hull.removed_rank == 1


def test_strong_unipotent_quotient_on_unipotent_group():
    hull = build_hull(HEIS)
    assert hull.torus_rank == 0 and hull.removed_rank == 0


@pytest.mark.parametrize("n", [n for n in range(-30, 31) if abs(n) >= 2])
def test_negative_control_bs(n):
    spec = BSSpec(n)
    hull = build_hull(spec)
    bad = verify_hull_axioms(spec, inject_trivial_torus(hull))
    assert not bad.axiom_ii and any(f.startswith("ii:") for f in bad.failures)


@pytest.mark.parametrize("spec", [Z3A, Z2M], ids=["Z3A", "Z2M"])
def test_negative_control_split(spec):
    bad = verify_hull_axioms(spec, inject_trivial_torus(build_hull(spec)))
    assert not bad.axiom_ii


def test_extend_identity():
    for spec in (BSSpec(2), Z2, HEIS, Z3A):
        hull = build_hull(spec)
        ext = extend_endomorphism(spec, hull, generators(spec))
        assert ext.lie_map.is_identity()


def test_extend_abelian_matrix():
    M = QMatrix([[2, 1], [1, 1]])
    # images of e1, e2 are the columns of M
    ext = extend_endomorphism(Z2, build_hull(Z2), [M.col(0), M.col(1)])
    assert ext.lie_map == M


def test_extend_bs_dilation():
    spec = BSSpec(2)
    hull = build_hull(spec)
    x, t = generators(spec)
    ext = extend_endomorphism(spec, hull, [BSElement(1, 2), t])
    L = ext.lie_map
    assert tuple(char_poly(L)) == (2, -3, 1)  # eigenvalues 2 (translation) and 1 (t-log)
    ux = hull.unipotent_parts[0]
    cx = hull.lie.coords(nilpotent_log(ux))
    assert L.apply(cx) == tuple(2 * c for c in cx)
    ut = hull.unipotent_parts[1]
    ct = hull.lie.coords(nilpotent_log(ut))
    assert L.apply(ct) == ct
    # trivial character map: the torus image of t is unchanged
    assert ext.torus_images[1] == hull.torus_action[1]


@pytest.mark.parametrize("spec, m, index", [
    (BSSpec(2), 3, 3), (BSSpec(2), 6, 3), (Z2, 2, 4), (AbelianSpec(((1,),)), 3, 3), (HEIS, 2, 32), (Z2M, 2, 4),
])
def test_thicken(spec, m, index):
    th = thicken(spec, m)
    assert th.index == index
    assert hirsch_length(th.spec) == hirsch_length(spec)


def test_thicken_bs2_translation_module():
    th = thicken(BSSpec(2), 3)
    assert th.spec == BSSpec(2, Fraction(1, 3))


def test_thicken_cap():
    with pytest.raises(CapExceededError):
        thicken(HEIS, 2, cap=3)


@pytest.mark.parametrize("n, m", [(2, 1), (2, 2), (2, 3), (6, 5), (-3, 2)])
def test_shadow_bs(n, m):
    spec = BSSpec(n)
    sd = unipotent_shadow(spec, m)
    assert sd.good and sd.index is not None and sd.m == m
    # u_t is nontrivial only on the t-exponent block (rows/cols 2-3)
    D = sd.unipotent_parts[0] - QMatrix.identity(4)
    assert all(D[i, j] == 0 for i in range(4) for j in range(4) if i < 2 or j < 2)
    assert not D.is_zero()
    assert sd.shadow.hirsch_length == 2


def test_shadow_polycyclic_example():
    sd = unipotent_shadow(Z3A, 1)
    assert sd.good and sd.index == 1
    assert sd.shadow.hirsch_length == 4


def test_shadow_semisimple_actor():
    sd = unipotent_shadow(Z2M, 1)
    u = sd.unipotent_parts[0]
    # identity on the affine block; only the actor-exponent coordinate is unipotent
    assert sd.good and all(u[i, j] == int(i == j) for i in range(3) for j in range(3))
    assert sd.index == 1 and sd.thickened_fitting == sd.fitting
    assert sd.shadow.hirsch_length == sd.fitting.hirsch_length + 1 == 3
