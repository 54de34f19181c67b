import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from farhull import dynamics as dy
from farhull.exact import PrimeSet, QMatrix, char_poly
from farhull.groups import (
    AbelianSpec,
    BSElement,
    BSSpec,
    SpecError,
    SplitElement,
    SplitSpec,
    UnipotentSpec,
    bs_t,
    bs_x,
    evaluate_word,
    generators,
    multiply,
    random_element,
)
from farhull.hull import NonInjectiveError
from oracles import (
    abelian_twisted_classes,
    bs_twisted_classes,
    det_cofactor,
    heisenberg_mod_twisted_classes,
    mat_mul,
    split_twisted_classes,
)

Z2 = AbelianSpec(((1, 0), (0, 1)))
Z1 = AbelianSpec(((1,),))
ZH = AbelianSpec(((1,),), PrimeSet((2,)))
BS2 = BSSpec(2)
HEIS = UnipotentSpec((QMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]]), QMatrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]])))
CAT = [[2, 1], [1, 1]]
Z2M = SplitSpec(Z2, (QMatrix(CAT),))


def abelian(M, spec=Z2):
    M = QMatrix(M)
    return dy.check_endomorphism(spec, [M.col(j) for j in range(M.cols)])


def bs(word_x, word_t, spec=BS2):
    return dy.check_endomorphism(spec, [evaluate_word(spec, word_x), evaluate_word(spec, word_t)])


def heis(a, b, c):
    return QMatrix([[1, a, c], [0, 1, b], [0, 0, 1]])


def heis_dilation(k):
    return dy.check_endomorphism(HEIS, [heis(k, 0, 0), heis(0, k, 0)])


def split_endo(L, w, E):
    L = QMatrix(L)
    return dy.check_endomorphism(Z2M, [SplitElement(L.col(0), (0,)), SplitElement(L.col(1), (0,)),
                                       SplitElement(w, (E,))])


# ---------------------------------------------------------------------------
# construction


def test_bs_endomorphism_checks():
    phi = bs("x^2", "t")
    assert phi.verified
    with pytest.raises(dy.RelationError) as exc:
        bs("t", "x")
    assert exc.value.relation == "t^-1 x t = x^n"
    with pytest.raises(dy.RelationError):
        bs("x", "t^2")


@pytest.mark.parametrize("spec", [BS2, Z2, HEIS, Z2M, ZH], ids=lambda s: s.kind)
def test_identity_images_verify(spec):
    phi = dy.check_endomorphism(spec, generators(spec))
    assert phi.verified and phi == dy.identity_endomorphism(spec)


def test_wrong_image_count():
    with pytest.raises(SpecError):
        dy.check_endomorphism(BS2, [bs_x(BS2)])


def test_split_module_images_must_stay_in_module():
    with pytest.raises(dy.UnsupportedEndomorphismError):
        dy.check_endomorphism(Z2M, [SplitElement((1, 0), (1,)), SplitElement((0, 1), (0,)), SplitElement((0, 0), (1,))])


def test_heisenberg_relation_failure():
    # H(Z) is free nilpotent of class 2 on g1, g2, so use the presentation with z = [g1, g2] as a generator
    spec = UnipotentSpec((heis(1, 0, 0), heis(0, 1, 0), heis(0, 0, 1)))
    with pytest.raises(dy.RelationError) as exc:
        dy.check_endomorphism(spec, [heis(1, 0, 0), heis(0, 1, 0), heis(0, 0, 2)])
    assert exc.value.relation == "bracket compatibility"
    assert dy.check_endomorphism(spec, [heis(2, 0, 0), heis(0, 2, 0), heis(0, 0, 4)]).verified


# ---------------------------------------------------------------------------
# image index


@pytest.mark.parametrize("phi, index", [
    (abelian([[2, 0], [0, 2]]), 4),
    (abelian([[2, 1], [1, 1]]), 1),
    (abelian([[3]], ZH), 3),
    (abelian([[2]], ZH), 1),
    (bs("x^2", "t"), 1),
    (heis_dilation(2), 16),
])
def test_image_index(phi, index):
    assert dy.image_index(phi) == index


def test_image_index_bs_oracle():
    """x -> x^2, t -> t is onto: x = phi(t) phi(x) phi(t^-1) since t x^2 t^-1 = x."""
    spec = BS2
    x, t = bs_x(spec), bs_t(spec)
    phi = bs("x^2", "t")
    t_inv = BSElement(2, 0)
    assert multiply(spec, multiply(spec, dy.apply(phi, t), dy.apply(phi, x)), dy.apply(phi, t_inv)) == x


def test_image_index_noninjective():
    with pytest.raises(NonInjectiveError):
        dy.image_index(bs("1", "t^3"))


# ---------------------------------------------------------------------------
# Reidemeister numbers


@pytest.mark.parametrize("M, R", [([[2, 1], [1, 1]], 1), ([[-1, 0], [0, -1]], 4), ([[2, 0], [0, 2]], 1)])
def test_reidemeister_abelian_examples(M, R):
    res = dy.reidemeister(abelian(M))
    assert res.value == R
    d = abs(det_cofactor([[int(i == j) - M[i][j] for j in range(2)] for i in range(2)]))
    assert abelian_twisted_classes(M, d) == R


def test_reidemeister_localized():
    res = dy.reidemeister(abelian([[3]], ZH))
    assert res.value == 1  # coker(1 - 3) = Z[1/2] / 2 Z[1/2] is trivial


def test_reidemeister_identity_infinite():
    res = dy.reidemeister(abelian([[1, 0], [0, 1]]))
    assert not res.finite and res.certificate["kind"] == "eigenvalue-one"


@given(st.lists(st.integers(-4, 4), min_size=9, max_size=9))
@settings(max_examples=40)
def test_reidemeister_z3_snf(entries):
    M = [entries[0:3], entries[3:6], entries[6:9]]
    d = det_cofactor([[int(i == j) - M[i][j] for j in range(3)] for i in range(3)])
    phi = abelian(M, AbelianSpec(((1, 0, 0), (0, 1, 0), (0, 0, 1))))
    res = dy.reidemeister(phi)
    if d == 0:
        assert not res.finite
    else:
        assert res.value == abs(d)
        if abs(d) <= 12:
            assert abelian_twisted_classes(M, abs(d)) == abs(d)


def test_reidemeister_heisenberg_dilation():
    res = dy.reidemeister(heis_dilation(2))
    assert res.value == 3
    diags = [tuple(layer["diagonal"]) for layer in res.certificate["layers"]]
    assert diags == [(1, 1), (3,)]
    for k in (3, 9, 27):
        assert heisenberg_mod_twisted_classes([(2, 0, 0), (0, 2, 0)], k) == 3


def test_reidemeister_heisenberg_identity():
    res = dy.reidemeister(dy.identity_endomorphism(HEIS))
    assert not res.finite and res.certificate["kind"] == "eigenvalue-one"


@pytest.mark.parametrize("wx, wt", [("x^2", "t"), ("x^3", "t"), ("x^2", "t x"), ("x^-1", "t")])
def test_reidemeister_bs_identity_quotient(wx, wt):
    res = dy.reidemeister(bs(wx, wt))
    assert not res.finite and res.certificate["kind"] == "quotient-identity"


@pytest.mark.parametrize("wx, wt, R, oracle_img", [
    ("1", "t^3", 2, (Fraction(1, 8), Fraction(0))),
    ("1", "x t^-1", 2, (Fraction(2), Fraction(1))),
])
def test_reidemeister_bs_fiber_sum(wx, wt, R, oracle_img):
    phi = bs(wx, wt)
    assert dy.apply(phi, bs_t(BS2)) == BSElement(*oracle_img)
    res = dy.reidemeister(phi)
    assert res.value == R and res.certificate["kind"] == "fiber-sum"
    one = (Fraction(1), Fraction(0))
    assert bs_twisted_classes(2, one, oracle_img, 6, 256, 2) == R


@pytest.mark.parametrize("L, w, R", [
    ([[-2, 0], [2, 2]], (1, 0), 6),
    ([[-2, 1], [1, 2]], (0, 0), 8),
    ([[0, -2], [2, 0]], (1, 0), 10),
    ([[0, -1], [1, 0]], (0, 0), 4),
    ([[-1, -1], [2, 1]], (1, 0), 4),
])
def test_reidemeister_split_oracle(L, w, R):
    res = dy.reidemeister(split_endo(L, w, -1))
    assert res.value == R
    assert split_twisted_classes(CAT, L, w, -1, 12, 2) == R


def test_reidemeister_split_infinite():
    res = dy.reidemeister(split_endo([[-1, 0], [1, 1]], (0, 0), -1))
    assert not res.finite


# ---------------------------------------------------------------------------
# tameness


def test_tame_examples():
    assert dy.tame_check(abelian(CAT)).tame
    rot = dy.tame_check(abelian([[0, -1], [1, 0]]))
    assert not rot.tame and rot.power == 4
    assert not dy.reidemeister(dy.endo_power(abelian([[0, -1], [1, 0]]), 4)).finite
    assert dy.tame_check(heis_dilation(2)).tame
    assert not dy.tame_check(dy.check_endomorphism(HEIS, [heis(0, 1, 0), heis(1, 0, 0)])).tame


@pytest.mark.parametrize("wx, wt", [("x^2", "t"), ("x^-1", "t"), ("x", "t x")])
def test_bs_automorphism_data_not_tame(wx, wt):
    res = dy.tame_check(bs(wx, wt))
    assert not res.tame and res.power == 1


# ---------------------------------------------------------------------------
# zeta


def zeta_oracle(M, N):
    """|det(I - M^n)| by direct powering."""
    out, P = [], [[int(i == j) for j in range(len(M))] for i in range(len(M))]
    for _ in range(N):
        P = mat_mul(P, M)
        out.append(abs(det_cofactor([[int(i == j) - P[i][j] for j in range(len(M))] for i in range(len(M))])))
    return out


def expand(P, Q, N):
    return dy.series_quotient(P, Q, N + 1)


def test_zeta_cat_map():
    z = dy.zeta_partial(abelian(CAT), 6)
    assert list(z.terms) == zeta_oracle(CAT, 6) == [1, 5, 16, 45, 121, 320]
    assert z.numerator == (1, -2, 1) and z.denominator == (1, -3, 1)
    assert expand(z.numerator, z.denominator, 6) == list(z.coefficients)
    assert dy.log_terms(expand(z.numerator, z.denominator, 6)) == [Fraction(r) for r in z.terms]


def test_zeta_times_two():
    z = dy.zeta_partial(abelian([[2]], Z1), 4)
    assert list(z.terms) == [abs(1 - 2 ** n) for n in range(1, 5)] == [1, 3, 7, 15]
    assert z.numerator == (1, -1) and z.denominator == (1, -2)


def test_zeta_two_identity():
    M = [[2, 0], [0, 2]]
    z = dy.zeta_partial(abelian(M), 6)
    assert list(z.terms) == zeta_oracle(M, 6) == [(2 ** n - 1) ** 2 for n in range(1, 7)]
    # (1 - 2z)^2 / ((1 - z)(1 - 4z))
    assert z.numerator == (1, -4, 4) and z.denominator == (1, -5, 4)
    assert dy.zeta_partial(abelian(M), 3).numerator is None  # three terms cannot pin down degree 2/2


def test_zeta_infinite_term():
    with pytest.raises(dy.InfiniteTermError):
        dy.zeta_partial(abelian([[0, -1], [1, 0]]), 6)


def test_zeta_raw_convention():
    z = dy.zeta_partial(abelian(CAT), 6)
    # b_0 = 1, n b_n = sum_k k R_k b_{n-k}  (exp of sum R_k z^k without the 1/k)
    b = [Fraction(1)]
    for n in range(1, 7):
        b.append(sum(k * z.terms[k - 1] * b[n - k] for k in range(1, n + 1)) / n)
    assert list(z.raw_coefficients) == b
    # exp of a nonconstant rational function is never rational
    assert z.raw_numerator is None


def test_zeta_heisenberg():
    phi = heis_dilation(2)
    z = dy.zeta_partial(phi, 8)
    assert z.terms[:3] == (3, 135, 3087)
    # (1 - 8z)^2 (1 - z) / ((1 - 16z)(1 - 2z)^2)
    num, den = z.numerator, z.denominator
    assert expand(num, den, 8) == list(z.coefficients)
    assert num == (1, -17, 80, -64) and den == (1, -20, 68, -64)


# ---------------------------------------------------------------------------
# scale invariance


def test_ssi_bs_twisted():
    phi = bs("x^2", "t x")
    cert = dy.ssi_analyze(phi)
    x, t = bs_x(BS2), bs_t(BS2)
    gamma = multiply(BS2, t, BSElement(1, -1))
    assert cert.verdict == "notSSI" and cert.power == 1 and cert.fixed_element == gamma
    assert dy.apply(phi, gamma) == gamma
    assert dy.verify_ssi_certificate(phi, cert)


@pytest.mark.parametrize("m", [2, 3, -1, 5])
def test_ssi_bs_fixed_t(m):
    phi = bs(f"x^{m}", "t")
    cert = dy.ssi_analyze(phi)
    assert cert.verdict == "notSSI" and cert.fixed_element == bs_t(BS2)


def test_ssi_witness_expanding():
    cert = dy.ssi_analyze(abelian([[2, 0], [0, 2]]))
    assert cert.verdict == "ssiWitness"
    assert cert.data["rational_eigenvalues"] == [2, 2] and cert.data["all_outside_unit_circle"]


def test_ssi_inconclusive_non_expanding():
    cert = dy.ssi_analyze(abelian(CAT))
    assert cert.verdict == "inconclusive"


def test_ssi_split_fixed_element():
    phi = split_endo([[-2, 1], [1, 2]], (1, 0), -1)
    cert = dy.ssi_analyze(phi)
    assert cert.verdict == "notSSI" and dy.verify_ssi_certificate(phi, cert)


def test_schur_cohn_against_roots():
    # (x - 2)(x - 3): all outside; (x - 2)(2x - 1): one inside; x^2 + 1: on the circle
    assert dy.roots_outside_unit_circle((6, -5, 1))[0]
    assert not dy.roots_outside_unit_circle((2, -5, 2))[0]
    assert not dy.roots_outside_unit_circle((1, 0, 1))[0]


# ---------------------------------------------------------------------------
# composition


@pytest.mark.parametrize("spec", [BS2, Z2, HEIS, Z2M], ids=lambda s: s.kind)
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_apply_is_homomorphism(spec, seed):
    rng = random.Random(seed)
    phi = {"bs": lambda: bs("x^2", "t x"), "abelian": lambda: abelian(CAT), "unipotent": lambda: heis_dilation(2),
           "split": lambda: split_endo([[-2, 1], [1, 2]], (1, 0), -1)}[spec.kind]()
    a, b = random_element(spec, rng), random_element(spec, rng)
    assert dy.apply(phi, multiply(spec, a, b)) == multiply(spec, dy.apply(phi, a), dy.apply(phi, b))


def test_compose_and_power():
    phi = abelian(CAT)
    assert dy.endo_power(phi, 3).abelian_matrix == QMatrix(CAT) ** 3
    psi = abelian([[2, 0], [0, 2]])
    assert dy.compose(phi, psi).abelian_matrix == QMatrix(CAT) * QMatrix([[2, 0], [0, 2]])
