"""Acceptance criteria AC1-AC9.  Each test prints one PASS/FAIL line (also shown in the pytest summary).

Run directly with ``python3 tests/test_acceptance.py`` for the plain report.
"""

import functools
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import conftest  # noqa: E402
from farhull import bsaut, dynamics as dy  # noqa: E402
from farhull.exact import (  # noqa: E402
    PrimeSet,
    QMatrix,
    char_poly,
    is_unipotent,
    jordan_chevalley,
    nilpotent_log,
    poly_at_matrix,
    squarefree_part,
    unipotent_exp,
)
from farhull.groups import (  # noqa: E402
    AbelianSpec,
    BSElement,
    BSSpec,
    SplitElement,
    SplitSpec,
    UnipotentSpec,
    contains,
    fitting_subgroup,
    hirsch_length,
    identity,
    inverse,
    multiply,
    random_element,
    spectrum,
)
from farhull.hull import build_hull, extend_endomorphism, verify_hull_axioms  # noqa: E402
from farhull.serialize import dumps, report  # noqa: E402
from farhull.unipotent import MalcevLattice, lie_closure, root_subgroup, subgroup_index  # noqa: E402
from oracles import (  # noqa: E402
    abelian_twisted_classes,
    det_cofactor,
    heisenberg_square_root_index,
    mat_mul,
    out_bs_relators,
    todd_coxeter_order,
)

SEED = 20240611
CASES = 1000
NS = [n for n in range(-30, 31) if abs(n) >= 2]

A_PAPER = QMatrix([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
Z2 = AbelianSpec(((1, 0), (0, 1)))
Z3A = SplitSpec(AbelianSpec(((1, 0, 0), (0, 1, 0), (0, 0, 1))), (A_PAPER,))
HEIS = UnipotentSpec((QMatrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]]), QMatrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]])))
CAT = [[2, 1], [1, 1]]


def criterion(tag, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                line = f"{tag} FAIL  {title}  ({type(exc).__name__}: {exc})"
                _emit(line)
                raise
            line = f"{tag} PASS  {title}  [{time.perf_counter() - t0:.2f}s]" + (f"  {detail}" if detail else "")
            _emit(line)
        return wrapper
    return deco


def _emit(line):
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------


@criterion("AC1", "hull construction end-to-end")
def test_ac1_hulls():
    groups = [("BS(1,2)", BSSpec(2), 2), ("BS(1,6)", BSSpec(6), 2), ("Z^2", Z2, 2), ("Heisenberg", HEIS, 3),
              ("Z^3 x|_A Z", Z3A, 4)]
    dims = []
    for name, spec, dim in groups:
        rep, dt = timed(lambda s: verify_hull_axioms(s, build_hull(s)), spec)
        assert rep.axiom_i and rep.axiom_ii and rep.axiom_iii, (name, rep.failures)
        assert rep.unipotent_dim == rep.hirsch_length == dim, name
        assert dt < 1.0, f"{name} took {dt:.2f}s"
        dims.append(rep.unipotent_dim)
    return f"dim U = {dims}"


@criterion("AC2", "spectrum and Fitting subgroup facts")
def test_ac2_spectrum_fitting():
    t0 = time.perf_counter()
    for n in (2, 3, 6, 12, 30):
        spec = BSSpec(n)
        primes = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
        assert spectrum(spec) == PrimeSet(tuple(primes))
        fit = fitting_subgroup(spec)
        assert fit.hirsch_length == 1
        # Fitt = Z[1/n]: contains x^(1/n^k), not t, and nothing outside Z[1/n]
        for k in range(4):
            assert fit.contains(BSElement(1, Fraction(1, n ** k)))
        assert not fit.contains(BSElement(Fraction(1, n), 0))
        q = next(p for p in range(2, 100) if n % p and all(p % r for r in range(2, p)))
        assert not contains(spec, BSElement(1, Fraction(1, q)))
    assert spectrum(Z3A) == PrimeSet()
    assert time.perf_counter() - t0 < 1.0


@criterion("AC3", "Collins presentation and Inn generators")
def test_ac3_collins_inn():
    t0 = time.perf_counter()
    for n in NS:
        res = bsaut.verify_collins_presentation(n)
        assert all(res.values()), (n, res)
        spec = BSSpec(n)
        x, t = BSElement(1, 1), BSElement(Fraction(1, n), 0)
        gens = bsaut.inn_generators(n)
        assert bsaut.inn_membership(n, gens["x"]) == x
        # convention c_g(h) = g h g^-1: T^eps prod Q^ell is c_{t^-1}; its inverse is c_t
        assert bsaut.inn_membership(n, gens["t^-1"]) == inverse(spec, t)
        inv = bsaut.pair_to_normal(n, bsaut.invert_pair(bsaut.normal_to_pair(n, gens["t^-1"])))
        assert bsaut.inn_membership(n, inv) == t
    dt = time.perf_counter() - t0
    assert dt < 5.0, f"{dt:.2f}s"
    return f"{len(NS)} values of n"


@criterion("AC4", "Out(BS(1,n)) structure")
def test_ac4_out():
    frozen = {2: 2, 3: 4}
    for n in NS:
        primes = bsaut.bs_primes(n)
        k = len(primes)
        out = bsaut.out_structure(n)
        assert out.finite == (k == 1) and out.free_rank == k - 1, n
        if k == 1:
            eps, ell = bsaut.inn_generator_data(n)
            assert out.order == todd_coxeter_order(3, out_bs_relators(n, primes, eps, ell)), n
    for n, order in frozen.items():
        assert bsaut.out_structure(n).order == order


@criterion("AC5", "Reidemeister suite")
def test_ac5_reidemeister():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    checked = 0
    while checked < 50:
        M = [[rng.randint(-9, 9) for _ in range(2)] for _ in range(2)]
        d = abs(det_cofactor([[int(i == j) - M[i][j] for j in range(2)] for i in range(2)]))
        if not 0 < d <= 200 or det_cofactor(M) == 0:
            continue
        phi = dy.check_endomorphism(Z2, [QMatrix(M).col(0), QMatrix(M).col(1)])
        assert dy.reidemeister(phi).value == abelian_twisted_classes(M, d) == d
        checked += 1
    ZH = AbelianSpec(((1,),), PrimeSet((2,)))
    assert dy.reidemeister(dy.check_endomorphism(ZH, [(3,)])).value == 1
    assert dy.reidemeister(dy.check_endomorphism(ZH, [(-1,)])).value == 1
    ZH2 = AbelianSpec(((1, 0), (0, 1)), PrimeSet((2,)))
    assert dy.reidemeister(dy.check_endomorphism(ZH2, [(3, 0), (0, 5)])).value == 1
    auts = 0
    for n in NS:
        for _ in range(10):
            word = bsaut.random_word(n, rng)
            x, t = BSElement(1, 1), BSElement(Fraction(1, n), 0)
            nf = bsaut.aut_normalize(n, word)
            phi = dy.check_endomorphism(BSSpec(n), [bsaut.apply_aut(n, nf, x), bsaut.apply_aut(n, nf, t)])
            res = dy.reidemeister(phi)
            assert not res.finite and res.certificate["kind"] == "quotient-identity", (n, word)
            auts += 1
    dt = time.perf_counter() - t0
    assert dt < 30.0
    return f"50 abelian matrices, {auts} BS automorphisms"


@criterion("AC6", "zeta reconstruction for [[2,1],[1,1]]")
def test_ac6_zeta():
    oracle, P = [], [[1, 0], [0, 1]]
    for _ in range(6):
        P = mat_mul(P, CAT)
        oracle.append(abs(det_cofactor([[int(i == j) - P[i][j] for j in range(2)] for i in range(2)])))
    assert oracle == [1, 5, 16, 45, 121, 320]
    phi = dy.check_endomorphism(Z2, [(2, 1), (1, 1)])
    z = dy.zeta_partial(phi, 6)
    assert list(z.terms) == oracle
    assert z.numerator is not None and z.matched_terms == 6
    series = dy.series_quotient(z.numerator, z.denominator, 7)
    assert dy.log_terms(series) == [Fraction(r) for r in oracle]
    return f"({z.numerator}) / ({z.denominator})"


@criterion("AC7", "SSI certificates")
def test_ac7_ssi():
    t0 = time.perf_counter()
    spec = BSSpec(2)
    x, t = BSElement(1, 1), BSElement(Fraction(1, 2), 0)
    phi = dy.check_endomorphism(spec, [BSElement(1, 2), multiply(spec, t, x)])
    cert = dy.ssi_analyze(phi)
    gamma = multiply(spec, t, inverse(spec, x))
    assert cert.verdict == "notSSI" and cert.fixed_element == gamma
    assert dy.apply(phi, gamma) == gamma and dy.verify_ssi_certificate(phi, cert)
    for m in (2, 3, 5):
        cert = dy.ssi_analyze(dy.check_endomorphism(spec, [BSElement(1, m), t]))
        assert cert.verdict == "notSSI" and cert.fixed_element == t
    cert = dy.ssi_analyze(dy.check_endomorphism(Z2, [(2, 0), (0, 2)]))
    assert cert.verdict == "ssiWitness" and cert.data["all_outside_unit_circle"]
    assert cert.data["rational_eigenvalues"] == [2, 2]
    assert time.perf_counter() - t0 < 1.0


def _abelian_lattice(k, scale=1):
    n = k + 1
    gens = [unipotent_exp(QMatrix([[Fraction(scale) if (r, s) == (i, k) else 0 for s in range(n)] for r in range(n)]))
            for i in range(k)]
    lie = lie_closure(gens).adapted()
    return MalcevLattice.from_generators(lie, gens)


@criterion("AC8", "thickening laws")
def test_ac8_thickening():
    for k, m in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 5)]:
        N = _abelian_lattice(k)
        R = root_subgroup(N, m)
        expected = _abelian_lattice(k, Fraction(1, m))
        assert R.is_subgroup_of(expected) and expected.is_subgroup_of(R)
        idx = subgroup_index(N, R)
        assert idx is not None and idx == m ** k
    N = HEIS.lattice
    R = root_subgroup(N, 2)
    assert all(N.contains(g ** 2) for g in R.generators)
    golden, _ = heisenberg_square_root_index(2)
    assert golden == 32
    idx = subgroup_index(N, R)
    assert idx is not None and idx == golden
    return f"Heisenberg m=2 index {idx}"


def _rand_matrix(rng, n, lo=-3, hi=3):
    return QMatrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])


def _random_endomorphism(spec, rng):
    if isinstance(spec, BSSpec):
        n = spec.n
        a = Fraction(rng.choice([1, -1]) * rng.randint(1, 4), n ** rng.randint(0, 2))
        b = Fraction(rng.randint(-4, 4), n ** rng.randint(0, 2))
        return dy.check_endomorphism(spec, [BSElement(1, a), BSElement(Fraction(1, n), b)])
    if isinstance(spec, AbelianSpec):
        while True:
            M = _rand_matrix(rng, spec.ambient)
            if M.det():
                return dy.check_endomorphism(spec, [M.col(j) for j in range(spec.ambient)])
    if isinstance(spec, UnipotentSpec):
        while True:
            a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
            if a * d - b * c:
                imgs = [QMatrix([[1, a, rng.randint(-2, 2)], [0, 1, c], [0, 0, 1]]),
                        QMatrix([[1, b, rng.randint(-2, 2)], [0, 1, d], [0, 0, 1]])]
                return dy.check_endomorphism(spec, imgs)
    A = spec.actors[0]
    while True:
        L = rng.randint(-2, 2) * QMatrix.identity(2) + rng.randint(-2, 2) * A
        if L.det():
            w = (rng.randint(-3, 3), rng.randint(-3, 3))
            return dy.check_endomorphism(spec, [SplitElement(L.col(0), (0,)), SplitElement(L.col(1), (0,)),
                                                SplitElement(w, (1,))])


@criterion("AC9", f"property suites ({CASES} seed-pinned cases each)")
def test_ac9_properties():
    rng = random.Random(SEED)
    specs = [BSSpec(2), BSSpec(-6), Z2, HEIS, SplitSpec(Z2, (QMatrix(CAT),)), Z3A]
    counts = {}

    # group-law associativity
    for i in range(CASES):
        spec = specs[i % len(specs)]
        a, b, c = (random_element(spec, rng) for _ in range(3))
        assert multiply(spec, multiply(spec, a, b), c) == multiply(spec, a, multiply(spec, b, c))
        assert multiply(spec, a, inverse(spec, a)) == identity(spec)
    counts["associativity"] = CASES

    # Jordan-Chevalley reassembly
    done = 0
    while done < CASES:
        A = _rand_matrix(rng, rng.randint(1, 4))
        if A.det() == 0:
            continue
        S, U = jordan_chevalley(A)
        assert S * U == A and S * U == U * S and is_unipotent(U)
        assert poly_at_matrix(squarefree_part(char_poly(A)), S).is_zero()
        done += 1
    counts["jordan-chevalley"] = done

    # exp / log round trip
    for _ in range(CASES):
        n = rng.randint(2, 5)
        N = QMatrix([[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) if j > i else 0 for j in range(n)]
                     for i in range(n)])
        assert nilpotent_log(unipotent_exp(N)) == N
        U = QMatrix.identity(n) + N
        assert unipotent_exp(nilpotent_log(U)) == U
    counts["exp-log"] = CASES

    # extendEndomorphism functoriality: ext(phi o psi) = ext(phi) ext(psi)
    fspecs = [BSSpec(2), BSSpec(6), Z2, HEIS, SplitSpec(Z2, (QMatrix(CAT),))]
    hulls = {id(s): build_hull(s) for s in fspecs}
    pools = {id(s): [] for s in fspecs}
    for s in fspecs:
        for _ in range(12):
            phi = _random_endomorphism(s, rng)
            pools[id(s)].append((phi, extend_endomorphism(s, hulls[id(s)], phi.images).lie_map))
    for i in range(CASES):
        s = fspecs[i % len(fspecs)]
        (phi, Lp), (psi, Ls) = rng.choice(pools[id(s)]), rng.choice(pools[id(s)])
        comp = dy.compose(phi, psi)
        assert extend_endomorphism(s, hulls[id(s)], comp.images).lie_map == Lp * Ls
    counts["functoriality"] = CASES

    # applyAut is a homomorphism
    for i in range(CASES):
        n = rng.choice([2, -3, 6, 12, -30])
        spec = BSSpec(n)
        nf = bsaut.aut_normalize(n, bsaut.random_word(n, rng))
        g, h = random_element(spec, rng), random_element(spec, rng)
        lhs = bsaut.apply_aut(n, nf, multiply(spec, g, h))
        assert lhs == multiply(spec, bsaut.apply_aut(n, nf, g), bsaut.apply_aut(n, nf, h))
    counts["applyAut"] = CASES

    # JSON determinism: equal content gives byte-identical output regardless of construction order
    for _ in range(CASES):
        items = [(f"k{j}", Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))) for j in range(5)]
        spec = rng.choice(specs)
        payload = {"elements": [random_element(spec, rng) for _ in range(2)], **dict(items)}
        shuffled = dict(rng.sample(list(payload.items()), len(payload)))
        a, b = dumps(report("x", payload)), dumps(report("x", shuffled))
        assert a == b and dumps(json.loads(a)) == a
    counts["json"] = CASES
    return ", ".join(f"{k} {v}" for k, v in counts.items())


if __name__ == "__main__":
    failed = 0
    for fn in (test_ac1_hulls, test_ac2_spectrum_fitting, test_ac3_collins_inn, test_ac4_out, test_ac5_reidemeister,
               test_ac6_zeta, test_ac7_ssi, test_ac8_thickening, test_ac9_properties):
        try:
            fn()
        except Exception:
            failed += 1
    sys.exit(1 if failed else 0)
