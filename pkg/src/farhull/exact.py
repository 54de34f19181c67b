"""Exact rational arithmetic: factored scalars, localizations, polynomials and matrices.

Everything here works over ``fractions.Fraction``; there is no floating point
anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

FACTOR_BOUND = 10**6


class FactorizationError(ValueError):
    """Raised when an integer has a cofactor beyond the trial-division bound."""


class NotNilpotentError(ValueError):
    def __init__(self, power: int):
        super().__init__(f"(U - I)^{power} is nonzero; input is not unipotent")
        self.power = power


class SingularMatrixError(ArithmeticError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


# ---------------------------------------------------------------------------
# integers and primes


def _miller_rabin(n: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3 * 10**24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    return _miller_rabin(n)


def factor_int(n: int, bound: int = FACTOR_BOUND) -> dict[int, int]:
    """Prime factorization of ``|n|`` by trial division up to ``bound``."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor zero")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n and d <= bound:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        if d * d > n or is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            raise FactorizationError(f"cofactor {n} exceeds trial-division bound {bound}")
    return out


def totient(n: int) -> int:
    result = n
    for p in factor_int(n):
        result -= result // p
    return result


@dataclass(frozen=True)
class FactoredRational:
    """A nonzero rational ``sign * prod(p**e)``."""

    sign: int
    exponents: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        keys = [p for p, _ in self.exponents]
        if keys != sorted(set(keys)):
            raise ValueError("exponent keys must be sorted and distinct")
        for p, e in self.exponents:
            if e == 0 or not is_prime(p):
                raise ValueError(f"bad factor {p}^{e}")

    @property
    def value(self) -> Fraction:
        v = Fraction(self.sign)
        for p, e in self.exponents:
            v *= Fraction(p) ** e
        return v

    def as_dict(self) -> dict[int, int]:
        return dict(self.exponents)


def factor(q, bound: int = FACTOR_BOUND) -> FactoredRational:
    q = as_fraction(q)
    if q == 0:
        raise ValueError("zero has no factorization")
    exps = factor_int(q.numerator, bound)
    for p, e in factor_int(q.denominator, bound).items():
        exps[p] = exps.get(p, 0) - e
    return FactoredRational(1 if q > 0 else -1, tuple(sorted((p, e) for p, e in exps.items() if e)))


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        ps = tuple(self.primes)
        object.__setattr__(self, "primes", ps)
        if list(ps) != sorted(set(ps)):
            raise ValueError("primes must be sorted and distinct")
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    @classmethod
    def of(cls, items: Iterable[int]) -> "PrimeSet":
        return cls(tuple(sorted(set(items))))

    @classmethod
    def support(cls, n: int) -> "PrimeSet":
        return cls.of(factor_int(n)) if n not in (0, 1, -1) else cls()

    def __contains__(self, p) -> bool:
        return p in self.primes

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __or__(self, other: "PrimeSet") -> "PrimeSet":
        return PrimeSet.of(self.primes + other.primes)

    def issubset(self, other: "PrimeSet") -> bool:
        return set(self.primes) <= set(other.primes)

    def __str__(self):
        return "{" + ",".join(map(str, self.primes)) + "}"


def strip_primes(n: int, S: PrimeSet) -> int:
    """The prime-to-S part of ``|n|``."""
    n = abs(n)
    if n == 0:
        return 0
    for p in S:
        while n % p == 0:
            n //= p
    return n


def in_localization(q, S: PrimeSet = PrimeSet()) -> bool:
    """True iff ``q`` lies in Z[1/S]."""
    return strip_primes(as_fraction(q).denominator, S) == 1


def is_s_unit(q, S: PrimeSet) -> bool:
    q = as_fraction(q)
    return q != 0 and strip_primes(q.numerator, S) == 1 and strip_primes(q.denominator, S) == 1


def s_gcd(a, b, S: PrimeSet = PrimeSet()) -> tuple[Fraction, Fraction, Fraction]:
    """Generator ``d`` of the Z[1/S]-module ``R a + R b`` in Q with ``u a + v b = d``."""
    a, b = as_fraction(a), as_fraction(b)
    D = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
    A, B = int(a * D), int(b * D)
    g, s, t = _egcd(A, B)
    if g == 0:
        return Fraction(0), Fraction(0), Fraction(0)
    unit = Fraction(g, strip_primes(g, S))
    return Fraction(g, D) / unit, s / unit, t / unit


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# polynomials: tuples of Fractions, lowest degree first

Poly = tuple


def poly(coeffs: Iterable) -> Poly:
    c = [as_fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_deg(p: Poly) -> int:
    return len(p) - 1


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, tuple(-c for c in q))


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly(out)


def poly_divmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(r) >= len(q) and r:
        c = r[-1] / q[-1]
        k = len(r) - len(q)
        out[k] = c
        for i, b in enumerate(q):
            r[i + k] -= c * b
        r = list(poly(r))
    return poly(out), poly(r)


def poly_monic(p: Poly) -> Poly:
    return tuple(c / p[-1] for c in p) if p else p


def poly_gcd(p: Poly, q: Poly) -> Poly:
    while q:
        p, q = q, poly_divmod(p, q)[1]
    return poly_monic(p)


def poly_deriv(p: Poly) -> Poly:
    return poly(i * c for i, c in enumerate(p) if i)


def poly_eval(p: Poly, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_str(p: Poly, var: str = "x") -> str:
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        coef = str(mag) if (mag != 1 or i == 0) else ""
        term = coef + ("*" if coef and mono else "") + mono
        parts.append(("-" if c < 0 else "+", term))
    s = "".join(f" {sg} {t}" for sg, t in parts).strip()
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def cyclotomic(d: int) -> Poly:
    """The d-th cyclotomic polynomial."""
    num = poly([-1] + [0] * (d - 1) + [1])
    for e in range(1, d):
        if d % e == 0:
            num = poly_divmod(num, cyclotomic(e))[0]
    return num


def cyclotomic_indices(p: Poly) -> list[int]:
    """All d such that the d-th cyclotomic polynomial divides ``p``."""
    n = poly_deg(p)
    found = []
    for d in range(1, 2 * n * n + 3):
        if totient(d) <= n and poly_deg(poly_gcd(p, cyclotomic(d))) > 0:
            found.append(d)
    return found


def rational_roots(p: Poly) -> list[Fraction]:
    """Distinct rational roots of ``p`` (rational root theorem)."""
    p = poly_monic(p)
    if not p:
        raise ValueError("zero polynomial")
    roots = []
    if p[0] == 0:
        roots.append(Fraction(0))
        while p and p[0] == 0:
            p = p[1:]
    if len(p) <= 1:
        return roots
    L = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in p), 1)
    ints = [int(c * L) for c in p]
    a0, an = abs(ints[0]), abs(ints[-1])
    nums = _divisors(a0)
    dens = _divisors(an)
    cands = {Fraction(s * a, b) for a in nums for b in dens for s in (1, -1)}
    for r in sorted(cands):
        if poly_eval(p, r) == 0:
            roots.append(r)
    return roots


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factor_int(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def squarefree_part(p: Poly) -> Poly:
    return poly_monic(poly_divmod(p, poly_gcd(p, poly_deriv(p)))[0])


# ---------------------------------------------------------------------------
# matrices


class QMatrix:
    """Immutable dense matrix with Fraction entries."""

    __slots__ = ("rows", "cols", "_e", "_hash")

    def __init__(self, entries):
        rows = tuple(tuple(as_fraction(x) for x in row) for row in entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self._e = rows
        self.rows = len(rows)
        self.cols = len(rows[0])
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int | None = None) -> "QMatrix":
        return cls([[0] * (r if c is None else c) for _ in range(r)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "QMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "QMatrix":
        """Matrix unit E_ij (0-based)."""
        return cls([[1 if (a, b) == (i, j) else 0 for b in range(n)] for a in range(n)])

    @classmethod
    def block_diag(cls, *blocks: "QMatrix") -> "QMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * m for _ in range(n)]
        r = c = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r + i][c + j] = b._e[i][j]
            r += b.rows
            c += b.cols
        return cls(out)

    @classmethod
    def from_flat(cls, values: Sequence, n: int) -> "QMatrix":
        return cls([values[i * n:(i + 1) * n] for i in range(n)])

    # -- basics
    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i: int) -> tuple:
        return self._e[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._e)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._e]

    def flat(self) -> tuple:
        return tuple(x for r in self._e for x in r)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def T(self) -> "QMatrix":
        return QMatrix(list(zip(*self._e)))

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self._e == other._e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._e)
        return self._hash

    def __repr__(self):
        return "QMatrix([" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._e) + "])"

    # -- arithmetic
    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._same_shape(other)
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._same_shape(other)
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __neg__(self) -> "QMatrix":
        return QMatrix([[-a for a in r] for r in self._e])

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} x {other.shape}")
            ot = list(zip(*other._e))
            return QMatrix([[sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in ot]
                            for r in self._e])
        c = as_fraction(other)
        return QMatrix([[c * a for a in r] for r in self._e])

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int) -> "QMatrix":
        if not self.is_square:
            raise ValueError("power of non-square matrix")
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = QMatrix.identity(self.rows)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum((a * as_fraction(b) for a, b in zip(r, v)), Fraction(0)) for r in self._e)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    # -- predicates
    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._e for x in r)

    def is_identity(self) -> bool:
        return self.is_square and self == QMatrix.identity(self.rows)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._e for x in r)

    def trace(self) -> Fraction:
        return sum((self._e[i][i] for i in range(min(self.shape))), Fraction(0))

    # -- elimination
    def rref(self) -> tuple["QMatrix", tuple[int, ...]]:
        m = [list(r) for r in self._e]
        pivots = []
        r = 0
        for c in range(self.cols):
            piv = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return QMatrix(m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Fraction:
        if not self.is_square:
            raise ValueError("determinant of non-square matrix")
        m = [list(r) for r in self._e]
        n = self.rows
        d = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d *= m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] / m[c][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def inverse(self) -> "QMatrix":
        if not self.is_square:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = QMatrix([list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self._e)])
        red, piv = aug.rref()
        if piv[:n] != tuple(range(n)):
            raise SingularMatrixError("matrix is singular")
        return QMatrix([red.row(i)[n:] for i in range(n)])

    def nullspace(self) -> list[tuple]:
        """Basis of the right kernel, as tuples."""
        red, piv = self.rref()
        free = [c for c in range(self.cols) if c not in piv]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for i, p in enumerate(piv):
                v[p] = -red[i, f]
            basis.append(tuple(v))
        return basis

    def solve(self, b: Sequence) -> tuple | None:
        """Some solution of ``self x = b`` or None."""
        aug = QMatrix([list(r) + [as_fraction(bi)] for r, bi in zip(self._e, b)])
        red, piv = aug.rref()
        if self.cols in piv:
            return None
        x = [Fraction(0)] * self.cols
        for i, p in enumerate(piv):
            x[p] = red[i, self.cols]
        return tuple(x)


def bracket(a: QMatrix, b: QMatrix) -> QMatrix:
    return a * b - b * a


def char_poly(A: QMatrix) -> Poly:
    """Characteristic polynomial det(xI - A) via Faddeev-LeVerrier."""
    if not A.is_square:
        raise ValueError("characteristic polynomial needs a square matrix")
    n = A.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    I = QMatrix.identity(n)
    M = QMatrix.zeros(n)
    for k in range(1, n + 1):
        M = A * M + coeffs[n - k + 1] * I
        coeffs[n - k] = -(A * M).trace() / k
    return poly(coeffs)


def poly_at_matrix(p: Poly, A: QMatrix) -> QMatrix:
    n = A.rows
    acc = QMatrix.zeros(n)
    I = QMatrix.identity(n)
    for c in reversed(p):
        acc = acc * A + c * I
    return acc


def root_of_unity_orders(A: QMatrix) -> list[int]:
    """Orders d of the roots of unity occurring as eigenvalues of A."""
    return cyclotomic_indices(char_poly(A))


def has_root_of_unity_eigenvalue(A: QMatrix) -> bool:
    return bool(root_of_unity_orders(A))


def jordan_chevalley(A: QMatrix) -> tuple[QMatrix, QMatrix]:
    """Multiplicative decomposition A = S U with S semisimple, U unipotent, SU = US.

    S is found by Newton iteration on the squarefree part of the characteristic
    polynomial, so it is a polynomial in A and everything stays over Q.
    """
    if A.det() == 0:
        raise SingularMatrixError("Jordan-Chevalley decomposition needs an invertible matrix")
    p = squarefree_part(char_poly(A))
    dp = poly_deriv(p)
    X = A
    while True:
        pX = poly_at_matrix(p, X)
        if pX.is_zero():
            break
        X = X - pX * poly_at_matrix(dp, X).inverse()
    return X, X.inverse() * A


def nilpotency_index(N: QMatrix) -> int:
    """Smallest k with N^k = 0; raises NotNilpotentError otherwise."""
    n = N.rows
    P = QMatrix.identity(n)
    for k in range(1, n + 1):
        P = P * N
        if P.is_zero():
            return k
    raise NotNilpotentError(n)


def nilpotent_log(U: QMatrix) -> QMatrix:
    n = U.rows
    N = U - QMatrix.identity(n)
    k = nilpotency_index(N)
    out = QMatrix.zeros(n)
    P = QMatrix.identity(n)
    for j in range(1, k):
        P = P * N
        out = out + Fraction((-1) ** (j + 1), j) * P
    return out


def unipotent_exp(N: QMatrix) -> QMatrix:
    n = N.rows
    k = nilpotency_index(N)
    out = QMatrix.identity(n)
    P = QMatrix.identity(n)
    fact = 1
    for j in range(1, k):
        P = P * N
        fact *= j
        out = out + Fraction(1, fact) * P
    return out


def is_unipotent(U: QMatrix) -> bool:
    try:
        nilpotency_index(U - QMatrix.identity(U.rows))
    except NotNilpotentError:
        return False
    return True


def unipotent_power(U: QMatrix, c) -> QMatrix:
    """U^c for rational c, defined through the nilpotent logarithm."""
    c = as_fraction(c)
    if c.denominator == 1:
        return U ** int(c)
    return unipotent_exp(c * nilpotent_log(U))


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class SmithDecomposition:
    left: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]
    diagonal: tuple[int, ...]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Unimodular L, R with L A R diagonal, d_1 | d_2 | ... and d_i >= 0."""
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    L = [[int(i == j) for j in range(m)] for i in range(m)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for M in (D, R):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        L[dst] = [a + q * b for a, b in zip(L[dst], L[src])]

    def add_col(dst, src, q):
        for M in (D, R):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
            rest = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
            rest += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
            if rest:
                _, i, j = min(rest)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]
    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SmithDecomposition(tuple(map(tuple, L)), tuple(map(tuple, R)), diag)


def integer_matrix(A) -> list[list[int]]:
    if isinstance(A, QMatrix):
        if not A.is_integral():
            raise ValueError("matrix is not integral")
        return [[int(x) for x in r] for r in A.tolist()]
    return [[int(x) for x in r] for r in A]


def clear_s_denominators(A: QMatrix, S: PrimeSet) -> QMatrix:
    """Scale A by an S-unit so that it becomes integral; requires entries in Z[1/S]."""
    scale = 1
    for x in A.flat():
        if not in_localization(x, S):
            raise ValueError(f"entry {x} not in Z[1/S] for S={S}")
        scale = scale * x.denominator // gcd(scale, x.denominator)
    return A * scale


def cokernel_order(A, S: PrimeSet = PrimeSet()) -> int | None:
    """|Z[1/S]^n / A Z[1/S]^n|, or None when infinite."""
    M = A if isinstance(A, QMatrix) else QMatrix(A)
    if not M.is_square:
        raise ValueError("cokernel order needs a square matrix")
    snf = smith_normal_form(integer_matrix(clear_s_denominators(M, S)))
    if any(d == 0 for d in snf.diagonal):
        return None
    out = 1
    for d in snf.diagonal:
        out *= strip_primes(d, S)
    return out


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Z-basis of {x in Z^n : A x = 0}."""
    A = [list(map(int, r)) for r in rows]
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    snf = smith_normal_form(A)
    r = sum(1 for d in snf.diagonal if d)
    return [tuple(snf.right[i][j] for i in range(n)) for j in range(r, n)]


def hermite_basis(vectors: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-echelon Z-basis (positive pivots) of the lattice spanned by integer vectors."""
    rows = [list(map(int, v)) for v in vectors]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    out: list[list[int]] = []
    col = 0
    while rows and col < n:
        active = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        if not active:
            col += 1
            continue
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] else rest).append(r)
            active = nxt
        piv = active[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        rows = [r for r in rest if any(r)]
        col += 1
    # reduce entries above pivots
    for i, r in enumerate(out):
        c = next(j for j, x in enumerate(r) if x)
        for k in range(i):
            q = out[k][c] // r[c]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], r)]
    return [tuple(r) for r in out]


def lattice_index(sub: Sequence[Sequence[int]], full_rank: int) -> int | None:
    """Index of the lattice spanned by ``sub`` in Z^full_rank, None if infinite."""
    if not sub:
        return 1 if full_rank == 0 else None
    snf = smith_normal_form([list(v) for v in sub])
    nz = [d for d in snf.diagonal if d]
    if len(nz) < full_rank:
        return None
    out = 1
    for d in nz:
        out *= d
    return out
