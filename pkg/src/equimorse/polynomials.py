"""Exact multivariate polynomial arithmetic, truncated Taylor jets, bump
polynomial jet interpolation, and equivariant averaging/lifting.

Coefficients are Fractions by default (the exact backend).  Linear actions
with irrational orthogonal matrices (rotations of order >= 3) use a float
backend: the same classes with float coefficients and tolerance 1e-12 checks
in place of exact equality.

The heavy products behind interpolation run on an internal integer layer:
denominators are cleared once, coefficients stay Python ints, and large
products go through Kronecker substitution (pack both factors into big
integers, multiply with gmpy2 when available, unpack slots).  Fractions are
rebuilt in a single pass at the end.
"""

from __future__ import annotations

import itertools
import math
import numbers
from fractions import Fraction

from .groups import FiniteGroup, Subgroup, left_cosets

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

__all__ = [
    "DuplicatePoints",
    "Jet",
    "JetNotFixed",
    "LinearAction",
    "Polynomial",
    "bump_poly",
    "equivariant_average",
    "equivariant_jet_lift",
    "jet_interpolate",
    "norm_squared_poly",
    "taylor_jet",
    "transport_jet",
]


class DuplicatePoints(ValueError):
    """Interpolation points must be pairwise distinct."""


class JetNotFixed(ValueError):
    """A jet must be fixed by the basepoint's stabilizer to lift."""


def _coerce(c):
    t = type(c)
    if t is Fraction or t is float:
        return c
    if t is int:
        return Fraction(c)
    if isinstance(c, numbers.Integral):
        return Fraction(int(c))
    if isinstance(c, numbers.Real):
        # numpy floats and friends stay inexact
        return float(c)
    return Fraction(c)


# -- integer term layer ------------------------------------------------------
#
# Term dicts with int coefficients plus a tracked denominator.  All the mask
# algebra in interpolation happens here.

_DIRECT_PAIR_LIMIT = 50_000


def _imul_direct(A: dict, B: dict) -> dict:
    out: dict = {}
    get = out.get
    for ea, ca in A.items():
        for eb, cb in B.items():
            e = tuple(map(sum, zip(ea, eb)))
            out[e] = get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _imul_kronecker(A: dict, B: dict, nvars: int) -> dict:
    """Exact product of int-coefficient term dicts by packing each factor
    into one big integer (positive and negative parts separately, so slots
    never borrow)."""
    da = [0] * nvars
    db = [0] * nvars
    ma = mb = 0
    for e, c in A.items():
        da = [max(x, y) for x, y in zip(da, e)]
        ma = max(ma, abs(c))
    for e, c in B.items():
        db = [max(x, y) for x, y in zip(db, e)]
        mb = max(mb, abs(c))
    rad = [x + y + 1 for x, y in zip(da, db)]
    nslots = math.prod(rad)
    bound = ma * mb * min(len(A), len(B))
    sb = bound.bit_length() // 8 + 2  # slot width in bytes

    def pack(e):
        k = 0
        for i in reversed(range(nvars)):
            k = k * rad[i] + e[i]
        return k

    def encode(T, positive):
        buf = bytearray(nslots * sb)
        for e, c in T.items():
            if (c > 0) == positive:
                off = pack(e) * sb
                buf[off:off + sb] = abs(c).to_bytes(sb, "little")
        return _mpz(int.from_bytes(bytes(buf), "little"))

    ap, am = encode(A, True), encode(A, False)
    if B is A:
        bp, bm = ap, am
    else:
        bp, bm = encode(B, True), encode(B, False)
    pos_bytes = int(ap * bp + am * bm).to_bytes(nslots * sb + sb, "little")
    neg_bytes = int(ap * bm + am * bp).to_bytes(nslots * sb + sb, "little")

    # locate nonzero slots with numpy, then decode only those
    import numpy as _np

    posa = _np.frombuffer(pos_bytes, dtype=_np.uint8)[: nslots * sb].reshape(nslots, sb)
    nega = _np.frombuffer(neg_bytes, dtype=_np.uint8)[: nslots * sb].reshape(nslots, sb)
    nz = _np.flatnonzero(posa.any(axis=1) | nega.any(axis=1))

    out = {}
    fb = int.from_bytes
    for idx in nz.tolist():
        off = idx * sb
        c = fb(pos_bytes[off:off + sb], "little") - fb(neg_bytes[off:off + sb], "little")
        if c:
            e = []
            k = idx
            for r in rad:
                k, rem = divmod(k, r)
                e.append(rem)
            out[tuple(e)] = c
    return out


def _imul(A: dict, B: dict, nvars: int) -> dict:
    if not A or not B:
        return {}
    # Kronecker only pays off for balanced products: its cost scales with the
    # dense slot count, which a very sparse factor cannot amortise
    if len(A) * len(B) <= _DIRECT_PAIR_LIMIT or min(len(A), len(B)) < 120:
        return _imul_direct(A, B)
    return _imul_kronecker(A, B, nvars)


def _icontent_reduce(T: dict, den: int) -> tuple[dict, int]:
    """Divide out the gcd of all coefficients and the denominator."""
    if not T or den == 1:
        return T, den
    g = den
    for c in T.values():
        g = math.gcd(g, c)
        if g == 1:
            return T, den
    return {e: c // g for e, c in T.items()}, den // g


def _iscale(T: dict, c: int) -> dict:
    if not c:
        return {}
    return {e: v * c for e, v in T.items()}


def _iadd_into(acc: dict, T: dict, scalar: int = 1) -> None:
    for e, c in T.items():
        s = acc.get(e, 0) + scalar * c
        if s:
            acc[e] = s
        else:
            acc.pop(e, None)


def _to_scaled_ints(T: dict) -> tuple[dict, int]:
    """Clear denominators: return (integer terms, common denominator)."""
    den = 1
    for c in T.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return {e: c.numerator * (den // c.denominator) for e, c in T.items()}, den


def _from_scaled_ints(nvars: int, T: dict, den: int) -> "Polynomial":
    return Polynomial._raw(nvars, {e: Fraction(c, den) for e, c in T.items() if c}, True)


# -- polynomials -----------------------------------------------------------


class Polynomial:
    """Sparse polynomial: exponent tuple -> coefficient, zero terms dropped."""

    __slots__ = ("nvars", "terms", "exact")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        exact = True
        for e, c in (terms or {}).items():
            c = _coerce(c)
            if c:
                clean[tuple(e)] = c
                if type(c) is float:
                    exact = False
        self.terms = clean
        self.exact = exact

    @classmethod
    def _raw(cls, nvars: int, terms: dict, exact: bool) -> "Polynomial":
        """Internal constructor: terms already clean (typed, no zeros)."""
        self = object.__new__(cls)
        self.nvars = nvars
        self.terms = terms
        self.exact = exact
        return self

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {}, True)

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, nvars: int, expo, c=1) -> "Polynomial":
        return cls(nvars, {tuple(expo): c})

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, float)):
            other = Polynomial.constant(self.nvars, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(
            self.nvars, {e: -c for e, c in self.terms.items()}, self.exact
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, float)):
            other = Polynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            other = _coerce(other)
            if not other:
                return Polynomial.zero(self.nvars)
            return Polynomial._raw(
                self.nvars,
                {e: c * other for e, c in self.terms.items()},
                self.exact and type(other) is not float,
            )
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        if not self.terms or not other.terms:
            return Polynomial.zero(self.nvars)
        exact = self.exact and other.exact
        if not exact or len(self.terms) * len(other.terms) <= _DIRECT_PAIR_LIMIT:
            out: dict = {}
            get = out.get
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    e = tuple(map(sum, zip(ea, eb)))
                    out[e] = get(e, 0) + ca * cb
            return Polynomial._raw(
                self.nvars, {e: c for e, c in out.items() if c}, exact
            )
        ia, da = _to_scaled_ints(self.terms)
        ib, db = _to_scaled_ints(other.terms)
        prod = _imul_kronecker(ia, ib, self.nvars)
        den = da * db
        return Polynomial._raw(
            self.nvars, {e: Fraction(c, den) for e, c in prod.items()}, True
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point):
        point = [_coerce(x) for x in point]
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total += v
        return total

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return Polynomial._raw(self.nvars, out, self.exact)

    def gradient(self) -> list["Polynomial"]:
        return [self.derivative(i) for i in range(self.nvars)]

    def substitute_linear(self, matrix) -> "Polynomial":
        """f(A x): substitute x_i -> sum_j A[i][j] x_j.

        Signed permutation matrices (every exact group action in the
        fixtures) reduce to an exponent remap, which keeps transport of the
        large interpolation masks cheap.
        """
        n = self.nvars
        sp = _signed_permutation(matrix, n)
        if sp is not None:
            out = {}
            for e, c in self.terms.items():
                e2 = [0] * n
                sign = 1
                for i, k in enumerate(e):
                    col, s = sp[i]
                    e2[col] = k
                    if s < 0 and k % 2:
                        sign = -sign
                out[tuple(e2)] = c if sign > 0 else -c
            return Polynomial._raw(n, out, self.exact)
        lin = [
            Polynomial(n, {tuple(1 if j == k else 0 for k in range(n)): matrix[i][j]
                           for j in range(n) if matrix[i][j]})
            for i in range(n)
        ]
        maxdeg = [0] * n
        for e in self.terms:
            maxdeg = [max(a, b) for a, b in zip(maxdeg, e)]
        pows = []
        for i in range(n):
            pi = [Polynomial.constant(n, 1)]
            for _ in range(maxdeg[i]):
                pi.append(pi[-1] * lin[i])
            pows.append(pi)
        total = Polynomial.zero(n)
        for e, c in self.terms.items():
            term = Polynomial.constant(n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pows[i][k]
            total = total + term
        return total

    def as_float(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: float(c) for e, c in self.terms.items()})

    def to_records(self) -> list:
        """Serializable form: (exponents, numerator, denominator) triples;
        denominator 0 marks a float coefficient."""
        out = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if isinstance(c, float):
                out.append([list(e), c, 0])
            else:
                out.append([list(e), c.numerator, c.denominator])
        return out

    @classmethod
    def from_records(cls, nvars: int, records) -> "Polynomial":
        terms = {}
        for expo, num, den in records:
            terms[tuple(expo)] = float(num) if den == 0 else Fraction(num, den)
        return cls(nvars, terms)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for e in sorted(self.terms)[:6]:
            mono = "*".join(
                f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k
            )
            bits.append(f"{self.terms[e]}{'*' + mono if mono else ''}")
        more = " + ..." if len(self.terms) > 6 else ""
        return f"Polynomial({' + '.join(bits)}{more})"


def _signed_permutation(matrix, n):
    """Rows of a signed permutation matrix as (column, sign) pairs, else None."""
    out = []
    for i in range(n):
        hit = None
        for j in range(n):
            v = matrix[i][j]
            if v:
                if hit is not None or v not in (1, -1):
                    return None
                hit = (j, 1 if v > 0 else -1)
        if hit is None:
            return None
        out.append(hit)
    if len({c for c, _ in out}) != n:
        return None
    return out


def norm_squared_poly(nvars: int, center=None) -> Polynomial:
    """||x - p||^2 as a polynomial, with the standard inner product."""
    total = Polynomial.zero(nvars)
    for i in range(nvars):
        xi = Polynomial.variable(nvars, i)
        if center is not None and center[i]:
            xi = xi - _coerce(center[i])
        total = total + xi * xi
    return total


# -- jets -------------------------------------------------------------------


class Jet:
    """Order-k Taylor data at a basepoint: multi-indices of total degree < k."""

    __slots__ = ("basepoint", "order", "terms")

    def __init__(self, basepoint, order: int, terms: dict | None = None):
        if order < 0:
            raise ValueError("jet order must be >= 0")
        self.basepoint = tuple(_coerce(x) for x in basepoint)
        self.order = order
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if sum(e) >= order:
                raise ValueError(f"multi-index {e} has degree >= order {order}")
            c = _coerce(c)
            if c:
                clean[e] = c
        self.terms = clean

    @property
    def nvars(self) -> int:
        return len(self.basepoint)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.basepoint == other.basepoint
            and self.order == other.order
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"Jet(at {self.basepoint}, order {self.order}, {len(self.terms)} terms)"

    def coefficient(self, expo) -> Fraction:
        return self.terms.get(tuple(expo), Fraction(0))

    def as_polynomial(self) -> Polynomial:
        """The representative sum c_a (x - p)^a, expanded."""
        n = self.nvars
        total = Polynomial.zero(n)
        for e, c in self.terms.items():
            mono = Polynomial.constant(n, c)
            for i, k in enumerate(e):
                if k:
                    xi = Polynomial.variable(n, i) - self.basepoint[i]
                    mono = mono * xi**k
            total = total + mono
        return total

    def close_to(self, other: "Jet", tol: float = 1e-9) -> bool:
        if self.order != other.order:
            return False
        if any(abs(float(a) - float(b)) > tol
               for a, b in zip(self.basepoint, other.basepoint)):
            return False
        keys = set(self.terms) | set(other.terms)
        return all(
            abs(self.terms.get(e, 0) - other.terms.get(e, 0)) <= tol for e in keys
        )


def taylor_jet(f: Polynomial, point, k: int) -> Jet:
    """The degree-k Taylor expansion of f about the point: f mod m_p^k.

    Coefficient of (x-p)^b is sum over terms a >= b of
    f_a * prod binom(a_i, b_i) * p^(a-b); exact in the exact backend.

    The exact path clears all denominators first and accumulates integers,
    so extracting jets from the large interpolation outputs stays fast.
    """
    n = f.nvars
    p = [_coerce(x) for x in point]
    exact = f.exact and not any(type(x) is float for x in p)
    maxdeg = [0] * n
    for e in f.terms:
        maxdeg = [max(a, b) for a, b in zip(maxdeg, e)]

    if not exact:
        pows = []
        for i in range(n):
            pi = [1.0]
            for _ in range(maxdeg[i]):
                pi.append(pi[-1] * float(p[i]))
            pows.append(pi)
        out: dict = {}
        for a, c in f.terms.items():
            ranges = [range(0, min(ai, k - 1) + 1) for ai in a]
            for b in itertools.product(*ranges):
                if sum(b) >= k:
                    continue
                coef = float(c)
                for i in range(n):
                    if a[i] - b[i]:
                        coef *= pows[i][a[i] - b[i]]
                    if b[i]:
                        coef *= math.comb(a[i], b[i])
                out[b] = out.get(b, 0.0) + coef
        return Jet(p, k, {e: c for e, c in out.items() if c})

    iterms, fden = _to_scaled_ints(f.terms)
    pden = 1
    for x in p:
        pden = pden * x.denominator // math.gcd(pden, x.denominator)
    unum = [int(x * pden) for x in p]
    maxtot = max((sum(e) for e in f.terms), default=0)
    upows = []
    for i in range(n):
        pi = [1]
        for _ in range(maxdeg[i]):
            pi.append(pi[-1] * unum[i])
        upows.append(pi)
    vpows = [1]
    for _ in range(maxtot):
        vpows.append(vpows[-1] * pden)
    acc: dict = {}
    for a, c in iterms.items():
        ranges = [range(0, min(ai, k - 1) + 1) for ai in a]
        for b in itertools.product(*ranges):
            if sum(b) >= k:
                continue
            drop = sum(a) - sum(b)
            coef = c * vpows[maxtot - drop]
            for i in range(n):
                if a[i] - b[i]:
                    coef *= upows[i][a[i] - b[i]]
                if b[i]:
                    coef *= math.comb(a[i], b[i])
            acc[b] = acc.get(b, 0) + coef
    den = fden * vpows[maxtot]
    return Jet(p, k, {e: Fraction(c, den) for e, c in acc.items() if c})


# -- bump interpolation ------------------------------------------------------


def _check_distinct(points):
    pts = [tuple(_coerce(x) for x in p) for p in points]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] == pts[j]:
                raise DuplicatePoints(f"points {i} and {j} coincide")
    return pts


def bump_poly(points, j: int) -> Polynomial:
    """phi_j(x) = prod_{i != j} ||x - p_i||^2 / ||p_j - p_i||^2.

    Equal to 1 at p_j, 0 at every other p_i, of degree exactly 2(d-1).
    """
    pts = _check_distinct(points)
    n = len(pts[0])
    out = Polynomial.constant(n, 1)
    for i, p in enumerate(pts):
        if i == j:
            continue
        denom = sum((a - b) ** 2 for a, b in zip(pts[j], p))
        out = out * norm_squared_poly(n, p) * (1 / denom)
    return out


def _mask_float(pts, j: int, k: int) -> Polynomial:
    """1 - (1 - phi_j^k)^k on the float backend."""
    n = len(pts[0])
    phik = bump_poly(pts, j) ** k
    acc = Polynomial.zero(n)
    power = Polynomial.constant(n, 1)
    for i in range(1, k + 1):
        power = power * phik
        acc = acc + power * ((-1) ** (i + 1) * math.comb(k, i))
    return acc


def _mask_scaled(pts, j: int, k: int) -> tuple[dict, int]:
    """Integer form of 1 - (1 - phi_j^k)^k: returns (terms, denominator).

    Expanded through the binomial theorem, so phi_j^{ik} is formed by
    successive products of the integer numerator of phi_j^k.
    """
    n = len(pts[0])
    phi = bump_poly(pts, j)
    nphi, dphi = _to_scaled_ints(phi.terms)
    nphi, dphi = _icontent_reduce(nphi, dphi)
    npk = nphi
    for _ in range(k - 1):
        npk = _imul(npk, nphi, n)
    dk = dphi**k  # phi^k = npk / dk
    npk, dk = _icontent_reduce(npk, dk)
    acc: dict = {}
    power = {(0,) * n: 1}  # npk^i, denominator dk^i
    for i in range(1, k + 1):
        power = _imul(power, npk, n)
        scalar = (-1) ** (i + 1) * math.comb(k, i) * dk ** (k - i)
        _iadd_into(acc, power, scalar)
    return _icontent_reduce(acc, dk**k)


def jet_interpolate(points, jets, k: int) -> Polynomial:
    """One polynomial whose degree-k Taylor expansion at each p_j matches the
    given jet there: f = sum_j f_j * (1 - (1 - phi_j^k)^k).

    Degree is at most (2d-2)k^2 + (k-1) for d points.
    """
    pts = _check_distinct(points)
    if len(jets) != len(pts):
        raise ValueError("one jet per point required")
    for p, jet in zip(pts, jets):
        if tuple(jet.basepoint) != tuple(p):
            raise ValueError("jet basepoint does not match its point")
        if jet.order > k:
            raise ValueError("jet order exceeds interpolation order")
    n = len(pts[0])
    if k == 0:
        return Polynomial.zero(n)
    if len(pts) == 1:
        return jets[0].as_polynomial()

    if any(not jet.as_polynomial().exact for jet in jets) or any(
        type(x) is float for p in pts for x in p
    ):
        total = Polynomial.zero(n)
        for j, jet in enumerate(jets):
            total = total + jet.as_polynomial() * _mask_float(pts, j, k)
        return total

    total_num: dict = {}
    total_den = 1
    for j, jet in enumerate(jets):
        mask_num, mask_den = _mask_scaled(pts, j, k)
        rep_num, rep_den = _to_scaled_ints(jet.as_polynomial().terms)
        contrib = _imul(rep_num, mask_num, n)
        den = rep_den * mask_den
        lcm = total_den * den // math.gcd(total_den, den)
        if lcm != total_den:
            total_num = _iscale(total_num, lcm // total_den)
            total_den = lcm
        _iadd_into(total_num, contrib, lcm // den)
    return _from_scaled_ints(n, total_num, total_den)


# -- linear actions ----------------------------------------------------------


class LinearAction:
    """A representation of a finite group by n x n matrices.

    The exact backend stores Fraction matrices and checks the representation
    law exactly; the float backend allows irrational orthogonal matrices and
    checks the law and orthogonality to 1e-12.
    """

    TOL = 1e-12

    def __init__(self, group: FiniteGroup, matrices, exact: bool | None = None):
        self.group = group
        mats = []
        any_float = False
        for M in matrices:
            rows = tuple(tuple(_coerce(x) for x in row) for row in M)
            if any(type(x) is float for row in rows for x in row):
                any_float = True
            mats.append(rows)
        self.exact = (not any_float) if exact is None else exact
        if not self.exact:
            mats = [
                tuple(tuple(float(x) for x in row) for row in M) for M in mats
            ]
        self.matrices = tuple(mats)
        if len(self.matrices) != group.order:
            raise ValueError("one matrix per group element required")
        self.dim = len(self.matrices[0]) if self.matrices else 0
        self._validate()

    def _validate(self):
        G = self.group
        for M in self.matrices:
            if len(M) != self.dim or any(len(row) != self.dim for row in M):
                raise ValueError("matrices must be square of equal size")
        for a in G.elements():
            for b in G.elements():
                prod = _mat_mul_num(self.matrices[a], self.matrices[b])
                target = self.matrices[G.mul[a][b]]
                if not _mat_close(prod, target, 0 if self.exact else self.TOL):
                    raise ValueError(f"representation law fails on ({a},{b})")
        if not self.exact:
            ident = tuple(
                tuple(1.0 if i == j else 0.0 for j in range(self.dim))
                for i in range(self.dim)
            )
            for s, M in enumerate(self.matrices):
                if not _mat_close(_mat_mul_num(_transpose_num(M), M), ident, self.TOL):
                    raise ValueError(f"matrix for element {s} is not orthogonal")

    # -- constructors --

    @classmethod
    def trivial(cls, group: FiniteGroup, dim: int) -> "LinearAction":
        ident = tuple(
            tuple(Fraction(1 if i == j else 0) for j in range(dim)) for i in range(dim)
        )
        return cls(group, [ident] * group.order)

    @classmethod
    def sign_c2(cls, dim: int = 1) -> "LinearAction":
        """C2 acting on R^dim by negation."""
        G = FiniteGroup.cyclic(2)
        ident = [[Fraction(1 if i == j else 0) for j in range(dim)] for i in range(dim)]
        neg = [[Fraction(-1 if i == j else 0) for j in range(dim)] for i in range(dim)]
        return cls(G, [ident, neg])

    @classmethod
    def reflection_c2(cls, dim: int, axis: int) -> "LinearAction":
        """C2 on R^dim negating one coordinate."""
        G = FiniteGroup.cyclic(2)
        ident = [[Fraction(1 if i == j else 0) for j in range(dim)] for i in range(dim)]
        ref = [
            [Fraction((-1 if i == axis else 1) if i == j else 0) for j in range(dim)]
            for i in range(dim)
        ]
        return cls(G, [ident, ref])

    @classmethod
    def rotation_cn(cls, n: int) -> "LinearAction":
        """C_n rotating R^2 by multiples of 2*pi/n (float backend for n >= 3)."""
        G = FiniteGroup.cyclic(n)
        mats = []
        for j in range(n):
            th = 2.0 * math.pi * j / n
            c, s = math.cos(th), math.sin(th)
            mats.append(((c, -s), (s, c)))
        if n in (1, 2):
            mats = [
                tuple(tuple(Fraction(round(x)) for x in row) for row in M)
                for M in mats
            ]
        return cls(G, mats)

    @classmethod
    def permutation_s3(cls) -> "LinearAction":
        """S3 permuting the coordinates of R^3 (matches FiniteGroup.symmetric(3))."""
        G = FiniteGroup.symmetric(3)
        perms = sorted(itertools.permutations(range(3)))
        mats = []
        for p in perms:
            # (A_p x)_{p(j)} = x_j, so A_p e_j = e_{p(j)} and A_p A_q = A_{p∘q}
            M = [[Fraction(0)] * 3 for _ in range(3)]
            for j in range(3):
                M[p[j]][j] = Fraction(1)
            mats.append(tuple(tuple(row) for row in M))
        return cls(G, mats)

    @classmethod
    def block_sum(cls, actions: list["LinearAction"]) -> "LinearAction":
        """Direct sum of actions of the same group."""
        if not actions:
            raise ValueError("need at least one action")
        G = actions[0].group
        if any(a.group != G for a in actions):
            raise ValueError("all actions must share the group")
        exact = all(a.exact for a in actions)
        dim = sum(a.dim for a in actions)
        mats = []
        for s in G.elements():
            M = [[(Fraction(0) if exact else 0.0)] * dim for _ in range(dim)]
            off = 0
            for a in actions:
                for i in range(a.dim):
                    for j in range(a.dim):
                        M[off + i][off + j] = a.matrices[s][i][j]
                off += a.dim
            mats.append(tuple(tuple(row) for row in M))
        return cls(G, mats, exact=exact)

    # -- use --

    def matrix(self, s: int):
        return self.matrices[s]

    def apply(self, s: int, point):
        M = self.matrices[s]
        pt = [_coerce(x) for x in point]
        return tuple(
            sum(M[i][j] * pt[j] for j in range(self.dim)) for i in range(self.dim)
        )

    def is_orthogonal(self) -> bool:
        ident = tuple(
            tuple(_coerce(1 if i == j else 0) for j in range(self.dim))
            for i in range(self.dim)
        )
        tol = 0 if self.exact else self.TOL
        return all(
            _mat_close(_mat_mul_num(_transpose_num(M), M), ident, tol)
            for M in self.matrices
        )

    def stabilizer(self, point, tol: float = 1e-9) -> Subgroup:
        pt = tuple(_coerce(x) for x in point)
        # float input points carry numerical noise even under exact actions
        exact_cmp = self.exact and not any(type(x) is float for x in pt)
        elems = []
        for s in self.group.elements():
            img = self.apply(s, pt)
            if exact_cmp:
                if img == pt:
                    elems.append(s)
            else:
                if all(abs(float(a) - float(b)) < tol for a, b in zip(img, pt)):
                    elems.append(s)
        return Subgroup(self.group, tuple(elems))

    def orbit(self, point, tol: float = 1e-9):
        """One (coset representative, image point) pair per point of the orbit."""
        H = self.stabilizer(point, tol)
        out = []
        for c in left_cosets(self.group, H):
            s = c[0]
            out.append((s, self.apply(s, point)))
        return out


def _mat_mul_num(A, B):
    n = len(A)
    if n == 0 or len(B) == 0:
        return tuple(() for _ in range(n))
    m = len(B[0])
    k = len(B)
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def _transpose_num(A):
    return tuple(tuple(A[i][j] for i in range(len(A))) for j in range(len(A[0])))


def _mat_close(A, B, tol):
    if tol == 0:
        return A == B
    return all(
        abs(float(a) - float(b)) <= tol for ra, rb in zip(A, B) for a, b in zip(ra, rb)
    )


# -- equivariant operations ---------------------------------------------------


def equivariant_average(f: Polynomial, act: LinearAction) -> Polynomial:
    """(1/|G|) sum_s f(A_s x): the projection onto invariant polynomials."""
    G = act.group
    if f.exact and act.exact:
        perms = [_signed_permutation(act.matrices[s], f.nvars) for s in G.elements()]
        if all(sp is not None for sp in perms):
            # pure exponent remaps: do the sum on the integer layer
            iterms, den = _to_scaled_ints(f.terms)
            acc: dict = {}
            for sp in perms:
                for e, c in iterms.items():
                    e2 = [0] * f.nvars
                    sign = 1
                    for i, kk in enumerate(e):
                        col, s = sp[i]
                        e2[col] = kk
                        if s < 0 and kk % 2:
                            sign = -sign
                    key = tuple(e2)
                    acc[key] = acc.get(key, 0) + (c if sign > 0 else -c)
            return _from_scaled_ints(f.nvars, acc, den * G.order)
    total = Polynomial.zero(f.nvars)
    for s in G.elements():
        total = total + f.substitute_linear(act.matrices[s])
    if f.exact and act.exact:
        return total * Fraction(1, G.order)
    return total * (1.0 / G.order)


def transport_jet(jet: Jet, act: LinearAction, s: int) -> Jet:
    """The jet of f∘s^{-1} at s·p, for f any representative of the jet at p:
    substitute the inverse matrix into the representative and re-truncate."""
    G = act.group
    rep = jet.as_polynomial()
    moved = rep.substitute_linear(act.matrices[G.inverse[s]])
    return taylor_jet(moved, act.apply(s, jet.basepoint), jet.order)


def _jets_close(a: Jet, b: Jet, exact: bool) -> bool:
    if exact:
        return a == b
    return a.close_to(b, tol=1e-9)


def equivariant_jet_lift(point, jet: Jet, act: LinearAction, k: int) -> Polynomial:
    """Lift a stab(p)-fixed jet to a G-invariant polynomial with that jet.

    Transport the jet along the orbit, interpolate, then average.  Raises
    JetNotFixed when a stabilizer element moves the jet, which is exactly the
    obstruction to lifting.

    For norm-preserving actions the interpolation mask at s·p equals the mask
    at p composed with s^{-1}, so only one mask per orbit is expanded; the
    rest are transported.
    """
    pt = tuple(_coerce(x) for x in point)
    if tuple(jet.basepoint) != pt:
        raise ValueError("jet must be based at the given point")
    if jet.order > k:
        raise ValueError("jet order exceeds lift order")
    H = act.stabilizer(pt)
    for h in H.elements:
        if h == act.group.identity:
            continue
        moved = transport_jet(jet, act, h)
        if not _jets_close(moved, jet, act.exact):
            raise JetNotFixed(
                f"stabilizer element {h} does not fix the jet; lift obstructed"
            )
    orbit = act.orbit(pt)
    points = [q for _, q in orbit]
    jets = [transport_jet(jet, act, s) for s, _ in orbit]
    if k == 0:
        return Polynomial.zero(len(pt))
    if len(points) == 1:
        interp = jets[0].as_polynomial()
        return equivariant_average(interp, act)

    G = act.group
    if act.exact and act.is_orthogonal():
        _check_distinct(points)
        base = next(i for i, (_, q) in enumerate(orbit) if q == pt)
        mask_num, mask_den = _mask_scaled(points, base, k)
        base_mask = _from_scaled_ints(len(pt), mask_num, mask_den)
        total = Polynomial.zero(len(pt))
        for (s, _), jt in zip(orbit, jets):
            mask = base_mask.substitute_linear(act.matrices[G.inverse[s]])
            total = total + jt.as_polynomial() * mask
        return equivariant_average(total, act)

    interp = jet_interpolate(points, jets, k)
    return equivariant_average(interp, act)
