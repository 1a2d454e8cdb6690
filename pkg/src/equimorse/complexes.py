"""Bounded chain complexes of finitely generated free modules over Z or F_p,
with homology computed through Smith normal form (integral case) or ranks
(mod p case)."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _intlinalg as la
from ._intlinalg import Matrix, smith_normal_form  # re-exported

__all__ = [
    "ChainComplex",
    "ChainComplexError",
    "HomologySummary",
    "homology",
    "smith_normal_form",
]


class ChainComplexError(ValueError):
    """Boundary maps fail shape or d∘d = 0 requirements."""

    def __init__(self, msg, degree=None):
        super().__init__(msg)
        self.degree = degree


@dataclass(eq=False)
class ChainComplex:
    """ranks[n] generators in degree n; boundary[n] maps degree n to n-1.

    char == 0 means integer coefficients, otherwise a prime p.  d∘d = 0 is
    checked at construction (mod p when char > 0).
    """

    char: int
    ranks: dict[int, int]
    boundary: dict[int, Matrix]

    def __post_init__(self):
        self.ranks = {n: r for n, r in self.ranks.items() if r > 0}
        cleaned = {}
        for n, d in self.boundary.items():
            rows, cols = la.shape(d)
            if rows != self.rank(n - 1) or cols != self.rank(n):
                raise ChainComplexError(
                    f"boundary in degree {n} has shape {(rows, cols)}, "
                    f"expected {(self.rank(n - 1), self.rank(n))}",
                    degree=n,
                )
            if rows and cols:
                cleaned[n] = la.from_rows(d)
        self.boundary = cleaned
        for n in list(self.boundary):
            if n + 1 in self.boundary:
                sq = la.mat_mul(self.boundary[n], self.boundary[n + 1])
                if self.char:
                    sq = la.mat_mod(sq, self.char)
                if not la.is_zero(sq):
                    raise ChainComplexError(
                        f"d∘d != 0 from degree {n + 1}", degree=n + 1
                    )

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def d(self, n: int) -> Matrix:
        """Boundary map out of degree n (zero matrix if absent)."""
        if n in self.boundary:
            return self.boundary[n]
        return la.zeros(self.rank(n - 1), self.rank(n))

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * r for n, r in self.ranks.items())

    def reduce_mod(self, p: int) -> "ChainComplex":
        """The same complex with coefficients reduced mod a prime p."""
        return ChainComplex(
            char=p,
            ranks=dict(self.ranks),
            boundary={n: la.mat_mod(d, p) for n, d in self.boundary.items()},
        )


@dataclass(eq=True)
class HomologySummary:
    """Per-degree Betti number and torsion divisors (empty over a field)."""

    char: int
    entries: dict[int, tuple[int, tuple[int, ...]]] = field(default_factory=dict)

    def betti(self, n: int) -> int:
        return self.entries.get(n, (0, ()))[0]

    # over F_p the Betti number is the dimension
    dim = betti

    def torsion(self, n: int) -> tuple[int, ...]:
        return self.entries.get(n, (0, ()))[1]

    def group(self, n: int) -> tuple[int, tuple[int, ...]]:
        return self.entries.get(n, (0, ()))

    def degrees(self) -> list[int]:
        return sorted(n for n, (b, t) in self.entries.items() if b or t)

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * b for n, (b, _) in self.entries.items())

    def describe(self, n: int) -> str:
        b, tors = self.group(n)
        ring = "Z" if self.char == 0 else f"F{self.char}"
        parts = []
        if b == 1:
            parts.append(ring)
        elif b > 1:
            parts.append(f"{ring}^{b}")
        parts.extend(f"Z/{t}" for t in tors)
        return " + ".join(parts) if parts else "0"

    def text_table(self) -> str:
        lines = ["degree  group"]
        degs = self.degrees() or [0]
        for n in range(min(degs), max(degs) + 1):
            lines.append(f"{n:>6}  {self.describe(n)}")
        return "\n".join(lines)

    def csv_rows(self) -> list[str]:
        rows = ["degree,betti,torsion"]
        for n in self.degrees():
            b, tors = self.group(n)
            rows.append(f"{n},{b},{';'.join(map(str, tors)) or ''}")
        return rows


def homology(C: ChainComplex) -> HomologySummary:
    """Homology of the complex: Z^betti + sum of Z/d_i in the Z case,
    dimensions in the F_p case."""
    entries: dict[int, tuple[int, tuple[int, ...]]] = {}
    for n in C.degrees():
        rn = C.rank(n)
        if C.char:
            r_out = la.rank(list(C.d(n)), C.char) if C.rank(n - 1) else 0
            r_in = la.rank(list(C.d(n + 1)), C.char) if C.rank(n + 1) else 0
            dim = rn - r_out - r_in
            if dim:
                entries[n] = (dim, ())
        else:
            diag_out = la.snf_diagonal(C.d(n)) if C.rank(n - 1) else []
            diag_in = la.snf_diagonal(C.d(n + 1)) if C.rank(n + 1) else []
            betti = rn - len(diag_out) - len(diag_in)
            torsion = tuple(abs(x) for x in diag_in if abs(x) > 1)
            if betti or torsion:
                entries[n] = (betti, torsion)
    return HomologySummary(char=C.char, entries=entries)
