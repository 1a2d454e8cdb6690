"""G-CW complexes with stabilizer-labelled cell-orbits, the cellular Bredon
chain complex for a coefficient system, and the ordinary cellular complexes
of the subquotients (X/H)^K that serve as oracles for it.

A complex stores one representative per cell-orbit.  Boundary data is a list
of (orbit morphism, degree) records per (cell-orbit, face-orbit) pair; the
underlying cells are the cosets g*stab and the boundary of g*cell follows by
translation.  Attaching maps are never stored geometrically; the assembled
singular-kind boundary squaring to zero is the admission check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._intlinalg import Matrix
from .complexes import ChainComplex
from .coefficients import CoefficientSystem, build_system, induced_matrix
from .groups import (
    FiniteGroup,
    OrbitCategory,
    OrbitMorphism,
    Subgroup,
    double_coset,
    normalizer,
)

__all__ = [
    "CellOrbit",
    "GCWComplex",
    "InvalidPair",
    "VarianceMismatch",
    "bredon_chain_complex",
    "bredon_cochain_complex",
    "gcw_from_cells",
    "subquotient_complex",
]


class VarianceMismatch(ValueError):
    """Homology wants covariant systems; cohomology wants contravariant."""


class InvalidPair(ValueError):
    """The (H, K) pair does not act on the quotient structure."""


@dataclass(frozen=True)
class CellOrbit:
    stabilizer: Subgroup
    label: str = ""


@dataclass(eq=False)
class GCWComplex:
    """cells[n] lists the n-cell-orbits; boundary[n][(a, b)] holds the
    (morphism, degree) records from orbit a in dimension n to orbit b in
    dimension n-1.  marked flags cell-orbits of a subcomplex A for relative
    computations."""

    group: FiniteGroup
    cells: dict[int, tuple[CellOrbit, ...]]
    boundary: dict[int, dict[tuple[int, int], tuple[tuple[OrbitMorphism, int], ...]]]
    marked: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        self.cells = {n: tuple(cs) for n, cs in self.cells.items() if cs}
        for n, recs in self.boundary.items():
            for (a, b), lst in recs.items():
                src = self.cells[n][a]
                tgt = self.cells[n - 1][b]
                for m, deg in lst:
                    if m.source != src.stabilizer or m.target != tgt.stabilizer:
                        raise ValueError(
                            f"boundary record {n}:{a}->{b} has mismatched morphism"
                        )
        for dim, idx in self.marked:
            if idx >= len(self.cells.get(dim, ())):
                raise ValueError("marked cell out of range")
        # the subcomplex must be closed under the boundary
        for n, recs in self.boundary.items():
            for (a, b), lst in recs.items():
                if (n, a) in self.marked and lst:
                    if (n - 1, b) not in self.marked:
                        raise ValueError(
                            f"marked subcomplex not closed: ({n},{a}) -> ({n - 1},{b})"
                        )
        # admission check: the singular-kind assembly squares to zero,
        # equivalently the underlying cellular boundary does
        cat = OrbitCategory(self.group)
        sing = build_system(cat, "singular")
        bredon_chain_complex(self, sing, _validate=False)

    def dims(self) -> list[int]:
        return sorted(self.cells)

    def orbit_count(self, n: int) -> int:
        return len(self.cells.get(n, ()))

    def records(self, n: int, a: int, b: int):
        return self.boundary.get(n, {}).get((a, b), ())


def bredon_chain_complex(X: GCWComplex, M: CoefficientSystem,
                         _validate: bool = True) -> ChainComplex:
    """C_n = direct sum over n-cell-orbits of M(stab); the boundary block for
    a record list is the degree-weighted sum of induced matrices."""
    if _validate and M.variance != "covariant":
        raise VarianceMismatch(
            "homology assembly needs a covariant system; use "
            "bredon_cochain_complex for contravariant ones"
        )
    if M.cat.group != X.group:
        raise ValueError("coefficient system is over a different group")
    ranks: dict[int, int] = {}
    offsets: dict[int, list[int]] = {}
    for n in X.dims():
        offs = [0]
        for c in X.cells[n]:
            offs.append(offs[-1] + M.value(c.stabilizer).rank)
        offsets[n] = offs
        ranks[n] = offs[-1]
    boundary: dict[int, Matrix] = {}
    for n in X.dims():
        if n - 1 not in ranks or not ranks.get(n):
            continue
        rows = ranks[n - 1]
        cols = ranks[n]
        if rows == 0 or cols == 0:
            continue
        mat = [[0] * cols for _ in range(rows)]
        for (a, b), recs in X.boundary.get(n, {}).items():
            r0 = offsets[n - 1][b]
            c0 = offsets[n][a]
            for m, deg in recs:
                block = induced_matrix(M, m)
                for i in range(len(block)):
                    for j in range(len(block[0]) if block else 0):
                        mat[r0 + i][c0 + j] += deg * block[i][j]
        boundary[n] = tuple(tuple(r) for r in mat)
    return ChainComplex(char=M.char, ranks=ranks, boundary=boundary)


def bredon_cochain_complex(X: GCWComplex, N: CoefficientSystem) -> ChainComplex:
    """Cochain assembly for a contravariant system, returned as a chain
    complex on negated degrees: degree -n holds C^n, so homology at -n is
    the Bredon cohomology H^n."""
    if N.variance != "contravariant":
        raise VarianceMismatch("cochain assembly needs a contravariant system")
    if N.cat.group != X.group:
        raise ValueError("coefficient system is over a different group")
    ranks: dict[int, int] = {}
    offsets: dict[int, list[int]] = {}
    for n in X.dims():
        offs = [0]
        for c in X.cells[n]:
            offs.append(offs[-1] + N.value(c.stabilizer).rank)
        offsets[n] = offs
        ranks[-n] = offs[-1]
    boundary: dict[int, Matrix] = {}
    for n in X.dims():
        # delta: C^{n-1} -> C^n is the boundary out of degree -(n-1)
        if n - 1 not in X.dims() or not ranks.get(-n) or not ranks.get(-(n - 1)):
            continue
        rows = ranks[-n]
        cols = ranks[-(n - 1)]
        mat = [[0] * cols for _ in range(rows)]
        for (a, b), recs in X.boundary.get(n, {}).items():
            r0 = offsets[n][a]
            c0 = offsets[n - 1][b]
            for m, deg in recs:
                block = induced_matrix(N, m)  # N(stab_b) -> N(stab_a)
                for i in range(len(block)):
                    for j in range(len(block[0]) if block else 0):
                        mat[r0 + i][c0 + j] += deg * block[i][j]
        boundary[-(n - 1)] = tuple(tuple(r) for r in mat)
    return ChainComplex(char=N.char, ranks=ranks, boundary=boundary)


def subquotient_complex(X: GCWComplex, H: Subgroup, K: Subgroup,
                        char: int = 0, relative: bool = False) -> ChainComplex:
    """Ordinary cellular chain complex of (X/H)^K.

    Cells are the K-fixed H-classes Hg*stab of underlying cells; the
    boundary accumulates record degrees over classes.  (e, e) recovers the
    underlying complex, (G, e) the quotient, (e, G) the G-fixed subcomplex.
    With relative=True the cells of the marked subcomplex are removed.
    """
    G = X.group
    if H.group != G or K.group != G:
        raise InvalidPair("H and K must be subgroups of the complex's group")
    nset = set(normalizer(G, H).elements)
    if not set(K.elements) <= nset:
        raise InvalidPair("K must normalize H to act on X/H")

    # classes[n]: list of (orbit index, double coset) in a fixed order
    classes: dict[int, list] = {}
    index: dict[int, dict] = {}
    for n in X.dims():
        lst = []
        idx = {}
        for a, cell in enumerate(X.cells[n]):
            if relative and (n, a) in X.marked:
                continue
            S = cell.stabilizer
            seen = set()
            for g in G.elements():
                dc = double_coset(G, H, g, S)
                if dc in seen:
                    continue
                seen.add(dc)
                dset = set(dc)
                if all(G.mul[kk][g] in dset for kk in K.elements):
                    idx[(a, dc)] = len(lst)
                    lst.append((a, dc))
        classes[n] = lst
        index[n] = idx

    ranks = {n: len(lst) for n, lst in classes.items() if lst}
    boundary: dict[int, Matrix] = {}
    for n in X.dims():
        if not ranks.get(n) or not ranks.get(n - 1):
            continue
        rows = ranks[n - 1]
        cols = ranks[n]
        mat = [[0] * cols for _ in range(rows)]
        for col, (a, dc) in enumerate(classes[n]):
            g = dc[0]
            for b in range(X.orbit_count(n - 1)):
                for m, deg in X.records(n, a, b):
                    x = m.rep
                    img = double_coset(G, H, G.mul[g][x], X.cells[n - 1][b].stabilizer)
                    row = index[n - 1].get((b, img))
                    if row is not None:
                        mat[row][col] += deg
        boundary[n] = tuple(tuple(r) for r in mat)
    return ChainComplex(char=char, ranks=ranks, boundary=boundary)


def gcw_from_cells(group: FiniteGroup, cells: dict[int, int],
                   boundaries: dict[int, list[list[tuple[int, int]]]],
                   perms: dict[int, dict[int, tuple[int, ...]]],
                   marked_cells=(), labels=None, name="") -> GCWComplex:
    """Assemble a GCWComplex from an individual-cell description.

    cells[n] is the number of n-cells; boundaries[n][i] lists (face, degree)
    pairs over (n-1)-cells; perms[s][n] is the permutation of n-cells by the
    group element s (no orientation reversal allowed).  The action must
    commute with the boundary; cell-orbits and coset records are derived.
    """
    # validate the action: permutation property, group law, boundary equivariance
    for s in group.elements():
        for n, count in cells.items():
            p = perms[s][n]
            if sorted(p) != list(range(count)):
                raise ValueError(f"element {s} does not permute {n}-cells")
    for s in group.elements():
        for t in group.elements():
            st = group.mul[s][t]
            for n, count in cells.items():
                for i in range(count):
                    if perms[s][n][perms[t][n][i]] != perms[st][n][i]:
                        raise ValueError(
                            f"cell action violates the group law on ({s},{t})"
                        )
    for s in group.elements():
        for n in cells:
            if n - 1 not in cells:
                continue
            p = perms[s][n]
            q = perms[s][n - 1]
            for i in range(cells[n]):
                img = {}
                for face, deg in boundaries[n][i]:
                    img[q[face]] = img.get(q[face], 0) + deg
                direct = {}
                for face, deg in boundaries[n][p[i]]:
                    direct[face] = direct.get(face, 0) + deg
                img = {f: d for f, d in img.items() if d}
                direct = {f: d for f, d in direct.items() if d}
                if img != direct:
                    raise ValueError(
                        f"boundary not equivariant on {n}-cell {i} under {s}"
                    )

    # orbit decomposition with minimal-index representatives
    orbit_of: dict[int, list[int]] = {}
    reps: dict[int, list[int]] = {}
    stabs: dict[int, list[Subgroup]] = {}
    carriers: dict[int, list[int]] = {}  # element sending rep to this cell
    for n, count in cells.items():
        orbit_of[n] = [-1] * count
        reps[n] = []
        stabs[n] = []
        carriers[n] = [group.identity] * count
        for i in range(count):
            if orbit_of[n][i] >= 0:
                continue
            o = len(reps[n])
            reps[n].append(i)
            stab_elems = []
            for s in group.elements():
                j = perms[s][n][i]
                if j == i:
                    stab_elems.append(s)
                if orbit_of[n][j] < 0:
                    orbit_of[n][j] = o
                    carriers[n][j] = s
            stabs[n].append(Subgroup(group, tuple(stab_elems)))

    cell_orbits = {
        n: tuple(
            CellOrbit(stabs[n][o], (labels or {}).get((n, reps[n][o]), f"c{n}.{o}"))
            for o in range(len(reps[n]))
        )
        for n in cells
    }

    boundary: dict[int, dict] = {}
    for n in cells:
        if n - 1 not in cells:
            continue
        recs: dict[tuple[int, int], list] = {}
        for o, i in enumerate(reps[n]):
            for face, deg in boundaries[n][i]:
                bo = orbit_of[n - 1][face]
                s = carriers[n - 1][face]
                m = OrbitMorphism(stabs[n][o], stabs[n - 1][bo], (s,))
                recs.setdefault((o, bo), []).append((m, deg))
        boundary[n] = {k: tuple(v) for k, v in recs.items()}

    marked = set()
    for (n, i) in marked_cells:
        marked.add((n, orbit_of[n][i]))
    return GCWComplex(
        group=group,
        cells=cell_orbits,
        boundary=boundary,
        marked=frozenset(marked),
        name=name,
    )
