"""Representation cell groups: the homology a theory assigns to the pair
(G x_H D(V), G x_H S(V)) for an H-representation V.

The pair is modelled by the sphere S(V + R) with a fixed basepoint pole on
the added trivial coordinate: D(V)/S(V) is that sphere with the pole
collapsed, and all four ordinary theories turn the pair into relative
cellular homology.  S(V + R) itself is an iterated join of factor spheres:
S^0 with trivial action per trivial summand, S^0 with the swap per sign
summand, and a rotating n-gon circle per rotation plane.  Joins use the
shifted tensor convention on augmented complexes, so boundaries come with
signs and square to zero; the action permutes cells without orientation
reversal by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..complexes import ChainComplex, HomologySummary, homology
from ..groups import FiniteGroup, Subgroup

__all__ = [
    "RepSpec",
    "THEORIES",
    "UnsupportedRep",
    "representation_cell_groups",
]

THEORIES = ("singular", "fixed-point", "quotient", "quotient-rel-fixed")


class UnsupportedRep(ValueError):
    """Representation outside the supported trivial/sign/rotation family."""


@dataclass(frozen=True)
class RepSpec:
    """V = trivial^a + sign^b + one plane per rotation entry.

    sign factors need |H| = 2; a rotation entry j means the chosen generator
    of a cyclic H rotates that plane by 2*pi*j/|H|.
    """

    trivial: int = 0
    sign: int = 0
    rotations: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.trivial + self.sign + 2 * len(self.rotations)


@dataclass(eq=False)
class _CellAction:
    """Cells with boundaries and a cellwise group action, plus marks."""

    group: FiniteGroup
    cells: dict[int, int]
    bnds: dict[int, list[list[tuple[int, int]]]]
    perms: dict[int, dict[int, tuple[int, ...]]]
    marked: set = field(default_factory=set)

    def validate(self):
        G = self.group
        for s in G.elements():
            for n, cnt in self.cells.items():
                if sorted(self.perms[s][n]) != list(range(cnt)):
                    raise AssertionError("not a permutation action")
        for s in G.elements():
            for t in G.elements():
                st = G.mul[s][t]
                for n, cnt in self.cells.items():
                    for i in range(cnt):
                        if self.perms[s][n][self.perms[t][n][i]] != self.perms[st][n][i]:
                            raise AssertionError("group law fails on cells")
        for s in G.elements():
            for n in self.cells:
                if n - 1 not in self.cells:
                    continue
                for i in range(self.cells[n]):
                    moved = {}
                    for f, d in self.bnds[n][i]:
                        k = self.perms[s][n - 1][f]
                        moved[k] = moved.get(k, 0) + d
                    direct = {}
                    for f, d in self.bnds[n][self.perms[s][n][i]]:
                        direct[f] = direct.get(f, 0) + d
                    if {k: v for k, v in moved.items() if v} != \
                       {k: v for k, v in direct.items() if v}:
                        raise AssertionError("boundary not equivariant")
        return self


def _s0(group: FiniteGroup, swap_elems=()) -> _CellAction:
    """Two points; the listed elements swap them, the rest fix them."""
    swap = set(swap_elems)
    perms = {
        s: {0: (1, 0) if s in swap else (0, 1)} for s in group.elements()
    }
    return _CellAction(group, {0: 2}, {0: [[], []]}, perms)


def _ngon(group: FiniteGroup, gen: int, j: int, n: int) -> _CellAction:
    """The circle as an n-gon; the generator rotates by j steps."""
    # shift amount per element: solve s = gen^m
    shift = {group.identity: 0}
    cur = group.identity
    for m in range(1, n):
        cur = group.mul[cur][gen]
        shift[cur] = (m * j) % n
    if len(shift) != group.order:
        raise UnsupportedRep("rotation planes need a cyclic stabilizer")
    perms = {}
    for s, sh in shift.items():
        p = tuple((i + sh) % n for i in range(n))
        perms[s] = {0: p, 1: p}
    bnds = {
        0: [[] for _ in range(n)],
        1: [[(i, -1), ((i + 1) % n, 1)] for i in range(n)],
    }
    return _CellAction(group, {0: n, 1: n}, bnds, perms)


def _join(X: _CellAction, Y: _CellAction) -> _CellAction:
    """Join of two cell actions over the same group: cells of X, cells of Y,
    and one (a, b) cell of dimension |a| + |b| + 1 per pair.  Boundary signs
    follow the shifted tensor of augmented complexes."""
    G = X.group
    dims = set()
    for d in X.cells:
        dims.add(d)
    for d in Y.cells:
        dims.add(d)
    for dx in X.cells:
        for dy in Y.cells:
            dims.add(dx + dy + 1)

    index: dict = {}
    counts: dict[int, int] = {}

    def add(kind, key, dim):
        i = counts.get(dim, 0)
        counts[dim] = i + 1
        index[(kind, key)] = (dim, i)

    for d in sorted(X.cells):
        for i in range(X.cells[d]):
            add("x", (d, i), d)
    for d in sorted(Y.cells):
        for i in range(Y.cells[d]):
            add("y", (d, i), d)
    for dx in sorted(X.cells):
        for dy in sorted(Y.cells):
            for i in range(X.cells[dx]):
                for j in range(Y.cells[dy]):
                    add("j", (dx, i, dy, j), dx + dy + 1)

    bnds: dict[int, list] = {d: [[] for _ in range(c)] for d, c in counts.items()}

    def out(dim, i, face_dim, face_idx, deg):
        bnds[dim][i].append((face_idx, deg))
        assert face_dim == dim - 1

    for d in X.cells:
        for i in range(X.cells[d]):
            dim, idx = index[("x", (d, i))]
            for f, deg in X.bnds[d][i]:
                out(dim, idx, *index[("x", (d - 1, f))], deg)
    for d in Y.cells:
        for i in range(Y.cells[d]):
            dim, idx = index[("y", (d, i))]
            for f, deg in Y.bnds[d][i]:
                out(dim, idx, *index[("y", (d - 1, f))], deg)
    for dx in X.cells:
        for dy in Y.cells:
            for i in range(X.cells[dx]):
                for j in range(Y.cells[dy]):
                    dim, idx = index[("j", (dx, i, dy, j))]
                    if dx == 0:
                        # augmentation of the X factor: the Y cell appears
                        out(dim, idx, *index[("y", (dy, j))], 1)
                    else:
                        for f, deg in X.bnds[dx][i]:
                            out(dim, idx, *index[("j", (dx - 1, f, dy, j))], deg)
                    sign = (-1) ** (dx + 1)
                    if dy == 0:
                        out(dim, idx, *index[("x", (dx, i))], sign)
                    else:
                        for f, deg in Y.bnds[dy][j]:
                            out(dim, idx, *index[("j", (dx, i, dy - 1, f))],
                                sign * deg)

    perms: dict = {}
    for s in G.elements():
        p: dict[int, list] = {d: [0] * c for d, c in counts.items()}
        for (kind, key), (dim, idx) in index.items():
            if kind == "x":
                d, i = key
                tgt = index[("x", (d, X.perms[s][d][i]))]
            elif kind == "y":
                d, i = key
                tgt = index[("y", (d, Y.perms[s][d][i]))]
            else:
                dx, i, dy, j = key
                tgt = index[("j", (dx, X.perms[s][dx][i], dy, Y.perms[s][dy][j]))]
            p[dim][idx] = tgt[1]
        perms[s] = {d: tuple(v) for d, v in p.items()}

    marked = set()
    for (d, i) in X.marked:
        marked.add(index[("x", (d, i))])
    for (d, i) in Y.marked:
        marked.add(index[("y", (d, i))])
    return _CellAction(G, counts, bnds, perms, marked)


def _induce(G: FiniteGroup, H: Subgroup, C: _CellAction) -> _CellAction:
    """G x_H C: one copy of C per coset of H, with the translated action.

    C's group must be H's abstract table, element m of it standing for
    H.elements[m].
    """
    from ..groups import left_cosets

    cosets = left_cosets(G, H)
    reps = [c[0] for c in cosets]
    rep_index = {}
    helem_for = {}
    hindex = {g: m for m, g in enumerate(H.elements)}
    for ci, coset in enumerate(cosets):
        for g in coset:
            rep_index[g] = ci
            # g = rep * h
            h = G.mul[G.inverse[reps[ci]]][g]
            helem_for[g] = hindex[h]

    ncos = len(cosets)
    cells = {d: ncos * c for d, c in C.cells.items()}
    bnds = {}
    for d, per_cell in C.bnds.items():
        rows = []
        for ci in range(ncos):
            for i in range(C.cells[d]):
                rows.append([(ci * C.cells[d - 1] + f, deg)
                             for f, deg in per_cell[i]])
        bnds[d] = rows

    perms = {}
    for g in G.elements():
        p = {}
        for d, cnt in C.cells.items():
            arr = [0] * (ncos * cnt)
            for ci in range(ncos):
                t = G.mul[g][reps[ci]]
                cj = rep_index[t]
                m = helem_for[t]
                for i in range(cnt):
                    arr[ci * cnt + i] = cj * cnt + C.perms[m][d][i]
            p[d] = tuple(arr)
        perms[g] = p

    marked = set()
    for (d, i) in C.marked:
        for ci in range(ncos):
            marked.add((d, ci * C.cells[d] + i))
    return _CellAction(G, cells, bnds, perms, marked)


def _chain(cells, bnds, keep, char=0) -> ChainComplex:
    """Chain complex on the kept cells, boundaries restricted to them."""
    order: dict = {}
    ranks: dict[int, int] = {}
    for d in sorted(cells):
        kept = [i for i in range(cells[d]) if (d, i) in keep]
        for pos, i in enumerate(kept):
            order[(d, i)] = pos
        ranks[d] = len(kept)
    boundary = {}
    for d in sorted(cells):
        if d - 1 not in cells or not ranks.get(d) or not ranks.get(d - 1):
            continue
        mat = [[0] * ranks[d] for _ in range(ranks[d - 1])]
        for i in range(cells[d]):
            if (d, i) not in keep:
                continue
            col = order[(d, i)]
            for f, deg in bnds[d][i]:
                if (d - 1, f) in keep:
                    mat[order[(d - 1, f)]][col] += deg
        boundary[d] = tuple(tuple(r) for r in mat)
    return ChainComplex(char=char, ranks=ranks, boundary=boundary)


def _theory_complex(C: _CellAction, theory: str, char=0) -> ChainComplex:
    G = C.group
    all_cells = {(d, i) for d, c in C.cells.items() for i in range(c)}
    fixed = {
        (d, i) for (d, i) in all_cells
        if all(C.perms[s][d][i] == i for s in G.elements())
    }
    if theory == "singular":
        keep = all_cells - C.marked
        return _chain(C.cells, C.bnds, keep, char)
    if theory == "fixed-point":
        keep = fixed - C.marked
        return _chain(C.cells, C.bnds, keep, char)

    # quotient: orbit classes, boundaries accumulated over the representative
    cls_of: dict = {}
    class_count: dict[int, int] = {}
    rep_cells: dict = {}
    for d in sorted(C.cells):
        cls_of[d] = [-1] * C.cells[d]
        k = 0
        for i in range(C.cells[d]):
            if cls_of[d][i] >= 0:
                continue
            rep_cells[(d, k)] = i
            for s in G.elements():
                cls_of[d][C.perms[s][d][i]] = k
            k += 1
        class_count[d] = k
    qb = {}
    for d in sorted(C.cells):
        rows = []
        for k in range(class_count[d]):
            i = rep_cells[(d, k)]
            if d - 1 in C.cells:
                rows.append([(cls_of[d - 1][f], deg) for f, deg in C.bnds[d][i]])
            else:
                rows.append([])
        qb[d] = rows
    qmarked = {(d, cls_of[d][i]) for (d, i) in C.marked}
    qcells = class_count
    all_classes = {(d, k) for d, c in qcells.items() for k in range(c)}
    if theory == "quotient":
        keep = all_classes - qmarked
        return _chain(qcells, qb, keep, char)
    if theory == "quotient-rel-fixed":
        fixed_classes = {(d, cls_of[d][i]) for (d, i) in fixed}
        keep = all_classes - qmarked - fixed_classes
        return _chain(qcells, qb, keep, char)
    raise ValueError(f"unknown theory {theory!r}")


def _subgroup_table(H: Subgroup) -> FiniteGroup:
    G = H.group
    elems = H.elements
    index = {g: i for i, g in enumerate(elems)}
    table = tuple(tuple(index[G.mul[a][b]] for b in elems) for a in elems)
    return FiniteGroup(table, name=f"H{len(elems)}")


def representation_cell_groups(H: Subgroup, V: RepSpec, theory: str,
                               char: int = 0) -> HomologySummary:
    """Graded groups of the theory on the representation cell pair
    (G x_H D(V), G x_H S(V))."""
    if theory not in THEORIES:
        raise ValueError(f"theory must be one of {THEORIES}")
    G = H.group
    Ht = _subgroup_table(H)

    # basepoint sphere factor: S^0 with trivial action, first point marked
    base = _s0(Ht)
    base.marked.add((0, 0))
    factors = [base]
    for _ in range(V.trivial):
        factors.append(_s0(Ht))
    if V.sign:
        if H.order != 2:
            raise UnsupportedRep("sign factors need a stabilizer of order 2")
        nonid = [m for m in Ht.elements() if m != Ht.identity]
        for _ in range(V.sign):
            factors.append(_s0(Ht, swap_elems=nonid))
    if V.rotations:
        n = H.order
        gen = None
        for m in Ht.elements():
            seen = {Ht.identity}
            cur = Ht.identity
            for _ in range(n - 1):
                cur = Ht.mul[cur][m]
                seen.add(cur)
            if len(seen) == n:
                gen = m
                break
        if gen is None:
            raise UnsupportedRep("rotation planes need a cyclic stabilizer")
        for j in V.rotations:
            factors.append(_ngon(Ht, gen, j % n, n))

    total = factors[0]
    for fac in factors[1:]:
        total = _join(total, fac)
    total.validate()
    induced = _induce(G, H, total).validate()
    return homology(_theory_complex(induced, theory, char))
