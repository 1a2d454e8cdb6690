"""Morse differentials from gradient flow, the equivariant Morse complex,
and the Morse filtration.

Index-1 sources shoot their two descending directions and cluster the
arrivals.  Flow lines out of index-2 sources appear as basin boundaries on
the sampled descending circle, but the boundary trajectories are stiff to
chase forward, so each connection is pinned from the receiving end instead:
the ascending line of an index-1 point is shot upward and captures the
index-2 source, one shot per stabilizer class of ascending rays.  For
stable functions the stabilizer of a source fixes its descending manifold
pointwise, which makes the translated flow line and its arrival coset (the
orbit-category morphism of the count) well defined.  Counts are mod 2
throughout; orientations are out of scope.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..coefficients import CoefficientSystem, induced_matrix
from ..complexes import ChainComplex
from ..groups import OrbitMorphism
from ..spectral import FilteredComplex
from .critical import CriticalPoint
from .flow import CAPTURE_TOL, integrate_batch
from .manifolds import EqFunction, ImplicitGManifold

__all__ = [
    "BoundarySquareNonzero",
    "CriticalOrbit",
    "MorseData",
    "morse_complex",
    "morse_differentials",
    "morse_filtration",
]

log = logging.getLogger(__name__)

DEFAULT_SPHERE_SAMPLES = {0: 2, 1: 512}


class BoundarySquareNonzero(ValueError):
    """Assembled Morse boundary fails d∘d = 0: bad flow counts."""


@dataclass(eq=False)
class CriticalOrbit:
    rep: CriticalPoint
    size: int
    members: list = field(default_factory=list)  # (element, coords)

    @property
    def index(self) -> int:
        return self.rep.index


@dataclass(eq=False)
class MorseData:
    """Critical orbits plus mod-2 flow counts between consecutive indices.

    counts[(i, j)] maps an OrbitMorphism from orbit i's stabilizer to orbit
    j's stabilizer to its mod-2 flow-line count.
    """

    orbits: list[CriticalOrbit]
    counts: dict[tuple[int, int], dict[OrbitMorphism, int]]
    unresolved: int = 0
    escaped: int = 0
    warnings: list = field(default_factory=list)

    def by_index(self, k: int) -> list[int]:
        return [i for i, o in enumerate(self.orbits) if o.index == k]

    def max_index(self) -> int:
        return max((o.index for o in self.orbits), default=-1)


def group_into_orbits(M: ImplicitGManifold, crits: list[CriticalPoint],
                      tol: float = 1e-6) -> list[CriticalOrbit]:
    """Partition classified critical points into group orbits."""
    G = M.action.group
    used = [False] * len(crits)
    coords = [np.asarray(c.coords, dtype=float) for c in crits]
    orbits = []
    for i, c in enumerate(crits):
        if used[i]:
            continue
        members = []
        for s in G.elements():
            img = M.apply(s, coords[i])
            hit = None
            for j, q in enumerate(coords):
                if np.linalg.norm(img - q) < tol:
                    hit = j
                    break
            if hit is None:
                raise ValueError(
                    f"critical set is not closed under the action near {img}"
                )
            if not used[hit]:
                used[hit] = True
                members.append((s, coords[hit]))
        orbits.append(CriticalOrbit(rep=c, size=len(members), members=members))
    orbits.sort(key=lambda o: (o.index, float(o.rep.value)))
    return orbits


def _descending_seeds(p: CriticalPoint, rho: float, samples: int):
    """Points on the descending sphere of radius rho around p."""
    k = p.index
    basis = p.tangent_basis @ p.neg_basis  # ambient directions
    if k == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif k == 2:
        th = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    else:
        raise ValueError(f"descending spheres of dimension {k - 1} unsupported")
    return np.asarray(p.coords)[None, :] + rho * dirs @ basis.T, dirs


def _identify_arrival(M: ImplicitGManifold, orbits, target_index: int,
                      end_point, tol: float):
    """Which orbit and which coset the arrival point belongs to."""
    G = M.action.group
    for oi, orb in enumerate(orbits):
        if orb.index != target_index:
            continue
        rep = np.asarray(orb.rep.coords, dtype=float)
        for s in G.elements():
            if np.linalg.norm(M.apply(s, rep) - end_point) < tol:
                return oi, s
    return None, None


def morse_differentials(f: EqFunction, M: ImplicitGManifold,
                        crits: list[CriticalPoint], *,
                        sphere_samples: dict | None = None,
                        rho: float = 1e-3,
                        capture_tol: float = CAPTURE_TOL,
                        step_length: float = 0.01,
                        max_steps: int = 40000,
                        escape_radius: float = 50.0) -> MorseData:
    """Count mod-2 flow lines between consecutive-index critical orbits.

    Requires every critical point stable (so arrival cosets define orbit
    morphisms).  Index-1 sources shoot their two descending directions and
    the arrivals are clustered directly.  Flow lines into an index-1 point
    on a surface are located from the receiving end: the point's ascending
    line is shot upward (one ray per stabilizer class of rays) and each
    captured maximum names one flow line out of the source representative.
    The descending-circle sample of every index-2 source still provides the
    basin structure, and its boundary count must agree with the number of
    identified lines.
    """
    samples_cfg = dict(DEFAULT_SPHERE_SAMPLES)
    if sphere_samples:
        samples_cfg.update(sphere_samples)
    for c in crits:
        if not c.stable:
            raise ValueError(f"morse_differentials needs a stable function: {c}")
    orbits = group_into_orbits(M, crits)
    counts: dict[tuple[int, int], dict[OrbitMorphism, int]] = {}
    unresolved = 0
    escaped = 0
    warns: list[str] = []
    emitted: dict[int, int] = {}

    def record(src_i, tgt_i, coset_elem):
        src = orbits[src_i]
        tgt = orbits[tgt_i]
        m = OrbitMorphism(src.rep.stabilizer, tgt.rep.stabilizer, (coset_elem,))
        table = counts.setdefault((src_i, tgt_i), {})
        table[m] = table.get(m, 0) + 1

    kw = dict(capture_tol=capture_tol, step_length=step_length,
              max_steps=max_steps, escape_radius=escape_radius)

    for src_i, orb in enumerate(orbits):
        k = orb.index
        if k == 0:
            continue
        if k > 2:
            raise ValueError("sources of index > 2 are outside desk scale")
        p = orb.rep
        nsamp = samples_cfg.get(k - 1, 512)
        seeds, _ = _descending_seeds(p, rho, nsamp)
        if M.codim:
            seeds = M.project_points_many(seeds)
        trajs = integrate_batch(f, M, seeds, crits=crits, direction=-1, **kw)

        if k == 1:
            for tr in trajs:
                if tr.status == 2:
                    unresolved += 1
                    continue
                if tr.escaped:
                    escaped += 1
                    continue
                if tr.limit.index != 0:
                    warns.append(
                        f"index-1 point at {np.round(p.coords, 4)} flowed to "
                        f"index {tr.limit.index}"
                    )
                    warnings.warn(
                        "NonConsecutiveFlow: trajectory skipped an index",
                        stacklevel=2,
                    )
                    continue
                oi, s = _identify_arrival(M, orbits, 0, tr.end, 10 * capture_tol)
                if oi is None:
                    unresolved += 1
                    continue
                record(src_i, oi, s)
            continue

        # index-2 source: the sample fixes the basin structure; each basin
        # boundary is one emitted flow line, identified from the receiving
        # end below (forward bisection is hopeless here: the saddle repels
        # radially much faster than it attracts along the ridge)
        labels = []
        for tr in trajs:
            if tr.status == 2:
                unresolved += 1
                labels.append(("unresolved", None))
            elif tr.escaped:
                labels.append(("escaped", None))
            else:
                labels.append(("crit", tr.limit_index))
        n = len(labels)
        emitted[src_i] = sum(
            1 for i in range(n) if labels[i] != labels[(i + 1) % n]
        )

    # receiving-end shots out of index-1 targets with index-2 sources present
    has_two = any(o.index == 2 for o in orbits)
    if has_two:
        if M.dim != 2:
            raise ValueError(
                "index-2 flow counting is implemented for surfaces"
            )
        G = M.action.group
        for tgt_i, orb in enumerate(orbits):
            if orb.index != 1:
                continue
            q = orb.rep
            w, V = np.linalg.eigh(q.hessian)
            pos = V[:, w > 0]
            if pos.shape[1] != 1:
                raise ValueError("unexpected ascent dimension at an index-1 point")
            v = pos[:, 0]
            # stabilizer classes of the two ascending rays
            flips = []
            for s in q.stabilizer.elements:
                A = np.array([[float(x) for x in row]
                              for row in M.action.matrices[s]])
                R = q.tangent_basis.T @ A @ q.tangent_basis
                flips.append(float(v @ R @ v) < 0)
            rays = [1.0] if any(flips) else [1.0, -1.0]
            dirs = np.array([[r] for r in rays])
            ambient_v = (q.tangent_basis @ v)[None, :]
            seeds = np.asarray(q.coords)[None, :] + rho * dirs @ ambient_v
            if M.codim:
                seeds = M.project_points_many(seeds)
            trajs = integrate_batch(f, M, seeds, crits=crits, direction=+1, **kw)
            for tr in trajs:
                if tr.status == 2:
                    unresolved += 1
                    continue
                if tr.escaped:
                    escaped += 1
                    continue
                if tr.limit.index != 2:
                    warns.append(
                        f"NonConsecutiveFlow: ascent from index 1 reached "
                        f"index {tr.limit.index}"
                    )
                    warnings.warn("NonConsecutiveFlow: ascent skipped an index",
                                  stacklevel=2)
                    continue
                oi, a = _identify_arrival(M, orbits, 2, tr.end, 10 * capture_tol)
                if oi is None:
                    unresolved += 1
                    continue
                # the line a.p_rep -> q_rep translates to p_rep -> a^{-1}.q_rep
                record(oi, tgt_i, G.inverse[a])

    data = MorseData(orbits=orbits, counts=counts, unresolved=unresolved,
                     escaped=escaped, warnings=warns)
    # raw boundary count of every index-2 source must equal its line count
    for src_i, nb in emitted.items():
        lines = sum(
            c for (i, _), tbl in counts.items() if i == src_i
            for c in tbl.values()
        )
        if nb != lines:
            warns.append(
                f"orbit {src_i}: {nb} basin boundaries but {lines} "
                f"identified flow lines"
            )
    for key in list(data.counts):
        data.counts[key] = {m: c % 2 for m, c in data.counts[key].items()}
    # sanity: flow goes downhill
    for (i, j), table in data.counts.items():
        if any(table.values()):
            if not orbits[i].rep.value > orbits[j].rep.value:
                raise AssertionError("flow count against the value ordering")
    return data


def morse_complex(data: MorseData, M: CoefficientSystem) -> ChainComplex:
    """C_k = sum over index-k critical orbits of M(stab); boundary blocks are
    the mod-2 count-weighted induced matrices.  Needs char 2."""
    if M.char != 2:
        raise ValueError("the Morse complex is assembled mod 2; pass char=2")
    if M.variance != "covariant":
        raise ValueError("morse_complex needs a covariant system")
    orbits = data.orbits
    maxk = data.max_index()
    offsets: dict[int, dict[int, int]] = {}
    ranks: dict[int, int] = {}
    for k in range(0, maxk + 1):
        off = 0
        offsets[k] = {}
        for oi in data.by_index(k):
            offsets[k][oi] = off
            off += M.value(orbits[oi].rep.stabilizer).rank
        ranks[k] = off
    boundary = {}
    for k in range(1, maxk + 1):
        rows, cols = ranks.get(k - 1, 0), ranks.get(k, 0)
        if not rows or not cols:
            continue
        mat = [[0] * cols for _ in range(rows)]
        for (i, j), table in data.counts.items():
            if orbits[i].index != k or orbits[j].index != k - 1:
                continue
            c0 = offsets[k][i]
            r0 = offsets[k - 1][j]
            for m, cnt in table.items():
                if cnt % 2 == 0:
                    continue
                block = induced_matrix(M, m)
                for a in range(len(block)):
                    for b in range(len(block[0]) if block else 0):
                        mat[r0 + a][c0 + b] = (mat[r0 + a][c0 + b]
                                               + block[a][b]) % 2
        boundary[k] = tuple(tuple(r) for r in mat)
    try:
        return ChainComplex(char=2, ranks=ranks, boundary=boundary)
    except Exception as exc:
        raise BoundarySquareNonzero(
            f"Morse boundary fails d∘d = 0: {exc}; counts = {data.counts}"
        ) from exc


def morse_filtration(data: MorseData, M: CoefficientSystem) -> FilteredComplex:
    """The Morse complex filtered by Morse index (p = k), ready for the
    spectral sequence; its E^2 row is the Bredon homology."""
    C = morse_complex(data, M)
    filt = {n: tuple([n] * C.rank(n)) for n in C.degrees()}
    return FilteredComplex(base=C, filt=filt)
