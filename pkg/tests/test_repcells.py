"""Representation cell groups against the C2-double reference table and
sphere sanity checks."""

import pytest

from equimorse.groups import FiniteGroup, Subgroup, full_subgroup, trivial_subgroup
from equimorse.morse import RepSpec, UnsupportedRep, representation_cell_groups
from equimorse.morse.repcells import THEORIES


def c2():
    G = FiniteGroup.cyclic(2)
    return G, trivial_subgroup(G), full_subgroup(G)


def only_entry(h):
    degs = h.degrees()
    assert len(degs) <= 1
    if not degs:
        return None, (0, ())
    return degs[0], h.group(degs[0])


# the reference table: cell type x theory -> (degree, rank), rank relative
# to the index k; None means the group vanishes
def expected(cell, theory, k):
    if cell == "interior":
        return {
            "singular": (k, 2),
            "fixed-point": None,
            "quotient": (k, 1),
            "quotient-rel-fixed": (k, 1),
        }[theory]
    if cell == "stable":
        return {
            "singular": (k, 1),
            "fixed-point": (k, 1),
            "quotient": (k, 1),
            "quotient-rel-fixed": None,
        }[theory]
    if cell == "unstable":
        return {
            "singular": (k, 1),
            "fixed-point": (k - 1, 1),
            "quotient": None,
            "quotient-rel-fixed": (k, 1),
        }[theory]
    raise AssertionError(cell)


def rep_for(cell, k, G, e, full):
    if cell == "interior":
        return e, RepSpec(trivial=k)
    if cell == "stable":
        return full, RepSpec(trivial=k)
    return full, RepSpec(trivial=k - 1, sign=1)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("cell", ["interior", "stable", "unstable"])
@pytest.mark.parametrize("theory", THEORIES)
def test_double_example_table(cell, theory, k):
    G, e, full = c2()
    H, V = rep_for(cell, k, G, e, full)
    h = representation_cell_groups(H, V, theory)
    want = expected(cell, theory, k)
    deg, (betti, torsion) = only_entry(h)
    assert torsion == ()
    if want is None:
        assert deg is None
    else:
        assert (deg, betti) == want, (cell, theory, k, dict(h.entries))


def test_zero_representation_cell():
    # V = 0: the pair (G x_H D^0, empty): singular theory gives Z[G/H] in
    # degree 0
    G, e, full = c2()
    h = representation_cell_groups(full, RepSpec(), "singular")
    assert dict(h.entries) == {0: (1, ())}
    h = representation_cell_groups(e, RepSpec(), "singular")
    assert dict(h.entries) == {0: (2, ())}


def test_rotation_plane_cell():
    # C3 with its rotation plane: free orbit cells on the circle; the
    # singular value of the 2-disk pair is Z in degree 2
    G = FiniteGroup.cyclic(3)
    full = full_subgroup(G)
    h = representation_cell_groups(full, RepSpec(rotations=(1,)), "singular")
    assert dict(h.entries) == {2: (1, ())}
    # the fixed set of the rotation disk pair is (point, empty): Z in deg 0
    h = representation_cell_groups(full, RepSpec(rotations=(1,)), "fixed-point")
    assert dict(h.entries) == {0: (1, ())}
    # quotient of the disk by the rotation is a disk rel boundary circle:
    # still Z in degree 2 (the quotient pair is again (D^2, S^1))
    h = representation_cell_groups(full, RepSpec(rotations=(1,)), "quotient")
    assert dict(h.entries) == {2: (1, ())}


def test_mixed_trivial_rotation():
    # V = trivial + rotation plane for C3: D(V) is a 3-disk pair; underlying
    # homology sits in degree 3
    G = FiniteGroup.cyclic(3)
    full = full_subgroup(G)
    h = representation_cell_groups(full, RepSpec(trivial=1, rotations=(1,)),
                                   "singular")
    assert dict(h.entries) == {3: (1, ())}
    # fixed part is the trivial line: (D^1, S^0): degree 1
    h = representation_cell_groups(full, RepSpec(trivial=1, rotations=(1,)),
                                   "fixed-point")
    assert dict(h.entries) == {1: (1, ())}


def test_sign_needs_order_two():
    G = FiniteGroup.cyclic(3)
    with pytest.raises(UnsupportedRep):
        representation_cell_groups(full_subgroup(G), RepSpec(sign=1), "singular")


def test_unknown_theory_rejected():
    G, e, full = c2()
    with pytest.raises(ValueError):
        representation_cell_groups(full, RepSpec(trivial=1), "borel")


def test_two_sign_factors():
    # V = sign + sign for C2: the fixed set of D(V) is the origin; the
    # fixed theory sees (pt, empty): Z in degree 0
    G, e, full = c2()
    h = representation_cell_groups(full, RepSpec(sign=2), "fixed-point")
    assert dict(h.entries) == {0: (1, ())}
    h = representation_cell_groups(full, RepSpec(sign=2), "singular")
    assert dict(h.entries) == {2: (1, ())}


def test_induced_interior_cells_from_s3():
    # H = e inside S3: induced pair is six disjoint disk pairs; underlying
    # homology Z^6 in degree k
    G = FiniteGroup.symmetric(3)
    e = trivial_subgroup(G)
    h = representation_cell_groups(e, RepSpec(trivial=2), "singular")
    assert dict(h.entries) == {2: (6, ())}
    # the quotient collapses the six copies to one
    h = representation_cell_groups(e, RepSpec(trivial=2), "quotient")
    assert dict(h.entries) == {2: (1, ())}
