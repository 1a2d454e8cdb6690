import pytest

from equimorse.coefficients import build_system
from equimorse.complexes import homology
from equimorse.fixtures import (
    GCW_FIXTURES,
    antipodal_circle,
    circle_dihedral,
    circle_reflection,
    point_c2,
    sphere_reflection,
    sphere_rotation_c3,
    torus_double,
)
from equimorse.gcw import (
    InvalidPair,
    VarianceMismatch,
    bredon_chain_complex,
    bredon_cochain_complex,
    subquotient_complex,
)
from equimorse.groups import (
    FiniteGroup,
    OrbitCategory,
    Subgroup,
    enumerate_subgroups,
    full_subgroup,
    trivial_subgroup,
)


def groups_of(h):
    return {n: h.group(n) for n in h.degrees()}


def test_point_bredon_is_value_at_full():
    X = point_c2()
    cat = OrbitCategory(X.group)
    for kind in ("constant", "singular", "fixed-point", "quotient-rel-fixed"):
        M = build_system(cat, kind)
        h = homology(bredon_chain_complex(X, M))
        expect = M.value(full_subgroup(X.group)).rank
        assert h.betti(0) == expect
        assert all(h.betti(n) == 0 for n in h.degrees() if n != 0)


def test_circle_reflection_singular_vs_constant():
    X = circle_reflection()
    cat = OrbitCategory(X.group)
    sing = homology(bredon_chain_complex(X, build_system(cat, "singular")))
    assert groups_of(sing) == {0: (1, ()), 1: (1, ())}
    const = homology(bredon_chain_complex(X, build_system(cat, "constant")))
    assert groups_of(const) == {0: (1, ())}


def test_subquotient_special_cases_circle():
    X = circle_reflection()
    G = X.group
    e = trivial_subgroup(G)
    full = full_subgroup(G)
    under = homology(subquotient_complex(X, e, e))
    assert groups_of(under) == {0: (1, ()), 1: (1, ())}
    quot = homology(subquotient_complex(X, full, e))
    assert groups_of(quot) == {0: (1, ())}  # interval
    fixed = homology(subquotient_complex(X, e, full))
    assert groups_of(fixed) == {0: (2, ())}  # two fixed points


def test_underlying_homologies_all_fixtures():
    expected = {
        "point_c2": {0: (1, ())},
        "circle_reflection": {0: (1, ()), 1: (1, ())},
        "sphere_reflection": {0: (1, ()), 2: (1, ())},
        "torus_double": {0: (1, ()), 1: (2, ()), 2: (1, ())},
        "circle_dihedral": {0: (1, ()), 1: (1, ())},
        "antipodal_circle": {0: (1, ()), 1: (1, ())},
        "sphere_rotation_c3": {0: (1, ()), 2: (1, ())},
    }
    for name, make in GCW_FIXTURES.items():
        X = make()
        e = trivial_subgroup(X.group)
        h = homology(subquotient_complex(X, e, e))
        assert groups_of(h) == expected[name], name


@pytest.mark.parametrize("name", sorted(GCW_FIXTURES))
def test_bredon_oracle_equivalences(name):
    # singular <-> underlying, constant <-> quotient, fixed-point <-> X^G
    X = GCW_FIXTURES[name]()
    G = X.group
    cat = OrbitCategory(G)
    e = trivial_subgroup(G)
    full = full_subgroup(G)
    pairs = [
        ("singular", (e, e)),
        ("constant", (full, e)),
        ("fixed-point", (e, full)),
    ]
    for kind, (H, K) in pairs:
        br = homology(bredon_chain_complex(X, build_system(cat, kind)))
        oracle = homology(subquotient_complex(X, H, K))
        assert groups_of(br) == groups_of(oracle), (name, kind)


def test_fixed_sets_of_fixtures():
    X = sphere_reflection()
    fixed = homology(subquotient_complex(X, trivial_subgroup(X.group),
                                         full_subgroup(X.group)))
    assert groups_of(fixed) == {0: (1, ()), 1: (1, ())}  # equator circle
    X = torus_double()
    fixed = homology(subquotient_complex(X, trivial_subgroup(X.group),
                                         full_subgroup(X.group)))
    assert groups_of(fixed) == {0: (2, ()), 1: (2, ())}  # two circles
    X = antipodal_circle()
    fixed = subquotient_complex(X, trivial_subgroup(X.group),
                                full_subgroup(X.group))
    assert fixed.ranks == {}  # free action: empty fixed set
    X = sphere_rotation_c3()
    fixed = homology(subquotient_complex(X, trivial_subgroup(X.group),
                                         full_subgroup(X.group)))
    assert groups_of(fixed) == {0: (2, ())}  # the two poles


def test_quotients_of_fixtures():
    X = torus_double()
    quot = homology(subquotient_complex(X, full_subgroup(X.group),
                                        trivial_subgroup(X.group)))
    assert groups_of(quot) == {0: (1, ()), 1: (1, ())}  # annulus
    X = sphere_rotation_c3()
    quot = homology(subquotient_complex(X, full_subgroup(X.group),
                                        trivial_subgroup(X.group)))
    assert groups_of(quot) == {0: (1, ()), 2: (1, ())}  # S^2 again


def test_s3_fixture_subgroup_fixed_sets():
    X = circle_dihedral()
    G = X.group
    e = trivial_subgroup(G)
    # each reflection fixes two antipodal vertices
    order2 = [S for S in enumerate_subgroups(G) if S.order == 2]
    assert len(order2) == 3
    for S in order2:
        h = homology(subquotient_complex(X, e, S))
        assert groups_of(h) == {0: (2, ())}
    # the rotation subgroup acts freely
    order3 = next(S for S in enumerate_subgroups(G) if S.order == 3)
    assert subquotient_complex(X, e, order3).ranks == {}


def test_invalid_pair_rejected():
    X = circle_dihedral()
    G = X.group
    subs = enumerate_subgroups(G)
    H2 = next(S for S in subs if S.order == 2)
    H3 = next(S for S in subs if S.order == 3)
    with pytest.raises(InvalidPair):
        subquotient_complex(X, H2, H3)


def test_variance_mismatch():
    X = point_c2()
    cat = OrbitCategory(X.group)
    M = build_system(cat, "constant")
    with pytest.raises(VarianceMismatch):
        bredon_chain_complex(X, M.opposite())
    with pytest.raises(VarianceMismatch):
        bredon_cochain_complex(X, M)


def test_cochain_circle_constant():
    # Bredon cohomology of the circle fixture with constant contravariant Z:
    # the quotient is an interval, so H^0 = Z and H^1 = 0
    X = circle_reflection()
    cat = OrbitCategory(X.group)
    N = build_system(cat, "constant").opposite()
    C = bredon_cochain_complex(X, N)
    h = homology(C)
    assert h.group(0) == (1, ())     # degree -0: H^0
    assert h.group(-1) == (0, ())    # degree -1: H^1


def test_cochain_singular_sphere():
    # underlying cohomology of S^2: H^0 = Z, H^2 = Z
    X = sphere_reflection()
    cat = OrbitCategory(X.group)
    N = build_system(cat, "singular").opposite()
    h = homology(bredon_cochain_complex(X, N))
    assert h.group(0) == (1, ())
    assert h.group(-2) == (1, ())


def test_mod2_bredon_matches_oracle():
    X = sphere_reflection()
    cat = OrbitCategory(X.group)
    M = build_system(cat, "singular", char=2)
    br = homology(bredon_chain_complex(X, M))
    oracle = homology(subquotient_complex(
        X, trivial_subgroup(X.group), trivial_subgroup(X.group), char=2))
    assert groups_of(br) == groups_of(oracle)


def test_relative_subcomplex():
    # disk rel boundary out of the sphere fixture: mark equator cells, keep
    # one hemisphere pair; relative homology of (D^2, S^1) = Z in degree 2.
    # Build it directly: cells v, e (marked), one free 2-cell orbit would not
    # be a complex; instead test relative on the full sphere rel equator:
    # H_*(S^2, S^1) = Z^2 in degree 2 (two hemispheres).
    from equimorse.gcw import gcw_from_cells

    G = FiniteGroup.cyclic(2)
    X = gcw_from_cells(
        group=G,
        cells={0: 1, 1: 1, 2: 2},
        boundaries={0: [[]], 1: [[]], 2: [[(0, 1)], [(0, 1)]]},
        perms={0: {0: (0,), 1: (0,), 2: (0, 1)},
               1: {0: (0,), 1: (0,), 2: (1, 0)}},
        marked_cells=[(0, 0), (1, 0)],
    )
    e = trivial_subgroup(G)
    rel = homology(subquotient_complex(X, e, e, relative=True))
    assert groups_of(rel) == {2: (2, ())}


def test_weyl_pair_on_dihedral_circle():
    # quotient by the rotation subgroup is a circle; the residual reflection
    # fixes exactly two points of it
    X = circle_dihedral()
    G = X.group
    H3 = next(S for S in enumerate_subgroups(G) if S.order == 3)
    K2 = next(S for S in enumerate_subgroups(G) if S.order == 2)
    e = trivial_subgroup(G)
    quot = homology(subquotient_complex(X, H3, e))
    assert groups_of(quot) == {0: (1, ()), 1: (1, ())}
    fixed_in_quot = homology(subquotient_complex(X, H3, K2))
    assert groups_of(fixed_in_quot) == {0: (2, ())}
