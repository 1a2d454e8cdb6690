"""Morse differentials, the Morse complex, and the Morse filtration against
the G-CW cellular oracles."""

import numpy as np
import pytest

from equimorse.coefficients import build_system
from equimorse.complexes import homology
from equimorse.fixtures import (
    circle_c2_height,
    circle_reflection,
    sphere_height,
    torus_tilted,
    wells_c2,
    figure1_plane,
)
from equimorse.gcw import bredon_chain_complex, subquotient_complex
from equimorse.groups import OrbitCategory, trivial_subgroup
from equimorse.morse import (
    build_cutoffs,
    classify,
    find_critical_points,
    localize_surgery,
    morse_complex,
    morse_differentials,
    morse_filtration,
)
from equimorse.morse.homology import BoundarySquareNonzero, MorseData
from equimorse.spectral import einfty_check, spectral_pages


def classified_crits(fx):
    pts = find_critical_points(fx.function, fx.manifold, fx.seeds)
    return [classify(fx.function, fx.manifold, p) for p in pts]


@pytest.fixture(scope="module")
def cut():
    return build_cutoffs(0.05)


@pytest.fixture(scope="module")
def circle_data(cut):
    fx = circle_c2_height()
    north = classify(fx.function, fx.manifold, np.array([0.0, 1.0]))
    newf = localize_surgery(fx.function, fx.manifold, north,
                            fx.surgery_radius, cut, chart=fx.charts["north"])
    pts = find_critical_points(newf, fx.manifold, fx.seeds)
    crits = [classify(newf, fx.manifold, p) for p in pts]
    data = morse_differentials(newf, fx.manifold, crits,
                               step_length=fx.step_length)
    return fx, newf, crits, data


def test_sphere_height_no_consecutive_pairs():
    fx = sphere_height()
    crits = classified_crits(fx)
    assert sorted(c.index for c in crits) == [0, 2]
    data = morse_differentials(fx.function, fx.manifold, crits,
                               step_length=fx.step_length)
    assert data.unresolved == 0
    assert not any(any(t.values()) for t in data.counts.values())
    cat = OrbitCategory(fx.manifold.action.group)
    C = morse_complex(data, build_system(cat, "constant", char=2))
    h = homology(C)
    assert [h.dim(n) for n in (0, 1, 2)] == [1, 0, 1]


def test_plain_circle_two_arcs_cancel():
    # trivial group, f = y on the circle: two flow lines, count mod 2 = 0
    from equimorse.groups import FiniteGroup
    from equimorse.polynomials import LinearAction, Polynomial
    from equimorse.morse import EqFunction, ImplicitGManifold

    con = Polynomial(2, {(2, 0): 1, (0, 2): 1, (0, 0): -1})
    act = LinearAction.trivial(FiniteGroup.trivial(), 2)
    M = ImplicitGManifold(ambient=2, constraints=(con,), action=act)
    f = EqFunction.from_polynomial(Polynomial(2, {(0, 1): 1}))
    th = np.linspace(0, 2 * np.pi, 17, endpoint=False)
    pts = find_critical_points(f, M, np.stack([np.cos(th), np.sin(th)], axis=1))
    crits = [classify(f, M, p) for p in pts]
    data = morse_differentials(f, M, crits, step_length=0.02)
    (table,) = data.counts.values()
    assert list(table.values()) == [0]  # two arcs, even count
    cat = OrbitCategory(act.group)
    h = homology(morse_complex(data, build_system(cat, "constant", char=2)))
    assert [h.dim(0), h.dim(1)] == [1, 1]


def test_wells_saddle_counts():
    fx = wells_c2()
    crits = classified_crits(fx)
    assert sorted(c.index for c in crits) == [0, 0, 1]
    assert all(c.stable for c in crits)
    data = morse_differentials(fx.function, fx.manifold, crits)
    assert data.unresolved == 0
    # the saddle sends one flow line to each well
    flows = {k: list(t.values()) for k, t in data.counts.items()}
    assert sorted(v for vals in flows.values() for v in vals) == [1, 1]
    cat = OrbitCategory(fx.manifold.action.group)
    h = homology(morse_complex(data, build_system(cat, "constant", char=2)))
    assert [h.dim(0), h.dim(1)] == [1, 0]


def test_torus_morse_homology():
    fx = torus_tilted()
    crits = classified_crits(fx)
    assert sorted(c.index for c in crits) == [0, 1, 1, 2]
    data = morse_differentials(fx.function, fx.manifold, crits,
                               step_length=fx.step_length,
                               sphere_samples={1: 128})
    assert data.unresolved == 0
    cat = OrbitCategory(fx.manifold.action.group)
    C = morse_complex(data, build_system(cat, "constant", char=2))
    h = homology(C)
    assert [h.dim(n) for n in (0, 1, 2)] == [1, 2, 1]


def test_circle_surgery_homology_vs_gcw_oracle(circle_data):
    fx, newf, crits, data = circle_data
    assert data.unresolved == 0
    assert sorted((c.index, c.stabilizer.order) for c in crits) == [
        (0, 2), (0, 2), (1, 1), (1, 1)
    ]
    X = circle_reflection()
    cat = OrbitCategory(fx.manifold.action.group)
    for kind in ("singular", "constant", "fixed-point"):
        M2 = build_system(cat, kind, char=2)
        hm = homology(morse_complex(data, M2))
        ho = homology(bredon_chain_complex(X, M2))
        assert {n: hm.dim(n) for n in (0, 1)} == {n: ho.dim(n) for n in (0, 1)}, kind


def test_circle_morse_filtration_spectral(circle_data):
    fx, newf, crits, data = circle_data
    cat = OrbitCategory(fx.manifold.action.group)
    M2 = build_system(cat, "singular", char=2)
    F = morse_filtration(data, M2)
    ok, report = einfty_check(F)
    assert ok, report.text()
    # E^2 row q=0 carries the Bredon homology of the G-CW model
    pages = spectral_pages(F, 2)
    e2 = pages[1]
    X = circle_reflection()
    hb = homology(bredon_chain_complex(X, M2))
    for n in (0, 1):
        assert e2.dim(n, 0) == hb.dim(n)


def test_figure1_disk_counts(cut):
    # after surgery each index-2 point flows to its two adjacent index-1
    # points with count 1 each
    fx = figure1_plane()
    before = classify(fx.function, fx.manifold, np.zeros(2))
    newf = localize_surgery(fx.function, fx.manifold, before,
                            fx.surgery_radius, cut,
                            chart=fx.charts["origin"], h=fx.sphere_fn)
    pts = find_critical_points(newf, fx.manifold, fx.seeds)
    pts = [p for p in pts if np.linalg.norm(p) < 1.05]
    crits = [classify(newf, fx.manifold, p) for p in pts]
    data = morse_differentials(newf, fx.manifold, crits,
                               sphere_samples={1: 128}, escape_radius=3.0)
    maxima = data.by_index(2)
    saddles = data.by_index(1)
    assert len(maxima) == 1 and len(saddles) == 1  # one orbit each
    table = data.counts.get((maxima[0], saddles[0]), {})
    # two adjacent saddles within the orbit: two distinct cosets, count 1 each
    assert sorted(table.values()) == [1, 1]


def test_morse_complex_needs_char2(circle_data):
    fx, newf, crits, data = circle_data
    cat = OrbitCategory(fx.manifold.action.group)
    M0 = build_system(cat, "singular", char=0)
    with pytest.raises(ValueError):
        morse_complex(data, M0)


def test_unstable_function_rejected():
    fx = circle_c2_height()
    crits = classified_crits(fx)
    assert any(not c.stable for c in crits)
    with pytest.raises(ValueError):
        morse_differentials(fx.function, fx.manifold, crits)


def test_bad_counts_raise_boundary_error():
    # synthetic three-level data with an odd composite: d.d != 0 must abort
    from equimorse.groups import FiniteGroup, OrbitMorphism, trivial_subgroup
    from equimorse.morse.critical import CriticalPoint
    from equimorse.morse.homology import CriticalOrbit

    G = FiniteGroup.trivial()
    e = trivial_subgroup(G)

    def fake(idx, value):
        z = np.zeros(2)
        return CriticalPoint(
            coords=z, value=value, stabilizer=e, tangent_basis=np.eye(2),
            hessian=np.eye(2), index=idx, fixed_basis=np.eye(2),
            prime_basis=np.zeros((2, 0)), stable=True,
            neg_basis=np.zeros((2, 0)),
        )

    orbits = [
        CriticalOrbit(rep=fake(0, 0.0), size=1),
        CriticalOrbit(rep=fake(1, 1.0), size=1),
        CriticalOrbit(rep=fake(2, 2.0), size=1),
    ]
    m = OrbitMorphism(e, e, (0,))
    counts = {(2, 1): {m: 1}, (1, 0): {m: 1}}  # odd composite: d.d = 1
    corrupted = MorseData(orbits=orbits, counts=counts)
    cat = OrbitCategory(G)
    M2 = build_system(cat, "constant", char=2)
    with pytest.raises(BoundarySquareNonzero):
        morse_complex(corrupted, M2)


def test_morse_vs_cellular_oracle_on_sphere():
    # plain cellular S^2 versus the Morse complex of the height function
    fx = sphere_height()
    crits = classified_crits(fx)
    data = morse_differentials(fx.function, fx.manifold, crits,
                               step_length=fx.step_length)
    cat = OrbitCategory(fx.manifold.action.group)
    C = morse_complex(data, build_system(cat, "constant", char=2))
    hm = homology(C)
    # oracle: one 0-cell and one 2-cell
    from equimorse.complexes import ChainComplex

    oracle = homology(ChainComplex(char=2, ranks={0: 1, 2: 1}, boundary={}))
    assert {n: hm.dim(n) for n in (0, 1, 2)} == {
        n: oracle.dim(n) for n in (0, 1, 2)
    }
