"""The construction model, the figure scenarios, and chart surgery."""

import numpy as np
import pytest

from equimorse.groups import FiniteGroup
from equimorse.polynomials import LinearAction, Polynomial
from equimorse.morse import (
    AngleChart,
    ChartMissing,
    EqFunction,
    HNotEquivariant,
    ImplicitGManifold,
    LinearChart,
    SphereFunction,
    build_cutoffs,
    classify,
    find_critical_points,
    localize_surgery,
    seed_grid,
    stable_perturb,
)
from equimorse.morse.perturb import subgroup_action


@pytest.fixture(scope="module")
def cut():
    return build_cutoffs(0.05)


def c3_rotation_reps():
    act = LinearAction.rotation_cn(3)
    G = act.group
    zero = LinearAction.trivial(G, 0)
    return zero, zero, act


def c2_sign_reps():
    G = FiniteGroup.cyclic(2)
    V = LinearAction.trivial(G, 1)
    W = LinearAction.trivial(G, 0)
    U = LinearAction.sign_c2(1)
    return V, W, U


def test_sphere_function_cos3():
    h = SphereFunction.cos_multiple_angle(3)
    for th in (0.0, 0.4, 2.0):
        u = np.array([np.cos(th), np.sin(th)])
        assert h.value(u) == pytest.approx(np.cos(3 * th), abs=1e-12)
    # equivariant under C3 rotation, not under C4
    assert h.equivariance_error(LinearAction.rotation_cn(3)) < 1e-12
    assert h.equivariance_error(LinearAction.rotation_cn(4)) > 0.1


def test_sphere_function_gradients_fd():
    h = SphereFunction.cos_multiple_angle(3)
    u = np.array([0.8, -0.6])
    eps = 1e-6
    g = h.grad(u)
    for i in range(2):
        e = np.zeros(2)
        e[i] = eps
        fd = (h.value(u + e) - h.value(u - e)) / (2 * eps)
        assert g[i] == pytest.approx(fd, rel=1e-6, abs=1e-8)
    H = h.hess(u)
    for i in range(2):
        e = np.zeros(2)
        e[i] = eps
        fd = (h.grad(u + e) - h.grad(u - e)) / (2 * eps)
        assert np.allclose(H[:, i], fd, rtol=1e-5, atol=1e-6)
    # degree-zero homogeneity: gradient orthogonal to u
    assert abs(g @ u) < 1e-12


def test_sphere_critical_points_cos3():
    h = SphereFunction.cos_multiple_angle(3)
    crits = h.sphere_critical_points()
    assert len(crits) == 6
    maxima = [u for u, idx, nd in crits if idx == 1]
    minima = [u for u, idx, nd in crits if idx == 0]
    assert len(maxima) == 3 and len(minima) == 3
    assert all(nd for _, _, nd in crits)


def test_model_figure1(cut):
    # V = W = 0, U = R^2 with the C3 rotation, h = cos(3 theta):
    # origin becomes index 0 and six new critical points appear
    V, W, U = c3_rotation_reps()
    h = SphereFunction.cos_multiple_angle(3)
    model, crits = stable_perturb(V, W, U, h, cut)
    assert len(crits) == 7
    origin = min(crits, key=lambda c: np.linalg.norm(c.coords))
    assert origin.index == 0
    assert origin.stabilizer.order == 3
    assert origin.stable
    others = [c for c in crits if c is not origin]
    for c in others:
        assert np.linalg.norm(c.coords) == pytest.approx(cut.t0, abs=1e-9)
        assert c.stabilizer.order == 1
        assert c.stable
        # gradient tolerance at each verified point
        assert np.linalg.norm(model.grad(c.coords)) < 1e-9
    indices = sorted(c.index for c in others)
    assert indices == [1, 1, 1, 2, 2, 2]


def test_model_figure2(cut):
    # V = R trivial, W = 0, U = R^- of C2: two new index-1 points
    V, W, U = c2_sign_reps()
    model, crits = stable_perturb(V, W, U, None, cut)
    assert len(crits) == 3
    origin = min(crits, key=lambda c: np.linalg.norm(c.coords))
    assert origin.index == 0 and origin.stable
    new = [c for c in crits if c is not origin]
    assert all(c.index == 1 for c in new)
    assert all(c.stabilizer.order == 1 for c in new)
    assert all(c.stable for c in new)
    us = sorted(float(c.coords[1]) for c in new)
    assert us[0] == pytest.approx(-cut.t0, abs=1e-9)
    assert us[1] == pytest.approx(cut.t0, abs=1e-9)


def test_model_ranges_and_hessian_blocks(cut):
    # construction properties: exact agreement with |v|^2 - |w|^2 +- |u|^2
    # in the inner/outer ranges, and negative eigenspace inside W + U
    V, W, U = c2_sign_reps()
    model, crits = stable_perturb(V, W, U, None, cut)
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.uniform(-1, 1)
        u = rng.uniform(-0.999, 0.999)
        got = model.value(np.array([v, u]))
        assert abs(got - (v * v + u * u)) < 1e-12
        u = rng.uniform(3.001, 5.0) * rng.choice([-1, 1])
        got = model.value(np.array([v, u]))
        assert abs(got - (v * v - u * u)) < 1e-12
    for c in crits:
        if np.linalg.norm(c.coords) < 1e-9:
            continue
        w, Vec = np.linalg.eigh(model.hess(c.coords))
        for wi, vec in zip(w, Vec.T):
            if wi < 0:
                # V coordinates of negative directions vanish (V is axis 0)
                assert abs(vec[0]) < 1e-9


def test_model_gradient_hessian_fd(cut):
    V, W, U = c3_rotation_reps()
    h = SphereFunction.cos_multiple_angle(3)
    model, _ = stable_perturb(V, W, U, h, cut, verify=False)
    rng = np.random.default_rng(1)
    eps = 1e-6
    for _ in range(12):
        x = rng.uniform(-3.3, 3.3, size=2)
        g = model.grad(x)
        H = model.hess(x)
        for i in range(2):
            e = np.zeros(2)
            e[i] = eps
            fd = (model.value(x + e) - model.value(x - e)) / (2 * eps)
            assert g[i] == pytest.approx(fd, rel=2e-5, abs=1e-7)
            fdH = (model.grad(x + e) - model.grad(x - e)) / (2 * eps)
            assert np.allclose(H[:, i], fdH, rtol=2e-4, atol=2e-5)


def test_model_equivariance(cut):
    V, W, U = c3_rotation_reps()
    h = SphereFunction.cos_multiple_angle(3)
    model, _ = stable_perturb(V, W, U, h, cut, verify=False)
    M = ImplicitGManifold(ambient=2, constraints=(), action=model.action)
    rng = np.random.default_rng(2)
    samples = rng.uniform(-3, 3, size=(32, 2))
    assert model.invariance_error(model.action, samples) < 1e-9


def test_h_not_equivariant_rejected(cut):
    V, W, U = c3_rotation_reps()
    h = SphereFunction.cos_multiple_angle(4)  # C4-symmetric, not C3
    with pytest.raises(HNotEquivariant):
        stable_perturb(V, W, U, h, cut)


def test_oversized_epsilon_detected(cut):
    # force an amplitude far past the margin bound: the angular term then
    # cancels the radial slope inside a transition annulus and the spurious
    # critical points are caught by the verification pass
    from equimorse.morse import build_cutoffs
    from equimorse.morse.perturb import EpsilonTooLarge

    bad = build_cutoffs(0.05)
    bad.epsilon *= 2000.0
    G2 = FiniteGroup.cyclic(2)
    V = LinearAction.trivial(G2, 1)
    W = LinearAction.trivial(G2, 0)
    U = LinearAction.sign_c2(1)
    with pytest.raises(EpsilonTooLarge):
        stable_perturb(V, W, U, SphereFunction.constant(1, -1.0), bad)


def test_u_zero_reduces_to_quadratic(cut):
    G = FiniteGroup.cyclic(2)
    V = LinearAction.trivial(G, 1)
    W = LinearAction.sign_c2(1)
    U = LinearAction.trivial(G, 0)
    model, crits = stable_perturb(V, W, U, None, cut)
    assert len(crits) == 1
    # the origin keeps index dim(W): positive definite on V, negative on W
    assert crits[0].index == 1
    x = np.array([0.3, -0.7])
    assert model.value(x) == pytest.approx(0.3**2 - 0.7**2)


# -- surgery -------------------------------------------------------------


def figure1_fixture():
    act = LinearAction.rotation_cn(3)
    M = ImplicitGManifold(ambient=2, constraints=(), action=act)
    f = EqFunction.from_polynomial(Polynomial(2, {(2, 0): -1, (0, 2): -1}))
    chart = LinearChart(np.zeros(2), np.eye(2), dv=0, dw=2)
    return M, f, chart


def figure2_fixture():
    act = LinearAction.reflection_c2(2, axis=0)
    M = ImplicitGManifold(ambient=2, constraints=(), action=act)
    f = EqFunction.from_polynomial(Polynomial(2, {(0, 2): 1, (2, 0): -1}))
    # v along y (positive direction), w along x (negative direction)
    frame = np.array([[0.0, 1.0], [1.0, 0.0]])
    chart = LinearChart(np.zeros(2), frame, dv=1, dw=1)
    return M, f, chart


def test_surgery_figure1(cut):
    M, f, chart = figure1_fixture()
    before = classify(f, M, np.zeros(2))
    assert before.index == 2 and not before.stable
    h = SphereFunction.cos_multiple_angle(3)
    newf = localize_surgery(f, M, before, radius=1.0, cut=cut, chart=chart, h=h)
    s = 1.0 / 3.5
    seeds = seed_grid([(-1.1, 1.1)] * 2, 13)
    crits = find_critical_points(newf, M, seeds)
    crits = [c for c in crits if np.linalg.norm(c) < 1.05]
    assert len(crits) == 7
    classified = [classify(newf, M, p) for p in crits]
    origin = min(classified, key=lambda c: np.linalg.norm(c.coords))
    assert origin.index == 0 and origin.stabilizer.order == 3
    off = [c for c in classified if c is not origin]
    assert all(np.linalg.norm(c.coords) == pytest.approx(cut.t0 * s, abs=1e-9)
               for c in off)
    assert sorted(c.index for c in off) == [1, 1, 1, 2, 2, 2]
    assert all(c.stable for c in classified)
    # two C3-orbits of size 3
    ones = [c for c in off if c.index == 1]
    A = np.array(M.action.matrices[1])
    img = A @ ones[0].coords
    assert any(np.linalg.norm(img - c.coords) < 1e-8 for c in ones)
    # function untouched outside the ball
    for x in [np.array([1.5, 0.2]), np.array([-2.0, 1.0])]:
        assert newf.value(x) == pytest.approx(f.value(x), abs=1e-12)


def test_surgery_figure2(cut):
    M, f, chart = figure2_fixture()
    before = classify(f, M, np.zeros(2))
    assert before.index == 1 and not before.stable
    newf = localize_surgery(f, M, before, radius=1.0, cut=cut, chart=chart)
    seeds = seed_grid([(-1.2, 1.2)] * 2, 11)
    crits = find_critical_points(newf, M, seeds)
    crits = [c for c in crits if np.linalg.norm(c) < 1.05]
    classified = [classify(newf, M, p) for p in crits]
    assert len(classified) == 3
    origin = min(classified, key=lambda c: np.linalg.norm(c.coords))
    assert origin.index == 0
    new = [c for c in classified if c is not origin]
    assert all(c.index == 1 and c.stabilizer.order == 1 for c in new)
    assert all(c.stable for c in classified)
    # new points sit off the fixed locus (the y-axis), mirrored in x
    assert all(abs(c.coords[0]) > 0.1 for c in new)


def test_surgery_c0_distance_scales(cut):
    M, f, chart = figure2_fixture()
    before = classify(f, M, np.zeros(2))
    f1 = localize_surgery(f, M, before, radius=1.0, cut=cut, chart=chart)
    f2 = localize_surgery(f, M, before, radius=0.5, cut=cut, chart=chart)
    # sup-difference on a grid shrinks by the area factor (radius/2 -> 1/4)
    pts = seed_grid([(-1.0, 1.0)] * 2, 41)
    d1 = np.max(np.abs(f1.value_many(pts) - f.value_many(pts)))
    d2 = np.max(np.abs(f2.value_many(pts) - f.value_many(pts)))
    assert d2 == pytest.approx(d1 / 4.0, rel=1e-6)
    assert d1 <= f1.c0_distance + 1e-12
    assert f2.c0_distance == pytest.approx(f1.c0_distance / 4.0, rel=1e-9)


def test_surgery_smoothness_across_seam(cut):
    # analytic gradient/Hessian of the surgered function match finite
    # differences, including across the dispatch boundary
    M, f, chart = figure2_fixture()
    before = classify(f, M, np.zeros(2))
    newf = localize_surgery(f, M, before, radius=1.0, cut=cut, chart=chart)
    rng = np.random.default_rng(4)
    eps = 1e-6
    s = 1.0 / 3.5
    for x in list(rng.uniform(-1.1, 1.1, size=(10, 2))) + [
        np.array([3.0 * s + 1e-8, 0.1]), np.array([3.0 * s - 1e-8, -0.2])
    ]:
        g = newf.grad(x)
        for i in range(2):
            e = np.zeros(2)
            e[i] = eps
            fd = (newf.value(x + e) - newf.value(x - e)) / (2 * eps)
            assert g[i] == pytest.approx(fd, rel=3e-5, abs=1e-7)


def test_surgery_requires_chart_and_instability(cut):
    M, f, chart = figure2_fixture()
    before = classify(f, M, np.zeros(2))
    with pytest.raises(ChartMissing):
        localize_surgery(f, M, before, radius=1.0, cut=cut, chart=None)
    # a stable point is a no-op with a warning
    g = EqFunction.from_polynomial(Polynomial(2, {(2, 0): 1, (0, 2): 1}))
    stable_pt = classify(g, M, np.zeros(2))
    with pytest.warns(UserWarning):
        out = localize_surgery(g, M, stable_pt, radius=1.0, cut=cut, chart=chart)
    assert out is g


def test_bad_chart_rejected(cut):
    M, f, _ = figure2_fixture()
    before = classify(f, M, np.zeros(2))
    bad = LinearChart(np.zeros(2), np.eye(2), dv=1, dw=1)  # v/w swapped
    with pytest.raises(ChartMissing):
        localize_surgery(f, M, before, radius=1.0, cut=cut, chart=bad)


def test_subgroup_action_restriction():
    act = LinearAction.permutation_s3()
    from equimorse.groups import enumerate_subgroups

    H = next(S for S in enumerate_subgroups(act.group) if S.order == 2)
    sub = subgroup_action(act, H)
    assert sub.group.order == 2
    assert sub.dim == 3
