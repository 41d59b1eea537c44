import math

import numpy as np
import pytest

import maslovkit as mk


def rotation_samples(n, count=64):
    ts = [i / count for i in range(count + 1)]
    frames = []
    for t in ts:
        c, s = math.cos(math.pi * t), math.sin(math.pi * t)
        frames.append(np.vstack([c * np.eye(n), s * np.eye(n)]))
    return ts, frames


def test_chart_round_trip():
    rng = np.random.default_rng(0)
    g = rng.normal(size=(3, 3))
    s = (g + g.T) / 2
    frame = mk.frame_from_chart(s)
    assert mk.is_lagrangian(frame)
    assert np.allclose(mk.chart_from_frame(frame), s)
    assert np.allclose(mk.change_chart(s, np.eye(3), np.zeros((3, 3))), s)


def test_maslov_indices():
    ts, frames = rotation_samples(1)
    assert mk.maslov_indices(ts, frames) == (1, 1)
    assert mk.rotation_loop_indices(3) == (3, 3)
    eight = mk.gauss_loop_indices("figure-eight")
    assert (eight["index_winding"], eight["crossing_count"]) == (0, 2)
    circle = mk.gauss_loop_indices("circle")
    assert sorted(round(c["t"], 8) for c in circle["crossings"]) == [0.0, 0.5]


def test_domain_errors_raise():
    with pytest.raises(mk.MaslovError):
        mk.frame_from_chart(np.ones((2, 3)))
    with pytest.raises(mk.MaslovError):
        mk.symmetric_partitions(0)


def test_pencil_example():
    r = mk.stratify_pencil(mesh_level=5, samples=500)
    assert len(r["ovals"]) == 2
    assert sorted(o["sign"] for o in r["ovals"]) == [-1, 1]
    assert r["duality_bound"] == 4
    assert r["base_locus_b0"] == 0
    assert mk.inertia(np.diag([1.0, -2.0, 0.0])) == (1, 1, 1)


def test_morse_folds():
    folds = mk.morse_folds("cubic")
    assert len(folds) == 1
    assert abs(folds[0]["t"]) <= 1e-6
    assert {folds[0]["index_before"], folds[0]["index_after"]} == {0, 1}


def test_heisenberg_conjugate_time():
    ct = mk.conjugate_times("heisenberg", np.zeros(3), np.array([1.0, 0.0, 2.0]), 4.0)
    assert len(ct) == 1
    assert abs(ct[0][0] - math.pi) <= 1e-4 * math.pi
    assert mk.maslov_count("heisenberg", np.zeros(3), np.array([1.0, 0.0, 2.0]), 4.0) == 1
    x = mk.exponential("heisenberg", np.zeros(3), np.array([1.0, 0.0, 2 * math.pi]), 1.0)
    assert abs(x[2] - 1 / (4 * math.pi)) < 1e-6


def test_schubert():
    rows = mk.symmetric_partitions(2)
    assert [r[0] for r in rows] == [(0, 0), (1, 0), (2, 1), (2, 2)]
    assert [r[3] for r in rows] == [0, 1, 2, 3]
    assert mk.poincare_polynomial(3) == [1, 1, 1, 2, 1, 1, 1]
    delta = np.vstack([np.zeros((2, 2)), np.eye(2)])
    assert mk.schubert_membership(delta, [2, 2])


def test_acceptance_subset():
    results = mk.acceptance(only=[2, 11])
    assert [r["id"] for r in results] == [2, 11]
    assert all(r["passed"] for r in results)
