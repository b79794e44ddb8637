import cmath
import math

import numpy as np
import pytest

import qoptics5 as q


def test_version():
    assert q.__version__.count(".") == 2


def test_kk_roundtrip():
    g = np.diag([-1.0, 1.0, 1.0, 1.0]) + 0.01 * np.ones((4, 4))
    A = np.array([0.1, -0.2, 0.3, 0.05])
    h = q.assemble_kk_point(g, A, 1.3, 0.7)
    assert h.shape == (5, 5)
    g2, A2, phi = q.extract_x5_point(h, 0.7)
    assert np.allclose(g2, g, atol=1e-13)
    assert np.allclose(A2, A, atol=1e-13)
    assert phi == pytest.approx(1.3)


def test_counts():
    assert q.count_null_paths(4, 2, 0) == 16
    assert q.count_null_paths(2, 0, 0) == 4
    with pytest.raises(q.CountOverflowError):
        q.count_null_paths(40, 0, 0)


def test_qm_kernel_is_conjugate_between_branches():
    a = q.canonical_kernel_qm(0.7, 6, 2, "minus")
    b = q.canonical_kernel_qm(0.7, 6, 2, "plus")
    assert abs(a - b.conjugate()) < 1e-10


def test_free_propagator():
    k = q.sliced_propagator(1.0, 1.0, 0.0, 0.5, 64)
    oracle = cmath.sqrt(-1j / (2 * math.pi)) * cmath.exp(1j * (0.125 - 1.0))
    assert abs(k - oracle) < 1e-12
    assert abs(q.free_propagator(1.0, 1.0, 0.0, 0.5) - oracle) < 1e-12


def test_fokker_planck_and_kg():
    r = q.fokker_planck_check(1.0, 1.0, 1000)
    assert r["relative_error"] < 0.02
    kg = q.kg_residual(side=3)
    assert kg["projected_residual"] < 1e-10
    num, closed = q.moment_constants(1.0)
    assert closed == pytest.approx(64 * math.pi**2)
    assert num == pytest.approx(closed, rel=1e-6)


def test_pair_creation():
    p1 = q.make_null_momentum(2.0, [1.0, 0.0, 0.0], 0.0)
    p2 = q.make_null_momentum(2.0, [-1.0, 0.0, 0.0], 0.0)
    pc = q.pair_creation(p1, p2, 1.0)
    assert np.allclose(pc["X"] + pc["Xbar"], p1 + p2, atol=1e-12)
    assert abs(q.null_invariant(pc["X"])) < 1e-12
    assert pc["Xbar"][4] == pytest.approx(-pc["X"][4])
    p3 = q.make_null_momentum(0.4, [1.0, 0.0, 0.0], 0.0)
    p4 = q.make_null_momentum(0.4, [-1.0, 0.0, 0.0], 0.0)
    with pytest.raises(q.ThresholdError):
        q.pair_creation(p3, p4, 1.0)


def test_scenarios_are_deterministic():
    assert "pair-create" in q.scenario_names()
    a = q.run_scenario("pair-create")
    b = q.run_scenario("pair-create", {"run.threads": "2"})
    assert a == b
    assert b"\n" in a["pairs.jsonl"]
    with pytest.raises(q.ConfigError):
        q.run_scenario("kg-check", {"kg.nope": "1"})
