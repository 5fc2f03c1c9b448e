import math

import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.special import logsumexp
from scipy.stats import entropy

import nlx


def test_kl_matches_scipy():
    p, q = [0.2, 0.5, 0.3], [0.4, 0.4, 0.2]
    assert nlx.relative_entropy(p, q) == pytest.approx(entropy(p, q), abs=1e-12)
    assert nlx.relative_entropy([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2.0), abs=1e-12)


def test_entropic_matches_logsumexp():
    p = np.array([0.1, 0.6, 0.3])
    phi = np.array([1.0, -2.0, 0.5])
    eps = 0.3
    expected = eps * logsumexp(phi / eps, b=p)
    assert nlx.entropic(p.tolist(), eps, phi.tolist()) == pytest.approx(expected, abs=1e-12)


def test_hull_distance_matches_scipy_linprog():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n, k = 5, 3
        verts = rng.dirichlet(np.ones(n), size=k)
        p = rng.dirichlet(np.ones(n))
        # min sum(s+ + s-) s.t. V^T w + s+ - s- = p, sum w = 1
        c = np.concatenate([np.zeros(k), np.ones(2 * n)])
        a_eq = np.zeros((n + 1, k + 2 * n))
        a_eq[:n, :k] = verts.T
        a_eq[:n, k:k + n] = np.eye(n)
        a_eq[:n, k + n:] = -np.eye(n)
        a_eq[n, :k] = 1.0
        b_eq = np.concatenate([p, [1.0]])
        ref = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs").fun
        assert nlx.hull_distance(verts.tolist(), p.tolist()) == pytest.approx(ref, abs=1e-9)


def test_worst_case_expectation_and_stability():
    tree = nlx.ScenarioTree(2, 1)
    e = nlx.WorstCaseExpectation(tree, [[0.3, 0.7], [0.6, 0.4], [1, 0], [0, 1]],
                                 {(-1, 0): [0, 1], (0, 0): [2], (0, 1): [3]})
    assert e.evaluate((-1, 0), [1.0, 0.0]) == pytest.approx(0.6)
    assert e.dual_penalty((-1, 0), [0.45, 0.55]) == 0.0
    assert math.isinf(e.dual_penalty((-1, 0), [0.9, 0.1]))
    assert e.stable()


def test_g_heat_closed_form():
    x, v = nlx.g_heat(lambda y: y * y, 1.0)
    i = int(np.argmin(np.abs(np.array(x))))
    assert v[i] == pytest.approx(2.0, abs=2e-2)
    x, v = nlx.g_heat(lambda y: -y * y, 1.0)
    assert v[i] == pytest.approx(-1.0, abs=2e-2)


def test_control_and_laplace_benchmarks():
    assert nlx.drift_control_value(cost=1.0) == pytest.approx(0.25, abs=1e-2)
    assert nlx.drift_control_value(cost=0.0) == pytest.approx(1.0, abs=1e-2)
    for route in ("primal", "transformed"):
        assert nlx.entropic_risk(lambda y: y, 0.5, route) == pytest.approx(0.5, abs=3e-2)


def test_errors_map_to_exceptions(tmp_path):
    with pytest.raises(nlx.NumericRefusal):
        nlx.entropic_risk(lambda y: y, 1e-5)
    cfg = tmp_path / "two.ini"
    cfg.write_text("[heat]\nt = 1\n[control]\nhorizon = 1\n")
    with pytest.raises(nlx.InvalidInput):
        nlx.run(str(cfg))


def test_run_duality_check(tmp_path):
    code, checks = nlx.run(subcommand="duality-check", out=str(tmp_path))
    assert code == 0
    assert all(c["pass"] for c in checks)
    assert (tmp_path / "summary.txt").read_text().startswith("CHECK ")
    names = {c["name"] for c in nlx.list_checks()}
    assert {c["name"] for c in checks} <= names
