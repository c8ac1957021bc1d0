import csv
import io

import numpy as np
import pytest

from hetnet import (PiecewiseConstant, SteeringProblem, assemble_hetero, gramian,
                    gramian_is_definite, matrix_exponential, min_energy_steer, pbh_test)
from hetnet import fixtures
from hetnet.errors import DimensionMismatch, GramianSingular
from hetnet.steering import drift_response

from _gen import random_pair

DOUBLE = (np.array([[0.0, 1], [0, 0]]), np.array([[0.0], [1]]))
ROTOR = (np.array([[0.0, 1], [-1, 0]]), np.array([[0.0], [1]]))


def test_expm_closed_forms():
    assert np.allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(matrix_exponential(DOUBLE[0]), [[1, 1], [0, 1]])
    assert np.allclose(matrix_exponential(np.diag([1.0, 2.0])), np.diag([np.e, np.e ** 2]),
                       rtol=1e-14)


def test_gramian_closed_forms():
    assert np.allclose(gramian((np.zeros((1, 1)), np.ones((1, 1))), 0, 1), [[1.0]])
    assert np.allclose(gramian(DOUBLE, 0, 1), [[1 / 3, 1 / 2], [1 / 2, 1]], atol=1e-14)
    # only the length of the horizon matters for a time-invariant pair
    assert np.allclose(gramian(DOUBLE, 2, 3), gramian(DOUBLE, 0, 1))


def test_gramian_singular_for_uncontrollable_pair():
    W = gramian((np.diag([1.0, 2.0]), np.array([[1.0], [0]])), 0, 1)
    ev = np.linalg.eigvalsh(W)
    assert ev[0] <= 1e-12 * ev[-1]
    assert not gramian_is_definite((np.diag([1.0, 2.0]), np.array([[1.0], [0]])))


def test_gramian_rejects_empty_horizon():
    with pytest.raises(DimensionMismatch):
        gramian(DOUBLE, 1.0, 1.0)


def test_gramian_definite_iff_pbh():
    for k in range(100):
        A, B = random_pair(np.random.default_rng([401, k]), max_n=8)
        assert gramian_is_definite((A, B)) == pbh_test(A, B)[0]


def test_scalar_steer_is_constant():
    p = SteeringProblem((np.zeros((1, 1)), np.ones((1, 1))), [0.0], [1.0], 0.0, 1.0)
    res = min_energy_steer(p, 100)
    assert np.allclose(res.input, 1.0, atol=1e-12)
    assert res.terminal_error <= 1e-8


def test_double_integrator_steer():
    res = min_energy_steer(SteeringProblem(DOUBLE, [0, 0], [1, 0], 0.0, 1.0), 1000)
    assert res.terminal_error <= 1e-6
    # closed form: u(t) = B^T e^(A^T (1 - t)) W^-1 x*, W^-1 = [[12, -6], [-6, 4]]
    t = res.times
    assert np.allclose(res.input[:, 0], 12 * (1 - t) - 6, atol=1e-9)


def test_star_network_steer():
    sys = assemble_hetero(fixtures.load("example4"))
    rng = np.random.default_rng(0)
    target = rng.standard_normal(6)
    target /= np.linalg.norm(target)
    res = min_energy_steer(SteeringProblem(sys, np.zeros(6), target, 0.0, 2.0), 1000)
    assert res.terminal_error <= 1e-5
    assert res.trajectory.shape == (1000, 6) and res.input.shape == (1000, 1)


def test_uncontrollable_steer_refused():
    p = SteeringProblem((np.diag([1.0, 2.0]), np.array([[1.0], [0]])), [0, 0], [1, 1])
    with pytest.raises(GramianSingular) as info:
        min_energy_steer(p)
    assert info.value.condition > 1e10


def test_problem_validation():
    with pytest.raises(DimensionMismatch):
        SteeringProblem(DOUBLE, [0, 0], [1, 0], 1.0, 1.0)
    with pytest.raises(DimensionMismatch):
        SteeringProblem(DOUBLE, [0], [1, 0])
    with pytest.raises(DimensionMismatch):
        SteeringProblem(DOUBLE, [0, 0], [1, 0], drift=PiecewiseConstant((0.0,), np.ones((1, 3))))
    with pytest.raises(ValueError):
        min_energy_steer(SteeringProblem(DOUBLE, [0, 0], [1, 0]), grid_points=50)


def test_piecewise_constant():
    f = PiecewiseConstant((0.0, 1.0), np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.array_equal(f(-0.5), [0, 0])
    assert np.array_equal(f(0.0), [1, 2]) and np.array_equal(f(0.99), [1, 2])
    assert np.array_equal(f(1.0), [3, 4]) and np.array_equal(f(10.0), [3, 4])
    with pytest.raises((ValueError, DimensionMismatch)):
        PiecewiseConstant((1.0, 0.0), np.ones((2, 2)))


def test_drift_response_constant_scalar():
    # x' = a x + c from 0 over [0, T] gives c (e^(aT) - 1) / a
    a, c, T = 0.7, 2.0, 1.5
    d = drift_response(np.array([[a]]), PiecewiseConstant((0.0,), np.array([[c]])), 0.0, T)
    assert np.isclose(d[0], c * np.expm1(a * T) / a, rtol=1e-13)


def test_drift_superposition():
    sys = assemble_hetero(fixtures.load("example4"))
    rng = np.random.default_rng(11)
    target = rng.standard_normal(6)
    f = PiecewiseConstant((0.0, 0.45, 1.2), rng.standard_normal((3, 6)))
    with_f = min_energy_steer(SteeringProblem(sys, np.zeros(6), target, 0.0, 2.0, f))
    shifted = target - drift_response(sys.Amat, f, 0.0, 2.0)
    without = min_energy_steer(SteeringProblem(sys, np.zeros(6), shifted, 0.0, 2.0))
    scale = np.max(np.abs(without.input))
    assert np.max(np.abs(with_f.input - without.input)) <= 1e-8 * scale
    assert with_f.terminal_error <= 1e-5


def test_rk4_fourth_order():
    p = SteeringProblem(ROTOR, [1.0, 0.0], [0.0, 1.0], 0.0, 3.0)
    coarse = min_energy_steer(p, 101).terminal_error
    fine = min_energy_steer(p, 201).terminal_error
    assert coarse > 1e-12
    assert coarse / fine >= 8


def test_csv_export():
    res = min_energy_steer(SteeringProblem(DOUBLE, [0, 0], [1, 0], 0.0, 1.0), 100)
    rows = list(csv.reader(io.StringIO(res.to_csv())))
    assert rows[0] == ["t", "u_1", "x_1", "x_2"]
    assert len(rows) == 101
    assert float(rows[-1][0]) == 1.0
    assert set(res.summary()) >= {"terminal_error", "gramian_condition"}
