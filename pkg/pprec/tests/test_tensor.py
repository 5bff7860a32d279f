"""Unit test for pprec.core
"""

import unittest

import numpy as np

from ..core import tensor as T
from ..core import Adam, adam_step
from ..errors import ConfigError, ContractError, DimensionError, NumericError

EPS = 1e-5
RTOL = 1e-4
ATOL = 1e-8
SOFTMAX_ROW = [0.09003057, 0.24472847, 0.66524096]


def numeric_grad(func, x):
    """Central finite differences of scalar ``func()`` w.r.t. array ``x`` in place"""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + EPS
        plus = func()
        x[idx] = orig - EPS
        minus = func()
        x[idx] = orig
        grad[idx] = (plus - minus) / (2 * EPS)
    return grad


class TestTensor(unittest.TestCase):
    """`TestCase` for the tensor operations and the tape
    """

    def setUp(self):
        self.rng = np.random.default_rng(3)

    def check_gradient(self, build, *shapes):
        leaves = [T.Tensor(self.rng.normal(size=shape), requires_grad=True) for shape in shapes]
        with T.Tape() as tape:
            loss = build(*leaves)
        T.backward(tape, loss)
        for leaf in leaves:
            numeric = numeric_grad(lambda: build(*leaves).item(), leaf.values)
            np.testing.assert_allclose(leaf.gradient, numeric, rtol=RTOL, atol=ATOL)

    def test_elementwise_gradients(self):
        self.check_gradient(lambda a, b: T.sum_(T.mul(T.add(a, b), T.tanh(a))), (3, 4), (3, 4))
        self.check_gradient(lambda a, b: T.sum_(T.sub(T.sigmoid(a), b)), (2, 3), (3,))
        self.check_gradient(lambda a: T.sum_(T.log_sigmoid(T.scale(a, 3.0))), (5,))

    def test_matmul_gradients(self):
        self.check_gradient(lambda a, b: T.sum_(T.tanh(T.matmul(a, b))), (3, 4), (4, 2))
        self.check_gradient(lambda a, b: T.sum_(T.tanh(T.matmul(a, b))), (2, 3, 4), (4, 2))
        self.check_gradient(lambda a, b: T.sum_(T.tanh(T.matmul(a, b))), (2, 3, 4), (2, 4, 5))

    def test_structural_gradients(self):
        self.check_gradient(
            lambda a: T.sum_(T.tanh(T.reshape(T.transpose(a, (1, 0, 2)), (3, 8)))), (2, 3, 4)
        )
        self.check_gradient(
            lambda a, b: T.sum_(T.mul(T.concat([a, b], axis=1), T.concat([b, a], axis=1))),
            (2, 3), (2, 3)
        )
        self.check_gradient(lambda a: T.sum_(T.tanh(T.sum_(a, axis=1))), (3, 4))

    def test_take_accumulates_repeated_rows(self):
        table = T.Tensor(np.arange(6.0).reshape(3, 2), requires_grad=True)
        with T.Tape() as tape:
            loss = T.sum_(T.take(table, np.array([[0, 2], [2, 2]])))
        T.backward(tape, loss)
        np.testing.assert_array_equal(table.gradient, [[1, 1], [0, 0], [3, 3]])
        self.assertRaises(ContractError, T.take, table, np.array([3]))

    def test_softmax(self):
        weights = T.softmax_rows(T.Tensor([[1.0, 2.0, 3.0]]))
        np.testing.assert_allclose(weights.values[0], SOFTMAX_ROW, rtol=1e-7)
        # large logits do not overflow
        weights = T.softmax_rows(T.Tensor([[1000.0, 1000.0]]))
        np.testing.assert_allclose(weights.values, [[0.5, 0.5]])
        self.check_gradient(
            lambda a, b: T.sum_(T.mul(T.softmax_rows(a), b)), (3, 4), (3, 4)
        )

    def test_masked_softmax(self):
        mask = np.array([[True, False, True], [False, False, False]])
        weights = T.softmax_rows(T.Tensor(np.ones((2, 3))), mask)
        np.testing.assert_array_equal(weights.values, [[0.5, 0.0, 0.5], [0.0, 0.0, 0.0]])

        def build(a, b):
            return T.sum_(T.mul(T.softmax_rows(a, mask), b))

        self.check_gradient(build, (2, 3), (2, 3))

    def test_dimension_errors(self):
        a = T.Tensor(np.ones((2, 3)))
        self.assertRaises(DimensionError, T.matmul, a, T.Tensor(np.ones((2, 3))))
        self.assertRaises(DimensionError, T.matmul, T.Tensor(np.ones(3)), a)
        self.assertRaises(DimensionError, T.add, a, T.Tensor(np.ones(4)))
        self.assertRaises(DimensionError, T.concat, [a, T.Tensor(np.ones((3, 3)))], 1)
        with self.assertRaises(DimensionError) as ctx:
            T.matmul(a, a)
        self.assertIn("(2, 3)", str(ctx.exception))

    def test_backward_contract(self):
        a = T.Tensor(np.ones(3), requires_grad=True)
        with T.Tape() as tape:
            out = T.scale(a, 2.0)
        self.assertRaises(ContractError, T.backward, tape, out)

    def test_no_tape_records_nothing(self):
        a = T.Tensor(np.ones(3), requires_grad=True)
        out = T.sum_(T.mul(a, a))
        tape = T.Tape()
        self.assertEqual(len(tape), 0)
        self.assertFalse(out.requires_grad)
        with T.Tape() as tape:
            T.sum_(T.mul(T.Tensor(np.ones(3)), 2.0))
        self.assertEqual(len(tape), 0)

    def test_parameter_gradient_accumulates(self):
        param = T.Parameter(np.array([1.0, 2.0]), "w")
        for _ in range(2):
            with T.Tape() as tape:
                loss = T.sum_(T.mul(param, param))
            reached = T.backward(tape, loss)
        self.assertEqual(reached, [param])
        np.testing.assert_array_equal(param.gradient, [4.0, 8.0])

    def test_elementwise_dispatch(self):
        out = T.elementwise("concat", T.Tensor([1.0, 2.0]), T.Tensor([3.0]), axis=0)
        np.testing.assert_array_equal(out.values, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(T.elementwise("sigmoid", T.Tensor([0.0])).values, [0.5])
        self.assertRaises(ContractError, T.elementwise, "relu", T.Tensor([0.0]))

    def test_dropout(self):
        x = T.Tensor(np.ones((200, 50)))
        self.assertIs(T.dropout(x, 0.2, self.rng, training=False), x)
        out = T.dropout(x, 0.5, self.rng, training=True).values
        self.assertTrue(set(np.unique(out)) <= {0.0, 2.0})
        self.assertAlmostEqual(out.mean(), 1.0, delta=0.05)
        self.assertRaises(ConfigError, T.dropout_mask, (2,), 1.0, self.rng)
        self.assertRaises(ConfigError, T.dropout, x, -0.1, self.rng, False)

    def test_check_finite(self):
        T.check_finite(T.Tensor([1.0, 2.0]))
        self.assertRaises(NumericError, T.check_finite, T.Tensor([1.0, np.nan]), "loss")


class TestAdam(unittest.TestCase):
    """`TestCase` for the Adam optimizer
    """

    def test_first_step_moves_by_lr(self):
        param = T.Parameter(np.array([1.0, -1.0, 0.5]), "w")
        param.gradient[...] = [2.0, -0.5, 1e-3]
        adam_step([param], lr=0.01)
        # the bias corrected first step is lr * sign(g)
        np.testing.assert_allclose(param.values, [0.99, -0.99, 0.49], rtol=1e-6)
        np.testing.assert_array_equal(param.gradient, 0.0)
        self.assertEqual(param.adam_t, 1)

    def test_step_counter_is_global(self):
        param = T.Parameter(np.array([1.0]), "w")
        adam_step([param], lr=0.01)
        adam_step([param], lr=0.01)
        np.testing.assert_array_equal(param.values, [1.0])
        self.assertEqual(param.adam_t, 2)
        param.gradient[...] = 2.0
        adam_step([param], lr=0.01)
        self.assertEqual(param.adam_t, 3)
        m_hat = 0.1 * 2.0 / (1.0 - 0.9 ** 3)
        v_hat = 0.001 * 4.0 / (1.0 - 0.999 ** 3)
        np.testing.assert_allclose(param.values, 1.0 - 0.01 * m_hat / (np.sqrt(v_hat) + 1e-8),
                                   rtol=1e-12)

    def test_minimizes_quadratic(self):
        param = T.Parameter(np.array([3.0, -2.0]), "w")
        optimizer = Adam([param], lr=0.1)
        for _ in range(500):
            with T.Tape() as tape:
                loss = T.sum_(T.mul(param, param))
            T.backward(tape, loss)
            optimizer.step()
        np.testing.assert_allclose(param.values, 0.0, atol=0.05)

    def test_errors(self):
        param = T.Parameter(np.zeros(2), "w")
        self.assertRaises(ConfigError, adam_step, [param], 0.0)
        param.gradient[0] = np.inf
        self.assertRaises(NumericError, adam_step, [param], 1e-3)
