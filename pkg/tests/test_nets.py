"""Phenotype compilation and activation tests."""

import math

import numpy as np
import pytest

from neatlab.errors import ContractError, CycleError
from neatlab.nets import activate, build_feedforward, build_recurrent

from conftest import make_genome


class TestFeedForward:
    def test_single_connection(self):
        g = make_genome(1, 1, [(0, 0, 1, 2.0)])
        net = build_feedforward(g)
        assert activate(net, [0.5])[0] == pytest.approx(math.tanh(1.0), abs=1e-12)

    def test_zero_weight_network_outputs_tanh_bias(self):
        g = make_genome(2, 2, [(0, 0, 2, 0.0), (1, 1, 3, 0.0)],
                        biases={2: 0.3, 3: -0.7})
        out = build_feedforward(g).activate([5.0, -5.0])
        assert out[0] == pytest.approx(math.tanh(0.3), abs=1e-12)
        assert out[1] == pytest.approx(math.tanh(-0.7), abs=1e-12)

    def test_disconnected_outputs(self):
        g = make_genome(1, 2, [], biases={1: 0.4, 2: 0.4})
        out = build_feedforward(g).activate([1.0])
        assert out[0] == out[1] == pytest.approx(math.tanh(0.4), abs=1e-12)

    def test_two_layer_chain_matches_hand_computation(self):
        g = make_genome(2, 1, [(0, 0, 3, 0.5), (1, 1, 3, -0.25), (2, 3, 2, 1.5)],
                        biases={3: 0.1, 2: -0.2})
        out = build_feedforward(g).activate([1.0, 2.0])
        hidden = math.tanh(0.1 + 0.5 * 1.0 - 0.25 * 2.0)
        assert out[0] == pytest.approx(math.tanh(-0.2 + 1.5 * hidden), abs=1e-12)

    def test_cycle_raises_with_edge(self):
        g = make_genome(1, 1, [(0, 0, 2, 1.0), (1, 2, 3, 1.0), (2, 3, 2, 1.0),
                               (3, 3, 1, 1.0)])
        with pytest.raises(CycleError) as exc:
            build_feedforward(g)
        u, v = exc.value.edge
        assert {u, v} == {2, 3}

    def test_stateless_repeatability(self):
        g = make_genome(3, 2, [(i, i, 3 + (i % 2), 0.3 * i + 0.1) for i in range(3)])
        net = build_feedforward(g)
        x = [0.1, -0.2, 0.3]
        first = net.activate(x)
        for _ in range(5):
            assert np.array_equal(net.activate(x), first)

    def test_wrong_arity_rejected(self):
        net = build_feedforward(make_genome(2, 1, [(0, 0, 2, 1.0)]))
        with pytest.raises(ContractError):
            net.activate([1.0])

    def test_output_order_and_length(self):
        g = make_genome(1, 3, [(0, 0, 1, 1.0), (1, 0, 2, 2.0), (2, 0, 3, 3.0)])
        out = build_feedforward(g).activate([0.1])
        assert len(out) == 3
        assert out[0] == pytest.approx(math.tanh(0.1), abs=1e-12)
        assert out[1] == pytest.approx(math.tanh(0.2), abs=1e-12)
        assert out[2] == pytest.approx(math.tanh(3.0 * 0.1), abs=1e-12)


class TestRecurrent:
    def test_self_loop_first_step_zero(self):
        g = make_genome(1, 1, [(0, 1, 1, 0.9)])
        net = build_recurrent(g)
        assert net.activate([0.0])[0] == 0.0

    def test_self_loop_unrolls_by_hand(self):
        g = make_genome(1, 1, [(0, 1, 1, 1.0)])
        net = build_recurrent(g)
        net.state[1] = 0.5
        assert net.activate([0.0])[0] == pytest.approx(math.tanh(0.5), abs=1e-12)

    def test_input_visible_same_step(self):
        g = make_genome(1, 1, [(0, 0, 1, 2.0)])
        net = build_recurrent(g)
        assert net.activate([0.5])[0] == pytest.approx(math.tanh(1.0), abs=1e-12)

    def test_synchronous_semantics(self):
        # chain in -> h -> out: output sees h's *previous* value
        g = make_genome(1, 1, [(0, 0, 2, 1.0), (1, 2, 1, 1.0)])
        net = build_recurrent(g)
        out1 = net.activate([0.7])[0]
        assert out1 == 0.0  # h was 0 last step
        out2 = net.activate([0.7])[0]
        assert out2 == pytest.approx(math.tanh(math.tanh(0.7)), abs=1e-12)

    def test_reset_replays_bitwise(self):
        g = make_genome(2, 1, [(0, 0, 3, 0.8), (1, 1, 3, -0.6), (2, 3, 2, 1.2),
                               (3, 2, 3, 0.5), (4, 2, 2, -0.3)])
        net = build_recurrent(g)
        seq = [[0.1 * i, -0.05 * i] for i in range(10)]
        first = [net.activate(x).copy() for x in seq]
        net.reset()
        second = [net.activate(x).copy() for x in seq]
        for a, b in zip(first, second):
            assert np.array_equal(a, b)

    def test_state_length_equals_node_count(self):
        g = make_genome(2, 2, [(0, 0, 2, 1.0), (1, 1, 3, 1.0), (2, 2, 4, 1.0)])
        net = build_recurrent(g)
        assert len(net.state) == len(g.nodes)
