import itertools
from fractions import Fraction

import pytest

from emachine.errors import ConfigurationError, RejectionError
from emachine.machines import (CombinatorialMachine, DepthProbe,
                               ExhaustiveProbe, MealyMachine, MonteCarloProbe,
                               ProbabilisticCombinatorialMachine,
                               combinatorial_from_json, combinatorial_to_json,
                               equivalent, mealy_from_json, mealy_to_json,
                               probabilistic_from_json, probabilistic_to_json,
                               run_combinatorial, sample_probabilistic,
                               wrap_delayed_feedback)


def identity_machine():
    return CombinatorialMachine(("a", "b"), ("a", "b"),
                                {"a": "a", "b": "b"})


def test_run_combinatorial_identity():
    assert run_combinatorial(identity_machine(), ["a", "b", "a"]) == ("a", "b", "a")


def test_run_combinatorial_xor_truth_table():
    xor = CombinatorialMachine(
        ((0, 0), (0, 1), (1, 0), (1, 1)), (0, 1),
        {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0})
    assert run_combinatorial(xor, [(0, 1), (1, 1)]) == (1, 0)


def test_run_combinatorial_constant():
    const = CombinatorialMachine(("a", "b"), ("c",), {"a": "c", "b": "c"})
    assert run_combinatorial(const, ["a", "b", "b"]) == ("c", "c", "c")


def test_out_of_alphabet_input_rejected():
    with pytest.raises(RejectionError):
        run_combinatorial(identity_machine(), ["z"])


def test_partial_table_rejected():
    with pytest.raises(ConfigurationError):
        CombinatorialMachine(("a", "b"), ("a",), {"a": "a"})


def parity_core():
    # f(bit, s) = (s xor bit, s xor bit) over the (external, feedback) product
    table = {}
    for bit in (0, 1):
        for s in (0, 1):
            v = s ^ bit
            table[(bit, s)] = (v, v)
    return CombinatorialMachine(
        tuple((b, s) for b in (0, 1) for s in (0, 1)),
        tuple(set(table.values())), table)


def test_delayed_feedback_parity_hand_trace():
    mealy = wrap_delayed_feedback(parity_core(), s0=0)
    assert mealy.run([1, 1, 1]) == (1, 0, 1)


def test_delayed_feedback_singleton_state_is_memoryless():
    table = {(x, "s"): (x.upper(), "s") for x in "ab"}
    m = CombinatorialMachine(tuple(table), tuple(set(table.values())), table)
    mealy = wrap_delayed_feedback(m, s0="s")
    assert mealy.run(["a", "b", "a"]) == ("A", "B", "A")


def test_delayed_feedback_two_state_counter_alternates():
    # unary input; the fed-back bit flips every cycle and is echoed out
    table = {("t", s): (s, 1 - s) for s in (0, 1)}
    m = CombinatorialMachine((("t", 0), ("t", 1)), ((0, 0), (0, 1), (1, 0), (1, 1), 0, 1),
                             table)
    mealy = wrap_delayed_feedback(m, s0=0)
    assert mealy.run(["t"] * 6) == (0, 1, 0, 1, 0, 1)


def test_delayed_feedback_requires_factorable_alphabets():
    m = CombinatorialMachine(("a",), ("b",), {"a": "b"})
    with pytest.raises(ConfigurationError):
        wrap_delayed_feedback(m, s0=0)


def test_wrap_then_unroll_equals_direct_mealy():
    # exhaustive over small alphabets: driving the combinatorial core with
    # its own delayed feedback reproduces the wrapped Mealy semantics
    import random
    rng = random.Random(1)
    for _ in range(20):
        nx = rng.randint(1, 3)
        ns = rng.randint(1, 4)
        ny = rng.randint(1, 3)
        xs = [f"x{i}" for i in range(nx)]
        ss = list(range(ns))
        ys = [f"y{i}" for i in range(ny)]
        table = {(x, s): (rng.choice(ys), rng.choice(ss))
                 for x in xs for s in ss}
        core = CombinatorialMachine(tuple(table), tuple(set(table.values())), table)
        mealy = wrap_delayed_feedback(core, s0=ss[0])
        for depth in range(1, 7 if nx == 1 else 5):
            for seq in itertools.product(xs, repeat=depth):
                fb = ss[0]
                unrolled = []
                for x in seq:
                    y, fb = core((x, fb))
                    unrolled.append(y)
                assert tuple(unrolled) == mealy.run(seq)


def fair_coin():
    return ProbabilisticCombinatorialMachine(
        ("a",), ("h", "t"),
        {"a": {"h": Fraction(1, 2), "t": Fraction(1, 2)}})


def test_probabilistic_row_must_sum_to_one():
    with pytest.raises(ConfigurationError):
        ProbabilisticCombinatorialMachine(
            ("a",), ("h", "t"), {"a": {"h": Fraction(1, 2), "t": Fraction(1, 3)}})


def test_sample_degenerate_delta_is_deterministic():
    m = ProbabilisticCombinatorialMachine(
        ("a",), ("h", "t"), {"a": {"h": Fraction(1), "t": Fraction(0)}})
    assert sample_probabilistic(m, ["a"] * 20, seed=3) == ("h",) * 20


def test_sample_fair_coin_frequencies_within_3_sigma():
    ys = sample_probabilistic(fair_coin(), ["a"] * 10000, seed=5)
    freq = ys.count("h") / 10000
    assert abs(freq - 0.5) <= 3 * (0.25 / 10000) ** 0.5


def test_sample_same_seed_identical():
    xs = ["a"] * 100
    assert sample_probabilistic(fair_coin(), xs, seed=9) == \
        sample_probabilistic(fair_coin(), xs, seed=9)


def test_equivalent_machine_vs_itself_exhaustive():
    m = identity_machine()
    assert equivalent(m, m, ExhaustiveProbe()).ok


def test_equivalent_exhaustive_reflexive_and_symmetric():
    m1 = identity_machine()
    m2 = CombinatorialMachine(("a", "b"), ("a", "b"), {"a": "a", "b": "a"})
    r12 = equivalent(m1, m2, ExhaustiveProbe())
    r21 = equivalent(m2, m1, ExhaustiveProbe())
    assert r12.ok == r21.ok is False


def test_equivalent_mealy_divergence_found_with_witness():
    # machines agree except on a state first reachable at depth 2
    def build(y_late):
        omega = {("a", s): "o" for s in (0, 1, 2)}
        omega[("a", 2)] = y_late
        alpha = {("a", 0): 1, ("a", 1): 2, ("a", 2): 2}
        return MealyMachine(("a",), ("o", "x"), (0, 1, 2), omega, alpha, s0=0)
    m1, m2 = build("o"), build("x")
    res = equivalent(m1, m2, DepthProbe(depth=3))
    assert not res.ok
    assert res.witness == ("a", "a", "a")
    assert equivalent(m1, m1, DepthProbe(depth=3)).ok


def test_equivalent_monte_carlo_fair_coin_vs_sampler():
    res = equivalent(fair_coin(), fair_coin(),
                     MonteCarloProbe(samples=10000, seed=2))
    assert res.ok


def test_equivalent_monte_carlo_detects_bias():
    biased = ProbabilisticCombinatorialMachine(
        ("a",), ("h", "t"), {"a": {"h": Fraction(3, 4), "t": Fraction(1, 4)}})

    class BiasedSampler:
        inputs = ("a",)

        def __init__(self):
            import random
            self._rng = random.Random(0)

        def reset(self):
            pass

        def step(self, x):
            return "h" if self._rng.random() < 0.5 else "t"

    res = equivalent(biased, BiasedSampler(), MonteCarloProbe(samples=10000, seed=4))
    assert not res.ok


def test_equivalent_alphabet_mismatch_rejected():
    m1 = identity_machine()
    m2 = CombinatorialMachine(("a",), ("a",), {"a": "a"})
    with pytest.raises(ConfigurationError):
        equivalent(m1, m2, ExhaustiveProbe())


def test_combinatorial_json_roundtrip():
    m = identity_machine()
    doc = combinatorial_to_json(m)
    assert doc["table"] == [["a", "a"], ["b", "b"]]
    m2 = combinatorial_from_json(doc)
    assert equivalent(m, m2, ExhaustiveProbe()).ok


def test_mealy_json_roundtrip():
    mealy = wrap_delayed_feedback(parity_core(), s0=0)
    m2 = mealy_from_json(mealy_to_json(mealy))
    assert equivalent(mealy, m2, DepthProbe(depth=5)).ok


def test_probabilistic_json_roundtrip():
    m2 = probabilistic_from_json(probabilistic_to_json(fair_coin()))
    assert m2.prob("a", "h") == Fraction(1, 2)


def test_json_symbols_tuplized():
    doc = {"alphabet_x": [[1, 0], [0, 1]], "alphabet_y": [[1], [2]],
           "table": [[[1, 0], [1]], [[0, 1], [2]]]}
    m = combinatorial_from_json(doc)
    assert m((1, 0)) == (1,)
