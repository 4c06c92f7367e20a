import pytest
from hypothesis import given, strategies as st

from emachine.codes import (DecodingCheck, Similarity, correct_decoding_check,
                            max_set, nonzero_match_ratio, scalar_product,
                            similarity, symbol_vector)
from emachine.errors import ConfigurationError, DimensionMismatchError

RATIO = Similarity.NONZERO_MATCH_RATIO
SCALAR = Similarity.SCALAR_PRODUCT


def test_ratio_definition_example():
    # matches on the nonzero positions of x, over the nonzero count of x
    assert similarity((1, 2, 0, 3), (1, 5, 7, 3), RATIO) == pytest.approx(2 / 3)


def test_ratio_all_zero_input_scores_zero():
    assert similarity((0, 0, 0), (1, 2, 3), RATIO) == 0.0


def test_scalar_product_example():
    assert similarity((1, 0, 1), (1, 1, 1), SCALAR) == 2.0


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionMismatchError):
        similarity((1, 0), (1, 0, 0), RATIO)
    with pytest.raises(DimensionMismatchError):
        similarity((1, 0), (1, 0, 0), SCALAR)


def test_symbol_vector_validation():
    assert symbol_vector([1, 0, 2]) == (1, 0, 2)
    with pytest.raises(ConfigurationError):
        symbol_vector([1, -1])
    with pytest.raises(DimensionMismatchError):
        symbol_vector([1, 2], dim=3)
    with pytest.raises(ConfigurationError):
        symbol_vector([5], bound=4)


def test_correct_decoding_one_hot_pass():
    assert correct_decoding_check([(1, 0), (0, 1)], SCALAR).ok


def test_correct_decoding_scalar_fail_with_witness():
    # f((1,0),(1,1)) = 1 = f((1,0),(1,0)): equality violates strictness
    res = correct_decoding_check([(1, 0), (1, 1)], SCALAR)
    assert not res.ok
    assert res.witness == ((1, 0), (1, 1))


def test_correct_decoding_ratio_ignores_zero_components():
    res = correct_decoding_check([(1, 0), (1, 5)], RATIO)
    assert not res.ok
    assert res.witness == ((1, 0), (1, 5))


def test_correct_decoding_empty_is_vacuous_pass():
    assert correct_decoding_check([], RATIO) == DecodingCheck(True, None)


def test_ratio_is_asymmetric_on_witness_pair():
    a, b = (1, 0), (1, 5)
    assert nonzero_match_ratio(a, b) == 1.0
    assert nonzero_match_ratio(b, a) == 0.5


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8),
       st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_scalar_product_symmetric(xs, ys):
    n = min(len(xs), len(ys))
    x, y = tuple(xs[:n]), tuple(ys[:n])
    assert scalar_product(x, y) == scalar_product(y, x)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_ratio_self_similarity_is_one_when_nonzero(xs):
    x = tuple(xs)
    if any(v != 0 for v in x):
        assert nonzero_match_ratio(x, x) == 1.0
    else:
        assert nonzero_match_ratio(x, x) == 0.0


@given(st.lists(st.integers(0, 4), min_size=2, max_size=6).map(tuple),
       st.lists(st.integers(0, 4), min_size=2, max_size=6).map(tuple))
def test_ratio_bounded_unit_interval(x, g):
    n = min(len(x), len(g))
    assert 0.0 <= nonzero_match_ratio(x[:n], g[:n]) <= 1.0


def test_decoding_pass_implies_unique_argmax_recovery():
    # brute-force oracle: for any set passing the check, presenting a stored
    # row makes that row the unique maximizer among all stored rows
    import random
    rng = random.Random(0)
    for _ in range(50):
        dim = rng.randint(2, 4)
        codes = set()
        while len(codes) < rng.randint(2, 5):
            codes.add(tuple(rng.randint(1, 4) for _ in range(dim)))
        codes = list(codes)
        if not correct_decoding_check(codes, RATIO).ok:
            continue
        for x in codes:
            scores = [nonzero_match_ratio(x, g) for g in codes]
            winners = max_set(scores)
            assert winners == [codes.index(x)]


def test_max_set_tolerance():
    assert max_set([0.1, 0.5, 0.5 - 1e-12, 0.2]) == [1, 2]
    assert max_set([]) == []
