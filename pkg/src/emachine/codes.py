"""Symbol-vector codes and similarity functions.

Symbol vectors are fixed-length tuples of non-negative integers; component
value 0 means "no symbol at this position".  Two similarity functions are
provided: the plain scalar product (vectors read as reals) and the
nonzero-match ratio (number of positions where x and g agree on a nonzero
value, divided by the number of nonzero positions of x).

A code set is usable for exact associative recall when it satisfies the
correct decoding condition: for every distinct pair x, x' in the set the
cross similarity is strictly below the self similarity.  ``correct_decoding_check``
tests this exhaustively and reports the first violating pair.
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple

from .errors import ConfigurationError, DimensionMismatchError

SymbolVector = Tuple[int, ...]

# Shared tolerance for treating two real-valued scores as tied when building
# a max-set.  Scores derived from integer codes are exact; this only guards
# float summation in the scalar-product case.
EPS_SCORE = 1e-9


def symbol_vector(components: Iterable[int], dim: Optional[int] = None,
                  bound: Optional[int] = None) -> SymbolVector:
    """Validate and freeze a symbol vector.

    ``dim`` pins the expected length, ``bound`` the (inclusive) maximum
    component value.
    """
    vec = tuple(int(c) for c in components)
    if any(c < 0 for c in vec):
        raise ConfigurationError(f"symbol components must be non-negative: {vec}")
    if dim is not None and len(vec) != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {len(vec)}")
    if bound is not None and any(c > bound for c in vec):
        raise ConfigurationError(f"component exceeds alphabet bound {bound}: {vec}")
    return vec


def scalar_product(x: Sequence[float], g: Sequence[float]) -> float:
    if len(x) != len(g):
        raise DimensionMismatchError(f"lengths differ: {len(x)} vs {len(g)}")
    return float(sum(a * b for a, b in zip(x, g)))


def nonzero_match_ratio(x: Sequence[int], g: Sequence[int]) -> float:
    """Matches on nonzero components of x, divided by the nonzero count of x.

    Returns 0.0 when x has no nonzero component.  Asymmetric in general:
    zero components of x are ignored, zero components of g are not special.
    """
    if len(x) != len(g):
        raise DimensionMismatchError(f"lengths differ: {len(x)} vs {len(g)}")
    matches = 0
    nonzero = 0
    for xj, gj in zip(x, g):
        if xj != 0:
            nonzero += 1
            if xj == gj:
                matches += 1
    if nonzero == 0:
        return 0.0
    return matches / nonzero


class Similarity(enum.Enum):
    """Which similarity function an associative field decodes with."""

    SCALAR_PRODUCT = "scalar-product"
    NONZERO_MATCH_RATIO = "nonzero-match-ratio"

    def score(self, x: Sequence[int], g: Sequence[int]) -> float:
        if self is Similarity.SCALAR_PRODUCT:
            return scalar_product(x, g)
        return nonzero_match_ratio(x, g)


def similarity(x: Sequence[int], g: Sequence[int], fn: Similarity) -> float:
    return fn.score(x, g)


def max_set(scores: Sequence[float], eps: float = EPS_SCORE) -> list[int]:
    """Indices whose score is within ``eps`` of the maximum."""
    if len(scores) == 0:
        return []
    top = max(scores)
    return [i for i, s in enumerate(scores) if s >= top - eps]


class DecodingCheck(NamedTuple):
    ok: bool
    witness: Optional[Tuple[SymbolVector, SymbolVector]]

    def __bool__(self) -> bool:  # convenience: `if check:` reads as PASS
        return self.ok


def correct_decoding_check(codes: Iterable[Sequence[int]],
                           fn: Similarity) -> DecodingCheck:
    """Check strict self-maximality of ``fn`` over the code set.

    PASS iff for every distinct pair x, x' the cross score fn(x, x') is
    strictly below the self score fn(x, x).  Empty sets pass vacuously.
    FAIL returns the first violating (x, x') pair as a witness.
    """
    vecs = [tuple(c) for c in codes]
    if vecs:
        dim = len(vecs[0])
        if any(len(v) != dim for v in vecs):
            raise DimensionMismatchError("code set mixes dimensions")
    for x in vecs:
        self_score = fn.score(x, x)
        for g in vecs:
            if g == x:
                continue
            if not fn.score(x, g) < self_score:
                return DecodingCheck(False, (x, g))
    return DecodingCheck(True, None)
