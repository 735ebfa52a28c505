import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from pipedreams.errors import NotAlternatingError, ShapeError
from pipedreams.shape import (
    BoxCoord, LinearExtension, Shape, canonical_linear_extension, diagonal_counts, from_boxes, from_word,
    hypothesis_report, is_order_convex, is_serrated, staircase, strip, word_of,
)
from pipedreams.word import Word, bipartite_word, staircase_word

from conftest import alternating_words, random_alternating


def brute_convex(s):
    """Pairwise definition: no in-rank box outside s lies between two boxes of s."""
    boxes = s.boxes()
    for a, b in itertools.product(boxes, boxes):
        if a.x <= b.x and a.y <= b.y:
            for x in range(a.x, b.x + 1):
                for y in range(a.y, b.y + 1):
                    if 1 <= x - y <= s.n - 1 and (x, y) not in s:
                        return False
    return True


def brute_serrated(s):
    if len(s) == 0:
        return False
    for c in range(int(s.levels.min()) - 1, int(s.levels.max()) + 2):
        if any(b.level < c for b in s.boxes()):
            continue
        need = [((c + d) // 2, (c - d) // 2) for d in range(1, s.n) if (c - d) % 2 == 0]
        if all(b in s for b in need):
            return True
    return False


def test_staircase_examples():
    assert staircase(2).boxes() == [BoxCoord(1, 0)]
    s4 = staircase(4)
    assert len(s4) == 6 and diagonal_counts(s4).tolist() == [1, 2, 3]
    assert len(staircase(8)) == 28
    with pytest.raises(ShapeError):
        staircase(1)


@pytest.mark.parametrize("n", [2, 3, 5, 9, 20])
def test_staircase_is_set_definition(n):
    expected = {(x, y) for x in range(1, n) for y in range(-n, 1) if x - y <= n - 1}
    s = staircase(n)
    assert {tuple(b) for b in s.boxes()} == expected
    assert len(s) == n * (n - 1) // 2
    assert diagonal_counts(s).tolist() == list(range(1, n))


def test_from_word_examples():
    s, ext = from_word(Word(3, [2, 1, 2]))
    assert len(s) == 3
    assert [b.diagonal for b in ext.order] == [2, 1, 2]
    assert word_of(ext).letters == (2, 1, 2)
    with pytest.raises(NotAlternatingError) as info:
        from_word(Word(3, [1, 1]))
    assert info.value.pair == (1, 2)


@pytest.mark.parametrize("n", range(2, 10))
def test_from_staircase_word_is_staircase(n):
    s, _ = from_word(staircase_word(n))
    assert s.normalized() == staircase(n).normalized()


def test_from_word_first_letter_at_base():
    s, ext = from_word(Word(5, [3, 2, 4, 3]))
    assert ext.order[0] == BoxCoord(3, 0)


def test_strip_examples():
    s = strip(4, 1)
    assert len(s) == 3 and diagonal_counts(s).tolist() == [1, 1, 1]
    s = strip(8, 4)
    assert len(s) == 28 and set(diagonal_counts(s).tolist()) == {4}
    s = strip(9, 4, odd_tail=True)
    assert np.all(np.abs(diagonal_counts(s) - 9 / 2) <= 0.5)
    with pytest.raises(ShapeError):
        strip(2, 1)
    with pytest.raises(ShapeError):
        strip(5, 0)


def test_from_boxes_examples():
    assert len(from_boxes(3, [(1, 0), (2, 0)])) == 2
    with pytest.raises(ShapeError, match="duplicate"):
        from_boxes(3, [(1, 0), (1, 0)])
    with pytest.raises(ShapeError, match="diagonal"):
        from_boxes(3, [(3, 0)])


def test_diagonal_counts_examples():
    assert diagonal_counts(strip(5, 3)).tolist() == [3, 3, 3, 3]
    assert diagonal_counts(from_boxes(4, [])).tolist() == [0, 0, 0]


def test_order_convex_examples():
    assert is_order_convex(staircase(6))
    assert not is_order_convex(from_boxes(4, [(1, 0), (3, 0)]))
    assert is_order_convex(from_boxes(4, [(2, 0)]))


def test_serrated_examples():
    assert is_serrated(strip(6, 3))
    assert not is_serrated(staircase(4))
    assert not is_serrated(from_boxes(4, []))


def test_canonical_extension_examples():
    ext = canonical_linear_extension(staircase(3))
    assert ext.order == (BoxCoord(1, -1), BoxCoord(1, 0), BoxCoord(2, 0))
    assert canonical_linear_extension(from_boxes(3, [(2, 0)])).order == (BoxCoord(2, 0),)
    s, ext_w = from_word(bipartite_word(4, 1))
    assert [b.diagonal for b in canonical_linear_extension(s).order] == [1, 3, 2]
    assert set(canonical_linear_extension(s).order) == set(ext_w.order)


def test_hypothesis_report_examples():
    r = hypothesis_report(staircase(100), 0.05)
    assert r.max_count == 99 and r.small_diagonals == 1
    assert math.isclose(r.ratio_max, 99 / (100**2 / math.log(100) ** 1.05))
    r = hypothesis_report(strip(100, 50))
    assert r.max_count == 50 and r.small_diagonals == 0
    assert hypothesis_report(from_boxes(5, [])).max_count == 0
    with pytest.raises(ValueError):
        hypothesis_report(staircase(5), 0.5)


def test_random_alternating_words_give_convex_shapes():
    rng = np.random.default_rng(20261015)
    for _ in range(500):
        n = int(rng.integers(2, 13))
        w = random_alternating(n, int(rng.integers(0, 61)), rng)
        s, ext = from_word(w)
        assert word_of(ext).letters == w.letters
        assert is_order_convex(s)
        assert ext.is_valid_for(s)


@settings(max_examples=150, deadline=None)
@given(alternating_words(max_n=7, max_len=25))
def test_convexity_sweep_matches_pairwise(w):
    s, _ = from_word(w)
    assert is_order_convex(s) == brute_convex(s)
    assert is_serrated(s) == brute_serrated(s)
    assert int(diagonal_counts(s).sum()) == len(s)


def test_convexity_sweep_matches_pairwise_on_random_sets():
    rng = np.random.default_rng(3)
    for _ in range(400):
        n = int(rng.integers(2, 6))
        cand = [(x, y) for x in range(0, 5) for y in range(-4, 3) if 1 <= x - y <= n - 1]
        pick = rng.random(len(cand)) < 0.4
        s = from_boxes(n, [c for c, k in zip(cand, pick) if k])
        assert is_order_convex(s) == brute_convex(s)
        assert is_serrated(s) == brute_serrated(s)


@settings(max_examples=100, deadline=None)
@given(alternating_words())
def test_canonical_extension_is_linear_extension(w):
    s, _ = from_word(w)
    ext = canonical_linear_extension(s)
    assert ext.is_valid_for(s)
    pos = {b: i for i, b in enumerate(ext.order)}
    for a in ext.order:
        for b in ext.order:
            if a != b and a.x <= b.x and a.y <= b.y:
                assert pos[a] < pos[b]


def test_shape_equality_and_translation():
    s = staircase(5)
    assert s.translated(3).normalized() == s.normalized()
    assert s != s.translated(1)
    assert hash(s) == hash(staircase(5))
    assert (1, 0) in s and (0, 0) not in s


def test_invalid_linear_extension_detected():
    s = staircase(3)
    bad = LinearExtension(3, (BoxCoord(2, 0), BoxCoord(1, -1), BoxCoord(1, 0)))
    assert not bad.is_valid_for(s)
