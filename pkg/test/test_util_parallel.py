# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

import math

import pytest

from fplstat.util.parallel import ordered_map


@pytest.mark.parametrize("max_workers", (None, 1, 3))
def test_ordered_map_keeps_input_order(max_workers):
    items = list(range(20, 0, -1))
    assert ordered_map(math.factorial, items, max_workers) == [
        math.factorial(i) for i in items
    ]


def test_ordered_map_empty():
    assert ordered_map(math.factorial, [], 2) == []


@pytest.mark.parametrize("max_workers", (1, 2))
def test_ordered_map_raises(max_workers):
    with pytest.raises(ValueError):
        ordered_map(math.factorial, [3, -1, 4], max_workers)
