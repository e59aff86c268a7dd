from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minmult.hmm import from_betti
from minmult.report import ReportDocument, exact, render_human

leaves = st.one_of(st.integers(-10 ** 30, 10 ** 30), st.fractions(), st.booleans(), st.none(),
                   st.text(max_size=8))
trees = st.recursive(leaves, lambda c: st.one_of(st.lists(c, max_size=4),
                                                 st.dictionaries(st.text(max_size=5), c, max_size=4)),
                     max_leaves=20)


@given(trees, trees, st.booleans())
def test_round_trip(results, bounds, ok):
    doc = ReportDocument("resolve", "abc", {"r": results}, {"b": bounds}, {"milliseconds": 12}, ok)
    back = ReportDocument.from_json(doc.to_json())
    assert back == doc
    assert back.to_json() == doc.to_json()


def test_numbers_become_strings():
    out = exact({"a": 3, "b": Fraction(2, 3), "c": np.int64(5), "d": np.array([1, 2]), "e": np.bool_(True)})
    assert out == {"a": "3", "b": "2/3", "c": "5", "d": ["1", "2"], "e": True}
    assert exact(from_betti([3, 8, 24, 72]))["head"] == ["3", "8", "24", "72"]


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        exact({"x": 0.5})
    with pytest.raises(TypeError):
        ReportDocument("x", "", {"v": [1.0]})


def test_no_float_literals_in_json():
    doc = ReportDocument("tor", "f", {"dims": [1, 2, 3], "ratio": Fraction(7, 2)})
    text = doc.to_json()
    assert "7/2" in text

    def walk(x):
        if isinstance(x, dict):
            return all(walk(v) for v in x.values())
        if isinstance(x, list):
            return all(walk(v) for v in x)
        return not isinstance(x, (int, float)) or isinstance(x, bool)
    assert walk(json.loads(text))


def test_human_rendering():
    doc = ReportDocument("resolve", "f", {"betti": [2, 3, 6], "nested": {"ok": True}})
    text = render_human(doc)
    assert "resolve" in text and "2, 3, 6" in text
