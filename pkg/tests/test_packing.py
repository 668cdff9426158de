import json
import math
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

import finpack
from finpack.errors import DimensionMismatch, EmptySet, MissingParam
from finpack.fp_core import PointSet, field_new
from finpack.groups import enumerate_h1, enumerate_sl2
from finpack.incidence_sl2 import evaluate_bound
from finpack.packing import (
    PACKING_THEOREMS,
    compare,
    find_rich_point,
    image_set,
    predicted_lower_bound,
    rich_counts,
    translate,
)
from finpack.sampling import random_points, random_sl2

from conftest import point_sets, sl2_sets

SCHEMAS = Path(finpack.__file__).parent / "schemas"


@given(st.data())
def test_image_contains_identity_orbit(data):
    p = data.draw(st.sampled_from([3, 5, 7]))
    E = data.draw(point_sets(p, max_size=15, min_size=1))
    S = data.draw(sl2_sets(p, max_size=15, min_size=1))
    img = image_set(S, E)
    g = next(iter(S))
    assert {g(x) for x in E} <= set(img)
    assert len(img) <= len(S) * len(E)
    assert len(img) >= len(E)


def test_image_dimension_check():
    with pytest.raises(DimensionMismatch):
        image_set(enumerate_sl2(3), PointSet(field_new(3), [(1, 1, 1)], dim=3))


def test_translate():
    E = PointSet(field_new(5), [(1, 2), (4, 4)])
    assert set(translate(E, (1, 2))) == {(0, 0), (3, 2)}


def test_rich_point_full_plane():
    ctx = field_new(7)
    x, n = find_rich_point(PointSet.full(ctx, 2))
    assert n == 8
    assert rich_counts(PointSet.full(ctx, 2)).max() == 8


@pytest.mark.parametrize("p", [7, 11])
def test_rich_point_random(p, rng):
    ctx = field_new(p)
    for _ in range(5):
        E = random_points(ctx, int(rng.integers(4 * p, p * p)), rng, exclude_origin=False)
        x, n = find_rich_point(E)
        assert x in set(E) and n >= p / 2


def test_predicted_values():
    assert predicted_lower_bound("prop-1.1", {"p": 5, "S": 120, "E": 24}) == 25
    assert predicted_lower_bound("rmk-4.4", {"p": 5, "S": 4, "E": 1, "k1": 1}) == pytest.approx(1 / math.log2(5))
    assert predicted_lower_bound("thm-4.2a", {"p": 7, "S": 1, "E": 1}) == 49
    with pytest.raises(MissingParam):
        predicted_lower_bound("thm-1.2", {"p": 5, "S": 1, "E": 1})
    with pytest.raises(KeyError):
        predicted_lower_bound("nope", {})


def test_compare_reports(rng):
    ctx = field_new(7)
    E = random_points(ctx, 30, rng)
    S = random_sl2(ctx, 50, rng)
    schema = json.loads((SCHEMAS / "packing_report.schema.json").read_text())
    for tid in PACKING_THEOREMS:
        if tid == "thm-1.5":
            continue
        rep = compare(S, E, tid, seed=3)
        assert rep.image_size == len(image_set(S, E)) or tid == "thm-4.2a"
        jsonschema.validate(json.loads(rep.to_json()), schema)
        assert rep.csv_row()["actual"] >= 1


def test_compare_thm42a_records_points(rng):
    ctx = field_new(5)
    E = random_points(ctx, 22, rng, exclude_origin=False)
    rep = compare(enumerate_sl2(5), E, "thm-4.2a")
    assert rep.extra["rich_lines"] >= 2.5
    assert rep.image_size >= rep.extra["rich_image_size"]


def test_compare_h1(rng):
    ctx = field_new(3)
    E = random_points(ctx, 5, rng, dim=3, nonzero_last=True)
    rep = compare(enumerate_h1(3), E, "thm-1.5")
    assert rep.image_size == 18


def test_compare_empty():
    with pytest.raises(EmptySet):
        compare(enumerate_sl2(3), PointSet(field_new(3), [], dim=2), "prop-1.1")


def test_bound_report_schema(rng):
    ctx = field_new(5)
    schema = json.loads((SCHEMAS / "bound_report.schema.json").read_text())
    A = random_points(ctx, 10, rng)
    rep = evaluate_bound("thm-2.2", A=A, B=A, S=random_sl2(ctx, 20, rng))
    jsonschema.validate(json.loads(rep.to_json()), schema)
