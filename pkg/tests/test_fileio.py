import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballbody.arcs import make_lens_2d
from ballbody.body import GeneratorSet, LensSpec, SupportSample, sample_support
from ballbody.errors import FormatError, GridMismatch
from ballbody.fileio import (
    dump_report,
    dumps,
    load_body,
    loads,
    report_to_dict,
    save_body,
    to_sample,
)
from ballbody.geom import RigidMotion, make_grid
from ballbody.witnesses import cuteness_check

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=6), st.booleans())
def test_generator_round_trip_is_bit_exact(pts, hull):
    body = GeneratorSet(np.array(pts, dtype=float), hull)
    back, grid = loads(dumps(body))
    assert grid is None
    assert back.hull == hull
    assert back.points.tobytes() == body.points.tobytes()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_support_round_trip_is_bit_exact(seed):
    grid = make_grid(2, 32)
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(len(grid)) * 10.0 ** rng.integers(-300, 300, len(grid))
    s = SupportSample(grid, values)
    back, g = loads(dumps(s))
    assert g.same_as(grid)
    assert back.values.tobytes() == values.tobytes()


def test_arcs_round_trip(tmp_path):
    lens = make_lens_2d(LensSpec(np.array([-0.6, 0.0]), np.array([0.6, 0.0])))
    path = tmp_path / "lens.json"
    save_body(path, lens)
    text = path.read_text()
    assert text.count("\n") == 1
    back, _ = load_body(path)
    assert back.arcs == lens.arcs


def test_generator_file_records_grid():
    grid = make_grid(3, 10, seed=4)
    body = GeneratorSet(np.zeros((1, 3)))
    d = json.loads(dumps(body, grid))
    assert d["grid"] == {"resolution": 10, "seed": 4}
    _, g = loads(dumps(body, grid))
    assert g.same_as(grid)


BAD = [
    "not json",
    "[]",
    '{"kind": "generators", "data": {"points": [["0", "0"]]}}',
    '{"dim": 2, "kind": "blob", "data": {}}',
    '{"dim": "two", "kind": "generators", "data": {"points": [["0", "0"]]}}',
    '{"dim": 2, "kind": "generators", "data": {"points": [["0", "0", "0"]]}}',
    '{"dim": 2, "kind": "generators", "data": {"points": [["zero", "0"]]}}',
    '{"dim": 2, "kind": "generators", "data": {"points": [[true, "0"]]}}',
    '{"dim": 2, "kind": "generators", "data": {}}',
    '{"dim": 2, "kind": "support", "data": {"values": ["1"]}, "grid": null}',
    '{"dim": 2, "kind": "support", "data": {"values": ["1"]}, "grid": {"resolution": 4, "seed": 0}}',
    '{"dim": 2, "kind": "support", "data": {"values": []}, "grid": {"resolution": "x"}}',
    '{"dim": 3, "kind": "arcs2d", "data": {"arcs": []}}',
    '{"dim": 2, "kind": "arcs2d", "data": {"arcs": []}}',
    '{"dim": 2, "kind": "arcs2d", "data": {"arcs": [{"center": ["0"], "radius": "1", "start": "0", "end": "1"}]}}',
    '{"dim": 2, "kind": "generators", "data": []}',
]


@pytest.mark.parametrize("text", BAD)
def test_malformed_files_raise_format_error(text):
    with pytest.raises(FormatError):
        loads(text)


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        load_body(tmp_path / "nope.json")


def test_to_sample_checks_grid():
    g0, g1 = make_grid(2, 16), make_grid(2, 32)
    s = sample_support(GeneratorSet(np.zeros((1, 2))), g0)
    assert to_sample(s, g0) is s
    with pytest.raises(GridMismatch, match="resolution 16"):
        to_sample(s, g1)
    lens = make_lens_2d(LensSpec(np.array([-0.6, 0.0]), np.array([0.6, 0.0])))
    assert np.allclose(to_sample(lens, g1).values, sample_support(GeneratorSet(np.array([[-0.6, 0.0], [0.6, 0.0]])), g1).values)


def test_reports_are_versioned():
    grid = make_grid(2, 64)
    s0 = sample_support(GeneratorSet.point(np.zeros(2)), grid)
    s1 = sample_support(GeneratorSet.point(np.array([5.0, 0.0])), grid)
    rep = cuteness_check(s0, s1, budget=5)
    d = report_to_dict(rep, "cuteness")
    assert d["schema"] == 1 and d["report"] == "cuteness"
    assert d["verdict"] == rep.verdict
    assert float(d["distance"]) == rep.distance
    assert json.loads(dump_report(rep, "cuteness")) == d


def test_report_motion_serialisation():
    g = RigidMotion.random(2, np.random.default_rng(0))
    d = report_to_dict({"g": g}, "x")
    lin = np.array([[float(v) for v in row] for row in d["g"]["linear"]])
    assert lin.tobytes() == g.linear.tobytes()
