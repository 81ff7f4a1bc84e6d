import re

import numpy as np
import pytest

from ballbody.arcs import make_lens_2d
from ballbody.body import GeneratorSet, LensSpec, SupportSample, sample_support
from ballbody.errors import DimensionError
from ballbody.geom import make_grid
from ballbody.render import render_svg, sample_outline
from ballbody.witnesses import halfball_witnesses


def _layer(svg, i):
    return re.search(rf'<g id="layer{i}".*?</g>', svg, re.S).group(0)


def test_disk_is_one_circle():
    svg = render_svg([("disk", GeneratorSet(np.zeros((1, 2))))])
    layer = _layer(svg, 0)
    assert layer.count("<circle") == 1 and "<path" not in layer


def test_lens_is_two_arcs():
    lens = make_lens_2d(LensSpec(np.array([-0.6, 0.0]), np.array([0.6, 0.0])))
    layer = _layer(render_svg([("lens", lens)]), 0)
    assert layer.count("<path") == 2
    assert len(re.findall(r" A 1 1 0 0 0 ", layer)) == 2


def test_halfball_figure_layers():
    grid = make_grid(2, 512)
    x = np.array([0.0, 1.0])
    k0 = GeneratorSet(np.zeros((1, 2)))
    k1 = GeneratorSet(x[None])
    mids = halfball_witnesses(x, grid, count=3)
    layers = [("K0", k0), ("K1", k1)] + [(f"M{i}", w.body) for i, w in enumerate(mids)]
    svg = render_svg(layers)
    assert len(re.findall(r'<g id="layer\d+"', svg)) == 5
    assert svg.count("<polyline") == 3
    assert svg == render_svg(layers)


def test_outline_vertices_lie_on_support_lines():
    grid = make_grid(2, 256)
    s = sample_support(GeneratorSet(np.array([[-0.6, 0.0], [0.6, 0.0]])), grid)
    pts = sample_outline(s)
    # each polygon vertex lies in the body up to the discretisation slack
    assert np.max(pts @ grid.directions.T - s.values) <= 1e-3


def test_labels_are_escaped():
    svg = render_svg([("<a&b>", GeneratorSet(np.zeros((1, 2))))])
    assert "&lt;a&amp;b&gt;" in svg


def test_only_planar_bodies():
    with pytest.raises(DimensionError):
        render_svg([("ball", GeneratorSet(np.zeros((1, 3))))])
    with pytest.raises(DimensionError):
        render_svg([("s", SupportSample(make_grid(3, 4), np.ones(len(make_grid(3, 4)))))])
    with pytest.raises(ValueError):
        render_svg([])
