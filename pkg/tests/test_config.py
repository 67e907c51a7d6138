from __future__ import annotations

import json
from fractions import Fraction

import pytest

from discparse.config import DEFAULT_CONFIG, PipelineConfig, to_fraction


def test_defaults():
    assert DEFAULT_CONFIG.similar_discount == Fraction(1, 2)
    assert DEFAULT_CONFIG.retag_pos_ratio == Fraction(4, 5) and DEFAULT_CONFIG.retag_min_count == 3
    assert DEFAULT_CONFIG.window is None and DEFAULT_CONFIG.fallback


@pytest.mark.parametrize("raw, value", [("1/3", Fraction(1, 3)), ("0.5", Fraction(1, 2)), (0.1, Fraction(1, 10)),
                                        (1, Fraction(1))])
def test_fractions(raw, value):
    assert to_fraction(raw) == value


@pytest.mark.parametrize("changes", [{"window": -1}, {"similar_discount": 2}, {"retag_pos_ratio": "1/2"},
                                     {"retag_min_count": 0}, {"samples_per_window": 0}])
def test_out_of_range(changes):
    with pytest.raises(ValueError):
        PipelineConfig(**changes)


def test_load_and_override(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"window": 50, "similar_discount": "1/4"}))
    config = PipelineConfig.load(path)
    assert config.window == 50 and config.similar_discount == Fraction(1, 4)
    assert config.override(window=None, fallback=False) == PipelineConfig(window=50, similar_discount="1/4",
                                                                          fallback=False)
    assert PipelineConfig.from_mapping(config.to_json()) == config


def test_unknown_key():
    with pytest.raises(ValueError, match="unknown"):
        PipelineConfig.from_mapping({"windw": 3})
