from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping


def to_fraction(value: Any) -> Fraction:
    """Accept ints, "a/b" strings and decimal strings; floats go through their repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational number: {value!r}")
    if isinstance(value, float):
        value = repr(value)
    return Fraction(value)


@dataclass(frozen=True)
class PipelineConfig:
    window: int | None = None
    similar_discount: Fraction = Fraction(1, 2)
    retag_min_count: int = 3
    retag_pos_ratio: Fraction = Fraction(4, 5)
    fallback: bool = True
    samples_per_window: int = 8

    def __post_init__(self):
        object.__setattr__(self, "similar_discount", to_fraction(self.similar_discount))
        object.__setattr__(self, "retag_pos_ratio", to_fraction(self.retag_pos_ratio))
        if self.window is not None and (not isinstance(self.window, int) or self.window < 0):
            raise ValueError(f"window must be a non-negative integer, got {self.window!r}")
        if not 0 <= self.similar_discount <= 1:
            raise ValueError(f"similar_discount must lie in [0, 1], got {self.similar_discount}")
        if not isinstance(self.retag_min_count, int) or self.retag_min_count < 1:
            raise ValueError(f"retag_min_count must be >= 1, got {self.retag_min_count!r}")
        if not Fraction(1, 2) < self.retag_pos_ratio <= 1:
            raise ValueError(f"retag_pos_ratio must lie in (1/2, 1], got {self.retag_pos_ratio}")
        if not isinstance(self.fallback, bool):
            raise ValueError("fallback must be a boolean")
        if not isinstance(self.samples_per_window, int) or self.samples_per_window < 1:
            raise ValueError(f"samples_per_window must be >= 1, got {self.samples_per_window!r}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> PipelineConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> PipelineConfig:
        return cls.from_mapping(json.loads(Path(path).read_text(encoding="utf-8")))

    def override(self, **changes: Any) -> PipelineConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_json(self) -> dict:
        data = asdict(self)
        data["similar_discount"] = str(self.similar_discount)
        data["retag_pos_ratio"] = str(self.retag_pos_ratio)
        return data


DEFAULT_CONFIG = PipelineConfig()
