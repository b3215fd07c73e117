"""Run configurations for the batch scripts."""

from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from .sums import default_checkpoints


@dataclass
class SumRunConfig:
    function: str = "Etau"
    checkpoints: list = field(default_factory=default_checkpoints)
    shard: int = 10**6
    workers: int = 1
    cache_dir: Optional[str] = None

    def __post_init__(self):
        cps = list(self.checkpoints)
        if not cps or any(a >= b for a, b in zip(cps, cps[1:])) or cps[0] < 1:
            raise ValueError("checkpoints must be a strictly increasing list of positive integers")
        if self.shard < 1 or self.workers < 1:
            raise ValueError("shard and workers must be positive")


@dataclass
class SearchConfig:
    m: int = 16
    max_len: int = 9
    seeds: tuple = ("I",)
    exhaustive: bool = True
    beam_width: int = 4096

    def __post_init__(self):
        if self.m < 2 or self.max_len < 0:
            raise ValueError("need m >= 2 and max_len >= 0")


def from_dict(cls, d: dict):
    """Build ``cls`` from a dict, rejecting unknown keys."""
    names = {f.name for f in fields(cls)}
    extra = set(d) - names
    if extra:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    return cls(**d)


def to_dict(cfg) -> dict:
    return asdict(cfg)
