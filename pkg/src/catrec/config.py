"""Run configuration: every stage default in one validated, serializable tree."""

from __future__ import annotations

import json
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import ConfigError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DataConfig(_Section):
    input: str | None = None
    delimiter: str = ","
    user_column: str = "user_id"
    basket_column: str = "basket_id"
    category_column: str = "category_id"
    epoch_column: str = "epoch_seconds"


class SplitConfig(_Section):
    boundary: int | None = None
    # used when boundary is unset: boundary = min_ts + fraction * (max_ts - min_ts)
    fraction: float = 5.0 / 6.0


class FilterConfig(_Section):
    min_tx: int = 5
    max_tx: int = 1000


class AffinityConfig(_Section):
    half_life_days: float = 30.0
    reference_time: int | None = None  # defaults to the split boundary


class WalkConfig(_Section):
    schema_types: list[str] = ["u", "b", "c", "b", "u"]
    walks_per_node: int = 5
    length: int = 9
    epsilon0: float = 0.1
    gamma: float = 0.99


class SgnsSection(_Section):
    dimension: int = 64
    window: int = 2
    negatives: int = 5
    epochs: int = 5
    lr_start: float = 0.025
    lr_end: float = 0.0001
    unigram_power: float = 0.75


class ViConfig(_Section):
    alpha_bu: float = 1.0
    alpha_bv: float = 1.0
    alpha_kt: float = 1.0
    alpha_pt: float = 1.0
    alpha_ka: float = 1.0
    alpha_pa: float = 1.0
    alpha_A: float = 1.0
    negatives_ratio: int = 4
    batch_size: int = 512
    epochs: int = 20
    learning_rate: float = 0.005
    mc_samples: int = 50
    predict_weight: float = 1.0
    optimizer: str = "adam"


class MfConfig(_Section):
    factors: int = 64
    regularization: float = 0.01
    confidence_alpha: float = 40.0
    iterations: int = 15


class BprConfig(_Section):
    factors: int = 64
    learning_rate: float = 0.05
    regularization: float = 0.01
    epochs: int = 30


class EvalConfig(_Section):
    ks: list[int] = [5, 10, 15, 20]
    top_k: int = 10


class SynthConfig(_Section):
    users: int = 200
    categories: int = 40
    blocks: int = 4
    noise: float = 0.5


class RunConfig(_Section):
    seed: int = 0
    threads: int = 1
    data: DataConfig = DataConfig()
    split: SplitConfig = SplitConfig()
    filter: FilterConfig = FilterConfig()
    affinity: AffinityConfig = AffinityConfig()
    walk: WalkConfig = WalkConfig()
    sgns: SgnsSection = SgnsSection()
    vi: ViConfig = ViConfig()
    mf: MfConfig = MfConfig()
    bpr: BprConfig = BprConfig()
    eval: EvalConfig = EvalConfig()
    synth: SynthConfig = SynthConfig()


def load_config(path) -> RunConfig:
    """Load JSON or YAML config; unknown keys are rejected."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text) if path.suffix in (".yaml", ".yml") else json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from e
    return parse_config(raw or {})


def parse_config(raw: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def dump_config(cfg: RunConfig) -> str:
    """Stable serialization; reloads to an identical RunConfig."""
    return json.dumps(cfg.model_dump(), sort_keys=True, indent=2) + "\n"
