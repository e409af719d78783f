"""Service configuration with file defaults and environment overrides.

Every field can be overridden by an environment variable named
REQSPEC_<FIELD> (upper case), e.g. REQSPEC_KB_PATH or
REQSPEC_VALIDATOR_THRESHOLD.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .guard import (
    DEFAULT_DROPOUT, DEFAULT_PASSES, DEFAULT_RETRAIN_EVERY, DEFAULT_THRESHOLD,
    GuardConfig,
)


@dataclass
class ServiceConfig:
    kb_path: str = ""                      # empty -> packaged seed KB
    comparator_lexicon_path: str = ""      # empty -> packaged defaults
    vague_terms_path: str = ""             # empty -> packaged defaults
    validator_passes: int = DEFAULT_PASSES
    validator_dropout: float = DEFAULT_DROPOUT
    validator_threshold: float = DEFAULT_THRESHOLD
    validator_seed: int = 7
    merge_entity_quantifier: bool = True
    retrain_every: int = DEFAULT_RETRAIN_EVERY
    synthesis_lambda: int = 5
    synthesis_seed: int = 0
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    session_ttl: float = 3600.0
    confirmed_path: str = ""               # durable JSONL of confirmed requirements
    audit_path: str = ""                   # JSONL audit log of verdicts
    static_dir: str = ""                   # built frontend assets, if any

    def __post_init__(self):
        if not (0.0 < self.validator_threshold <= 1.0):
            raise ValueError("validator threshold must be in (0,1]")
        for path_field in ("kb_path", "comparator_lexicon_path",
                           "vague_terms_path"):
            path = getattr(self, path_field)
            if path and not os.path.exists(path):
                raise FileNotFoundError(f"{path_field}: {path} not readable")

    def guard_config(self) -> GuardConfig:
        return GuardConfig(
            passes=self.validator_passes,
            dropout=self.validator_dropout,
            threshold=self.validator_threshold,
            seed=self.validator_seed,
            merge_entity_quantifier=self.merge_entity_quantifier,
            retrain_every=self.retrain_every,
        )


_BOOL_TRUE = {"1", "true", "yes", "on"}


def _coerce(current, raw: str):
    if isinstance(current, bool):
        return raw.lower() in _BOOL_TRUE
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def load_config(env=None, **overrides) -> ServiceConfig:
    """Defaults, then keyword overrides, then environment overrides."""
    env = os.environ if env is None else env
    values = dict(overrides)
    base = ServiceConfig()
    for name in base.__dataclass_fields__:
        var = f"REQSPEC_{name.upper()}"
        if var in env:
            values[name] = _coerce(getattr(base, name), env[var])
    return ServiceConfig(**values)
