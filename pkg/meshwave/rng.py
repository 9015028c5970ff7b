from __future__ import annotations

import hashlib
import logging
import os

import chz
import numpy as np

from meshwave.errors import ValidationError

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "MESHWAVE_SEED"
_SEED_MASK = (1 << 64) - 1


def _stream_key(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode(), digest_size=8).digest(), "little")


def substream(seed: int, name: str) -> np.random.Generator:
    """Returns the generator for one named random stream of a run.

    The stream is keyed on (seed, name) only, so adding a new stream elsewhere never shifts the
    draws of an existing one.
    """
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, _stream_key(name)]))


def replication_seed(seed: int, index: int) -> int:
    return (seed ^ index) & _SEED_MASK


def resolve_seed(explicit: int | None, configured: int | None = None) -> int:
    """Picks the seed of a run: explicit argument, then scenario, then environment, then 0."""
    if explicit is not None:
        return explicit & _SEED_MASK
    if configured is not None:
        return configured & _SEED_MASK
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            seed = int(env, 0)
        except ValueError:
            raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
        logger.debug("Using seed %d from %s", seed, SEED_ENV_VAR)
        return seed & _SEED_MASK
    return 0


def _non_negative(self: object, attr: str) -> None:
    value = getattr(self, attr)
    if value < 0:
        raise ValueError(f"Expected {attr} to be non-negative, got {value}")


@chz.chz
class Triangular:
    """Bounded (low, mode, high) distribution for recovery durations in seconds."""

    low: float = chz.field(validator=_non_negative)
    mode: float
    high: float

    @chz.validate
    def _ordered(self) -> None:
        if not self.low <= self.mode <= self.high:
            raise ValueError(
                f"triangular parameters must satisfy low <= mode <= high, "
                f"got ({self.low}, {self.mode}, {self.high})"
            )

    @property
    def mean(self) -> float:
        return (self.low + self.mode + self.high) / 3.0

    def scaled(self, factor: float) -> Triangular:
        return Triangular(low=self.low * factor, mode=self.mode * factor, high=self.high * factor)

    def sample(self, rng: np.random.Generator) -> float:
        if self.low == self.high:
            return float(self.low)
        return float(rng.triangular(self.low, self.mode, self.high))
