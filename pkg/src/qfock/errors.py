"""Exception types shared across the package."""

from __future__ import annotations


class BuildError(ValueError):
    """A constructor input violates a named invariant.

    Collects every violation found, not just the first one.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ConfigError(BuildError):
    """A run configuration failed validation."""


class CutoffError(RuntimeError):
    """An operation would leave the truncated Fock space."""


class InvariantError(AssertionError):
    """A runtime consistency check failed beyond tolerance.

    Carries a small replay dict so the failing instance can be serialized
    and reproduced.
    """

    def __init__(self, invariant: str, replay: dict | None = None):
        self.invariant = invariant
        self.replay = dict(replay or {})
        super().__init__(invariant)
