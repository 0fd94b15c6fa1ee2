"""Exception types raised across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """An invariant violation in scenario or parameter data.

    ``code`` identifies the violated rule; ``locus`` names where it was
    found (a field path, and a file/line when parsed from disk).
    """

    def __init__(self, code: str, message: str, locus: str = "") -> None:
        self.code = code
        self.message = message
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)

    def at(self, locus: str) -> "ValidationError":
        """Copy of this error with ``locus`` prefixed."""
        joined = f"{locus}.{self.locus}" if self.locus else locus
        return ValidationError(self.code, self.message, joined)


class SimulationAborted(RuntimeError):
    """A non-finite quantity appeared during stepping."""

    def __init__(self, agent_id: int, term: str, time: float) -> None:
        self.agent_id = agent_id
        self.term = term
        self.time = time
        super().__init__(f"non-finite {term} for agent {agent_id} at t={time:g}")


class ArrivedAgentError(ValueError):
    """A per-agent model term was requested for an agent already at its goal."""
