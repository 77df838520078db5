"""Error and warning types shared across the simulator."""

from typing import Dict, List, Optional, Tuple


class HbqedError(Exception):
    """Base error. Every instance carries a short machine-readable code."""

    code = "HBQED_ERROR"

    def __init__(self, message: str, code: Optional[str] = None, **details):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.details: Dict = details

    def __str__(self) -> str:
        return f"{self.code}: {super().__str__()}"


class ValidationError(HbqedError, ValueError):
    """One or more configuration invariants are violated."""

    code = "INVALID_CONFIG"

    def __init__(self, problems: List[Tuple[str, str]]):
        self.problems = list(problems)
        message = "; ".join(f"{code}: {text}" for code, text in self.problems)
        first = self.problems[0][0] if self.problems else None
        super().__init__(message, code=first)

    @property
    def codes(self) -> List[str]:
        return [code for code, _ in self.problems]

    def __str__(self) -> str:
        return "; ".join(f"{code}: {text}" for code, text in self.problems)


class RoutingError(HbqedError):
    """Jump operators do not respect the block partition."""

    code = "ROUTING_AMBIGUOUS"


class PositivityError(HbqedError):
    """The density matrix acquired a negative eigenvalue beyond tolerance."""

    code = "POSITIVITY_VIOLATION"


class ConvergenceError(HbqedError):
    """Steady state was not reached within the horizon."""

    code = "NOT_CONVERGED"

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result

    @property
    def distribution(self):
        return None if self.result is None else self.result.distribution

    @property
    def distance(self):
        return None if self.result is None else self.result.distance


class ConfigWarning(UserWarning):
    """Configuration is accepted but outside the recommended regime."""
