from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CertifiedValue:
    """A truncated evaluation together with rigorous enclosing bounds.

    ``certified`` is only set when the bounds are rigorous and tight enough
    for the caller's tolerance; uncertified values still carry the best
    bounds available (possibly heuristic, see ``notes``).
    """

    value: float
    lower_bound: float
    upper_bound: float
    depth: int
    certified: bool
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.lower_bound <= self.value <= self.upper_bound:
            raise ValueError(
                f"inconsistent bounds: {self.lower_bound} <= {self.value} <= {self.upper_bound}"
            )

    @property
    def width(self) -> float:
        return self.upper_bound - self.lower_bound

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "depth": self.depth,
            "certified": self.certified,
            "notes": list(self.notes),
        }
