from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class EstimateReport:
    """One inequality instance: ``measured <= bound + slack``."""

    name: str
    measured: float
    bound: float
    slack: float
    witnesses: tuple = field(default=())
    x0: float | None = None
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.measured <= self.bound + self.slack))

    def recompute(self) -> bool:
        return self.measured <= self.bound + self.slack

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "x0": self.x0,
            "measured": float(self.measured),
            "bound": float(self.bound),
            "slack": float(self.slack),
            "pass": self.passed,
            "witnesses": [[float(v) for v in w] for w in self.witnesses],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EstimateReport":
        rep = cls(
            d["name"],
            float(d["measured"]),
            float(d["bound"]),
            float(d["slack"]),
            tuple(tuple(w) for w in d.get("witnesses", [])),
            d.get("x0"),
        )
        if rep.passed != bool(d["pass"]):
            raise ValueError(f"report {d['name']!r} has an inconsistent pass flag")
        return rep
