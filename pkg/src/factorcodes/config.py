"""Analysis configuration: resource caps, plateau overrides and tolerances."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class AnalysisConfig:
    max_words: int = 10**6
    max_states: int = 10**4
    # word length used for semantic (language-level) equality checks
    word_cap: int = 12
    # longest word length swept by the degree / class-degree searches
    max_length: int = 48
    # None means the default plateau: (number of domain symbols) ** 2
    plateau: int | None = None
    lift_length: int = 10
    eig_tol: float = 1e-14
    eig_max_iter: int = 100_000
    solver_max_iter: int = 100_000
    solver_ftol: float = 1e-12
    solver_gtol: float = 1e-11
    support_floor: float = 1e-12
    seeds: int = 10
    seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        for f in ("max_words", "max_states", "word_cap", "max_length",
                  "lift_length", "eig_max_iter", "solver_max_iter", "seeds"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")
        if self.plateau is not None and self.plateau <= 0:
            raise ValueError("plateau must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def with_(self, **kw) -> "AnalysisConfig":
        return replace(self, **kw)


DEFAULT = AnalysisConfig()
