"""Double-slit toy model: position spread with one slit open versus both.

Each slit contributes a Gaussian packet on a discretized screen coordinate.
With both slits open the screen state is their superposition, and the
variance of the position operator is compared with the bounds computed from
the single-slit packets. No propagation physics is modelled: interference
enters only through the packet overlap. The SDs are screen-wide, not
conditioned on a detection point.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import VARIANTS, SuperpositionSpec, assemble, theorem1_bounds_all
from .errors import InvalidSpec
from .stats import moments


@dataclass(frozen=True)
class SlitConfig:
    grid_points: int = 512
    y_min: float = -10.0
    y_max: float = 10.0
    slit_centers: tuple[float, float] = (-2.0, 2.0)
    packet_width: float = 0.5
    amplitudes: tuple[complex, complex] = (1 / math.sqrt(2), 1 / math.sqrt(2))

    def __post_init__(self):
        mu1, mu2 = self.slit_centers
        if self.grid_points < 16:
            raise InvalidSpec("grid_points must be >= 16")
        if self.packet_width <= 0:
            raise InvalidSpec("packet_width must be positive")
        if not (self.y_min < mu1 <= mu2 < self.y_max):
            raise InvalidSpec("need y_min < mu1 <= mu2 < y_max")
        object.__setattr__(self, "slit_centers", (float(mu1), float(mu2)))
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in self.amplitudes))
        weight = sum(abs(a) ** 2 for a in self.amplitudes)
        if len(self.amplitudes) != 2 or abs(weight - 1.0) > 1e-9:
            raise InvalidSpec("amplitudes must be two numbers with |a1|^2 + |a2|^2 = 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["slit_centers"] = list(self.slit_centers)
        d["amplitudes"] = [{"re": a.real, "im": a.imag} for a in self.amplitudes]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SlitConfig":
        data = dict(data)
        if "amplitudes" in data:
            data["amplitudes"] = tuple(
                complex(a["re"], a.get("im", 0.0)) if isinstance(a, dict) else complex(a)
                for a in data["amplitudes"]
            )
        if "slit_centers" in data:
            data["slit_centers"] = tuple(data["slit_centers"])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidSpec(f"unknown SlitConfig fields {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "SlitConfig":
        return cls.from_dict(json.loads(text))


def screen_grid(config: SlitConfig) -> np.ndarray:
    return np.linspace(config.y_min, config.y_max, config.grid_points)


def position_operator(config: SlitConfig) -> np.ndarray:
    return np.diag(screen_grid(config)).astype(np.complex128)


def build_slit_state(config: SlitConfig, which: str) -> np.ndarray:
    """Normalized packet ``exp(-(y - mu)^2 / (4 sigma^2))`` for ``slit1`` or ``slit2``."""
    centers = {"slit1": config.slit_centers[0], "slit2": config.slit_centers[1]}
    if which not in centers:
        raise ValueError(f"which must be 'slit1' or 'slit2', got {which!r}")
    y = screen_grid(config)
    psi = np.exp(-((y - centers[which]) ** 2) / (4 * config.packet_width**2)).astype(np.complex128)
    return psi / np.linalg.norm(psi)


def double_slit_report(config: SlitConfig | None = None) -> list[tuple[str, str, float | bool]]:
    """Rows ``(quantity, variant, value)``; variant is empty for variant-free quantities."""
    config = SlitConfig() if config is None else config
    y = position_operator(config)
    psi1 = build_slit_state(config, "slit1")
    psi2 = build_slit_state(config, "slit2")
    spec = SuperpositionSpec(list(config.amplitudes), [psi1, psi2])
    _, n, unit = assemble(spec)
    both = moments(unit, y)
    m1, m2 = moments(psi1, y), moments(psi2, y)
    rows = [
        ("slit1_mean", "", m1.mean),
        ("slit1_sd", "", m1.sd),
        ("slit2_mean", "", m2.mean),
        ("slit2_sd", "", m2.sd),
        ("overlap", "", float(np.vdot(psi1, psi2).real)),
        ("n", "", n),
        ("both_mean", "", both.mean),
        ("both_sd", "", both.sd),
        ("both_variance", "", both.variance),
        ("scaled_variance", "", n * both.variance),
    ]
    reports = theorem1_bounds_all(spec, y)
    for v in VARIANTS:
        r = reports[v]
        rows += [
            ("b_L", v.value, r.b_L),
            ("B_L", v.value, r.B_L),
            ("B_U", v.value, r.B_U),
            ("lower_satisfied", v.value, r.lower_satisfied),
            ("upper_satisfied", v.value, r.upper_satisfied),
        ]
    return rows
