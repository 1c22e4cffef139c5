"""Seeded random states, observables and superposition specs.

Every random object is drawn from its own stream. A stream is keyed by
``derive_seed(master, index)``: the first 8 bytes (little endian) of the
BLAKE2b digest of ``master || index``, both encoded as unsigned 64-bit little
endian integers. The key drives numpy's ``Philox`` (4x64, 10 rounds) counter
based bit generator; raw 64-bit words are turned into normals by Box-Muller
with 53-bit uniforms. Both the hash and the Philox stream are stable across
platforms and numpy releases, so any trial can be replayed from
``(master_seed, index)`` alone.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .config import TOL
from .errors import DegenerateSuperposition, GenerationFailure, InvalidSpec
from .bounds import SuperpositionSpec, assemble
from .linalg import validate_hermitian

COEFFICIENT_SCHEMES = ("real_positive", "complex_haar")
OPERATOR_SCHEMES = ("gue", "real_symmetric", "diagonal")
COMPONENT_SCHEMES = ("haar", "basis")

_MASK64 = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def derive_seed(master: int, stream_index: int) -> int:
    """64-bit key for stream ``stream_index`` under ``master``."""
    master, stream_index = int(master), int(stream_index)
    if not (0 <= master <= _MASK64 and 0 <= stream_index <= _MASK64):
        raise ValueError(f"seed inputs must be unsigned 64-bit, got ({master}, {stream_index})")
    msg = master.to_bytes(8, "little") + stream_index.to_bytes(8, "little")
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


class Stream:
    """One independent random stream (Philox keyed by a 64-bit seed)."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._bits = np.random.Philox(key=self.seed)

    @classmethod
    def for_index(cls, master: int, index: int) -> "Stream":
        return cls(derive_seed(master, index))

    def raw(self, size: int) -> np.ndarray:
        return self._bits.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        """Uniforms on [0, 1) with 53 random bits."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * _INV53

    def normal(self, size: int) -> np.ndarray:
        """Standard normals via Box-Muller; each pair of words yields two variates."""
        pairs = (size + 1) // 2
        words = self.raw(2 * pairs) >> np.uint64(11)
        u1 = (words[0::2].astype(np.float64) + 1.0) * _INV53  # (0, 1]
        u2 = words[1::2].astype(np.float64) * _INV53
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * math.pi * u2)
        out[1::2] = r * np.sin(2.0 * math.pi * u2)
        return out[:size]

    def complex_normal(self, size: int) -> np.ndarray:
        """Standard complex normals, ``E|z|^2 = 1``."""
        z = self.normal(2 * size)
        return (z[0::2] + 1j * z[1::2]) / math.sqrt(2.0)

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.uniform(n), kind="stable")


@dataclass(frozen=True)
class EnsembleConfig:
    dim: int = 4
    n_components: int = 2
    master_seed: int = 0
    coefficient_scheme: str = "complex_haar"
    operator_scheme: str = "gue"
    component_scheme: str = "haar"

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidSpec(f"dim must be >= 2, got {self.dim}")
        if self.n_components < 2:
            raise InvalidSpec(f"n_components must be >= 2, got {self.n_components}")
        if not 0 <= self.master_seed <= _MASK64:
            raise InvalidSpec("master_seed must be an unsigned 64-bit integer")
        if self.coefficient_scheme not in COEFFICIENT_SCHEMES:
            raise InvalidSpec(f"unknown coefficient scheme {self.coefficient_scheme!r}")
        if self.operator_scheme not in OPERATOR_SCHEMES:
            raise InvalidSpec(f"unknown operator scheme {self.operator_scheme!r}")
        if self.component_scheme not in COMPONENT_SCHEMES:
            raise InvalidSpec(f"unknown component scheme {self.component_scheme!r}")
        if self.component_scheme == "basis" and self.n_components > self.dim:
            raise InvalidSpec("basis components need n_components <= dim")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidSpec(f"unknown EnsembleConfig fields {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "EnsembleConfig":
        return cls.from_dict(json.loads(text))


def random_state(dim: int, rng: Stream) -> np.ndarray:
    """Haar-random unit vector from ``2 * dim`` normals."""
    z = rng.normal(2 * dim)
    v = z[0::2] + 1j * z[1::2]
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng: Stream, scheme: str = "gue") -> np.ndarray:
    if scheme == "gue":
        m = rng.complex_normal(dim * dim).reshape(dim, dim)
        h = (m + m.conj().T) / 2
    elif scheme == "real_symmetric":
        r = rng.normal(dim * dim).reshape(dim, dim)
        h = ((r + r.T) / 2).astype(np.complex128)
    elif scheme == "diagonal":
        h = np.diag(rng.normal(dim)).astype(np.complex128)
    else:
        raise InvalidSpec(f"unknown operator scheme {scheme!r}")
    return validate_hermitian(h)


def random_coefficients(n: int, rng: Stream, scheme: str) -> np.ndarray:
    if scheme == "real_positive":
        c = np.abs(rng.normal(n)).astype(np.complex128)
    elif scheme == "complex_haar":
        c = rng.complex_normal(n)
    else:
        raise InvalidSpec(f"unknown coefficient scheme {scheme!r}")
    return c / np.linalg.norm(c)


def draw_parts(config: EnsembleConfig, rng: Stream) -> tuple[np.ndarray, np.ndarray]:
    """Raw ``(coefficients, components)`` for one candidate spec."""
    if config.component_scheme == "basis":
        picks = rng.permutation(config.dim)[: config.n_components]
        comps = np.eye(config.dim, dtype=np.complex128)[picks]
    else:
        z = rng.normal(2 * config.dim * config.n_components).reshape(config.n_components, config.dim, 2)
        comps = z[..., 0] + 1j * z[..., 1]
        comps /= np.linalg.norm(comps, axis=1, keepdims=True)
    return random_coefficients(config.n_components, rng, config.coefficient_scheme), comps


def random_spec(config: EnsembleConfig, rng: Stream,
                draw: Callable[[EnsembleConfig, Stream], tuple] = draw_parts) -> SuperpositionSpec:
    """Random spec whose assembled norm^2 is at least 1e-6.

    Near-cancelling draws are redrawn from the same stream, at most
    ``TOL.generation_max_attempts`` times.
    """
    for _ in range(TOL.generation_max_attempts):
        coeffs, comps = draw(config, rng)
        spec = SuperpositionSpec(coeffs, comps)
        try:
            _, n, _ = assemble(spec)
        except DegenerateSuperposition:
            continue
        if n >= TOL.generation_min_norm:
            return spec
    raise GenerationFailure(f"no admissible spec after {TOL.generation_max_attempts} attempts")


def random_density_matrix(dim: int, rng: Stream, rank: int | None = None) -> np.ndarray:
    """Random mixed state ``G G^dagger / Tr`` with ``G`` a ``dim x rank`` Ginibre matrix."""
    rank = dim if rank is None else rank
    g = rng.complex_normal(dim * rank).reshape(dim, rank)
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return (rho + rho.conj().T) / 2


def random_unitary(dim: int, rng: Stream) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with the phase fix on R's diagonal."""
    z = rng.complex_normal(dim * dim).reshape(dim, dim)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))
