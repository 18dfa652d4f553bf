"""Dual-polarized cascaded channels for a single-antenna Tx -> RIS -> Rx link.

The RIS has ``N`` elements; the first ``N/2`` are vertically polarized and the
last ``N/2`` horizontally polarized. Each hop is a uni-polarized fading vector
weighted elementwise by a polarization profile whose entries are 1 (matched
polarization) or ``sqrt(chi)`` (cross-polarized), ``chi`` being the inverse XPD.

Vectors are stored as 1-D numpy arrays; ``h_r`` plays the role of the row
vector and ``h_t`` of the column vector, so the scalar channel through a
scattering matrix ``theta`` is ``h_r @ theta @ h_t``. Batched samplers return
arrays of shape ``(trials, N)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

import numpy as np

# Trials are grouped into fixed-size blocks, each drawn from its own substream
# keyed by (seed, block index). The block size is part of the RNG contract:
# changing it changes every Monte Carlo result.
TRIAL_BLOCK = 4096


class Polarization(enum.Enum):
    VERTICAL = "V"
    HORIZONTAL = "H"

    def opposite(self) -> "Polarization":
        if self is Polarization.VERTICAL:
            return Polarization.HORIZONTAL
        return Polarization.VERTICAL

    @classmethod
    def parse(cls, value: Union[str, "Polarization"]) -> "Polarization":
        if isinstance(value, Polarization):
            return value
        key = str(value).strip().lower()
        if key in ("v", "vertical"):
            return cls.VERTICAL
        if key in ("h", "horizontal"):
            return cls.HORIZONTAL
        raise ValueError(f"unknown polarization {value!r}")


class Side(enum.Enum):
    RECEIVER = "receiver"
    TRANSMITTER = "transmitter"


# --------------------------------------------------------------------------
# Fading descriptors
# --------------------------------------------------------------------------

def _phase_array(phases, n_elements):
    if phases is None:
        return None
    arr = np.asarray(phases, dtype=float)
    if arr.shape != (n_elements,):
        raise ValueError(f"expected {n_elements} phases, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Rayleigh:
    """i.i.d. CN(0, 1) entries on both hops."""


@dataclass(frozen=True)
class LoS:
    """Unit-modulus entries.

    ``phases_r`` / ``phases_t`` fix the per-element phases (radians); when left
    as ``None`` the phases are drawn i.i.d. uniform on [0, 2*pi) per trial.
    """

    phases_r: Optional[Sequence[float]] = None
    phases_t: Optional[Sequence[float]] = None


@dataclass(frozen=True)
class Rician:
    """Per-element mixture ``sqrt(K/(K+1)) * LoS + sqrt(1/(K+1)) * Rayleigh``.

    The same K-factor applies to both hops.
    """

    k: float
    phases_r: Optional[Sequence[float]] = None
    phases_t: Optional[Sequence[float]] = None

    def __post_init__(self):
        if not (self.k >= 0.0) or math.isnan(self.k):
            raise ValueError(f"Rician factor must be nonnegative, got {self.k}")


FadingKind = Union[Rayleigh, LoS, Rician]


def parse_fading(name: str) -> FadingKind:
    """Parse ``rayleigh``, ``los`` or ``rician:K``."""
    key = name.strip().lower()
    if key == "rayleigh":
        return Rayleigh()
    if key == "los":
        return LoS()
    if key.startswith("rician"):
        _, _, k = key.partition(":")
        if not k:
            raise ValueError("Rician fading needs a factor, e.g. 'rician:2'")
        return Rician(float(k))
    raise ValueError(f"unknown fading kind {name!r}")


# --------------------------------------------------------------------------
# Configuration and realizations
# --------------------------------------------------------------------------

def check_n_elements(n_elements: int) -> None:
    if isinstance(n_elements, bool) or int(n_elements) != n_elements or n_elements < 2:
        raise ValueError(f"number of elements must be an integer >= 2, got {n_elements}")
    if n_elements % 2:
        raise ValueError(f"number of elements must be even, got {n_elements}")


def check_chi(chi: float) -> None:
    if not (0.0 <= chi <= 1.0):
        raise ValueError(f"chi must lie in [0, 1], got {chi}")


@dataclass(frozen=True)
class SystemConfig:
    n_elements: int
    chi: float
    tx_pol: Polarization = Polarization.VERTICAL
    rx_pol: Polarization = Polarization.VERTICAL
    fading: FadingKind = field(default_factory=Rayleigh)
    tx_power: float = 1.0

    def __post_init__(self):
        check_n_elements(self.n_elements)
        check_chi(self.chi)
        if not self.tx_power > 0:
            raise ValueError(f"transmit power must be positive, got {self.tx_power}")
        object.__setattr__(self, "tx_pol", Polarization.parse(self.tx_pol))
        object.__setattr__(self, "rx_pol", Polarization.parse(self.rx_pol))


@dataclass(frozen=True)
class ChannelRealization:
    h_tilde_r: np.ndarray
    h_tilde_t: np.ndarray
    p_r: np.ndarray
    p_t: np.ndarray
    h_r: np.ndarray
    h_t: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.h_r.shape[-1]

    def to_json_dict(self) -> dict:
        def cplx(v):
            return {"re": np.real(v).tolist(), "im": np.imag(v).tolist()}

        return {
            "n": int(self.n_elements),
            "h_tilde_r": cplx(self.h_tilde_r),
            "h_tilde_t": cplx(self.h_tilde_t),
            "p_r": self.p_r.tolist(),
            "p_t": self.p_t.tolist(),
            "h_r": cplx(self.h_r),
            "h_t": cplx(self.h_t),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChannelRealization":
        def cplx(d):
            return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)

        return cls(
            h_tilde_r=cplx(data["h_tilde_r"]),
            h_tilde_t=cplx(data["h_tilde_t"]),
            p_r=np.asarray(data["p_r"], dtype=float),
            p_t=np.asarray(data["p_t"], dtype=float),
            h_r=cplx(data["h_r"]),
            h_t=cplx(data["h_t"]),
        )


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def element_polarization(index: int, n_elements: int) -> Polarization:
    """Polarization of RIS element ``index`` (1-based, as in the element numbering)."""
    check_n_elements(n_elements)
    if not 1 <= index <= n_elements:
        raise IndexError(f"element index {index} outside 1..{n_elements}")
    return Polarization.VERTICAL if index <= n_elements // 2 else Polarization.HORIZONTAL


def polarization_profile(side, pol, chi: float, n_elements: int) -> np.ndarray:
    """Amplitude weights (1 or sqrt(chi)) seen by a link antenna of polarization ``pol``.

    ``side`` only fixes the row/column role and does not change the values.
    """
    Side(side)
    pol = Polarization.parse(pol)
    check_chi(chi)
    check_n_elements(n_elements)
    half = n_elements // 2
    cross = math.sqrt(chi)
    if pol is Polarization.VERTICAL:
        pattern = [1.0, cross]
    else:
        pattern = [cross, 1.0]
    return np.kron(np.asarray(pattern), np.ones(half))


def _rayleigh(rng: np.random.Generator, shape) -> np.ndarray:
    g = rng.standard_normal((2, *shape))
    return (g[0] + 1j * g[1]) * math.sqrt(0.5)


def _los(rng: np.random.Generator, shape, phases) -> np.ndarray:
    if phases is None:
        phases = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    else:
        phases = np.broadcast_to(phases, shape)
    return np.exp(1j * phases)


def sample_fading(kind: FadingKind, n_elements: int, rng: np.random.Generator,
                  size: Optional[int] = None):
    """Draw ``(h_tilde_r, h_tilde_t)``.

    With ``size=None`` each is a length-``N`` vector; otherwise both have shape
    ``(size, N)``. The two hops are drawn independently from ``rng``.
    """
    if n_elements < 2:
        raise ValueError(f"need at least two elements, got {n_elements}")
    shape = (n_elements,) if size is None else (size, n_elements)

    if isinstance(kind, Rayleigh):
        return _rayleigh(rng, shape), _rayleigh(rng, shape)
    if isinstance(kind, LoS):
        ph_r = _phase_array(kind.phases_r, n_elements)
        ph_t = _phase_array(kind.phases_t, n_elements)
        return _los(rng, shape, ph_r), _los(rng, shape, ph_t)
    if isinstance(kind, Rician):
        if kind.k < 0:
            raise ValueError(f"Rician factor must be nonnegative, got {kind.k}")
        los_w = math.sqrt(kind.k / (kind.k + 1.0))
        nlos_w = math.sqrt(1.0 / (kind.k + 1.0))
        out = []
        for phases in (kind.phases_r, kind.phases_t):
            ph = _phase_array(phases, n_elements)
            out.append(los_w * _los(rng, shape, ph) + nlos_w * _rayleigh(rng, shape))
        return out[0], out[1]
    raise TypeError(f"unsupported fading kind {kind!r}")


def compose(config: SystemConfig, fading) -> ChannelRealization:
    """Apply the polarization profiles of ``config`` to uni-polarized fading.

    Works on single vectors and on ``(trials, N)`` batches alike.
    """
    h_tilde_r, h_tilde_t = (np.asarray(v) for v in fading)
    n = config.n_elements
    if h_tilde_r.shape[-1] != n or h_tilde_t.shape[-1] != n:
        raise ValueError(
            f"fading vectors of length {h_tilde_r.shape[-1]}/{h_tilde_t.shape[-1]} "
            f"do not match N={n}")
    p_r = polarization_profile(Side.RECEIVER, config.rx_pol, config.chi, n)
    p_t = polarization_profile(Side.TRANSMITTER, config.tx_pol, config.chi, n)
    return ChannelRealization(
        h_tilde_r=h_tilde_r,
        h_tilde_t=h_tilde_t,
        p_r=p_r,
        p_t=p_t,
        h_r=p_r * h_tilde_r,
        h_t=p_t * h_tilde_t,
    )


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent random stream for trial block ``block`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))


def trial_blocks(trials: int, block_size: int = TRIAL_BLOCK) -> Iterator[tuple]:
    """Yield ``(block_index, start, stop)`` covering ``range(trials)``."""
    for b, start in enumerate(range(0, trials, block_size)):
        yield b, start, min(start + block_size, trials)


def sample_realizations(config: SystemConfig, trials: int, seed: int,
                        block: int) -> ChannelRealization:
    """Batched realizations for one trial block of the master ``seed``."""
    start = block * TRIAL_BLOCK
    stop = min(start + TRIAL_BLOCK, trials)
    if not 0 <= start < trials:
        raise IndexError(f"block {block} is outside {trials} trials")
    rng = block_rng(seed, block)
    return compose(config, sample_fading(config.fading, config.n_elements, rng, size=stop - start))
