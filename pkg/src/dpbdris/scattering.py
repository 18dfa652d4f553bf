"""BD-RIS architectures, lossless reciprocal scattering matrices and received power.

An architecture is a partition of the RIS elements into groups of mutually
interconnected elements. Element indices are 0-based here; the JSON export
and the CLI use 1-based indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SYNTH_TOL = 1e-10
POWER_RTOL = 1e-9


@dataclass(frozen=True)
class RisArchitecture:
    n_elements: int
    groups: tuple

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        seen = set()
        for g in groups:
            if not g:
                raise ValueError("empty group in architecture")
            for i in g:
                if not 0 <= i < self.n_elements:
                    raise ValueError(f"element {i} outside 0..{self.n_elements - 1}")
                if i in seen:
                    raise ValueError(f"element {i} appears in more than one group")
                seen.add(i)
        if len(seen) != self.n_elements:
            missing = sorted(set(range(self.n_elements)) - seen)
            raise ValueError(f"elements {missing} are not assigned to any group")

    # -- constructors -----------------------------------------------------

    @classmethod
    def single(cls, n_elements: int) -> "RisArchitecture":
        return cls(n_elements, tuple((i,) for i in range(n_elements)))

    @classmethod
    def fully(cls, n_elements: int) -> "RisArchitecture":
        return cls(n_elements, (tuple(range(n_elements)),))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "RisArchitecture":
        """Build from a group label per element (e.g. a restricted growth string)."""
        order = {}
        for i, lab in enumerate(labels):
            order.setdefault(lab, []).append(i)
        return cls(len(labels), tuple(tuple(g) for g in order.values()))

    @classmethod
    def parse(cls, text: str, n_elements: int) -> "RisArchitecture":
        """Parse ``"1,3;2,4"`` (1-based, groups separated by ``;``).

        Elements not mentioned become singletons.
        """
        groups = []
        for chunk in text.replace(" ", "").strip(";").split(";"):
            if not chunk:
                continue
            try:
                groups.append(tuple(int(tok) - 1 for tok in chunk.split(",") if tok))
            except ValueError:
                raise ValueError(f"malformed group {chunk!r} in partition {text!r}") from None
        if not groups:
            raise ValueError(f"empty partition spec {text!r}")
        used = {i for g in groups for i in g}
        groups.extend((i,) for i in range(n_elements) if i not in used)
        return cls(n_elements, tuple(groups))

    # -- derived quantities ---------------------------------------------

    @property
    def group_sizes(self) -> tuple:
        return tuple(len(g) for g in self.groups)

    @property
    def complexity(self) -> int:
        return complexity(self)

    def labels(self) -> np.ndarray:
        out = np.empty(self.n_elements, dtype=int)
        for k, g in enumerate(self.groups):
            out[list(g)] = k
        return out

    def membership(self) -> np.ndarray:
        """0/1 matrix of shape (N, groups); column k marks the elements of group k."""
        m = np.zeros((self.n_elements, len(self.groups)))
        for k, g in enumerate(self.groups):
            m[list(g), k] = 1.0
        return m

    def merge(self, a: int, b: int) -> "RisArchitecture":
        """Architecture with groups ``a`` and ``b`` joined (placed at position ``min(a, b)``)."""
        if a == b:
            raise ValueError("cannot merge a group with itself")
        a, b = sorted((a, b))
        groups = list(self.groups)
        groups[a] = groups[a] + groups[b]
        del groups[b]
        return RisArchitecture(self.n_elements, tuple(groups))

    def canonical(self) -> tuple:
        """Order-independent key: sorted tuple of sorted groups."""
        return tuple(sorted(tuple(sorted(g)) for g in self.groups))

    def to_json_groups(self) -> list:
        return [[i + 1 for i in g] for g in self.groups]


def complexity(arch: RisArchitecture) -> int:
    """Number of tunable impedance components: sum of N_g (N_g + 1) / 2 over groups."""
    return sum(s * (s + 1) // 2 for s in arch.group_sizes)


# --------------------------------------------------------------------------
# Scattering matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScatteringMatrix:
    entries: np.ndarray
    architecture: RisArchitecture

    @property
    def n_elements(self) -> int:
        return self.entries.shape[0]

    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))

    def unitarity_residual(self) -> float:
        t = self.entries
        return float(np.max(np.abs(t.conj().T @ t - np.eye(t.shape[0]))))

    def block_residual(self) -> float:
        labels = self.architecture.labels()
        outside = labels[:, None] != labels[None, :]
        if not outside.any():
            return 0.0
        return float(np.max(np.abs(self.entries[outside])))

    def residuals(self) -> dict:
        return {
            "symmetry": self.symmetry_residual(),
            "unitarity": self.unitarity_residual(),
            "block": self.block_residual(),
        }

    def is_valid(self, tol: float = SYNTH_TOL) -> bool:
        return all(v <= tol for v in self.residuals().values())

    def to_json_dict(self) -> dict:
        return {
            "n": int(self.n_elements),
            "groups": self.architecture.to_json_groups(),
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ScatteringMatrix":
        n = int(data["n"])
        entries = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if entries.shape != (n, n):
            raise ValueError(f"matrix shape {entries.shape} does not match n={n}")
        groups = tuple(tuple(i - 1 for i in g) for g in data["groups"])
        return cls(entries, RisArchitecture(n, groups))


def _check_channels(h_r, h_t, n=None):
    h_r = np.asarray(h_r, dtype=complex)
    h_t = np.asarray(h_t, dtype=complex)
    if h_r.shape[-1] != h_t.shape[-1]:
        raise ValueError(f"channel lengths differ: {h_r.shape[-1]} vs {h_t.shape[-1]}")
    if n is not None and h_r.shape[-1] != n:
        raise ValueError(f"channels have length {h_r.shape[-1]}, architecture has {n} elements")
    return h_r, h_t


def synth_diagonal(h_r, h_t) -> ScatteringMatrix:
    """Single-connected optimum: per-element phase that cancels arg(h_r[n] h_t[n])."""
    h_r, h_t = _check_channels(h_r, h_t)
    # np.angle(0) == 0, which is the desired convention for zero entries.
    phases = -(np.angle(h_r) + np.angle(h_t))
    n = h_r.shape[0]
    return ScatteringMatrix(np.diag(np.exp(1j * phases)), RisArchitecture.single(n))


def map_symmetric_unitary(a, b, tol: float = 1e-12) -> np.ndarray:
    """Return a symmetric unitary ``Q`` with ``Q @ a = b`` for unit vectors ``a``, ``b``.

    On ``span{a, conj(b)}`` the map sends ``a -> b`` and ``conj(b) -> conj(a)``.
    That span is spanned by the orthogonal pair ``p = a + w conj(b)`` and
    ``m = a - w conj(b)``, with the unit phase ``w`` chosen to make
    ``p^H m = 0``; then ``Q p = w conj(p)`` and ``Q m = -w conj(m)``. The
    complement ``V`` is sent to ``w conj(V)``. Every term has the form
    ``conj(x) x^H``, so ``Q`` is symmetric by construction.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError(f"vector lengths differ: {a.shape} vs {b.shape}")
    if abs(np.linalg.norm(a) - 1.0) > tol or abs(np.linalg.norm(b) - 1.0) > tol:
        raise ValueError("map_symmetric_unitary expects unit-norm vectors")
    m_dim = a.shape[0]

    gamma = np.vdot(a, b.conj())
    w = np.exp(-1j * np.angle(gamma)) if gamma != 0 else 1.0 + 0j
    p = a + w * b.conj()
    m = a - w * b.conj()

    p_hat = p / np.linalg.norm(p)
    basis = [p_hat]
    signs = [1.0]
    # Gram-Schmidt twice keeps m_hat orthogonal to p_hat to machine precision
    # even when m is tiny.
    m = m - p_hat * np.vdot(p_hat, m)
    m = m - p_hat * np.vdot(p_hat, m)
    m_norm = np.linalg.norm(m)
    if m_norm > 1e-14:
        basis.append(m / m_norm)
        signs.append(-1.0)

    q = np.zeros((m_dim, m_dim), dtype=complex)
    for s, x in zip(signs, basis):
        xc = x.conj()
        q += s * np.outer(xc, xc)
    if m_dim > len(basis):
        full, _ = np.linalg.qr(np.column_stack(basis), mode="complete")
        v = full[:, len(basis):]
        q += v.conj() @ v.conj().T
    return w * q


def synth_group_optimal(arch: RisArchitecture, h_r, h_t) -> ScatteringMatrix:
    """Group-connected optimum: each block maps ``h_T,g`` onto the direction of ``conj(h_R,g)``.

    Every group then contributes the real positive term ``|h_R,g| |h_T,g|``.
    Zero-norm sub-channels get an identity block.
    """
    h_r, h_t = _check_channels(h_r, h_t, arch.n_elements)
    n = arch.n_elements
    theta = np.zeros((n, n), dtype=complex)
    for g in arch.groups:
        idx = np.asarray(g)
        hr_g = h_r[idx]
        ht_g = h_t[idx]
        nr = np.linalg.norm(hr_g)
        nt = np.linalg.norm(ht_g)
        if nr == 0.0 or nt == 0.0:
            block = np.eye(len(g), dtype=complex)
        else:
            block = map_symmetric_unitary(ht_g / nt, hr_g.conj() / nr)
        theta[np.ix_(idx, idx)] = block
    return ScatteringMatrix(theta, arch)


def received_power(theta, h_r, h_t, tx_power: float = 1.0) -> float:
    """``P_T |h_r theta h_t|^2``."""
    entries = theta.entries if isinstance(theta, ScatteringMatrix) else np.asarray(theta)
    h_r, h_t = _check_channels(h_r, h_t, entries.shape[0])
    if entries.shape != (h_r.shape[-1], h_r.shape[-1]):
        raise ValueError(f"scattering matrix shape {entries.shape} does not match channels")
    return float(tx_power * abs(h_r @ entries @ h_t) ** 2)


def group_norm_products(arch: RisArchitecture, h_r, h_t) -> np.ndarray:
    """``|h_R,g| |h_T,g|`` per group; leading batch axes of the channels are kept."""
    h_r, h_t = _check_channels(h_r, h_t, arch.n_elements)
    m = arch.membership()
    nr = np.sqrt(np.abs(h_r) ** 2 @ m)
    nt = np.sqrt(np.abs(h_t) ** 2 @ m)
    return nr * nt


def max_power(arch: RisArchitecture, h_r, h_t, tx_power: float = 1.0):
    """Optimal received power ``P_T (sum_g |h_R,g| |h_T,g|)^2`` of a group-connected RIS.

    Accepts batches of shape ``(..., N)`` and returns an array of the batch
    shape; a single channel pair yields a float.
    """
    total = group_norm_products(arch, h_r, h_t).sum(axis=-1)
    out = tx_power * total ** 2
    return float(out) if np.ndim(out) == 0 else out


def opposite_pairing(n_elements: int, perm: Iterable[int] | None = None) -> RisArchitecture:
    """Pair vertical element ``i`` with horizontal element ``N/2 + perm[i]`` (0-based)."""
    half = n_elements // 2
    perm = list(range(half)) if perm is None else list(perm)
    if sorted(perm) != list(range(half)):
        raise ValueError(f"{perm} is not a permutation of 0..{half - 1}")
    return RisArchitecture(n_elements, tuple((i, half + j) for i, j in enumerate(perm)))


def all_pairings(n_elements: int):
    """Every perfect matching of the elements into pairs (any polarizations)."""
    def rec(rest):
        if not rest:
            yield ()
            return
        first, others = rest[0], rest[1:]
        for k, partner in enumerate(others):
            remaining = others[:k] + others[k + 1:]
            for tail in rec(remaining):
                yield ((first, partner),) + tail

    if n_elements % 2:
        raise ValueError("perfect matchings need an even number of elements")
    for groups in rec(tuple(range(n_elements))):
        yield RisArchitecture(n_elements, groups)


def relative_gap(value: float, reference: float) -> float:
    scale = max(abs(reference), abs(value))
    return 0.0 if scale == 0 else abs(value - reference) / scale


__all__ = [
    "RisArchitecture", "ScatteringMatrix", "complexity", "synth_diagonal",
    "map_symmetric_unitary", "synth_group_optimal", "received_power",
    "max_power", "group_norm_products", "opposite_pairing", "all_pairings",
    "relative_gap", "SYNTH_TOL", "POWER_RTOL",
]

