"""Symmetric eigendecomposition with eigenvalue grouping and support queries.

Eigenvalues of an integer Laplacian are either exactly equal or well
separated, so near-equal values (within a relative grouping tolerance) are
merged into one eigenspace whose basis is re-orthonormalized.  On top of the
decomposition sit two queries used throughout the package:

* the subspace of an eigenspace vanishing on a prescribed vertex set, and
* a witness eigenvector whose support is exactly a prescribed set, when one
  exists.

Zero / nonzero decisions on eigenvector entries are tolerance-based; exact
claims are re-checked elsewhere by the rational controllability oracle.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Eigenspace",
    "SpectralDecomposition",
    "Witness",
    "eigen_decompose",
    "vanishing_subspace",
    "exists_support_exactly",
    "GROUP_TOL",
    "ZERO_TOL",
    "RANK_TOL",
]

GROUP_TOL = 1e-8  # relative gap below which eigenvalues share an eigenspace
ZERO_TOL = 1e-8   # entry below ZERO_TOL * max-norm counts as zero
RANK_TOL = 1e-8   # singular values below this count as zero (bases are orthonormal)
RES_TOL = 1e-9    # eigenpair residual bound, relative to max(1, |lambda|)
NEAR_MISS_BAND = (1e-10, 1e-6)  # suspicious gaps between adjacent groups


@dataclass(frozen=True, eq=False)
class Eigenspace:
    """One eigenvalue with an orthonormal basis of its eigenvectors."""

    value: float
    basis: np.ndarray  # n x k, column-orthonormal

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]

    def residual(self, lap: np.ndarray) -> float:
        return float(np.max(np.abs(lap @ self.basis - self.value * self.basis)))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenspaces in increasing eigenvalue order, multiplicities summing to n."""

    spaces: tuple[Eigenspace, ...]
    group_tol: float
    near_miss_gaps: tuple[float, ...] = ()

    @property
    def n(self) -> int:
        return self.spaces[0].basis.shape[0]

    def reconstruct(self) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n))
        for sp in self.spaces:
            out += sp.value * (sp.basis @ sp.basis.T)
        return out


@dataclass(frozen=True, eq=False)
class Witness:
    """An eigenpair certifying a support or controllability claim."""

    value: float
    vector: np.ndarray


def _fingerprint(mat: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(mat).tobytes()).hexdigest()[:16]


def eigen_decompose(lap: np.ndarray, group_tol: float = GROUP_TOL) -> SpectralDecomposition:
    """Eigendecompose a symmetric matrix and group near-equal eigenvalues.

    Values within group_tol * max(1, |value|) of each other join one
    eigenspace.  Gaps between adjacent groups that fall in the suspicious
    band are reported via near_miss_gaps so callers can flag them.
    """
    mat = np.asarray(lap, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if np.max(np.abs(mat - mat.T)) > 0:
        raise ValueError("matrix is not symmetric")
    try:
        vals, vecs = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigensolver failed on matrix {_fingerprint(mat)}: {exc}"
        ) from exc

    groups: list[list[int]] = [[0]]
    for i in range(1, len(vals)):
        if abs(vals[i] - vals[groups[-1][-1]]) <= group_tol * max(1.0, abs(vals[i])):
            groups[-1].append(i)
        else:
            groups.append([i])

    spaces = []
    for idx in groups:
        basis = vecs[:, idx]
        q, _ = np.linalg.qr(basis)  # re-orthonormalize after grouping
        spaces.append(Eigenspace(value=float(np.mean(vals[idx])), basis=q))

    near: list[float] = []
    for a, b in zip(spaces, spaces[1:]):
        gap = abs(b.value - a.value)
        if NEAR_MISS_BAND[0] <= gap <= NEAR_MISS_BAND[1]:
            near.append(gap)

    decomp = SpectralDecomposition(tuple(spaces), group_tol, tuple(near))
    worst = max(sp.residual(mat) / max(1.0, abs(sp.value)) for sp in spaces)
    if worst > RES_TOL:
        raise RuntimeError(
            f"eigenpair residual {worst:.2e} exceeds {RES_TOL} on matrix {_fingerprint(mat)}"
        )
    return decomp


def vanishing_subspace(space: Eigenspace, zero_on) -> np.ndarray:
    """Orthonormal coefficient basis of {c : (U c)_v = 0 for all v in zero_on}.

    Returns a k x d matrix; d = k - rank(rows of U indexed by zero_on).
    Empty zero_on yields the identity.
    """
    k = space.multiplicity
    rows = sorted(set(zero_on))
    if not rows:
        return np.eye(k)
    sub = space.basis[[v - 1 for v in rows], :]
    _, s, vt = np.linalg.svd(sub, full_matrices=True)
    rank = int(np.sum(s > RANK_TOL))
    return vt[rank:].T.copy()


# Deterministic generic-combination weights: powers of 3, then seeded redraws.
_REDRAW_SEED = 0x5EED
_MAX_REDRAWS = 8


def _generic_witness(span: np.ndarray, support_rows: list[int], zero_tol: float) -> np.ndarray:
    """A vector in the column span of `span` nonzero on every support row.

    A finite union of proper subspaces cannot cover the span, so a generic
    combination works; weights are deterministic with bounded seeded redraws.
    """
    d = span.shape[1]
    weight_choices = [np.power(3.0, np.arange(d))]
    rng = random.Random(_REDRAW_SEED)
    for _ in range(_MAX_REDRAWS):
        weight_choices.append(np.array([rng.uniform(-1, 1) for _ in range(d)]))
    for w in weight_choices:
        y = span @ w
        scale = np.max(np.abs(y))
        if scale == 0:
            continue
        if all(abs(y[r]) > zero_tol * scale for r in support_rows):
            return y
    raise RuntimeError("failed to build a generic support witness after seeded redraws")


def exists_support_exactly(
    decomp: SpectralDecomposition, support, zero_tol: float = ZERO_TOL
) -> Witness | None:
    """Witness eigenpair whose support is exactly the given vertex set, or None.

    Per eigenspace: restrict to the subspace vanishing off the support; skip
    if trivial; skip if some support vertex is identically zero across that
    subspace; otherwise a generic combination is nonzero everywhere on the
    support and is returned (normalized to unit max-norm, first support entry
    positive).
    """
    support = sorted(set(support))
    if not support:
        raise ValueError("support set must be nonempty")
    n = decomp.n
    complement = [v for v in range(1, n + 1) if v not in set(support)]
    rows = [v - 1 for v in support]
    for sp in decomp.spaces:
        coeffs = vanishing_subspace(sp, complement)
        if coeffs.shape[1] == 0:
            continue
        span = sp.basis @ coeffs  # n x d, zero off the support
        span_scale = np.max(np.abs(span))
        if span_scale == 0:
            continue
        if any(np.max(np.abs(span[r, :])) <= zero_tol * span_scale for r in rows):
            continue  # that vertex is forced to zero in this eigenspace
        y = _generic_witness(span, rows, zero_tol)
        y = y / np.max(np.abs(y))
        if y[rows[0]] < 0:
            y = -y
        return Witness(value=sp.value, vector=y)
    return None
