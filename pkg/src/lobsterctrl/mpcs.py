"""Critical vertex sets of Laplacian eigenvectors.

A vertex set is *critical* (CS) when some Laplacian eigenvector is supported
inside it, *perfect critical* (PCS) when some eigenvector is supported on
exactly it, and a *minimum perfect critical set* (MPCS) when additionally no
proper subset is a PCS.  Every leader set must intersect every MPCS, so the
MPCS catalog of a graph is the combinatorial core of minimal leader
selection.

The module provides the predicates, a complete brute-force catalog for small
graphs (ground truth), and three structural detectors for lobsters: twin
pairs, quads made of two pendant 2-paths at a common vertex, and spine-run
patterns of size 8, 12, 16, ... whose eigenvalues are the roots of
(x - 1)(x - 2) = 1.  Detectors generate candidates; the spectral verifier is
the authority on what gets emitted.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import AttachmentProfile, Graph, GraphError, laplacian
from .spectral import (
    RANK_TOL,
    ZERO_TOL,
    Eigenspace,
    SpectralDecomposition,
    Witness,
    eigen_decompose,
    exists_support_exactly,
    vanishing_subspace,
    _generic_witness,
)

__all__ = [
    "CriticalRecord",
    "MpcsCatalog",
    "QUAD_EIGENVALUE",
    "SPINE_EIGENVALUES",
    "graph_decomposition",
    "is_critical",
    "is_perfect_critical",
    "is_mpcs",
    "enumerate_pcs_bruteforce",
    "enumerate_mpcs_bruteforce",
    "detect_twins",
    "detect_quads",
    "detect_spine_patterns",
    "verify_mpcs",
    "catalog_to_json",
]

BRUTEFORCE_N_CAP = 16
EXPECTED_LAMBDA_TOL = 1e-8

# Eigenvalue of the quad pattern (two pendant 2-paths at one vertex) and the
# two roots of (x - 1)(x - 2) = 1 carried by the spine-run patterns.
QUAD_EIGENVALUE = (3.0 - math.sqrt(5.0)) / 2.0
SPINE_EIGENVALUES = ((3.0 - math.sqrt(5.0)) / 2.0, (3.0 + math.sqrt(5.0)) / 2.0)


@dataclass(frozen=True, eq=False)
class CriticalRecord:
    """A vertex set tagged CS/PCS/MPCS with its witness eigenpair."""

    vertices: frozenset[int]
    kind: str  # "CS" | "PCS" | "MPCS"
    origin: str  # "twin" | "quad" | "spine8" | "spine4n" | "brute-force"
    witness: Witness | None
    verified_exact: bool = False

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)


@dataclass(frozen=True, eq=False)
class MpcsCatalog:
    records: tuple[CriticalRecord, ...]
    complete: bool  # True only for brute-force enumeration at small n

    def vertex_sets(self) -> set[frozenset[int]]:
        return {r.vertices for r in self.records}


@lru_cache(maxsize=32)
def graph_decomposition(g: Graph) -> SpectralDecomposition:
    # Cache owned by this caller; the spectral module itself stays pure.
    return eigen_decompose(laplacian(g))


def _support_of(vec: np.ndarray, zero_tol: float = ZERO_TOL) -> frozenset[int]:
    scale = np.max(np.abs(vec))
    return frozenset(int(i) + 1 for i in np.nonzero(np.abs(vec) > zero_tol * scale)[0])


def is_critical(g: Graph, vertices, decomp: SpectralDecomposition | None = None) -> Witness | None:
    """Witness eigenvector supported inside the given set, or None."""
    s = frozenset(vertices)
    if not s:
        raise GraphError("critical-set query needs a nonempty vertex set")
    decomp = decomp or graph_decomposition(g)
    complement = [v for v in range(1, g.n + 1) if v not in s]
    for sp in decomp.spaces:
        coeffs = vanishing_subspace(sp, complement)
        if coeffs.shape[1] > 0:
            vec = sp.basis @ coeffs[:, 0]
            vec = vec / np.max(np.abs(vec))
            return Witness(value=sp.value, vector=vec)
    return None


def is_perfect_critical(
    g: Graph, vertices, decomp: SpectralDecomposition | None = None
) -> Witness | None:
    """Witness eigenvector supported on exactly the given set, or None."""
    s = frozenset(vertices)
    if not s:
        raise GraphError("critical-set query needs a nonempty vertex set")
    decomp = decomp or graph_decomposition(g)
    return exists_support_exactly(decomp, s)


def _mpcs_analysis(
    g: Graph, s: frozenset[int], decomp: SpectralDecomposition
) -> tuple[bool, list[Witness]]:
    """Decide MPCS-ness and collect the per-eigenspace witnesses.

    The set is an MPCS iff every eigenspace's inside-S subspace is at most
    one-dimensional with no zero entry on S, and at least one such subspace
    exists.  (A 2-dimensional subspace always contains a vector vanishing at
    any chosen vertex of S, and a vector with a zero on S has a proper subset
    of S as its support; either way some proper subset is a PCS.)
    """
    complement = [v for v in range(1, g.n + 1) if v not in s]
    rows = [v - 1 for v in sorted(s)]
    witnesses: list[Witness] = []
    for sp in decomp.spaces:
        coeffs = vanishing_subspace(sp, complement)
        d = coeffs.shape[1]
        if d == 0:
            continue
        if d >= 2:
            return False, []
        vec = sp.basis @ coeffs[:, 0]
        scale = np.max(np.abs(vec))
        if any(abs(vec[r]) <= ZERO_TOL * scale for r in rows):
            return False, []
        vec = vec / scale
        if vec[rows[0]] < 0:
            vec = -vec
        witnesses.append(Witness(value=sp.value, vector=vec))
    return bool(witnesses), witnesses


def is_mpcs(
    g: Graph, vertices, decomp: SpectralDecomposition | None = None
) -> tuple[bool, Witness | None]:
    """Whether the set is a minimum perfect critical set, plus a witness."""
    s = frozenset(vertices)
    if not s:
        raise GraphError("critical-set query needs a nonempty vertex set")
    decomp = decomp or graph_decomposition(g)
    ok, witnesses = _mpcs_analysis(g, s, decomp)
    return ok, (witnesses[0] if ok else None)


# ---------------------------------------------------------------------------
# Brute-force enumeration of eigenvector supports
# ---------------------------------------------------------------------------


def _achievable_supports(space: Eigenspace, zero_tol: float = ZERO_TOL) -> dict[frozenset[int], np.ndarray]:
    """All supports of eigenvectors in one eigenspace, with generic vectors.

    Every zero pattern of a vector in a k-dimensional space is the common
    zero set of a generic vector in the annihilator of at most k-1 basis
    rows, so enumerating row subsets of size < k covers every achievable
    support.
    """
    basis = space.basis
    n, k = basis.shape
    out: dict[frozenset[int], np.ndarray] = {}
    for size in range(0, k):
        for combo in itertools.combinations(range(n), size):
            if size == 0:
                null = np.eye(k)
            else:
                _, sv, vt = np.linalg.svd(basis[list(combo), :], full_matrices=True)
                rank = int(np.sum(sv > RANK_TOL))
                if rank == k:
                    continue
                null = vt[rank:].T
            span = basis @ null
            scale = np.max(np.abs(span))
            if scale == 0:
                continue
            row_max = np.max(np.abs(span), axis=1)
            support = frozenset(int(i) + 1 for i in np.nonzero(row_max > zero_tol * scale)[0])
            if not support or support in out:
                continue
            vec = _generic_witness(span, [v - 1 for v in sorted(support)], zero_tol)
            vec = vec / np.max(np.abs(vec))
            if vec[min(support) - 1] < 0:
                vec = -vec
            out[support] = vec
    return out


def enumerate_pcs_bruteforce(g: Graph, n_cap: int = BRUTEFORCE_N_CAP) -> list[CriticalRecord]:
    """Every perfect critical set of the graph (exact eigenvector supports)."""
    if g.n > n_cap:
        raise GraphError(f"brute-force enumeration capped at n={n_cap}")
    decomp = graph_decomposition(g)
    found: dict[frozenset[int], Witness] = {}
    for sp in decomp.spaces:
        for support, vec in _achievable_supports(sp).items():
            if support not in found:
                found[support] = Witness(value=sp.value, vector=vec)
    records = [
        CriticalRecord(vertices=s, kind="PCS", origin="brute-force", witness=w, verified_exact=True)
        for s, w in found.items()
    ]
    records.sort(key=lambda r: (len(r.vertices), r.sorted_vertices()))
    return records


@lru_cache(maxsize=32)
def enumerate_mpcs_bruteforce(g: Graph, n_cap: int = BRUTEFORCE_N_CAP) -> MpcsCatalog:
    """The complete MPCS catalog of a small graph.

    Minimal eigenvector supports: enumerate all achievable supports per
    eigenspace, then keep the inclusion-minimal ones across eigenspaces.
    """
    pcs = enumerate_pcs_bruteforce(g, n_cap)
    minimal: list[CriticalRecord] = []
    for rec in pcs:  # already sorted by size
        if any(kept.vertices < rec.vertices for kept in minimal):
            continue
        minimal.append(
            CriticalRecord(
                vertices=rec.vertices,
                kind="MPCS",
                origin="brute-force",
                witness=rec.witness,
                verified_exact=True,
            )
        )
    return MpcsCatalog(records=tuple(minimal), complete=True)


# ---------------------------------------------------------------------------
# Structural detectors
# ---------------------------------------------------------------------------


def detect_twins(g: Graph) -> list[CriticalRecord]:
    """All pairs whose outside vertices see both or neither member.

    Such pairs are always 2-MPCSs; the witness is the difference of the two
    indicator vectors with eigenvalue deg(u), plus one when the pair is
    adjacent.  This is exact, no verification needed.
    """
    masks = {
        v: sum(1 << (w - 1) for w in g.adjacency[v]) for v in range(1, g.n + 1)
    }
    records = []
    for u in range(1, g.n + 1):
        for w in range(u + 1, g.n + 1):
            outside = ~((1 << (u - 1)) | (1 << (w - 1)))
            if (masks[u] ^ masks[w]) & outside:
                continue
            adjacent = bool(masks[u] >> (w - 1) & 1)
            lam = g.degree(u) + (1 if adjacent else 0)
            vec = np.zeros(g.n)
            vec[u - 1], vec[w - 1] = 1.0, -1.0
            records.append(
                CriticalRecord(
                    vertices=frozenset((u, w)),
                    kind="MPCS",
                    origin="twin",
                    witness=Witness(value=float(lam), vector=vec),
                )
            )
    return records


def _pendant_two_paths(g: Graph, v: int) -> list[tuple[int, int]]:
    """(inner, tip) pairs of pendant 2-paths hanging off v (spine or not)."""
    pairs = []
    for inner in g.adjacency[v]:
        if g.degree(inner) != 2:
            continue
        tip = next(w for w in g.adjacency[inner] if w != v)
        if g.degree(tip) == 1:
            pairs.append((inner, tip))
    return pairs


def detect_quads(
    g: Graph, spine: list[int] | None = None, profile: AttachmentProfile | None = None
) -> list[CriticalRecord]:
    """Four-vertex MPCS candidates from pairs of pendant 2-paths.

    Every vertex carrying at least two pendant 2-paths contributes one
    candidate per unordered pair of paths; this covers 2-paths embedded in
    the spine itself (the 5-path realizes one around its center).  Each
    candidate is verified before emission.
    """
    decomp = graph_decomposition(g)
    records = []
    seen: set[frozenset[int]] = set()
    for v in range(1, g.n + 1):
        paths = _pendant_two_paths(g, v)
        if len(paths) < 2:
            continue
        for (a1, b1), (a2, b2) in itertools.combinations(paths, 2):
            s = frozenset((a1, b1, a2, b2))
            if s in seen:
                continue
            seen.add(s)
            ok, record = verify_mpcs(
                g, s, expected_value=QUAD_EIGENVALUE, origin="quad", decomp=decomp
            )
            if ok:
                records.append(record)
    records.sort(key=lambda r: r.sorted_vertices())
    return records


def _flank_two_paths(
    g: Graph, spine: list[int], profile: AttachmentProfile, pos: int
) -> list[tuple[int, int]]:
    """2-paths usable as a flank anchor at spine position pos.

    Besides proper off-spine attachments, a bare spine end segment two
    positions away acts as an attached 2-path of the third vertex from that
    end.
    """
    paths = list(profile.two_paths[pos])
    if pos == 2 and g.degree(spine[1]) == 2 and g.degree(spine[0]) == 1:
        paths.append((spine[1], spine[0]))
    last = len(spine) - 1
    if pos == last - 2 and g.degree(spine[last - 1]) == 2 and g.degree(spine[last]) == 1:
        paths.append((spine[last - 1], spine[last]))
    return paths


def detect_spine_patterns(
    g: Graph, spine: list[int], profile: AttachmentProfile
) -> list[CriticalRecord]:
    """Spine-run MPCS candidates of size 8, 12, 16, ...

    Layout per candidate: a flank spine vertex outside the set contributing
    an attached 2-path, then one or more adjacent spine pairs inside the set
    (each pair vertex carrying exactly one pendant, also inside), pairs
    separated by single excluded spine vertices, closed by a mirror flank
    with its own 2-path.  Both spine orientations are scanned and every
    candidate must verify with an eigenvalue among the two roots of
    (x - 1)(x - 2) = 1.
    """
    decomp = graph_decomposition(g)
    records: list[CriticalRecord] = []
    seen: set[frozenset[int]] = set()

    def interior_ok(pro: AttachmentProfile, pos: int) -> bool:
        return pro.p1[pos] == 1 and pro.p2[pos] == 0 and len(pro.s1[pos]) == 1

    def scan(sp: list[int], pro: AttachmentProfile) -> None:
        length = len(sp)
        for left in range(length):
            left_paths = _flank_two_paths(g, sp, pro, left)
            if not left_paths:
                continue
            m = 1
            while left + 3 * m < length:
                right = left + 3 * m
                pair_positions = [
                    (left + 3 * t + 1, left + 3 * t + 2) for t in range(m)
                ]
                if not all(
                    interior_ok(pro, a) and interior_ok(pro, b)
                    for a, b in pair_positions
                ):
                    break  # longer runs reuse these interior slots
                right_paths = _flank_two_paths(g, sp, pro, right)
                if right_paths:
                    core = set()
                    for a, b in pair_positions:
                        core.update((sp[a], pro.s1[a][0], sp[b], pro.s1[b][0]))
                    for lp, rp in itertools.product(left_paths, right_paths):
                        s = frozenset(core | set(lp) | set(rp))
                        if len(s) != 4 * (m + 1) or s in seen:
                            continue
                        seen.add(s)
                        ok, record = verify_mpcs(
                            g,
                            s,
                            expected_value=SPINE_EIGENVALUES,
                            origin="spine8" if m == 1 else "spine4n",
                            decomp=decomp,
                        )
                        if ok:
                            records.append(record)
                m += 1

    scan(list(spine), profile)
    reversed_spine = list(reversed(spine))
    reversed_profile = AttachmentProfile(
        spine=tuple(reversed_spine),
        p1=tuple(reversed(profile.p1)),
        p2=tuple(reversed(profile.p2)),
        s1=tuple(reversed(profile.s1)),
        s2=tuple(reversed(profile.s2)),
        two_paths=tuple(reversed(profile.two_paths)),
    )
    scan(reversed_spine, reversed_profile)
    records.sort(key=lambda r: (len(r.vertices), r.sorted_vertices()))
    return records


def verify_mpcs(
    g: Graph,
    vertices,
    expected_value=None,
    origin: str = "brute-force",
    decomp: SpectralDecomposition | None = None,
) -> tuple[bool, CriticalRecord | None]:
    """Certify a candidate MPCS and build its record.

    When expected_value (a number or an iterable of numbers) is given, the
    witness eigenvalue must match one of them within 1e-8.  On graphs small
    enough for full enumeration the record is additionally marked
    verified_exact when the brute-force catalog confirms membership.
    """
    s = frozenset(vertices)
    if not s:
        raise GraphError("critical-set query needs a nonempty vertex set")
    decomp = decomp or graph_decomposition(g)
    ok, witnesses = _mpcs_analysis(g, s, decomp)
    if not ok:
        return False, None
    witness = witnesses[0]
    if expected_value is not None:
        targets = (
            (float(expected_value),)
            if isinstance(expected_value, (int, float))
            else tuple(float(x) for x in expected_value)
        )
        matching = [
            w
            for w in witnesses
            if any(abs(w.value - t) <= EXPECTED_LAMBDA_TOL for t in targets)
        ]
        if not matching:
            return False, None
        witness = matching[0]
    verified = False
    if g.n <= BRUTEFORCE_N_CAP:
        verified = s in enumerate_mpcs_bruteforce(g).vertex_sets()
    record = CriticalRecord(
        vertices=s, kind="MPCS", origin=origin, witness=witness, verified_exact=verified
    )
    return True, record


def catalog_to_json(records) -> str:
    """Serialize critical records to the catalog JSON shape."""
    items = [
        {
            "vertices": rec.sorted_vertices(),
            "kind": rec.kind,
            "origin": rec.origin,
            "lambda": rec.witness.value if rec.witness else None,
        }
        for rec in records
    ]
    return json.dumps(items, indent=2)
