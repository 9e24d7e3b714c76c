"""Staged leader-set assembly for lobsters (critical-set algorithm).

The run walks a fixed pipeline: collect twin pairs, collect quad patterns,
check controllability; if short, collect spine-run patterns and check again;
if still short, walk the spine adding fallback vertices (an unloaded vertex
right after a loaded one, in both orientations) with a check after each
addition.  Leaders are chosen either one-per-critical-set ("per-set", the
literal pipeline) or as a minimum hitting set over everything found so far
("hitting-set", the default, which matches the minimal-leader counting).

A run that ends controllable reports status "found"; exhausting the
pipeline without controllability is the normal negative outcome
("cant_find"), not an error.  Found reports are certified by the exact
rational oracle whenever the follower block is small enough.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .control import (
    controllable_certified,
    kalman_controllable_exact,
    minimum_hitting_set,
)
from .graph import AttachmentProfile, Graph, GraphError, attachment_profile, find_spine
from .mpcs import (
    CriticalRecord,
    detect_quads,
    detect_spine_patterns,
    detect_twins,
    graph_decomposition,
)

__all__ = [
    "CsaStep",
    "LeaderReport",
    "run_csa",
    "step6_fallback_vertices",
    "report_to_json",
]

EXACT_CERTIFY_FOLLOWER_CAP = 30


@dataclass(frozen=True, eq=False)
class CsaStep:
    """One entry of the audit log: what was found and what was chosen."""

    step: int
    origin: str  # detector name, "hitting-set", or "fallback"
    subject: tuple[int, ...]  # the critical set, or the fallback vertex
    chosen: tuple[int, ...]  # leaders selected at this entry


@dataclass(frozen=True, eq=False)
class LeaderReport:
    leaders: frozenset[int]
    steps: tuple[CsaStep, ...]
    status: str  # "found" | "cant_find"
    verdict_float: bool
    verdict_exact: bool | None
    mode: str
    seed: int | None
    n: int

    def sorted_leaders(self) -> list[int]:
        return sorted(self.leaders)


def step6_fallback_vertices(g: Graph, spine: list[int], profile: AttachmentProfile) -> list[int]:
    """Spine vertices with no attachments directly after a loaded vertex.

    Both spine orientations are scanned; the union is returned in ascending
    spine position.
    """
    length = len(spine)
    loads = [profile.load(i) for i in range(length)]
    picks = set()
    for i in range(1, length):
        if loads[i - 1] > 0 and loads[i] == 0:
            picks.add(i)
    for i in range(length - 1):
        if loads[i + 1] > 0 and loads[i] == 0:
            picks.add(i)
    return [spine[i] for i in sorted(picks)]


def run_csa(
    g: Graph,
    mode: str = "hitting-set",
    seed: int | None = None,
    enable_step6: bool = True,
    strict_step6: bool = False,
    certify_cap: int = EXACT_CERTIFY_FOLLOWER_CAP,
) -> LeaderReport:
    """Assemble and certify a leader set for a lobster.

    mode "per-set" takes one vertex from every critical set as it is found
    (lowest id, or seeded-uniform when a seed is given); mode "hitting-set"
    re-covers everything found so far with a minimum hitting set before each
    controllability check.  strict_step6 adds all fallback vertices at once
    and checks a single time instead of checking after each addition.
    """
    if mode not in ("per-set", "hitting-set"):
        raise GraphError(f"unknown mode {mode!r}")
    spine = find_spine(g)
    profile = attachment_profile(g, spine)  # rejects non-lobsters
    graph_decomposition(g)  # warm the cache shared by detectors and checks
    rng = random.Random(seed) if seed is not None else None

    steps: list[CsaStep] = []
    catalog: list[CriticalRecord] = []
    leaders: set[int] = set()

    def choose(vertices: frozenset[int]) -> int:
        if rng is None:
            return min(vertices)
        return rng.choice(sorted(vertices))

    def record(step_id: int, found: list[CriticalRecord]) -> None:
        for rec in found:
            catalog.append(rec)
            if mode == "per-set":
                v = choose(rec.vertices)
                leaders.add(v)
                steps.append(CsaStep(step_id, rec.origin, tuple(rec.sorted_vertices()), (v,)))
            else:
                steps.append(CsaStep(step_id, rec.origin, tuple(rec.sorted_vertices()), ()))

    def cover(step_id: int) -> None:
        # Hitting-set mode re-assembles the leader set over the full catalog.
        if mode != "hitting-set" or not catalog:
            return
        hit = minimum_hitting_set([r.vertices for r in catalog], count_optimal=False)
        leaders.clear()
        leaders.update(hit.chosen)
        steps.append(CsaStep(step_id, "hitting-set", (), tuple(sorted(leaders))))

    def controllable_now() -> bool:
        if not leaders:
            return False  # empty leader set counts as uncontrollable
        # borderline float verdicts escalate to the exact oracle internally
        return controllable_certified(g, leaders).controllable

    record(1, detect_twins(g))
    record(2, detect_quads(g, spine, profile))
    cover(3)
    found = controllable_now()
    if not found:
        record(4, detect_spine_patterns(g, spine, profile))
        cover(5)
        found = controllable_now()
    if not found and enable_step6:
        fallback = step6_fallback_vertices(g, spine, profile)
        if strict_step6:
            if fallback:
                leaders.update(fallback)
                steps.append(CsaStep(6, "fallback", tuple(fallback), tuple(fallback)))
                found = controllable_now()
        else:
            for v in fallback:
                leaders.add(v)
                steps.append(CsaStep(6, "fallback", (v,), (v,)))
                if controllable_now():
                    found = True
                    break

    verdict_exact = None
    if found and g.n - len(leaders) <= certify_cap:
        verdict_exact = kalman_controllable_exact(g, leaders).controllable
        if verdict_exact != found:
            raise RuntimeError(
                "float and exact controllability verdicts disagree on a found leader set"
            )
    return LeaderReport(
        leaders=frozenset(leaders),
        steps=tuple(steps),
        status="found" if found else "cant_find",
        verdict_float=found,
        verdict_exact=verdict_exact,
        mode=mode,
        seed=seed,
        n=g.n,
    )


def report_to_json(report: LeaderReport) -> str:
    """Full report including the step log, for scripted audits."""
    return json.dumps(
        {
            "status": report.status,
            "leaders": report.sorted_leaders(),
            "mode": report.mode,
            "seed": report.seed,
            "n": report.n,
            "verdict_float": report.verdict_float,
            "verdict_exact": report.verdict_exact,
            "steps": [
                {
                    "step": s.step,
                    "origin": s.origin,
                    "subject": list(s.subject),
                    "chosen": list(s.chosen),
                }
                for s in report.steps
            ],
        },
        indent=2,
    )
