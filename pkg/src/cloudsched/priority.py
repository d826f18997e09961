"""Priority algebra: start slack, demand weight, technical and business scores,
threshold-gated resultant score, rank conversion, chain ordering, feasibility."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .domain import (
    BusinessProfile,
    Job,
    PriorityRecord,
    ResourceDemand,
    SimConfig,
)


class EmptyWindowError(ValueError):
    """Raised when priority normalization is asked for an empty job window."""


@dataclass(frozen=True)
class PriorityEngineConfig:
    """Tuning knobs for the priority engine.

    beta is the score threshold above which the business boost applies;
    w_urgency and w_demand blend start-time urgency against resource demand;
    order_norm and relationship_norm scale order amount and relationship score
    into the boost, which is capped at business_cap.
    """

    beta: float = 60.0
    w_urgency: float = 0.7
    w_demand: float = 0.3
    order_norm: float = 0.01
    relationship_norm: float = 0.0
    business_cap: float = 10.0
    blank_time: float = 0.0

    def __post_init__(self):
        if self.w_urgency < 0 or self.w_demand < 0:
            raise ValueError("weights must be >= 0")
        if not math.isclose(self.w_urgency + self.w_demand, 1.0, rel_tol=1e-9):
            raise ValueError("w_urgency + w_demand must equal 1")
        if not (0.0 <= self.beta <= 100.0):
            raise ValueError("beta must be in [0,100]")
        if self.business_cap < 0:
            raise ValueError("business_cap must be >= 0")
        if self.blank_time < 0:
            raise ValueError("blank_time must be >= 0")

    @classmethod
    def from_sim(cls, cfg: SimConfig) -> "PriorityEngineConfig":
        return cls(beta=cfg.beta, w_urgency=cfg.w_urgency, w_demand=cfg.w_demand,
                   order_norm=cfg.order_norm, relationship_norm=cfg.relationship_norm,
                   business_cap=cfg.business_cap, blank_time=cfg.blank_time)


@dataclass(frozen=True)
class WindowStats:
    """Normalization statistics over the jobs of one classification window."""

    count: int
    t_start_min: float
    t_start_max: float
    demand_weight_max: float

    @classmethod
    def from_jobs(cls, jobs, blank_time: float = 0.0) -> "WindowStats":
        if not jobs:
            raise EmptyWindowError("window must contain at least one job")
        starts = [compute_start_time(j, blank_time) for j in jobs]
        weights = [demand_weight(j.demand) for j in jobs]
        return cls(count=len(jobs), t_start_min=min(starts), t_start_max=max(starts),
                   demand_weight_max=max(weights))


def compute_start_time(job: Job, blank_time: float = 0.0) -> float:
    """Latest start offset that still meets the due time, relative to arrival.

    Due time minus execution, preparation, and blank (resource-wait) time.
    Negative means the job is already late at arrival.
    """
    return job.due_time - job.exec_time - job.prep_time - blank_time


def demand_weight(d: ResourceDemand) -> float:
    """Aggregate resource demand: processors + memory + storage."""
    return d.processors + d.memory + d.storage


def technical_priority(job: Job, window: WindowStats, cfg: PriorityEngineConfig) -> int:
    """Score a job 0..100 from start-time urgency and resource demand.

    Urgency is 1 for the earliest start slack in the window and 0 for the
    latest (1 when the window has no spread); demand is normalized against the
    window's maximum. The weighted blend is scaled to 100 and rounded.
    """
    if window.count < 1:
        raise EmptyWindowError("window must contain at least one job")
    t_start = compute_start_time(job, cfg.blank_time)
    spread = window.t_start_max - window.t_start_min
    if spread > 0:
        u = (window.t_start_max - t_start) / spread
    else:
        u = 1.0
    u = min(max(u, 0.0), 1.0)
    if window.demand_weight_max > 0:
        v = demand_weight(job.demand) / window.demand_weight_max
    else:
        v = 1.0
    v = min(max(v, 0.0), 1.0)
    score = round(100.0 * (cfg.w_urgency * u + cfg.w_demand * v))
    return int(min(max(score, 0), 100))


def business_priority(b: BusinessProfile, cfg: PriorityEngineConfig) -> float:
    """Business boost: scaled order amount plus scaled relationship, capped."""
    raw = cfg.order_norm * b.order_amount + cfg.relationship_norm * b.relationship
    return min(max(raw, 0.0), cfg.business_cap)


def resultant_priority(tp: float, bp: float, cfg: PriorityEngineConfig) -> float:
    """Combine technical score and business boost.

    Above the beta threshold the boost is added (capped at 100); at or below
    it the job keeps its native technical score.
    """
    if tp > cfg.beta:
        return min(tp + bp, 100.0)
    return float(tp)


def service_level_satisfaction(score: float) -> float:
    """Service level satisfaction of a priority score (numerically the score itself)."""
    if not (0.0 <= score <= 100.0):
        raise ValueError("score must be in [0,100]")
    return float(score)


def score_to_rank(score: float) -> int:
    """Map a 0..100 score (higher better) onto the 1..100 rank scale (1 best)."""
    if not (0.0 <= score <= 100.0):
        raise ValueError("score must be in [0,100]")
    return int(min(max(round(101 - score), 1), 100))


def chain_compare(a: tuple[int, int], b: tuple[int, int]) -> int:
    """Order two (class, position) chain keys lexicographically.

    Returns -1 when a goes first, 1 when b goes first, 0 when equal. A smaller
    class index always wins; within a class the smaller position wins.
    """
    if a[0] < 1 or a[1] < 1 or b[0] < 1 or b[1] < 1:
        raise ValueError("chain components must be >= 1")
    if a == b:
        return 0
    return -1 if a < b else 1


def tolerance_check(job: Job, slack_factor: float = 0.9,
                    include_due_term: bool = False) -> str:
    """Classify how much of the due time the job's required work consumes.

    Tolerance is exec + prep time (optionally also counting the due time as a
    delivery-time term, which makes every job infeasible by construction and
    exists only for comparison). Returns "feasible" when tolerance fits within
    slack_factor of the due time, "tight" when it fits only without slack,
    "infeasible" otherwise.
    """
    if not (0.0 < slack_factor <= 1.0):
        raise ValueError("slack_factor must be in (0,1]")
    tolerance = job.exec_time + job.prep_time
    if include_due_term:
        tolerance += job.due_time
    if tolerance <= slack_factor * job.due_time:
        return "feasible"
    if tolerance <= job.due_time:
        return "tight"
    return "infeasible"


def build_record(job: Job, window: WindowStats, cfg: PriorityEngineConfig,
                 apply_business: bool = True) -> PriorityRecord:
    """Compute the full priority record for a job against its window.

    With apply_business False the resultant equals the native technical score;
    the business boost is still computed and recorded for reporting. The chain
    key is left unassigned until classification.
    """
    tp = technical_priority(job, window, cfg)
    bp = business_priority(job.business, cfg)
    if apply_business:
        resultant = resultant_priority(tp, bp, cfg)
    else:
        resultant = float(tp)
    return PriorityRecord(
        t_start=compute_start_time(job, cfg.blank_time),
        demand_weight=demand_weight(job.demand),
        tp_score=tp,
        bp_score=bp,
        resultant=resultant,
        rank=score_to_rank(resultant),
        chain=None,
    )
