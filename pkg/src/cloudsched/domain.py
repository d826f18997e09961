"""Core data types shared by the scheduling library: jobs, demands, catalog, configs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ResourceDemand:
    """Resource request of one job: processor count, memory (GB), storage (GB)."""

    processors: int
    memory: float
    storage: float

    def to_dict(self) -> dict:
        return {"processors": self.processors, "memory": self.memory, "storage": self.storage}

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceDemand":
        return cls(processors=int(d["processors"]), memory=float(d["memory"]),
                   storage=float(d["storage"]))


@dataclass(frozen=True)
class BusinessProfile:
    """Commercial attributes of a job: current order amount and customer relationship score."""

    order_amount: float
    relationship: float

    def to_dict(self) -> dict:
        return {"order_amount": self.order_amount, "relationship": self.relationship}

    @classmethod
    def from_dict(cls, d: dict) -> "BusinessProfile":
        return cls(order_amount=float(d["order_amount"]), relationship=float(d["relationship"]))


@dataclass(frozen=True)
class Job:
    """One submitted task with timing, resource, and business attributes.

    Times are seconds on the simulation clock; due/exec/prep are relative to
    the job's arrival. Jobs are plain containers: construction never raises,
    use validate_job to check invariants.
    """

    id: int | str
    arrival_time: float
    due_time: float
    exec_time: float
    prep_time: float
    demand: ResourceDemand
    business: BusinessProfile

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "arrival_time": self.arrival_time,
            "due_time": self.due_time,
            "exec_time": self.exec_time,
            "prep_time": self.prep_time,
            "demand": self.demand.to_dict(),
            "business": self.business.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Job":
        return cls(
            id=d["id"],
            arrival_time=float(d["arrival_time"]),
            due_time=float(d["due_time"]),
            exec_time=float(d["exec_time"]),
            prep_time=float(d["prep_time"]),
            demand=ResourceDemand.from_dict(d["demand"]),
            business=BusinessProfile.from_dict(d["business"]),
        )


OK = "ok"
INFEASIBLE = "infeasible"
INVALID = "invalid"


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of validate_job: ok, infeasible (cannot meet its due time), or invalid."""

    status: str
    reason: str | None = None


def validate_job(job: Job) -> ValidationResult:
    """Check a job's invariants.

    Returns invalid with a reason when any field constraint fails, infeasible
    when the required work cannot fit before the due time, ok otherwise.
    Infeasible jobs are still admissible; they simply miss their deadline.
    """
    if job.due_time <= 0:
        return ValidationResult(INVALID, "due_time must be > 0")
    if job.exec_time <= 0:
        return ValidationResult(INVALID, "exec_time must be > 0")
    if job.prep_time < 0:
        return ValidationResult(INVALID, "prep_time must be >= 0")
    if job.demand.processors < 1:
        return ValidationResult(INVALID, "processors must be >= 1")
    if job.demand.memory <= 0:
        return ValidationResult(INVALID, "memory must be > 0")
    if job.demand.storage < 0:
        return ValidationResult(INVALID, "storage must be >= 0")
    if job.business.order_amount < 0:
        return ValidationResult(INVALID, "order_amount must be >= 0")
    if job.business.relationship < 0:
        return ValidationResult(INVALID, "relationship must be >= 0")
    if job.exec_time + job.prep_time > job.due_time:
        return ValidationResult(INFEASIBLE, "exec_time + prep_time exceeds due_time")
    return ValidationResult(OK)


@dataclass(frozen=True)
class ResourceCatalogEntry:
    """One instance type: name, cores, compute units, RAM (GB), arch bits, disk (GB), $/hour."""

    name: str
    cores: int
    ecus: float
    ram: float
    arch_bits: int
    disk: float
    cost: float

    def __post_init__(self):
        if self.cores <= 0 or self.ecus <= 0 or self.ram <= 0 or self.disk <= 0 or self.cost <= 0:
            raise ValueError(f"catalog entry {self.name!r}: all numeric fields must be > 0")
        if self.arch_bits not in (32, 64):
            raise ValueError(f"catalog entry {self.name!r}: arch_bits must be 32 or 64")

    def fits(self, demand: ResourceDemand) -> bool:
        """Whether this instance satisfies a resource demand."""
        return (self.cores >= demand.processors
                and self.ram >= demand.memory
                and self.disk >= demand.storage)

    def to_dict(self) -> dict:
        return {
            "name": self.name, "cores": self.cores, "ecus": self.ecus, "ram": self.ram,
            "arch_bits": self.arch_bits, "disk": self.disk, "cost": self.cost,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResourceCatalogEntry":
        return cls(name=str(d["name"]), cores=int(d["cores"]), ecus=float(d["ecus"]),
                   ram=float(d["ram"]), arch_bits=int(d["arch_bits"]), disk=float(d["disk"]),
                   cost=float(d["cost"]))


def default_catalog() -> tuple[ResourceCatalogEntry, ...]:
    """Default instance catalog: five classic EC2 shapes."""
    return (
        ResourceCatalogEntry("m1.small", 1, 1, 1.7, 32, 160, 0.1),
        ResourceCatalogEntry("m1.large", 2, 4, 7.5, 64, 850, 0.4),
        ResourceCatalogEntry("m1.xlarge", 4, 8, 15.0, 64, 1690, 0.8),
        ResourceCatalogEntry("c1.medium", 2, 5, 1.7, 32, 350, 0.2),
        ResourceCatalogEntry("c1.xlarge", 8, 20, 7.0, 64, 1690, 0.8),
    )


@dataclass(frozen=True)
class PriorityRecord:
    """All derived priority quantities for one job.

    Scores are on a 0..100 scale where higher is better; rank is the inverse
    1..100 scale where 1 is best. chain is the (class index, within-class
    position) key assigned by the classification gate, None until assigned.
    """

    t_start: float
    demand_weight: float
    tp_score: int
    bp_score: float
    resultant: float
    rank: int
    chain: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "t_start": self.t_start,
            "demand_weight": self.demand_weight,
            "tp_score": self.tp_score,
            "bp_score": self.bp_score,
            "resultant": self.resultant,
            "rank": self.rank,
            "chain": list(self.chain) if self.chain is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PriorityRecord":
        chain = d.get("chain")
        return cls(
            t_start=float(d["t_start"]),
            demand_weight=float(d["demand_weight"]),
            tp_score=int(d["tp_score"]),
            bp_score=float(d["bp_score"]),
            resultant=float(d["resultant"]),
            rank=int(d["rank"]),
            chain=(int(chain[0]), int(chain[1])) if chain is not None else None,
        )


# Default allocation bands: probability of resource allocation per rank decade.
# The first six bands are the standard curve; the last four continue the
# -0.1 per decade pattern so the whole 1..100 rank scale is covered.
DEFAULT_ALLOCATION_BANDS: tuple[tuple[int, int, float], ...] = (
    (1, 10, 1.0),
    (11, 20, 1.0),
    (21, 30, 0.9),
    (31, 40, 0.9),
    (41, 50, 0.8),
    (51, 60, 0.7),
    (61, 70, 0.6),
    (71, 80, 0.5),
    (81, 90, 0.4),
    (91, 100, 0.3),
)


def _check_bands(bands) -> None:
    if not bands:
        raise ValueError("allocation_bands must be non-empty")
    ordered = sorted(bands, key=lambda b: b[0])
    if ordered[0][0] != 1 or ordered[-1][1] != 100:
        raise ValueError("allocation_bands must cover ranks 1..100")
    prev_hi = 0
    prev_p = None
    for lo, hi, p in ordered:
        if lo != prev_hi + 1:
            raise ValueError(f"allocation_bands must not overlap or leave gaps (at rank {lo})")
        if hi < lo:
            raise ValueError(f"allocation band ({lo},{hi}) is empty")
        if not (0.0 < p <= 1.0):
            raise ValueError(f"allocation probability {p} not in (0, 1]")
        if prev_p is not None and p > prev_p:
            raise ValueError("allocation probabilities must be non-increasing with rank")
        prev_hi, prev_p = hi, p


def _default_class_rates() -> tuple[float, ...]:
    return tuple(1.0 / 6 for _ in range(6))


@dataclass(frozen=True)
class SimConfig:
    """Full simulation configuration with sensible defaults.

    Defaults describe the reference scenario: 2000 tasks on 2500 VMs, fixed
    task timing (due 700 s, exec 650 s, prep 5 s), Poisson arrivals at 1 job/s
    split evenly over six priority classes, threshold 60, business boost
    capped at 10.
    """

    num_tasks: int = 2000
    num_vms: int = 2500
    arrival_rate: float = 1.0
    class_rates: tuple[float, ...] = field(default_factory=_default_class_rates)
    beta: float = 60.0
    blank_time: float = 0.0
    w_urgency: float = 0.7
    w_demand: float = 0.3
    order_norm: float = 0.01
    relationship_norm: float = 0.0
    business_cap: float = 10.0
    seed: int = 1
    catalog: tuple[ResourceCatalogEntry, ...] = field(default_factory=default_catalog)
    allocation_bands: tuple[tuple[int, int, float], ...] = DEFAULT_ALLOCATION_BANDS
    retry_interval: float = 1.0
    due_time: float = 700.0
    exec_time: float = 650.0
    prep_time: float = 5.0
    epoch_length: float = 60.0
    mu_base: float = 1.0
    max_retries: int = 1_000_000
    max_queue_length: int = 1_000_000

    def __post_init__(self):
        if self.num_tasks < 1:
            raise ValueError("num_tasks must be >= 1")
        if self.num_vms < 1:
            raise ValueError("num_vms must be >= 1")
        if self.arrival_rate <= 0:
            raise ValueError("arrival_rate must be > 0")
        if not self.class_rates or any(r <= 0 for r in self.class_rates):
            raise ValueError("class_rates must be a non-empty list of positive rates")
        total = math.fsum(self.class_rates)
        if not math.isclose(total, self.arrival_rate, rel_tol=1e-9):
            raise ValueError(
                f"class_rates must sum to arrival_rate: sum is {total!r}, "
                f"arrival_rate is {self.arrival_rate!r}")
        if not (0.0 <= self.beta <= 100.0):
            raise ValueError("beta must be in [0,100]")
        if self.blank_time < 0:
            raise ValueError("blank_time must be >= 0")
        if self.w_urgency < 0 or self.w_demand < 0:
            raise ValueError("priority weights must be >= 0")
        if not math.isclose(self.w_urgency + self.w_demand, 1.0, rel_tol=1e-9):
            raise ValueError("w_urgency + w_demand must equal 1")
        if self.business_cap < 0:
            raise ValueError("business_cap must be >= 0")
        if not self.catalog:
            raise ValueError("catalog must be non-empty")
        _check_bands(self.allocation_bands)
        if self.retry_interval <= 0:
            raise ValueError("retry_interval must be > 0")
        if self.epoch_length <= 0:
            raise ValueError("epoch_length must be > 0")
        if self.mu_base <= 0:
            raise ValueError("mu_base must be > 0")

    def to_dict(self) -> dict:
        return {
            "num_tasks": self.num_tasks,
            "num_vms": self.num_vms,
            "arrival_rate": self.arrival_rate,
            "class_rates": list(self.class_rates),
            "beta": self.beta,
            "blank_time": self.blank_time,
            "w_urgency": self.w_urgency,
            "w_demand": self.w_demand,
            "order_norm": self.order_norm,
            "relationship_norm": self.relationship_norm,
            "business_cap": self.business_cap,
            "seed": self.seed,
            "catalog": [c.to_dict() for c in self.catalog],
            "allocation_bands": [list(b) for b in self.allocation_bands],
            "retry_interval": self.retry_interval,
            "due_time": self.due_time,
            "exec_time": self.exec_time,
            "prep_time": self.prep_time,
            "epoch_length": self.epoch_length,
            "mu_base": self.mu_base,
            "max_retries": self.max_retries,
            "max_queue_length": self.max_queue_length,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        return cls(
            num_tasks=int(d["num_tasks"]),
            num_vms=int(d["num_vms"]),
            arrival_rate=float(d["arrival_rate"]),
            class_rates=tuple(float(r) for r in d["class_rates"]),
            beta=float(d["beta"]),
            blank_time=float(d["blank_time"]),
            w_urgency=float(d["w_urgency"]),
            w_demand=float(d["w_demand"]),
            order_norm=float(d["order_norm"]),
            relationship_norm=float(d["relationship_norm"]),
            business_cap=float(d["business_cap"]),
            seed=int(d["seed"]),
            catalog=tuple(ResourceCatalogEntry.from_dict(c) for c in d["catalog"]),
            allocation_bands=tuple((int(b[0]), int(b[1]), float(b[2]))
                                   for b in d["allocation_bands"]),
            retry_interval=float(d["retry_interval"]),
            due_time=float(d["due_time"]),
            exec_time=float(d["exec_time"]),
            prep_time=float(d["prep_time"]),
            epoch_length=float(d["epoch_length"]),
            mu_base=float(d["mu_base"]),
            max_retries=int(d["max_retries"]),
            max_queue_length=int(d["max_queue_length"]),
        )
