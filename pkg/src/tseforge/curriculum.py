"""Similarity annotation, stage partitioning, and synthetic-ratio batch
scheduling for curriculum training runs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .corpus import Manifest
from .errors import EmptyStage, MissingEmbedding, UnknownPool
from .features import cosine_similarity
from .rng import SeededRng

DEFAULT_BUDGETS = (0.4, 0.4, 0.2)


@dataclass
class AnnotatedItem:
    id: str
    target_speaker: str
    interference_speaker: str
    sim: float


@dataclass
class AnnotatedManifest:
    items: list[AnnotatedItem]

    def __len__(self) -> int:
        return len(self.items)


def annotate_similarity(manifest: Manifest, embeddings: dict) -> AnnotatedManifest:
    """Attach target-vs-interference speaker cosine similarity to each entry."""
    items = []
    for entry in manifest.entries:
        for spk in (entry.target_speaker, entry.interference_speaker):
            if spk not in embeddings:
                raise MissingEmbedding(f"no embedding for speaker {spk}")
        sim = cosine_similarity(
            embeddings[entry.target_speaker], embeddings[entry.interference_speaker]
        )
        items.append(
            AnnotatedItem(entry.id, entry.target_speaker, entry.interference_speaker, sim)
        )
    return AnnotatedManifest(items)


@dataclass
class Stage:
    name: str
    item_ids: list[str]
    synthetic_pool_ids: list[str] = field(default_factory=list)
    synth_ratio: float = 0.0
    step_budget: int = 1

    def __post_init__(self):
        if not 0.0 <= self.synth_ratio <= 1.0:
            raise ValueError("synth_ratio must lie in [0, 1]")
        if not self.synthetic_pool_ids and self.synth_ratio != 0.0:
            raise ValueError("synth_ratio must be 0 without synthetic pools")
        if self.step_budget < 1:
            raise ValueError("step_budget must be positive")


@dataclass
class CurriculumPlan:
    stages: list[Stage]
    pools: dict[str, list[str]] = field(default_factory=dict)
    threshold: float = 0.5
    stage1_fraction: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "threshold": self.threshold,
                "stage1_fraction": self.stage1_fraction,
                "pools": self.pools,
                "stages": [
                    {
                        "name": s.name,
                        "item_ids": s.item_ids,
                        "synthetic_pool_ids": s.synthetic_pool_ids,
                        "synth_ratio": s.synth_ratio,
                        "step_budget": s.step_budget,
                    }
                    for s in self.stages
                ],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "CurriculumPlan":
        doc = json.loads(text)
        stages = [
            Stage(
                name=s["name"],
                item_ids=list(s["item_ids"]),
                synthetic_pool_ids=list(s["synthetic_pool_ids"]),
                synth_ratio=float(s["synth_ratio"]),
                step_budget=int(s["step_budget"]),
            )
            for s in doc["stages"]
        ]
        return cls(
            stages=stages,
            pools={k: list(v) for k, v in doc["pools"].items()},
            threshold=float(doc["threshold"]),
            stage1_fraction=float(doc["stage1_fraction"]),
        )


def _split_budget(total_steps: int, fractions: tuple) -> list[int]:
    budgets = [max(1, int(round(total_steps * f))) for f in fractions[:-1]]
    budgets.append(max(1, total_steps - sum(budgets)))
    return budgets


def partition_stages(
    am: AnnotatedManifest,
    threshold: float = 0.5,
    synth_pools: dict | None = None,
    synth_ratio: float = 0.5,
    total_steps: int = 100,
    budget_fractions: tuple = DEFAULT_BUDGETS,
) -> CurriculumPlan:
    """Three-stage plan: low-similarity items, everything, everything plus
    synthetic pools at synth_ratio."""
    if not -1.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (-1, 1), got {threshold}")
    if len(am) == 0:
        raise EmptyStage("annotated manifest is empty")
    easy = [it.id for it in am.items if it.sim < threshold]
    if not easy:
        raise EmptyStage(f"no items with similarity below {threshold}")
    all_ids = [it.id for it in am.items]
    pools = {k: list(v) for k, v in (synth_pools or {}).items()}
    pool_ids = sorted(pools)
    budgets = _split_budget(total_steps, budget_fractions)
    stages = [
        Stage("stage1", easy, [], 0.0, budgets[0]),
        Stage("stage2", list(all_ids), [], 0.0, budgets[1]),
        Stage(
            "stage3",
            list(all_ids),
            pool_ids,
            synth_ratio if pool_ids else 0.0,
            budgets[2],
        ),
    ]
    return CurriculumPlan(
        stages=stages,
        pools=pools,
        threshold=threshold,
        stage1_fraction=len(easy) / len(all_ids),
    )


def stage4_alternation(plan: CurriculumPlan, pool_sequence: list) -> CurriculumPlan:
    """Append one stage per pool set, reusing stage-3 real items and ratio.

    Each element of pool_sequence is a pool id or a collection of pool ids
    (a union). Supports single-pool, combined, and alternating schedules.
    """
    if len(plan.stages) < 3:
        raise ValueError("alternation requires a plan with at least 3 stages")
    if not pool_sequence:
        raise ValueError("pool_sequence must not be empty")
    base = plan.stages[2]
    ratio = base.synth_ratio if base.synth_ratio > 0 else 0.5
    stages = list(plan.stages)
    for i, pools in enumerate(pool_sequence):
        ids = [pools] if isinstance(pools, str) else list(pools)
        for pid in ids:
            if pid not in plan.pools:
                raise UnknownPool(f"pool {pid!r} not defined by the plan")
        stages.append(
            Stage(
                name=f"stage{len(stages) + 1}",
                item_ids=list(base.item_ids),
                synthetic_pool_ids=ids,
                synth_ratio=ratio,
                step_budget=base.step_budget,
            )
        )
    return CurriculumPlan(
        stages=stages,
        pools=plan.pools,
        threshold=plan.threshold,
        stage1_fraction=plan.stage1_fraction,
    )


@dataclass
class Batch:
    stage: str
    step: int
    real_ids: list[str]
    synthetic_ids: list[str]


class _Sampler:
    """Uniform without replacement per pass; reshuffles when exhausted."""

    def __init__(self, ids: list[str], rng: SeededRng):
        self.ids = ids
        self.rng = rng
        self.queue: list[str] = []

    def draw(self, n: int) -> list[str]:
        out: list[str] = []
        while len(out) < n:
            if not self.queue:
                order = self.rng.permutation(len(self.ids))
                self.queue = [self.ids[int(i)] for i in order]
            out.append(self.queue.pop())
        return out


def schedule_batches(plan: CurriculumPlan, batch_size: int, rng: SeededRng):
    """Yield batches stage by stage for each stage's step budget.

    Synthetic-enabled stages put exactly round(synth_ratio * batch_size)
    synthetic items in every batch (half rounds up), the rest real.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    for stage in plan.stages:
        n_synth = int(math.floor(stage.synth_ratio * batch_size + 0.5))
        synth_ids: list[str] = []
        for pid in stage.synthetic_pool_ids:
            if pid not in plan.pools:
                raise UnknownPool(f"pool {pid!r} not defined by the plan")
            synth_ids.extend(plan.pools[pid])
        if n_synth > 0 and not synth_ids:
            raise EmptyStage(f"{stage.name}: synth_ratio > 0 but pools are empty")
        real = _Sampler(stage.item_ids, rng)
        synth = _Sampler(synth_ids, rng) if synth_ids else None
        allowed = set(stage.item_ids)
        for step in range(stage.step_budget):
            real_ids = real.draw(batch_size - n_synth)
            assert all(i in allowed for i in real_ids)
            yield Batch(
                stage=stage.name,
                step=step,
                real_ids=real_ids,
                synthetic_ids=synth.draw(n_synth) if (synth and n_synth) else [],
            )
