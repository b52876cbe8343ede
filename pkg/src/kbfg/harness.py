"""Experiment harness: how much do generated features help a learner?

For every (dataset, method, learner) cell the harness runs seeded
stratified cross-validation with identical fold assignments across methods,
so per-fold accuracies pair up.  Feature generation runs inside each
training fold by default; the held-out fold neither contributes values nor
labels to generation, which is what makes the accuracy delta an honest
estimate of the generated features' utility.  A ``dataset`` generation
scope (generate once on the full dataset, reuse in every fold) exists for
comparison but leaks test data into generation.

Methods: ``baseline`` (no generation), ``expand`` (one relational
expansion pass), ``recursive_d1`` / ``recursive_d2`` (recursive induction
at depth 1 / 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

from kbfg.data import Dataset
from kbfg.expand import expand_features
from kbfg.features import BaseFeature, Feature
from kbfg.kb import KnowledgeBase
from kbfg.learners import LEARNER_KINDS, TrainConfig, cross_validate
from kbfg.recursive import GenerationConfig, generate_features
from kbfg.stats import FriedmanResult, TTestResult, friedman_test, paired_t_test

METHODS = ("baseline", "expand", "recursive_d1", "recursive_d2")


@dataclass
class HarnessConfig:
    methods: Sequence[str] = METHODS
    learners: Sequence[str] = LEARNER_KINDS
    folds: int = 10
    seed: int = 0
    generation_scope: str = "fold"            # "fold" | "dataset"
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        for l in self.learners:
            if l not in LEARNER_KINDS:
                raise ValueError(f"unknown learner {l!r}")
        if self.generation_scope not in ("fold", "dataset"):
            raise ValueError("generation_scope must be 'fold' or 'dataset'")


@dataclass
class Cell:
    fold_accuracies: List[float]
    mean: float
    t_vs_baseline: Optional[TTestResult] = None

    def to_json(self) -> dict:
        return {
            "fold_accuracies": self.fold_accuracies,
            "mean": self.mean,
            "t_vs_baseline": self.t_vs_baseline.to_json() if self.t_vs_baseline else None,
        }


@dataclass
class ExperimentResult:
    cells: Dict[str, Dict[str, Dict[str, Cell]]]   # dataset -> learner -> method -> cell
    methods: List[str]
    learners: List[str]
    friedman: Dict[str, FriedmanResult] = field(default_factory=dict)  # per learner

    def cell(self, dataset: str, learner: str, method: str) -> Cell:
        return self.cells[dataset][learner][method]

    def to_json(self) -> dict:
        return {
            "methods": self.methods,
            "learners": self.learners,
            "cells": {d: {l: {m: c.to_json() for m, c in ms.items()}
                          for l, ms in ls.items()}
                      for d, ls in self.cells.items()},
            "friedman": {l: r.to_json() for l, r in self.friedman.items()},
        }

    def to_text(self) -> str:
        """Per-dataset table: learners as rows, methods as columns.

        ``+`` marks p < 0.05 against the baseline, ``*`` marks p < 0.001.
        """
        lines = []
        width = max(12, max(len(m) for m in self.methods) + 3)
        for dataset in self.cells:
            lines.append(f"dataset: {dataset}")
            header = f"{'learner':<8}" + "".join(f"{m:>{width}}" for m in self.methods)
            lines.append(header)
            lines.append("-" * len(header))
            for learner in self.learners:
                row = [f"{learner:<8}"]
                for method in self.methods:
                    c = self.cells[dataset][learner][method]
                    mark = ""
                    if c.t_vs_baseline is not None:
                        if 0.001 in c.t_vs_baseline.significant_at:
                            mark = "*"
                        elif 0.05 in c.t_vs_baseline.significant_at:
                            mark = "+"
                    row.append(f"{c.mean:.3f}{mark:<1}".rjust(width))
                lines.append("".join(row))
            lines.append("")
        for learner, fr in self.friedman.items():
            sig = ", ".join(f"p<{a}" for a in sorted(fr.significant_at)) or "n.s."
            lines.append(f"friedman[{learner}]: chi2={fr.statistic:.4f} ({sig})")
        return "\n".join(lines)


def base_features(ds: Dataset) -> List[Feature]:
    return [BaseFeature(name) for name in ds.feature_names]


def method_generator(method: str, cfg: HarnessConfig, kb: KnowledgeBase,
                     features: Sequence[Feature]) -> Optional[Callable[[Dataset], List[Feature]]]:
    """The per-training-set feature generator a method stands for."""
    gen = cfg.generation
    if method == "baseline":
        return None
    if method == "expand":
        return lambda train_ds: expand_features(
            train_ds, features, kb, gen.aggregator_family, gen.coverage_threshold)
    if method in ("recursive_d1", "recursive_d2"):
        d = 1 if method == "recursive_d1" else 2
        return lambda train_ds: generate_features(train_ds, features, kb,
                                                  replace(gen, depth=d))
    raise ValueError(f"unknown method {method!r}")


def run_experiment(datasets: Dict[str, Dataset], kb: KnowledgeBase,
                   cfg: Optional[HarnessConfig] = None) -> ExperimentResult:
    """Cross-validated accuracies for every (dataset, learner, method) cell."""
    cfg = cfg or HarnessConfig()
    cells: Dict[str, Dict[str, Dict[str, Cell]]] = {}
    for name, ds in datasets.items():
        if len(set(ds.labels)) < 2:
            raise ValueError(f"dataset {name!r} has a single class")
        feats = base_features(ds)
        cells[name] = {}
        for learner in cfg.learners:
            per_method: Dict[str, Cell] = {}
            for method in cfg.methods:
                generator = method_generator(method, cfg, kb, feats)
                if generator is not None and cfg.generation_scope == "dataset":
                    pre = generator(ds)  # leaks held-out folds into generation
                    generator = lambda _train, _pre=pre: _pre
                accs = cross_validate(ds, feats, kb, learner, cfg.folds, cfg.seed,
                                      cfg.train, generator)
                per_method[method] = Cell(accs, sum(accs) / len(accs))
            baseline = per_method.get("baseline")
            if baseline is not None:
                for method, cell in per_method.items():
                    if method != "baseline":
                        cell.t_vs_baseline = paired_t_test(cell.fold_accuracies,
                                                           baseline.fold_accuracies)
            cells[name][learner] = per_method
    result = ExperimentResult(cells, list(cfg.methods), list(cfg.learners))
    if len(datasets) >= 2 and len(cfg.methods) >= 2:
        for learner in cfg.learners:
            matrix = [[cells[d][learner][m].mean for m in cfg.methods] for d in cells]
            result.friedman[learner] = friedman_test(matrix)
    return result


def maa(ds: Dataset, kb: KnowledgeBase, folds: int = 10, seed: int = 0,
        train_cfg: Optional[TrainConfig] = None) -> float:
    """Maximal cross-validated baseline accuracy over the three learners.

    A proxy for task difficulty: low values mean no learner does well on
    the original features alone.
    """
    feats = base_features(ds)
    best = 0.0
    for learner in LEARNER_KINDS:
        accs = cross_validate(ds, feats, kb, learner, folds, seed, train_cfg)
        best = max(best, sum(accs) / len(accs))
    return best
