"""
NashOverlap - Detector
End-to-end pipeline: tie-strengths, k coordination games, intermediate
partition, community-closeness refinement. Phase 1 is computed once and can
be refined at several alpha values.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from errors import ConfigError
from graph_core import Cover, Graph, TieStrengthTable, compute_tie_strengths
from phase1_engine import (EdgeCloseness, IntermediatePartition, Phase1Config,
                           intermediate_partition, run_phase1)
from phase2_engine import Phase2Config, Phase2Result, run_phase2
from run_manifest import RunManifest


@dataclass
class Phase1Outcome:
    ties: TieStrengthTable
    closeness: EdgeCloseness
    partition: IntermediatePartition


@dataclass
class DetectionResult:
    alpha: float
    cover: Cover
    phase1: Phase1Outcome
    phase2: Phase2Result

    @property
    def converged(self) -> bool:
        return self.phase1.closeness.non_converged == 0 and self.phase2.converged


class NashOverlapDetector:
    """
    Two-phase overlapping community detector.

    Usage:
        detector = NashOverlapDetector(Phase1Config(r=40, k=100), threads=4)
        result = detector.detect(graph, alpha=0.5)
    """

    def __init__(self, phase1_config: Optional[Phase1Config] = None, phase2_max_rounds: int = 1000,
                 threads: int = 1, manifest: Optional[RunManifest] = None):
        self.phase1_config = phase1_config or Phase1Config()
        self.phase2_max_rounds = phase2_max_rounds
        self.threads = max(1, int(threads))
        self.manifest = manifest if manifest is not None else RunManifest()
        self.manifest.threads = self.threads

    def run_phase1(self, graph: Graph) -> Phase1Outcome:
        config = self.phase1_config
        with self.manifest.stage("tie_strengths"):
            ties = compute_tie_strengths(graph)
        with self.manifest.stage("phase1"):
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                closeness = run_phase1(graph, ties, config, executor=pool)
        with self.manifest.stage("partition"):
            partition = intermediate_partition(graph, closeness, config.beta)
        self.manifest.record_games("phase1", closeness.game_passes, closeness.game_converged)
        return Phase1Outcome(ties=ties, closeness=closeness, partition=partition)

    def refine(self, graph: Graph, phase1: Phase1Outcome, alpha: float) -> DetectionResult:
        config = Phase2Config(alpha=alpha, master_seed=self.phase1_config.master_seed,
                              max_rounds=self.phase2_max_rounds)
        with self.manifest.stage("phase2"):
            phase2 = run_phase2(graph, phase1.closeness, phase1.partition, config)
        tag = f"phase2.alpha{alpha:.6g}"
        self.manifest.convergence[f"{tag}.passes"] = phase2.passes
        self.manifest.convergence[f"{tag}.converged"] = phase2.converged
        return DetectionResult(alpha=alpha, cover=phase2.cover, phase1=phase1, phase2=phase2)

    def detect(self, graph: Graph, alpha: float = 0.5) -> DetectionResult:
        return self.refine(graph, self.run_phase1(graph), alpha)

    def sweep(self, graph: Graph, alphas: List[float]) -> List[DetectionResult]:
        phase1 = self.run_phase1(graph)
        return [self.refine(graph, phase1, alpha) for alpha in alphas]


def parse_alpha_sweep(text: str) -> List[float]:
    """"lo:hi:step" -> inclusive list of alpha values"""
    try:
        lo, hi, step = (float(x) for x in text.split(':'))
    except ValueError:
        raise ConfigError(f"alpha sweep must be lo:hi:step, got {text!r}") from None
    if step <= 0 or lo > hi or not 0.0 < lo or hi > 1.0:
        raise ConfigError(f"alpha sweep {text!r} must satisfy 0 < lo <= hi <= 1 and step > 0")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [float(np.round(lo + i * step, 10)) for i in range(count)]


def detect_communities(graph: Graph, alpha: float = 0.5, threads: int = 1, **phase1_params) -> Cover:
    """Convenience wrapper: the detected cover over internal ids"""
    detector = NashOverlapDetector(Phase1Config(**phase1_params), threads=threads)
    result = detector.detect(graph, alpha)
    if not result.converged:
        logging.warning("Detection finished without reaching equilibrium everywhere")
    return result.cover
