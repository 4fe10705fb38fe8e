"""Artifacts shared between suites, computed on first use."""
import logging
import random
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Optional

import numpy as np

from construction.basis_assembly import (
    Construction,
    GlobalOrder,
    NetEquivalence,
    TransferredBasis,
    ambient_sample,
    extract_net,
    k_global,
    perturb,
    retraction_tables,
    transfer_basis,
)
from construction.bd_system import BDSystem
from construction.errors import GridExhaustedError
from construction.free_space import (
    BasisReport,
    FiniteMetric,
    SampleMolecule,
    basis_check,
    prefix_indices,
    sample_molecules,
)
from construction.linf_core import QVec, lipschitz_constants_of_tables
from construction.net_blocks import BlockChain

if TYPE_CHECKING:
    from run_config import RunConfig

logger = logging.getLogger(__name__)


class VerificationContext:
    """One run's construction plus everything derived from it.

    Properties are cached, so suites of different groups share the retraction
    tables, the net and the free-space reports instead of recomputing them.
    """

    def __init__(self, config: "RunConfig", system: BDSystem, construction: Construction):
        self.config = config
        self.system = system
        self.construction = construction
        self.net_error: Optional[GridExhaustedError] = None

    @property
    def workers(self) -> int:
        return self.config.workers

    @property
    def chain(self) -> BlockChain:
        return self.construction.chain

    @property
    def order(self) -> GlobalOrder:
        return self.construction.order

    @property
    def lambda_bar(self) -> int:
        return self.system.lambda_bar

    def computed(self, name: str) -> bool:
        """Whether a cached artifact has already been built."""
        return name in self.__dict__

    @cached_property
    def core_vectors(self) -> list[QVec]:
        rng = random.Random(self.config.seed)
        dimension = self.system.chain.dimension
        return [
            QVec.from_point([Fraction(rng.randint(-40, 40), rng.randint(1, 8)) for _ in range(dimension)])
            for _ in range(self.config.samples.core_vectors)
        ]

    @cached_property
    def tables(self) -> np.ndarray:
        return retraction_tables(self.construction, self.config.caps.max_table)

    @cached_property
    def constants(self) -> list[Fraction]:
        """Lipschitz constant of every global retraction φ_i, i = 1..#M."""
        constants = lipschitz_constants_of_tables(self.order.points, self.tables, self.workers)
        logger.info(f"✓ Lipschitz constants of {len(constants)} global retractions, max {max(constants)}")
        return constants

    @cached_property
    def k_global(self) -> Fraction:
        return k_global(self.lambda_bar)

    @cached_property
    def net(self) -> NetEquivalence:
        """The perturbed net; a grid exhaustion is kept and re-raised without recomputing."""
        if self.net_error is not None:
            raise self.net_error
        try:
            return perturb(self.construction, extract_net(self.construction, self.config.a), self.workers)
        except GridExhaustedError as e:
            self.net_error = e
            raise

    @cached_property
    def transferred(self) -> TransferredBasis:
        return transfer_basis(self.construction, self.net, self.tables, self.constants, self.workers)

    @cached_property
    def ambient(self) -> list:
        return ambient_sample(self.construction, self.config.caps.ambient_sample, self.config.seed)

    @cached_property
    def metric(self) -> FiniteMetric:
        return FiniteMetric(self.order.points, self.construction.origin)

    @cached_property
    def indices(self) -> list[int]:
        return prefix_indices(len(self.order), self.config.samples.prefix_indices)

    @cached_property
    def molecules(self) -> list[SampleMolecule]:
        s = self.config.samples
        return sample_molecules(
            self.order.points, self.construction.origin, s.elementary, s.pairs, s.random, self.config.seed, s.max_support
        )

    @cached_property
    def free_report(self) -> BasisReport:
        return basis_check(
            self.metric,
            self.order.points,
            self.tables,
            self.indices,
            self.molecules,
            self.k_global,
            self.constants,
            self.config.samples.dual_crosscheck_support,
            self.workers,
        )

    @cached_property
    def net_metric(self) -> FiniteMetric:
        points = self.transferred.points
        return FiniteMetric(points, points[0])

    @cached_property
    def net_molecules(self) -> list[SampleMolecule]:
        s = self.config.samples
        pairs = s.net_molecules // 2
        points = self.transferred.points
        return sample_molecules(points, points[0], 0, pairs, s.net_molecules - pairs, self.config.seed + 1, s.max_support)

    @cached_property
    def net_report(self) -> BasisReport:
        transferred = self.transferred
        return basis_check(
            self.net_metric,
            transferred.points,
            transferred.tables,
            self.indices,
            self.net_molecules,
            transferred.bound,
            transferred.constants,
            0,
            self.workers,
        )
