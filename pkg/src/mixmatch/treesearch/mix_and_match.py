import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from engine_utils.random_streams import SampleStream
from mixmatch.common.mixmatch_errors import BudgetError, NodeExpansionError, SuiteConfigError
from mixmatch.data_models.problem_constants import ProblemConstants
from mixmatch.data_models.search_config_data import SearchConfigModel
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.suite_operations import validation_loss
from mixmatch.problems.trained_model import TrainedModel
from mixmatch.sgd.concentration_bound import theoretical_budget
from mixmatch.sgd.sgd_engine import run_sgd
from mixmatch.sgd.step_schedule import ScheduleMode, StepSchedule, schedule_from_config
from mixmatch.simplex.mixture_weights import MixtureWeights
from mixmatch.simplex.partition_strategy import PartitionStrategy
from mixmatch.simplex.simplex_cell import representative, root_cell, split_cell
from mixmatch.treesearch.search_node import AuditEntry, SearchNode, b_value, select_leaf

NodeBudget = Union[int, Callable[[int], int]]

SELECTION_POOLS = ("literal", "leaves")


@dataclass
class SearchResult:
    label: str
    chosen_mixture: Optional[MixtureWeights]
    chosen_model: np.ndarray
    tree_height: int
    total_steps: int
    node_count: int
    audit_log: List[AuditEntry] = field(default_factory=list)
    root: Optional[SearchNode] = None
    nu2: Optional[float] = None
    rho2: Optional[float] = None

    def trained_model(self) -> TrainedModel:
        return TrainedModel(weights=self.chosen_model, steps=self.total_steps)

    def regret_bound(self) -> Optional[float]:
        """4 * nu2 * rho2^(h - 1), the simple-regret guarantee at the final tree height."""
        if self.nu2 is None or self.rho2 is None or self.tree_height < 1:
            return None
        return 4.0 * self.nu2 * self.rho2 ** (self.tree_height - 1)

    def cells_containing(self, alpha) -> List[SearchNode]:
        if self.root is None:
            return []
        return [node for node in self.root.walk() if node.cell.contains(alpha)]


def _as_budget_fn(lambda_fn: NodeBudget) -> Callable[[int], int]:
    if callable(lambda_fn):
        return lambda_fn
    constant = int(lambda_fn)
    return lambda h: constant


def expand_node(parent: SearchNode, suite: ProblemSuite, schedule: StepSchedule, lambda_h: int,
                strategy: PartitionStrategy, seed: int, nu2: float, rho2: float) -> Tuple[SearchNode, SearchNode]:
    """
    Split the parent's cell and train each child for lambda_h steps at its
    representative mixture, warm started from the parent's model. Children use
    independent streams keyed by (seed, height, index).
    """
    if parent.children:
        raise NodeExpansionError(f"Node ({parent.height}, {parent.index}) is already expanded")
    if lambda_h < 1:
        raise BudgetError(f"Node budget must be at least 1, got {lambda_h}")
    children = []
    for cell in split_cell(parent.cell, strategy):
        alpha = representative(cell)
        stream = SampleStream.from_seed(seed, "node", cell.height, cell.index)
        run = run_sgd(suite, alpha, parent.model, lambda_h, schedule, stream)
        loss = validation_loss(suite, run.trained_model())
        children.append(SearchNode(cell=cell, rep_mixture=alpha, model=run.final_model,
                                   initial_model=run.initial_model, val_loss=loss,
                                   b_value=b_value(loss, nu2, rho2, cell.height), steps=lambda_h))
        logger.debug(f"Evaluated node ({cell.height}, {cell.index}) at {alpha.to_json()}: val_loss={loss!r}")
    parent.attach(children[0], children[1])
    return children[0], children[1]


def mix_and_match(suite: ProblemSuite, Lambda: int, lambda_fn: NodeBudget, schedule: StepSchedule,
                  constants: Optional[ProblemConstants] = None,
                  strategy: PartitionStrategy = PartitionStrategy(), seed: int = 0,
                  w0: Optional[np.ndarray] = None, nu2: Optional[float] = None, rho2: Optional[float] = None,
                  selection_pool: str = "literal") -> SearchResult:
    """
    Optimistic tree search over the mixture simplex. The root is expanded first
    at cost 2*lambda(0); while the spent budget C is at most Lambda, the leaf
    with minimum b-value is expanded at cost 2*lambda(h+1). Returns the node of
    lowest validation loss at the final tree height.
    """
    if selection_pool not in SELECTION_POOLS:
        raise SuiteConfigError(f"Unknown selection pool {selection_pool}, expected one of {SELECTION_POOLS}")
    budget_fn = _as_budget_fn(lambda_fn)
    constants = suite.constants if constants is None else constants
    nu2 = constants.nu2 if nu2 is None else nu2
    rho2 = constants.rho2 if rho2 is None else rho2
    w0 = suite.zero_model() if w0 is None else np.asarray(w0, dtype=np.float64)

    cell = root_cell(suite.K)
    root = SearchNode(cell=cell, rep_mixture=representative(cell), model=w0, initial_model=w0)
    audit_log: List[AuditEntry] = []

    def audit(node: SearchNode):
        audit_log.append(AuditEntry(order=len(audit_log) + 1, height=node.height, index=node.index,
                                    alpha=node.rep_mixture, steps=node.steps, val_loss=node.val_loss,
                                    b_value=node.b_value))

    if suite.K == 1:
        # a single source leaves nothing to split; train the root instead
        steps = budget_fn(0)
        if Lambda < steps:
            raise BudgetError(f"Budget {Lambda} is below the root budget {steps}")
        run = run_sgd(suite, root.rep_mixture, w0, steps, schedule, SampleStream.from_seed(seed, "node", 0, 1))
        root.model = run.final_model
        root.steps = steps
        root.val_loss = validation_loss(suite, run.trained_model())
        root.b_value = b_value(root.val_loss, nu2, rho2, 0)
        audit(root)
        return SearchResult(label="mixmatch", chosen_mixture=root.rep_mixture, chosen_model=root.model,
                            tree_height=0, total_steps=steps, node_count=1, audit_log=audit_log, root=root,
                            nu2=nu2, rho2=rho2)

    root_cost = 2 * budget_fn(0)
    if Lambda < root_cost:
        raise BudgetError(f"Budget {Lambda} is below the root expansion cost {root_cost}")
    leaves = list(expand_node(root, suite, schedule, budget_fn(0), strategy, seed, nu2, rho2))
    for child in leaves:
        audit(child)
    spent = root_cost
    while spent <= Lambda:
        leaf = select_leaf(leaves)
        node_steps = budget_fn(leaf.height + 1)
        children = expand_node(leaf, suite, schedule, node_steps, strategy, seed, nu2, rho2)
        leaves.remove(leaf)
        leaves.extend(children)
        for child in children:
            audit(child)
        spent += 2 * node_steps

    nodes = [node for node in root.walk() if node is not root]
    tree_height = max(node.height for node in nodes)
    if selection_pool == "literal":
        pool = [node for node in nodes if node.height == tree_height]
    else:
        pool = leaves
    chosen = min(pool, key=lambda node: (node.val_loss, node.height, node.index))
    logger.info(f"Search finished: height={tree_height}, steps={spent}, nodes={len(nodes) + 1}, "
                f"chosen={chosen.rep_mixture.to_json()}, val_loss={chosen.val_loss!r}")
    return SearchResult(label="mixmatch", chosen_mixture=chosen.rep_mixture, chosen_model=chosen.model,
                        tree_height=tree_height, total_steps=spent, node_count=len(nodes) + 1,
                        audit_log=audit_log, root=root, nu2=nu2, rho2=rho2)


def mix_and_match_refined(suite: ProblemSuite, Lambda: int, lambda_fn: NodeBudget, schedule: StepSchedule,
                          refine_scale: float = 0.1, seed: int = 0, **search_kwargs) -> SearchResult:
    """
    Spend half the budget on the search, then keep training the chosen model
    at the chosen mixture for the other half with the step size scaled down.
    """
    search_budget = Lambda // 2
    refine_steps = Lambda - search_budget
    result = mix_and_match(suite, search_budget, lambda_fn, schedule, seed=seed, **search_kwargs)
    run = run_sgd(suite, result.chosen_mixture, result.chosen_model, refine_steps, schedule.scaled(refine_scale),
                  SampleStream.from_seed(seed, "refine"))
    logger.info(f"Refined chosen model with {refine_steps} steps at step scale {refine_scale!r}")
    return replace(result, label="mixmatch_refined", chosen_model=run.final_model,
                   total_steps=result.total_steps + refine_steps)


def node_budget_from_config(config: SearchConfigModel, constants: ProblemConstants, schedule: StepSchedule) -> int:
    """Per-node SGD steps: node_steps, or the height-independent theoretical budget rounded up."""
    mode = config.node_budget.lower()
    if mode == "constant":
        return config.node_steps
    if mode == "theoretical":
        E = schedule.E if schedule.mode == ScheduleMode.THEORETICAL else None
        steps = max(1, math.ceil(theoretical_budget(constants, config.budget, config.budget_khat, E=E)))
        logger.info(f"Theoretical node budget {steps} for Lambda={config.budget}, Khat={config.budget_khat!r}")
        return steps
    raise SuiteConfigError(f"Unknown node budget {config.node_budget}, expected constant or theoretical")


def run_search(suite: ProblemSuite, config: SearchConfigModel, refine_scale: Optional[float] = None) -> SearchResult:
    """Mix&Match driven by a search config section; refine_scale selects the refined variant."""
    schedule = schedule_from_config(config.schedule, suite.constants, config.budget)
    search_kwargs = dict(strategy=PartitionStrategy.from_name(config.strategy, config.seed), seed=config.seed,
                         nu2=config.nu2, rho2=config.rho2, selection_pool=config.selection_pool,
                         w0=None if config.initial_model is None else np.asarray(config.initial_model))
    node_steps = node_budget_from_config(config, suite.constants, schedule)
    if refine_scale is None:
        return mix_and_match(suite, config.budget, node_steps, schedule, **search_kwargs)
    return mix_and_match_refined(suite, config.budget, node_steps, schedule, refine_scale=refine_scale,
                                 **search_kwargs)
