"""swarmcover: deterministic multi-robot coverage simulation.

Frontier-led swarming and four comparison strategies (frontier-only, greedy
swarm, swarm-only, sweep routing) on grid-discretized 2D worlds with unknown
obstacles, with coverage, formation, robustness and scaling experiments.
"""

from .boids import BURGER, P3DX, BoidParams, RobotState
from .coverage import CoverageMap, coverage_fraction, init_map, merge
from .environment import Environment, ScenarioError, cell_center, grid_dims, world_to_cell
from .frontier import FrontierRegion, FrontierSet, find_frontier_regions, select_frontier
from .metrics import AggregateResult, aggregate, group_metric, order_metric
from .simulation import RunResult, Scenario, Simulation, run
from .scenario_io import emit_scenario, parse_scenario

__version__ = "0.1.0"
