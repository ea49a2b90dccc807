"""Optimal load-shedding control for cascading failures in DC power networks.

Two solver families are provided on top of a common cascade model:

* an exact finite aggregation of the reachable set, searched over face
  lattices of hyperplane arrangements (`loadshed.aggregation`,
  `loadshed.geometry`), and
* an analytic decomposition for tree-reducible networks built on a
  piecewise tent-function algebra (`loadshed.tree_solver`, `loadshed.tents`),
  with a projection-based approximation (`loadshed.projection`).

Benchmark instances live in `loadshed.instances`; `loadshed.cli` exposes the
`loadshed` command (simulate / solve / table1).
"""

from .network import (
    Network,
    Link,
    FlowSolution,
    UnbalancedInjection,
    compute_flow,
    connected_components,
    pseudo_inverse,
    update_pseudo_inverse,
)
from .cascade import (
    NetworkState,
    ControlBox,
    InadmissibleControl,
    failure_step,
    is_feasible,
    admissible_set,
    run_uncontrolled,
)

__all__ = [
    "Network",
    "Link",
    "FlowSolution",
    "UnbalancedInjection",
    "compute_flow",
    "connected_components",
    "pseudo_inverse",
    "update_pseudo_inverse",
    "NetworkState",
    "ControlBox",
    "InadmissibleControl",
    "failure_step",
    "is_feasible",
    "admissible_set",
    "run_uncontrolled",
]
