# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import logging
from collections import deque
from functools import lru_cache
from typing import Dict, FrozenSet, Hashable, Iterator, List, Optional, Tuple

import networkx as nx

from ..limits import BRUTE_FORCE_LASSO_LENGTH, DEFAULT_MAX_STATES
from ..lts.environment import Pair, StateGraph, comm_pairs, env_state_graph, requests
from ..lts.labels import pair_str
from ..projection import TypeEnv
from .lasso import Lasso, lasso_fair, lasso_live
from .verdict import Verdict

logger = logging.getLogger(__name__)

# A product node pairs an environment with the pairs enabled earlier and not yet fired.
ProductNode = Tuple[TypeEnv, FrozenSet[Pair]]


class _AvoidanceSearch:
    def __init__(self, graph: StateGraph, pair: Pair):
        """Avoidance Search

        Looks for a fair path that never fires `pair` after it has been requested. Such a path
        never passes a state enabling `pair` (fairness would force it to fire), so the search is
        restricted to the other states, tracking the fairness obligations still open.

        Args:
            graph (StateGraph): Reachable communication LTS.
            pair (Pair): (sender, receiver) pair to avoid.
        """
        self.graph = graph
        self.pair = pair
        self.product = nx.DiGraph()
        self._parent: Dict[ProductNode, Optional[ProductNode]] = {}
        self._order: Dict[ProductNode, int] = {}

    def _allowed(self, state: TypeEnv) -> bool:
        return self.pair not in comm_pairs(state)

    def _discover(self, node: ProductNode, parent: Optional[ProductNode]) -> bool:
        if node in self._parent:
            return False
        self._parent[node] = parent
        self._order[node] = len(self._order)
        self.product.add_node(node)
        return True

    def _prefix(self, node: ProductNode) -> List[Tuple[TypeEnv, object]]:
        chain = []
        while node is not None:
            chain.append(node)
            node = self._parent[node]
        chain.reverse()
        return [(a[0], self.product.edges[a, b]['label']) for a, b in zip(chain, chain[1:])]

    def run(self) -> Optional[Tuple[TypeEnv, Lasso]]:
        """Explore the obligation product from every state requesting the pair.

        Returns:
            Optional[Tuple[TypeEnv, Lasso]]: The requesting state and a fair, non-live lasso
            starting there, or None.
        """
        queue = deque()
        for state in self.graph.states:
            if self.pair in requests(state) and self._allowed(state):
                root = (state, frozenset())
                if self._discover(root, None):
                    queue.append(root)
        while queue:
            node = queue.popleft()
            state, pending = node
            enabled = comm_pairs(state)
            if not enabled and not pending:
                return self._root_of(node), Lasso.stutter(self._prefix(node), state)
            for label, target in self.graph.successors(state):
                if not self._allowed(target):
                    continue
                succ = (target, (pending | enabled) - {label.pair})
                if not self.product.has_edge(node, succ):
                    self.product.add_edge(node, succ, label=label)
                if self._discover(succ, node):
                    queue.append(succ)
        return self._fair_cycle()

    def _root_of(self, node: ProductNode) -> TypeEnv:
        while self._parent[node] is not None:
            node = self._parent[node]
        return node[0]

    def _fair_cycle(self) -> Optional[Tuple[TypeEnv, Lasso]]:
        # a cycle visiting a whole component discharges every obligation unless one is open everywhere
        components = []
        for component in nx.strongly_connected_components(self.product):
            if len(component) == 1:
                only = next(iter(component))
                if not self.product.has_edge(only, only):
                    continue
            if frozenset.intersection(*(pending for _, pending in component)):
                continue
            components.append(sorted(component, key=self._order.__getitem__))
        if not components:
            return None
        component = min(components, key=lambda c: self._order[c[0]])
        entry = component[0]
        sub = self.product.subgraph(component)
        tour = [entry]
        for target in component[1:] + [entry]:
            tour.extend(nx.shortest_path(sub, tour[-1], target)[1:])
        if len(tour) == 1:
            tour.append(entry)
        cycle = [(a[0], sub.edges[a, b]['label']) for a, b in zip(tour, tour[1:])]
        return self._root_of(entry), Lasso(self._prefix(entry), cycle)


def env_live(env: TypeEnv, max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Decide liveness of a type environment.

    An environment is live when every fair path from every reachable environment answers each
    enabled send and receive with a communication of its pair. A violation is a reachable state
    requesting a pair and a fair lasso from it that never fires that pair.

    Args:
        env (TypeEnv): Environment.
        max_states (int, optional): Exploration budget.

    Raises:
        StateBudgetExceeded: The reachable state graph exceeds `max_states`.

    Returns:
        Verdict: On failure the counterexample is the lasso, `path` leads from `env` to its first
        state and `reason` names the starved pair.
    """
    graph = env_state_graph(env, max_states)
    stats = {'states': len(graph), 'edges': graph.edge_count}
    pairs = set()
    for state in graph.states:
        pairs |= requests(state)
    for pair in sorted(pairs):
        search = _AvoidanceSearch(graph, pair)
        found = search.run()
        stats['product_nodes'] = stats.get('product_nodes', 0) + search.product.number_of_nodes()
        if found is not None:
            start, lasso = found
            logger.debug('pair %s starved by a fair lasso of length %d', pair_str(pair), len(lasso))
            return Verdict(False, counterexample=lasso, stats=stats, path=graph.path_to(start),
                           reason=f'{pair_str(pair)} is requested but never fires on a fair path')
    return Verdict(True, stats=stats)


def enumerate_lassos(graph: StateGraph, length: int = BRUTE_FORCE_LASSO_LENGTH) -> Iterator[Lasso]:
    """Every lasso with at most `length` positions starting at a reachable state.

    Terminal states close a path with a stuttering position.
    """
    for start in graph.states:
        stack: List[List[Tuple[Hashable, object]]] = [[(start, None)]]
        while stack:
            path = stack.pop()
            last = path[-1][0]
            successors = graph.successors(last)
            if not successors:
                if len(path) <= length:
                    yield Lasso.stutter(path[:-1], last)
                continue
            for label, target in successors:
                steps = path[:-1] + [(last, label)]
                for i, (state, _) in enumerate(steps):
                    if state == target and len(steps) <= length:
                        yield Lasso(steps[:i], steps[i:])
                if len(steps) < length:
                    stack.append(steps + [(target, None)])


def brute_force_live(env: TypeEnv, length: int = BRUTE_FORCE_LASSO_LENGTH,
                     max_states: int = DEFAULT_MAX_STATES) -> Optional[Lasso]:
    """ A fair but not live lasso of bounded length, or None, by exhaustive enumeration """
    graph = env_state_graph(env, max_states)
    enabled = lru_cache(maxsize=None)(comm_pairs)
    pending = lru_cache(maxsize=None)(requests)
    for lasso in enumerate_lassos(graph, length):
        if lasso_fair(lasso, enabled) and not lasso_live(lasso, pending):
            return lasso
    return None
