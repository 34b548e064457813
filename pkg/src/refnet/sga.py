"""Spanning-forest heuristics for the maximum balanced induced subgraph.

One pass works in five steps: build the signed graph (done by the caller),
find a spanning forest, switch the vertex set that makes the forest
all-positive, take the subgraph induced by the remaining negative edges, and
keep a maximal independent set of it (everything untouched by negative edges
is kept as well).  Every retained set induces a balanced subgraph by
construction, and on a balanced input the whole vertex set is retained no
matter which forest was used.

Three forest strategies are provided -- random search, breadth-first and
depth-first -- plus a repetition wrapper that reruns the pass on pseudo-
randomly permuted vertices and keeps the best result, and a variant that
swaps the greedy independent-set step for an exact minimum vertex cover.

Reproducibility: all randomness flows through ``random.Random`` (Mersenne
Twister) instances; repetition i of a run with seed s uses the sub-seed
s + i, and the first repetition keeps the identity permutation.
"""

from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from refnet.exact import vertex_cover
from refnet.signed_graph import (
    NEG,
    POS,
    SignedGraph,
    induced_subgraph,
    is_balanced,
)

STRATEGIES = ("RS", "BFS", "DFS")


class CoverBudgetError(RuntimeError):
    """The exact-cover sweep exhausted its budget without finding a cover."""


@dataclass(frozen=True)
class SpanningForest:
    """Rooted spanning forest with per-edge signs.

    ``parent[v]`` is -1 exactly for roots; ``parent_sign[v]`` is the sign of
    the tree edge to the parent (0 for roots).  For a +/- parallel pair the
    recorded sign is the one the traversal actually took.
    """

    n: int
    parent: tuple[int, ...]
    parent_sign: tuple[int, ...]
    roots: tuple[int, ...]

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """Tree edges as (child, parent, sign)."""
        return tuple(
            (v, self.parent[v], self.parent_sign[v])
            for v in range(self.n)
            if self.parent[v] != -1
        )


@dataclass(frozen=True)
class HeuristicResult:
    """Outcome of one heuristic configuration.

    ``retained`` induces a balanced subgraph of the input graph; ``k`` is
    the number of dropped vertices; ``reflection`` is the switch set of the
    retained subgraph (vertex ids of the input graph).
    """

    retained: tuple[int, ...]
    k: int
    reflection: frozenset[int]
    strategy: str
    repeats: int
    seed: int | None
    elapsed: float
    cover: str = "greedy"


def _attach_sign(mask: int) -> int:
    # A +/- parallel pair enters the forest through its positive edge; any
    # choice leaves the pair's negative 2-cycle for the independent-set step.
    return -1 if mask == NEG else 1


def forest_rs(graph: SignedGraph, rng: random.Random) -> SpanningForest:
    """Random-search forest.

    Marks a uniformly random vertex, then repeatedly attaches a uniformly
    random (marked, unmarked) adjacent pair; when no crossing pair is left
    it marks a fresh random vertex.  Pairs joined only by a +/- parallel
    couple are used (through the positive edge) only when no single-sign
    crossing pair exists.
    """
    n = graph.n
    marked = [False] * n
    parent = [-1] * n
    parent_sign = [0] * n
    roots: list[int] = []
    singles: list[tuple[int, int, int]] = []  # (unmarked, marked, sign)
    doubles: list[tuple[int, int]] = []

    def mark(v: int) -> None:
        marked[v] = True
        for u, m in zip(graph.neighbors[v], graph.masks[v]):
            if not marked[u]:
                if m == POS | NEG:
                    doubles.append((u, v))
                else:
                    singles.append((u, v, 1 if m == POS else -1))

    def draw_single() -> tuple[int, int, int] | None:
        while singles:
            i = rng.randrange(len(singles))
            item = singles[i]
            singles[i] = singles[-1]
            singles.pop()
            if not marked[item[0]]:
                return item
        return None

    def draw_double() -> tuple[int, int, int] | None:
        while doubles:
            i = rng.randrange(len(doubles))
            u, v = doubles[i]
            doubles[i] = doubles[-1]
            doubles.pop()
            if not marked[u]:
                return (u, v, 1)
        return None

    remaining = n
    while remaining:
        pool = [v for v in range(n) if not marked[v]]
        root = pool[rng.randrange(len(pool))]
        roots.append(root)
        mark(root)
        remaining -= 1
        while remaining:
            item = draw_single()
            if item is None:
                item = draw_double()
            if item is None:
                break
            u, v, sign = item
            parent[u] = v
            parent_sign[u] = sign
            mark(u)
            remaining -= 1
    return SpanningForest(n, tuple(parent), tuple(parent_sign), tuple(roots))


def forest_bfs(graph: SignedGraph) -> SpanningForest:
    """Breadth-first forest; every restart picks an unmarked vertex of
    maximum degree (ties to the lowest index), neighbors scanned ascending."""
    n = graph.n
    degree = [graph.degree(v) for v in range(n)]
    marked = [False] * n
    parent = [-1] * n
    parent_sign = [0] * n
    roots: list[int] = []
    remaining = n
    while remaining:
        root = -1
        for v in range(n):
            if not marked[v] and (root == -1 or degree[v] > degree[root]):
                root = v
        roots.append(root)
        marked[root] = True
        remaining -= 1
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u, m in zip(graph.neighbors[v], graph.masks[v]):
                if not marked[u]:
                    marked[u] = True
                    remaining -= 1
                    parent[u] = v
                    parent_sign[u] = _attach_sign(m)
                    queue.append(u)
    return SpanningForest(n, tuple(parent), tuple(parent_sign), tuple(roots))


def forest_dfs(graph: SignedGraph) -> SpanningForest:
    """Depth-first forest; restarts at the lowest unmarked index, neighbors
    scanned ascending.  Realized with an explicit stack."""
    n = graph.n
    marked = [False] * n
    parent = [-1] * n
    parent_sign = [0] * n
    roots: list[int] = []
    for start in range(n):
        if marked[start]:
            continue
        roots.append(start)
        marked[start] = True
        stack = [(start, iter(zip(graph.neighbors[start], graph.masks[start])))]
        while stack:
            v, it = stack[-1]
            advanced = False
            for u, m in it:
                if not marked[u]:
                    marked[u] = True
                    parent[u] = v
                    parent_sign[u] = _attach_sign(m)
                    stack.append((u, iter(zip(graph.neighbors[u], graph.masks[u]))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
    return SpanningForest(n, tuple(parent), tuple(parent_sign), tuple(roots))


def switch_set_from_forest(forest: SpanningForest) -> frozenset[int]:
    """Vertices whose root path carries an odd number of negative edges.

    Switching this set renders every tree edge positive.
    """
    parity: list[int | None] = [None] * forest.n
    for v in range(forest.n):
        chain = []
        x = v
        while parity[x] is None and forest.parent[x] != -1:
            chain.append(x)
            x = forest.parent[x]
        if parity[x] is None:
            parity[x] = 0
        for y in reversed(chain):
            flip = 1 if forest.parent_sign[y] == -1 else 0
            parity[y] = parity[forest.parent[y]] ^ flip
    return frozenset(v for v in range(forest.n) if parity[v] == 1)


def greedy_independent_set(
    adjacency: Sequence[Sequence[int]], order: Sequence[int] | None = None
) -> set[int]:
    """Greedy minimum-degree maximal independent set.

    Repeatedly takes an alive vertex of minimum degree (ties broken by the
    earliest position in ``order``, identity when omitted) and removes it
    together with its neighbors.
    """
    n = len(adjacency)
    pos = list(range(n))
    if order is not None:
        for p, v in enumerate(order):
            pos[v] = p
    alive = [True] * n
    deg = [len(adjacency[v]) for v in range(n)]
    chosen: set[int] = set()
    remaining = n
    while remaining:
        best = -1
        for v in range(n):
            if alive[v] and (
                best == -1
                or deg[v] < deg[best]
                or (deg[v] == deg[best] and pos[v] < pos[best])
            ):
                best = v
        chosen.add(best)
        killed = [best] + [u for u in adjacency[best] if alive[u]]
        for u in killed:
            alive[u] = False
        remaining -= len(killed)
        for u in killed:
            for w in adjacency[u]:
                if alive[w]:
                    deg[w] -= 1
    return chosen


def _negative_structure(
    graph: SignedGraph, switch_set: frozenset[int]
) -> tuple[list[int], list[list[int]]]:
    """Vertices and adjacency of the negative subgraph of the switched graph.

    Computed directly from the original masks to avoid materializing the
    switched graph.
    """
    inside = [False] * graph.n
    for v in switch_set:
        inside[v] = True
    pairs: list[tuple[int, int]] = []
    seen: set[int] = set()
    for v in range(graph.n):
        for u, m in zip(graph.neighbors[v], graph.masks[v]):
            if u <= v:
                continue
            if m == POS | NEG:
                has_neg = True
            elif inside[v] != inside[u]:
                has_neg = m == POS
            else:
                has_neg = m == NEG
            if has_neg:
                pairs.append((v, u))
                seen.add(v)
                seen.add(u)
    verts = sorted(seen)
    index = {v: i for i, v in enumerate(verts)}
    adj: list[list[int]] = [[] for _ in verts]
    for v, u in pairs:
        adj[index[v]].append(index[u])
        adj[index[u]].append(index[v])
    for lst in adj:
        lst.sort()
    return verts, adj


def _build_forest(
    graph: SignedGraph, strategy: str, rng: random.Random | None
) -> SpanningForest:
    if strategy == "RS":
        return forest_rs(graph, rng if rng is not None else random.Random(0))
    if strategy == "BFS":
        return forest_bfs(graph)
    if strategy == "DFS":
        return forest_dfs(graph)
    raise ValueError(f"unknown forest strategy {strategy!r}; expected one of {STRATEGIES}")


def _finish(
    graph: SignedGraph,
    retained: list[int],
    strategy: str,
    started: float,
    cover: str,
) -> HeuristicResult:
    sub = induced_subgraph(graph, retained)
    certificate = is_balanced(sub)
    assert certificate.balanced, "retained set must induce a balanced subgraph"
    reflection = frozenset(sub.tags[v] for v in certificate.switch_set)
    return HeuristicResult(
        retained=tuple(retained),
        k=graph.n - len(retained),
        reflection=reflection,
        strategy=strategy,
        repeats=1,
        seed=None,
        elapsed=time.perf_counter() - started,
        cover=cover,
    )


def sga(
    graph: SignedGraph, strategy: str = "DFS", rng: random.Random | None = None
) -> HeuristicResult:
    """One heuristic pass with the given forest strategy.

    ``rng`` only matters for the RS strategy (an unseeded run defaults to
    ``random.Random(0)`` so results stay reproducible).
    """
    started = time.perf_counter()
    strategy = strategy.upper()
    forest = _build_forest(graph, strategy, rng)
    flips = switch_set_from_forest(forest)
    neg_verts, neg_adj = _negative_structure(graph, flips)
    in_negative = set(neg_verts)
    independent = greedy_independent_set(neg_adj)
    retained = sorted(
        [v for v in range(graph.n) if v not in in_negative]
        + [neg_verts[i] for i in independent]
    )
    return _finish(graph, retained, strategy, started, "greedy")


def permute_graph(graph: SignedGraph, order: Sequence[int]) -> SignedGraph:
    """Relabelled copy where new vertex j is the old vertex ``order[j]``."""
    n = graph.n
    new_of_old = [0] * n
    for j, old in enumerate(order):
        new_of_old[old] = j
    neighbors = []
    masks = []
    for j in range(n):
        old = order[j]
        items = sorted(
            (new_of_old[u], m)
            for u, m in zip(graph.neighbors[old], graph.masks[old])
        )
        neighbors.append(tuple(u for u, _ in items))
        masks.append(tuple(m for _, m in items))
    tags = tuple(graph.tags[order[j]] for j in range(n))
    return SignedGraph(n, tags, tuple(neighbors), tuple(masks))


def sga_repeat(
    graph: SignedGraph, repeats: int, strategy: str = "DFS", seed: int = 1
) -> HeuristicResult:
    """Best of ``repeats`` passes over pseudo-randomly permuted vertices.

    Repetition i draws its permutation and RS randomness from
    ``random.Random(seed + i)``; repetition 0 keeps the identity permutation,
    so one repetition reproduces :func:`sga` exactly.  Ties keep the earliest
    repetition, making the best-of sequence monotone in ``repeats`` for a
    fixed seed.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    strategy = strategy.upper()
    started = time.perf_counter()
    best: HeuristicResult | None = None
    for i in range(repeats):
        rng = random.Random(seed + i)
        if i == 0:
            order = list(range(graph.n))
            permuted = graph
        else:
            order = list(range(graph.n))
            rng.shuffle(order)
            permuted = permute_graph(graph, order)
        result = sga(permuted, strategy, rng)
        retained = sorted(order[v] for v in result.retained)
        reflection = frozenset(order[v] for v in result.reflection)
        if best is None or len(retained) > len(best.retained):
            best = HeuristicResult(
                retained=tuple(retained),
                k=result.k,
                reflection=reflection,
                strategy=strategy,
                repeats=repeats,
                seed=seed,
                elapsed=0.0,
                cover=result.cover,
            )
    assert best is not None
    return HeuristicResult(
        retained=best.retained,
        k=best.k,
        reflection=best.reflection,
        strategy=strategy,
        repeats=repeats,
        seed=seed,
        elapsed=time.perf_counter() - started,
        cover=best.cover,
    )


def sga_vc(
    graph: SignedGraph,
    strategy: str = "DFS",
    rng: random.Random | None = None,
    vc_budget: int | None = None,
) -> HeuristicResult:
    """Heuristic pass with an exact minimum vertex cover in place of greedy.

    The cover is computed on the negative subgraph by sweeping the cover
    size upward from zero; its complement there is a maximum independent
    set, so the retained set is never smaller than the greedy variant's on
    the same forest.  ``vc_budget`` caps the sweep; exhausting it raises
    :class:`CoverBudgetError` so callers can fall back to greedy.
    """
    started = time.perf_counter()
    strategy = strategy.upper()
    forest = _build_forest(graph, strategy, rng)
    flips = switch_set_from_forest(forest)
    neg_verts, neg_adj = _negative_structure(graph, flips)
    in_negative = set(neg_verts)
    budget = len(neg_verts) if vc_budget is None else vc_budget
    cover: set[int] | None = None
    for size in range(budget + 1):
        cover = vertex_cover(neg_adj, size)
        if cover is not None:
            break
    if cover is None:
        raise CoverBudgetError(
            f"no vertex cover of size <= {budget} found within the budget"
        )
    independent = set(range(len(neg_verts))) - cover
    retained = sorted(
        [v for v in range(graph.n) if v not in in_negative]
        + [neg_verts[i] for i in independent]
    )
    result = _finish(graph, retained, strategy, started, "exact")
    return result
