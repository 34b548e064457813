"""Shared generators and reference checks for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from refnet.matrix_io import SparseMatrix
from refnet.signed_graph import NEG, POS, SignedGraph


def random_signed_graph(
    rng: random.Random,
    n_max: int = 12,
    p_edge: float = 0.3,
    p_sign: float = 0.5,
    p_parallel: float = 0.15,
    n_min: int = 1,
) -> SignedGraph:
    """Random signed graph; with p_parallel an edge also gets its twin sign."""
    n = rng.randint(n_min, n_max)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p_edge:
                sign = 1 if rng.random() < p_sign else -1
                edges.append((u, v, sign))
                if rng.random() < p_parallel:
                    edges.append((u, v, -sign))
    return SignedGraph.from_edges(n, edges)


def random_balanced_graph(
    rng: random.Random, n_max: int = 12, p_edge: float = 0.4, n_min: int = 1
) -> SignedGraph:
    """Plant a two-labelling and orient all signs consistently with it."""
    n = rng.randint(n_min, n_max)
    labels = [rng.randint(0, 1) for _ in range(n)]
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p_edge:
                edges.append((u, v, 1 if labels[u] == labels[v] else -1))
    return SignedGraph.from_edges(n, edges)


def matrix_realizing(graph: SignedGraph) -> SparseMatrix:
    """Matrix whose signed graph is exactly ``graph`` (one column per edge).

    A positive edge needs opposite entries, a negative edge equal ones.
    """
    entries = []
    for c, (u, v, sign) in enumerate(graph.edges):
        entries.append((u, c, Fraction(1)))
        entries.append((v, c, Fraction(-1 if sign == 1 else 1)))
    return SparseMatrix.from_entries(graph.n, len(graph.edges), entries)


def random_matrix(
    rng: random.Random,
    n_rows_max: int = 8,
    n_cols_max: int = 8,
    p: float = 0.4,
) -> SparseMatrix:
    n_rows = rng.randint(1, n_rows_max)
    n_cols = rng.randint(1, n_cols_max)
    values = [
        Fraction(1), Fraction(-1), Fraction(2), Fraction(-2),
        Fraction(3), Fraction(1, 2), Fraction(-3, 4), Fraction(5),
    ]
    entries = []
    for r in range(n_rows):
        for c in range(n_cols):
            if rng.random() < p:
                entries.append((r, c, rng.choice(values)))
    return SparseMatrix.from_entries(n_rows, n_cols, entries)


def simple_adjacency(rng: random.Random, n_max: int = 12, p: float = 0.35) -> list[list[int]]:
    n = rng.randint(1, n_max)
    adj: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                adj[u].append(v)
                adj[v].append(u)
    return adj


def odd_negative_count(cycle: tuple[tuple[int, int, int], ...]) -> bool:
    return sum(1 for _, _, s in cycle if s == -1) % 2 == 1


def is_closed_walk(cycle: tuple[tuple[int, int, int], ...]) -> bool:
    if not cycle:
        return False
    for (a, b, _), (c, d, _) in zip(cycle, cycle[1:]):
        if b != c:
            return False
    return cycle[-1][1] == cycle[0][0]


def cycle_vertices_distinct(cycle: tuple[tuple[int, int, int], ...]) -> bool:
    verts = [a for a, _, _ in cycle]
    return len(verts) == len(set(verts))


def edge_in_graph(graph: SignedGraph, a: int, b: int, sign: int) -> bool:
    mask = graph.pair_mask(a, b)
    return bool(mask & (POS if sign == 1 else NEG))


def is_independent_set(adjacency, chosen) -> bool:
    chosen = set(chosen)
    return all(u not in chosen or not (set(adjacency[u]) & chosen) for u in chosen)


def is_maximal_independent_set(adjacency, chosen) -> bool:
    if not is_independent_set(adjacency, chosen):
        return False
    chosen = set(chosen)
    for v in range(len(adjacency)):
        if v not in chosen and not (set(adjacency[v]) & chosen):
            return False
    return True


def brute_force_separator(adjacency, sources, sinks) -> int:
    """Smallest vertex set leaving no component with both terminal kinds."""
    n = len(adjacency)
    sources, sinks = set(sources), set(sinks)

    def separated(removed: set[int]) -> bool:
        seen = [False] * n
        for start in range(n):
            if start in removed or seen[start]:
                continue
            comp = []
            queue = [start]
            seen[start] = True
            while queue:
                v = queue.pop()
                comp.append(v)
                for u in adjacency[v]:
                    if u not in removed and not seen[u]:
                        seen[u] = True
                        queue.append(u)
            comp_set = set(comp)
            if comp_set & sources and comp_set & sinks:
                return False
        return True

    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            if separated(set(combo)):
                return size
    raise AssertionError("removing everything always separates")


def _decimal_exact(v: Fraction) -> str:
    """Exact decimal rendering; only denominators of the form 2^a 5^b allowed."""
    if v.denominator == 1:
        return str(v.numerator)
    den = v.denominator
    a = b = 0
    while den % 2 == 0:
        den //= 2
        a += 1
    while den % 5 == 0:
        den //= 5
        b += 1
    if den != 1:
        raise ValueError(f"{v} has no finite decimal form")
    shift = max(a, b)
    scaled = v * 10**shift
    text = str(scaled.numerator).rjust(shift + 1, "0")
    sign = "-" if text.startswith("-") else ""
    digits = text.lstrip("-").rjust(shift + 1, "0")
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


def write_mps(matrix: SparseMatrix, name: str = "TEST") -> str:
    """Render a matrix as a minimal equality-rows MPS file (test fixture aid)."""
    lines = [f"NAME          {name}", "ROWS", " N  OBJ"]
    row_names = [f"R{r + 1}" for r in range(matrix.n_rows)]
    for rname in row_names:
        lines.append(f" E  {rname}")
    lines.append("COLUMNS")
    for c in range(matrix.n_cols):
        col = matrix.col(c)
        if not col:
            continue
        cname = f"C{c + 1}"
        for r, v in col:
            lines.append(f"    {cname}  {row_names[r]}  {_decimal_exact(v)}")
    lines.append("RHS")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
