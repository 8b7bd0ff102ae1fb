"""Rooted trees, the recursive constructions C(r1, ..., rn) and T(r, r0, r1, ..., rn).

Trees are stored in canonical breadth-first numbering: the root is 0 and
vertices are numbered level by level, children in construction order.  In
that numbering the children of every vertex occupy a contiguous block of
ids, so a tree is fully described by its sequence of child counts.  This
keeps multi-million-vertex trees cheap to build and to search.
"""
from __future__ import annotations

import os
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

DEFAULT_MAX_VERTICES = 10_000_000


def default_max_vertices() -> int:
    return int(os.environ.get("INTEGRA_MAX_VERTICES", DEFAULT_MAX_VERTICES))


class VertexBudgetExceeded(ValueError):
    """A construction would materialize more vertices than allowed."""

    def __init__(self, required: int, cap: int, what: str = "tree"):
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what} needs {required} vertices, above the cap of {cap}"
        )


# --------------------------------------------------------------------------
# parameter types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CsikvariParams:
    """Strictly increasing positive radii r1 < ... < rn of C(r1, ..., rn)."""

    radii: tuple[int, ...] = ()

    def __post_init__(self):
        radii = tuple(int(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if any(r <= 0 for r in radii):
            raise ValueError("radii must be positive integers")
        if any(a >= b for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def gaps(self) -> tuple[int, ...]:
        """d_i = r_i - r_{i-1} with r_0 = 0."""
        prev = (0,) + self.radii[:-1]
        return tuple(r - p for r, p in zip(self.radii, prev))

    def prefix(self, k: int) -> "CsikvariParams":
        return CsikvariParams(self.radii[:k])

    def __str__(self) -> str:
        return f"C({', '.join(map(str, self.radii))})"


@dataclass(frozen=True)
class OddTreeParams:
    """Parameters of T(r, r0, r1, ..., rn) = U ~ (V ~ r W).

    U = C(r1, ..., rn), V = C(r0, r2, ..., r_{n-1}) and W = C(r2, ..., rn).
    """

    r: int
    r0: int
    radii: tuple[int, ...]

    def __post_init__(self):
        radii = tuple(int(x) for x in self.radii)
        object.__setattr__(self, "radii", radii)
        if self.r <= 0 or self.r0 <= 0 or any(x <= 0 for x in radii):
            raise ValueError("all parameters must be positive integers")
        if len(radii) < 2:
            raise ValueError("need at least two radii r1, r2")
        if max(self.r0, radii[0]) >= radii[1]:
            raise ValueError("need max(r0, r1) < r2")
        if any(a >= b for a, b in zip(radii[1:], radii[2:])):
            raise ValueError("need r2 < r3 < ... < rn")

    @classmethod
    def from_sequence(cls, values: Sequence[int]) -> "OddTreeParams":
        """Build from the flat list r, r0, r1, ..., rn."""
        if len(values) < 4:
            raise ValueError("T needs r, r0, r1, r2 at least")
        return cls(values[0], values[1], tuple(values[2:]))

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def diameter(self) -> int:
        return 2 * self.n + 1

    @property
    def u(self) -> CsikvariParams:
        return CsikvariParams(self.radii)

    @property
    def v(self) -> CsikvariParams:
        return CsikvariParams((self.r0,) + self.radii[1:-1])

    @property
    def w(self) -> CsikvariParams:
        return CsikvariParams(self.radii[1:])

    def as_list(self) -> list[int]:
        return [self.r, self.r0, *self.radii]

    def __str__(self) -> str:
        return f"T({', '.join(map(str, self.as_list()))})"


def vertex_count_c(p: CsikvariParams) -> int:
    """|C(r1..rn)| via N_k = N_{k-2} + d_k N_{k-1}, N(C()) = 1, N(C(r1)) = r1 + 1."""
    prev, cur = 1, 1
    for d in p.gaps:
        prev, cur = cur, prev + d * cur
    return cur


def vertex_count_t(p: OddTreeParams) -> int:
    return vertex_count_c(p.u) + vertex_count_c(p.v) + p.r * vertex_count_c(p.w)


# --------------------------------------------------------------------------
# the tree itself
# --------------------------------------------------------------------------

def _frozen(a) -> np.ndarray:
    arr = np.ascontiguousarray(a, dtype=np.int64)
    arr.flags.writeable = False
    return arr


class RootedTree:
    """A rooted tree in canonical breadth-first numbering (root = 0).

    ``levels[L]`` holds the child counts of the vertices at depth L, in id
    order; concatenated they give ``child_counts``.
    """

    def __init__(self, levels: Sequence[np.ndarray]):
        levels = [_frozen(lv) for lv in levels]
        if not levels or len(levels[0]) != 1:
            raise ValueError("level 0 must contain exactly the root")
        for upper, lower in zip(levels, levels[1:]):
            if int(upper.sum()) != len(lower):
                raise ValueError("child counts do not match the next level")
        if int(levels[-1].sum()) != 0:
            raise ValueError("deepest level must consist of leaves")
        self.levels = tuple(levels)

    # construction helpers -------------------------------------------------

    @classmethod
    def single(cls) -> "RootedTree":
        return cls([np.zeros(1, dtype=np.int64)])

    @classmethod
    def star(cls, leaves: int) -> "RootedTree":
        if leaves == 0:
            return cls.single()
        return cls([np.array([leaves]), np.zeros(leaves, dtype=np.int64)])

    @classmethod
    def from_children(cls, children: Sequence[Sequence[int]], root: int = 0) -> "RootedTree":
        """Canonicalize an arbitrary children-list description."""
        n = len(children)
        order = []
        depth = {root: 0}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in children[v]:
                if c in depth:
                    raise ValueError("children lists do not describe a tree")
                depth[c] = depth[v] + 1
                queue.append(c)
        if len(order) != n:
            raise ValueError("children lists do not describe a connected tree")
        height = max(depth.values())
        levels = [[] for _ in range(height + 1)]
        for v in order:
            levels[depth[v]].append(len(children[v]))
        return cls([np.array(lv, dtype=np.int64) for lv in levels])

    @classmethod
    def from_edges(cls, vertex_count: int, edges, root: int = 0) -> "RootedTree":
        """Canonicalize an undirected edge set; children are visited by increasing id."""
        if len(edges) != vertex_count - 1:
            raise ValueError(
                f"a tree on {vertex_count} vertices has {vertex_count - 1} edges, got {len(edges)}"
            )
        adj = [[] for _ in range(vertex_count)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        children = [[] for _ in range(vertex_count)]
        seen = [False] * vertex_count
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in sorted(adj[v]):
                if not seen[w]:
                    seen[w] = True
                    children[v].append(w)
                    queue.append(w)
        if not all(seen):
            raise ValueError("edge set is not connected")
        return cls.from_children(children, root)

    # basic views ------------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return int(sum(len(lv) for lv in self.levels))

    def __len__(self) -> int:
        return self.vertex_count

    @property
    def height(self) -> int:
        """Largest root-to-vertex distance."""
        return len(self.levels) - 1

    @property
    def root(self) -> int:
        return 0

    @cached_property
    def child_counts(self) -> np.ndarray:
        return _frozen(np.concatenate(self.levels))

    @cached_property
    def first_child(self) -> np.ndarray:
        """Id of the first child of every vertex (meaningful when it has one)."""
        return _frozen(1 + np.concatenate(([0], np.cumsum(self.child_counts)[:-1])))

    @cached_property
    def parents(self) -> np.ndarray:
        """Parent id of every vertex; -1 for the root."""
        n = self.vertex_count
        par = np.repeat(np.arange(n, dtype=np.int64), self.child_counts)
        return _frozen(np.concatenate(([-1], par)))

    def children(self, v: int) -> range:
        start = int(self.first_child[v])
        return range(start, start + int(self.child_counts[v]))

    def children_lists(self) -> list[list[int]]:
        return [list(self.children(v)) for v in range(self.vertex_count)]

    def edges(self) -> np.ndarray:
        """(parent, child) pairs ordered by child id; parent < child always."""
        n = self.vertex_count
        return np.stack([self.parents[1:], np.arange(1, n, dtype=np.int64)], axis=1)

    def depths(self) -> np.ndarray:
        return np.repeat(
            np.arange(len(self.levels), dtype=np.int64), [len(lv) for lv in self.levels]
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootedTree):
            return NotImplemented
        return len(self.levels) == len(other.levels) and all(
            np.array_equal(a, b) for a, b in zip(self.levels, other.levels)
        )

    def __repr__(self) -> str:
        return f"RootedTree(vertices={self.vertex_count}, height={self.height})"

    # structural operations --------------------------------------------------

    def subtree(self, v: int) -> "RootedTree":
        """The subtree hanging at ``v``, re-rooted and renumbered canonically."""
        counts = self.child_counts
        levels = []
        lo, hi = v, v + 1
        while lo < hi:
            block = counts[lo:hi]
            levels.append(block)
            total = int(block.sum())
            if total == 0:
                break
            lo = int(self.first_child[lo])
            hi = lo + total
        return RootedTree(levels)


def attach(
    t1: RootedTree, n: int, t2: RootedTree, max_vertices: int | None = None
) -> RootedTree:
    """T1 ~ n T2: join the root of ``t1`` to the roots of ``n`` fresh copies of ``t2``."""
    if n < 1:
        raise ValueError("attach needs n >= 1 copies")
    cap = default_max_vertices() if max_vertices is None else max_vertices
    required = t1.vertex_count + n * t2.vertex_count
    if required > cap:
        raise VertexBudgetExceeded(required, cap)
    depth = max(len(t1.levels), len(t2.levels) + 1)
    levels = [np.array([t1.levels[0][0] + n])]
    for lvl in range(1, depth):
        parts = []
        if lvl < len(t1.levels):
            parts.append(t1.levels[lvl])
        if lvl - 1 < len(t2.levels):
            parts.append(np.tile(t2.levels[lvl - 1], n))
        levels.append(np.concatenate(parts))
    return RootedTree(levels)


def build_c(p: CsikvariParams, max_vertices: int | None = None) -> RootedTree:
    """Materialize C(r1, ..., rn)."""
    cap = default_max_vertices() if max_vertices is None else max_vertices
    required = vertex_count_c(p)
    if required > cap:
        raise VertexBudgetExceeded(required, cap, str(p))
    older, newer = RootedTree.single(), RootedTree.single()
    # newer = C(r1..r_{k-1}), older = C(r1..r_{k-2}); C(r1) = C() ~ r1 C()
    for d in p.gaps:
        older, newer = newer, attach(older, d, newer, cap)
    return newer


def build_t(p: OddTreeParams, max_vertices: int | None = None) -> RootedTree:
    """Materialize T(r, r0, r1, ..., rn) = U ~ (V ~ r W)."""
    cap = default_max_vertices() if max_vertices is None else max_vertices
    required = vertex_count_t(p)
    if required > cap:
        raise VertexBudgetExceeded(required, cap, str(p))
    u = build_c(p.u, cap)
    v = build_c(p.v, cap)
    w = build_c(p.w, cap)
    return attach(u, 1, attach(v, p.r, w, cap), cap)


def delete_root(t: RootedTree) -> list[RootedTree]:
    """The forest left after removing the root, one tree per former child."""
    return [t.subtree(c) for c in t.children(0)]


# --------------------------------------------------------------------------
# measurements
# --------------------------------------------------------------------------

def bfs_distances(t: RootedTree, source: int) -> np.ndarray:
    """Edge distances from ``source`` to every vertex, one vectorized step per layer."""
    n = t.vertex_count
    counts, first, parents = t.child_counts, t.first_child, t.parents
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    step = 0
    while frontier.size:
        step += 1
        up = parents[frontier]
        up = up[up >= 0]
        k = counts[frontier]
        starts = np.repeat(first[frontier], k)
        offsets = np.arange(int(k.sum()), dtype=np.int64) - np.repeat(np.cumsum(k) - k, k)
        down = starts + offsets
        nxt = np.concatenate((up, down))
        nxt = nxt[dist[nxt] < 0]
        dist[nxt] = step
        frontier = nxt
    return dist


def diameter(t: RootedTree) -> int:
    """Longest path length in edges, by double breadth-first search."""
    if t.vertex_count == 1:
        return 0
    far = int(np.argmax(bfs_distances(t, 0)))
    return int(bfs_distances(t, far).max())


def is_bipartite(t: RootedTree) -> bool:
    """BFS 2-coloring check: every edge joins consecutive layers."""
    depth = t.depths()
    e = t.edges()
    return bool(np.all((depth[e[:, 0]] + depth[e[:, 1]]) % 2 == 1))


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

FORMATS = ("edge-list", "dot")


def serialize(t: RootedTree, fmt: str = "edge-list") -> str:
    if fmt == "edge-list":
        lines = [f"# vertices={t.vertex_count} root=0"]
        lines += [f"{u} {v}" for u, v in t.edges().tolist()]
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["graph T {", "  0 [root=true];"]
        lines += [f"  {u} -- {v};" for u, v in t.edges().tolist()]
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


_HEADER = re.compile(r"#\s*vertices=(\d+)\s+root=(\d+)")
_DOT_EDGE = re.compile(r"^\s*(\d+)\s*--\s*(\d+)\s*;?\s*$")
_DOT_NODE = re.compile(r"^\s*(\d+)\s*(\[.*\])?\s*;?\s*$")


def parse_edge_list(text: str) -> RootedTree:
    lines = text.splitlines()
    m = _HEADER.match(lines[0]) if lines else None
    if not m:
        raise ValueError("missing '# vertices=<N> root=<r>' header")
    n, root = int(m.group(1)), int(m.group(2))
    edges = [tuple(map(int, ln.split())) for ln in lines[1:] if ln.strip()]
    return RootedTree.from_edges(n, edges, root)


def parse_dot(text: str) -> RootedTree:
    edges, nodes = [], {0}
    for ln in text.splitlines():
        if m := _DOT_EDGE.match(ln):
            u, v = int(m.group(1)), int(m.group(2))
            edges.append((u, v))
            nodes.update((u, v))
        elif m := _DOT_NODE.match(ln):
            nodes.add(int(m.group(1)))
    return RootedTree.from_edges(len(nodes), edges, 0)
