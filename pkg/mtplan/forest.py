"""
Search trees, the multi-tree forest, tree-proximity detection and merging.

Node positions of every tree are mirrored into a growable numpy array so
nearest-neighbor and all-pairs scans are vectorised. Every distance in this
module, scalar or vectorised, is ``sqrt(dh * dh + dv * dv)`` so incremental and
full-scan results agree to the last bit.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict, deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np

from .interfaces import InvalidNodeError
from .kinodynamics import State
from .logging_config import get_logger
from .workspace.grid import OccupancyGrid, distance, segment_collision_free

logger = get_logger(__name__)

ROOTED_TREE_ID = 0
DEFAULT_BUCKET_SIZE = 16.0

UidPair = FrozenSet[int]


class TreeKind(str, Enum):
    ROOTED = "rooted"
    HEURISTIC = "heuristic"


class GridBucketIndex:
    """
    Uniform-grid bucket index over one tree's node positions.

    Queries search rings of buckets outward from the query cell and stop once
    no farther ring can hold a closer node, so results equal the linear scan,
    lowest index first on ties.
    """

    def __init__(self, cell_size: float = DEFAULT_BUCKET_SIZE):
        if cell_size <= 0:
            raise ValueError(f"Bucket size must be positive, got {cell_size}")
        self.cell_size = cell_size
        self._buckets: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        self._lo = [math.inf, math.inf]
        self._hi = [-math.inf, -math.inf]

    def _cell(self, p: Tuple[float, float]) -> Tuple[int, int]:
        return int(math.floor(p[0] / self.cell_size)), int(math.floor(p[1] / self.cell_size))

    def insert(self, index: int, p: Tuple[float, float]) -> None:
        cell = self._cell(p)
        self._buckets[cell].append(index)
        self._lo = [min(self._lo[0], cell[0]), min(self._lo[1], cell[1])]
        self._hi = [max(self._hi[0], cell[0]), max(self._hi[1], cell[1])]

    def nearest(self, q: Tuple[float, float], positions: np.ndarray) -> int:
        """Index of the node closest to q (lowest index on ties)."""
        if not self._buckets:
            raise InvalidNodeError("Nearest-neighbor query on an empty index")
        qc = self._cell(q)
        reach = int(max(
            abs(qc[0] - self._lo[0]), abs(qc[0] - self._hi[0]),
            abs(qc[1] - self._lo[1]), abs(qc[1] - self._hi[1]),
        ))
        best: Tuple[float, int] = (math.inf, -1)
        for ring in range(reach + 1):
            for cell in _ring_cells(qc, ring):
                for index in self._buckets.get(cell, ()):
                    d = distance(positions[index], q)
                    if (d, index) < best:
                        best = (d, index)
            # every node in ring + 1 or beyond is at least ring * cell_size away
            if best[1] >= 0 and best[0] < ring * self.cell_size:
                break
        return best[1]


def _ring_cells(centre: Tuple[int, int], ring: int) -> Iterator[Tuple[int, int]]:
    """Cells at Chebyshev distance exactly ``ring`` from centre."""
    ch, cv = centre
    if ring == 0:
        yield centre
        return
    for dh in range(-ring, ring + 1):
        yield ch + dh, cv - ring
        yield ch + dh, cv + ring
    for dv in range(-ring + 1, ring):
        yield ch - ring, cv + dv
        yield ch + ring, cv + dv


class Tree:
    """
    Search tree with parent links.

    Node ``k``'s parent always has an index smaller than ``k``; node 0 is the
    root. Each node also carries a uid that is unique across the forest the
    tree belongs to.
    """

    def __init__(
        self,
        root: State,
        kind: TreeKind = TreeKind.HEURISTIC,
        use_spatial_index: bool = False,
        bucket_size: float = DEFAULT_BUCKET_SIZE,
    ):
        """
        Create a single-node tree.

        Args:
            root: Root state
            kind: Rooted (kinodynamic, from the start) or heuristic (geometric)
            use_spatial_index: Answer nearest-neighbor queries from a bucket index
            bucket_size: Bucket edge length for the spatial index (px)
        """
        self.kind = TreeKind(kind)
        self.tree_id: Optional[int] = None
        self.nodes: List[State] = []
        self.parents: List[Optional[int]] = []
        self.uids: List[int] = []
        self._uid_source: Iterator[int] = itertools.count()
        self._xy = np.empty((16, 2), dtype=float)
        self._index = GridBucketIndex(bucket_size) if use_spatial_index else None
        self._listener: Optional[Callable[[Tree, int], None]] = None
        self._append(root, None, next(self._uid_source))

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"Tree(id={self.tree_id}, kind={self.kind.value}, nodes={len(self.nodes)})"

    @property
    def root(self) -> State:
        return self.nodes[0]

    @property
    def positions(self) -> np.ndarray:
        """(n, 2) view of node positions."""
        return self._xy[:len(self.nodes)]

    @property
    def uses_spatial_index(self) -> bool:
        return self._index is not None

    def _append(self, x: State, parent: Optional[int], uid: int) -> int:
        index = len(self.nodes)
        if index == self._xy.shape[0]:
            grown = np.empty((2 * index, 2), dtype=float)
            grown[:index] = self._xy
            self._xy = grown
        self._xy[index] = (x.pos[0], x.pos[1])
        self.nodes.append(x)
        self.parents.append(parent)
        self.uids.append(uid)
        if self._index is not None:
            self._index.insert(index, x.pos)
        return index

    def add_node(self, x: State, parent: int) -> int:
        """
        Append a node under ``parent``; the caller has collision-checked the edge.

        Returns:
            Index of the new node

        Raises:
            InvalidNodeError: If the parent index does not exist
        """
        if not 0 <= parent < len(self.nodes):
            raise InvalidNodeError(f"Parent index {parent} out of range for tree of {len(self.nodes)} nodes")
        index = self._append(x, parent, next(self._uid_source))
        if self._listener is not None:
            self._listener(self, index)
        return index

    def nearest_neighbor(self, q: Tuple[float, float]) -> int:
        """Index of the node nearest to q by Euclidean position distance; lowest index on ties."""
        if self._index is not None:
            return self._index.nearest(q, self.positions)
        xy = self.positions
        dh = xy[:, 0] - q[0]
        dv = xy[:, 1] - q[1]
        return int(np.argmin(np.sqrt(dh * dh + dv * dv)))

    def dist_to_tree(self, q: Tuple[float, float]) -> Tuple[float, int]:
        """Distance from q to its nearest node, and that node's index."""
        index = self.nearest_neighbor(q)
        return distance(self.nodes[index].pos, q), index

    def path_to_root(self, index: int) -> List[int]:
        """Node indices from ``index`` up to the root."""
        if not 0 <= index < len(self.nodes):
            raise InvalidNodeError(f"Node index {index} out of range for tree of {len(self.nodes)} nodes")
        path = [index]
        parent = self.parents[index]
        while parent is not None:
            path.append(parent)
            parent = self.parents[parent]
        return path

    def path_between(self, a: int, b: int) -> List[int]:
        """Node indices along the tree from ``a`` to ``b``, both included."""
        up_a = self.path_to_root(a)
        up_b = self.path_to_root(b)
        on_b = {node: k for k, node in enumerate(up_b)}
        meet = next(k for k, node in enumerate(up_a) if node in on_b)
        return up_a[:meet + 1] + list(reversed(up_b[:on_b[up_a[meet]]]))

    def edges(self) -> Iterator[Tuple[int, int]]:
        """(parent, child) index pairs."""
        for child, parent in enumerate(self.parents):
            if parent is not None:
                yield parent, child

    def bind(self, tree_id: int, uid_source: Iterator[int], listener: Optional[Callable[[Tree, int], None]]) -> None:
        """Attach the tree to a forest: new id, forest-wide uids, node-added callback."""
        self.tree_id = tree_id
        self._uid_source = uid_source
        self.uids = [next(uid_source) for _ in self.nodes]
        self._listener = listener


def nearest_neighbor(tree: Tree, q: Tuple[float, float]) -> int:
    """Index of the node of ``tree`` closest to q."""
    return tree.nearest_neighbor(q)


def add_node(tree: Tree, x: State, parent: int) -> int:
    """Append x under parent and return its index."""
    return tree.add_node(x, parent)


def dist_to_tree(tree: Tree, q: Tuple[float, float]) -> Tuple[float, int]:
    """(distance, node index) of the node of ``tree`` nearest to q."""
    return tree.dist_to_tree(q)


def _bfs_from(tree: Tree, start: int) -> Tuple[List[int], Dict[int, Optional[int]]]:
    """Breadth-first order over the undirected tree from ``start`` and the new parent map."""
    adjacency: Dict[int, List[int]] = defaultdict(list)
    for parent, child in tree.edges():
        adjacency[parent].append(child)
        adjacency[child].append(parent)
    order = [start]
    new_parent: Dict[int, Optional[int]] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for neighbour in sorted(adjacency[node]):
            if neighbour not in new_parent:
                new_parent[neighbour] = node
                order.append(neighbour)
                queue.append(neighbour)
    return order, new_parent


def farthest_node(tree: Tree, start: int) -> int:
    """A node with the most tree edges between it and ``start``."""
    if not 0 <= start < len(tree):
        raise InvalidNodeError(f"Node index {start} out of range for tree of {len(tree)} nodes")
    order, _ = _bfs_from(tree, start)
    return order[-1]


def reroot(tree: Tree, new_root: int) -> Tree:
    """
    Return a copy of ``tree`` rooted at ``new_root``.

    Parent links along the path from new_root to the old root are reversed;
    nodes are renumbered breadth-first so parents still precede children.
    Node uids are carried over.
    """
    if not 0 <= new_root < len(tree):
        raise InvalidNodeError(f"Node index {new_root} out of range for tree of {len(tree)} nodes")
    order, new_parent = _bfs_from(tree, new_root)
    renumber = {old: k for k, old in enumerate(order)}
    result = Tree(tree.nodes[new_root], tree.kind, use_spatial_index=tree.uses_spatial_index)
    result.uids = [tree.uids[new_root]]
    for old in order[1:]:
        result._append(tree.nodes[old], renumber[new_parent[old]], tree.uids[old])
    result.tree_id = tree.tree_id
    return result


@dataclass(frozen=True)
class ConnectionEvent:
    """Two trees whose closest node pair is nearer than the connection threshold."""

    tree_a: int
    tree_b: int
    node_a: int
    node_b: int
    distance: float

    @property
    def involves_rooted(self) -> bool:
        return self.tree_a == ROOTED_TREE_ID

    def uid_pair(self, forest: Forest) -> UidPair:
        return frozenset((
            forest.get(self.tree_a).uids[self.node_a],
            forest.get(self.tree_b).uids[self.node_b],
        ))


class Forest:
    """
    One rooted tree (id 0) plus heuristic trees with ascending ids.

    When ``lambda_connect`` is given a ProximityIndex is kept up to date on every
    tree and node insertion, and ``find_connection`` answers from it.
    """

    def __init__(self, rooted: Tree, lambda_connect: Optional[float] = None):
        """
        Initialize the forest around the rooted tree.

        Args:
            rooted: Tree grown from the query start; must be of kind ROOTED
            lambda_connect: Proximity threshold for the incremental index, or None for full scans
        """
        if rooted.kind is not TreeKind.ROOTED:
            raise ValueError("The first tree of a forest must be the rooted tree")
        self._uids: Iterator[int] = itertools.count()
        self._trees: Dict[int, Tree] = {}
        self._next_id = ROOTED_TREE_ID
        self.lambda_connect = lambda_connect
        self.excluded: Set[UidPair] = set()
        self.proximity = ProximityIndex(self, lambda_connect) if lambda_connect is not None else None
        self.add_tree(rooted)

    def __len__(self) -> int:
        return len(self._trees)

    def __contains__(self, tree_id: int) -> bool:
        return tree_id in self._trees

    @property
    def rooted(self) -> Tree:
        return self._trees[ROOTED_TREE_ID]

    @property
    def heuristic_trees(self) -> List[Tree]:
        return [tree for tree_id, tree in self._trees.items() if tree_id != ROOTED_TREE_ID]

    @property
    def tree_ids(self) -> List[int]:
        return list(self._trees)

    def trees(self) -> List[Tree]:
        return list(self._trees.values())

    def get(self, tree_id: int) -> Tree:
        try:
            return self._trees[tree_id]
        except KeyError:
            raise KeyError(f"No tree with id {tree_id} in forest") from None

    def node_count(self) -> int:
        return sum(len(tree) for tree in self._trees.values())

    def add_tree(self, tree: Tree) -> int:
        """Adopt a tree, assigning the next id and forest-wide node uids."""
        if self._trees and tree.kind is TreeKind.ROOTED:
            raise ValueError("A forest holds exactly one rooted tree")
        tree_id = self._next_id
        self._next_id += 1
        tree.bind(tree_id, self._uids, self._on_node_added)
        self._trees[tree_id] = tree
        if self.proximity is not None:
            self.proximity.tree_added(tree)
        return tree_id

    def remove_tree(self, tree_id: int) -> Tree:
        if tree_id == ROOTED_TREE_ID:
            raise ValueError("The rooted tree cannot be removed")
        tree = self._trees.pop(tree_id)
        tree._listener = None
        if self.proximity is not None:
            self.proximity.tree_removed(tree)
        return tree

    def _on_node_added(self, tree: Tree, index: int) -> None:
        if self.proximity is not None:
            self.proximity.node_added(tree, index)

    def absorb(self, tree_a: int, tree_b: int, node_a: int, node_b: int) -> None:
        """
        Move every node of tree_b into tree_a with node_b attached under node_a.

        tree_b is re-rooted at node_b; nodes are appended breadth-first from
        node_b so parent indices stay below child indices.
        """
        target = self.get(tree_a)
        source = self.get(tree_b)
        order, new_parent = _bfs_from(source, node_b)
        first = len(target)
        renumber = {old: first + k for k, old in enumerate(order)}
        for old in order:
            parent = new_parent[old]
            target._append(source.nodes[old], node_a if parent is None else renumber[parent], source.uids[old])
        del self._trees[tree_b]
        source._listener = None
        if self.proximity is not None:
            self.proximity.trees_merged(target, tree_b, first)

    def _index(self) -> ProximityIndex:
        if self.proximity is None:
            raise ValueError("Forest has no connection threshold")
        return self.proximity

    def find_connection(self) -> Optional[ConnectionEvent]:
        """First close tree pair, rooted-tree pairs first."""
        return self._index().first_event()

    def close_pairs(self, tree_a: int, tree_b: int) -> List[Tuple[float, int, int]]:
        """Non-excluded node pairs of two trees nearer than lambda_connect, sorted by (d, index_a, index_b)."""
        return self._index().close_pairs(tree_a, tree_b)

    def first_free_connection(
        self, grid: OccupancyGrid, rejected: Optional[List[ConnectionEvent]] = None
    ) -> Optional[ConnectionEvent]:
        """
        First close tree pair that can be joined by a collision-free segment.

        Node pairs of the pair reported by ``find_connection`` are tried nearest
        first. Colliding ones are excluded (and appended to ``rejected``); a tree
        pair left without a free node pair is skipped for the next one.

        Returns:
            The nearest free node pair of the first such tree pair, or None
        """
        while True:
            event = self.find_connection()
            if event is None:
                return None
            tree_a, tree_b = self.get(event.tree_a), self.get(event.tree_b)
            found: Optional[ConnectionEvent] = None
            for d, i, j in self.close_pairs(event.tree_a, event.tree_b):
                candidate = ConnectionEvent(event.tree_a, event.tree_b, i, j, d)
                if segment_collision_free(grid, tree_a.nodes[i].pos, tree_b.nodes[j].pos):
                    found = candidate
                    break
                self.excluded.add(candidate.uid_pair(self))
                if rejected is not None:
                    rejected.append(candidate)
            best = None if found is None else (found.distance, found.node_a, found.node_b)
            self._index().set_pair(event.tree_a, event.tree_b, best)
            if found is not None:
                return found

    def audit(self, grid: OccupancyGrid, start: Optional[Tuple[float, float]] = None) -> List[str]:
        """
        Check every tree and forest invariant.

        Returns:
            Human-readable violations; empty when the forest is consistent
        """
        violations: List[str] = []
        seen: Dict[int, int] = {}
        for tree_id, tree in self._trees.items():
            expected_kind = TreeKind.ROOTED if tree_id == ROOTED_TREE_ID else TreeKind.HEURISTIC
            if tree.kind is not expected_kind:
                violations.append(f"tree {tree_id}: kind {tree.kind.value}, expected {expected_kind.value}")
            if tree.parents[0] is not None:
                violations.append(f"tree {tree_id}: node 0 has parent {tree.parents[0]}")
            for child, parent in enumerate(tree.parents[1:], start=1):
                if parent is None:
                    violations.append(f"tree {tree_id}: node {child} is a second root")
                elif not 0 <= parent < child:
                    violations.append(f"tree {tree_id}: node {child} has parent {parent} (must precede it)")
                elif not segment_collision_free(grid, tree.nodes[parent].pos, tree.nodes[child].pos):
                    violations.append(f"tree {tree_id}: edge {parent}->{child} collides")
            if len(tree.uids) != len(tree.nodes):
                violations.append(f"tree {tree_id}: {len(tree.uids)} uids for {len(tree.nodes)} nodes")
            for uid in tree.uids:
                if uid in seen:
                    violations.append(f"tree {tree_id}: node uid {uid} also in tree {seen[uid]}")
                seen[uid] = tree_id
            if not np.array_equal(tree.positions, np.array([n.pos for n in tree.nodes], dtype=float).reshape(-1, 2)):
                violations.append(f"tree {tree_id}: position cache out of sync")
        if start is not None and tuple(self.rooted.root.pos) != (start[0], start[1]):
            violations.append(f"rooted tree root {tuple(self.rooted.root.pos)} is not the start {tuple(start)}")
        return violations


def _masked_distances(tree_a: Tree, tree_b: Tree, excluded: Iterable[UidPair]) -> np.ndarray:
    pa = tree_a.positions
    pb = tree_b.positions
    dh = pa[:, 0][:, None] - pb[:, 0][None, :]
    dv = pa[:, 1][:, None] - pb[:, 1][None, :]
    d = np.sqrt(dh * dh + dv * dv)
    if excluded:
        index_a = {uid: k for k, uid in enumerate(tree_a.uids)}
        index_b = {uid: k for k, uid in enumerate(tree_b.uids)}
        for pair in excluded:
            u1, u2 = tuple(pair)
            if u1 in index_a and u2 in index_b:
                d[index_a[u1], index_b[u2]] = np.inf
            elif u2 in index_a and u1 in index_b:
                d[index_a[u2], index_b[u1]] = np.inf
    return d


def detect_connection(
    forest: Forest, lambda_connect: float, excluded: Iterable[UidPair] = frozenset()
) -> Optional[ConnectionEvent]:
    """
    Full-scan tree proximity check.

    Pairs are visited rooted x heuristic first, then heuristic x heuristic, in
    ascending id order; the first pair whose closest nodes are nearer than
    ``lambda_connect`` is reported with that closest pair (lowest indices on ties).
    Node-uid pairs in ``excluded`` are ignored.
    """
    excluded = frozenset(excluded)
    ids = forest.tree_ids
    for a_pos, a in enumerate(ids):
        for b in ids[a_pos + 1:]:
            tree_a, tree_b = forest.get(a), forest.get(b)
            d = _masked_distances(tree_a, tree_b, excluded)
            flat = int(np.argmin(d))
            i, j = divmod(flat, d.shape[1])
            if d[i, j] < lambda_connect:
                return ConnectionEvent(a, b, i, j, float(d[i, j]))
    return None


def merge_trees(forest: Forest, ev: ConnectionEvent, grid: OccupancyGrid) -> bool:
    """
    Join two heuristic trees through the event's closest node pair.

    Returns:
        True if the connecting segment is free and tree_b was absorbed into
        tree_a; False (forest unchanged) if the segment collides
    """
    if ev.involves_rooted or ev.tree_b == ROOTED_TREE_ID:
        raise ValueError("Rooted-tree connections are handled by the planner, not merged")
    tree_a, tree_b = forest.get(ev.tree_a), forest.get(ev.tree_b)
    if not segment_collision_free(grid, tree_a.nodes[ev.node_a].pos, tree_b.nodes[ev.node_b].pos):
        logger.debug(
            f"Merge of trees {ev.tree_a} and {ev.tree_b} rejected: connecting segment collides",
            extra={"tree_a": ev.tree_a, "tree_b": ev.tree_b},
        )
        return False
    size_b = len(tree_b)
    forest.absorb(ev.tree_a, ev.tree_b, ev.node_a, ev.node_b)
    logger.debug(
        f"Merged tree {ev.tree_b} ({size_b} nodes) into tree {ev.tree_a}",
        extra={"tree_a": ev.tree_a, "tree_b": ev.tree_b},
    )
    return True


class ProximityIndex:
    """
    Incremental tree-proximity bookkeeping over all forest nodes.

    Nodes are hashed into square buckets of edge ``radius``, so any node pair
    closer than ``radius`` sits in neighbouring buckets. For each tree pair the
    closest qualifying node pair is kept as ``(distance, index_a, index_b)``;
    the first event is the lexicographically smallest tree pair, which makes
    the answer identical to ``detect_connection``.
    """

    def __init__(self, forest: Forest, radius: float):
        if radius <= 0:
            raise ValueError(f"Proximity radius must be positive, got {radius}")
        self.forest = forest
        self.radius = radius
        self._buckets: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        self._where: Dict[int, Tuple[int, int]] = {}
        self._cell_of: Dict[int, Tuple[int, int]] = {}
        self._best: Dict[Tuple[int, int], Tuple[float, int, int]] = {}

    def _cell(self, p: Tuple[float, float]) -> Tuple[int, int]:
        return int(math.floor(p[0] / self.radius)), int(math.floor(p[1] / self.radius))

    def _neighbours(self, p: Tuple[float, float], rings: int = 1) -> Iterator[int]:
        ch, cv = self._cell(p)
        for dh in range(-rings, rings + 1):
            for dv in range(-rings, rings + 1):
                yield from self._buckets.get((ch + dh, cv + dv), ())

    def _register(self, tree: Tree, index: int) -> None:
        uid = tree.uids[index]
        cell = self._cell(tree.nodes[index].pos)
        self._buckets[cell].append(uid)
        self._where[uid] = (tree.tree_id, index)
        self._cell_of[uid] = cell

    def _offer(self, tree_id: int, index: int, other_id: int, other_index: int, d: float) -> None:
        if tree_id < other_id:
            key, value = (tree_id, other_id), (d, index, other_index)
        else:
            key, value = (other_id, tree_id), (d, other_index, index)
        current = self._best.get(key)
        if current is None or value < current:
            self._best[key] = value

    def _scan_node(self, tree: Tree, index: int, only: Optional[int] = None) -> None:
        p = tree.nodes[index].pos
        uid = tree.uids[index]
        for other_uid in self._neighbours(p):
            other_id, other_index = self._where[other_uid]
            if other_id == tree.tree_id or (only is not None and other_id != only):
                continue
            d = distance(p, self.forest.get(other_id).nodes[other_index].pos)
            if d < self.radius and frozenset((uid, other_uid)) not in self.forest.excluded:
                self._offer(tree.tree_id, index, other_id, other_index, d)

    def tree_added(self, tree: Tree) -> None:
        for index in range(len(tree)):
            self._register(tree, index)
        for index in range(len(tree)):
            self._scan_node(tree, index)

    def node_added(self, tree: Tree, index: int) -> None:
        self._register(tree, index)
        self._scan_node(tree, index)

    def tree_removed(self, tree: Tree) -> None:
        for uid in tree.uids:
            self._buckets[self._cell_of.pop(uid)].remove(uid)
            del self._where[uid]
        self._drop_pairs(tree.tree_id)

    def trees_merged(self, target: Tree, absorbed_id: int, first_new: int) -> None:
        # pairs already held by target keep their indices; only absorbed nodes need a scan
        for index in range(first_new, len(target)):
            self._where[target.uids[index]] = (target.tree_id, index)
        self._drop_pairs(absorbed_id)
        for index in range(first_new, len(target)):
            self._scan_node(target, index)

    def close_pairs(self, tree_a: int, tree_b: int) -> List[Tuple[float, int, int]]:
        """Non-excluded node pairs of two trees closer than the radius, as sorted (d, index_a, index_b)."""
        first, second = self.forest.get(tree_a), self.forest.get(tree_b)
        swapped = len(second) < len(first)
        if swapped:
            first, second = second, first
        pairs = []
        for index in range(len(first)):
            p = first.nodes[index].pos
            uid = first.uids[index]
            for other_uid in self._neighbours(p):
                other_id, other_index = self._where[other_uid]
                if other_id != second.tree_id:
                    continue
                d = distance(p, second.nodes[other_index].pos)
                if d < self.radius and frozenset((uid, other_uid)) not in self.forest.excluded:
                    pairs.append((d, other_index, index) if swapped else (d, index, other_index))
        pairs.sort()
        return pairs

    def set_pair(self, tree_a: int, tree_b: int, best: Optional[Tuple[float, int, int]]) -> None:
        """Store the closest qualifying pair of tree_a < tree_b, or forget the pair when None."""
        if best is None:
            self._best.pop((tree_a, tree_b), None)
        else:
            self._best[(tree_a, tree_b)] = best

    def _drop_pairs(self, tree_id: int) -> None:
        for key in [key for key in self._best if tree_id in key]:
            del self._best[key]

    def first_event(self) -> Optional[ConnectionEvent]:
        if not self._best:
            return None
        key = min(self._best)
        d, index_a, index_b = self._best[key]
        return ConnectionEvent(key[0], key[1], index_a, index_b, d)

    def nearest_within(
        self, q: Tuple[float, float], radius: float, exclude_tree: Optional[int] = ROOTED_TREE_ID
    ) -> Optional[Tuple[float, int, int]]:
        """
        Nearest node to q closer than ``radius``, ignoring one tree.

        Returns:
            (distance, tree_id, node_index) ordered by distance then ids, or None
        """
        rings = max(1, int(math.ceil(radius / self.radius)))
        best: Optional[Tuple[float, int, int]] = None
        for uid in self._neighbours(q, rings):
            tree_id, index = self._where[uid]
            if tree_id == exclude_tree:
                continue
            d = distance(self.forest.get(tree_id).nodes[index].pos, q)
            if d < radius and (best is None or (d, tree_id, index) < best):
                best = (d, tree_id, index)
        return best
