"""Simplicial partitions of the unit simplex.

The partition starts as the standard simplex itself and is refined by
longest-edge bisection (ties broken by the lowest vertex-id pair). Midpoint
vertices are deduplicated against the pool, so neighbouring simplices share
edge midpoints. Coordinates stay dyadic under bisection, which keeps the
midpoint arithmetic exact and the dedup test a bitwise comparison.

Both polyhedral cone approximations are generated from here: single vertices
give rank-one inner generators, vertex pairs of a common simplex give outer
generators.
"""

import json
from pathlib import Path

import numpy as np

COORD_TOL = 1e-12


class SimplicialPartition:
    """Vertex pool plus alive simplices covering the unit simplex."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be a positive integer")
        self.n = n
        self._vertices: list[np.ndarray] = []
        self._vkeys: dict[bytes, int] = {}
        self.simplices: dict[int, tuple[int, ...]] = {}
        self._incidence: dict[int, set[int]] = {}  # vertex id -> alive simplex ids
        self._next_id = 0
        self._pool_cache: np.ndarray | None = None

    @classmethod
    def initial(cls, n: int) -> "SimplicialPartition":
        """Single simplex on the n unit coordinate vectors."""
        part = cls(n)
        for i in range(n):
            v = np.zeros(n)
            v[i] = 1.0
            part._add_vertex(v)
        part._insert_simplex(tuple(range(n)))
        return part

    def _insert_simplex(self, vids: tuple[int, ...]) -> int:
        sid = self._next_id
        self._next_id += 1
        self.simplices[sid] = vids
        for v in vids:
            self._incidence.setdefault(v, set()).add(sid)
        return sid

    def _remove_simplex(self, sid: int) -> None:
        for v in self.simplices.pop(sid):
            self._incidence[v].discard(sid)

    # -- vertex pool ---------------------------------------------------

    def _add_vertex(self, v: np.ndarray) -> int:
        key = v.tobytes()
        found = self._vkeys.get(key)
        if found is not None:
            return found
        v = v.copy()
        v.flags.writeable = False
        idx = len(self._vertices)
        self._vertices.append(v)
        self._vkeys[key] = idx
        self._pool_cache = None
        return idx

    def vertex(self, vid: int) -> np.ndarray:
        return self._vertices[vid]

    @property
    def vertex_count(self) -> int:
        return len(self._vertices)

    def vertex_matrix(self) -> np.ndarray:
        """Pool vertices as columns, shape (n, vertex_count)."""
        if self._pool_cache is None or self._pool_cache.shape[1] != len(self._vertices):
            self._pool_cache = np.column_stack(self._vertices)
        return self._pool_cache

    # -- simplex queries -------------------------------------------------

    def simplex_ids(self) -> list[int]:
        return sorted(self.simplices)

    def _require(self, simplex_id: int) -> tuple[int, ...]:
        try:
            return self.simplices[simplex_id]
        except KeyError:
            raise KeyError(f"unknown simplex id {simplex_id}") from None

    def simplex_matrix(self, simplex_id: int) -> np.ndarray:
        """Vertices of one simplex as columns, shape (n, n)."""
        vids = self._require(simplex_id)
        return np.column_stack([self._vertices[i] for i in vids])

    def diameter(self, simplex_id: int) -> float:
        """Max pairwise Euclidean distance among the simplex's vertices."""
        vids = self._require(simplex_id)
        best = 0.0
        for a in range(len(vids)):
            va = self._vertices[vids[a]]
            for b in range(a + 1, len(vids)):
                d = float(np.linalg.norm(va - self._vertices[vids[b]]))
                if d > best:
                    best = d
        return best

    def volume(self, simplex_id: int) -> float:
        """|det| of the vertex matrix; relative units (initial simplex = 1)."""
        return abs(float(np.linalg.det(self.simplex_matrix(simplex_id))))

    def total_volume(self) -> float:
        return sum(self.volume(s) for s in self.simplices)

    def max_diameter_simplex(self) -> int:
        """Alive simplex of maximum diameter; ties go to the lowest id."""
        best_id = -1
        best_d = -1.0
        for sid in self.simplex_ids():
            d = self.diameter(sid)
            if d > best_d:
                best_d = d
                best_id = sid
        return best_id

    def contains(self, simplex_id: int, point: np.ndarray, tol: float = 1e-10) -> bool:
        """Barycentric membership test for a point on the unit simplex."""
        B = self.simplex_matrix(simplex_id)
        try:
            alpha = np.linalg.solve(B, np.asarray(point, dtype=np.float64))
        except np.linalg.LinAlgError:
            return False
        return bool(np.all(alpha >= -tol))

    def longest_edge(self, simplex_id: int) -> tuple[int, int]:
        """Longest edge as a pool-id pair; exact ties pick the lowest pair."""
        vids = sorted(self._require(simplex_id))
        if len(vids) < 2:
            raise ValueError("zero-dimensional simplex has no edges")
        best = (-1.0, -1, -1)
        for a in range(len(vids)):
            va = self._vertices[vids[a]]
            for b in range(a + 1, len(vids)):
                d = float(np.linalg.norm(va - self._vertices[vids[b]]))
                if d > best[0]:
                    best = (d, vids[a], vids[b])
        return best[1], best[2]

    def simplices_containing(self, *vids: int) -> list[int]:
        """Alive simplex ids whose vertex set includes all the given vertices."""
        sets = [self._incidence.get(v, set()) for v in vids]
        if not sets:
            return sorted(self.simplices)
        return sorted(set.intersection(*sets))

    # -- refinement -----------------------------------------------------

    def bisect(self, simplex_id: int, edge: tuple[int, int] | None = None) -> tuple[int, int]:
        """Split a simplex at an edge midpoint (longest edge by default).

        Returns the two child ids; the parent id becomes invalid. The first
        child keeps the lower endpoint of the split edge.
        """
        vids = self._require(simplex_id)
        if edge is None:
            i, j = self.longest_edge(simplex_id)
        else:
            i, j = edge
            if i == j or i not in vids or j not in vids:
                raise ValueError(f"({i}, {j}) is not an edge of simplex {simplex_id}")
            if i > j:
                i, j = j, i
        mid = 0.5 * (self._vertices[i] + self._vertices[j])
        mid_id = self._add_vertex(mid)
        child_a = tuple(sorted(mid_id if v == j else v for v in vids))
        child_b = tuple(sorted(mid_id if v == i else v for v in vids))
        self._remove_simplex(simplex_id)
        id_a = self._insert_simplex(child_a)
        id_b = self._insert_simplex(child_b)
        return id_a, id_b

    # -- debug dump -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": [v.tolist() for v in self._vertices],
            "simplices": [list(self.simplices[s]) for s in self.simplex_ids()],
        }

    def dump_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=1))

    # -- invariants (used by tests) --------------------------------------

    def validate(self, check_overlap_samples: int = 0, rng: np.random.Generator | None = None) -> None:
        """Raise AssertionError if any structural invariant is violated."""
        pool = self.vertex_matrix()
        assert np.all(pool >= -COORD_TOL), "vertex with negative coordinate"
        assert np.max(np.abs(pool.sum(axis=0) - 1.0)) <= 1e-11, "vertex off the simplex"
        for a in range(pool.shape[1]):
            for b in range(a + 1, pool.shape[1]):
                assert np.max(np.abs(pool[:, a] - pool[:, b])) >= COORD_TOL, (
                    f"vertices {a} and {b} closer than {COORD_TOL}"
                )
        if self.n > 1:
            for sid in self.simplices:
                det = float(np.linalg.det(self.simplex_matrix(sid)))
                assert abs(det) > COORD_TOL, f"degenerate simplex {sid}"
            assert abs(self.total_volume() - 1.0) <= 1e-9, "covering volume lost"
        if check_overlap_samples and self.n > 1:
            rng = rng or np.random.default_rng(0)
            for _ in range(check_overlap_samples):
                w = rng.dirichlet(np.full(self.n, 2.0))
                hits = sum(self.contains(sid, w, tol=-1e-12) for sid in self.simplices)
                strict_hits = sum(self.contains(sid, w, tol=1e-9) for sid in self.simplices)
                assert strict_hits >= 1, "sampled point not covered"
                assert hits <= 1, "sampled interior point in two simplex interiors"


def initial_partition(n: int) -> SimplicialPartition:
    """Partition consisting of the standard simplex itself."""
    return SimplicialPartition.initial(n)


def bisect(partition: SimplicialPartition, simplex_id: int):
    """Longest-edge bisection; returns (partition, (child_a, child_b))."""
    return partition, partition.bisect(simplex_id)


def diameter(partition: SimplicialPartition, simplex_id: int) -> float:
    return partition.diameter(simplex_id)
