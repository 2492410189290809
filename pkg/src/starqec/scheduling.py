"""CNOT scheduling for parity-check measurement.

Collision-free schedules correspond to vertex colorings of a scheduling
graph: one vertex per (qubit, check) incidence, a clique per qubit (its
CNOTs cannot be simultaneous) and a clique per check (its ancilla serves
one CNOT per step).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .codes import CssCode


@dataclass(frozen=True)
class SchedulingGraph:
    """Graph whose proper colorings are collision-free CNOT step assignments.

    Vertices are (qubit, kind, check_row) incidence triples; kind is 'X' or
    'Z' ('X'/'Z' only mixes in the interleaved variant).
    """

    vertices: tuple[tuple[int, str, int], ...]
    adjacency: tuple[frozenset[int], ...]

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def index_of(self, vertex: tuple[int, str, int]) -> int:
        return self._lookup[vertex]

    @property
    def _lookup(self) -> dict[tuple[int, str, int], int]:
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache


def _graph_from_cliques(
    vertices: list[tuple[int, str, int]], cliques: Iterable[list[int]]
) -> SchedulingGraph:
    adj: list[set[int]] = [set() for _ in vertices]
    for clique in cliques:
        for i, a in enumerate(clique):
            for b in clique[i + 1 :]:
                adj[a].add(b)
                adj[b].add(a)
    return SchedulingGraph(tuple(vertices), tuple(frozenset(a) for a in adj))


def build_check_graph(code: CssCode, kind: str) -> SchedulingGraph:
    """Scheduling graph for one check type measured on its own."""
    checks = code.checks(kind)
    vertices: list[tuple[int, str, int]] = []
    by_qubit: dict[int, list[int]] = {}
    by_check: dict[int, list[int]] = {}
    for row_idx, row in enumerate(checks.rows):
        for q in range(code.n):
            if (row >> q) & 1:
                idx = len(vertices)
                vertices.append((q, kind, row_idx))
                by_qubit.setdefault(q, []).append(idx)
                by_check.setdefault(row_idx, []).append(idx)
    return _graph_from_cliques(vertices, list(by_qubit.values()) + list(by_check.values()))


def build_interleaved_graph(code: CssCode) -> SchedulingGraph:
    """Scheduling graph with X- and Z-check CNOTs sharing one pool of steps."""
    vertices: list[tuple[int, str, int]] = []
    by_qubit: dict[int, list[int]] = {}
    by_check: dict[tuple[str, int], list[int]] = {}
    for kind in ("X", "Z"):
        for row_idx, row in enumerate(code.checks(kind).rows):
            for q in range(code.n):
                if (row >> q) & 1:
                    idx = len(vertices)
                    vertices.append((q, kind, row_idx))
                    by_qubit.setdefault(q, []).append(idx)
                    by_check.setdefault((kind, row_idx), []).append(idx)
    return _graph_from_cliques(vertices, list(by_qubit.values()) + list(by_check.values()))


@dataclass(frozen=True)
class Coloring:
    graph: SchedulingGraph
    colors: tuple[int, ...]

    @property
    def num_colors(self) -> int:
        return max(self.colors) + 1 if self.colors else 0

    def is_valid(self) -> bool:
        for v, nbrs in enumerate(self.graph.adjacency):
            for u in nbrs:
                if self.colors[u] == self.colors[v]:
                    return False
        return True

    def color_of(self, vertex: tuple[int, str, int]) -> int:
        return self.colors[self.graph.index_of(vertex)]


def dsatur_color(g: SchedulingGraph, priority: Sequence[int] | None = None) -> Coloring:
    """Greedy saturation coloring.

    Vertex selection: highest saturation, then highest degree, then lowest
    priority value (vertex index by default). Always valid, and uses at
    most max_degree + 1 colors.
    """
    n = len(g.vertices)
    if priority is None:
        priority = range(n)
    colors = [-1] * n
    saturation: list[set[int]] = [set() for _ in range(n)]
    degree = [len(a) for a in g.adjacency]
    for _ in range(n):
        best = -1
        best_key = None
        for v in range(n):
            if colors[v] != -1:
                continue
            key = (len(saturation[v]), degree[v], -priority[v])
            if best_key is None or key > best_key:
                best, best_key = v, key
        c = 0
        while c in saturation[best]:
            c += 1
        colors[best] = c
        for u in g.adjacency[best]:
            saturation[u].add(c)
    return Coloring(g, tuple(colors))


def rotated_priority(n: int, rotation: int) -> list[int]:
    """Priority ranks for the 'rotate the vertex order' retry strategy."""
    return [(i - rotation) % n for i in range(n)]


def shuffled_priority(n: int, attempt: int) -> list[int]:
    """Deterministically reordered priority ranks for retry ``attempt``.

    Attempt 0 is the natural order; later attempts use seeded shuffles,
    which explore far more colorings than plain rotations on small graphs.
    """
    if attempt == 0:
        return list(range(n))
    import numpy as np

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(attempt)))
    return rng.permutation(n).tolist()


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class CnotSchedule:
    """Timestep assignment of every (check, qubit) CNOT.

    Steps are 1-based; preparation occupies step 0 and measurement step
    m + 1, so a round takes T = m + 2 timesteps.
    """

    mode: str  # "separate" or "interleaved"
    steps: int
    cnots: tuple[tuple[int, str, int, int], ...]  # (step, kind, check_row, qubit)

    def __post_init__(self):
        if self.mode not in ("separate", "interleaved"):
            raise ScheduleError(f"unknown mode {self.mode!r}")
        seen = set()
        per_step_qubits: dict[int, set[int]] = {}
        per_step_checks: dict[int, set[tuple[str, int]]] = {}
        for step, kind, row, qubit in self.cnots:
            if not 1 <= step <= self.steps:
                raise ScheduleError(f"step {step} outside [1, {self.steps}]")
            if (kind, row, qubit) in seen:
                raise ScheduleError(f"incidence ({kind}{row}, q{qubit}) scheduled twice")
            seen.add((kind, row, qubit))
            if qubit in per_step_qubits.setdefault(step, set()):
                raise ScheduleError(f"qubit {qubit} busy twice in step {step}")
            per_step_qubits[step].add(qubit)
            if (kind, row) in per_step_checks.setdefault(step, set()):
                raise ScheduleError(f"check {kind}{row} busy twice in step {step}")
            per_step_checks[step].add((kind, row))

    @property
    def total_timesteps(self) -> int:
        return self.steps + 2

    def check_order(self, kind: str, row: int) -> list[tuple[int, int]]:
        """(step, qubit) pairs of one check, in time order."""
        out = [(s, q) for s, k, r, q in self.cnots if k == kind and r == row]
        out.sort()
        return out

    def step_of(self, kind: str, row: int, qubit: int) -> int:
        cache = self.__dict__.get("_step_cache")
        if cache is None:
            cache = {(k, r, q): s for s, k, r, q in self.cnots}
            object.__setattr__(self, "_step_cache", cache)
        return cache[(kind, row, qubit)]

    def by_step(self) -> dict[int, list[tuple[str, int, int]]]:
        out: dict[int, list[tuple[str, int, int]]] = {s: [] for s in range(1, self.steps + 1)}
        for s, k, r, q in self.cnots:
            out[s].append((k, r, q))
        return out

    def validate_against(self, code: CssCode) -> None:
        """Every (check, qubit) incidence of the code appears exactly once."""
        want = set()
        for kind in ("X", "Z"):
            for row_idx, row in enumerate(code.checks(kind).rows):
                for q in range(code.n):
                    if (row >> q) & 1:
                        want.add((kind, row_idx, q))
        have = {(k, r, q) for _, k, r, q in self.cnots}
        if want != have:
            missing = sorted(want - have)[:5]
            extra = sorted(have - want)[:5]
            raise ScheduleError(
                f"schedule does not match code incidences (missing {missing}, extra {extra})"
            )


def schedule_from_colorings(
    code: CssCode, coloring_x: Coloring, coloring_z: Coloring, mode: str = "separate"
) -> CnotSchedule:
    """Sequential schedule: all X-check CNOT steps first, then all Z-check steps."""
    if mode != "separate":
        raise ScheduleError("schedule_from_colorings builds separate-mode schedules")
    for coloring, kind in ((coloring_x, "X"), (coloring_z, "Z")):
        if not coloring.is_valid():
            raise ScheduleError(f"invalid {kind} coloring")
    mx = coloring_x.num_colors
    mz = coloring_z.num_colors
    cnots = []
    for (q, kind, row), color in zip(coloring_x.graph.vertices, coloring_x.colors):
        cnots.append((color + 1, kind, row, q))
    for (q, kind, row), color in zip(coloring_z.graph.vertices, coloring_z.colors):
        cnots.append((mx + color + 1, kind, row, q))
    schedule = CnotSchedule(mode="separate", steps=mx + mz, cnots=tuple(sorted(cnots)))
    schedule.validate_against(code)
    return schedule


def schedule_from_interleaved_coloring(code: CssCode, coloring: Coloring) -> CnotSchedule:
    if not coloring.is_valid():
        raise ScheduleError("invalid interleaved coloring")
    cnots = []
    for (q, kind, row), color in zip(coloring.graph.vertices, coloring.colors):
        cnots.append((color + 1, kind, row, q))
    schedule = CnotSchedule(
        mode="interleaved", steps=coloring.num_colors, cnots=tuple(sorted(cnots))
    )
    schedule.validate_against(code)
    return schedule


@dataclass
class PropernessReport:
    improper_pairs: list[tuple[int, int, tuple[int, ...]]]  # (x_row, z_row, shared qubits)
    structure_violations: list[tuple[int, int, int]]  # (x_row, z_row, overlap size)

    @property
    def ok(self) -> bool:
        return not self.improper_pairs and not self.structure_violations


def verify_properness(code: CssCode, schedule: CnotSchedule) -> PropernessReport:
    """Check that every X/Z check pair interacts with shared qubits in a
    consistent order (all X-first or all Z-first), so no measurement outcome
    is randomized. Pairs sharing an odd number of qubits are flagged as a
    code-structure violation."""
    improper = []
    structure = []
    for xi, rx in enumerate(code.hx.rows):
        for zj, rz in enumerate(code.hz.rows):
            shared = rx & rz
            w = shared.bit_count()
            if w == 0:
                continue
            if w % 2 == 1:
                structure.append((xi, zj, w))
                continue
            qubits = [q for q in range(code.n) if (shared >> q) & 1]
            directions = {
                schedule.step_of("X", xi, q) < schedule.step_of("Z", zj, q) for q in qubits
            }
            if len(directions) != 1:
                improper.append((xi, zj, tuple(qubits)))
    return PropernessReport(improper, structure)


def format_schedule(schedule: CnotSchedule) -> str:
    lines = [f"mode {schedule.mode}", f"steps {schedule.steps}"]
    for step, kind, row, qubit in schedule.cnots:
        lines.append(f"cnot {step} {kind} {row} {qubit}")
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> CnotSchedule:
    mode = None
    steps = None
    cnots = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "mode":
            mode = parts[1]
        elif parts[0] == "steps":
            steps = int(parts[1])
        elif parts[0] == "cnot":
            if len(parts) != 5:
                raise ScheduleError(f"line {line_no}: expected 'cnot t kind row qubit'")
            step, kind, row, qubit = int(parts[1]), parts[2], int(parts[3]), int(parts[4])
            if kind not in ("X", "Z"):
                raise ScheduleError(f"line {line_no}: kind must be X or Z")
            cnots.append((step, kind, row, qubit))
        else:
            raise ScheduleError(f"line {line_no}: unknown directive {parts[0]!r}")
    if mode is None or steps is None:
        raise ScheduleError("schedule file needs 'mode' and 'steps' headers")
    return CnotSchedule(mode=mode, steps=steps, cnots=tuple(sorted(cnots)))


def load_schedule(path: str | Path) -> CnotSchedule:
    return parse_schedule(Path(path).read_text())


def save_schedule(schedule: CnotSchedule, path: str | Path) -> None:
    Path(path).write_text(format_schedule(schedule))
