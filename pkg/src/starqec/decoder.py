"""Lookup-table decoding: full syndrome-to-correction tables with the
fault-derived priority rule, and the three-syndrome EC decision protocol."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .circuits import EcCircuit, build_ec_circuit
from .codes import CssCode
from .faulttol import (
    detector_rows,
    enumerate_single_fault_errors,
    syndrome_bits,
    verify_unique_syndromes,
)
from .gf2 import RowSpace
from .scheduling import CnotSchedule


class DecoderBuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class LookupTable:
    """Correction table for one error type, indexed by packed syndrome.

    ``detect_rows`` are the measured opposite-type check masks defining the
    syndrome bits; ``corrections[s]`` is a data-error mask with syndrome s.
    ``overridden`` lists syndromes where a fault-derived weight-2 error
    replaced the generic minimum-weight entry.
    """

    kind: str  # error type corrected: 'X' or 'Z'
    n: int
    detect_rows: tuple[int, ...]
    corrections: tuple[int, ...]
    overridden: frozenset[int]

    @property
    def syndrome_count(self) -> int:
        return len(self.corrections)

    def correction(self, syndrome: int) -> int:
        return self.corrections[syndrome]

    def syndrome_of(self, error: int) -> int:
        return syndrome_bits(self.detect_rows, error)


def build_lookup_table(
    code: CssCode, schedule: CnotSchedule, kind: str, circuit: EcCircuit | None = None
) -> LookupTable:
    """Build the table for ``kind``-type errors.

    Entries are minimum-weight errors (breadth-first over weight, ties to the
    lexicographically smallest support); entries whose syndrome matches a
    fault-derived weight<=2 residual are forced to be logically equivalent to
    that residual, which requires the unique-syndrome check to pass first.
    """
    if circuit is None:
        circuit = build_ec_circuit(code, schedule, rounds=1)
    uniqueness = verify_unique_syndromes(code, schedule, circuit)
    if not uniqueness.ok:
        raise DecoderBuildError(
            f"schedule fails the unique-syndrome condition: {uniqueness.collisions}"
        )
    det = detector_rows(code, kind, circuit)
    bits = len(det)
    size = 1 << bits
    column = [syndrome_bits(det, 1 << q) for q in range(code.n)]

    corrections: list[int | None] = [None] * size
    corrections[0] = 0
    frontier = [0]
    assigned = 1
    while frontier and assigned < size:
        next_frontier = []
        for s in frontier:
            e = corrections[s]
            for q in range(code.n):
                s2 = s ^ column[q]
                if corrections[s2] is None:
                    corrections[s2] = e | (1 << q)
                    next_frontier.append(s2)
                    assigned += 1
        frontier = next_frontier
    if assigned < size:
        raise DecoderBuildError(
            "syndrome map is not surjective; measured checks are not independent"
        )

    stabilizer = RowSpace.of_matrix(code.checks(kind))
    overridden = set()
    for fr in enumerate_single_fault_errors(code, schedule, kind, circuit):
        if fr.residual == 0 or fr.weight > 2:
            continue
        current = corrections[fr.syndrome]
        if not stabilizer.contains(current ^ fr.residual):
            corrections[fr.syndrome] = fr.residual
            overridden.add(fr.syndrome)

    return LookupTable(
        kind=kind,
        n=code.n,
        detect_rows=det,
        corrections=tuple(corrections),  # type: ignore[arg-type]
        overridden=frozenset(overridden),
    )


def build_tables(
    code: CssCode, schedule: CnotSchedule, circuit: EcCircuit | None = None
) -> dict[str, LookupTable]:
    """X- and Z-error tables; decoding of the two types is fully independent."""
    if circuit is None:
        circuit = build_ec_circuit(code, schedule, rounds=1)
    return {
        "X": build_lookup_table(code, schedule, "X", circuit),
        "Z": build_lookup_table(code, schedule, "Z", circuit),
    }


@dataclass(frozen=True)
class EcDecision:
    """Which syndrome (if any) the three-round protocol corrects on."""

    source: str  # 'none', 'repeated' or 'last'
    syndrome: int


def ec_decision(s1: int, s2: int, s3: int) -> EcDecision:
    """The three-round rule: two trivial syndromes mean no correction; else a
    repeated syndrome wins; else the last syndrome is used."""
    if (s1 == 0) + (s2 == 0) + (s3 == 0) >= 2:
        return EcDecision("none", 0)
    if s1 == s2 or s1 == s3:
        return EcDecision("repeated", s1)
    if s2 == s3:
        return EcDecision("repeated", s2)
    return EcDecision("last", s3)


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of ideal decoding: the corrected residual and afflicted logicals."""

    failed: bool
    afflicted: tuple[int, ...]
    corrected: int


def ideal_decode(code: CssCode, table: LookupTable, residual: int) -> DecodeOutcome:
    """Noiselessly measure, correct from the table, and report which logical
    qubits the corrected residual still acts on."""
    corrected = residual ^ table.correction(table.syndrome_of(residual))
    paired = code.logical_x if table.kind == "Z" else code.logical_z
    afflicted = tuple(
        i for i, op in enumerate(paired) if (corrected & op.bits).bit_count() & 1
    )
    return DecodeOutcome(failed=bool(afflicted), afflicted=afflicted, corrected=corrected)


def format_table(table: LookupTable) -> str:
    """Text dump: one `syndrome_hex correction_hex` row per syndrome, with
    overridden (fault-derived) entries marked."""
    lines = [
        f"# kind {table.kind}",
        f"# qubits {table.n}",
        f"# syndromes {table.syndrome_count}",
        f"# overridden {' '.join(hex(s) for s in sorted(table.overridden)) or '-'}",
    ]
    for s, corr in enumerate(table.corrections):
        lines.append(f"{s:0{(len(table.detect_rows) + 3) // 4}x} {corr:x}")
    return "\n".join(lines) + "\n"


def dump_table(table: LookupTable, path: str | Path) -> None:
    Path(path).write_text(format_table(table))
