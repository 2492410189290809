"""Fault-tolerance verification and Monte Carlo estimation.

The EC unit is three noisy syndrome rounds followed by the three-syndrome
decision rule; an exRec is two consecutive EC units. Both exhaustive
single-fault verification and Monte Carlo trials run on precomputed
single-fault signatures (Pauli-frame propagation is linear, so a fault
set's effect is the XOR of its members' signatures).
"""

from __future__ import annotations

import csv
import math
import multiprocessing
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuits import (
    EcCircuit,
    NoiseModel,
    build_ec_circuit,
    category_value_count,
    fault_stream,
    sample_faults,
)
from .codes import CssCode, get_builtin_code
from .decoder import EcDecision, LookupTable, build_tables, ec_decision
from .faulttol import (
    builtin_schedule,
    enumerate_single_fault_errors,
    syndrome_bits,
    verify_properness,
    verify_unique_syndromes,
)
from .frames import FaultSig, PauliFrame, compute_signatures, propagate
from .scheduling import CnotSchedule

_CATEGORIES = ("cnot", "prep", "meas", "idle")


@dataclass(frozen=True)
class TrialResult:
    failed: bool
    afflicted_x: tuple[int, ...]  # logical qubits with an X-type logical fault
    afflicted_z: tuple[int, ...]
    rounds_survived: int | None = None

    @property
    def afflicted(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.afflicted_x) | set(self.afflicted_z)))


@dataclass(frozen=True)
class EcUnitOutcome:
    frame: PauliFrame  # residual over data qubits, corrections applied
    decision_x: EcDecision
    decision_z: EcDecision
    correction_x: int
    correction_z: int
    x_syndromes: tuple[int, ...]
    z_syndromes: tuple[int, ...]


def run_ec_unit(
    circuit: EcCircuit,
    tables: dict[str, LookupTable],
    faults: list[tuple[int, int]] | None,
    incoming: PauliFrame | None = None,
) -> EcUnitOutcome:
    """Reference EC unit: full-circuit propagation, then the decision rule per
    error type, with corrections applied as Pauli-frame updates."""
    if circuit.rounds != 3:
        raise ValueError("an EC unit is a 3-round circuit")
    prop = propagate(circuit, faults, incoming)
    dx = ec_decision(*prop.x_syndromes)
    dz = ec_decision(*prop.z_syndromes)
    cx = tables["X"].correction(dx.syndrome)
    cz = tables["Z"].correction(dz.syndrome)
    data = circuit.data_mask
    return EcUnitOutcome(
        frame=PauliFrame((prop.frame.x & data) ^ cx, (prop.frame.z & data) ^ cz),
        decision_x=dx,
        decision_z=dz,
        correction_x=cx,
        correction_z=cz,
        x_syndromes=prop.x_syndromes,
        z_syndromes=prop.z_syndromes,
    )


def count_cnot_pairs(circuit: EcCircuit) -> int:
    """Number of CNOT-location pairs in the circuit (one EC unit)."""
    return math.comb(circuit.cnot_count(), 2)


def m_copy_failure(p_l: float, m: int) -> float:
    """Total failure probability of m independent copies: 1 - (1 - p_l)^m."""
    if not 0.0 <= p_l <= 1.0:
        raise ValueError("p_l must be in [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    return 1.0 - (1.0 - p_l) ** m


def wilson_interval(failures: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class PointEstimate:
    p: float
    trials: int
    failures: int

    @property
    def p_l(self) -> float:
        return self.failures / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares fit of p_L = c p^2 and the derived
    pseudo-threshold p* against the idle-failure curve p/10."""

    c: float
    c_ci: tuple[float, float]
    pstar: float
    pstar_ci: tuple[float, float]
    points_used: tuple[float, ...]
    crossing_pstar: float

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "c_ci": list(self.c_ci),
            "pstar": self.pstar,
            "pstar_ci": list(self.pstar_ci),
            "points_used": list(self.points_used),
            "crossing_pstar": self.crossing_pstar,
        }


def _bisect_crossing(c: float) -> float:
    """Numeric intersection of c p^2 with p/10, as a cross-check on 1/(10c)."""
    f = lambda p: c * p * p - p / 10.0
    lo, hi = 1e-15, 1.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def fit_quadratic(
    points: list[PointEstimate],
    min_failures: int = 20,
    p_max: float = 3e-3,
    saturation_cap: float = 0.04,
) -> FitResult:
    """Fit c from points in the quadratic regime: p <= p_max and an observed
    failure rate below ``saturation_cap`` (c p^2 must be small for the
    quadratic model to hold), carrying at least ``min_failures`` failures."""
    usable = [
        pt
        for pt in points
        if pt.failures >= min_failures and pt.p <= p_max and pt.p_l <= saturation_cap
    ]
    if not usable:
        usable = [pt for pt in points if pt.failures >= min_failures and pt.p <= p_max]
    if not usable:
        raise FitError(
            "no point has enough failures for a fit; increase trials or use larger p"
        )
    swxy = 0.0
    swxx = 0.0
    for pt in usable:
        y = pt.p_l
        var = max(y * (1 - y) / pt.trials, 1e-300)
        x = pt.p * pt.p
        swxy += x * y / var
        swxx += x * x / var
    c = swxy / swxx
    se = 1.0 / math.sqrt(swxx)
    c_lo, c_hi = c - 1.96 * se, c + 1.96 * se
    pstar = 1.0 / (10.0 * c)
    pstar_ci = (1.0 / (10.0 * c_hi), 1.0 / (10.0 * max(c_lo, 1e-300)))
    return FitResult(
        c=c,
        c_ci=(c_lo, c_hi),
        pstar=pstar,
        pstar_ci=pstar_ci,
        points_used=tuple(pt.p for pt in usable),
        crossing_pstar=_bisect_crossing(c),
    )


# --- results CSV ------------------------------------------------------------


@dataclass(frozen=True)
class ResultRow:
    code: str
    mode: str
    p: float
    trials: int
    failures: int
    p_l: float
    ci_low: float
    ci_high: float
    seed: int


CSV_COLUMNS = ["code", "mode", "p", "trials", "failures", "p_l", "ci_low", "ci_high", "seed"]


def write_results_csv(path: str | Path, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [r.code, r.mode, repr(r.p), r.trials, r.failures,
                 repr(r.p_l), repr(r.ci_low), repr(r.ci_high), r.seed]
            )


def read_results_csv(path: str | Path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                ResultRow(
                    code=rec["code"],
                    mode=rec["mode"],
                    p=float(rec["p"]),
                    trials=int(rec["trials"]),
                    failures=int(rec["failures"]),
                    p_l=float(rec["p_l"]),
                    ci_low=float(rec["ci_low"]),
                    ci_high=float(rec["ci_high"]),
                    seed=int(rec["seed"]),
                )
            )
    return rows


# --- verification reports ---------------------------------------------------


@dataclass
class Condition1Report:
    input_cases: int
    fault_cases: int
    correctability_cases: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class ExRecSweepReport:
    cases: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class VerificationReport:
    properness_ok: bool
    uniqueness_ok: bool
    condition1: Condition1Report
    exrec_sweep: ExRecSweepReport

    @property
    def ok(self) -> bool:
        return (
            self.properness_ok
            and self.uniqueness_ok
            and self.condition1.ok
            and self.exrec_sweep.ok
        )


@dataclass(frozen=True)
class LifetimeSummary:
    trajectories: int
    failures: int
    censored: int
    total_rounds: int
    max_rounds: int

    @property
    def mean_rounds(self) -> float:
        return self.total_rounds / self.trajectories


class Simulator:
    """Bundles a code with its verified schedule, lookup tables, 3-round EC
    circuit and single-fault signatures, and runs the simulations."""

    def __init__(self, code: CssCode, schedule: CnotSchedule):
        self.code = code
        self.schedule = schedule
        self.unit_circuit = build_ec_circuit(code, schedule, rounds=1)
        self.circuit = build_ec_circuit(code, schedule, rounds=3)
        self.tables = build_tables(code, schedule, self.unit_circuit)
        self.signatures = compute_signatures(self.circuit)
        self._det_x = self.tables["X"].detect_rows
        self._det_z = self.tables["Z"].detect_rows
        self._x_corr = self.tables["X"].corrections
        self._z_corr = self.tables["Z"].corrections
        self._logical_z = tuple(op.bits for op in code.logical_z)
        self._logical_x = tuple(op.bits for op in code.logical_x)

    @classmethod
    def for_builtin(cls, name: str) -> "Simulator":
        return cls(get_builtin_code(name), builtin_schedule(name))

    # -- elementary outcomes --

    def _unit(self, sigs, xin: int, zin: int) -> tuple[int, int]:
        """Outcome of one EC unit given fault signatures and an incoming error."""
        sxi = syndrome_bits(self._det_x, xin) if xin else 0
        szi = syndrome_bits(self._det_z, zin) if zin else 0
        sx0 = sx1 = sx2 = sxi
        sz0 = sz1 = sz2 = szi
        xr, zr = xin, zin
        for sig in sigs:
            xr ^= sig.x_res
            zr ^= sig.z_res
            xs = sig.x_syn
            zs = sig.z_syn
            sx0 ^= xs[0]
            sx1 ^= xs[1]
            sx2 ^= xs[2]
            sz0 ^= zs[0]
            sz1 ^= zs[1]
            sz2 ^= zs[2]
        dx = ec_decision(sx0, sx1, sx2)
        dz = ec_decision(sz0, sz1, sz2)
        return xr ^ self._x_corr[dx.syndrome], zr ^ self._z_corr[dz.syndrome]

    def _decode(self, x: int, z: int, rounds: int | None = None) -> TrialResult:
        """Ideal decode of a residual pair; reports afflicted logical qubits."""
        cx = x ^ self._x_corr[syndrome_bits(self._det_x, x)] if x else 0
        cz = z ^ self._z_corr[syndrome_bits(self._det_z, z)] if z else 0
        ax = tuple(i for i, m in enumerate(self._logical_z) if (cx & m).bit_count() & 1)
        az = tuple(i for i, m in enumerate(self._logical_x) if (cz & m).bit_count() & 1)
        return TrialResult(bool(ax or az), ax, az, rounds)

    # -- exhaustive verification --

    def _distinct_sigs(self) -> list[FaultSig]:
        seen = {}
        for _loc, _val, sig in self.signatures.iter_all():
            key = (sig.x_res, sig.z_res, sig.x_syn, sig.z_syn)
            if key not in seen and not sig.is_trivial:
                seen[key] = sig
        return list(seen.values())

    def verify_condition1(self) -> Condition1Report:
        """Exhaustive distance-3 fault-tolerance check of the EC unit.

        (i) every single-qubit input error with a fault-free unit, and
        (ii) every single circuit fault on a clean input, must ideally decode
        to the same logical state as the input; (iii) with any fault-derived
        weight<=2 input error and any single fault, the output must return to
        the codespace under ideal decoding.
        """
        violations = []
        n = self.code.n
        # (i) r = 1, s = 0
        input_cases = 0
        for q in range(n):
            for kind in ("X", "Z"):
                xin = (1 << q) if kind == "X" else 0
                zin = (1 << q) if kind == "Z" else 0
                before = self._decode(xin, zin)
                xo, zo = self._unit((), xin, zin)
                after = self._decode(xo, zo)
                input_cases += 1
                if (before.afflicted_x, before.afflicted_z) != (
                    after.afflicted_x,
                    after.afflicted_z,
                ):
                    violations.append(f"input {kind} error on qubit {q} changes logical state")
        # (ii) r = 0, s = 1
        distinct = self._distinct_sigs()
        fault_cases = 0
        for sig in distinct:
            xo, zo = self._unit((sig,), 0, 0)
            fault_cases += 1
            res = self._decode(xo, zo)
            if res.failed:
                violations.append(
                    f"single fault with residual (x={sig.x_res:#x}, z={sig.z_res:#x}) "
                    f"causes logical fault {res.afflicted}"
                )
        # (iii) modified second criterion
        full_hx = self.code.hx.rows
        full_hz = self.code.hz.rows
        inputs: set[tuple[int, int]] = set()
        for kind in ("X", "Z"):
            for fr in enumerate_single_fault_errors(
                self.code, self.schedule, kind, self.unit_circuit
            ):
                if fr.residual and fr.weight <= 2:
                    if kind == "X":
                        inputs.add((fr.residual, 0))
                    else:
                        inputs.add((0, fr.residual))
        correctability_cases = 0
        for xin, zin in sorted(inputs):
            for sig in distinct:
                xo, zo = self._unit((sig,), xin, zin)
                correctability_cases += 1
                cx = xo ^ self._x_corr[syndrome_bits(self._det_x, xo)]
                cz = zo ^ self._z_corr[syndrome_bits(self._det_z, zo)]
                if syndrome_bits(full_hz, cx) or syndrome_bits(full_hx, cz):
                    violations.append(
                        f"output for input (x={xin:#x}, z={zin:#x}) not returned to codespace"
                    )
        return Condition1Report(input_cases, fault_cases, correctability_cases, violations)

    def verify_exrec_single_faults(self) -> ExRecSweepReport:
        """No single fault anywhere in the two-unit exRec may cause a logical fault."""
        violations = []
        cases = 0
        for sig in self._distinct_sigs():
            for unit_index in (0, 1):
                if unit_index == 0:
                    x1, z1 = self._unit((sig,), 0, 0)
                    x2, z2 = self._unit((), x1, z1)
                else:
                    x2, z2 = self._unit((sig,), 0, 0)
                cases += 1
                res = self._decode(x2, z2)
                if res.failed:
                    violations.append(
                        f"single fault in unit {unit_index + 1} fails: {res.afflicted}"
                    )
        return ExRecSweepReport(cases, violations)

    def verify(self) -> VerificationReport:
        properness = verify_properness(self.code, self.schedule)
        uniqueness = verify_unique_syndromes(self.code, self.schedule, self.unit_circuit)
        return VerificationReport(
            properness_ok=properness.ok,
            uniqueness_ok=uniqueness.ok,
            condition1=self.verify_condition1(),
            exrec_sweep=self.verify_exrec_single_faults(),
        )

    # -- sampling helpers --

    def _category_data(self):
        cache = getattr(self, "_cat_cache", None)
        if cache is None:
            cache = []
            for cat in _CATEGORIES:
                locs, sigs = self.signatures.by_category[cat]
                cache.append((cat, len(locs), sigs, category_value_count(cat)))
            self._cat_cache = cache
        return cache

    def faults_to_sigs(self, faults: list[tuple[int, int]]) -> list[FaultSig]:
        return [self.signatures.signature(loc, val) for loc, val in faults]

    def run_exrec_trial(self, noise: NoiseModel, seed: int) -> TrialResult:
        """One exRec: two consecutive EC units with independently sampled
        faults, then ideal decoding of the final residual."""
        rng = fault_stream(seed)
        sigs1 = self.faults_to_sigs(sample_faults(self.circuit, noise, rng))
        sigs2 = self.faults_to_sigs(sample_faults(self.circuit, noise, rng))
        x1, z1 = self._unit(sigs1, 0, 0)
        x2, z2 = self._unit(sigs2, x1, z1)
        return self._decode(x2, z2)

    def run_lifetime(
        self, noise: NoiseModel, seed: int, max_rounds: int
    ) -> TrialResult:
        """One memory trajectory: EC units repeat, residuals carry over, and a
        non-destructive ideal-decode probe detects the first logical fault.
        Survival is censored at max_rounds."""
        if max_rounds < 3:
            raise ValueError("max_rounds must be >= 3")
        rng = fault_stream(seed)
        xf = zf = 0
        units = max_rounds // 3
        for u in range(units):
            sigs = self.faults_to_sigs(sample_faults(self.circuit, noise, rng))
            xf, zf = self._unit(sigs, xf, zf)
            if xf or zf:
                probe = self._decode(xf, zf)
                if probe.failed:
                    return TrialResult(
                        True, probe.afflicted_x, probe.afflicted_z, 3 * (u + 1)
                    )
        return TrialResult(False, (), (), 3 * units)

    # -- Monte Carlo --

    def estimate_pl(
        self,
        ps: list[float],
        trials: int,
        seed: int,
        mode: str = "exrec",
        threads: int | None = 1,
        batch_size: int = 8192,
    ) -> list[PointEstimate]:
        """Binomial failure estimates at each physical error rate.

        mode 'exrec' runs two consecutive EC units per trial, 'single' one.
        Trials are partitioned into fixed-size batches, each with its own
        counter-based random stream, so results are reproducible bit-exactly
        for a given seed and trial count, independent of thread count.
        """
        if mode not in ("exrec", "single"):
            raise ValueError("mode must be 'exrec' or 'single'")
        if trials < 1:
            raise ValueError("trials must be >= 1")
        units = 2 if mode == "exrec" else 1
        if threads is None:
            threads = os.cpu_count() or 1
        out = []
        for point_idx, p in enumerate(ps):
            noise = NoiseModel(p)
            n_batches = (trials + batch_size - 1) // batch_size
            tasks = [
                (b, min(batch_size, trials - b * batch_size)) for b in range(n_batches)
            ]
            if threads > 1 and len(tasks) > 1:
                failures = _parallel_failures(self, noise, units, seed, point_idx, tasks, threads)
            else:
                failures = sum(
                    self._run_batch(noise, units, seed, point_idx, b, nb) for b, nb in tasks
                )
            out.append(PointEstimate(p=p, trials=trials, failures=failures))
        return out

    def estimate_lifetime(
        self, noise: NoiseModel, trajectories: int, seed: int, max_rounds: int
    ) -> LifetimeSummary:
        failures = 0
        censored = 0
        total_rounds = 0
        for t in range(trajectories):
            res = self.run_lifetime_fast(noise, seed, t, max_rounds)
            total_rounds += res.rounds_survived or 0
            if res.failed:
                failures += 1
            else:
                censored += 1
        return LifetimeSummary(trajectories, failures, censored, total_rounds, max_rounds)

    def run_lifetime_fast(
        self, noise: NoiseModel, seed: int, trajectory: int, max_rounds: int
    ) -> TrialResult:
        """Lifetime trajectory with chunked per-unit sampling (same physics as
        run_lifetime, faster sampling path; its own (seed, trajectory) stream)."""
        rng = fault_stream(seed, trajectory)
        cats = self._category_data()
        probs = [noise.category_prob(cat) for cat, _n, _s, _v in cats]
        chunk = 64
        counts = None
        ptr = chunk
        xf = zf = 0
        units = max_rounds // 3
        for u in range(units):
            if ptr == chunk:
                counts = [
                    rng.binomial(n, q, size=chunk) if n else np.zeros(chunk, dtype=int)
                    for (cat, n, _s, _v), q in zip(cats, probs)
                ]
                ptr = 0
            sigs = []
            for ci, (cat, n, sig_rows, n_values) in enumerate(cats):
                k = int(counts[ci][ptr])
                if not k:
                    continue
                idxs = rng.integers(0, n, size=k)
                if k > 1 and len(set(idxs.tolist())) != k:
                    taken = set()
                    fixed = []
                    for i in idxs.tolist():
                        while i in taken:
                            i = int(rng.integers(0, n))
                        taken.add(i)
                        fixed.append(i)
                    idxs = fixed
                else:
                    idxs = idxs.tolist()
                if n_values > 1:
                    vals = rng.integers(0, n_values, size=k).tolist()
                else:
                    vals = [0] * k
                for i, v in zip(idxs, vals):
                    sigs.append(sig_rows[i][v])
            ptr += 1
            if sigs or xf or zf:
                xf, zf = self._unit(sigs, xf, zf)
                if xf or zf:
                    probe = self._decode(xf, zf)
                    if probe.failed:
                        return TrialResult(
                            True, probe.afflicted_x, probe.afflicted_z, 3 * (u + 1)
                        )
        return TrialResult(False, (), (), 3 * units)

    def _run_batch(
        self,
        noise: NoiseModel,
        units: int,
        seed: int,
        point_idx: int,
        batch_idx: int,
        n_trials: int,
    ) -> int:
        """Failures among one batch of exRec (or single-EC) trials."""
        rng = fault_stream(seed, point_idx, units, batch_idx)
        cats = self._category_data()
        # Draw everything up front in a fixed order: counts, then per
        # (unit, category) location indices, values and a spare pool for the
        # rare duplicate-location rejections.
        counts = []
        for u in range(units):
            for cat, n, _sigs, _v in cats:
                q = noise.category_prob(cat)
                counts.append(
                    rng.binomial(n, q, size=n_trials) if n else np.zeros(n_trials, dtype=int)
                )
        pools = []
        for u in range(units):
            for ci, (cat, n, _sigs, n_values) in enumerate(cats):
                total = int(counts[u * len(cats) + ci].sum())
                idxs = rng.integers(0, n, size=total) if total else np.empty(0, dtype=int)
                vals = (
                    rng.integers(0, n_values, size=total)
                    if (total and n_values > 1)
                    else np.zeros(total, dtype=int)
                )
                spare = rng.integers(0, n, size=16 + total // 8) if n else np.empty(0, dtype=int)
                pools.append([idxs.tolist(), vals.tolist(), spare.tolist(), 0, 0])
                # pool row: [indices, values, spares, cursor, spare_cursor]

        det_x = self._det_x
        det_z = self._det_z
        x_corr = self._x_corr
        z_corr = self._z_corr
        logical_z = self._logical_z
        logical_x = self._logical_x
        n_cats = len(cats)
        sig_tables = [cats[ci][2] for ci in range(n_cats)]

        failures = 0
        for t in range(n_trials):
            x_in = z_in = 0
            for u in range(units):
                sigs = []
                base = u * n_cats
                for ci in range(n_cats):
                    k = int(counts[base + ci][t])
                    if not k:
                        continue
                    pool = pools[base + ci]
                    cur = pool[3]
                    idxs = pool[0][cur : cur + k]
                    vals = pool[1][cur : cur + k]
                    pool[3] = cur + k
                    if k > 1 and len(set(idxs)) != k:
                        # Locations fail without replacement; redraw clashes
                        # from the pre-drawn spare pool.
                        taken = set()
                        fixed = []
                        sp = pool[2]
                        sc = pool[4]
                        n_cat = cats[ci][1]
                        for i in idxs:
                            while i in taken:
                                if sc < len(sp):
                                    i = sp[sc]
                                    sc += 1
                                else:
                                    i = (i + 1) % n_cat  # spare pool exhausted
                            taken.add(i)
                            fixed.append(i)
                        pool[4] = sc
                        idxs = fixed
                    rows = sig_tables[ci]
                    for i, v in zip(idxs, vals):
                        sigs.append(rows[i][v])
                if not sigs and not (x_in or z_in):
                    continue
                sxi = syndrome_bits(det_x, x_in) if x_in else 0
                szi = syndrome_bits(det_z, z_in) if z_in else 0
                sx0 = sx1 = sx2 = sxi
                sz0 = sz1 = sz2 = szi
                xr, zr = x_in, z_in
                for sig in sigs:
                    xr ^= sig.x_res
                    zr ^= sig.z_res
                    xs = sig.x_syn
                    zs = sig.z_syn
                    sx0 ^= xs[0]
                    sx1 ^= xs[1]
                    sx2 ^= xs[2]
                    sz0 ^= zs[0]
                    sz1 ^= zs[1]
                    sz2 ^= zs[2]
                dx = ec_decision(sx0, sx1, sx2)
                dz = ec_decision(sz0, sz1, sz2)
                x_in = xr ^ x_corr[dx.syndrome]
                z_in = zr ^ z_corr[dz.syndrome]
            if not (x_in or z_in):
                continue
            cx = x_in ^ x_corr[syndrome_bits(det_x, x_in)] if x_in else 0
            cz = z_in ^ z_corr[syndrome_bits(det_z, z_in)] if z_in else 0
            for m in logical_z:
                if (cx & m).bit_count() & 1:
                    failures += 1
                    break
            else:
                for m in logical_x:
                    if (cz & m).bit_count() & 1:
                        failures += 1
                        break
        return failures


def exact_quadratic_coefficient(sim: "Simulator") -> float:
    """Leading p^2 coefficient of the exRec failure rate by exact enumeration
    of all two-fault combinations (practical for Surface-17-sized circuits).

    Every location-value atom carries its probability weight (linear in p);
    c is the probability-weighted count of malignant pairs, divided by p^2.
    """
    noise = NoiseModel(1.0)  # weights taken per unit p
    weights: dict[int, float] = {}
    atoms: list[tuple[float, FaultSig, int]] = []  # (weight/p, sig, loc)
    for cat in _CATEGORIES:
        locs, sig_rows = sim.signatures.by_category[cat]
        q = {"cnot": 1.0, "prep": 2 / 3, "meas": 2 / 3, "idle": 1 / 10}[cat]
        per_val = q / category_value_count(cat)
        for loc, sigs in zip(locs, sig_rows):
            for sig in sigs:
                atoms.append((per_val, sig, loc))

    # Group atoms by signature; malignancy depends only on the signature.
    groups: dict[tuple, list[int]] = {}
    sig_list: list[FaultSig] = []
    w_list: list[float] = []
    for w, sig, _loc in atoms:
        key = (sig.x_res, sig.z_res, sig.x_syn, sig.z_syn)
        idx = groups.get(key)
        if idx is None:
            groups[key] = len(sig_list)
            sig_list.append(sig)
            w_list.append(w)
        else:
            w_list[idx] += w

    def fails(x: int, z: int) -> bool:
        cx = x ^ sim._x_corr[syndrome_bits(sim._det_x, x)] if x else 0
        cz = z ^ sim._z_corr[syndrome_bits(sim._det_z, z)] if z else 0
        for m in sim._logical_z:
            if (cx & m).bit_count() & 1:
                return True
        for m in sim._logical_x:
            if (cz & m).bit_count() & 1:
                return True
        return False

    def mal_same_unit1(a: FaultSig, b: FaultSig) -> bool:
        x1, z1 = sim._unit((a, b), 0, 0)
        x2, z2 = sim._unit((), x1, z1)
        return fails(x2, z2)

    def mal_same_unit2(a: FaultSig, b: FaultSig) -> bool:
        return fails(*sim._unit((a, b), 0, 0))

    def mal_cross(a: FaultSig, b: FaultSig) -> bool:
        x1, z1 = sim._unit((a,), 0, 0)
        return fails(*sim._unit((b,), x1, z1))

    n = len(sig_list)
    total = 0.0
    # pairs within one unit (units are identical circuits)
    for mal in (mal_same_unit1, mal_same_unit2):
        s_all = 0.0
        for i in range(n):
            wi, si = w_list[i], sig_list[i]
            for j in range(i, n):
                if mal(si, sig_list[j]):
                    w = wi * w_list[j]
                    s_all += w if i == j else 2 * w
        # subtract impossible pairs: two atoms at the same location
        s_same = 0.0
        for cat in _CATEGORIES:
            locs, sig_rows = sim.signatures.by_category[cat]
            q = {"cnot": 1.0, "prep": 2 / 3, "meas": 2 / 3, "idle": 1 / 10}[cat]
            per_val = q / category_value_count(cat)
            for sigs in sig_rows:
                for a_i, a in enumerate(sigs):
                    for b in sigs[a_i:]:
                        if mal(a, b):
                            w = per_val * per_val
                            s_same += w if b is a else 2 * w
        total += 0.5 * (s_all - s_same)
    # one fault in each unit (ordered)
    for i in range(n):
        wi, si = w_list[i], sig_list[i]
        for j in range(n):
            if mal_cross(si, sig_list[j]):
                total += wi * w_list[j]
    return total


# --- multiprocessing support -------------------------------------------------

_WORKER_STATE: tuple | None = None


def _init_worker(sim, noise, units, seed, point_idx):
    global _WORKER_STATE
    _WORKER_STATE = (sim, noise, units, seed, point_idx)


def _run_task(task) -> int:
    sim, noise, units, seed, point_idx = _WORKER_STATE
    batch_idx, n_trials = task
    return sim._run_batch(noise, units, seed, point_idx, batch_idx, n_trials)


def _parallel_failures(sim, noise, units, seed, point_idx, tasks, threads) -> int:
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(
        processes=threads, initializer=_init_worker, initargs=(sim, noise, units, seed, point_idx)
    ) as pool:
        return sum(pool.map(_run_task, tasks))
