import time

from starqec.circuits import build_ec_circuit
from starqec.codes import independent_rows
from starqec.faulttol import (
    builtin_schedule,
    detector_rows,
    enumerate_single_fault_errors,
    find_fault_tolerant_schedule,
    find_interleaved_schedule,
    verify_unique_syndromes,
    _side_residuals,
)
from starqec.gf2 import RowSpace
from starqec.scheduling import CnotSchedule, verify_properness


def reordered_ssd_schedule():
    """A valid SSD schedule whose Z-check-0 CNOT order creates two weight-2
    errors with the same syndrome that are not logically equivalent."""
    good = builtin_schedule("ssd")
    perm = (0, 1, 3, 2, 4)
    entries = sorted(
        (i for i, e in enumerate(good.cnots) if e[1] == "Z" and e[2] == 0),
        key=lambda i: good.cnots[i][0],
    )
    steps = [good.cnots[i][0] for i in entries]
    qubits = [good.cnots[i][3] for i in entries]
    cand = list(good.cnots)
    for i, s, k in zip(entries, steps, perm):
        cand[i] = (s, "Z", 0, qubits[k])
    return CnotSchedule("separate", good.steps, tuple(sorted(cand)))


class TestEnumeration:
    def test_all_residuals_weight_at_most_two(self, ssd_code, s17_code):
        for code, name in ((ssd_code, "ssd"), (s17_code, "surface17")):
            sched = builtin_schedule(name)
            for kind in ("X", "Z"):
                residuals = enumerate_single_fault_errors(code, sched, kind)
                assert max(fr.weight for fr in residuals) <= 2

    def test_count_matches_location_values(self, s17_code):
        sched = builtin_schedule("surface17")
        circuit = build_ec_circuit(s17_code, sched, rounds=1)
        # one entry per (location, value) pair
        expected = (
            len(circuit.locations_of_category("cnot")) * 15
            + len(circuit.locations_of_category("prep"))
            + len(circuit.locations_of_category("meas"))
            + len(circuit.locations_of_category("idle")) * 3
        )
        assert len(enumerate_single_fault_errors(s17_code, sched, "X")) == expected

    def test_syndromes_are_ideal(self, ssd_code):
        sched = builtin_schedule("ssd")
        circuit = build_ec_circuit(ssd_code, sched, rounds=1)
        det = detector_rows(ssd_code, "Z", circuit)
        for fr in enumerate_single_fault_errors(ssd_code, sched, "Z", circuit):
            syn = 0
            for i, row in enumerate(det):
                if (row & fr.residual).bit_count() & 1:
                    syn |= 1 << i
            assert syn == fr.syndrome

    def test_circuit_enumeration_matches_closed_form(self, ssd_code):
        # the per-check suffix classes predict exactly the nonzero residuals
        # that circuit-level propagation produces
        sched = builtin_schedule("ssd")
        measured = independent_rows(ssd_code.hz)
        orders = {r: [q for _s, q in sched.check_order("Z", r)] for r in range(12)}
        predicted = _side_residuals(ssd_code, "Z", measured, orders)
        enumerated = {
            fr.residual
            for fr in enumerate_single_fault_errors(ssd_code, sched, "Z")
            if fr.residual
        }
        assert enumerated == predicted


class TestUniqueness:
    def test_shipped_schedules_pass(self, ssd_code, s17_code):
        assert verify_unique_syndromes(ssd_code, builtin_schedule("ssd")).ok
        assert verify_unique_syndromes(s17_code, builtin_schedule("surface17")).ok

    def test_reordered_schedule_fails_with_witness(self, ssd_code):
        bad = reordered_ssd_schedule()
        bad.validate_against(ssd_code)  # still a valid schedule
        report = verify_unique_syndromes(ssd_code, bad)
        assert not report.ok
        syndrome, err_a, err_b = report.collisions["Z"][0]
        # the colliding pair really shares a syndrome and is not equivalent
        det = tuple(ssd_code.hx.rows[j] for j in independent_rows(ssd_code.hx))

        def syn(e):
            return sum(
                1 << i for i, row in enumerate(det) if (row & e).bit_count() & 1
            )

        assert syn(err_a) == syn(err_b) == syndrome
        assert not RowSpace.of_matrix(ssd_code.hz).contains(err_a ^ err_b)
        assert err_a.bit_count() <= 2 and err_b.bit_count() <= 2


class TestSearch:
    def test_ssd_search_within_budget(self, ssd_code):
        start = time.time()
        res = find_fault_tolerant_schedule(ssd_code)
        assert time.time() - start < 10.0
        assert res.colors_x == res.colors_z == 5
        assert res.method == {"X": "dsatur", "Z": "dsatur"}
        assert res.schedule.steps == 10
        assert res.uniqueness.ok
        assert verify_properness(ssd_code, res.schedule).ok

    def test_surface17_search(self, s17_code):
        res = find_fault_tolerant_schedule(s17_code)
        assert res.schedule.steps == 8
        assert res.uniqueness.ok

    def test_search_is_deterministic(self, s17_code):
        a = find_fault_tolerant_schedule(s17_code)
        b = find_fault_tolerant_schedule(s17_code)
        assert a.schedule == b.schedule
        assert a.attempts == b.attempts

    def test_interleaved_search_smoke(self, s17_code):
        res = find_interleaved_schedule(s17_code, retries=3, perms_per_coloring=12)
        assert res.attempts >= 1
        if res.schedule is not None:
            assert verify_properness(s17_code, res.schedule).ok
            assert verify_unique_syndromes(s17_code, res.schedule).ok


def test_builtin_schedules_validate(ssd_code, s17_code):
    builtin_schedule("ssd").validate_against(ssd_code)
    builtin_schedule("surface17").validate_against(s17_code)
