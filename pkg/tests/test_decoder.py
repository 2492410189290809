from itertools import combinations

import pytest

from starqec.decoder import (
    DecoderBuildError,
    build_lookup_table,
    build_tables,
    ec_decision,
    format_table,
    ideal_decode,
)
from starqec.faulttol import builtin_schedule, enumerate_single_fault_errors
from starqec.gf2 import RowSpace

from test_faulttol import reordered_ssd_schedule


@pytest.fixture(scope="module")
def ssd_tables(ssd_code):
    return build_tables(ssd_code, builtin_schedule("ssd"))


@pytest.fixture(scope="module")
def s17_tables(s17_code):
    return build_tables(s17_code, builtin_schedule("surface17"))


class TestTableConstruction:
    def test_sizes(self, ssd_tables, s17_tables):
        assert ssd_tables["Z"].syndrome_count == 2048
        assert ssd_tables["X"].syndrome_count == 2048
        assert s17_tables["Z"].syndrome_count == 16
        assert s17_tables["X"].syndrome_count == 16

    def test_trivial_syndrome_identity_correction(self, ssd_tables):
        assert ssd_tables["Z"].correction(0) == 0
        assert ssd_tables["X"].correction(0) == 0

    def test_consistency_every_entry(self, ssd_tables, s17_tables):
        for tables in (ssd_tables, s17_tables):
            for table in tables.values():
                for s in range(table.syndrome_count):
                    assert table.syndrome_of(table.correction(s)) == s

    def test_minimality_at_low_weight(self, s17_tables, s17_code):
        # no error of weight <= 2 may beat its syndrome's table entry
        for table in s17_tables.values():
            best = {}
            for w in (1, 2):
                for support in combinations(range(s17_code.n), w):
                    e = 0
                    for q in support:
                        e |= 1 << q
                    s = table.syndrome_of(e)
                    best[s] = min(best.get(s, 99), w)
            for s, w in best.items():
                assert table.correction(s).bit_count() <= w

    def test_fault_derived_entries_logically_equivalent(
        self, ssd_code, ssd_tables, s17_code, s17_tables
    ):
        for code, tables, name in (
            (ssd_code, ssd_tables, "ssd"),
            (s17_code, s17_tables, "surface17"),
        ):
            sched = builtin_schedule(name)
            for kind in ("X", "Z"):
                stab = RowSpace.of_matrix(code.checks(kind))
                table = tables[kind]
                for fr in enumerate_single_fault_errors(code, sched, kind):
                    if fr.residual and fr.weight <= 2:
                        assert stab.contains(table.correction(fr.syndrome) ^ fr.residual)

    def test_requires_unique_syndromes(self, ssd_code):
        with pytest.raises(DecoderBuildError):
            build_lookup_table(ssd_code, reordered_ssd_schedule(), "Z")

    def test_dump_format_stable(self, s17_code):
        sched = builtin_schedule("surface17")
        a = format_table(build_lookup_table(s17_code, sched, "Z"))
        b = format_table(build_lookup_table(s17_code, sched, "Z"))
        assert a == b
        lines = a.splitlines()
        assert lines[0] == "# kind Z"
        assert len([l for l in lines if not l.startswith("#")]) == 16
        syndrome, correction = lines[4].split()
        assert int(syndrome, 16) == 0 and int(correction, 16) == 0


class TestDecision:
    def test_two_trivial_no_correction(self):
        assert ec_decision(0, 0, 5).source == "none"
        assert ec_decision(0, 5, 0).source == "none"
        assert ec_decision(5, 0, 0).source == "none"
        assert ec_decision(0, 0, 0).source == "none"

    def test_repeated_syndrome_wins(self):
        d = ec_decision(5, 5, 7)
        assert (d.source, d.syndrome) == ("repeated", 5)
        d = ec_decision(3, 5, 5)
        assert (d.source, d.syndrome) == ("repeated", 5)
        d = ec_decision(5, 3, 5)
        assert (d.source, d.syndrome) == ("repeated", 5)
        d = ec_decision(0, 5, 5)
        assert (d.source, d.syndrome) == ("repeated", 5)

    def test_all_distinct_uses_last(self):
        d = ec_decision(1, 2, 3)
        assert (d.source, d.syndrome) == ("last", 3)
        d = ec_decision(0, 2, 3)
        assert (d.source, d.syndrome) == ("last", 3)


class TestIdealDecode:
    def test_identity_passes(self, ssd_code, ssd_tables):
        out = ideal_decode(ssd_code, ssd_tables["Z"], 0)
        assert not out.failed and out.afflicted == ()

    def test_stabilizer_rows_pass(self, ssd_code, ssd_tables):
        for row in ssd_code.hz.rows:
            out = ideal_decode(ssd_code, ssd_tables["Z"], row)
            assert not out.failed
        for row in ssd_code.hx.rows:
            out = ideal_decode(ssd_code, ssd_tables["X"], row)
            assert not out.failed

    def test_logical_z1_hits_logical_qubit_one(self, ssd_code, ssd_tables):
        out = ideal_decode(ssd_code, ssd_tables["Z"], ssd_code.logical_z[0].bits)
        assert out.failed
        assert out.afflicted == (0,)

    def test_single_qubit_errors_corrected(self, ssd_code, ssd_tables):
        for q in range(ssd_code.n):
            out = ideal_decode(ssd_code, ssd_tables["Z"], 1 << q)
            assert not out.failed
