import dataclasses

import pytest

from tritforge.utils.decomposition_catalog import (
    CATALOG_IDS,
    INCOMPLETE_IDS,
    EntryFlag,
    build,
    incomplete,
    iswap_entry,
    list_catalog,
    n_controlled,
    swap_controls,
)
from tritforge.utils.error_handlers import CatalogError
from tritforge.utils.verifier import declared_behavior_check, toffoli_equivalence

TOFFOLI_IDS = [i for i in CATALOG_IDS if i != "D1S"]

EXPECTED_TWO_SITE = {
    "A1": 3, "A2": 3, "B1": 3, "B2": 3, "B3": 3, "C1": 3, "C2": 3, "C3": 3,
    "D1": 3, "D1S": 3, "D2": 5, "D3": 3, "ISWAP": 4, "REF10CX": 10,
}

TWO_PHOTON = {"A2", "B2", "C1", "C3"}
EXCLUSIVE = {"A1", "A2", "B2", "B3", "C2", "C3"}


@pytest.mark.parametrize("entry_id", CATALOG_IDS)
def test_every_entry_builds(entry_id):
    entry = build(entry_id)
    assert entry.id == entry_id
    assert entry.complete
    assert entry.circuit.two_site_count() == EXPECTED_TWO_SITE[entry_id]
    assert entry.expected_two_site_count == EXPECTED_TWO_SITE[entry_id]


@pytest.mark.parametrize("entry_id", TOFFOLI_IDS)
def test_toffoli_entries_are_equivalent(entry_id):
    entry = build(entry_id)
    assert entry.toffoli_equivalent
    assert toffoli_equivalence(entry).equivalent


def test_swapped_rotation_is_an_expected_negative():
    entry = build("D1S")
    assert not entry.toffoli_equivalent
    assert declared_behavior_check(entry).equivalent
    assert not toffoli_equivalence(entry).equivalent


@pytest.mark.parametrize("entry_id", CATALOG_IDS)
def test_hardware_flags(entry_id):
    flags = build(entry_id).flags
    assert (EntryFlag.NEEDS_X02_TWO_PHOTON in flags) == (entry_id in TWO_PHOTON)
    assert (EntryFlag.NEEDS_EXCLUSIVE_CNOT in flags) == (entry_id in EXCLUSIVE)
    assert (EntryFlag.ISWAP_BASED in flags) == (entry_id == "ISWAP")


def test_reference_circuit_shape():
    circuit = build("REF10CX").circuit
    assert circuit.register.dims == (2, 2, 2)
    assert circuit.count("CNOT") == 10
    assert circuit.single_site_count() == 9
    assert circuit.depth() == 15


def test_qutrit_based():
    assert build("B3").qutrit_based
    assert not build("ISWAP").qutrit_based
    assert not build("REF10CX").qutrit_based


def test_unknown_id():
    with pytest.raises(CatalogError):
        build("Z9")


def test_entries_are_cached_and_frozen():
    entry = build("B3")
    assert build("B3") is entry
    with pytest.raises(dataclasses.FrozenInstanceError):
        entry.id = "X"


class TestIncomplete:
    @pytest.mark.parametrize("entry_id", INCOMPLETE_IDS)
    def test_variants_pass_their_check(self, entry_id):
        entry = incomplete(entry_id)
        assert entry.id == f"{entry_id}*"
        assert not entry.complete
        assert declared_behavior_check(entry).equivalent

    @pytest.mark.parametrize("entry_id", INCOMPLETE_IDS)
    def test_two_site_counts(self, entry_id):
        expected = 3 if entry_id == "D2" else 2
        assert incomplete(entry_id).circuit.two_site_count() == expected

    @pytest.mark.parametrize("entry_id,junk", [
        ("B1", {"00": "00", "01": "01", "10": "10", "11": "12"}),
        ("A2", {"00": "00", "01": "02", "10": "10", "11": "11"}),
        ("B3", {"00": "00", "01": "02", "10": "10", "11": "11"}),
        ("C2", {"00": "02", "01": "00", "10": "12", "11": "11"}),
        ("D2", {"00": "00", "01": "01", "10": "11", "11": "12"}),
    ])
    def test_junk_patterns(self, entry_id, junk):
        assert dict(incomplete(entry_id).junk) == junk

    @pytest.mark.parametrize("entry_id", ["D1S", "ISWAP", "REF10CX"])
    def test_no_incomplete_variant(self, entry_id):
        with pytest.raises(CatalogError):
            incomplete(entry_id)

    def test_toffoli_checker_refuses_incomplete(self):
        from tritforge.utils.error_handlers import WrongCheckerError

        with pytest.raises(WrongCheckerError):
            toffoli_equivalence(incomplete("B1"))


class TestNControlled:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_ladder_is_multi_controlled_x(self, n):
        entry = n_controlled(n)
        assert entry.id == f"NC{n}"
        assert entry.n_controls == n
        assert entry.circuit.two_site_count() == 2 * n - 1
        assert toffoli_equivalence(entry).equivalent

    @pytest.mark.parametrize("n", [1, 6])
    def test_out_of_range(self, n):
        with pytest.raises(CatalogError):
            n_controlled(n)


class TestIswapModes:
    def test_after_is_the_catalog_entry(self):
        assert iswap_entry("after") is build("ISWAP")

    def test_before_is_equivalent(self):
        entry = iswap_entry("before")
        assert entry.id == "ISWAP-before"
        assert toffoli_equivalence(entry).equivalent

    def test_uncompensated_leaves_a_phase(self):
        entry = iswap_entry("none")
        assert entry.circuit.two_site_count() == 3
        assert declared_behavior_check(entry).equivalent
        report = toffoli_equivalence(entry)
        assert not report.equivalent
        assert report.deviations["010"] == pytest.approx(2.0)
        assert report.deviations["011"] == pytest.approx(2.0)
        assert report.deviations["110"] == pytest.approx(0.0, abs=1e-10)

    def test_unknown_compensation(self):
        with pytest.raises(CatalogError):
            iswap_entry("sideways")


class TestSwapControls:
    @pytest.mark.parametrize("entry_id", ["A1", "B3", "C2", "D3"])
    def test_toffoli_is_symmetric_in_controls(self, entry_id):
        assert toffoli_equivalence(swap_controls(build(entry_id))).equivalent

    def test_swapped_negative_fires_on_swapped_pattern(self):
        entry = swap_controls(build("D1S"))
        assert entry.id == "D1S~"
        assert declared_behavior_check(entry).equivalent

    def test_swapped_incomplete_keeps_its_junk(self):
        entry = swap_controls(incomplete("B1"))
        assert dict(entry.junk) == {"00": "00", "10": "10", "01": "01", "11": "21"}
        assert declared_behavior_check(entry).equivalent


def test_list_catalog():
    listings = list_catalog()
    assert [item.id for item in listings] == sorted(CATALOG_IDS)
    by_id = {item.id: item for item in listings}
    assert by_id["ISWAP"].flags == ["iswap_based"]
    assert by_id["D2"].expected_two_site_count == 5
