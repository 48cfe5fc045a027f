import pytest

from tritforge.models.pydantic_models import TimingBudget
from tritforge.utils.error_handlers import InvalidBudgetError
from tritforge.utils.timing_model import (
    MB_TOTAL_NS,
    budget_records,
    mb_budget,
    mf_budget,
    render_table,
    repetition_rate,
    speedup,
)


def test_default_budgets():
    mf, mb = mf_budget(), mb_budget()
    assert mf.total_ns == 525
    assert mb.total_ns == 1400
    assert repetition_rate(mf) == pytest.approx(1.905, abs=1e-3)
    assert repetition_rate(mb) == pytest.approx(0.714, abs=1e-3)
    assert speedup(mf, mb) == pytest.approx(2.667, abs=1e-3)


def test_faster_reset():
    mf = mf_budget(reset_ns=80)
    assert mf.total_ns == 325
    assert speedup(mf) == pytest.approx(4.308, abs=1e-3)


def test_mb_total_is_pinned_not_summed():
    mb = mb_budget()
    assert mb.relevant_sum() == 1190
    assert mb.total_ns == MB_TOTAL_NS
    assert "overlap" in mb.overlap_note
    assert mb.cycle_multiplicity == 2


def test_component_lookup():
    assert mb_budget().component("Kernel integration").duration_ns == 320
    assert mf_budget().component("Double drive qutrit reset").duration_ns == 280
    with pytest.raises(KeyError):
        mf_budget().component("Coffee break")


@pytest.mark.parametrize("kwargs", [{"reset_ns": -1}, {"two_qutrit_ns": float("nan")}, {"single_gate_ns": float("inf")}])
def test_invalid_durations(kwargs):
    with pytest.raises(InvalidBudgetError):
        mf_budget(**kwargs)


def test_zero_total_has_no_rate():
    empty = TimingBudget(label="empty", components=[], total_ns=0)
    with pytest.raises(InvalidBudgetError):
        repetition_rate(empty)
    with pytest.raises(InvalidBudgetError):
        speedup(empty)


def test_records_end_each_budget_with_total():
    records = budget_records([mf_budget(), mb_budget()])
    totals = [r for r in records if r["component"] == "Total"]
    assert [t["duration_ns"] for t in totals] == [525, 1400]
    assert len(records) == 4 + 1 + 5 + 1


def test_table_shows_both_columns():
    text = render_table(mf_budget(), mb_budget())
    assert "Measurement-free (MF)" in text
    assert "Measurement-based (MB)" in text
    assert "525 ns" in text
    assert "1.4 us" in text
    assert "Speedup (MB/MF): 2.667" in text


def test_table_rows_line_up_by_category():
    lines = render_table(mf_budget(), mb_budget()).splitlines()
    rows = {line.split("  ")[0].strip(): line.split() for line in lines[1:12]}
    assert lines[0].split() == ["MB", "MF"]
    assert rows["Kernel integration"][-3:] == ["320", "ns", "NR"]
    assert rows["Single-qubit/qutrit gate"][-4:] == ["30", "ns", "30", "ns"]
    assert rows["Cycle multiplicity"][-2:] == ["2", "NR"]
    assert rows["Two-qutrit gate (Q1-Q2)"][-3:] == ["NR", "90", "ns"]
    assert rows["Double drive qutrit reset"][-3:] == ["NR", "280", "ns"]
    assert rows["Total"][-4:] == ["1.4", "us", "525", "ns"]


def test_table_category_order():
    lines = render_table(mf_budget(), mb_budget()).splitlines()
    names = [line.split("  ")[0].strip() for line in lines[1:12]]
    assert names == [
        "Latency (cable + electronics)", "Kernel integration", "Resonator emptying", "Branch determination",
        "Single-qubit/qutrit gate", "Cycle multiplicity", "Two-qutrit gate (Q1-Q2)",
        "Exclusive CNOT gate (Q2-Q3)", "Double drive qutrit reset", "Total", "Repetition rate",
    ]
