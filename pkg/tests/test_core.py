"""Contingency tables, the merge monoid, and selection-state bookkeeping."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mrfs.core import (
    ContingencyTable,
    DomainSpec,
    SelectionState,
    merge_tables,
    single_observation_table,
)
from mrfs.errors import DomainViolationError, InvalidArgumentError, StructuralError

from conftest import EXAMPLE_CLASS_DOMAIN, EXAMPLE_ROWS, EXAMPLE_VALUE_DOMAIN


def table(counts, rows=(0, 1), cols=(0, 1, 2)):
    return ContingencyTable(rows, cols, np.asarray(counts))


class TestSingleObservationTable:
    def test_worked_example_pair(self):
        # first entry, (x1, class) = (2, 0): a single 1 at row "0", column "2"
        t = single_observation_table(0, 2, EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN)
        assert t.row_labels == (0, 1)
        assert t.col_labels == (-2, 0, 2)
        assert t.counts.tolist() == [[0, 0, 1], [0, 0, 0]]
        assert t.total() == 1

    def test_singleton_domain(self):
        t = single_observation_table(5, 5, (5,), (5,))
        assert t.counts.tolist() == [[1]]

    def test_exhaustive_coverage_sums_to_all_ones(self):
        acc = ContingencyTable.zeros(EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN)
        for r in EXAMPLE_CLASS_DOMAIN:
            for c in EXAMPLE_VALUE_DOMAIN:
                acc = merge_tables(acc, single_observation_table(r, c, EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN))
        assert np.all(acc.counts == 1)

    def test_code_outside_domain_is_named(self):
        with pytest.raises(DomainViolationError, match="7"):
            single_observation_table(7, 0, EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN)
        with pytest.raises(DomainViolationError, match="9"):
            single_observation_table(0, 9, EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN)


class TestMergeTables:
    def test_combined_worked_example_entries(self):
        # merging the four (x1, class) single-observation tables of the
        # 4-entry example gives [[0,2,1],[1,0,0]] over columns (-2, 0, 2)
        acc = ContingencyTable.zeros(EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN)
        for row in EXAMPLE_ROWS:
            label, x1 = row[0], row[1]
            acc = merge_tables(
                acc, single_observation_table(label, x1, EXAMPLE_CLASS_DOMAIN, EXAMPLE_VALUE_DOMAIN)
            )
        assert acc.counts.tolist() == [[0, 2, 1], [1, 0, 0]]

    def test_merge_with_zero_table_is_identity(self):
        t = table([[3, 1, 0], [0, 2, 5]])
        zero = ContingencyTable.zeros((0, 1), (0, 1, 2))
        assert merge_tables(t, zero) == t
        assert merge_tables(zero, t) == t

    def test_label_mismatch_is_structural(self):
        a = table([[1, 0], [0, 1]], cols=(0, 1))
        b = table([[1, 0], [0, 1]], cols=(0, 2))
        with pytest.raises(StructuralError):
            merge_tables(a, b)

    counts_2x3 = arrays(np.int64, (2, 3), elements=st.integers(0, 1000))

    @given(a=counts_2x3, b=counts_2x3, c=counts_2x3)
    @settings(max_examples=50)
    def test_merge_is_a_commutative_monoid(self, a, b, c):
        ta, tb, tc = table(a), table(b), table(c)
        assert merge_tables(ta, tb) == merge_tables(tb, ta)
        assert merge_tables(merge_tables(ta, tb), tc) == merge_tables(ta, merge_tables(tb, tc))
        zero = ContingencyTable.zeros((0, 1), (0, 1, 2))
        assert merge_tables(ta, zero) == ta

    def test_total_counts_accumulate(self):
        a = table([[1, 0, 0], [0, 0, 0]])
        b = table([[0, 0, 0], [0, 2, 0]])
        assert merge_tables(a, b).total() == 3


class TestContingencyTableValidation:
    def test_negative_counts_rejected(self):
        with pytest.raises(StructuralError):
            table([[1, -1, 0], [0, 0, 0]])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(StructuralError):
            ContingencyTable((0, 1), (0, 1), np.zeros((2, 3), dtype=np.int64))


class TestDomainSpec:
    def test_requires_sorted_unique_nonempty(self):
        with pytest.raises(InvalidArgumentError):
            DomainSpec(class_domain=(), value_domain=(0,))
        with pytest.raises(InvalidArgumentError):
            DomainSpec(class_domain=(1, 0), value_domain=(0,))
        with pytest.raises(InvalidArgumentError):
            DomainSpec(class_domain=(0, 0), value_domain=(0,))

    def test_position_lookup(self):
        d = DomainSpec(class_domain=(0, 1), value_domain=(-2, 0, 2))
        assert d.class_position(1) == 1
        assert d.value_position(-2) == 0
        with pytest.raises(DomainViolationError):
            d.value_position(3)


class TestSelectionState:
    def test_each_step_moves_exactly_one_index(self):
        state = SelectionState(candidates=[0, 1, 2, 3])
        assert state.step == 1
        state.advance(2, 0.5)
        assert state.step == 2
        assert state.candidates == [0, 1, 3]
        assert state.selected_indices == (2,)
        # partition invariant: disjoint, union preserved
        assert set(state.candidates) | set(state.selected_indices) == {0, 1, 2, 3}
        assert set(state.candidates) & set(state.selected_indices) == set()

    def test_advancing_a_non_candidate_is_structural(self):
        state = SelectionState(candidates=[0, 1])
        state.advance(0, 1.0)
        with pytest.raises(StructuralError):
            state.advance(0, 1.0)
