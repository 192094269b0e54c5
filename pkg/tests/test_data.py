"""Ingestion, transposition and the synthetic generator."""

import numpy as np
import pytest

from mrfs.data import (
    generate_synthetic,
    read_alternative,
    read_conventional,
    transpose,
    write_alternative,
    write_conventional,
)
from mrfs.errors import IngestionError, InvalidArgumentError
from mrfs.scoring import mutual_information, pair_table
from mrfs.selector import select_alternative, select_conventional

from conftest import example_csv_text, write_conventional_csv


class TestReadConventional:
    def test_worked_example_fragment(self, example_dataset):
        ds = example_dataset
        assert ds.meta.num_observations == 4
        assert ds.meta.num_features == 4
        assert ds.meta.domains.class_domain == (0, 1)
        assert ds.meta.domains.value_domain == (-2, 0, 2)
        assert ds.meta.feature_names == ("x1", "x2", "x3", "x4")
        assert ds.column_codes(0).tolist() == [2, 0, 0, -2]
        assert ds.class_codes().tolist() == [0, 0, 0, 1]

    def test_single_row_file(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("a,b,class\n1,2,0\n")
        ds = read_conventional(path)
        assert ds.meta.num_observations == 1

    def test_constant_class_accepted_with_zero_relevance(self, tmp_path):
        rng = np.random.default_rng(0)
        features = rng.integers(0, 2, size=(60, 3))
        labels = np.zeros(60, dtype=np.int64)
        path = tmp_path / "const.csv"
        write_conventional_csv(path, features, labels)
        ds = read_conventional(path)
        for k in range(3):
            mi = mutual_information(pair_table(ds.column_codes(k), ds.class_codes()))
            assert mi == 0.0

    def test_class_column_by_position(self, tmp_path):
        path = tmp_path / "pos.csv"
        path.write_text("y,a,b\n0,1,2\n1,2,1\n")
        ds = read_conventional(path, class_column="0")
        assert ds.meta.class_name == "y"
        assert ds.meta.feature_names == ("a", "b")

    def test_missing_class_column(self, tmp_path):
        path = tmp_path / "no.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(IngestionError, match="class"):
            read_conventional(path)

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("a,b,class\n1,2,0\n1,2,0,9\n")
        with pytest.raises(IngestionError, match="line 3|saw 4"):
            read_conventional(path)

    def test_short_row_reports_line(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("a,b,class\n1,2,0\n1\n")
        with pytest.raises(IngestionError, match="line 3"):
            read_conventional(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(IngestionError, match="empty"):
            read_conventional(path)

    def test_header_only_file(self, tmp_path):
        path = tmp_path / "hdr.csv"
        path.write_text("a,b,class\n")
        with pytest.raises(IngestionError):
            read_conventional(path)

    def test_token_values_are_dictionary_encoded(self, tmp_path):
        path = tmp_path / "tok.csv"
        path.write_text("color,size,class\nred,big,yes\nblue,small,no\nred,small,yes\n")
        ds = read_conventional(path)
        # vocabulary is sorted, codes are indices into it
        assert ds.value_tokens == ("big", "blue", "red", "small")
        assert ds.class_tokens == ("no", "yes")
        assert ds.meta.domains.value_domain == (0, 1, 2, 3)
        assert ds.column_codes(0).tolist() == [2, 1, 2]

    def test_domain_is_union_over_feature_columns(self, tmp_path):
        path = tmp_path / "union.csv"
        path.write_text("a,b,class\n1,5,0\n2,5,1\n")
        ds = read_conventional(path)
        assert ds.meta.domains.value_domain == (1, 2, 5)

    def test_every_code_within_declared_domain(self, example_dataset):
        positions = example_dataset.feature_positions
        assert positions.min() >= 0
        assert positions.max() < len(example_dataset.meta.domains.value_domain)


class TestReadAlternative:
    def test_transposed_example_fragment(self, tmp_path):
        path = tmp_path / "alt.csv"
        path.write_text(
            "class,0,0,0,1\n"
            "x1,2,0,0,-2\n"
            "x2,0,-2,2,0\n"
            "x3,0,2,0,0\n"
            "x4,-2,0,-2,0\n"
        )
        ds = read_alternative(path)
        assert ds.meta.num_features == 4
        assert ds.meta.num_observations == 4
        assert ds.class_row_index == 0
        assert ds.values_integral
        rows = ds.records()
        assert rows[1].name == "x1"
        assert rows[1].values.tolist() == [2, 0, 0, -2]

    def test_single_feature_and_class(self, tmp_path):
        path = tmp_path / "n1.csv"
        path.write_text("f1,1,0,1\nclass,1,0,1\n")
        ds = read_alternative(path)
        assert ds.meta.num_features == 1

    def test_continuous_values_supported(self, tmp_path):
        path = tmp_path / "cont.csv"
        path.write_text("f1,0.5,1.25,2\nclass,0,1,0\n")
        ds = read_alternative(path)
        assert not ds.values_integral
        assert ds.values.dtype == np.float64

    def test_duplicate_row_ids_rejected(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("f1,1,0\nf1,0,1\nclass,0,1\n")
        with pytest.raises(IngestionError, match="duplicate"):
            read_alternative(path)

    def test_round_trip_is_fixed_point(self, tmp_path):
        src = tmp_path / "src.csv"
        src.write_text("f1,1,0,1\nf2,0.5,0.25,1.0\nclass,0,1,1\n")
        once = tmp_path / "once.csv"
        write_alternative(read_alternative(src), once)
        twice = tmp_path / "twice.csv"
        write_alternative(read_alternative(once), twice)
        assert once.read_bytes() == twice.read_bytes()


class TestTranspose:
    def test_example_fragment_to_alternative(self, tmp_path):
        src = tmp_path / "conv.csv"
        src.write_text(example_csv_text())
        out = tmp_path / "alt.csv"
        transpose(src, out, "conventional")
        assert out.read_text() == (
            "class,0,0,0,1\n"
            "x1,2,0,0,-2\n"
            "x2,0,-2,2,0\n"
            "x3,0,2,0,0\n"
            "x4,-2,0,-2,0\n"
        )

    def test_one_by_one_dataset(self, tmp_path):
        src = tmp_path / "tiny.csv"
        src.write_text("f1,class\n3,1\n")
        mid = tmp_path / "mid.csv"
        back = tmp_path / "back.csv"
        transpose(src, mid, "conventional")
        assert mid.read_text() == "f1,3\nclass,1\n"
        transpose(mid, back, "alternative")
        assert back.read_text() == src.read_text()

    def test_double_transpose_is_identity(self, tmp_path):
        rng = np.random.default_rng(9)
        features = rng.integers(0, 4, size=(50, 20))
        labels = rng.integers(0, 2, size=50)
        src = tmp_path / "big.csv"
        write_conventional_csv(src, features, labels)
        mid = tmp_path / "mid.csv"
        back = tmp_path / "back.csv"
        transpose(src, mid, "conventional")
        transpose(mid, back, "alternative")
        assert back.read_bytes() == src.read_bytes()

    def test_cell_ij_maps_to_cell_ji(self, tmp_path):
        src = tmp_path / "conv.csv"
        src.write_text(example_csv_text())
        out = tmp_path / "alt.csv"
        transpose(src, out, "conventional")
        conv_lines = [l.split(",") for l in src.read_text().splitlines()]
        alt_lines = [l.split(",") for l in out.read_text().splitlines()]
        for i in range(len(conv_lines)):
            for j in range(len(conv_lines[0])):
                # data cell (i, j) of the conventional body appears at (j, i+1)
                # in the alternative file (first field is the row id)
                if i == 0:
                    assert conv_lines[0][j] == alt_lines[j][0]
                else:
                    assert conv_lines[i][j] == alt_lines[j][i]


class TestLayoutDuality:
    def test_selection_agrees_across_stored_layouts(self, tmp_path):
        conv_path = tmp_path / "c.csv"
        alt_path = tmp_path / "a.csv"
        generate_synthetic(400, 12, 5, "conventional", conv_path)
        transpose(conv_path, alt_path, "conventional")
        conv = select_conventional(read_conventional(conv_path), 4)
        alt = select_alternative(read_alternative(alt_path), 4)
        assert conv.names == alt.names
        assert all(a.score == b.score for a, b in zip(conv.features, alt.features))


class TestGenerator:
    def test_rows_satisfy_class_rule(self, tmp_path):
        path = tmp_path / "gen.csv"
        generate_synthetic(2000, 10, 3, "conventional", path)
        ds = read_conventional(path)
        x = np.column_stack([ds.column_codes(k) for k in range(8)])
        c = ds.class_codes()
        a = (x[:, 0] & x[:, 1]) | (x[:, 2] & x[:, 3])
        b = (x[:, 4] & x[:, 5]) | (x[:, 6] & x[:, 7])
        assert np.array_equal(c, a & b)
        # spot checks of the rule's edge cases
        all_ones = (x[:, :8] == 1).all(axis=1)
        assert np.all(c[all_ones] == 1)
        first_conjunct_dead = (x[:, 0] == 0) & (x[:, 2] == 0)
        assert np.all(c[first_conjunct_dead] == 0)

    def test_class_rate_near_expected(self, tmp_path):
        # P(c=1) = (7/16)^2 ~ 0.1914 for independent fair bits
        path = tmp_path / "gen.csv"
        generate_synthetic(20000, 10, 42, "conventional", path)
        ds = read_conventional(path)
        assert abs(ds.class_codes().mean() - (7 / 16) ** 2) < 0.02

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        generate_synthetic(500, 9, 7, "conventional", a)
        generate_synthetic(500, 9, 7, "conventional", b)
        assert a.read_bytes() == b.read_bytes()

    def test_layouts_hold_the_same_dataset(self, tmp_path):
        conv, alt = tmp_path / "c.csv", tmp_path / "a.csv"
        generate_synthetic(120, 9, 11, "conventional", conv)
        generate_synthetic(120, 9, 11, "alternative", alt)
        transposed = tmp_path / "t.csv"
        transpose(conv, transposed, "conventional")
        assert transposed.read_bytes() == alt.read_bytes()

    def test_seed_changes_content(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        generate_synthetic(500, 9, 1, "conventional", a)
        generate_synthetic(500, 9, 2, "conventional", b)
        assert a.read_bytes() != b.read_bytes()

    def test_too_few_columns_rejected(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            generate_synthetic(10, 7, 0, "conventional", tmp_path / "x.csv")

    def test_streaming_write_chunks_agree(self, tmp_path):
        # chunked and one-shot generation must emit identical bytes
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        generate_synthetic(1000, 9, 5, "conventional", a, chunk_rows=64)
        generate_synthetic(1000, 9, 5, "conventional", b, chunk_rows=100000)
        assert a.read_bytes() == b.read_bytes()
        a2, b2 = tmp_path / "a2.csv", tmp_path / "b2.csv"
        generate_synthetic(1000, 9, 5, "alternative", a2, chunk_rows=64)
        generate_synthetic(1000, 9, 5, "alternative", b2, chunk_rows=100000)
        assert a2.read_bytes() == b2.read_bytes()


class TestWriteConventional:
    def test_read_write_round_trip(self, tmp_path, example_file):
        ds = read_conventional(example_file)
        out = tmp_path / "out.csv"
        write_conventional(ds, out)
        assert out.read_text() == example_csv_text()

    def test_token_round_trip(self, tmp_path):
        text = "color,class\nred,yes\nblue,no\n"
        src = tmp_path / "tok.csv"
        src.write_text(text)
        out = tmp_path / "out.csv"
        write_conventional(read_conventional(src), out)
        assert out.read_text() == text
