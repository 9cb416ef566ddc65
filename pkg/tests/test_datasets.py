import numpy as np
import pytest

from iwal.datasets import load_dataset, save_csv
from iwal.errors import DatasetFormatError


class TestCsv:
    def test_basic_row(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("+1,0.5,-0.2\n")
        X, y = load_dataset(path)
        assert y.tolist() == [1.0]
        assert X.tolist() == [[0.5, -0.2]]

    def test_label_sign_mapping(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,0.0\n-1,0.0\n0,0.0\n2,0.0\n")
        _, y = load_dataset(path)
        assert y.tolist() == [1.0, -1.0, -1.0, 1.0]

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("")
        with pytest.raises(DatasetFormatError, match="empty"):
            load_dataset(path)

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("+1,0.5\n+1,oops\n")
        with pytest.raises(DatasetFormatError, match="line 2") as info:
            load_dataset(path)
        assert info.value.line_number == 2

    def test_mixed_dimensions_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("+1,0.5,0.2\n-1,0.1\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(path)

    def test_round_trip(self, tmp_path, rng):
        X = rng.normal(size=(25, 4))
        y = rng.choice([-1.0, 1.0], size=25)
        path = tmp_path / "data.csv"
        save_csv(path, X, y)
        X2, y2 = load_dataset(path)
        assert np.array_equal(X, X2)
        assert np.array_equal(y, y2)

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("# header\n\n+1,1.0\n")
        X, y = load_dataset(path)
        assert len(X) == 1


class TestSvmlight:
    def test_sparse_row(self, tmp_path):
        path = tmp_path / "data.svm"
        path.write_text("+1 1:0.5 3:-0.2\n-1 2:1.0\n")
        X, y = load_dataset(path, fmt="svmlight")
        assert X.shape == (2, 3)
        assert X[0].tolist() == [0.5, 0.0, -0.2]
        assert X[1].tolist() == [0.0, 1.0, 0.0]
        assert y.tolist() == [1.0, -1.0]

    def test_bad_token_reports_line(self, tmp_path):
        path = tmp_path / "data.svm"
        path.write_text("+1 1:0.5\n-1 nonsense\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(path, fmt="svmlight")

    def test_zero_index_rejected(self, tmp_path):
        path = tmp_path / "data.svm"
        path.write_text("+1 0:0.5\n")
        with pytest.raises(DatasetFormatError, match="1-based"):
            load_dataset(path, fmt="svmlight")


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path / "x", fmt="parquet")
