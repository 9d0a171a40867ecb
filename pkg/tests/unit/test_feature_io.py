"""Tests for feature and bigram CSV dumps."""

import csv

import pytest

from binsleuth.feature_io import (
    BIGRAM_HEADER,
    FEATURE_HEADER,
    FeatureFileError,
    read_feature_csv,
    render_bigram_csv,
    write_bigram_csv,
    write_feature_csv,
)
from binsleuth.features import bigram_features, featurize_full
from binsleuth.types import CodeSample


@pytest.fixture
def vectors():
    samples = [
        CodeSample(data=bytes([0x00, 0x01, 0x00, 0x01]), source_id="a.bin"),
        CodeSample(data=bytes(range(37)), source_id="dir/b.bin"),
    ]
    return [featurize_full(samples[0], "mips"), featurize_full(samples[1])]


class TestFeatureCsv:
    """Test the 264-column feature CSV."""

    def test_header_and_width(self, tmp_path, vectors):
        """Test the fixed header and 264-column rows."""
        path = tmp_path / "features.csv"
        assert write_feature_csv(path, vectors) == 2

        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == FEATURE_HEADER
        assert len(rows[0]) == 264
        assert all(len(row) == 264 for row in rows[1:])
        assert rows[1][:4] == ["mips", "a.bin", "4", "4"]

    def test_read_back(self, tmp_path, vectors):
        """Test that written vectors read back with labels and values."""
        path = tmp_path / "features.csv"
        write_feature_csv(path, vectors)
        loaded = read_feature_csv(path)

        assert [v.source_id for v in loaded] == ["a.bin", "dir/b.bin"]
        assert loaded[0].label == "mips"
        assert loaded[1].label is None
        assert loaded[0].values == vectors[0].values
        assert loaded[1].values == pytest.approx(vectors[1].values, abs=1e-9)

    def test_identical_inputs_give_identical_bytes(self, tmp_path, vectors):
        """Test that equal vectors give equal files."""
        write_feature_csv(tmp_path / "one.csv", vectors)
        write_feature_csv(tmp_path / "two.csv", vectors)
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()

    def test_wrong_header(self, tmp_path):
        """Test that an unexpected header is rejected."""
        path = tmp_path / "bad.csv"
        path.write_text("label,source_id\nx,y\n")
        with pytest.raises(FeatureFileError):
            read_feature_csv(path)

    def test_short_row(self, tmp_path, vectors):
        """Test that a truncated row is rejected."""
        path = tmp_path / "features.csv"
        write_feature_csv(path, vectors)
        with open(path, "a") as f:
            f.write("x,y,1,1,0.5\n")
        with pytest.raises(FeatureFileError):
            read_feature_csv(path)


class TestBigramCsv:
    """Test the sparse bigram dump."""

    def test_rows_in_index_order(self, tmp_path):
        """Test that sparse rows follow ascending bigram index."""
        vector = bigram_features(CodeSample(data=bytes([0x01, 0x00, 0x01]), source_id="x"), "arm")
        path = tmp_path / "bigrams.csv"

        assert write_bigram_csv(path, [vector]) == 2
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(BIGRAM_HEADER)
        assert lines[1:] == ["arm,x,1,0.5", "arm,x,256,0.5"]
        assert path.read_text() == render_bigram_csv([vector])
