"""Output rendering: stable bytes, parseable structure."""

import csv
import io
import json

import pytest

from otpsense import output


ROWS = [{"a": 1, "b": 0.5}, {"a": 2, "b": 0.25, "c": "x"}]
META = {"tool": "otpsense 0.1.0", "seed": 3}


def test_csv_layout():
    text = output.render(ROWS, META, "csv")
    lines = text.splitlines()
    assert lines[0] == "# seed: 3"          # metadata keys sorted
    assert lines[1] == "# tool: otpsense 0.1.0"
    assert lines[2] == "a,b,c"              # union of row keys, first-seen order
    assert lines[3] == "1,0.5,"
    assert lines[4] == "2,0.25,x"


def test_csv_parses_back():
    text = output.render(ROWS, META, "csv")
    body = [l for l in text.splitlines() if not l.startswith("#")]
    parsed = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert parsed[0]["a"] == "1"
    assert parsed[1]["c"] == "x"


def test_json_lines_layout():
    text = output.render(ROWS, META, "json-lines")
    lines = text.strip().split("\n")
    assert json.loads(lines[0]) == {"metadata": META}
    assert json.loads(lines[1]) == ROWS[0]
    assert json.loads(lines[2]) == ROWS[1]


def test_render_is_deterministic():
    assert output.render(ROWS, META, "csv") == output.render(ROWS, META, "csv")
    assert output.render(ROWS, META, "json-lines") == output.render(ROWS, META, "json-lines")


def test_unknown_format():
    with pytest.raises(ValueError):
        output.render(ROWS, META, "parquet")


def test_write_to_file(tmp_path):
    path = tmp_path / "table.csv"
    text = output.write(ROWS, META, "csv", str(path))
    assert path.read_text() == text


def test_write_without_path_only_returns():
    text = output.write(ROWS, META, "csv", None)
    assert text.startswith("# seed: 3\n")
