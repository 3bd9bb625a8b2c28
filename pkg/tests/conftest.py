import csv

import pytest

from entgrove.dataset import CATEGORICAL, LABEL, NUMERIC, ColumnSchema, DatasetTable

PLAY_TENNIS = [
    ("sunny", "hot", "high", "weak", "no"),
    ("sunny", "hot", "high", "strong", "no"),
    ("overcast", "hot", "high", "weak", "yes"),
    ("rain", "mild", "high", "weak", "yes"),
    ("rain", "cool", "normal", "weak", "yes"),
    ("rain", "cool", "normal", "strong", "no"),
    ("overcast", "cool", "normal", "strong", "yes"),
    ("sunny", "mild", "high", "weak", "no"),
    ("sunny", "cool", "normal", "weak", "yes"),
    ("rain", "mild", "normal", "weak", "yes"),
    ("sunny", "mild", "normal", "strong", "yes"),
    ("overcast", "mild", "high", "strong", "yes"),
    ("overcast", "hot", "normal", "weak", "yes"),
    ("rain", "mild", "high", "strong", "no"),
]


@pytest.fixture
def play_tennis():
    return PLAY_TENNIS


@pytest.fixture
def write_csv(tmp_path):
    def _write(rows, header, name="data.csv", delimiter=","):
        path = tmp_path / name
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        return path
    return _write


def make_table(columns: dict, labels, kinds=None) -> DatasetTable:
    """Build a table directly; kinds default to numeric for number columns."""
    kinds = kinds or {}
    schema = []
    for name, values in columns.items():
        kind = kinds.get(name) or (NUMERIC if all(isinstance(v, (int, float)) or v is None
                                                 for v in values) else CATEGORICAL)
        cats = tuple(dict.fromkeys(v for v in values if v is not None)) if kind == CATEGORICAL else ()
        schema.append(ColumnSchema(name, kind, cats))
    schema.append(ColumnSchema("class", LABEL))
    rows = tuple(zip(*columns.values(), labels)) if columns else tuple((y,) for y in labels)
    return DatasetTable(tuple(schema), rows)


# acceptance bookkeeping: one PASS/FAIL line per criterion in the summary
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(text): acceptance criterion label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        _CRITERIA.append(("PASS" if rep.passed else "FAIL", marker.args[0]))
    elif marker and rep.when == "setup" and rep.failed:
        _CRITERIA.append(("FAIL", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for status, text in _CRITERIA:
        terminalreporter.write_line(f"[{status}] {text}")
