import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from suffixlemma import parse_lexicon  # noqa: E402


@pytest.fixture
def nkfn_set():
    return parse_lexicon(["kettlingar\tnkfn\tkettlingur", "hundar\tnkfn\thundur"])


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)

    return _write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, note in mod.RESULTS:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  [{note}]" if note else line)
