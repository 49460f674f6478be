# tests/conftest.py
# --pretty: per-file summary with parametrized cases folded into one row

import random
import re
import shutil
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List

import pytest

from sosw.cli.colors import c, reset, set_enabled
from sosw.equivalence import random_lts
from sosw.harness import load_bundled_spec


TEST_FILE_DESCRIPTIONS = {
    "test_terms.py": "TERMS, SUBSTITUTION AND UNIFICATION",
    "test_tss.py": "RULE SHAPES, MARKINGS AND PATIENCE",
    "test_dsl.py": "THE .tss LANGUAGE",
    "test_semantics.py": "LTS GENERATION AND .aut FILES",
    "test_ruloids.py": "RULOID CONSTRUCTION",
    "test_formats.py": "CONGRUENCE FORMAT CHECKS",
    "test_modal.py": "MODAL LOGIC AND CLASSES",
    "test_equivalence.py": "BISIMILARITY DECISION PROCEDURES",
    "test_decomposition.py": "MODAL DECOMPOSITION",
    "test_harness.py": "CONGRUENCE HARNESS AND BUNDLED SUITE",
    "test_cli.py": "COMMAND LINE FRONT END",
    "test_validators_errors.py": "VALIDATION AND ERROR CODES",
    "test_error_registry_complete.py": "UNREGISTERED ERROR CODES",
}

_PARAM_RE = re.compile(r"\[.*\]$")

# Runs slower than this many seconds are shown next to their row
SLOW_SECONDS = 2.0


@dataclass
class _Row:
    """One test function; parametrized cases accumulate here."""
    passed: int = 0
    failed: List[str] = field(default_factory=list)
    skipped: int = 0
    seconds: float = 0.0

    @property
    def cases(self) -> int:
        return self.passed + len(self.failed) + self.skipped


_ROWS: Dict[str, Dict[str, _Row]] = defaultdict(dict)


# ============================================================
# OPTION
# ============================================================

def pytest_addoption(parser):
    parser.addoption(
        "--pretty",
        action="store_true",
        default=False,
        help="Grouped summary per test file, parametrized cases folded.",
    )


def pytest_configure(config):
    if config.getoption("--pretty"):
        config.option.verbose = 0
        config.option.quiet = 1


def pytest_report_teststatus(report, config):
    if config.getoption("--pretty") and report.when == "call":
        return "", "", ""


# ============================================================
# COLLECTION OF RESULTS
# ============================================================

def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.skipped):
        return
    file_part, _, test_part = report.nodeid.partition("::")
    func = _PARAM_RE.sub("", test_part)
    row = _ROWS[file_part].setdefault(func, _Row())
    row.seconds += report.duration
    if report.failed:
        param = _PARAM_RE.search(test_part)
        row.failed.append(param.group(0) if param else "")
    elif report.skipped:
        row.skipped += 1
    else:
        row.passed += 1


# ============================================================
# SUMMARY
# ============================================================

def _status(row: _Row) -> str:
    if row.failed:
        return f"{c('fail')}FAILED {len(row.failed)}/{row.cases}{reset()}"
    if row.skipped == row.cases:
        return f"{c('inconclusive')}SKIPPED{reset()}"
    if row.cases > 1:
        return f"{c('pass')}PASSED x{row.cases}{reset()}"
    return f"{c('pass')}PASSED{reset()}"


def pytest_sessionfinish(session, exitstatus):
    if not session.config.getoption("--pretty") or not _ROWS:
        return

    # CLI tests switch colours off for JSON reports
    set_enabled(True)
    width = shutil.get_terminal_size(fallback=(120, 20)).columns
    name_width = max(len(name) for rows in _ROWS.values() for name in rows)
    title = " SOSW TEST SUMMARY "
    print(f"\n{c('info')}{title.center(width, '=')}{reset()}\n")

    for file_part in sorted(_ROWS):
        rows = _ROWS[file_part]
        ok = sum(1 for r in rows.values() if not r.failed)
        label = TEST_FILE_DESCRIPTIONS.get(Path(file_part).name, "UNDESCRIBED TESTS")
        print(f"{c('label')}{label}{reset()}  {c('path')}{file_part}  [{ok}/{len(rows)}]{reset()}")
        for name, row in rows.items():
            line = f"  {name.ljust(name_width)}   {_status(row)}"
            if row.seconds >= SLOW_SECONDS:
                line += f"  {c('formula')}{row.seconds:.1f}s{reset()}"
            print(line)
            for param in row.failed:
                if param:
                    print(f"      {c('fail')}{param}{reset()}")
        print()

    failed = sum(len(r.failed) for rows in _ROWS.values() for r in rows.values())
    total = sum(r.cases for rows in _ROWS.values() for r in rows.values())
    closing = f" {total - failed}/{total} cases passed "
    print(f"{c('info')}{closing.center(width, '=')}{reset()}\n")


# ============================================================
# SHARED FIXTURES
# ============================================================

@pytest.fixture(scope="session")
def bpa():
    return load_bundled_spec("bpa")


@pytest.fixture(scope="session")
def linearity():
    return load_bundled_spec("linearity")


# Random systems shared by the oracle and modal cross-checks
SEEDED_SYSTEM_COUNT = 200
SEEDED_SYSTEM_SEED = 20240


@pytest.fixture(scope="session")
def seeded_systems():
    """200 LTSs of at most 12 states over a, b, c and tau, the same on every run."""
    rng = random.Random(SEEDED_SYSTEM_SEED)
    return [
        random_lts(rng, max_states=12, actions=("a", "b", "c"), density=0.5)
        for _ in range(SEEDED_SYSTEM_COUNT)
    ]
