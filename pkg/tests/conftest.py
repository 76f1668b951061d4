import csv
import io

import numpy as np
import pytest

from cpforce import DrudeLorentzParams, HalfSpace, MaterialModel, two_level_atom

# Reference parameter sets (frequencies in units of the magnetic / electric resonance).
SET_A_EPS = DrudeLorentzParams(omega_P=0.75, omega_T=1.03, gamma=0.001)
SET_B_EPS = DrudeLorentzParams(omega_P=0.75, omega_T=1.0, gamma=0.01)
SET_B_Z = 0.0075 * 2.0 * np.pi
OMEGA_S = np.sqrt(1.0 + 0.75**2 / 2.0)


def set_a_material(omega_Pm=1.0):
    return MaterialModel(SET_A_EPS, DrudeLorentzParams(omega_Pm, 1.0, 0.001))


def read_table(text):
    """Parse CLI CSV output into (columns, rows of strings), skipping '#' lines."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    cols = next(reader)
    return cols, [row for row in reader]


@pytest.fixture
def set_a_mat():
    return set_a_material()


@pytest.fixture
def set_b_mat():
    return MaterialModel(SET_B_EPS)


@pytest.fixture
def dielectric():
    return MaterialModel(SET_A_EPS)


@pytest.fixture
def magnetodielectric():
    return MaterialModel(DrudeLorentzParams(0.75, 1.0, 0.01), DrudeLorentzParams(0.5, 1.2, 0.01))


@pytest.fixture
def ground_atom():
    return two_level_atom(1.0, 1e-7)


@pytest.fixture
def geom(magnetodielectric):
    return HalfSpace(0.3, magnetodielectric)


# Acceptance verdict lines, echoed at the end of every run.
ACCEPTANCE_LINES = []


def report(criterion, ok, message):
    """Record and print one acceptance verdict, then fail the test if it did not pass."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {message}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
