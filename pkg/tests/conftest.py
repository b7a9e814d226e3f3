import pytest

from fracpicard import SolverConfig, solve
from fracpicard.fixtures import reference_problem


@pytest.fixture(scope="session")
def reference():
    return reference_problem()


@pytest.fixture(scope="session")
def reference_run(reference):
    # One shared converged run at the settings most tests score against.
    return solve(reference.spec, SolverConfig(n=1024, tol=1e-10, theta_override=2.0))


@pytest.fixture
def write_config(tmp_path):
    def _write(text, name="run.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
