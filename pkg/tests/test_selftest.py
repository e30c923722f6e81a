import numpy as np
import pytest

from app.services import selftest
from app.services.estimator import objective_gradient
from app.services.selftest import CHECKS, check_gradient, run_selftest
from app.utils import trial_rng


def test_every_check_passes():
    results = run_selftest(seed=8, n_instances=5)
    assert [r.name for r in results] == list(CHECKS)
    assert all(r.passed for r in results)
    assert all(r.max_error <= r.tolerance for r in results)


def test_factorization_tolerance():
    assert CHECKS["kronecker_response"][1] == 1e-10


@pytest.mark.parametrize("index", range(5))
def test_gradient_check_flags_small_absolute_offsets(index, monkeypatch):
    _, tolerance = CHECKS["objective_gradient"]
    assert check_gradient(trial_rng(4, index)) <= tolerance

    def shifted(aoa, m, y, counter=None):
        return objective_gradient(aoa, m, y, counter) + 1e-4 * np.vdot(y, y).real

    monkeypatch.setattr(selftest, "objective_gradient", shifted)
    assert check_gradient(trial_rng(4, index)) > tolerance
