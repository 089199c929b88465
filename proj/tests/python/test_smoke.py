import math
from pathlib import Path

import numpy as np
import pytest

import gpmem

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_version():
    assert gpmem.__version__ == "0.1.0"


def test_kernels_and_admissibility():
    k = gpmem.Kernel.exponential(1.0)
    assert k.value(0.0) == pytest.approx(1.0)
    assert k.laplace(2.0) == pytest.approx(1.0 / 3.0)
    assert gpmem.validate_K0(k)["admissible"]
    assert not gpmem.validate_K0(gpmem.Kernel.polynomial_half_square())["admissible"]
    assert "exponential" in repr(k)


def test_errors_cross_the_boundary():
    with pytest.raises(gpmem.GpmemError, match="BranchMismatch"):
        gpmem.recover_K_semiaxis(1.0 / 3.0, 1.0 / 9.0, 3.0)


def test_transport_solution():
    ts = [0.5, 1.5, 3.0]
    th = gpmem.theta_semiaxis(gpmem.Kernel.constant(1.0), 1.0, ts)
    assert np.allclose(th, [0.0, 0.5, 2.0], atol=1e-6)


def test_inverse_laplace_of_a_callable():
    vals = gpmem.inverse_laplace(lambda z: 1.0 / (z + 1.0), [0.5, 2.0])
    assert np.allclose(vals, np.exp(-np.array([0.5, 2.0])), rtol=1e-9)


def test_solver_returns_arrays():
    out = gpmem.solve_time_domain(gpmem.Kernel.constant(1.0), T=1.0, dt=5e-3, nx=200, x_max=1.0)
    assert out["theta"].shape == (out["t"].size, out["x"].size)
    assert out["r"][-1] == pytest.approx(-1.0, abs=1e-9)


def test_finite_data_round_trip():
    k = gpmem.Kernel.constant(1.0)
    r = gpmem.synthetic_response(k, 2e-3, 20.0)
    res = gpmem.recover_from_finite_data(r, 2e-3, 20.0, k_horizon=5.0, consistency_check=False)
    assert res["a_estimate"] == pytest.approx(1.0, rel=1e-6)
    assert np.max(np.abs(res["k"] - 1.0)) < 1e-3


def test_modes():
    n, t = 9, 1.0
    assert gpmem.modal_theta_talbot(n, 1.0, t) == pytest.approx(gpmem.modal_theta_residue(n, 1.0, t), rel=1e-9)
    assert max(p.real for p in gpmem.modal_poles(n)) == pytest.approx(math.sqrt(n / 2))


def test_run_config(tmp_path):
    assert gpmem.run_config(str(CONFIGS / "validate_half_square.ini"), str(tmp_path / "v")) == 2
    assert gpmem.run_config(str(CONFIGS / "forward_constant.ini"), str(tmp_path / "f")) == 0
    assert (tmp_path / "f" / "manifest.json").exists()
