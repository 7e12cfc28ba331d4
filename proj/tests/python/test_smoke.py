import math

import numpy as np
import pytest

import cvclone


def test_single_pass_fidelities():
    report = cvclone.run_protocol("single-pass", alpha_x=1.0, alpha_p=2.0)
    assert [c["name"] for c in report["clones"]] == ["A", "B"]
    for clone in report["clones"]:
        assert clone["fidelity"] == pytest.approx(2 / 3, abs=1e-12)
        assert np.allclose(clone["cov"], np.eye(2), atol=1e-12)


def test_asymmetric_sweep():
    values = [0.1, 0.25, 0.5]
    rows = cvclone.sweep("V", values, "asymmetric")
    for v, row in zip(values, rows):
        assert row["clones"][0]["fidelity"] == pytest.approx(1 / (1 + v), abs=1e-12)
        assert row["clones"][1]["fidelity"] == pytest.approx(4 * v / (4 * v + 1), abs=1e-12)


def test_state_and_gates():
    state = cvclone.tensor([cvclone.coherent(1.0, 2.0), cvclone.vacuum(2)])
    net = cvclone.compose([cvclone.qnd_xp(1.0, 0, 1), cvclone.qnd_xp(1.0, 0, 2),
                           cvclone.qnd_xp(-1.0, 1, 0), cvclone.qnd_xp(-1.0, 2, 0)])
    assert cvclone.is_symplectic(net.matrix)
    out = cvclone.apply(net, state)
    clone = out.reduced([1])
    assert cvclone.fidelity_with_coherent(clone, 1.0, 2.0) == pytest.approx(2 / 3, abs=1e-12)
    assert min(out.symplectic_eigenvalues()) >= 0.5 - 1e-10


def test_homodyne_and_squeezing():
    s = cvclone.squeezed_vacuum(0.25, "x")
    assert s.is_pure()
    outcome, post = cvclone.homodyne(cvclone.vacuum(2), 0, "p", outcome="forced", outcome_value=0.3)
    assert outcome == 0.3
    assert post.num_modes == 1
    assert cvclone.squeeze_prep_kappa(0.25) == pytest.approx(math.sqrt(0.5))


def test_montecarlo_is_reproducible():
    a = cvclone.montecarlo("single-pass", trials=200, seed=5, alpha_x=1.0, alpha_p=2.0)
    b = cvclone.montecarlo("single-pass", trials=200, seed=5, alpha_x=1.0, alpha_p=2.0)
    assert a == b


def test_feasibility_examples():
    assert cvclone.feasibility({"kappa": 1.0, "optical_density": 100.0})["pass"] is True
    assert cvclone.feasibility({"kappa": 1.0, "optical_density": 2.0})["pass"] is False


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        cvclone.run_protocol("squeeze-prep", V=0.7)
    with pytest.raises(ValueError):
        cvclone.GaussianState(np.zeros(2), np.diag([0.1, 0.1]))
