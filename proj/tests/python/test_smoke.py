import numpy as np
import pytest

import invldm


def random_pd(k, alpha, seed):
    rng = np.random.default_rng(seed)
    h = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    return h.conj().T @ h + alpha * np.eye(k)


def test_version():
    assert invldm.__version__ == "0.1.0"


@pytest.mark.parametrize("schedule", [[], [1, 2, 3], [6]])
def test_inverse_factors(schedule):
    r = random_pd(6, 0.1, 1)
    ref = np.linalg.inv(r)
    l, d, m = invldm.inv_ldm(r, schedule)
    assert np.allclose(l @ np.diag(d) @ m.conj().T, ref, atol=1e-10)
    lo, up = invldm.inv_lu(r, schedule)
    assert np.allclose(lo @ up, ref, atol=1e-10)
    f = invldm.divfree_factorize(r, schedule)
    assert np.allclose(f.assemble_q(), ref, atol=1e-10)
    assert f.order == 6 and not f.hermitian


def test_hermitian_factors_and_counts():
    r = random_pd(8, 0.1, 2)
    f, counts = invldm.count_ops(lambda: invldm.divfree_ldl_hermitian(r))
    assert f.hermitian and f.delta.imag == 0 and f.delta.real > 0
    assert counts["cdiv"] == 0 and counts["csqrt"] == 0
    q = f.lt @ np.diag(f.dt / f.delta) @ f.lt.conj().T
    assert np.allclose(q, np.linalg.inv(r), atol=1e-10)
    _, qc = invldm.count_ops(f.assemble_q)
    assert qc["cdiv"] == 1


def test_rescaling_is_exact():
    r = 2 * np.eye(3)
    plain = invldm.divfree_ldl_hermitian(r, rescale=False)
    assert plain.delta == 128
    scaled = invldm.divfree_ldl_hermitian(r)
    assert np.array_equal(plain.assemble_q(), scaled.assemble_q())


def test_errors():
    with pytest.raises(ValueError):
        invldm.divfree_factorize(np.ones((2, 3)))
    with pytest.raises(ArithmeticError):
        invldm.divfree_factorize(np.ones((2, 2)))
    with pytest.raises(ValueError):
        invldm.detect(np.eye(3), np.ones(2), 0.1)


def test_detectors_agree_and_recover_symbols():
    rng = np.random.default_rng(3)
    pts = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2)
    h = (rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))) / np.sqrt(2)
    s = rng.integers(0, 4, 4)
    x = h @ pts[s]
    out = {d: invldm.detect(h, x, 1e-6, detector=d) for d in ("recursive", "sqrtfree", "oracle")}
    for r in out.values():
        assert list(r["symbol_indices"]) == list(s)
        assert r["order"] == out["oracle"]["order"]
    assert out["sqrtfree"]["counts"]["cdiv"] == 0
    assert out["sqrtfree"]["counts"]["csqrt"] == 0


def test_benches():
    rows = invldm.flop_sweep([2, 3], trials=5, seed=4)
    assert len(rows) == 2 * 3 * 3
    assert invldm.flop_sweep([2, 3], trials=5, seed=4, threads=2) == rows
    ber, warnings = invldm.ber_sweep(3, trials=20, snr_db=[0, 30])
    assert len(ber) == 6 and all(r["total"] == 60 for r in ber)
    assert isinstance(warnings, list)
