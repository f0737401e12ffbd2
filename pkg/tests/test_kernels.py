import numpy as np
import pytest

from hddthresh import kernels
from hddthresh.galois_bch import build_bch, weight_spectrum
from hddthresh.miscorrection import miscorrection_table

try:
    fast = kernels.get_backend("cython")
except ImportError:  # pragma: no cover
    fast = None
slow = kernels.get_backend("python")

needs_ext = pytest.mark.skipif(fast is None, reason="compiled extension not built")


@pytest.fixture(scope="module")
def coef():
    table = miscorrection_table(255, 3, weight_spectrum(build_bch(8, 3), "binomial_approx"))
    return np.ascontiguousarray(table.coefficients(0.0212))


def test_backend_names():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_ext
@pytest.mark.parametrize("variant,t", [(0, 3), (1, 4), (2, 5), (3, 7)])
def test_scaled_update_backends_agree(variant, t):
    lam = np.linspace(0, 70, 3001)
    assert np.allclose(fast.scaled_update_array(lam, 5.6, t, variant), slow.scaled_update_array(lam, 5.6, t, variant),
                       rtol=1e-12, atol=1e-15)


@needs_ext
def test_finite_update_backends_agree(coef):
    x = np.linspace(0, 1, 2001)
    assert np.allclose(fast.fn_update_array(x, coef), slow.fn_update_array(x, coef), rtol=1e-11, atol=1e-300)


@needs_ext
@pytest.mark.parametrize("w", [1, 3, 8])
def test_coupled_runs_agree(coef, w):
    for run, args in ((lambda k: k.finite_coupled_run, (coef, w, 300, 1e-10, 1e-12)),
                      (lambda k: k.scaled_coupled_run, (5.5, 3, 0, w, 300, 1e-8, 1e-12))):
        start = 0.0212 if len(args) == 5 else 5.5
        xa, xb = np.full(40, start), np.full(40, start)
        ra = run(fast)(xa, *args)
        rb = run(slow)(xb, *args)
        assert ra[0] == rb[0] and ra[1] == rb[1]
        assert np.allclose(xa, xb, rtol=1e-8, atol=1e-14)
