import math
import os
import subprocess
import sys

import numpy as np
import pytest

from zcurv.numeric import Grid, KnownSolution, backend, integrate_backlund, integrate_lax
from zcurv.transforms import lax_pair

needs_ext = pytest.mark.skipif(backend.compiled is None, reason="compiled kernels not built")
U0 = -2 * math.log(4)


def test_pure_override():
    code = "from zcurv.numeric import BACKEND; print(BACKEND)"
    env = dict(os.environ, ZCURV_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_default_is_compiled():
    code = "from zcurv.numeric import BACKEND; print(BACKEND)"
    env = {k: v for k, v in os.environ.items() if k != "ZCURV_PURE"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"


@needs_ext
@pytest.mark.parametrize("v", ["0", "x*y"])
def test_backlund_kernels_bit_identical(lw, v):
    g = Grid.square(0, 0, 1, 1, 0.02)
    k = KnownSolution(("x", "y"), {"v": v})
    a = integrate_backlund(lw.backlund["bt_u"], k, U0, g, kernels=backend.compiled)
    b = integrate_backlund(lw.backlund["bt_u"], k, U0, g, kernels=backend.fallback)
    assert a.backend == "cython" and b.backend == "python"
    assert np.array_equal(a.field.values, b.field.values)
    assert np.array_equal(a.transposed.values, b.transposed.values)


@needs_ext
def test_lax_kernels_bit_identical(lw):
    k = KnownSolution(("x", "y"), {"u": "x*y"})
    p = lax_pair(lw.gamma["Gamma"])
    a = integrate_lax(p, k, (0, 0, 1, 1), 200, kernels=backend.compiled)
    b = integrate_lax(p, k, (0, 0, 1, 1), 200, kernels=backend.fallback)
    assert np.array_equal(a.x_then_y, b.x_then_y) and a.defect == b.defect
