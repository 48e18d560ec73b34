"""Fixed-order compensated summation.

All quadrature reductions in the package go through these helpers so that
results are bit-reproducible: terms are accumulated strictly left to right
with Neumaier's variant of Kahan summation, compiled without fast-math so
the compiler may not reassociate.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _neumaier(values):
    s = 0.0
    c = 0.0
    for x in values:
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


@njit(cache=True)
def _neumaier_rows(matrix):
    out = np.empty(matrix.shape[0])
    for i in range(matrix.shape[0]):
        out[i] = _neumaier(matrix[i])
    return out


def compensated_sum(values):
    """Sum a 1-D array in index order with Neumaier compensation.

    Complex input is summed componentwise and returned as a complex number.
    """
    a = np.asarray(values)
    if a.ndim != 1:
        a = a.ravel()
    if np.iscomplexobj(a):
        re = _neumaier(np.ascontiguousarray(a.real, dtype=np.float64))
        im = _neumaier(np.ascontiguousarray(a.imag, dtype=np.float64))
        return complex(re, im)
    return float(_neumaier(np.ascontiguousarray(a, dtype=np.float64)))


def compensated_row_sums(matrix):
    """Row-wise :func:`compensated_sum` of a 2-D array."""
    m = np.asarray(matrix)
    if m.ndim != 2:
        raise ValueError("expected a 2-D array")
    if np.iscomplexobj(m):
        re = _neumaier_rows(np.ascontiguousarray(m.real, dtype=np.float64))
        im = _neumaier_rows(np.ascontiguousarray(m.imag, dtype=np.float64))
        return re + 1j * im
    return _neumaier_rows(np.ascontiguousarray(m, dtype=np.float64))
