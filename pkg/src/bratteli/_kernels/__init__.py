"""Kernel backend selection.

The float transport kernels exist twice: a compiled extension (``_fast``,
built from Cython at install time) and a pure-python/numpy fallback
(``_py``).  The compiled module is preferred when importable; set
``BRATTELI_PURE=1`` to force the fallback.  Exact-arithmetic kernels always
come from the python module.

Both lanes share one test suite and must agree to 1e-12; ``backend_name``
reports which lane is active.
"""

from __future__ import annotations

import os

import numpy as np

from . import _py

solve_transport = _py.solve_transport  # generic scalar type (Fraction or float)

_fast = None
if os.environ.get("BRATTELI_PURE", "") != "1":
    try:
        import importlib

        _fast = importlib.import_module(__name__ + "._fast")
    except ImportError:
        _fast = None


def backend_name() -> str:
    return "compiled" if _fast is not None else "pure-python"


def solve_transport_float(a, b, C, tol: float = 1e-9):
    """Float transportation solve; dispatches to the compiled lane."""
    if _fast is not None:
        a = np.ascontiguousarray(a, dtype=np.float64)
        b = np.ascontiguousarray(b, dtype=np.float64)
        C = np.ascontiguousarray(C, dtype=np.float64)
        cost, cells_i, cells_j, cells_f = _fast.solve_transport(a, b, C, tol)
        return float(cost), list(zip(cells_i.tolist(), cells_j.tolist(), cells_f.tolist()))
    Cl = C.tolist() if isinstance(C, np.ndarray) else C
    al = a.tolist() if isinstance(a, np.ndarray) else list(a)
    bl = b.tolist() if isinstance(b, np.ndarray) else list(b)
    cost, cells = _py.solve_transport(al, bl, Cl, tol)
    return float(cost), cells


def transfer_table_2(sup_idx, sup_w, D):
    if _fast is not None:
        return _fast.transfer_table_2(
            np.ascontiguousarray(sup_idx, dtype=np.int64),
            np.ascontiguousarray(sup_w, dtype=np.float64),
            np.ascontiguousarray(D, dtype=np.float64),
        )
    return _py.transfer_table_2(sup_idx, sup_w, D)


def transfer_rows_2(centers, sup_idx, sup_w, D):
    if _fast is not None:
        return _fast.transfer_rows_2(
            np.ascontiguousarray(centers, dtype=np.int64),
            np.ascontiguousarray(sup_idx, dtype=np.int64),
            np.ascontiguousarray(sup_w, dtype=np.float64),
            np.ascontiguousarray(D, dtype=np.float64),
        )
    return _py.transfer_rows_2(centers, sup_idx, sup_w, D)
