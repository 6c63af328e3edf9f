"""Statevector hot kernels: compiled core with a pure-numpy fallback.

The backend is selected once at import time. The Cython extension is used
when it has been built, otherwise the vectorized numpy implementation takes
over transparently. Set ``EASYM_KERNELS=python`` or ``EASYM_KERNELS=cython``
to force a backend (the latter raises if the extension is missing).

Both backends implement the same two entry points with identical semantics:

``apply_two_qubit_inplace(amps, gate, qi, qj)``
    Apply a 4x4 unitary to sites ``(qi, qj)`` of a statevector, mutating
    ``amps``. Local basis order is ``|q_i q_j>`` = 00, 01, 10, 11.

``pauli_matvec(coeffs, flips, signs, amps, out)``
    Accumulate ``sum_t coeffs[t] * P_t |amps>`` into ``out`` where each
    Pauli string is encoded as a flip mask (X and Y sites) and a sign mask
    (Y and Z sites); the i^(number of Y factors) phase is folded into the
    coefficient.
"""

import os

from . import _python

_requested = os.environ.get("EASYM_KERNELS", "auto").lower()
if _requested not in ("auto", "cython", "python"):
    raise ValueError(f"EASYM_KERNELS must be auto, cython or python, got {_requested!r}")

_impl = None
if _requested in ("auto", "cython"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "EASYM_KERNELS=cython but the compiled kernel extension is not built; "
                "run `pip install -e . --no-build-isolation`"
            ) from None
if _impl is None:
    _impl = _python


def backend_name() -> str:
    """Name of the kernel backend in use: 'cython' or 'python'."""
    return "python" if _impl is _python else "cython"


apply_two_qubit_inplace = _impl.apply_two_qubit_inplace
pauli_matvec = _impl.pauli_matvec
