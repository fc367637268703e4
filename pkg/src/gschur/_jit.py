"""JIT switch.

Numba kernels are used unless ``GSCHUR_DISABLE_JIT`` is set to a truthy value
or numba cannot be imported; the pure-numpy kernels are then selected instead.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

JIT_REQUESTED = os.environ.get("GSCHUR_DISABLE_JIT", "").strip().lower() in _FALSY

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


JIT_ENABLED = JIT_REQUESTED and HAS_NUMBA
