"""Compute-backend selection.

Hot kernels exist twice: a numba @njit build and a pure-numpy build with
identical integer/float semantics.  The numba build is the default when
numba imports; setting STEREOBENCH_NO_NUMBA=1 (or =true/yes) forces the
numpy path.  Both paths produce bit-identical outputs; see
tests/test_backends.py.
"""

import os

try:
    import numba

    # workqueue never depends on the host's TBB/OpenMP versions
    numba.config.THREADING_LAYER = "workqueue"
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_ENV_DISABLE = os.environ.get("STEREOBENCH_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _ENV_DISABLE in ("1", "true", "yes")


def default_backend():
    return "numba" if (HAVE_NUMBA and not NUMBA_DISABLED) else "numpy"


def thread_count(cli_value=None):
    """Worker threads for numba kernels; never affects results.

    Precedence: explicit CLI value, then STEREOBENCH_THREADS, then 1.
    """
    if cli_value is not None:
        return max(1, int(cli_value))
    env = os.environ.get("STEREOBENCH_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def set_threads(n):
    if HAVE_NUMBA and not NUMBA_DISABLED:
        numba.set_num_threads(max(1, int(n)))
