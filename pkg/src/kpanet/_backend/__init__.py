"""Backend selection: compiled kernels when available, pure Python otherwise.

The environment variable KPA_BACKEND forces a choice: "c" (fail if the
extension is missing), "python", or "auto" (default). Both backends expose
the same functions and produce bit-identical event logs for the same seed;
the compiled one is roughly two orders of magnitude faster on the
simulation loop and the changepoint scan.
"""

from __future__ import annotations

import os
import warnings

_choice = os.environ.get("KPA_BACKEND", "auto").strip().lower()

if _choice in ("auto", ""):
    try:
        from . import _ckernels as _impl

        BACKEND = "c"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"
        warnings.warn(
            "kpanet compiled kernels not built; using the pure Python backend "
            "(correct but slow). Reinstall with Cython available to compile.",
            RuntimeWarning,
            stacklevel=2,
        )
elif _choice in ("c", "compiled", "fast"):
    from . import _ckernels as _impl

    BACKEND = "c"
elif _choice in ("python", "pure", "py"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    raise ImportError(f"unknown KPA_BACKEND value: {_choice!r}")

THETA_FLOOR = 1e-9
ROOT_INTERIOR = 0
ROOT_LOW = 1
ROOT_HIGH = 2

simulate_events = _impl.simulate_events
count_targets_collapsed = _impl.count_targets_collapsed
count_targets_mechanistic = _impl.count_targets_mechanistic
score_same_sum = _impl.score_same_sum
loglik_same_sum = _impl.loglik_same_sum
solve_theta = _impl.solve_theta
scan_split_loglik = _impl.scan_split_loglik
