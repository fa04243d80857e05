"""Selects the kernel backend at import time.

The compiled extension (`conetrace._kernels`) is used when it imported
cleanly; setting the environment variable CONETRACE_PURE_PYTHON to a
non-empty value forces the numpy fallback.  Both backends expose the
same five callables with identical signatures and return conventions,
so the rest of the package never needs to know which one is active.
"""

import os

from . import _kernels_py

if os.environ.get("CONETRACE_PURE_PYTHON"):
    _impl = _kernels_py
    backend_name = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        backend_name = "compiled"
    except ImportError:
        _impl = _kernels_py
        backend_name = "python"

packet_eval = _impl.packet_eval
pair_current = _impl.pair_current
traj_interp = _impl.traj_interp
lightcone_g = _impl.lightcone_g
lightcone_bisect = _impl.lightcone_bisect

# Batched evaluation is vectorized numpy either way; the compiled path
# would not beat BLAS-backed matmul here.
packet_eval_batch = _kernels_py.packet_eval_batch
