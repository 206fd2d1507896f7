"""Kernel backend selection: compiled extension if available, numpy otherwise.

``BACKEND`` is "compiled" or "python".  Set ABFIELD_FORCE_PYTHON_KERNELS=1 to
force the fallback (used by the benchmark and the backend-equivalence tests).
"""

import os

from . import _kernels_py

if os.environ.get("ABFIELD_FORCE_PYTHON_KERNELS") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

step_complex = _impl.step_complex
step_real = _impl.step_real
