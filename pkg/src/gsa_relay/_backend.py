"""Kernel backend selection.

The compiled extension is preferred. Set ``GSA_RELAY_BACKEND=python`` to
force the NumPy fallback, or ``compiled`` to make a missing extension an
import error.
"""
import logging
import os

logger = logging.getLogger(__name__)

_choice = os.environ.get("GSA_RELAY_BACKEND", "auto").lower()

if _choice == "python":
    from . import _kernels_py as kernels
elif _choice == "compiled":
    from . import _kernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        logger.debug("compiled kernels unavailable, using NumPy fallback")
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND
