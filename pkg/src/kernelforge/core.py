"""Backend selection for the batched numeric kernels.

The compiled extension ``kernelforge._core`` is used when it imports;
otherwise the NumPy implementation in ``_core_py`` takes over. Setting
``KERNELFORGE_PURE=1`` forces the fallback.
"""
import logging
import os

from . import _core_py

logger = logging.getLogger(__name__)

_KINDS = {"I": _core_py.KIND_I, "II": _core_py.KIND_II, "III": _core_py.KIND_III, "IV": _core_py.KIND_IV}

if os.environ.get("KERNELFORGE_PURE", "") not in ("", "0"):
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        logger.debug("compiled core unavailable, using NumPy fallback")
        _impl = _core_py
        BACKEND = "python"

BACKENDS = {"python": _core_py}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl


def _shape_args(d):
    kind = _KINDS[d.label]
    m = getattr(d, "m", 0)
    n = d.n
    return kind, m, n


def diag_norm_batch(d, coords, backend=None):
    """Diagonal generic norm for rows of interleaved real/imag coordinates.

    Rows outside the domain map to ``-1.0``.
    """
    impl = BACKENDS[backend] if backend else _impl
    kind, m, n = _shape_args(d)
    return impl.diag_norm_batch(kind, m, n, coords)


def power_sum(values, s, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    return impl.power_sum(values, float(s))
