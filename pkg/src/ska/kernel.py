"""Kernel lane selection: compiled scan when built, pure Python otherwise.

The compiled lane additionally bails out (OverflowError) on inputs whose
scaled entropies could overflow int64 cross-products; the dispatcher then
reruns the pure lane, which uses arbitrary-precision integers.
"""

from __future__ import annotations

from typing import Sequence

from . import _kernel_pure
from .errors import SkaError

try:
    from . import _kernel_fast  # type: ignore[attr-defined]
except ImportError:  # extension not built; pure lane only
    _kernel_fast = None


def has_fast_lane() -> bool:
    return _kernel_fast is not None


def default_backend() -> str:
    return "fast" if _kernel_fast is not None else "pure"


def available_backends() -> tuple[str, ...]:
    return ("pure", "fast") if _kernel_fast is not None else ("pure",)


def minimize_over_partitions(n: int, ent: Sequence[int], backend: str | None = None):
    """Dispatch to the selected lane; see ``_kernel_pure`` for the contract."""
    if backend is None:
        backend = default_backend()
    if backend == "pure":
        return _kernel_pure.minimize_over_partitions(n, ent)
    if backend == "fast":
        if _kernel_fast is None:
            raise SkaError("compiled kernel is not available; build with setup.py build_ext --inplace")
        try:
            return _kernel_fast.minimize_over_partitions(n, ent)
        except OverflowError:
            return _kernel_pure.minimize_over_partitions(n, ent)
    raise SkaError(f"unknown kernel backend {backend!r}")
