"""Kernel backend selection.

Two hot loops dominate runtime: pairwise cosine-distance blocks and the t-SNE
iteration.

- ``cosine_block`` always runs on the numpy/BLAS matrix product: measured
  against a compiled elementwise loop, BLAS wins by an order of magnitude (see
  ``benchmarks/bench_kernels.py``). The compiled loop is kept as an
  independent reference implementation for cross-checks.
- ``tsne_step`` dispatches to the compiled extension when it was built: the
  fused single pass avoids numpy's chain of full n-by-n temporaries and is
  3-15x faster at the sizes this package targets.

Setting ``SEMSHIFT_PURE_PYTHON=1`` forces the numpy fallback for everything.
Per-pair results are deterministic regardless of thread count; cross-backend
differences are at the level of float summation order only.
"""

from __future__ import annotations

import os

from . import _kernels_py

_impl = _kernels_py
if os.environ.get("SEMSHIFT_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _kernels as _compiled

        _impl = _compiled
    except ImportError:
        pass


def backend_name() -> str:
    return "python" if _impl is _kernels_py else "compiled"


def cosine_block(u, v):
    return _kernels_py.cosine_block(u, v)


def tsne_step(y, p_opt, p_report):
    return _impl.tsne_step(y, p_opt, p_report)
