"""Block-tridiagonal complex systems: dense assembly and a Thomas-type solver.

Row convention for R block rows of size B:

    lower[r-1] @ x[r-1] + diag[r] @ x[r] + upper[r] @ x[r+1] = rhs[r]

so ``upper`` and ``lower`` each hold R-1 blocks.
"""
from __future__ import annotations

import numpy as np

from .model import SingularBlockError

__all__ = ["assemble_dense", "solve_thomas"]


def assemble_dense(diag, upper, lower):
    """Stack the blocks into one dense complex matrix."""
    nblocks = len(diag)
    b = diag[0].shape[0]
    full = np.zeros((nblocks * b, nblocks * b), dtype=complex)
    for r in range(nblocks):
        full[r * b:(r + 1) * b, r * b:(r + 1) * b] = diag[r]
        if r + 1 < nblocks:
            full[r * b:(r + 1) * b, (r + 1) * b:(r + 2) * b] = upper[r]
            full[(r + 1) * b:(r + 2) * b, r * b:(r + 1) * b] = lower[r]
    return full


def solve_thomas(diag, upper, lower, rhs):
    """Forward block elimination / back substitution.

    rhs is a flat vector of length R*B; returns the solution in the same
    layout.  Pivoting happens only inside each block solve, which is fine
    for the diagonally dominant systems produced by damped resonator
    networks.
    """
    nblocks = len(diag)
    b = diag[0].shape[0]
    if rhs.shape[0] != nblocks * b:
        raise ValueError("rhs length does not match the block layout")
    rhs_blocks = rhs.reshape(nblocks, b)

    dmod = [None] * nblocks
    rmod = [None] * nblocks
    dmod[0] = diag[0]
    rmod[0] = rhs_blocks[0]
    try:
        for r in range(1, nblocks):
            w = np.linalg.solve(dmod[r - 1].T, lower[r - 1].T).T
            dmod[r] = diag[r] - w @ upper[r - 1]
            rmod[r] = rhs_blocks[r] - w @ rmod[r - 1]
        x = np.empty((nblocks, b), dtype=complex)
        x[-1] = np.linalg.solve(dmod[-1], rmod[-1])
        for r in range(nblocks - 2, -1, -1):
            x[r] = np.linalg.solve(dmod[r], rmod[r] - upper[r] @ x[r + 1])
    except np.linalg.LinAlgError as exc:
        raise SingularBlockError(f"singular block during elimination: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularBlockError("non-finite solution from block elimination")
    return x.reshape(-1)
