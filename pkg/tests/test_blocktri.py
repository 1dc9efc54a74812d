import numpy as np
import pytest

from floqheat.blocktri import assemble_dense, solve_thomas
from floqheat.model import SingularBlockError


def random_system(rng, nblocks, b):
    # diagonally dominant blocks keep the elimination well conditioned
    diag = [rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
            + 4.0 * b * np.eye(b) for _ in range(nblocks)]
    upper = [rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
             for _ in range(nblocks - 1)]
    lower = [rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
             for _ in range(nblocks - 1)]
    rhs = rng.standard_normal(nblocks * b) + 1j * rng.standard_normal(nblocks * b)
    return diag, upper, lower, rhs


def test_assembly_layout():
    rng = np.random.default_rng(0)
    diag, upper, lower, _ = random_system(rng, 4, 2)
    full = assemble_dense(diag, upper, lower)
    assert full.shape == (8, 8)
    assert np.array_equal(full[2:4, 2:4], diag[1])
    assert np.array_equal(full[2:4, 4:6], upper[1])
    assert np.array_equal(full[4:6, 2:4], lower[1])
    assert np.all(full[0:2, 4:8] == 0)
    assert np.all(full[6:8, 0:4] == 0)


@pytest.mark.parametrize("nblocks,b", [(3, 2), (5, 3), (9, 4), (1, 5)])
def test_thomas_matches_dense_lu(nblocks, b):
    rng = np.random.default_rng(nblocks * 10 + b)
    diag, upper, lower, rhs = random_system(rng, nblocks, b)
    full = assemble_dense(diag, upper, lower)
    x_dense = np.linalg.solve(full, rhs)
    x_thomas = solve_thomas(diag, upper, lower, rhs)
    assert np.max(np.abs(x_dense - x_thomas)) <= 1e-12 * np.max(np.abs(x_dense))


def test_singular_block_raises():
    rng = np.random.default_rng(1)
    diag, upper, lower, rhs = random_system(rng, 3, 2)
    diag[0] = np.zeros((2, 2), dtype=complex)
    with pytest.raises(SingularBlockError):
        solve_thomas(diag, upper, lower, rhs)


def test_rhs_length_checked():
    rng = np.random.default_rng(2)
    diag, upper, lower, rhs = random_system(rng, 3, 2)
    with pytest.raises(ValueError):
        solve_thomas(diag, upper, lower, rhs[:-1])
