"""Pure NumPy implementation of the batched kernels in ``_core``."""
import numpy as np

KIND_I, KIND_II, KIND_III, KIND_IV = 1, 2, 3, 4


def _matrices(kind, m, n, u):
    b = u.shape[0]
    if kind == KIND_I:
        return u.reshape(b, m, n)
    x = np.zeros((b, n, n), dtype=complex)
    if kind == KIND_II:
        iu = np.triu_indices(n, 1)
        x[:, iu[0], iu[1]] = u
        x[:, iu[1], iu[0]] = -u
    else:
        iu = np.triu_indices(n)
        x[:, iu[0], iu[1]] = u
        x[:, iu[1], iu[0]] = u
    return x


def diag_norm_batch(kind, m, n, coords):
    """``N(x, x)`` for each coordinate row, or ``-1.0`` outside the domain."""
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    u = coords[:, 0::2] + 1j * coords[:, 1::2]
    if kind == KIND_IV:
        s2 = np.sum(coords * coords, axis=1)
        q = np.sum(u * u, axis=1)
        val = 1.0 - 2.0 * s2 + np.abs(q) ** 2
        return np.where((val > 0.0) & (s2 < 1.0), val, -1.0)
    x = _matrices(kind, m, n, u)
    rows = x.shape[1]
    h = np.eye(rows) - x @ np.conj(np.swapaxes(x, 1, 2))
    ev = np.linalg.eigvalsh(h)
    inside = ev[:, 0] > 0.0
    det = np.prod(ev, axis=1)
    if kind == KIND_II:
        det = np.sqrt(np.abs(det))
    return np.where(inside, det, -1.0)


def power_sum(values, s):
    """Sum and sum of squares of ``values**s``."""
    p = np.power(values, s)
    return float(np.sum(p)), float(np.sum(p * p))
