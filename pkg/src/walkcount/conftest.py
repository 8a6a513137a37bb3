import numpy as np
import pytest

from walkcount.qstate import DenseUnitary, HilbertDims, Rng

SEED = 20240101


@pytest.fixture
def rng() -> Rng:
    return Rng(SEED)


def random_unitary(n: int, seed: int) -> DenseUnitary:
    """Haar-ish random unitary from the QR decomposition of a complex Gaussian"""
    gen = np.random.default_rng(seed)
    z = gen.normal(size=(n, n)) + 1j * gen.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return DenseUnitary(HilbertDims((n,)), q)
