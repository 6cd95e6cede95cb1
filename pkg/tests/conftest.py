"""Shared numerical oracles for the test suite."""

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss


@pytest.fixture(scope="session")
def gauss_nodes():
    """High-order Gauss-Legendre rule on [-1, 1], reused across tests."""
    return leggauss(6000)


def sine_basis_values(config, x):
    """Matrix of basis functions phi_n(x), shape (K, len(x))."""
    L = config.box_length
    n = np.arange(1, config.basis_size + 1)
    return np.sqrt(2.0 / L) * np.sin(np.outer(n, np.pi * (x + L / 2) / L))


def quadrature_operator_matrix(config, weight_fn, gauss):
    """Matrix of a multiplicative operator in the sine basis by quadrature."""
    x0, w0 = gauss
    L = config.box_length
    x = x0 * L / 2
    w = w0 * L / 2
    phi = sine_basis_values(config, x)
    return (phi * (w * weight_fn(x))) @ phi.T
