"""Pure numpy implementations of the hot kernels.

Signatures match :mod:`gph._kernels` exactly; see :mod:`gph._backend`.
"""
import numpy as np

NAME = "python"


def strang_steps(values, half_phase, nl_coeff, nsteps):
    """Run ``nsteps`` Strang steps of the cubic NLS.

    ``half_phase`` is the kinetic half-step multiplier in FFT order and
    ``nl_coeff`` the nonlinear phase rate, so that one step is
    ``K(dt/2) . N(dt) . K(dt/2)`` with ``N: psi -> psi*exp(i*nl_coeff*|psi|^2)``.
    Consecutive half kinetic steps are fused.
    """
    psi = np.array(values, dtype=np.complex128, copy=True)
    nsteps = int(nsteps)
    if nsteps <= 0:
        return psi
    half = np.asarray(half_phase, dtype=np.complex128)
    full = half * half
    spec = np.fft.fft(psi) * half
    for s in range(nsteps):
        psi = np.fft.ifft(spec)
        psi *= np.exp(1j * nl_coeff * (psi.real ** 2 + psi.imag ** 2))
        spec = np.fft.fft(psi)
        spec *= full if s < nsteps - 1 else half
    return np.fft.ifft(spec)


def nonlinear_phase(values, coeff):
    v = np.asarray(values, dtype=np.complex128)
    return v * np.exp(1j * coeff * (v.real ** 2 + v.imag ** 2))


def collision_product(u, w, v):
    """Pointwise ``u * w * conj(v)``."""
    return np.asarray(u, dtype=np.complex128) * w * np.conj(v)
