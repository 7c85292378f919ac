"""
Special functions and unitary transform kernels.

Everything here works in nats; conversion to bits (a factor ``LOG2E``) is left
to the capacity-facing call sites.
"""

import logging

import numpy as np
import numpy.typing as npt
from scipy import special

from .errors import DomainError

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

EULER_GAMMA: float = float(np.euler_gamma)
LOG2E: float = float(np.log2(np.e))

# exi(x) switches from scipy's E1 to the continued fraction above this 1/x
_EXI_SWITCH = 100.0
_LENTZ_ITERATIONS = 60
_LENTZ_TINY = 1e-300


def _as_real_array(x: npt.ArrayLike) -> RealArray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite argument: {x!r}")
    return arr


def _scaled_e1_continued_fraction(t: RealArray) -> RealArray:
    """e^t E1(t) by the modified Lentz continued fraction (accurate for t >~ 1)."""
    b = t + 1.0
    c = np.full_like(t, 1.0 / _LENTZ_TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _LENTZ_ITERATIONS + 1):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def ei_negative(x: npt.ArrayLike) -> float | RealArray:
    """
    Exponential integral Ei(x) for strictly negative x.

    Args:
        x: Scalar or array, every entry finite and < 0

    Returns:
        Ei(x) with the same shape as ``x``

    Raises:
        DomainError: Some entry is non-negative or non-finite
    """
    arr = _as_real_array(x)
    if np.any(arr >= 0.0):
        raise DomainError(f"ei_negative requires x < 0, got {x!r}")
    out = special.expi(arr)
    return float(out) if out.ndim == 0 else out


def exi(x: npt.ArrayLike) -> float | RealArray:
    """
    -e^{1/x} Ei(-1/x) in nats, extended by continuity with exi(0) = 0.

    This is the ergodic-capacity kernel E[ln(1 + x|h|^2)] for |h|^2 ~ Exp(1).
    """
    arr = _as_real_array(x)
    if np.any(arr < 0.0):
        raise DomainError(f"exi requires x >= 0, got {x!r}")

    out = np.zeros_like(arr)
    positive = arr > 0.0
    t = np.divide(1.0, arr, out=np.full_like(arr, np.inf), where=positive)

    near = positive & (t <= _EXI_SWITCH)
    if np.any(near):
        out[near] = np.exp(t[near]) * special.exp1(t[near])

    far = positive & (t > _EXI_SWITCH)
    if np.any(far):
        logger.debug(f"exi: continued fraction for {np.count_nonzero(far)} argument(s)")
        out[far] = _scaled_e1_continued_fraction(t[far])

    return float(out) if out.ndim == 0 else out


def unitary_dft(
    v: npt.ArrayLike, inverse: bool = False, size: int | None = None
) -> ComplexArray:
    """
    Unitary (1/sqrt(M)-normalized) DFT or IDFT along the last axis.

    Args:
        v: Complex vector (or stack of vectors) of length M
        inverse: Apply the IDFT instead of the DFT
        size: Expected M; checked when given

    Raises:
        DomainError: Empty input or length mismatch with ``size``
    """
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim == 0 or arr.shape[-1] < 1:
        raise DomainError("unitary_dft needs a vector of length M >= 1")
    if size is not None and arr.shape[-1] != size:
        raise DomainError(f"expected length {size}, got {arr.shape[-1]}")
    if inverse:
        return np.fft.ifft(arr, norm="ortho")
    return np.fft.fft(arr, norm="ortho")
