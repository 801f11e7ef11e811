"""Shared numerical kernels.

Adaptive complex-valued quadrature (Gauss-Kronrod 7/15 with interval
bisection), the complete elliptic integral of the first kind via the
arithmetic-geometric mean, a dense Hermitian eigensolver wrapper, and
bracketed root finding.

Integrands are called with a numpy array of abscissae and must return an
array of values (real or complex).  Endpoint singularities are the
caller's business: substitute them away before calling, the quadrature
itself never evaluates the endpoints but converges slowly across
unresolved inverse-square-root behavior.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DomainError,
    NoConvergence,
    NoSignChange,
    NotHermitian,
    QuadratureNotConverged,
)

# 15-point Kronrod abscissae on [-1, 1] and weights, with the embedded
# 7-point Gauss rule on the odd-indexed nodes.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance budget for one adaptive integration."""

    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise DomainError("rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class EigenResult:
    """Sorted eigenvalues and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _gk15(f, a, b):
    """One Gauss-Kronrod 7/15 panel on [a, b]: (kronrod, |kronrod-gauss|)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    y = f(mid + half * _XK)
    k = half * np.sum(_WK * y)
    g = half * np.sum(_WG * y[1::2])
    return k, abs(k - g)


def integrate_adaptive(f, a, b, spec=QuadratureSpec(), tail_bound=0.0):
    """Integrate ``f`` over [a, b] to ``max(abs_tol, rel_tol*|value|)``.

    ``f`` must accept an ndarray of points and return values (complex ok).
    ``b`` may be ``np.inf``; the tail is mapped onto a finite interval with
    x = a + t/(1-t), and ``tail_bound`` (a bound the caller supplies for
    anything beyond the machinery's reach) is added to the error estimate.

    Raises QuadratureNotConverged when the budget runs out.
    """
    if not b > a:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if np.isinf(b):
        def g(t):
            t = np.asarray(t)
            return f(a + t / (1.0 - t)) / (1.0 - t) ** 2
        return integrate_adaptive(g, 0.0, 1.0, spec, tail_bound=tail_bound)

    val, err = _gk15(f, a, b)
    # heap of (-error, seq, a, b, value, error); seq breaks ties
    heap = [(-err, 0, a, b, val, err)]
    total_val, total_err = val, err
    seq = 1
    for _ in range(spec.max_subdivisions):
        tol = max(spec.abs_tol, spec.rel_tol * abs(total_val))
        if total_err + tail_bound <= tol:
            return total_val
        neg_err, _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total_val += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, seq, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, seq + 1, mid, hi, v2, e2))
        seq += 2
    tol = max(spec.abs_tol, spec.rel_tol * abs(total_val))
    if total_err + tail_bound <= tol:
        return total_val
    raise QuadratureNotConverged(
        f"residual error {total_err:.3e} above tolerance {tol:.3e} "
        f"after {spec.max_subdivisions} subdivisions on [{a}, {b}]"
    )


def elliptic_K(k):
    """Complete elliptic integral of the first kind, modulus convention.

    K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), computed by the
    arithmetic-geometric mean: K = pi / (2 AGM(1, sqrt(1-k^2))).
    """
    if not 0.0 <= k < 1.0:
        raise DomainError(f"elliptic modulus must be in [0, 1), got {k}")
    a, b = 1.0, np.sqrt(1.0 - k * k)
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return np.pi / (2.0 * a)


def eigh(H):
    """Dense Hermitian eigendecomposition, ascending eigenvalues.

    Verifies Hermitian symmetry to 1e-12 relative before delegating to
    LAPACK (numpy.linalg.eigh).
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DomainError(f"need a square matrix, got shape {H.shape}")
    scale = np.max(np.abs(H))
    if scale > 0 and np.max(np.abs(H - H.conj().T)) > 1e-12 * scale:
        raise NotHermitian(
            f"asymmetry {np.max(np.abs(H - H.conj().T)) / scale:.2e} "
            "above 1e-12 relative"
        )
    try:
        vals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigensolver failed: {exc}") from exc
    return EigenResult(eigenvalues=vals, eigenvectors=vecs)


def find_root_bracketed(f, lo, hi, tol=1e-12):
    """Root of a scalar function on a sign-changing bracket [lo, hi].

    ``tol`` is the relative bracket tolerance on the abscissa.  Raises
    NoSignChange when f(lo) and f(hi) have the same sign.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoSignChange(
            f"f({lo:.6g}) = {flo:.3e} and f({hi:.6g}) = {fhi:.3e} "
            "have the same sign"
        )
    return brentq(f, lo, hi, xtol=tol * max(abs(lo), abs(hi), 1.0), rtol=1e-15)
