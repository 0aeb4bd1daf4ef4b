"""Numerical kernels: modified Bessel K0/K1, semi-infinite quadrature, 1-D searches.

Every routine takes its tolerances from an explicit spec object; nothing here
reads global state.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import special

from twrc.errors import BracketError, DomainError, NonConvergence

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "SearchSpec",
    "bessel_k0",
    "bessel_k0e",
    "bessel_k1",
    "bessel_k1e",
    "find_root_decreasing",
    "golden_section_batch",
    "integrate_semi_infinite",
    "maximize_concave_1d",
]


# --- Bessel functions -------------------------------------------------------


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("modified Bessel K is defined here only for x > 0")
    return x


def _out(y):
    return float(y) if np.ndim(y) == 0 else y


def bessel_k0(x):
    """K_0(x) for x > 0; underflows to 0 for large x."""
    return _out(special.k0(_check_positive(x)))


def bessel_k1(x):
    """K_1(x) for x > 0; underflows to 0 for large x."""
    return _out(special.k1(_check_positive(x)))


def bessel_k0e(x):
    """Exponentially scaled ``exp(x) * K_0(x)``."""
    return _out(special.k0e(_check_positive(x)))


def bessel_k1e(x):
    """Exponentially scaled ``exp(x) * K_1(x)``."""
    return _out(special.k1e(_check_positive(x)))


# --- quadrature -------------------------------------------------------------

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (xgk[1], xgk[3], xgk[5], xgk[7]).
_W_GAUSS = np.zeros(15)
_W_GAUSS[[1, 3, 5]] = _WG[:3]
_W_GAUSS[7] = _WG[3]
_W_GAUSS[[13, 11, 9]] = _WG[:3]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_cut: Optional[float] = None
    """Fixed upper truncation point; ``None`` chooses it from the decay rate or adaptively."""
    grading_ratio: float = 0.25
    grading_depth: float = 1e-12
    """Geometric panels toward 0 stop once the innermost panel is this fraction of the range."""

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be at least 10")


class QuadResult(NamedTuple):
    value: float
    error: float
    upper: float
    panels: int


def _gk_panels(f, a: np.ndarray, b: np.ndarray):
    """Kronrod estimate and |Kronrod - Gauss| error for each panel [a_i, b_i]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError("integrand returned a non-finite value")
    k = half * (fx @ _W_KRONROD)
    g = half * (fx @ _W_GAUSS)
    return k, np.abs(k - g)


def _graded_breakpoints(upper: float, spec: QuadratureSpec) -> np.ndarray:
    pts = [upper]
    x = upper
    floor = upper * spec.grading_depth
    while x > floor:
        x *= spec.grading_ratio
        pts.append(x)
    pts.append(0.0)
    return np.array(pts[::-1])


def _adaptive(f, breakpoints: np.ndarray, spec: QuadratureSpec) -> QuadResult:
    a, b = breakpoints[:-1], breakpoints[1:]
    vals, errs = _gk_panels(f, a, b)
    # Max-heap on panel error; ties broken by left endpoint for determinism.
    heap = [(-e, float(lo), float(hi), float(v)) for v, e, lo, hi in zip(vals, errs, a, b)]
    heapq.heapify(heap)
    total = float(np.sum(vals))
    err = float(np.sum(errs))
    n_split = 0
    while err > max(spec.rel_tol * abs(total), spec.abs_tol):
        if n_split >= spec.max_subdivisions:
            raise NonConvergence(
                f"quadrature error {err:.3e} above tolerance after {n_split} subdivisions"
            )
        # Split the worst few panels in one vectorized integrand call.
        batch = [heapq.heappop(heap) for _ in range(min(len(heap), 8))]
        lo, hi = [], []
        for neg_e, l, h, v in batch:
            lo.extend([l, 0.5 * (l + h)])
            hi.extend([0.5 * (l + h), h])
            total -= v
            err += neg_e
        nv, ne_ = _gk_panels(f, np.array(lo), np.array(hi))
        for v, e, l, h in zip(nv, ne_, lo, hi):
            heapq.heappush(heap, (-float(e), l, h, float(v)))
        total += float(np.sum(nv))
        err += float(np.sum(ne_))
        n_split += len(lo) // 2
    # Resum to avoid drift from incremental updates.
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return QuadResult(total, err, float(breakpoints[-1]), len(heap))


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = QuadratureSpec(),
    decay_rate: Optional[float] = None,
) -> QuadResult:
    """Integrate a vectorized ``f`` over [0, inf).

    The range is truncated at ``T``: ``spec.tail_cut`` if set, else
    ``(ln(1/abs_tol) + 10) / decay_rate`` when the integrand is known to carry
    an ``exp(-decay_rate * x)`` envelope, else found by doubling until a
    further panel contributes below ``abs_tol / 10``. [0, T] is split into
    geometrically graded panels toward 0 (log-type singularities there) and
    refined adaptively with a 7/15-point Gauss-Kronrod pair.

    The returned ``error`` is the sum of per-panel |K15 - G7| differences plus
    the estimated discarded tail.
    """
    if spec.tail_cut is not None:
        upper = float(spec.tail_cut)
        tail = 0.0
    elif decay_rate is not None:
        if not decay_rate > 0:
            raise DomainError("decay_rate must be positive")
        upper = (math.log(1.0 / spec.abs_tol) + 10.0) / decay_rate
        tail = 0.0
    else:
        upper, tail = _find_tail_cut(f, spec)
    res = _adaptive(f, _graded_breakpoints(upper, spec), spec)
    return QuadResult(res.value + tail, res.error + abs(tail), upper, res.panels)


def _find_tail_cut(f, spec: QuadratureSpec):
    upper = 1.0
    for _ in range(200):
        nxt = 2.0 * upper
        piece = _adaptive(f, np.linspace(upper, nxt, 5), QuadratureSpec(
            rel_tol=spec.rel_tol, abs_tol=spec.abs_tol, max_subdivisions=spec.max_subdivisions,
        ))
        if abs(piece.value) < spec.abs_tol / 10:
            return upper, 0.0
        upper = nxt
    raise NonConvergence("could not locate a tail cut for the integrand")


# --- 1-D searches -----------------------------------------------------------


@dataclass(frozen=True)
class SearchSpec:
    tol: float = 1e-7
    max_iter: int = 200

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("search tolerance must be positive")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_concave_1d(
    g: Callable[[float], float], lo: float, hi: float, spec: SearchSpec = SearchSpec()
) -> tuple[float, float]:
    """Golden-section maximization of a unimodal ``g`` on [lo, hi].

    Returns ``(argmax, g(argmax))``. Both endpoints are evaluated as well, so a
    maximum on the boundary is returned exactly at the boundary.
    """
    if hi < lo:
        raise DomainError("empty search interval")
    a, b = float(lo), float(hi)
    g_lo, g_hi = g(a), g(b)
    if b - a <= spec.tol:
        return (a, g_lo) if g_lo >= g_hi else (b, g_hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    it = 0
    while b - a > spec.tol and it < spec.max_iter:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INV_PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INV_PHI * (b - a)
            gd = g(d)
        it += 1
    x, gx = (c, gc) if gc >= gd else (d, gd)
    # Endpoints win ties so boundary optima are reported exactly.
    if g_hi >= gx and g_hi >= g_lo:
        return float(hi), g_hi
    if g_lo >= gx:
        return float(lo), g_lo
    return x, gx


def find_root_decreasing(
    g: Callable[[float], float], lo: float, hi: float, spec: SearchSpec = SearchSpec()
) -> float:
    """Bisection root of a decreasing ``g`` with ``g(lo) >= 0 >= g(hi)``."""
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo >= 0 >= g_hi):
        raise BracketError(f"need g(lo) >= 0 >= g(hi), got g({lo})={g_lo}, g({hi})={g_hi}")
    if g_lo == 0:
        return float(lo)
    if g_hi == 0:
        return float(hi)
    a, b = float(lo), float(hi)
    for _ in range(spec.max_iter):
        if b - a <= spec.tol:
            break
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0:
            return m
        if gm > 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def golden_section_batch(
    g: Callable[[np.ndarray], np.ndarray], lo, hi, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise golden-section maximization over many independent intervals.

    ``g`` maps an array of arguments (one per problem) to an array of values.
    All problems advance in lockstep; endpoints are included as candidates.
    """
    a = np.array(lo, dtype=float)
    b = np.broadcast_to(np.asarray(hi, dtype=float), a.shape).copy()
    g_lo, g_hi = g(a), g(b)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    width = float(np.max(b - a)) if a.size else 0.0
    n_iter = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(_INV_PHI)))
    for _ in range(n_iter):
        left = gc >= gd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - _INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + _INV_PHI * (b - a))
        probe = np.where(left, c_new, d_new)
        gp = g(probe)
        gc, gd = np.where(left, gp, gd), np.where(left, gc, gp)
        c, d = c_new, d_new
    x = np.where(gc >= gd, c, d)
    gx = np.maximum(gc, gd)
    hi_arr = np.broadcast_to(np.asarray(hi, dtype=float), a.shape)
    lo_arr = np.broadcast_to(np.asarray(lo, dtype=float), a.shape)
    use_hi = (g_hi >= gx) & (g_hi >= g_lo)
    use_lo = ~use_hi & (g_lo >= gx)
    x = np.where(use_hi, hi_arr, np.where(use_lo, lo_arr, x))
    gx = np.where(use_hi, g_hi, np.where(use_lo, g_lo, gx))
    return x, gx
