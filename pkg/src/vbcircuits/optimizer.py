"""Unconstrained quasi-Newton minimization (BFGS with a strong-Wolfe line search)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    evaluations: int
    converged: bool
    message: str


def _cubic_min(a, fa, ga, b, fb, gb):
    """Minimizer of the cubic interpolating (a, fa, ga) and (b, fb, gb), or None."""
    d1 = ga + gb - 3 * (fa - fb) / (a - b)
    rad = d1 * d1 - ga * gb
    if rad < 0:
        return None
    d2 = math.copysign(math.sqrt(rad), b - a)
    denom = gb - ga + 2 * d2
    if denom == 0:
        return None
    t = b - (b - a) * (gb + d2 - d1) / denom
    return t if math.isfinite(t) else None


def _line_search(phi, f0, g0, alpha0=1.0, c1=1e-4, c2=0.9, max_steps=30):
    """Strong-Wolfe search along a descent direction (bracketing + zoom).

    ``phi(alpha)`` returns ``(f, slope, payload)``. Returns the accepted
    ``(alpha, f, payload)`` or None if no acceptable step was found.
    """
    prev_a, prev_f, prev_g = 0.0, f0, g0
    a = alpha0
    best = None
    for i in range(max_steps):
        f, g, payload = phi(a)
        if best is None or f < best[1]:
            best = (a, f, payload)
        if f > f0 + c1 * a * g0 or (i > 0 and f >= prev_f):
            return _zoom(phi, f0, g0, prev_a, prev_f, prev_g, a, f, g, c1, c2) or _fallback(best, f0)
        if abs(g) <= -c2 * g0:
            return a, f, payload
        if g >= 0:
            return _zoom(phi, f0, g0, a, f, g, prev_a, prev_f, prev_g, c1, c2) or _fallback(best, f0)
        prev_a, prev_f, prev_g = a, f, g
        a *= 2.0
    return _fallback(best, f0)


def _fallback(best, f0):
    # Accept any strict decrease when the Wolfe conditions cannot be met.
    if best is not None and best[1] < f0:
        return best
    return None


def _zoom(phi, f0, g0, lo, flo, glo, hi, fhi, ghi, c1, c2, max_steps=40):
    for _ in range(max_steps):
        a = _cubic_min(lo, flo, glo, hi, fhi, ghi)
        lo_b, hi_b = min(lo, hi), max(lo, hi)
        margin = 0.1 * (hi_b - lo_b)
        if a is None or not lo_b + margin <= a <= hi_b - margin:
            a = 0.5 * (lo + hi)
        if abs(hi - lo) < 1e-16:
            break
        f, g, payload = phi(a)
        if f > f0 + c1 * a * g0 or f >= flo:
            hi, fhi, ghi = a, f, g
        else:
            if abs(g) <= -c2 * g0:
                return a, f, payload
            if g * (hi - lo) >= 0:
                hi, fhi, ghi = lo, flo, glo
            lo, flo, glo = a, f, g
    if flo < f0 and lo > 0:
        f, g, payload = phi(lo)
        return lo, f, payload
    return None


def bfgs(fun_grad: FunGrad, x0: np.ndarray, *, gtol: float = 1e-8, xtol: float = 1e-10,
         max_iterations: int = 200) -> OptimizeResult:
    """Minimize ``f`` given ``fun_grad(x) -> (f, grad)``.

    Stops when ``||grad|| <= gtol``, the accepted step is ``<= xtol``, or
    after ``max_iterations`` iterations. The returned point never has a
    higher value than ``x0``.
    """
    x = np.array(x0, dtype=float)
    n = x.size
    f, g = fun_grad(x)
    evals = 1
    hinv = np.eye(n)
    first = True

    def along(direction):
        def phi(alpha):
            nonlocal evals
            evals += 1
            xa = x + alpha * direction
            fa, ga = fun_grad(xa)
            return fa, float(ga @ direction), (xa, ga)
        return phi

    message = "maximum iterations reached"
    converged = False
    it = 0
    while it < max_iterations:
        if np.linalg.norm(g) <= gtol:
            converged, message = True, "gradient norm below tolerance"
            break
        p = -hinv @ g
        slope = float(g @ p)
        if slope >= 0:
            hinv = np.eye(n)
            p, slope = -g, -float(g @ g)
        found = _line_search(along(p), f, slope)
        if found is None and not first:
            hinv = np.eye(n)
            p, slope = -g, -float(g @ g)
            found = _line_search(along(p), f, slope)
        it += 1
        if found is None:
            message = "line search failed"
            converged = np.linalg.norm(g) <= math.sqrt(gtol)
            break
        alpha, f_new, (x_new, g_new) = found
        s = x_new - x
        y = g_new - g
        x, f, g = x_new, f_new, g_new
        if np.linalg.norm(s) <= xtol:
            converged, message = True, "step below tolerance"
            break
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if first:
                hinv = np.eye(n) * (sy / float(y @ y))
            rho = 1.0 / sy
            hy = hinv @ y
            hinv = (hinv - rho * (np.outer(s, hy) + np.outer(hy, s))
                    + (rho * rho * float(y @ hy) + rho) * np.outer(s, s))
        first = False
    else:
        if np.linalg.norm(g) <= gtol:
            converged, message = True, "gradient norm below tolerance"
    return OptimizeResult(x, float(f), g, it, evals, bool(converged), message)
