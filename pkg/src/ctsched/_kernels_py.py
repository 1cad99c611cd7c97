"""Pure-Python evaluation kernels (fallback when the extension is absent).

These mirror ``_kernels.pyx`` operation for operation: same accumulation
order, same truncations, same comparisons. The compiled module is built with
FP contraction disabled, so both backends produce bit-identical doubles.
"""

from __future__ import annotations

import math


def time_trial_ratios(t, taus, p, b, out):
    """Per-trial ratio at interruption ``t`` of the schedule built for each
    predicted time in ``taus`` with buffer ``p`` and geometric base ``b``."""
    one_minus_p = 1.0 - p
    tol = 1e-12 * (t if t > 1.0 else 1.0)
    for j in range(taus.shape[0]):
        tau_eff = taus[j] * one_minus_p
        # smallest prefix sum reaching the buffered target
        s = 0.0
        x = b
        while s < tau_eff:
            s += x
            x *= b
        gamma = tau_eff / s
        # largest completed contract by t (unit floor when none)
        c = 0.0
        xl = gamma * b
        ell = 1.0
        while True:
            cn = c + xl
            if cn <= t + tol:
                c = cn
                ell = xl
                xl *= b
            else:
                break
        out[j] = t / ell


def query_trial_ratios(t, n, d, pn, etas, flip_u, out):
    """Per-trial ratio at ``t`` of the member the buffered decode picks.

    ``etas[j]`` is the corruption fraction for trial j (``floor(eta*n)`` bits
    flip); ``flip_u[j]`` supplies the uniforms the partial Fisher-Yates
    consumes; ``pn`` is the decode buffer ``round(p*n)`` as an integer.
    """
    tol = 1e-12 * (t if t > 1.0 else 1.0)
    ells = [0.0] * n
    l_best = 0
    best = -1.0
    for i in range(n):
        scale = d ** (i / n)
        c = 0.0
        xl = scale * d
        ell = 1.0
        while True:
            cn = c + xl
            if cn <= t + tol:
                c = cn
                ell = xl
                xl *= d
            else:
                break
        ells[i] = ell
        if ell > best:
            best = ell
            l_best = i
    pos = list(range(n))
    ridx = [0] * n
    for j in range(etas.shape[0]):
        k = int(math.floor(etas[j] * n))
        below = 0
        for tix in range(k):
            r = tix + int(flip_u[j, tix] * (n - tix))
            ridx[tix] = r
            pos[tix], pos[r] = pos[r], pos[tix]
            if pos[tix] < l_best:
                below += 1
        m = (l_best + k - 2 * below - pn) % n
        for tix in range(k - 1, -1, -1):
            r = ridx[tix]
            pos[tix], pos[r] = pos[r], pos[tix]
        out[j] = t / ells[m]
