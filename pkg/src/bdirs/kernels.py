"""Hot inner loops: precoder finite differences and greedy phase sweeps.

Each kernel exists twice: a loop-style version compiled with numba's
``@njit`` and a vectorized numpy version. The active pair is picked at import
time; set ``BDIRS_DISABLE_JIT=1`` to force the numpy path (numba is also
skipped automatically when it is not installed). Both versions are exported
under explicit names so tests and the benchmark can compare them.
"""

import math
import os

import numpy as np

_LN2 = math.log(2.0)
# relative margin a greedy move must beat; stops flip-flopping on rounding noise
GREEDY_REL_TOL = 1e-12


def _jit_requested():
    flag = os.environ.get("BDIRS_DISABLE_JIT", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


try:
    if not _jit_requested():
        raise ImportError("numba disabled by BDIRS_DISABLE_JIT")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# precoder gradient
# ---------------------------------------------------------------------------

def precoder_gradient_numpy(w, v, gain, delta):
    """Central differences of ``log2(1 + gain*|w^H v|^2 / ||v||^2)``.

    Every coordinate perturbation only touches one term of the inner product
    and of the squared norm, so all 4N objective evaluations reduce to O(1)
    updates of the two running totals.

    Returns a complex array whose real part is the derivative with respect to
    Re(v) and whose imaginary part is the derivative with respect to Im(v).
    """
    w = np.asarray(w, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    s = np.vdot(w, v)
    nrm = np.vdot(v, v).real
    cw = np.conj(w) * delta

    def se(sig, n2):
        return np.log1p(gain * (sig.real**2 + sig.imag**2) / n2) / _LN2

    d2 = delta * delta
    re_p = se(s + cw, nrm + 2 * delta * v.real + d2)
    re_m = se(s - cw, nrm - 2 * delta * v.real + d2)
    im_p = se(s + 1j * cw, nrm + 2 * delta * v.imag + d2)
    im_m = se(s - 1j * cw, nrm - 2 * delta * v.imag + d2)
    return (re_p - re_m) / (2 * delta) + 1j * (im_p - im_m) / (2 * delta)


def _precoder_gradient_loop(w, v, gain, delta):
    n = v.shape[0]
    s = 0j
    nrm = 0.0
    for k in range(n):
        s += np.conj(w[k]) * v[k]
        nrm += v[k].real * v[k].real + v[k].imag * v[k].imag
    out = np.empty(n, dtype=np.complex128)
    d2 = delta * delta
    for k in range(n):
        cw = np.conj(w[k]) * delta
        sp = s + cw
        sm = s - cw
        fp = math.log1p(gain * (sp.real * sp.real + sp.imag * sp.imag)
                        / (nrm + 2 * delta * v[k].real + d2)) / _LN2
        fm = math.log1p(gain * (sm.real * sm.real + sm.imag * sm.imag)
                        / (nrm - 2 * delta * v[k].real + d2)) / _LN2
        gre = (fp - fm) / (2 * delta)
        sp = s + 1j * cw
        sm = s - 1j * cw
        fp = math.log1p(gain * (sp.real * sp.real + sp.imag * sp.imag)
                        / (nrm + 2 * delta * v[k].imag + d2)) / _LN2
        fm = math.log1p(gain * (sm.real * sm.real + sm.imag * sm.imag)
                        / (nrm - 2 * delta * v[k].imag + d2)) / _LN2
        gim = (fp - fm) / (2 * delta)
        out[k] = complex(gre, gim)
    return out


# ---------------------------------------------------------------------------
# greedy coordinate ascent on |sum_k phi_k c_k|^2
# ---------------------------------------------------------------------------

def greedy_sweep_numpy(phi, coef, alphabet, max_sweeps):
    """Coordinate ascent of ``|sum(phi * coef)|^2`` over a finite alphabet.

    Entries are visited in order; each one tries every alphabet value and
    keeps the best. An exact zero entry (an unfilled slot) is always replaced
    by the best alphabet value. Stops after a sweep without any change or
    after ``max_sweeps`` sweeps.

    Returns ``(phi_out, sweeps_done)``.
    """
    phi = np.array(phi, dtype=np.complex128, copy=True)
    coef = np.asarray(coef, dtype=np.complex128)
    alphabet = np.asarray(alphabet, dtype=np.complex128)
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        changed = False
        total = np.sum(phi * coef)
        for k in range(phi.shape[0]):
            cur = phi[k]
            base = total - cur * coef[k]
            trial = base + alphabet * coef[k]
            vals = trial.real**2 + trial.imag**2
            j = int(np.argmax(vals))
            if cur == 0:
                take = True
            else:
                now = total.real**2 + total.imag**2
                take = vals[j] > now * (1.0 + GREEDY_REL_TOL) and alphabet[j] != cur
            if take:
                phi[k] = alphabet[j]
                total = trial[j]
                changed = True
        if not changed:
            break
    return phi, sweeps


def _greedy_sweep_loop(phi, coef, alphabet, max_sweeps):
    phi = phi.copy()
    n = phi.shape[0]
    n_alpha = alphabet.shape[0]
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        changed = False
        total = 0j
        for k in range(n):
            total += phi[k] * coef[k]
        for k in range(n):
            cur = phi[k]
            base = total - cur * coef[k]
            best_j = 0
            best_val = -1.0
            for j in range(n_alpha):
                t = base + alphabet[j] * coef[k]
                val = t.real * t.real + t.imag * t.imag
                if val > best_val:
                    best_val = val
                    best_j = j
            if cur == 0:
                take = True
            else:
                now = total.real * total.real + total.imag * total.imag
                take = best_val > now * (1.0 + GREEDY_REL_TOL) and alphabet[best_j] != cur
            if take:
                phi[k] = alphabet[best_j]
                total = base + alphabet[best_j] * coef[k]
                changed = True
        if not changed:
            break
    return phi, sweeps


if HAVE_NUMBA:
    precoder_gradient_numba = njit(cache=True)(_precoder_gradient_loop)
    greedy_sweep_numba = njit(cache=True)(_greedy_sweep_loop)
else:
    precoder_gradient_numba = None
    greedy_sweep_numba = None


def precoder_gradient(w, v, gain, delta):
    w = np.ascontiguousarray(w, dtype=np.complex128)
    v = np.ascontiguousarray(v, dtype=np.complex128)
    if HAVE_NUMBA:
        return precoder_gradient_numba(w, v, float(gain), float(delta))
    return precoder_gradient_numpy(w, v, gain, delta)


def greedy_sweep(phi, coef, alphabet, max_sweeps):
    phi = np.ascontiguousarray(phi, dtype=np.complex128)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    alphabet = np.ascontiguousarray(alphabet, dtype=np.complex128)
    if HAVE_NUMBA:
        return greedy_sweep_numba(phi, coef, alphabet, int(max_sweeps))
    return greedy_sweep_numpy(phi, coef, alphabet, int(max_sweeps))


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
