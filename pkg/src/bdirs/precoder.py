"""1-bit precoder design for a fixed IRS response (projected conjugate gradient).

A continuous surrogate ``v_cont`` carries the CG iterates. Gradients are
central differences of the SE of the power-normalized surrogate; the discrete
codeword is obtained by projecting onto {+-1 +-1j} and is only ever replaced
by a strictly better one, so the returned SE trace never decreases.
"""

from dataclasses import dataclass, field

import numpy as np

from bdirs import kernels
from bdirs.errors import SolverError
from bdirs.objective import LinkObjective, snr, spectral_efficiency
from bdirs.quantizer import ScaledCodeword, power_scale, project_to_xi

RESET_GRAD_NORM = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    delta: float = 1e-4
    eps: float = 1e-4
    max_iter: int = 200
    step_candidates: tuple = tuple(2.0 ** -k for k in range(11))

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        steps = tuple(float(s) for s in self.step_candidates)
        if not steps or any(s <= 0 for s in steps):
            raise ValueError("step_candidates must be a non-empty list of positive reals")
        object.__setattr__(self, "step_candidates", tuple(sorted(steps, reverse=True)))


@dataclass
class PrecoderState:
    v_cont: np.ndarray
    v_quant: ScaledCodeword
    grad: np.ndarray | None = None
    direction: np.ndarray | None = None
    step: float = 0.0
    iter: int = 0
    best_se: float = 0.0
    history: list = field(default_factory=list)


def settled(change, level, eps):
    """Stopping test on an SE change.

    The tolerance is ``eps * min(1, level)``: the plain absolute test once SE
    reaches 1 bit/s/Hz, tighter below so low-SNR runs do not stop after a
    single step. It is never looser than ``|change| < eps``. A zero change
    always counts as settled.
    """
    change = abs(change)
    return change == 0.0 or change < eps * min(1.0, abs(level))


def numerical_gradient(f, v, delta):
    """Central-difference gradient of a real function of a complex vector.

    The real part of entry k is the derivative along Re(v_k), the imaginary
    part the derivative along Im(v_k).
    """
    v = np.asarray(v, dtype=np.complex128)
    out = np.empty_like(v)
    for k in range(v.shape[0]):
        e = np.zeros_like(v)
        e[k] = delta
        d_re = (f(v + e) - f(v - e)) / (2 * delta)
        d_im = (f(v + 1j * e) - f(v - 1j * e)) / (2 * delta)
        out[k] = complex(d_re, d_im)
    if not np.all(np.isfinite(out)):
        raise SolverError("non-finite objective value in numerical gradient", stage="gradient")
    return out


def cg_direction(grad_new, grad_old=None, dir_old=None, restart=False):
    """Fletcher-Reeves ascent direction; falls back to the gradient itself on
    the first iteration, on request, or when the previous gradient vanished."""
    grad_new = np.asarray(grad_new)
    if restart or grad_old is None or dir_old is None:
        return grad_new.copy()
    denom = float(np.vdot(grad_old, grad_old).real)
    if np.sqrt(denom) < RESET_GRAD_NORM:
        return grad_new.copy()
    beta = float(np.vdot(grad_new, grad_new).real) / denom
    return grad_new + beta * np.asarray(dir_old)


def line_search(v, direction, score, steps):
    """Best of ``score(v + t * direction)`` over the candidate steps.

    Returns ``(0.0, score(v))`` when no candidate beats the current point.
    Ties keep the earlier (larger) candidate.
    """
    v = np.asarray(v)
    direction = np.asarray(direction)
    current = score(v)
    best_t, best = 0.0, current
    if not np.any(direction):
        return best_t, best
    for t in steps:
        val = score(v + t * direction)
        if val > best:
            best_t, best = float(t), val
    return best_t, best


def _search(v, direction, score, step_candidates):
    dnorm = np.linalg.norm(direction)
    if dnorm == 0.0:
        return 0.0, score(v)
    base = np.linalg.norm(v) / dnorm
    return line_search(v, direction, score, [t * base for t in step_candidates])


def mrt_codeword(objective: LinkObjective, phi):
    """Projected matched filter: ``project_to_xi(H^H Phi g)``."""
    return project_to_xi(objective.h_eff(phi))


def solve_p1(objective: LinkObjective, phi, init: ScaledCodeword, cfg: SolverConfig,
             p_tot_w, callback=None):
    """Maximize SE over the 1-bit precoder with ``phi`` held fixed.

    Parameters
    ----------
    objective : LinkObjective
        Channels and noise power.
    phi : (M, M) complex array
        IRS response, kept fixed.
    init : ScaledCodeword
        Feasible starting point.
    cfg : SolverConfig
    p_tot_w : float
        Transmit power budget in watts.
    callback : callable, optional
        Called with the :class:`PrecoderState` after every accepted step.

    Returns
    -------
    (ScaledCodeword, list of float)
        Best codeword found and the SE of the incumbent after each iteration
        (first entry is the SE of ``init``).
    """
    init.check_feasible(p_tot_w)
    n = init.codeword.shape[0]
    scale = power_scale(n, p_tot_w)
    sigma2 = objective.noise_power_w
    w = objective.h_eff(phi)
    gain = p_tot_w / sigma2

    def se_of_codeword(cw):
        return spectral_efficiency(snr(w, scale * cw, sigma2))

    def score(z):
        return se_of_codeword(project_to_xi(z))

    best = np.asarray(init.codeword, dtype=np.complex128).copy()
    best_se = se_of_codeword(best)
    if not np.isfinite(best_se):
        raise SolverError("non-finite SE at the initial codeword", stage="precoder")
    trace = [best_se]
    ref_norm = np.sqrt(2.0 * n)
    state = PrecoderState(v_cont=best.copy(), v_quant=ScaledCodeword(best, scale),
                          best_se=best_se, history=trace)

    grad_old = None
    direction = None
    for k in range(cfg.max_iter):
        grad = kernels.precoder_gradient(w, state.v_cont, gain, cfg.delta)
        if not np.all(np.isfinite(grad)):
            raise SolverError(f"non-finite gradient at iteration {k}", stage="precoder")
        restart = k % n == 0 or grad_old is None
        direction = cg_direction(grad, grad_old, direction, restart=restart)
        step, se = _search(state.v_cont, direction, score, cfg.step_candidates)
        if step == 0.0 and not restart:
            # conjugate direction failed; retry along the gradient before giving up
            direction = grad.copy()
            step, se = _search(state.v_cont, direction, score, cfg.step_candidates)
        state.grad, state.direction, state.iter, state.step = grad, direction, k, step
        if step == 0.0:
            break
        v_next = state.v_cont + step * direction
        v_next *= ref_norm / np.linalg.norm(v_next)
        state.v_cont = v_next
        gain_se = se - best_se
        best, best_se = project_to_xi(v_next), se
        state.v_quant = ScaledCodeword(best, scale)
        state.best_se = best_se
        trace.append(best_se)
        grad_old = grad
        if callback is not None:
            callback(state)
        if settled(gain_se, best_se, cfg.eps):
            break
    return ScaledCodeword(best, scale), trace
