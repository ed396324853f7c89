"""Discrete beyond-diagonal IRS phase design for a fixed precoder.

Pipeline per call of :meth:`PhaseDesigner.design`:

1. normalize the channels with the controlling vectors alpha (elementwise on
   g) and beta (combining vector on the columns of H);
2. form the Hermitian difference matrix ``Pi = g_bar g_bar^H - h_bar h_bar^H``
   and its descending eigendecomposition;
3. build the 2x2 transform block Q, the gamma vectors, the phase vector phi
   and ``Phi_raw = s X diag(exp(j phi)) X^T``;
4. project ``Phi_raw`` onto the phase alphabet and accept it only if SE
   improves;
5. update alpha and beta by a line search on the projection correlation;
6. polish with greedy coordinate ascent over all M^2 entries.

A degenerate spectrum (no sign change, or ``lambda_1 - lambda_M`` below the
bypass tolerance) skips steps 3-5.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from bdirs import kernels
from bdirs.errors import ContractError, DegenerateChannelError
from bdirs.objective import LinkObjective
from bdirs.precoder import line_search, numerical_gradient
from bdirs.quantizer import QuantSpec, ScaledCodeword, project_to_zeta

log = logging.getLogger(__name__)


@dataclass
class PhaseDesignState:
    alpha: np.ndarray
    beta: np.ndarray
    g_bar: np.ndarray | None = None
    h_bar: np.ndarray | None = None
    pi_mat: np.ndarray | None = None
    eigvecs: np.ndarray | None = None
    eigvals: np.ndarray | None = None
    q_mat: np.ndarray | None = None
    gamma1: np.ndarray | None = None
    gamma2: np.ndarray | None = None
    phi_vec: np.ndarray | None = None
    d_mat: np.ndarray | None = None
    phi_candidate: np.ndarray | None = None


@dataclass(frozen=True)
class DesignerConfig:
    max_sweeps: int = 50
    bypass_tol: float = 1e-12
    corr_step_candidates: tuple = tuple(2.0 ** -k for k in range(6))
    ab_iters: int = 1
    ab_delta: float = 1e-4
    greedy_polish: bool = True


def normalize_channels(h, g, alpha, beta):
    """Return ``(h_bar, g_bar)``: unit-norm ``H beta`` and ``alpha * g``."""
    ag = np.asarray(alpha) * np.asarray(g).reshape(-1)
    hb = np.asarray(h) @ np.asarray(beta)
    na, nb = np.linalg.norm(ag), np.linalg.norm(hb)
    if na == 0.0:
        raise DegenerateChannelError("alpha * g is the zero vector")
    if nb == 0.0:
        raise DegenerateChannelError("H beta is the zero vector")
    return hb / nb, ag / na


def build_difference_matrix(g_bar, h_bar):
    a = np.outer(g_bar, np.conj(g_bar))
    b = np.outer(h_bar, np.conj(h_bar))
    return 0.5 * (a + a.conj().T) - 0.5 * (b + b.conj().T)


def hermitian_eig(a, herm_tol=1e-8):
    """Eigenpairs of a Hermitian matrix, eigenvalues in descending order."""
    a = np.asarray(a)
    scale = max(np.linalg.norm(a), 1.0)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    if np.linalg.norm(a - a.conj().T) > herm_tol * scale:
        raise ContractError("matrix is not Hermitian")
    lam, x = np.linalg.eigh(a)
    return x[:, ::-1], lam[::-1]


def build_transform(state: PhaseDesignState, bypass_tol=1e-12):
    """Fill Q, gamma1/2, phi, D and the raw candidate on ``state``.

    Returns the raw (unprojected) M x M candidate, or ``None`` when the
    spectrum is degenerate and the caller should fall back to greedy search.
    """
    lam = state.eigvals
    x = state.eigvecs
    m = lam.shape[0]
    l1, lm = lam[0], lam[-1]
    if m < 2 or l1 - lm < bypass_tol or not (l1 > 0 > lm):
        return None

    q = np.eye(m, dtype=np.complex128)
    q[0, 0] = np.sqrt(-lm / (l1 - lm))
    q[-1, -1] = np.sqrt(l1 / (l1 - lm))
    q[0, -1] = q[-1, -1]
    q[-1, 0] = -q[0, 0]
    gamma1 = np.zeros(m, dtype=np.complex128)
    gamma2 = np.zeros(m, dtype=np.complex128)
    gamma1[0], gamma1[-1] = q[-1, 0], -q[0, 0]
    gamma2[0], gamma2[-1] = q[-1, -1], -q[0, -1]

    # co-phase every eigen-branch of h_bar^H X D X^T g_bar
    phi = -np.angle(np.conj(state.h_bar) @ x) - np.angle(x.T @ state.g_bar)
    d = np.diag(np.exp(1j * phi))
    s = np.exp(1j * np.angle(np.vdot(state.g_bar, state.h_bar)))
    raw = s * (x @ d @ x.T)

    state.q_mat, state.gamma1, state.gamma2 = q, gamma1, gamma2
    state.phi_vec, state.d_mat, state.phi_candidate = phi, d, raw
    return raw


def design_state(h, g, alpha, beta, bypass_tol=1e-12):
    """Run normalization, difference matrix, eigendecomposition and transform."""
    h_bar, g_bar = normalize_channels(h, g, alpha, beta)
    pi_mat = build_difference_matrix(g_bar, h_bar)
    x, lam = hermitian_eig(pi_mat)
    state = PhaseDesignState(alpha=np.asarray(alpha), beta=np.asarray(beta),
                             g_bar=g_bar, h_bar=h_bar, pi_mat=pi_mat,
                             eigvecs=x, eigvals=lam)
    build_transform(state, bypass_tol)
    return state


def projection_correlation(raw, spec: QuantSpec):
    proj = project_to_zeta(raw, spec)
    den = np.linalg.norm(proj) * np.linalg.norm(raw)
    if den == 0.0:
        return 0.0
    return float(abs(np.vdot(proj, raw)) / den)


@dataclass
class PhaseContext:
    """SE of any Phi for one channel realization and one fixed precoder."""
    objective: LinkObjective
    v: ScaledCodeword
    coefficients: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.coefficients = self.objective.phase_coefficients(self.v)

    def se(self, phi):
        return self.objective.se(self.v, phi)


def safeguarded_phase_update(phi_prev, phi_raw, spec: QuantSpec, se_context):
    """Project ``phi_raw`` onto the alphabet; keep it only if SE strictly improves."""
    se_fn = se_context.se if hasattr(se_context, "se") else se_context
    cand = project_to_zeta(phi_raw, spec)
    if se_fn(cand) > se_fn(phi_prev):
        return cand
    return phi_prev


def greedy_phase_refine(phi, spec: QuantSpec, se_context: PhaseContext, max_sweeps=50):
    """Row-major coordinate ascent over all entries and alphabet values.

    Exact zeros (e.g. the off-diagonal of a diagonal seed) are always filled;
    for L >= 1 the best alphabet value is at least as good as leaving a zero,
    because the alphabet sums to zero.
    """
    phi = np.asarray(phi, dtype=np.complex128)
    shape = phi.shape
    out, _ = kernels.greedy_sweep(phi.ravel(), se_context.coefficients.ravel(),
                                  spec.zeta, max_sweeps)
    out = out.reshape(shape)
    if se_context.se(out) < se_context.se(phi):
        # rounding in the running sum can only matter on near-ties
        return phi
    return out


def dirs_baseline(h, g, v, spec: QuantSpec):
    """Diagonal IRS: co-phase each cascaded term, then quantize the phases."""
    vec = v.vector if isinstance(v, ScaledCodeword) else np.asarray(v)
    u = np.asarray(h) @ vec
    terms = np.conj(u) * np.asarray(g).reshape(-1)
    # angle(-0.0) is pi; a vanishing term gets phase 0 so it maps to zeta_0
    ang = np.where(np.abs(terms) > 0, np.angle(terms), 0.0)
    phases = project_to_zeta(np.exp(-1j * ang), spec)
    return np.diag(phases).astype(np.complex128)


class PhaseDesigner:
    """Stateful BD-IRS designer; alpha and beta persist across outer iterations."""

    def __init__(self, spec: QuantSpec, cfg: DesignerConfig | None = None):
        self.spec = spec
        self.cfg = cfg or DesignerConfig()
        self.alpha = None
        self.beta = None
        self.last_state = None
        self.bypassed = 0

    def _ensure_controls(self, m, n):
        if self.alpha is None or self.alpha.shape[0] != m:
            self.alpha = np.ones(m, dtype=np.complex128)
        if self.beta is None or self.beta.shape[0] != n:
            self.beta = np.ones(n, dtype=np.complex128)

    def _correlation(self, h, g, alpha, beta):
        try:
            st = design_state(h, g, alpha, beta, self.cfg.bypass_tol)
        except DegenerateChannelError:
            return 0.0
        if st.phi_candidate is None:
            return 0.0
        return projection_correlation(st.phi_candidate, self.spec)

    def _update_controls(self, h, g):
        cfg = self.cfg

        def step(vec, score):
            grad = numerical_gradient(score, vec, cfg.ab_delta)
            gn = np.linalg.norm(grad)
            if gn == 0.0:
                return vec
            base = np.linalg.norm(vec) / gn
            t, _ = line_search(vec, grad, score, [c * base for c in cfg.corr_step_candidates])
            return vec + t * grad if t > 0 else vec

        for _ in range(cfg.ab_iters):
            self.alpha = step(self.alpha, lambda a: self._correlation(h, g, a, self.beta))
            self.beta = step(self.beta, lambda b: self._correlation(h, g, self.alpha, b))

    def design(self, objective: LinkObjective, v: ScaledCodeword, phi):
        """One phase-design pass; returns a Phi whose SE is >= that of ``phi``."""
        h, g = objective.h, objective.g
        self._ensure_controls(h.shape[0], h.shape[1])
        ctx = PhaseContext(objective, v)
        try:
            state = design_state(h, g, self.alpha, self.beta, self.cfg.bypass_tol)
        except DegenerateChannelError as exc:
            log.debug("phase design bypassed: %s", exc)
            state = None
        self.last_state = state
        bypass = state is None or state.phi_candidate is None
        if bypass:
            self.bypassed += 1
        else:
            phi = safeguarded_phase_update(phi, state.phi_candidate, self.spec, ctx)
            self._update_controls(h, g)
        if bypass or self.cfg.greedy_polish:
            phi = greedy_phase_refine(phi, self.spec, ctx, self.cfg.max_sweeps)
        return phi
