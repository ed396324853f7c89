"""Alternating optimization of the 1-bit precoder and the IRS response."""

from dataclasses import dataclass, field
import time

import numpy as np

from bdirs.errors import SolverError
from bdirs.objective import LinkObjective
from bdirs.phase_design import DesignerConfig, PhaseDesigner, dirs_baseline
from bdirs.precoder import SolverConfig, settled, solve_p1
from bdirs.quantizer import QuantSpec, ScaledCodeword, project_to_xi, rotated_projection

VARIANTS = ("bd", "diag")


@dataclass(frozen=True)
class OptimizerConfig:
    eps: float = 1e-4
    max_outer: int = 50
    p_tot_w: float = 0.01
    precoder: SolverConfig = field(default_factory=SolverConfig)
    designer: DesignerConfig = field(default_factory=DesignerConfig)
    quant: QuantSpec = field(default_factory=QuantSpec)


@dataclass
class RunRecord:
    seed: int | None
    variant: str
    trace: list  # [(outer_iter, se_bits_per_hz), ...]
    converged: bool
    iters_used: int
    wall_time_s: float
    init_se: float
    v: ScaledCodeword
    phi: np.ndarray
    config: dict = field(default_factory=dict)

    @property
    def final_se(self):
        return self.trace[-1][1]


def initialize(objective: LinkObjective, cfg: OptimizerConfig):
    """Start point shared by both variants.

    Phi0 is the diagonal co-phasing design for the all-(1+1j) codeword, and v is
    the projected matched filter through Phi0, scaled onto the power budget.
    The matched filter is only defined up to a common phase, which the 1-bit
    projection does not ignore; the phase giving the best codeword is used.
    """
    n = objective.h.shape[1]
    probe = ScaledCodeword.from_codeword(np.full(n, 1 + 1j), cfg.p_tot_w)
    phi0 = dirs_baseline(objective.h, objective.g, probe, cfg.quant)
    w = objective.h_eff(phi0)
    cw = rotated_projection(w, np.conj(w), project_to_xi, 4)
    return ScaledCodeword.from_codeword(cw, cfg.p_tot_w), phi0


def run_joint(objective: LinkObjective, cfg: OptimizerConfig, variant="bd", seed=None,
              init=None, config_snapshot=None):
    """Alternate the precoder and IRS phase updates until the outer SE settles.

    ``init`` optionally supplies ``(ScaledCodeword, Phi)``; the experiment
    harness uses it to seed the BD run with the finished diagonal solution,
    which makes ``SE(bd) >= SE(diag)`` hold exactly. Every half-step is kept
    only if it does not lower SE, so the recorded trace never decreases.
    The trace stores the SE after each outer iteration, indexed from 0.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    t0 = time.perf_counter()
    v, phi = init if init is not None else initialize(objective, cfg)
    phi = np.asarray(phi, dtype=np.complex128)
    designer = PhaseDesigner(cfg.quant, cfg.designer) if variant == "bd" else None

    se = objective.se(v, phi)
    init_se = se
    prev = se
    trace = []
    converged = False
    for t in range(cfg.max_outer):
        try:
            v_new, _ = solve_p1(objective, phi, v, cfg.precoder, cfg.p_tot_w)
        except SolverError as exc:
            raise SolverError(f"outer iteration {t}: {exc}", stage="precoder") from exc
        se_new = objective.se(v_new, phi)
        if se_new >= se:
            v, se = v_new, se_new

        try:
            if designer is not None:
                phi_new = designer.design(objective, v, phi)
            else:
                phi_new = dirs_baseline(objective.h, objective.g, v, cfg.quant)
        except SolverError as exc:
            raise SolverError(f"outer iteration {t}: {exc}", stage="phase_design") from exc
        se_new = objective.se(v, phi_new)
        if se_new >= se:
            phi, se = phi_new, se_new

        if not np.isfinite(se):
            raise SolverError(f"non-finite SE at outer iteration {t}", stage="outer")
        trace.append((t, se))
        if settled(se - prev, se, cfg.eps):
            converged = True
            break
        prev = se

    return RunRecord(seed=seed, variant=variant, trace=trace, converged=converged,
                     iters_used=len(trace), wall_time_s=time.perf_counter() - t0,
                     init_se=init_se, v=v, phi=phi, config=dict(config_snapshot or {}))
