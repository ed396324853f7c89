"""Seeded Monte-Carlo experiments: convergence traces and N / P sweeps."""

from concurrent.futures import ProcessPoolExecutor
import csv
import io
import json
import logging
import os
from pathlib import Path

import numpy as np

from bdirs.channel import make_channels, sample_geometry
from bdirs.config import ExperimentConfig
from bdirs.objective import LinkObjective
from bdirs.optimizer import run_joint

log = logging.getLogger(__name__)

CONVERGENCE_HEADER = ("seed", "variant", "outer_iter", "se_bits_per_hz")
SWEEP_HEADER = ("n", "p_dbm", "variant", "seed", "se_final")
# relative SE gains quoted for the full-size system (power step, antenna step)
REFERENCE_TRENDS = {"power_step_gain": 0.20, "antenna_step_gain": 0.15}


def _version():
    from bdirs import __version__
    return __version__


def run_seed(cfg: ExperimentConfig, seed, n_bs, m_irs, p_dbm):
    """All requested variants on one channel realization.

    With both variants the BD run is seeded with the finished diagonal
    solution, so its final SE can never fall below the diagonal one.
    """
    ss = np.random.SeedSequence(entropy=cfg.run.master_seed, spawn_key=(int(seed),))
    params = sample_geometry(ss, cfg.scenario.geometry(), cfg.scenario.base_params(n_bs, m_irs))
    objective = LinkObjective(make_channels(params), cfg.scenario.noise_power_w,
                              cfg.scenario.bandwidth_hz)
    opt = cfg.optimizer_config(p_dbm)
    snapshot = {"n_bs": n_bs, "m_irs": m_irs, "p_dbm": p_dbm, "config_hash": cfg.config_hash()}
    records = {}
    variants = cfg.variants()
    if "diag" in variants:
        records["diag"] = run_joint(objective, opt, "diag", seed, config_snapshot=snapshot)
    if "bd" in variants:
        init = None
        if "diag" in records:
            init = (records["diag"].v, records["diag"].phi)
        records["bd"] = run_joint(objective, opt, "bd", seed, init=init, config_snapshot=snapshot)
    return records


def _run_task(args):
    cfg, seed, n, m, p = args
    return (n, p, seed), run_seed(cfg, seed, n, m, p)


def _execute(cfg, tasks):
    if cfg.run.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.run.workers) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    return sorted(results, key=lambda kv: kv[0])


def check_output_dir(out_dir):
    """Create ``out_dir`` and make sure it is writable; raises OSError otherwise."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".bdirs_write_probe"
    with open(probe, "w", encoding="utf-8") as fh:
        fh.write("ok")
    probe.unlink()
    return out


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _atomic_write(path, text):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def emit_outputs(header, rows, summary, csv_path, json_path):
    """Write the CSV and JSON summary; each file goes through ``<name>.tmp``."""
    if not rows:
        raise ValueError("nothing to write: no records")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _atomic_write(csv_path, buf.getvalue())
    _atomic_write(json_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _summary_head(cfg, experiment):
    return {
        "experiment": experiment,
        "tool": "bdirs",
        "version": _version(),
        "config_hash": cfg.config_hash(),
        "config": cfg.semantic_dict(),
    }


def convergence_rows(records_by_seed):
    rows = []
    for seed in sorted(records_by_seed):
        for variant in sorted(records_by_seed[seed]):
            rec = records_by_seed[seed][variant]
            rows.extend((seed, variant, t, float(se)) for t, se in rec.trace)
    return rows


def run_convergence_experiment(cfg: ExperimentConfig, out_dir=None):
    """Per-seed outer traces for the configured (N, M, P) point.

    Returns ``(csv_path, json_path, records_by_seed)``.
    """
    out = check_output_dir(out_dir or cfg.output.dir)
    sc = cfg.scenario
    tasks = [(cfg, s, sc.n_bs, sc.m_irs, sc.p_dbm) for s in cfg.run.seeds]
    results = _execute(cfg, tasks)
    by_seed = {key[2]: recs for key, recs in results}
    rows = convergence_rows(by_seed)

    variants = {}
    for variant in cfg.variants():
        recs = [by_seed[s][variant] for s in sorted(by_seed)]
        finals = [float(r.final_se) for r in recs]
        variants[variant] = {
            "runs": len(recs),
            "mean_final_se": float(np.mean(finals)),
            "mean_iters_to_converge": float(np.mean([r.iters_used for r in recs])),
            "converged_fraction": float(np.mean([r.converged for r in recs])),
            "mean_init_se": float(np.mean([r.init_se for r in recs])),
        }
    summary = _summary_head(cfg, "convergence")
    summary.update({"n_bs": sc.n_bs, "m_irs": sc.m_irs, "p_dbm": sc.p_dbm,
                    "seeds": len(cfg.run.seeds), "variants": variants})
    csv_path = out / cfg.output.convergence_csv
    json_path = out / cfg.output.convergence_json
    emit_outputs(CONVERGENCE_HEADER, rows, summary, csv_path, json_path)
    return csv_path, json_path, by_seed


def _relative_gain(lo, hi):
    return (hi - lo) / lo if lo > 0 else float("nan")


def sweep_summary(grid_means, n_values, p_values, variants):
    """Seed-averaged SE per grid point plus the two relative gains.

    power_step_gain: mean over N of the relative SE change between the two
    lowest powers. antenna_step_gain: mean over P of the relative change from
    the smallest to the largest N.
    """
    n_sorted, p_sorted = sorted(n_values), sorted(p_values)
    derived = {}
    for variant in variants:
        entry = {}
        if len(p_sorted) >= 2:
            p0, p1 = p_sorted[0], p_sorted[1]
            entry["power_step_gain"] = float(np.mean(
                [_relative_gain(grid_means[(n, p0, variant)], grid_means[(n, p1, variant)])
                 for n in n_sorted]))
            entry["power_step_dbm"] = [p0, p1]
        if len(n_sorted) >= 2:
            n0, n1 = n_sorted[0], n_sorted[-1]
            entry["antenna_step_gain"] = float(np.mean(
                [_relative_gain(grid_means[(n0, p, variant)], grid_means[(n1, p, variant)])
                 for p in p_sorted]))
            entry["antenna_step_n"] = [n0, n1]
        derived[variant] = entry
    return derived


def run_sweep_experiment(cfg: ExperimentConfig, out_dir=None):
    """Final SE over the (N, P, variant, seed) grid with M fixed.

    Returns ``(csv_path, json_path, grid_means)``.
    """
    out = check_output_dir(out_dir or cfg.output.dir)
    m = cfg.scenario.m_irs
    n_values = tuple(int(n) for n in cfg.sweep.n_values)
    p_values = tuple(float(p) for p in cfg.sweep.p_dbm_values)
    tasks = [(cfg, s, n, m, p) for n in n_values for p in p_values for s in cfg.run.seeds]
    results = _execute(cfg, tasks)

    rows = []
    for (n, p, seed), recs in results:
        for variant in sorted(recs):
            rows.append((n, p, variant, seed, float(recs[variant].final_se)))
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))

    grid_means = {}
    grid = []
    for n in sorted(set(n_values)):
        for p in sorted(set(p_values)):
            for variant in sorted(cfg.variants()):
                vals = [r[4] for r in rows if r[0] == n and r[1] == p and r[2] == variant]
                grid_means[(n, p, variant)] = float(np.mean(vals))
                grid.append({"n": n, "p_dbm": p, "variant": variant,
                             "runs": len(vals), "mean_se": grid_means[(n, p, variant)]})
    summary = _summary_head(cfg, "sweep")
    summary.update({
        "m_irs": m,
        "seeds": len(cfg.run.seeds),
        "grid": grid,
        "derived": sweep_summary(grid_means, n_values, p_values, cfg.variants()),
        "reference_trends": REFERENCE_TRENDS,
    })
    csv_path = out / cfg.output.sweep_csv
    json_path = out / cfg.output.sweep_json
    emit_outputs(SWEEP_HEADER, rows, summary, csv_path, json_path)
    return csv_path, json_path, grid_means
