"""bdirs: seeded experiments for 1-bit precoding with a discrete BD-IRS.

    bdirs converge --config exp.ini --out results/
    bdirs sweep --config exp.ini --out results/ --seeds 0..49 --variant both

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

import argparse
import logging
import sys

from bdirs import kernels
from bdirs.config import ExperimentConfig, load, parse_seeds, with_overrides
from bdirs.errors import ConfigError
from bdirs.experiments import check_output_dir, run_convergence_experiment, run_sweep_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("bdirs")


def build_parser():
    parser = argparse.ArgumentParser(prog="bdirs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("converge", "outer-iteration convergence traces"),
                            ("sweep", "final SE over the antenna / power grid")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="INI experiment config (defaults if omitted)")
        p.add_argument("--out", help="output directory (overrides [output] dir)")
        p.add_argument("--seeds", help="seed range a..b or comma list")
        p.add_argument("--variant", choices=("bd", "diag", "both"))
        p.add_argument("--l-bits", type=int, dest="l_bits")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load(args.config) if args.config else ExperimentConfig().validate()
        seeds = parse_seeds(args.seeds) if args.seeds is not None else None
        cfg = with_overrides(cfg, seeds=seeds, variant=args.variant,
                             l_bits=args.l_bits, out=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        check_output_dir(cfg.output.dir)
    except OSError as exc:
        print(f"output directory not writable: {exc}", file=sys.stderr)
        return EXIT_IO

    log.info("backend=%s seeds=%d variants=%s", kernels.backend(),
             len(cfg.run.seeds), ",".join(cfg.variants()))
    runner = run_convergence_experiment if args.command == "converge" else run_sweep_experiment
    try:
        csv_path, json_path, _ = runner(cfg)
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    print(csv_path)
    print(json_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
