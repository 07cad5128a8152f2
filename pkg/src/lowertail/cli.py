"""Command-line entry point.

Every operation is a subcommand writing a deterministic report file (see the
reports module) and a human summary to standard output.  Exit codes: 0 ok,
2 config error, 3 resource-bound error, 4 solver non-convergence.  A config
file of key=value lines can be merged with `--config`; explicit flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .copies import ResourceBudgetError
from .graphs import Graph, GraphFormatError
from .sampler import ChainConfig
from .variational import SolverConfig, SolverConvergenceError, ThresholdBracketError
from . import experiments

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_SOLVER = 4

OUT_ENV_VAR = "LOWERTAIL_OUT"


class ConfigError(ValueError):
    pass


def _parse_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        k, _, v = line.partition("=")
        out[k.strip()] = v.strip()
    return out


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory for report files "
                        f"(default: ./reports, or ${OUT_ENV_VAR})")
    common.add_argument("--config", help="key=value config file merged with flags; flags win")
    common.add_argument("--threads", type=int, default=0,
                        help="worker cap, echoed into reports (0 = all cores)")
    parser = argparse.ArgumentParser(
        prog="lowertail",
        description="Lower-tail conditioned random graphs: variational solvers, "
                    "conditioned sampling, cut norms, and experiment reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    def graph_args(p, prime=False):
        p.add_argument("--H", required=False, default="K3",
                       help="graph: K<k>, C<k>, P<k>, or a file path")
        if prime:
            p.add_argument("--Hprime", required=False, default="K3",
                           help="conditioning graph (the event is on its count)")

    sp = add_parser("threshold", help="constancy threshold eta_H for e(H)=r")
    sp.add_argument("--r", type=int)

    sp = add_parser("solve", help="variational problem solver")
    graph_args(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--mode", choices=["sparse", "finite"], default="sparse")
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=8)

    for name in ("sample", "marginals"):
        sp = add_parser(name, help="conditioned sampling / exact marginals")
        graph_args(sp)
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=float)
        sp.add_argument("--eta", type=float)
        if name == "sample":
            sp.add_argument("--mode", choices=["exact", "mcmc"], default="exact")
            sp.add_argument("--steps", type=int, default=10**6)
            sp.add_argument("--burn-in", type=int, default=10**5, dest="burn_in")
            sp.add_argument("--chains", type=int, default=8)
            sp.add_argument("--thinning", type=int)
            sp.add_argument("--seed", type=int, default=0)
        else:
            sp.add_argument("--w-sizes", default="0,1,2", dest="w_sizes")
            sp.add_argument("--sets-per-size", type=int, default=4, dest="sets_per_size")
            sp.add_argument("--seed", type=int, default=0)

    sp = add_parser("increment", help="conditional-correlation energy and greedy W")
    graph_args(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--beta", type=float, default=0.1)

    sp = add_parser("cutnorm", help="cut-norm distribution over conditioned samples")
    graph_args(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--steps", type=int, default=10**5)
    sp.add_argument("--burn-in", type=int, default=10**4, dest="burn_in")
    sp.add_argument("--chains", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--ks", default="2")

    sp = add_parser("typicality", help="conditioned count vs constant prediction")
    graph_args(sp, prime=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--mode", choices=["exact", "mcmc"], default="exact")
    sp.add_argument("--steps", type=int, default=10**6)
    sp.add_argument("--burn-in", type=int, default=10**5, dest="burn_in")
    sp.add_argument("--chains", type=int, default=8)
    sp.add_argument("--thinning", type=int)
    sp.add_argument("--seed", type=int, default=0)

    sp = add_parser("stability", help="near-minimizer cut-distance probe")
    graph_args(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--levels", default="1e-8,1e-6,1e-4,1e-2")
    sp.add_argument("--samples-per-level", type=int, default=24, dest="samples_per_level")
    sp.add_argument("--seed", type=int, default=0)

    sp = add_parser("tailprob", help="-log P(event) vs solver value across n")
    graph_args(sp)
    sp.add_argument("--n-values", default="4,5", dest="n_values")
    sp.add_argument("--p", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--eps", type=float, default=0.05)

    sp = add_parser("variance", help="variance split over copy pairs")
    graph_args(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--unconditioned", action="store_true")

    return parser


def _merge_config(args: argparse.Namespace, argv: list[str]) -> None:
    """Apply config-file values to flags not explicitly given on the command line."""
    if not args.config:
        return
    cfg = _parse_config_file(args.config)
    known = set(vars(args))
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    for key, raw in cfg.items():
        if key in explicit:
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, key, int(raw))
        elif isinstance(current, float):
            setattr(args, key, float(raw))
        elif current is None:
            # flags with no default: infer numeric types, else keep the string
            for cast in (int, float):
                try:
                    setattr(args, key, cast(raw))
                    break
                except ValueError:
                    continue
            else:
                setattr(args, key, raw)
        else:
            setattr(args, key, raw)


def _chain_cfg(args) -> ChainConfig:
    return ChainConfig(
        steps=args.steps,
        burn_in=args.burn_in,
        thinning=getattr(args, "thinning", None),
        chains=args.chains,
        seed=args.seed,
    )


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError(
            "missing required parameters (flag or config file): "
            + ", ".join("--" + n.replace("_", "-") for n in missing)
        )


def _run(args) -> "experiments.Report":
    cmd = args.command
    if cmd == "threshold":
        _require(args, "r")
        return experiments.threshold_report([args.r])
    H = Graph.parse(args.H)
    if cmd == "solve":
        _require(args, "n", "eta")
        if args.mode == "finite" and args.p is None:
            raise ConfigError("finite mode requires --p")
        cfg = SolverConfig(restarts=args.restarts, seed=args.seed)
        return experiments.solve_report(H, args.n, args.eta, args.mode, args.p, cfg)
    if cmd == "sample":
        _require(args, "n", "p", "eta")
        return experiments.sample_report(H, args.n, args.p, args.eta, args.mode,
                                         _chain_cfg(args) if args.mode == "mcmc" else None)
    if cmd == "marginals":
        _require(args, "n", "p", "eta")
        return experiments.run_marginal_structure(
            H, args.n, args.p, args.eta, _int_list(args.w_sizes),
            args.sets_per_size, args.seed)
    if cmd == "increment":
        _require(args, "n", "p", "eta")
        return experiments.increment_report(H, args.n, args.p, args.eta,
                                            args.alpha, args.beta)
    if cmd == "cutnorm":
        _require(args, "n", "p", "eta")
        cfg = ChainConfig(steps=args.steps, burn_in=args.burn_in,
                          chains=args.chains, seed=args.seed)
        return experiments.run_cutnorm_typicality(H, args.n, args.p, args.eta, cfg,
                                                  tuple(_int_list(args.ks)))
    if cmd == "typicality":
        _require(args, "n", "p", "eta")
        H_prime = Graph.parse(args.Hprime)
        return experiments.run_typicality(
            H_prime, H, args.n, args.p, args.eta, args.mode,
            _chain_cfg(args) if args.mode == "mcmc" else None)
    if cmd == "stability":
        _require(args, "n", "eta")
        return experiments.stability_report(H, args.n, args.eta,
                                            _float_list(args.levels),
                                            args.samples_per_level, args.seed)
    if cmd == "tailprob":
        _require(args, "p", "eta")
        return experiments.tail_probability_table(H, _int_list(args.n_values),
                                                  args.p, args.eta, args.eps)
    if cmd == "variance":
        _require(args, "n", "p")
        if not args.unconditioned and args.eta is None:
            raise ConfigError("variance needs --eta or --unconditioned")
        eta = None if args.unconditioned else args.eta
        return experiments.variance_decomposition(H, args.n, args.p, eta)
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags already; normalize help exit to 0
        return int(exc.code or 0)
    try:
        _merge_config(args, argv)
        out_dir = args.out or os.environ.get(OUT_ENV_VAR) or "reports"
        report = _run(args)
        report.config["threads"] = args.threads
        path = report.write(out_dir)
    except (ConfigError, GraphFormatError, ValueError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceBudgetError as exc:
        print(f"error: resource: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SolverConvergenceError, ThresholdBracketError) as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"{report.experiment}: wrote {path}")
    for key in sorted(report.summary):
        print(f"  {key} = {report.summary[key]}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
