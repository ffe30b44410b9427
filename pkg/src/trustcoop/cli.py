"""Command-line entry point: ``trustcoop run | reproduce | solve | oracle``."""

import argparse
import json
import sys

import numpy as np

from . import experiments as ex
from .channel import ChannelConfig, sample
from .errors import TrustCoopError
from .rates import SystemParams


def _add_workers(p):
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: CPU count, capped by TRUSTCOOP_THREADS)")


def _add_instance(p):
    p.add_argument("--n1", type=int, default=1)
    p.add_argument("--n2", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.5, help="QoS target at Ru2 in bit/s/Hz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--rho1-db", type=float, default=40.0)
    p.add_argument("--rho2-db", type=float, default=40.0)
    p.add_argument("--scheme", choices=ex.SCHEMES, default="proposed")


def build_parser():
    ap = argparse.ArgumentParser(prog="trustcoop", description="Trust-aware user cooperation solvers and sweeps.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the sweep(s) in a JSON config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None, help="CSV path (default: stdout)")
    _add_workers(run)

    rep = sub.add_parser("reproduce", help="run a built-in sweep preset")
    rep.add_argument("name", choices=ex.PRESET_NAMES)
    rep.add_argument("--trials", type=int, default=None, help="trials per curve (default 10000)")
    rep.add_argument("--quick", action="store_true", help="100 trials per curve")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--out", default=None, help="CSV path (default: stdout)")
    _add_workers(rep)

    so = sub.add_parser("solve", help="solve one random instance and print the strategy")
    _add_instance(so)

    orc = sub.add_parser("oracle", help="solve one instance and compare with a brute-force search")
    _add_instance(orc)
    return ap


def _write(result, out):
    if out is None:
        ex.write_csv(result, sys.stdout)
    else:
        ex.emit_csv(result, out)


def _instance(args):
    cfg = ChannelConfig(n1=args.n1, n2=args.n2, rho1_dB=args.rho1_db, rho2_dB=args.rho2_db)
    for attempt in range(ex.MAX_ATTEMPTS):
        ch = sample(cfg, args.seed, args.trial, attempt)
        if ch.q_max(cfg.P2) >= args.q:
            break
    else:
        raise TrustCoopError(f"no draw reached Q={args.q:g}")
    params = SystemParams(alpha=args.alpha, Q=args.q, P1=cfg.P1, P2=cfg.P2, sigma2=cfg.noise_power)
    return cfg, ch, params, attempt


def _vec(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v)]


def _describe(strategy, report):
    return {
        "strategy": {
            "beta": float(strategy.beta),
            "eta": strategy.eta,
            "lambda": strategy.lam,
            "sic": bool(strategy.sic),
            "subproblem": strategy.subproblem,
            "w1": _vec(strategy.w1),
            "w21": _vec(strategy.w21),
            "w22": _vec(strategy.w22),
        },
        "report": {
            "expected_rate_ru1": report.expected_ru1,
            "rate_ru2": report.ru2,
            "rate_if_help": report.rate_if_help,
            "rate_if_no_help": report.rate_if_no_help,
            "sic_used": bool(report.sic_used),
            "cooperation_useful": bool(report.cooperation_useful),
            "iterations": int(report.iterations),
            "converged": bool(report.converged),
        },
    }


def _oracle_rate(ch, params, strategy, scheme):
    from . import oracles
    from .siso import SisoGains

    if ch.n1 == 1 and ch.n2 == 1:
        return "beta grid (step 1e-4)", oracles.siso_beta_oracle(SisoGains.from_channels(ch, params), params.alpha, params.Q)[1]
    if ch.n2 == 1:
        return "joint (beta, eta) grid", oracles.miso_joint_oracle(ch, params)[2]
    if ch.n2 == 2:
        label = "helper-beam grid" + ("" if ch.n1 == 1 else " at the chosen w1")
        return label, oracles.simo_rate_oracle(ch, params, w1=strategy.w1)
    return None, None


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            configs = ex.load_config(args.config)
            _write(ex.run_many(configs, args.workers), args.out)
        elif args.command == "reproduce":
            trials = 100 if args.quick else (args.trials or 10_000)
            _write(ex.run_many(ex.preset(args.name, trials=trials, seed=args.seed), args.workers), args.out)
        else:
            cfg, ch, params, attempt = _instance(args)
            st, rep = ex.solve(ch, params, args.scheme)
            doc = _describe(st, rep)
            doc["instance"] = {"n1": cfg.n1, "n2": cfg.n2, "seed": args.seed, "trial": args.trial,
                               "redraws": attempt, "q_max": ch.q_max(cfg.P2)}
            if args.command == "oracle":
                label, val = _oracle_rate(ch, params, st, args.scheme)
                if val is None:
                    doc["oracle"] = {"available": False, "reason": "brute force covers N2 <= 2 only"}
                else:
                    doc["oracle"] = {"method": label, "expected_rate_ru1": val,
                                     "gap": val - rep.expected_ru1}
            json.dump(doc, sys.stdout, indent=2)
            sys.stdout.write("\n")
    except TrustCoopError as e:
        print(f"trustcoop: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
