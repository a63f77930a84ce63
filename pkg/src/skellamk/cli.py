"""Command-line front end.

    skellamk simulate --process sfsp --params alpha1=0.9,alpha2=0.9,l1=1,l2=1 --t 10 --seed 7 --out path.csv
    skellamk pmf --process skellam --params l1=1,l2=1 --t 1 --tol 1e-10
    skellamk verify --process spok --params k=2,l1=1,l2=1 --t 0.5 --n 1000000 --seed 1

Exit status: 0 on success, 2 when a verification fails, 1 on usage or
domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytic import levy_measure, pmf_table
from .analytic.moments import covariance, moments
from .governing import governing_residual
from .montecarlo import compare, estimate_moments, estimate_pmf
from .processes import FAMILIES, ProcessSpec, parse_params
from .trajectories import simulate

__all__ = ["RunConfig", "run", "main", "build_parser"]

COMMANDS = ("simulate", "pmf", "levy", "moments", "verify", "govern")
P_PASS = 0.01
TV_PASS = 0.01
HEAVY = ("sfpp", "sfsp")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spec: ProcessSpec
    t: float = 1.0
    n_samples: int = 100_000
    seed: int = 0
    tol: float = 1e-12
    out: str | None = None
    format: str = "json"
    variant: str = "conv"
    s: float | None = None
    truncation: int = 200
    n_steps: int | None = None
    window: list | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.variant not in ("conv", "closed"):
            raise UsageError("variant must be conv or closed")
        if not self.t > 0:
            raise UsageError("--t must be positive")
        if self.n_samples < 1:
            raise UsageError("--n must be >= 1")

    def to_dict(self):
        d = asdict(self)
        d["spec"] = self.spec.to_dict()
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["spec"] = ProcessSpec.from_dict(d["spec"])
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="skellamk", description="Skellam-type processes of order k")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--process", choices=FAMILIES)
    p.add_argument("--params", default="", help="comma-separated name=value pairs")
    p.add_argument("--t", type=float, help="time (horizon for simulate)")
    p.add_argument("--s", type=float, help="earlier time for the covariance")
    p.add_argument("--n", type=int, dest="n_samples", help="Monte Carlo sample size")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--variant", choices=("conv", "closed"))
    p.add_argument("--truncation", type=int)
    p.add_argument("--n-steps", type=int, dest="n_steps")
    p.add_argument("--window", help="lo:hi")
    p.add_argument("--config", help="RunConfig JSON file")
    p.add_argument("--save-config", dest="save_config", help="write the resolved RunConfig here")
    return p


def _resolve(args):
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
        if base.get("command") != args.command:
            raise UsageError("command does not match the config file")
    else:
        if not args.process:
            raise UsageError("--process is required without --config")
        base = {"command": args.command}
    if args.process:
        try:
            base["spec"] = parse_params(args.process, args.params).to_dict()
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from None
    for key in ("t", "s", "n_samples", "seed", "tol", "out", "format", "variant", "truncation", "n_steps"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if args.window:
        try:
            lo, hi = (int(x) for x in args.window.split(":"))
        except ValueError:
            raise UsageError("--window must look like lo:hi") from None
        base["window"] = [lo, hi]
    if args.command == "simulate" and "format" not in base:
        base["format"] = "csv"
    try:
        return RunConfig.from_dict(base)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=1) + "\n"


# --- commands --------------------------------------------------------------------


def _simulate(cfg):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, 0])))
    traj = simulate(cfg.spec, cfg.t, rng, n_steps=cfg.n_steps)
    if cfg.format == "csv":
        _emit(traj.to_csv(), cfg.out)
    else:
        _emit(
            _dumps(
                {
                    "T": traj.T,
                    "initial_value": traj.initial_value,
                    "epochs": traj.epochs.tolist(),
                    "values": traj.values.tolist(),
                }
            ),
            cfg.out,
        )
    return 0


def _table(cfg):
    window = tuple(cfg.window) if cfg.window else None
    return pmf_table(cfg.spec, cfg.t, cfg.tol, window=window, variant=cfg.variant)


def _pmf(cfg):
    tab = _table(cfg)
    if cfg.format == "json":
        _emit(_dumps(tab.to_dict()), cfg.out)
    else:
        rows = ["m,p"] + [f"{m},{float(p)!r}" for m, p in zip(tab.support, tab.probs)]
        _emit("\n".join(rows) + "\n", cfg.out)
    return 0


def _levy(cfg):
    nu = levy_measure(cfg.spec, cfg.truncation, cfg.variant)
    if cfg.format == "json":
        _emit(_dumps(nu.to_dict()), cfg.out)
    else:
        rows = ["location,mass"] + [f"{x},{w!r}" for x, w in nu.atoms]
        _emit("\n".join(rows) + "\n", cfg.out)
    return 0


def _moments(cfg):
    mean, var = moments(cfg.spec, cfg.t, cfg.variant)
    out = {"t": cfg.t, "mean": mean, "variance": var}
    if cfg.s is not None:
        out["s"] = cfg.s
        out["covariance"] = covariance(cfg.spec, cfg.s, cfg.t, variant=cfg.variant)
    _emit(_dumps(out), cfg.out)
    return 0


def _verify(cfg):
    spec = cfg.spec
    report = {"spec": spec.to_dict(), "t": cfg.t, "n_samples": cfg.n_samples, "seed": cfg.seed}
    if not spec.lattice:
        est = estimate_moments(spec, cfg.t, cfg.n_samples, cfg.seed)
        mean, var = moments(spec, cfg.t)
        z_mean = (est.mean - mean) / est.se_mean
        z_var = (est.var - var) / est.se_var
        ok = abs(z_mean) <= 4 and abs(z_var) <= 4
        report.update(mean=est.mean, mean_exact=mean, z_mean=z_mean, var=est.var, var_exact=var, z_var=z_var)
        report["status"] = "pass" if ok else "fail"
        _emit(_dumps(report), cfg.out)
        return 0 if ok else 2
    emp = estimate_pmf(spec, cfg.t, cfg.n_samples, cfg.seed)
    if spec.family in HEAVY:
        # polynomial tails: a looser tolerance and a longer support
        tab = pmf_table(spec, cfg.t, max(cfg.tol, 2e-4), n_max_cap=1 << 18)
    else:
        tab = pmf_table(spec, cfg.t, cfg.tol)

    def verdict(c):
        tv_ok = c.tv_distance <= TV_PASS or cfg.n_samples < 100_000
        return c.chi2_pvalue >= P_PASS and tv_ok

    c = compare(emp, tab)
    ok = verdict(c)
    report["conv"] = {"tv": c.tv_distance, "chi2": c.chi2_stat, "pvalue": c.chi2_pvalue, "dof": c.dof, "pass": ok}
    if spec.family in ("spok", "tcspok") and spec.k >= 2:
        cc = compare(emp, pmf_table(spec, cfg.t, cfg.tol, variant="closed"))
        report["closed"] = {
            "tv": cc.tv_distance,
            "chi2": cc.chi2_stat,
            "pvalue": cc.chi2_pvalue,
            "dof": cc.dof,
            "pass": verdict(cc),
        }
        if not verdict(cc):
            report["note"] = "closed-form law Skellam(k l1, k l2) rejected; simulation agrees with the convolution law"
    report["status"] = "pass" if ok else "fail"
    _emit(_dumps(report), cfg.out)
    return 0 if ok else 2


def _govern(cfg):
    window = tuple(cfg.window) if cfg.window else None
    res = governing_residual(cfg.spec, cfg.t, window=window, truncation=min(cfg.truncation, 100), variant=cfg.variant)
    ok = res < 1e-5
    _emit(_dumps({"t": cfg.t, "max_residual": res, "status": "pass" if ok else "fail"}), cfg.out)
    return 0 if ok else 2


_HANDLERS = {
    "simulate": _simulate,
    "pmf": _pmf,
    "levy": _levy,
    "moments": _moments,
    "verify": _verify,
    "govern": _govern,
}


def _join_window(argv):
    # "--window -2:2" would otherwise be read as an unknown flag
    out = list(argv)
    for i in range(len(out) - 1):
        if out[i] == "--window" and out[i + 1].startswith("-"):
            out[i : i + 2] = [f"--window={out[i + 1]}"]
            break
    return out


def run(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = build_parser().parse_args(_join_window(argv))
        cfg = _resolve(args)
        if args.save_config:
            with open(args.save_config, "w") as fh:
                fh.write(cfg.to_json() + "\n")
        return _HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"skellamk: usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"skellamk: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
