"""``capa-secrecy`` command line.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 infeasible
standalone query.
"""

from __future__ import annotations

import argparse
import configparser
import sys

from . import secrecy
from .errors import InfeasibleTargetError
from .experiments import DEFAULT_RESOLUTIONS, load_config, run_sweep, run_verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a setting, e.g. --set snr_db=20 or --set sweep.steps=11")
    p.add_argument("--scenario", choices=["default"], default="default",
                   help="base scenario (only the reference scenario is built in)")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capa-secrecy", description=__doc__.splitlines()[0].strip("`"))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("msr", help="maximum secrecy rate and MRT/ZF rates at one operating point")
    _common(p)
    p = sub.add_parser("mrp", help="minimum required power for the scenario's target_rate")
    _common(p)
    p = sub.add_parser("limits", help="rate ceilings and power floors of unbounded apertures")
    _common(p)
    p = sub.add_parser("sweep", help="parameter sweep written as CSV")
    _common(p)
    p = sub.add_parser("verify", help="cross-check closed forms against the brute-force oracle")
    _common(p)
    p.add_argument("--resolutions", type=lambda s: [int(v) for v in s.split(",")],
                   default=list(DEFAULT_RESOLUTIONS), help="grid points per axis, comma separated")
    p.add_argument("--corrupt-gain", type=float, default=1.0, metavar="FACTOR",
                   help="self-test: scale Bob's closed-form gain by FACTOR (should then fail)")
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_msr(cfg, out):
    s = cfg.scenario
    link, radio = s.link(), s.radio
    opt = secrecy.msr(link, radio)
    lines = [
        f"g_b      {link.g_b:.12g}",
        f"g_e      {link.g_e:.12g}",
        f"rho_bar  {link.rho_bar:.12g}",
        f"msr      {opt.value:.12g}",
        f"mrt_rate {secrecy.mrt_rate(link, radio).value:.12g}",
        f"zf_rate  {secrecy.zf_rate(link, radio).value:.12g}",
        f"b/a      {opt.beamformer.ratio:.12g}",
    ]
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def _cmd_mrp(cfg, out):
    s = cfg.scenario
    link, radio, R0 = s.link(), s.radio, s.target_rate
    opt = secrecy.mrp(link, radio, R0)
    lines = [f"target_rate {R0:.12g}", f"mrp         {opt.value:.12g}", f"zf_power    {secrecy.zf_power(link, radio, R0).value:.12g}"]
    status = EXIT_OK
    try:
        lines.append(f"mrt_power   {secrecy.mrt_power(link, radio, R0).value:.12g}")
    except InfeasibleTargetError as exc:
        lines.append(f"mrt_power   inf  ({exc})")
        status = EXIT_INFEASIBLE
    _emit("\n".join(lines) + "\n", out)
    return status


def _cmd_limits(cfg, out):
    s = cfg.scenario
    radio = s.radio
    lim = secrecy.asymptotic_limits(s.channel, radio, radio, s.aor, s.target_rate)
    lines = [f"{k:<9} {v:.12g}" for k, v in vars(lim).items()]
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def _cmd_sweep(cfg, out):
    text = run_sweep(cfg, out)
    if out is None and cfg.output_path is None:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        if args.command == "verify":
            report = run_verify(cfg.scenario, args.resolutions, gain_b_factor=args.corrupt_gain)
            _emit(report.render() + "\n", args.out)
            return report.exit_code
        handler = {"msr": _cmd_msr, "mrp": _cmd_mrp, "limits": _cmd_limits, "sweep": _cmd_sweep}[args.command]
        return handler(cfg, args.out)
    except InfeasibleTargetError as exc:
        print(f"capa-secrecy: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError, configparser.Error) as exc:
        print(f"capa-secrecy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
