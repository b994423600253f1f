"""Thin command-line client.

Parses arguments, reads the config file, and either runs the command
in-process through the shared runner or forwards the identical request
to a running service with --server.  Exit codes: 0 success/PASS, 1
identity FAIL, 2 configuration or input error."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .runner import COMMANDS, run_command


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmodlv",
        description="special L-values of Drinfeld modules and t-modules over F_q[t]",
    )
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the run configuration")
        p.add_argument("--precision", type=int, default=None)
        p.add_argument("--max-prime-degree", type=int, default=None)
        p.add_argument("--format", choices=("text", "jsonl"), default=None)
        p.add_argument("--server", default=None, help="base URL of a running tmodlv service")
        if name in ("theta-s", "theta-m", "cs-check"):
            p.add_argument("--set", default=None, help='primes to omit, e.g. "t,t+1"')
        if name in ("theta-m", "cs-check"):
            p.add_argument("--m", type=int, default=None)
        if name == "gsize":
            p.add_argument("--prime", required=True)
        if name == "monic":
            p.add_argument("--value", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2
    path = Path(args.config)
    if not path.exists():
        print(f"config error: no such file {path}", file=sys.stderr)
        return 2
    config_text = path.read_text()
    params = {
        "precision": args.precision,
        "max_prime_degree": getattr(args, "max_prime_degree", None),
        "set": getattr(args, "set", None),
        "m": getattr(args, "m", None),
        "prime": getattr(args, "prime", None),
        "value": getattr(args, "value", None),
    }
    fmt = args.format
    if args.server:
        return _remote(args.server, args.command, config_text, params, fmt)
    report = run_command(args.command, config_text, **params)
    out_fmt = fmt
    if out_fmt is None:
        try:
            from .config import RunConfig

            out_fmt = RunConfig(config_text).format
        except Exception:
            out_fmt = "text"
    print(report.render(out_fmt))
    return report.exit_code


def _remote(server: str, command: str, config_text: str, params: dict, fmt) -> int:
    import httpx

    body = {
        "config_text": config_text,
        "precision": params.get("precision"),
        "max_prime_degree": params.get("max_prime_degree"),
        "taming_set": params.get("set"),
        "m": params.get("m"),
        "prime": params.get("prime"),
        "value": params.get("value"),
        "format": fmt or "text",
    }
    body = {k: v for k, v in body.items() if v is not None}
    resp = httpx.post(f"{server.rstrip('/')}/v1/{command}", json=body, timeout=600.0)
    if resp.status_code != 200:
        print(f"server error: {resp.status_code} {resp.text}", file=sys.stderr)
        return 2
    data = resp.json()
    print(data["report"])
    return int(data["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
