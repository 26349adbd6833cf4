"""Command-line driver: `zollspec <command> --config cfg.json [--out dir]`.

Commands: spectrum, pspec, numrange, radon, bracket, quasimode produce CSV
and SVG artifacts; verify runs the full check suite and writes
verify_report.json.  Exit codes: 0 success, 2 configuration error,
3 numeric failure (including failed verification checks).  Artifacts are
assembled in memory and written only after the command succeeded, so a
failing run leaves no partial files.  ZOLLSPEC_THREADS (or --threads)
controls the worker pool; results do not depend on it.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import verify as verify_mod
from ._parallel import thread_count
from .artifacts import ConfigError, build_artifacts, parse_config

COMMANDS = ["spectrum", "pspec", "numrange", "radon", "bracket",
            "quasimode", "verify"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _write_all(outdir, artifacts):
    outdir.mkdir(parents=True, exist_ok=True)
    for name in sorted(artifacts):
        path = outdir / name
        with open(path, "w", newline="\n") as fh:
            fh.write(artifacts[name])
        print(f"wrote {path}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="zollspec",
        description="Spectra, pseudospectra and numerical ranges of "
                    "Schrodinger operators with complex potentials on the "
                    "round sphere.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default=None,
                        help="output directory (default: config output_dir)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: ZOLLSPEC_THREADS or 1)")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.out) if args.out else Path(cfg.output_dir)
    threads = thread_count(args.threads)

    if args.command == "verify":
        try:
            report = verify_mod.run_all(cfg)
        except Exception as exc:
            print(f"error: verification crashed: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        for check in report["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            print(f"{status}  {check['name']}")
        _write_all(outdir, {"verify_report.json": verify_mod.report_json(report)})
        return EXIT_OK if report["all_passed"] else EXIT_NUMERIC

    try:
        artifacts = build_artifacts(cfg, [args.command], threads=threads)
    except Exception as exc:
        print(f"error: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _write_all(outdir, artifacts)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
