"""Command-line front end: bound pipelines, caching, and reports.

Subcommands mirror the library pipelines: ``code-bound`` (exact LP
bounds for doubly-even codes), ``lattice-bound`` / ``voa-bound``
(derivative-functional bisection searches), and ``magic`` (exact
identity checks and contour evaluations for c = 8, 24).  Results can
be cached as one JSON file per key; cache hits replay byte-identical
output.  Exit codes: 0 success, 1 usage error, 2 computation error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Dict, List, Optional

from . import __version__

__all__ = ["ResultCache", "RunConfig", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_VERIFICATION = 3


@dataclass
class RunConfig:
    precision: int = 256
    N: int = 12
    tol: float = 1e-4
    quad_level: int = 9
    fmt: str = "text"
    cache: Optional[str] = None

    def validate(self):
        if self.precision < 53:
            raise ValueError("precision must be at least 53 bits")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not (0 < self.tol < 1):
            raise ValueError("tol must be in (0, 1)")
        if self.fmt not in ("json", "csv", "text"):
            raise ValueError(f"unknown output format {self.fmt!r}")


class ResultCache:
    """One JSON file per key in a directory; writes are atomic."""

    def __init__(self, path: str):
        self.path = path
        os.makedirs(path, exist_ok=True)

    def _file(self, key: str) -> str:
        return os.path.join(self.path, key + ".json")

    @staticmethod
    def key(pipeline: str, parameter: str, N: int, precision: int) -> str:
        param = str(parameter).replace("/", "_").replace(".", "p")
        return f"{pipeline}-{param}-N{N}-b{precision}-v{__version__}"

    def get(self, key: str) -> Optional[Dict]:
        try:
            with open(self._file(key)) as fh:
                return json.load(fh)
        except (OSError, ValueError):
            return None

    def put(self, key: str, payload: Dict):
        fd, tmp = tempfile.mkstemp(dir=self.path, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
            os.replace(tmp, self._file(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def _emit(rows: List[Dict], fmt: str, stream):
    if fmt == "json":
        json.dump(rows, stream, indent=2, sort_keys=True)
        stream.write("\n")
    elif fmt == "csv":
        if rows:
            writer = csv.DictWriter(stream, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    else:
        for row in rows:
            stream.write("  ".join(f"{k}={v}" for k, v in row.items()))
            stream.write("\n")


def cmd_code_bound(args, cfg: RunConfig, stream) -> int:
    from . import codes

    rows = []
    failed = False
    for n in args.n:
        try:
            rec = codes.bound_record(n)
            rows.append({"n": n, "mu": rec["mu"],
                         "objective": json.dumps(rec.get("objective_at_k_minus_1"))})
        except Exception as exc:  # per-job failure, run continues
            rows.append({"n": n, "mu": "error", "objective": repr(exc)})
            failed = True
    _emit(rows, cfg.fmt, stream)
    return EXIT_COMPUTATION if failed else EXIT_OK


def _bound_rows(flavor: str, params: List[str], cfg: RunConfig, stream) -> int:
    from . import sdp
    from .exactfield import rat
    from .functional import FunctionalSpec

    cache = ResultCache(cfg.cache) if cfg.cache else None
    rows = []
    failed = False
    for p in params:
        key = ResultCache.key(flavor, p, cfg.N, cfg.precision)
        payload = cache.get(key) if cache else None
        if payload is None:
            try:
                spec = FunctionalSpec(flavor, rat(p), cfg.N,
                                      precision=cfg.precision)
                res = sdp.bound_search(spec, bisect_tol=cfg.tol)
                report = sdp.verify_certificate(res.certificate)
                payload = json.loads(res.to_json())
                payload["certificate_ok"] = bool(report["ok"])
                if cache:
                    cache.put(key, payload)
            except Exception as exc:
                rows.append({"parameter": p, "bound": "error",
                             "detail": repr(exc)})
                failed = True
                continue
        rows.append({
            "parameter": p,
            "delta_star": payload["delta_star"],
            "bound": payload["bound"],
            "bracket_low": payload["bracket"][0],
            "bracket_high": payload["bracket"][1],
            "certificate_ok": payload["certificate_ok"],
        })
    _emit(rows, cfg.fmt, stream)
    if failed:
        return EXIT_COMPUTATION
    if any(not r.get("certificate_ok", False) for r in rows):
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_lattice_bound(args, cfg: RunConfig, stream) -> int:
    return _bound_rows("lattice", args.n, cfg, stream)


def cmd_voa_bound(args, cfg: RunConfig, stream) -> int:
    return _bound_rows("voa", args.c, cfg, stream)


def _parse_h_range(text: str) -> List[str]:
    """'a:b:step' -> inclusive-start sample list; a single value stands alone."""
    parts = text.split(":")
    if len(parts) == 1:
        return [parts[0]]
    if len(parts) != 3:
        raise ValueError("h range must be 'start:stop:step'")
    import mpmath as mp
    start, stop, step = (mp.mpf(p) for p in parts)
    if step <= 0 or stop <= start:
        raise ValueError("h range must increase")
    out = []
    h = start
    while h < stop + step / 2:
        out.append(mp.nstr(h, 12))
        h += step
    return out


def cmd_magic(args, cfg: RunConfig, stream) -> int:
    import mpmath as mp

    from . import magic

    if args.c not in (8, 24):
        stream.write(f"central charge {args.c} is not supported "
                     "(only 8 and 24)\n")
        return EXIT_USAGE
    quad = magic.QuadratureConfig(level=cfg.quad_level,
                                  precision=cfg.precision)
    if args.magic_cmd == "verify":
        report = {"c": args.c}
        report["identity_checks"] = magic.magic_identity_check(args.c)
        edge = mp.mpf(args.c) / 16 + mp.mpf(1) / 2
        ladder = magic.zero_ladder(args.c, 3, quad)
        report["ladder_values"] = [mp.nstr(v, 8) for v in ladder]
        ladder_ok = all(abs(v) < mp.mpf("1e-8") for v in ladder)
        rels = []
        for dh in ("0.1", "0.35", "0.6"):
            h = edge + mp.mpf(dh)
            fs = magic.f_sine(args.c, h, quad)
            dc = magic.contour_functional(args.c, h, quad)
            rels.append(abs(fs - dc) / abs(fs))
        report["deformation_rel_errs"] = [mp.nstr(r, 4) for r in rels]
        deform_ok = all(r < mp.mpf("1e-8") for r in rels)
        vacuum = magic.contour_functional(args.c, 0, quad)
        report["vacuum_value"] = mp.nstr(vacuum, 8)
        vacuum_ok = abs(vacuum) < mp.mpf("1e-8")
        report["ok"] = bool(report["identity_checks"] and ladder_ok
                            and deform_ok and vacuum_ok)
        json.dump(report, stream, indent=2)
        stream.write("\n")
        return EXIT_OK if report["ok"] else EXIT_VERIFICATION
    # eval: CSV table of f_c(h)
    rows = []
    for hs in _parse_h_range(args.h):
        h = mp.mpf(hs)
        edge = mp.mpf(args.c) / 16 + mp.mpf(1) / 2
        if h - edge < mp.mpf("1e-3"):
            val = magic.contour_functional(args.c, h, quad)
        else:
            val = magic.f_sine(args.c, h, quad)
        rows.append({"h": hs, "f": mp.nstr(val, 12)})
    _emit(rows, "csv" if cfg.fmt == "text" else cfg.fmt, stream)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dualbound",
                     description="certified dual packing bounds")
    parser.add_argument("--precision", type=int, default=256,
                        help="working precision in bits")
    parser.add_argument("--N", type=int, default=12,
                        help="derivative order cutoff")
    parser.add_argument("--tol", type=float, default=1e-4,
                        help="bisection tolerance")
    parser.add_argument("--format", dest="fmt", default="text",
                        choices=["json", "csv", "text"])
    parser.add_argument("--cache", default=None,
                        help="cache directory (env DUALBOUND_CACHE)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code-bound", help="exact LP bounds for codes")
    p.add_argument("n", nargs="+", type=int)
    p.set_defaults(func=cmd_code_bound)

    p = sub.add_parser("lattice-bound", help="minimal-norm bounds")
    p.add_argument("n", nargs="+")
    p.set_defaults(func=cmd_lattice_bound)

    p = sub.add_parser("voa-bound", help="conformal-weight bounds")
    p.add_argument("c", nargs="+")
    p.set_defaults(func=cmd_voa_bound)

    p = sub.add_parser("magic", help="magic-function verification")
    p.add_argument("magic_cmd", choices=["verify", "eval"])
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--h", default="1.1:2.1:0.5",
                   help="h samples for eval, 'start:stop:step'")
    p.set_defaults(func=cmd_magic)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or EXIT_OK)
    cfg = RunConfig(precision=args.precision, N=args.N, tol=args.tol,
                    fmt=args.fmt,
                    cache=args.cache or os.environ.get("DUALBOUND_CACHE"))
    try:
        cfg.validate()
    except ValueError as exc:
        sys.stderr.write(f"dualbound: {exc}\n")
        return EXIT_USAGE
    try:
        return args.func(args, cfg, sys.stdout)
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:
        sys.stderr.write(f"dualbound: computation failed: {exc!r}\n")
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
