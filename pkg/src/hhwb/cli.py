"""Command-line front end: validate inputs, compute homology, verify the
decomposition, and expand the symmetric-power series, with a
content-addressed result cache."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import tempfile
import time
from fractions import Fraction

from . import __version__
from .decomposition import rhs_dims, verify_decomposition
from .dgcore import (
    BasisInfo,
    DgCategory,
    DgFunctor,
    Permutation,
    validate_category,
    validate_functor,
)
from .hochschild import TwistSpec, build_complex, total_homology
from .qlinalg import RankMode, StructuralError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_INCONCLUSIVE = 3


class InputError(Exception):
    """Malformed input file or options (exit code 2)."""


# -- input parsing ----------------------------------------------------------


def _lincomb(entries, where: str) -> dict:
    if not isinstance(entries, list):
        raise InputError(f"{where}: linear combination must be a list")
    out = {}
    for e in entries:
        try:
            out[e["basis"]] = Fraction(int(e["num"]), int(e.get("den", 1)))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{where}: bad term {e!r} ({exc})")
    return {b: c for b, c in out.items() if c}


def category_from_dict(data: dict) -> DgCategory:
    try:
        objects = list(data["objects"])
        homs = data["homs"]
        units = dict(data["units"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"missing or malformed top-level key: {exc}")
    basis = {}
    for h in homs:
        try:
            basis[h["name"]] = BasisInfo(h["src"], h["tgt"],
                                         int(h.get("degree", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad hom entry {h!r} ({exc})")
    compose = {}
    for entry in data.get("compose", []):
        try:
            key = (entry["g"], entry["f"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad compose entry {entry!r} ({exc})")
        compose[key] = _lincomb(entry.get("result", []),
                                f"compose {key[0]}∘{key[1]}")
    diff = {}
    for entry in data.get("diff", []):
        try:
            b = entry["basis"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad diff entry {entry!r} ({exc})")
        diff[b] = _lincomb(entry.get("result", []), f"diff {b}")
    try:
        return DgCategory(objects=objects, basis=basis, units=units,
                          compose=compose, diff=diff,
                          name=data.get("name", "category"))
    except (ValueError, KeyError) as exc:
        raise InputError(f"category construction failed: {exc}")


def functor_from_dict(c: DgCategory, data: dict) -> DgFunctor:
    try:
        obj_map = dict(data["obj_map"])
        hom_map = {b: _lincomb(v, f"functor hom {b}")
                   for b, v in data["hom_map"].items()}
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad functor entry ({exc})")
    return DgFunctor(c, c, obj_map, hom_map, name=data.get("name", "functor"))


def load_input(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    return raw, data


def parse_twist(s: str | None) -> TwistSpec:
    if s is None or s == "identity":
        return TwistSpec.identity()
    m = re.fullmatch(r"perm:(\d+):(.*)", s)
    if not m:
        raise InputError(f"bad twist {s!r}; expected perm:<n>:<cycles>")
    n = int(m.group(1))
    cycles = []
    rest = m.group(2).strip()
    for grp in re.findall(r"\(([^)]*)\)", rest):
        entries = tuple(int(x) for x in grp.replace(",", " ").split())
        if entries:
            cycles.append(entries)
    if re.sub(r"\([^)]*\)", "", rest).strip():
        raise InputError(f"bad cycle notation in twist {s!r}")
    try:
        return TwistSpec.perm(n, Permutation.from_cycles(n, cycles))
    except (ValueError, IndexError) as exc:
        raise InputError(f"bad twist {s!r}: {exc}")


def parse_degrees(s: str | None, max_level: int) -> list:
    if s is None:
        return list(range(0, -max_level, -1))
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", s.strip())
    if not m:
        raise InputError(f"bad degree range {s!r}; expected a..b")
    a, b = int(m.group(1)), int(m.group(2))
    lo, hi = min(a, b), max(a, b)
    return list(range(hi, lo - 1, -1))


def parse_dims(s: str) -> dict:
    out = {}
    if not s.strip():
        return out
    for part in s.split(","):
        m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(\d+)\s*", part)
        if not m:
            raise InputError(f"bad dims entry {part!r}; expected deg:dim")
        out[int(m.group(1))] = int(m.group(2))
    return out


def make_mode(args) -> RankMode:
    if args.mode == "exact":
        return RankMode.exact()
    if args.primes:
        try:
            primes = tuple(int(p) for p in args.primes.split(","))
        except ValueError as exc:
            raise InputError(f"bad primes: {exc}")
        return RankMode.modular(primes)
    return RankMode.modular()


# -- cache ------------------------------------------------------------------


def cache_dir(args) -> str | None:
    return args.cache_dir or os.environ.get("HHWB_CACHE_DIR")


def cache_key(input_sha: str, options: dict) -> str:
    blob = json.dumps({"input": input_sha, "options": options},
                      sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def cache_get(cdir: str | None, key: str) -> bytes | None:
    if not cdir:
        return None
    path = os.path.join(cdir, key + ".json")
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError:
        return None


def cache_put(cdir: str | None, key: str, payload: bytes):
    if not cdir:
        return
    os.makedirs(cdir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cdir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, os.path.join(cdir, key + ".json"))
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass


# -- output -----------------------------------------------------------------


def emit(payload: bytes, args, csv_rows=None, csv_header=None):
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload.decode())
        sys.stdout.write("\n")
    if getattr(args, "csv", None) and csv_rows is not None:
        with open(args.csv, "w") as fh:
            fh.write(csv_header + "\n")
            for row in csv_rows:
                fh.write(",".join(str(x) for x in row) + "\n")


def report_bytes(report: dict) -> bytes:
    return json.dumps(report, indent=2, sort_keys=True).encode()


def base_report(input_sha: str, options: dict, started: float) -> dict:
    return {
        "tool": "hhwb",
        "version": __version__,
        "input_sha256": input_sha,
        "options": options,
        "timings": {"wall_seconds": round(time.monotonic() - started, 3)},
    }


# -- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    raw, data = load_input(args.path)
    cat = category_from_dict(data)
    diags = validate_category(cat)
    for fdata in data.get("functors", []):
        try:
            f = functor_from_dict(cat, fdata)
        except InputError:
            raise
        diags += [f"functor {f.name}: {d}" for d in validate_functor(f)]
    if diags:
        for d in diags:
            print(d)
        return EXIT_MISMATCH
    print(f"{cat.name}: ok ({len(cat.basis)} basis morphisms, "
          f"{len(cat.objects)} objects)")
    return EXIT_OK


def _common_options(args, command: str) -> dict:
    return {
        "command": command,
        "max_level": args.max_level,
        "normalized": args.normalized,
        "mode": args.mode,
        "primes": sorted(int(p) for p in args.primes.split(","))
        if args.primes else None,
        "degrees": parse_degrees(args.degrees, args.max_level),
    }


def cmd_compute(args) -> int:
    started = time.monotonic()
    raw, data = load_input(args.path)
    options = _common_options(args, "compute")
    options["twist"] = args.twist or "identity"
    input_sha = hashlib.sha256(raw).hexdigest()
    key = cache_key(input_sha, options)
    cdir = cache_dir(args)
    cached = cache_get(cdir, key)
    if cached is not None:
        rep = json.loads(cached)
        rows = [(k, v["dim"], v["certificate"])
                for k, v in sorted(rep["results"].items(),
                                   key=lambda kv: -int(kv[0]))]
        emit(cached, args, rows, "degree,dim,certificate")
        return EXIT_OK
    cat = category_from_dict(data)
    diags = validate_category(cat)
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return EXIT_MISMATCH
    twist = parse_twist(args.twist)
    sc = build_complex(cat, twist, args.max_level, normalized=args.normalized)
    summary = total_homology(sc, options["degrees"], mode=make_mode(args))
    rep = base_report(input_sha, options, started)
    rep["results"] = {
        str(k): {
            "dim": r.dim,
            "certificate": r.certificate,
            "mode": r.mode,
            "primes": list(r.primes) if r.primes else None,
            "agreed": r.agreed,
            "reason": r.reason,
        }
        for k, r in summary.degrees.items()
    }
    payload = report_bytes(rep)
    cache_put(cdir, key, payload)
    rows = [(k, summary.degrees[k].dim, summary.degrees[k].certificate)
            for k in options["degrees"]]
    emit(payload, args, rows, "degree,dim,certificate")
    return EXIT_OK


def cmd_decompose(args) -> int:
    started = time.monotonic()
    raw, data = load_input(args.path)
    options = _common_options(args, "decompose")
    options["n"] = args.n
    input_sha = hashlib.sha256(raw).hexdigest()
    key = cache_key(input_sha, options)
    cdir = cache_dir(args)
    cached = cache_get(cdir, key)
    if cached is not None:
        rep = json.loads(cached)
        verdicts = rep["results"]["verdicts"]
    else:
        cat = category_from_dict(data)
        diags = validate_category(cat)
        if diags:
            for d in diags:
                print(d, file=sys.stderr)
            return EXIT_MISMATCH
        report = verify_decomposition(cat, args.n, options["degrees"],
                                      args.max_level,
                                      normalized=args.normalized,
                                      mode=make_mode(args))
        rep = base_report(input_sha, options, started)
        rep["results"] = report.to_dict()
        cached = report_bytes(rep)
        cache_put(cdir, key, cached)
        verdicts = rep["results"]["verdicts"]
    rows = [(k, rep["results"]["lhs_totals"][k],
             rep["results"]["rhs_totals"][k], verdicts[k])
            for k in sorted(verdicts, key=int, reverse=True)]
    emit(cached, args, rows, "degree,lhs,rhs,verdict")
    if any(v == "Mismatch" for v in verdicts.values()):
        return EXIT_MISMATCH
    if any(v == "Heuristic" for v in verdicts.values()):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_series(args) -> int:
    started = time.monotonic()
    h = parse_dims(args.dims)
    support = [k for k, d in h.items() if d]
    if support and min(support) < 0 < max(support) and not args.allow_truncated:
        print("mixed-sign degrees; pass --allow-truncated to proceed",
              file=sys.stderr)
        return EXIT_MISMATCH
    dims = rhs_dims(h, args.n, allow_truncated=args.allow_truncated)
    rep = {
        "tool": "hhwb",
        "version": __version__,
        "options": {"command": "series", "dims": {str(k): v
                                                  for k, v in sorted(h.items())},
                    "n": args.n},
        "results": {str(k): v for k, v in sorted(dims.items(), reverse=True)},
        "timings": {"wall_seconds": round(time.monotonic() - started, 3)},
    }
    rows = sorted(dims.items(), reverse=True)
    emit(report_bytes(rep), args, rows, "degree,dim")
    return EXIT_OK


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hhwb",
                                description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("path", help="category description (JSON)")
        sp.add_argument("--max-level", type=int, default=5)
        norm = sp.add_mutually_exclusive_group()
        norm.add_argument("--normalized", dest="normalized",
                          action="store_true", default=True)
        norm.add_argument("--full", dest="normalized", action="store_false")
        sp.add_argument("--mode", choices=["exact", "modular"],
                        default="modular")
        sp.add_argument("--primes", default=None,
                        help="comma-separated primes for modular mode")
        sp.add_argument("--degrees", default=None, help="range a..b")
        sp.add_argument("--out", default=None, help="write JSON report here")
        sp.add_argument("--csv", default=None, help="write a CSV table here")
        sp.add_argument("--cache-dir", default=None)

    v = sub.add_parser("validate", help="check a category file")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compute", help="twisted Hochschild homology")
    common(c)
    c.add_argument("--twist", default=None,
                   help="identity (default) or perm:<n>:<cycles>")
    c.set_defaults(func=cmd_compute)

    d = sub.add_parser("decompose", help="verify the symmetric-power "
                                         "decomposition")
    common(d)
    d.add_argument("--n", type=int, required=True)
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("series", help="expand the super-symmetric-power "
                                      "series")
    s.add_argument("--dims", required=True, help='e.g. "0:2,-1:1"')
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--allow-truncated", action="store_true")
    s.add_argument("--out", default=None)
    s.add_argument("--csv", default=None)
    s.set_defaults(func=cmd_series)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
