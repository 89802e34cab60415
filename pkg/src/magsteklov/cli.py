"""Command line front end.

Exit codes: 0 success, 1 toolkit error, 2 usage error, 3 ambiguous
recovery, 4 model mismatch.  Errors are printed to stderr as one line of
JSON: ``{"error": <kind>, "message": <text>}``.

File schemas
------------
boundary JSON
    ``{"components": [{"g11": F, "h1": F, "w1": F, "q": F}, ...], "meta": {...}}``
    where each ``F`` is ``{"re": [c_-N..c_N], "im": [...]}`` (Fourier
    coefficients on ``[0, 2π)``) or a plain number for a constant.
generating multiset JSON
    ``[{"a": "3/2", "b": "1/4"}, ...]`` with exact rationals as strings or
    integers; an optional ``"unit"`` tag marks incommensurable data.
spectrum CSV
    header ``index,value,component`` followed by one eigenvalue per row.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import SurfaceBoundary, load_boundary, random_component
from .dn_map import (
    component_spectrum_asymptotic,
    steklov_coeffs_closed,
    steklov_coeffs_via_nf,
)
from .errors import ModelMismatchError, ToolkitError
from .oracles import CylinderModel, DiskFluxModel, ab_disk_spectrum, cylinder_spectrum
from .progressions import (
    almost_equal,
    classify_vs_single,
    is_covering,
    is_distinct_covering,
    is_exact_covering,
    is_natural_exact,
    load_multiset,
    symmetric,
)
from .recovery import DegeneracyWarning, match_close, recover_multi, recover_single
from .spectrum import SpectrumSeq, merge_spectra

EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_AMBIGUOUS = 3
EXIT_MISMATCH = 4


def _sig(obj):
    """Round every float to 12 significant digits; render rationals exactly."""
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _sig(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sig(v) for v in obj]
    return obj


def _emit(payload, out: str | None = None) -> None:
    text = json.dumps(_sig(payload), separators=(",", ":"))
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _emit_csv(seq: SpectrumSeq, out: str | None) -> None:
    text = seq.to_csv()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _nrange(text: str | None, kmax: int) -> tuple[int, int]:
    if text is None:
        return 1, kmax
    lo, _, hi = text.partition(":")
    lo, hi = int(lo), int(hi)
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("--nrange must be 'lo:hi' with 1 <= lo <= hi")
    return lo, hi


def _boundary(arg: str, seed: int) -> SurfaceBoundary:
    if arg.startswith("random"):
        _, _, count = arg.partition(":")
        rng = np.random.default_rng(seed)
        comps = tuple(random_component(rng) for _ in range(int(count or 1)))
        return SurfaceBoundary(comps, {"model": "random", "seed": seed})
    return load_boundary(arg)


# subcommands ---------------------------------------------------------------------


def cmd_forward(args) -> int:
    sb = _boundary(args.boundary, args.seed)
    lo, hi = _nrange(args.nrange, args.kmax)
    coeffs = [steklov_coeffs_closed(c) for c in sb.components]
    seqs = []
    for j, sc in enumerate(coeffs):
        label = f"N{j + 1}"
        pos = component_spectrum_asymptotic(sc, lo, hi, args.depth, label)
        neg = component_spectrum_asymptotic(sc, -hi, -lo, args.depth, label)
        seqs += [pos, neg]
    spectrum = merge_spectra(seqs)
    if args.out:
        _emit_csv(spectrum, args.out)
        _emit({"components": [c.to_json() for c in coeffs], "spectrum": args.out, "count": len(spectrum)})
    else:
        _emit_csv(spectrum, None)
    return 0


def cmd_coeffs(args) -> int:
    sb = _boundary(args.boundary, args.seed)
    rows = []
    for j, c in enumerate(sb.components):
        closed = steklov_coeffs_closed(c)
        engine = steklov_coeffs_via_nf(c, args.depth)
        for k, (eng_p, eng_m) in enumerate(engine.b[: args.depth]):
            row = {"component": j + 1, "k": k, "engine_plus": eng_p, "engine_minus": eng_m}
            if k < 3:
                row["closed_plus"], row["closed_minus"] = closed.b[k]
            rows.append(row)
    _emit({"depth": args.depth, "rows": rows}, args.out)
    return 0


def cmd_recover(args) -> int:
    seq = SpectrumSeq.from_csv(args.spectrum)
    if args.multi:
        with warnings.catch_warnings():
            # degeneracies are reported inside the JSON
            warnings.simplefilter("ignore", DegeneracyWarning)
            est = recover_multi(seq, m_max=args.multi, tol=args.tol if args.tol is not None else 0.05)
        _emit(est.to_json(), args.out)
        return 0
    kw = {} if args.tol is None else {"tol": args.tol}
    inv = recover_single(seq, **kw)
    _emit(inv.to_json(), args.out)
    return EXIT_AMBIGUOUS if inv.ambiguous else 0


def cmd_apdecide(args) -> int:
    R1, R2 = load_multiset(args.left), load_multiset(args.right)
    if args.symmetric:
        R1, R2 = symmetric(R1), symmetric(R2)
    _emit(almost_equal(R1, R2).to_json(), args.out)
    return 0


def cmd_cover(args) -> int:
    R = load_multiset(args.system)
    ecs = is_exact_covering(R)
    out = {"CS": is_covering(R), "ECS": ecs, "DCS": is_distinct_covering(R), "NECS": False}
    if ecs:
        natural, tree = is_natural_exact(R)
        out["NECS"] = natural
        if tree is not None:
            out["tree"] = tree.to_json()
    _emit(out, args.out)
    return 0


def cmd_classify(args) -> int:
    _emit(classify_vs_single(args.k2).to_json(), args.out)
    return 0


def cmd_match(args) -> int:
    X, Y = SpectrumSeq.from_csv(args.left), SpectrumSeq.from_csv(args.right)
    report = match_close(X, Y, args.tol)
    _emit(report.to_json(), args.out)
    return 0


def cmd_oracle(args) -> int:
    if args.model == "cylinder":
        seq = cylinder_spectrum(CylinderModel(args.L, args.beta), args.kmax)
    else:
        seq = ab_disk_spectrum(DiskFluxModel(args.beta), args.kmax)
    _emit_csv(seq, args.out)
    return 0


# parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for 'random' boundaries (default 0)")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")

    p = argparse.ArgumentParser(
        prog="magsteklov",
        description="Magnetic Steklov spectra: symbols, asymptotics, recovery and progression tools.",
        epilog=__doc__.split("File schemas", 1)[1].strip("\n -"),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("forward", parents=[common], help="boundary JSON -> asymptotic spectrum CSV")
    f.add_argument("boundary", help="boundary JSON, or 'random[:m]' (uses --seed)")
    f.add_argument("--kmax", type=int, default=50, help="largest |n| per branch (default 50)")
    f.add_argument("--nrange", help="index range lo:hi overriding --kmax")
    f.add_argument("--depth", type=int, default=2, choices=(0, 1, 2), help="highest b_k used")
    f.set_defaults(func=cmd_forward)

    c = sub.add_parser("coeffs", parents=[common], help="boundary JSON -> b_k table")
    c.add_argument("boundary")
    c.add_argument("--depth", type=int, default=3, help="number of engine levels K (default 3)")
    c.set_defaults(func=cmd_coeffs)

    r = sub.add_parser("recover", parents=[common], help="spectrum CSV -> invariants JSON")
    r.add_argument("spectrum")
    r.add_argument("--multi", type=int, choices=(1, 2, 3), help="select among up to this many components")
    r.set_defaults(func=cmd_recover)

    a = sub.add_parser("apdecide", parents=[common], help="almost-equality of two generating multisets")
    a.add_argument("left")
    a.add_argument("right")
    a.add_argument("--symmetric", action="store_true", help="compare R ∪ R⁻ on both sides")
    a.set_defaults(func=cmd_apdecide)

    v = sub.add_parser("cover", parents=[common], help="covering-system properties of an integer system")
    v.add_argument("system")
    v.set_defaults(func=cmd_cover)

    k = sub.add_parser("classify", parents=[common], help="solutions matching a single symmetric progression")
    k.add_argument("--k2", type=int, choices=(2, 3), required=True)
    k.set_defaults(func=cmd_classify)

    m = sub.add_parser("match", parents=[common], help="close-matching diagnostics of two spectra")
    m.add_argument("left")
    m.add_argument("right")
    m.set_defaults(func=cmd_match)

    o = sub.add_parser("oracle", parents=[common], help="exact spectra of solvable models")
    o.add_argument("model", choices=("cylinder", "abdisk"))
    o.add_argument("--L", type=float, default=1.0, help="cylinder half-length")
    o.add_argument("--beta", type=float, required=True)
    o.add_argument("--kmax", type=int, default=50)
    o.set_defaults(func=cmd_oracle)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ModelMismatchError as exc:
        _error(exc.kind, str(exc))
        return EXIT_MISMATCH
    except ToolkitError as exc:
        _error(exc.kind, str(exc))
        return EXIT_ERROR
    except (OSError, ValueError, TypeError, KeyError, argparse.ArgumentTypeError) as exc:
        _error("invalid_input", str(exc))
        return EXIT_ERROR


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
