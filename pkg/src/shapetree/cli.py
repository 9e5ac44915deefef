"""Command-line front end: ``shapetree {sample,match,describe,verify-ellipses}``.

Exit codes: 0 success, 1 a half-ellipse claim did not verify, 2 argument or
input errors, 3 degenerate shape / no usable extrema, 4 extrema counts do not
match between shapes, 5 unstable frequency pair, 6 quadrature failure.
Errors print one ``shapetree: error[<reason>]: <message>`` line on stderr;
stdout carries only data and output paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import ellipse_lab, invariants_fourier, invariants_spatial, sampling
from .boundary import SampledBoundary, curvature_from_points, parse_boundary
from .errors import (
    AlignmentError,
    ArgumentError,
    DegenerateShapeError,
    NoDistinctExtremaError,
    ParseError,
    QuadratureAccuracyError,
    ShapeTreeError,
    TraceError,
    UnstableFrequencyError,
)
from .raster import read_pgm, trace_raster_boundary
from .shape_tree import SampledShape, Weights, build_tree, match_shapes, shape_from_samples

RAW = "raw"

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_ARGUMENT = 2
EXIT_DEGENERATE = 3
EXIT_ALIGNMENT = 4
EXIT_UNSTABLE = 5
EXIT_QUADRATURE = 6

# most specific first
_ERROR_CODES = [
    (NoDistinctExtremaError, EXIT_DEGENERATE, "no-distinct-extrema"),
    (DegenerateShapeError, EXIT_DEGENERATE, "degenerate-shape"),
    (TraceError, EXIT_DEGENERATE, "trace"),
    (AlignmentError, EXIT_ALIGNMENT, "extrema-mismatch"),
    (UnstableFrequencyError, EXIT_UNSTABLE, "unstable-frequency"),
    (QuadratureAccuracyError, EXIT_QUADRATURE, "quadrature"),
    (ParseError, EXIT_ARGUMENT, "parse"),
    (ArgumentError, EXIT_ARGUMENT, "argument"),
]


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _round12(x: float) -> float:
    return float(fmt(x))


def write_atomic(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_boundary(path: str) -> SampledBoundary:
    p = Path(path)
    if not p.is_file():
        raise ArgumentError(f"input file not found: {path}")
    if p.suffix.lower() == ".pgm":
        return trace_raster_boundary(read_pgm(p.read_bytes()))
    with p.open(encoding="utf-8") as fh:
        return parse_boundary(fh)


def resolve_weights(flag: str | None) -> Weights:
    if flag:
        return Weights.parse(flag)
    env = os.environ
    if env.get("SHAPETREE_WEIGHTS"):
        base = Weights.parse(env["SHAPETREE_WEIGHTS"])
    else:
        base = Weights()
    values = {}
    for name in ("w1", "w2", "w3"):
        raw = env.get(f"SHAPETREE_{name.upper()}")
        if raw:
            try:
                values[name] = float(raw)
            except ValueError:
                raise ArgumentError(f"SHAPETREE_{name.upper()} must be numeric, got {raw!r}") from None
    return Weights(values.get("w1", base.w1), values.get("w2", base.w2), values.get("w3", base.w3))


def _sample_shape(b: SampledBoundary, method: str, n: int | None, kind: str):
    if method == RAW:
        return None, SampledShape(points=np.asarray(b.points), curvatures=curvature_from_points(b.points))
    if n is None:
        raise ArgumentError("-n is required for this sampling method")
    s = sampling.sample(b, n, method, kind)
    return s, shape_from_samples(b, s)


def cmd_sample(args) -> int:
    b = load_boundary(args.input)
    if args.method == RAW:
        raise ArgumentError("'sample' needs a sampling method, not 'raw'")
    s = sampling.sample(b, args.n, args.method, args.kind)
    out = Path(args.out) / f"{Path(args.input).stem}_samples.csv"
    write_atomic(out, "arc_position\n" + "".join(fmt(x) + "\n" for x in s.positions))
    print(f"method={s.method}")
    print(f"seed_arc={fmt(s.seed_arc)}")
    print(f"total_length={fmt(s.total_length)}")
    print(f"samples={out}")
    return EXIT_OK


def cmd_match(args) -> int:
    b1, b2 = load_boundary(args.first), load_boundary(args.second)
    w = resolve_weights(args.weights)
    s1, p = _sample_shape(b1, args.method, args.n, args.kind)
    s2, q = _sample_shape(b2, args.method, args.n, args.kind)
    if s1 is not None and s2 is not None:
        s2, _ = sampling.align_samplings(s1, s2)
        q = shape_from_samples(b2, s2)
    if len(p) != len(q):
        raise ArgumentError(f"inputs differ in sample count ({len(p)} vs {len(q)})")
    root = args.root
    if root is not None and not 0 <= root < len(p):
        raise ArgumentError(f"--root {root} outside [0, {len(p)})")
    report = match_shapes(p, q, w, args.cost, root, normalize=None if args.normalize == "none" else args.normalize)
    out = Path(args.out)
    doc = report.to_dict()
    doc["cost"] = _round12(doc["cost"])
    doc["cost_terms"] = [_round12(t) for t in doc["cost_terms"]]
    jpath = write_atomic(out / "match.json", json.dumps(doc, indent=1) + "\n")
    cpath = write_atomic(out / "correspondences.csv", report.correspondence.to_csv())
    print(f"cost={fmt(report.cost)}")
    print(f"root_p={report.root_p}")
    print(f"root_q={report.root_q}")
    print(f"report={jpath}")
    print(f"correspondences={cpath}")
    return EXIT_OK


def _ratio_doc(spectrum, omega1: float, omega2: float) -> dict:
    r = invariants_fourier.spectral_ratio(spectrum, omega1, omega2)
    return {"omega1": _round12(omega1), "omega2": _round12(omega2), "re": _round12(r.real), "im": _round12(r.imag)}


def cmd_describe(args) -> int:
    b = load_boundary(args.input)
    _, shape = _sample_shape(b, args.method, args.n, args.kind)
    root = args.root or 0
    if not 0 <= root < len(shape):
        raise ArgumentError(f"--root {root} outside [0, {len(shape)})")
    tree = build_tree(shape, root)
    m1, m2 = args.omega_pair
    omega1, omega2 = invariants_fourier.default_omega_pair(tree.n, m1, m2)
    omegas = invariants_fourier.default_omegas(tree.n)
    aspec = invariants_fourier.angle_spectrum(tree, omegas)
    mspec = invariants_fourier.modulus_spectrum(tree, omegas)
    # compute both ratios before writing anything so a failure leaves no partial output
    aratio = _ratio_doc(aspec, omega1, omega2)
    mratio = _ratio_doc(mspec, omega1, omega2)
    stem = Path(args.input).stem
    out = Path(args.out)
    paths = [
        write_atomic(out / f"{stem}_spatial.csv", invariants_spatial.descriptor_csv(invariants_spatial.spatial_descriptor(tree))),
        write_atomic(out / f"{stem}_angle_spectrum.csv", invariants_fourier.spectrum_csv(aspec)),
        write_atomic(out / f"{stem}_modulus_spectrum.csv", invariants_fourier.spectrum_csv(mspec)),
        write_atomic(out / f"{stem}_angle_ratio.json", json.dumps(aratio) + "\n"),
        write_atomic(out / f"{stem}_modulus_ratio.json", json.dumps(mratio) + "\n"),
    ]
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_verify_ellipses(args) -> int:
    result = ellipse_lab.verify(gap_points=args.points)
    out = Path(args.out)
    for (a1, b1, a2, b2), curve in result["gap_curves"].items():
        name = f"gap_{a1:g}_{b1:g}_vs_{a2:g}_{b2:g}.csv"
        rows = "".join(f"{fmt(t)},{fmt(v)}\n" for t, v in curve)
        print(write_atomic(out / name, "theta,value\n" + rows))
    table = "a,b,M\n" + "".join(f"{fmt(a)},{fmt(b)},{fmt(m)}\n" for a, b, m in result["table1"])
    print(write_atomic(out / "table1.csv", table))
    verdict = result["verdict"]

    def clean(obj):
        if isinstance(obj, float):
            return _round12(obj)
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [clean(v) for v in obj]
        return obj

    print(write_atomic(out / "verdict.json", json.dumps(clean(verdict), indent=1) + "\n"))
    if not verdict["all_claims_verified"]:
        failed = [k for k in ("equal_within_tol", "gap_curves_flat", "m_discriminates", "m_orders_by_protrusion") if not verdict[k]]
        print(f"shapetree: error[claim-not-verified]: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CLAIM_FAILED
    return EXIT_OK


def _omega_pair(text: str) -> tuple[int, int]:
    try:
        m1, m2 = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'm1,m2' integers, got {text!r}") from None
    return m1, m2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shapetree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def sampling_flags(p, allow_raw: bool):
        choices = list(sampling.METHODS) + ([RAW] if allow_raw else [])
        p.add_argument("--method", choices=choices, default=sampling.CENTROID_DISTANCE)
        p.add_argument("-n", type=int, default=None, help="number of sample points")
        p.add_argument("--kind", choices=["maxima", "minima"], default="maxima", help="centroid-distance extremum used as seed")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("sample", help="place invariant sample points on one shape")
    sampling_flags(p, allow_raw=False)
    p.add_argument("input")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("match", help="match two shapes and write their correspondences")
    sampling_flags(p, allow_raw=True)
    p.add_argument("--weights", default=None, help="w1,w2,w3 (default 1,1,1 or $SHAPETREE_WEIGHTS)")
    p.add_argument("--cost", choices=["tentative", "full"], default="tentative")
    p.add_argument("--root", type=int, default=None, help="root sample on the first shape (default 0)")
    p.add_argument("--normalize", choices=["spatial", "none"], default="spatial")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("describe", help="write spatial and Fourier descriptors of one shape")
    sampling_flags(p, allow_raw=True)
    p.add_argument("--root", type=int, default=None)
    p.add_argument("--omega-pair", type=_omega_pair, default=(1, 2), help="frequency indices m1,m2")
    p.add_argument("input")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("verify-ellipses", help="reproduce the half-ellipse curvature experiments")
    p.add_argument("--out", default=".")
    p.add_argument("--points", type=int, default=181, help="samples along each gap curve")
    p.set_defaults(func=cmd_verify_ellipses)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is not None and args.n < 3:
        print(f"shapetree: error[argument]: -n must be at least 3, got {args.n}", file=sys.stderr)
        return EXIT_ARGUMENT
    try:
        return args.func(args)
    except ShapeTreeError as exc:
        for cls, code, reason in _ERROR_CODES:
            if isinstance(exc, cls):
                msg = " ".join(str(exc).split())
                print(f"shapetree: error[{reason}]: {msg}", file=sys.stderr)
                return code
        raise
    except OSError as exc:
        print(f"shapetree: error[io]: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT


if __name__ == "__main__":
    sys.exit(main())
