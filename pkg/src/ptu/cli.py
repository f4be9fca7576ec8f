"""Command-line interface: embed, geodesics, generate, evaluate.

Exit status is 0 on success, 1 when a pipeline stage fails and 2 for
usage errors (bad flags, inconsistent parameters, missing reference data).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .core import format_value, read_matrix_csv, read_points_csv, write_matrix_csv
from .datasets import GENERATORS, apply_random_isometry
from .errors import InvalidParam, PTUError
from .metrics import embedding_distortion, geodesic_error, stress
from .pipeline import PipelineConfig, run_pipeline

log = logging.getLogger("ptu")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def write_report(values: dict, path=None) -> str:
    """Flat ``key=value`` lines in insertion order."""
    lines = []
    for key, v in values.items():
        if isinstance(v, (float, np.floating)):
            v = format_value(float(v))
        elif isinstance(v, (list, tuple)):
            v = ",".join(str(x) for x in v)
        lines.append(f"{key}={v}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _config_from(args) -> PipelineConfig:
    return PipelineConfig(
        method=args.method, k=args.k, K=args.K, d=args.d, landmarks=args.landmarks,
        landmark_strategy=args.landmark_strategy, rescale=args.rescale, mutual=args.mutual,
        seed=args.seed, threads=args.threads,
    )


def _manifest(cfg: PipelineConfig, args, result, extra: dict) -> dict:
    m = {"ptu_version": __version__, "command": args.command,
         "input": args.input, "output": args.output}
    m.update(asdict(cfg))
    m["n"] = result.graph.n
    m["graph_edges"] = result.graph.n_edges
    m["stages"] = list(result.timings)
    for stage, secs in result.timings.items():
        m[f"time_{stage}"] = f"{secs:.6f}"
    m.update(extra)
    return m


def _run(args):
    points = read_points_csv(args.input)
    cfg = _config_from(args).resolved()
    if args.command == "geodesics" and cfg.landmarks:
        raise UsageError("geodesics writes the full matrix; --landmarks is not supported here")
    return points, cfg, run_pipeline(points, cfg, distances_only=args.command == "geodesics")


def cmd_embed(args) -> int:
    points, cfg, res = _run(args)
    out = Path(args.output)
    write_matrix_csv(res.embedding.coords, out)
    eig_path = _sidecar(out, ".eigenvalues.csv")
    write_matrix_csv(res.embedding.eigenvalues[:, None], eig_path)
    extra = {"eigenvalues": str(eig_path)}
    if args.spectra and res.frames is not None:
        write_matrix_csv(res.frames.singular_values, args.spectra)
        extra["spectra"] = args.spectra
    if res.landmarks is not None:
        extra["landmark_indices"] = res.landmarks.indices.tolist()
    write_report(_manifest(cfg, args, res, extra), _sidecar(out, ".manifest.txt"))
    log.info("wrote %s (%d x %d)", out, res.embedding.n, res.embedding.d)
    return EXIT_OK


def cmd_geodesics(args) -> int:
    points, cfg, res = _run(args)
    out = Path(args.output)
    write_matrix_csv(res.geodesics.dist, out)
    extra = {}
    if args.hops:
        write_matrix_csv(res.geodesics.hops, args.hops)
        extra["hops"] = args.hops
    write_report(_manifest(cfg, args, res, extra), _sidecar(out, ".manifest.txt"))
    return EXIT_OK


def _parse_noise(name: str, text: str | None):
    if text is None or text == "none":
        return None
    try:
        if name == "petals":
            return float(text)
        kind, _, params = text.partition(":")
        values = [float(v) for v in params.split(",") if v]
    except ValueError:
        raise UsageError(f"bad noise spec {text!r}") from None
    if kind == "gaussian" and len(values) == 1:
        return ("gaussian", values[0])
    if kind == "sparse" and len(values) == 3:
        return ("sparse", *values)
    raise UsageError(f"bad noise spec {text!r}; use gaussian:SIGMA or sparse:FRACTION,AMPLITUDE,SIGMA")


def _parse_hole(text: str | None):
    if text is None or text == "default":
        return text
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --hole value {text!r}") from None
    if len(values) % 2:
        raise UsageError("--hole needs pairs lo,hi per intrinsic axis")
    return tuple(values)


def cmd_generate(args) -> int:
    name = args.name
    kw = {}
    if name == "cap":
        kw = {"grid_m": args.n, "cap_angle": args.cap_angle}
    else:
        kw = {"n": args.n, "seed": args.seed}
    if name == "flat":
        kw.update(D=args.D or 3, d=args.d, hole=_parse_hole(args.hole))
    elif name == "sshape":
        kw.update(hole=_parse_hole(args.hole), density_warp=args.density_warp)
    elif name in ("swissroll", "petals"):
        noise = _parse_noise(name, args.noise)
        if name == "petals":
            kw.update(noise=noise or 0.0, petal_count=args.petal_count)
        else:
            kw.update(noise=noise)
    elif name == "torus":
        kw.update(curved=args.curved)
    if name != "flat" and args.hole is not None and name != "sshape":
        raise UsageError(f"--hole is not supported by {name}")
    ds = GENERATORS[name](**kw)
    if args.lift:
        ds = apply_random_isometry(ds, args.lift, args.seed)
    write_matrix_csv(ds.points.rows, args.out)
    if args.truth:
        if ds.ground_truth is None:
            raise UsageError(f"{name} has no ground-truth coordinates")
        write_matrix_csv(ds.ground_truth.T, args.truth)
    if args.distances:
        write_matrix_csv(ds.truth_distances(), args.distances)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if not (args.truth or args.distances or args.truth_distances):
        raise UsageError("evaluate needs --truth, --distances or --truth-distances")
    report: dict = {}
    if args.embedding:
        z = read_matrix_csv(args.embedding).T
        report.update(n=z.shape[1], d=z.shape[0])
        if args.truth:
            truth = read_matrix_csv(args.truth).T
            if truth.shape != z.shape:
                raise UsageError(f"truth shape {truth.shape[::-1]} differs from embedding {z.shape[::-1]}")
            rep, per_point = embedding_distortion(z, truth)
            report.update(rep.to_dict("distortion_"))
            if args.per_point:
                write_matrix_csv(per_point[:, None], args.per_point)
        if args.distances:
            report["stress"] = stress(z, read_matrix_csv(args.distances))
    elif args.truth:
        raise UsageError("--truth needs --embedding")
    if args.truth_distances:
        if not args.geodesics:
            raise UsageError("--truth-distances needs --geodesics")
        est = read_matrix_csv(args.geodesics)
        hops = read_matrix_csv(args.hops).astype(int) if args.hops else None
        rep = geodesic_error(est, read_matrix_csv(args.truth_distances), hop_counts=hops)
        report.update(rep.to_dict("geodesic_"))
    if not report or ("n" in report and len(report) == 2):
        raise UsageError("nothing to evaluate with the given inputs")
    text = write_report(report, args.report)
    sys.stdout.write(text)
    return EXIT_OK


def _pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", "--input", required=True, help="points CSV, one point per row")
    p.add_argument("-o", "--output", required=True, help="output CSV")
    p.add_argument("--method", choices=("ptu", "isomap"), default="ptu")
    p.add_argument("--k", type=int, default=None, help="graph neighbours (default 4d)")
    p.add_argument("--K", type=int, default=None, help="tangent neighbourhood size (default k)")
    p.add_argument("--d", type=int, default=2, help="embedding dimension")
    p.add_argument("--landmarks", type=int, default=0, help="landmark count, 0 for the full method")
    p.add_argument("--landmark-strategy", choices=("fps", "random"), default="fps")
    p.add_argument("--rescale", action="store_true", help="keep projected edge lengths")
    p.add_argument("--mutual", action="store_true", help="mutual k-NN graph instead of union")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=0, help="worker cap, 0 = all cores")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptu", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="compute a low-dimensional embedding")
    _pipeline_args(p)
    p.add_argument("--spectra", help="write per-point neighbourhood singular values here")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("geodesics", help="write the pairwise geodesic distance matrix")
    _pipeline_args(p)
    p.add_argument("--hops", help="also write shortest-path edge counts")
    p.set_defaults(func=cmd_geodesics)

    p = sub.add_parser("generate", help="sample a synthetic dataset")
    p.add_argument("name", choices=sorted(GENERATORS))
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", help="gaussian:S | sparse:F,A,S (swissroll) or S (petals)")
    p.add_argument("--hole", help="lo,hi pairs in intrinsic coordinates, or 'default' (sshape)")
    p.add_argument("--D", type=int, default=None, help="ambient dimension (flat)")
    p.add_argument("--d", type=int, default=2, help="intrinsic dimension (flat)")
    p.add_argument("--density-warp", type=float, default=None)
    p.add_argument("--petal-count", type=int, default=4)
    p.add_argument("--cap-angle", type=float, default=np.pi / 3)
    p.add_argument("--curved", action="store_true")
    p.add_argument("--lift", type=int, default=0, help="zero-pad and rotate into this dimension")
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="write ground-truth intrinsic coordinates here")
    p.add_argument("--distances", help="write reference pairwise distances here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="score an embedding or a distance matrix")
    p.add_argument("--embedding")
    p.add_argument("--truth", help="ground-truth coordinates CSV")
    p.add_argument("--distances", help="target distances for stress")
    p.add_argument("--geodesics", help="estimated distance matrix CSV")
    p.add_argument("--truth-distances", help="reference distance matrix CSV")
    p.add_argument("--hops", help="hop counts CSV for per-length breakdown")
    p.add_argument("--per-point", help="write per-point errors here")
    p.add_argument("--report", help="also write the report to this file")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    start = time.perf_counter()
    try:
        status = args.func(args)
    except (UsageError, InvalidParam) as exc:
        print(f"ptu {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PTUError as exc:
        print(f"ptu {args.command}: error [{exc.stage}]: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError) as exc:
        print(f"ptu {args.command}: error [io]: {exc}", file=sys.stderr)
        return EXIT_FAIL
    log.info("%s finished in %.2fs", args.command, time.perf_counter() - start)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
