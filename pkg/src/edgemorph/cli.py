"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments, 2 I/O or parse failure,
3 pipeline error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import classical, fileformats, morph, pnm, skeleton
from .grid import EdgeSet, build_grid, edgeset_to_image, image_to_edgeset
from .sgraph import BUILTIN_NAMES, SGraphParseError, StructuringGraph, builtin, parse_sgraph

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PIPELINE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _threshold(text: str) -> int:
    value = int(text)
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError("threshold must be in 0..255")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edgemorph", description="Edge-based graph morphology on pixel grids.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    raster_in = _Parser(add_help=False)
    raster_in.add_argument("input", help="PBM/PGM image or GME1 edge file")
    raster_in.add_argument("-o", "--output", required=True)
    raster_in.add_argument("--threshold", type=_threshold, default=128,
                           help="PGM gray level at or above which a pixel is foreground")

    graph = _Parser(add_help=False)
    graph.add_argument("--connectivity", choices=("4", "8"), default="8")
    graph.add_argument("--sgraph", default="grid3",
                       help=f"builtin ({', '.join(BUILTIN_NAMES)}) or path to a structuring graph file")
    graph.add_argument("--vacuous", choices=("include", "exclude"), default="include")

    out_fmt = _Parser(add_help=False)
    out_fmt.add_argument("--format", choices=("pbm", "pgm", "edges"), default="pbm")

    for name in ("dilate", "erode", "open", "close"):
        p = sub.add_parser(name, parents=[raster_in, graph, out_fmt])
        if name == "open":
            p.add_argument("--opening", choices=("adjoint", "structural"), default="adjoint")

    p = sub.add_parser("skeletonize", parents=[raster_in, graph],
                       help="write a skeleton decomposition file")
    p.add_argument("--max-iter", type=_positive)
    p.add_argument("--render", help="also write the skeleton as an image")
    p.add_argument("--label-scales", action="store_true",
                   help="render as PGM holding 1 + smallest layer index per pixel")

    p = sub.add_parser("reconstruct", parents=[out_fmt])
    p.add_argument("input", help="decomposition file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--k", type=_nonnegative, default=0)

    p = sub.add_parser("distmap", parents=[raster_in],
                       help="erosion-count distance map as PGM")
    p.add_argument("--connectivity", choices=("4", "8"), default="8")
    p.add_argument("--sgraph", default="triangle_odd")
    p.add_argument("--vacuous", choices=("include", "exclude"), default="include")
    p.add_argument("--max-iter", type=_positive)

    p = sub.add_parser("skel-dt", parents=[raster_in], help="distance-map skeleton as PBM")
    p.add_argument("--variant", choices=("odd", "even"), default="odd")
    p.add_argument("--vacuous", choices=("include", "exclude"), default="exclude")
    p.add_argument("--max-iter", type=_positive)

    p = sub.add_parser("check-connected", help="is OUTPUT a connected-operator result of INPUT?")
    p.add_argument("input")
    p.add_argument("result")
    p.add_argument("--connectivity", choices=("4", "8"), default="8")
    p.add_argument("--threshold", type=_threshold, default=128)

    p = sub.add_parser("classical-skel", parents=[raster_in], help="pixel skeleton layers file")
    p.add_argument("--se", choices=("cross3", "box3"), default="box3")
    p.add_argument("--render", help="also write the skeleton union as PBM")

    p = sub.add_parser("classical-recon")
    p.add_argument("input", help="pixel skeleton layers file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--k", type=_nonnegative, default=0)
    return parser


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _read_text(path: str) -> str:
    try:
        return _read_bytes(path).decode("ascii")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not an ASCII text file") from None


def _write_atomic(path: str, data) -> None:
    if isinstance(data, str):
        data = data.encode("ascii")
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{target.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _load_raster(path: str, threshold: int) -> np.ndarray:
    data = _read_bytes(path)
    try:
        if data.startswith(b"GME1"):
            return edgeset_to_image(fileformats.read_edges(data.decode("ascii")))
        return pnm.read_pnm(data).binary(threshold)
    except (pnm.PNMError, fileformats.FormatError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_edges(path: str, threshold: int, connectivity: str) -> EdgeSet:
    data = _read_bytes(path)
    try:
        if data.startswith(b"GME1"):
            return fileformats.read_edges(data.decode("ascii"))
        img = pnm.read_pnm(data).binary(threshold)
    except (pnm.PNMError, fileformats.FormatError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    grid = build_grid(img.shape[1], img.shape[0], int(connectivity))
    return image_to_edgeset(img, grid)


def _load_sgraph(spec: str) -> StructuringGraph:
    try:
        return builtin(spec)
    except KeyError:
        pass
    if not os.path.exists(spec):
        raise UsageError(f"--sgraph {spec!r} is neither a builtin ({', '.join(BUILTIN_NAMES)}) nor a file")
    try:
        return parse_sgraph(_read_text(spec), name=Path(spec).stem)
    except SGraphParseError as exc:
        raise InputError(f"{spec}: {exc}") from None


def _raster_bytes(img: np.ndarray, fmt: str) -> bytes:
    if fmt == "pgm":
        return pnm.write_pgm(np.where(img, 255, 0), 255)
    return pnm.write_pbm(img)


def _emit_edges(es: EdgeSet, path: str, fmt: str) -> None:
    if fmt == "edges":
        _write_atomic(path, fileformats.write_edges(es))
    else:
        _write_atomic(path, _raster_bytes(edgeset_to_image(es), fmt))


def _cmd_morph(args) -> int:
    m = _load_edges(args.input, args.threshold, args.connectivity)
    sg = _load_sgraph(args.sgraph)
    if args.command == "dilate":
        out = morph.dilate(m, sg)
    elif args.command == "erode":
        out = morph.erode(m, sg, policy=args.vacuous)
    elif args.command == "close":
        out = morph.close_adjoint(m, sg, policy=args.vacuous)
    elif args.opening == "structural":
        out = morph.open_structural(m, sg)
    else:
        out = morph.open_adjoint(m, sg, policy=args.vacuous)
    _emit_edges(out, args.output, args.format)
    return EXIT_OK


def _cmd_skeletonize(args) -> int:
    m = _load_edges(args.input, args.threshold, args.connectivity)
    sg = _load_sgraph(args.sgraph)
    d = skeleton.skeletonize(m, sg, policy=args.vacuous, max_iter=args.max_iter)
    _write_atomic(args.output, fileformats.write_decomposition(d))
    if args.render:
        if args.label_scales:
            labels = d.scale_labels()
            _write_atomic(args.render, pnm.write_pgm(labels, max(1, int(labels.max()))))
        else:
            _write_atomic(args.render, pnm.write_pbm(edgeset_to_image(d.skeleton())))
    print(f"{d.depth} layers, termination {d.termination.value}", file=sys.stderr)
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    try:
        d = fileformats.read_decomposition(_read_text(args.input))
    except (fileformats.FormatError, SGraphParseError) as exc:
        raise InputError(f"{args.input}: {exc}") from None
    _emit_edges(skeleton.reconstruct(d, k=args.k), args.output, args.format)
    return EXIT_OK


def _cmd_distmap(args) -> int:
    m = _load_edges(args.input, args.threshold, args.connectivity)
    sg = _load_sgraph(args.sgraph)
    dm = skeleton.distance_map(m, sg, policy=args.vacuous, max_iter=args.max_iter)
    finite = dm.values[dm.finite]
    top = min(65535, max(1, int(finite.max(initial=0)) + 1))
    # unresolved pixels get the top gray level
    values = np.where(dm.finite, np.minimum(dm.values, top), top)
    _write_atomic(args.output, pnm.write_pgm(values, top))
    return EXIT_OK


def _cmd_skel_dt(args) -> int:
    img = _load_raster(args.input, args.threshold)
    out = skeleton.skeleton_by_distance(img, args.variant, policy=args.vacuous, max_iter=args.max_iter)
    _write_atomic(args.output, pnm.write_pbm(out))
    return EXIT_OK


def _cmd_check_connected(args) -> int:
    a = _load_raster(args.input, args.threshold)
    b = _load_raster(args.result, args.threshold)
    if a.shape != b.shape:
        raise UsageError(f"images differ in size: {a.shape} vs {b.shape}")
    res = morph.check_connected_instance(a, b, int(args.connectivity))
    if res.connected:
        print("connected")
    else:
        pixels = np.argwhere(res.witness)
        r0, c0 = pixels.min(axis=0)
        r1, c1 = pixels.max(axis=0)
        print(f"not connected: input zone of {len(pixels)} pixels at rows {r0}..{r1}, "
              f"cols {c0}..{c1} is split by the result")
    return EXIT_OK


def _cmd_classical_skel(args) -> int:
    img = _load_raster(args.input, args.threshold)
    skel = classical.skel_px(img, args.se)
    _write_atomic(args.output, fileformats.write_pixel_skeleton(skel))
    if args.render:
        _write_atomic(args.render, pnm.write_pbm(skel.union()))
    return EXIT_OK


def _cmd_classical_recon(args) -> int:
    try:
        skel = fileformats.read_pixel_skeleton(_read_text(args.input))
    except fileformats.FormatError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    _write_atomic(args.output, pnm.write_pbm(classical.recon_px(skel, args.k)))
    return EXIT_OK


_COMMANDS = {
    "dilate": _cmd_morph,
    "erode": _cmd_morph,
    "open": _cmd_morph,
    "close": _cmd_morph,
    "skeletonize": _cmd_skeletonize,
    "reconstruct": _cmd_reconstruct,
    "distmap": _cmd_distmap,
    "skel-dt": _cmd_skel_dt,
    "check-connected": _cmd_check_connected,
    "classical-skel": _cmd_classical_skel,
    "classical-recon": _cmd_classical_recon,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"edgemorph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"edgemorph: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"edgemorph: error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


def main() -> None:
    sys.exit(run())
