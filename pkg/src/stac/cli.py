"""Command-line interface: ``stac {phantom,sdf,augment,stats,metrics,verify}``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 validation/domain
error, 4 verify-suite failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .deform import AugmentParams
from .exceptions import DomainError, VolumeIOError
from .grid import LabelVolume, ScalarVolume
from .io import file_digest, read_volume, write_json, write_volume
from .metrics import average_surface_distance, class_histogram, dice, select_minority
from .phantom import PRESETS, generate, make_spec
from .sdf import configure_threads, signed_distance
from .validation import parse_class_list
from .warp import augment_pair, augment_with_sdf

log = logging.getLogger("stac")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _triple(cast):
    def parse(text: str):
        parts = [p for p in text.replace("x", ",").split(",") if p.strip()]
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected 3 comma-separated values, got {text!r}")
        try:
            return tuple(cast(p) for p in parts)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stac", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"stac {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ph = sub.add_parser("phantom", help="generate a synthetic image/label pair")
    ph.add_argument("--preset", choices=PRESETS, required=True)
    ph.add_argument("--dims", type=_triple(int))
    ph.add_argument("--seed", type=int, default=0)
    ph.add_argument("--spacing", type=_triple(float), default=(1.0, 1.0, 1.0))
    ph.add_argument("--radius", type=float, help="sphere radius / majority radius (voxels)")
    ph.add_argument("--minority-radius", type=float, help="multi_organ minority radius (voxels)")
    ph.add_argument("--semi-axes", type=_triple(float))
    ph.add_argument("--half-widths", type=_triple(float))
    ph.add_argument("--center", type=_triple(float))
    ph.add_argument("--noise", type=float, default=10.0, help="uniform noise amplitude")
    ph.add_argument("--out-image", required=True)
    ph.add_argument("--out-label", required=True)

    sd = sub.add_parser("sdf", help="signed distance of a class set")
    sd.add_argument("--label", required=True)
    sd.add_argument("--classes", required=True)
    sd.add_argument("--boundary", choices=("voxel", "midpoint"), default="voxel")
    sd.add_argument("--out", required=True)

    au = sub.add_parser("augment", help="enlarge minority classes of an image/label pair")
    au.add_argument("--image", required=True)
    au.add_argument("--label", required=True)
    au.add_argument("--minority", required=True,
                    help="auto:fraction:T, auto:bottom:K, or a class list like 2,5")
    au.add_argument("--alpha", type=float, default=1.0)
    au.add_argument("--beta", type=float, default=-1.0)
    au.add_argument("--shrink", action="store_true", help="shrink instead of enlarge")
    au.add_argument("--literal-sign", "--literal-eq4-sign", dest="literal_sign", action="store_true",
                    help="sample at p + W*grad(phi), which shrinks instead of enlarging")
    au.add_argument("--boundary", choices=("voxel", "midpoint"), default="midpoint")
    au.add_argument("--sdf-in", help="externally predicted SDF (.mhd) driving the deformation")
    au.add_argument("--out-image", required=True)
    au.add_argument("--out-label", required=True)
    au.add_argument("--provenance", help="sidecar path (default: <out-image>.provenance.json)")

    st = sub.add_parser("stats", help="class histogram and minority selection")
    st.add_argument("--label", required=True)
    st.add_argument("--minority", default="auto:fraction:0.01")
    st.add_argument("--json", required=True)

    me = sub.add_parser("metrics", help="Dice and average surface distance")
    me.add_argument("--pred", required=True)
    me.add_argument("--ref", required=True)
    me.add_argument("--classes", required=True)
    me.add_argument("--json", required=True)

    sub.add_parser("verify", help="run the embedded oracle checks")
    return p


def _read(path, kind):
    vol = read_volume(path)
    if not isinstance(vol, kind):
        expected = "MET_UCHAR label" if kind is LabelVolume else "MET_FLOAT scalar"
        raise DomainError(f"{path} is not a {expected} volume")
    return vol


def resolve_minority(text: str, label: LabelVolume):
    """Turn a CLI minority argument into (class tuple, policy string or None)."""
    if text.startswith("auto:"):
        policy = text[len("auto:"):]
        return select_minority(class_histogram(label), policy), policy
    return parse_class_list(text), None


def cmd_phantom(args) -> int:
    spec = make_spec(args.preset, dims=args.dims, seed=args.seed, spacing=args.spacing,
                     radius=args.radius, minority_radius=args.minority_radius,
                     semi_axes=args.semi_axes, half_widths=args.half_widths,
                     center=args.center, noise=args.noise)
    ph = generate(spec)
    write_volume(ph.image, args.out_image)
    write_volume(ph.label, args.out_label)
    return EXIT_OK


def cmd_sdf(args) -> int:
    label = _read(args.label, LabelVolume)
    phi = signed_distance(label, parse_class_list(args.classes), boundary=args.boundary)
    write_volume(phi, args.out)
    return EXIT_OK


def cmd_augment(args) -> int:
    image = _read(args.image, ScalarVolume)
    label = _read(args.label, LabelVolume)
    params = AugmentParams(alpha=args.alpha, beta=args.beta, enlarge=not args.shrink,
                           literal_sign=args.literal_sign, boundary=args.boundary)
    minority, policy = resolve_minority(args.minority, label)
    sources = {"image": file_digest(args.image), "label": file_digest(args.label)}
    if args.sdf_in:
        phi = _read(args.sdf_in, ScalarVolume)
        sources["sdf"] = file_digest(args.sdf_in)
        pair = augment_with_sdf(image, label, phi, params, minority=minority, sources=sources)
    else:
        pair = augment_pair(image, label, minority, params, sources=sources)
    provenance = dict(pair.provenance, minority_policy=policy)
    sidecar = args.provenance or str(Path(args.out_image).with_suffix(".provenance.json"))
    write_volume(pair.image, args.out_image)
    write_volume(pair.label, args.out_label)
    write_json(provenance, sidecar)
    return EXIT_OK


def cmd_stats(args) -> int:
    label = _read(args.label, LabelVolume)
    stats = class_histogram(label)
    if stats.foreground:
        minority, _ = resolve_minority(args.minority, label)
        stats = stats.with_minority(minority)
    write_json(stats.to_dict(), args.json)
    return EXIT_OK


def cmd_metrics(args) -> int:
    pred = _read(args.pred, LabelVolume)
    ref = _read(args.ref, LabelVolume)
    classes = parse_class_list(args.classes)
    report = {
        "dice": {str(c): dice(pred, ref, c) for c in classes},
        "asd_mm": {str(c): average_surface_distance(pred, ref, c) for c in classes},
    }
    write_json(report, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all
    results = run_all()
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


COMMANDS = {
    "phantom": cmd_phantom, "sdf": cmd_sdf, "augment": cmd_augment,
    "stats": cmd_stats, "metrics": cmd_metrics, "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    configure_threads()
    try:
        return COMMANDS[args.command](args)
    except VolumeIOError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except DomainError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_DOMAIN
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
