"""Command line front end: ``cnrnn extract | benchmark | synth``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import CnrnnError, NumericalError
from .evaluation import DEFAULT_SHRINKAGE, EvalReport, loocv
from .imagery import SplitMix64, load_dataset, synth_texture, write_pgm
from .rnn import DEFAULT_LAMBDA
from .signature import PRESETS, SignatureConfig, extract_many, resolve_preset, signature_csv

log = logging.getLogger("cnrnn")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_PRESET = "theta-4/4-9-14"

# (kind, period, noise amplitude) per synthetic class family
SYNTH_FAMILIES = (
    ("checker", 4, 40),
    ("stripes", 3, 40),
    ("blob-noise", 8, 25),
    ("gradient-noise", 16, 25),
)


class UsageError(CnrnnError):
    exit_code = EXIT_USAGE


@dataclass
class RunConfig:
    dataset_root: Path
    signature: SignatureConfig
    tile: tuple | None = None
    shrinkage: float = DEFAULT_SHRINKAGE
    output: Path | None = None
    threads: int = 1
    skip_bad: bool = False


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _extract_rows(config: RunConfig):
    dataset = load_dataset(config.dataset_root, config.tile, config.skip_bad)
    images = [s.image for s in dataset.samples]
    log.info("extracting %s from %d images", config.signature.name, len(images))
    feats = extract_many(images, config.signature, config.threads)
    return dataset, feats


def cmd_extract(config: RunConfig) -> str:
    """Write one CSV row per (image, tile); returns the CSV text."""
    dataset, feats = _extract_rows(config)
    rows = (
        (s.source_path, s.tile_index, dataset.class_names[s.class_id], f)
        for s, f in zip(dataset.samples, feats)
    )
    text = signature_csv(rows)
    if config.output is not None:
        Path(config.output).write_text(text)
    return text


def cmd_benchmark(config: RunConfig) -> EvalReport:
    dataset, feats = _extract_rows(config)
    report = loocv(feats, dataset.labels, config.shrinkage, dataset.class_names)
    if config.output is not None:
        out = Path(config.output)
        out.write_text(report.to_keyvalue())
        out.with_name(out.stem + ".confusion.csv").write_text(report.confusion_csv())
    return report


def cmd_synth(out_dir, classes: int, per_class: int, seed: int, size: int = 64) -> list:
    """Write ``class_i/sample_j.pgm`` textures; class ``i`` uses family ``i mod 4``.

    Classes beyond the four base families reuse them with a longer period.
    Each sample gets its own noise seed and a random pattern phase.
    """
    if classes < 1 or per_class < 1:
        raise UsageError("classes and per_class must be >= 1")
    out_dir = Path(out_dir)
    cw, sw = len(str(classes - 1)), len(str(per_class - 1))
    root = SplitMix64(seed)
    written = []
    for i in range(classes):
        kind, period, noise = SYNTH_FAMILIES[i % len(SYNTH_FAMILIES)]
        period *= 1 + i // len(SYNTH_FAMILIES)
        cdir = out_dir / f"class_{i:0{cw}d}"
        try:
            cdir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CnrnnError(f"cannot create {cdir}: {exc}") from exc
        crng = root.fork(i)
        for j in range(per_class):
            srng = crng.fork(j)
            dx, dy = (int(v) for v in srng.integers(0, 2 * period - 1, 2))
            sample_seed = int(srng.next_u64(1)[0])
            img = synth_texture(kind, period, noise, sample_seed, size, offset=(dx, dy))
            path = cdir / f"sample_{j:0{sw}d}.pgm"
            try:
                write_pgm(img, path)
            except OSError as exc:
                raise CnrnnError(f"cannot write {path}: {exc}") from exc
            written.append(path)
    return written


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _tile(text):
    try:
        w, h = str(text).lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _threads(text):
    if str(text) == "auto":
        return os.cpu_count() or 1
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1 or 'auto'")
    return n


def _bool(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# key in a --config file -> (argparse dest, converter)
_CONFIG_KEYS = {
    "preset": ("preset", str),
    "radii": ("radii", _int_list),
    "qs": ("qs", _int_list),
    "lambda": ("lam", float),
    "shrinkage": ("shrinkage", float),
    "tile": ("tile", _tile),
    "output": ("output", Path),
    "threads": ("threads", _threads),
    "skip-bad": ("skip_bad", _bool),
    "skip_bad": ("skip_bad", _bool),
    "ties": ("ties", str),
}


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines (``#`` comments allowed) into argparse dests."""
    values = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        dest, conv = _CONFIG_KEYS[key]
        try:
            values[dest] = conv(val)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}:{n}: bad value for {key}: {exc}") from None
    return values


def _add_run_flags(p):
    p.add_argument("dataset_root", type=Path, help="directory laid out as root/<class>/*.pgm")
    p.add_argument("--config", type=Path, help="key=value file; command-line flags take precedence")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--radii", type=_int_list, default=None, help="one radius (theta) or two (psi), e.g. 4,6")
    p.add_argument("--qs", type=_int_list, default=None, help="hidden neuron counts, e.g. 4,9,14")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help=f"ridge term (default {DEFAULT_LAMBDA})")
    p.add_argument("--ties", choices=("bidirectional", "none"), default=None)
    p.add_argument("--shrinkage", type=float, default=None, help=f"LDA shrinkage (default {DEFAULT_SHRINKAGE})")
    p.add_argument("--tile", type=_tile, default=None, metavar="WxH")
    p.add_argument("--output", type=Path, default=None)
    p.add_argument("--threads", type=_threads, default=None, help="integer or 'auto'")
    p.add_argument("--skip-bad", dest="skip_bad", action="store_const", const=True, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cnrnn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_run_flags(sub.add_parser("extract", help="write signatures as CSV"))
    _add_run_flags(sub.add_parser("benchmark", help="leave-one-out LDA accuracy"))
    s = sub.add_parser("synth", help="generate a synthetic texture corpus")
    s.add_argument("out_dir", type=Path)
    s.add_argument("--classes", type=int, default=4)
    s.add_argument("--per-class", dest="per_class", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int, default=64)
    return parser


def _signature_config(opts) -> SignatureConfig:
    lam = DEFAULT_LAMBDA if opts.get("lam") is None else opts["lam"]
    ties = opts.get("ties") or "bidirectional"
    radii, qs = opts.get("radii"), opts.get("qs")
    base = resolve_preset(opts.get("preset") or DEFAULT_PRESET)
    if radii is None and qs is None and opts.get("lam") is None and ties == base.ties:
        return base
    radii = radii or base.radii
    qs = qs or base.q_list
    mode = "psi" if len(radii) == 2 else "theta"
    return SignatureConfig(mode, radii, qs, lam, ties)


def run_config_from_args(args) -> RunConfig:
    opts = {}
    if args.config is not None:
        opts.update(read_config_file(args.config))
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    try:
        sig = _signature_config(opts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(
        dataset_root=args.dataset_root,
        signature=sig,
        tile=opts.get("tile"),
        shrinkage=DEFAULT_SHRINKAGE if opts.get("shrinkage") is None else opts["shrinkage"],
        output=opts.get("output"),
        threads=opts.get("threads") or 1,
        skip_bad=bool(opts.get("skip_bad")),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "synth":
            paths = cmd_synth(args.out_dir, args.classes, args.per_class, args.seed, args.size)
            print(f"wrote {len(paths)} images to {args.out_dir}")
            return EXIT_OK
        config = run_config_from_args(args)
        if args.command == "extract":
            text = cmd_extract(config)
            if config.output is None:
                sys.stdout.write(text)
        else:
            report = cmd_benchmark(config)
            sys.stdout.write(report.to_table())
        return EXIT_OK
    except UsageError as exc:
        print(f"cnrnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"cnrnn: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CnrnnError, OSError) as exc:
        print(f"cnrnn: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"cnrnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
