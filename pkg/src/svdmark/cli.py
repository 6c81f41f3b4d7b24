"""Command-line interface: ``svdmark {keygen,embed,extract,attack,bench,psnr}``.

Exit codes: 0 success, 1 validation error, 2 capacity error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import attacks, bench, codec
from .image_io import load_pgm, save_pgm
from .metrics import DegenerateCorrelation, correlation, load_mark, psnr

log = logging.getLogger("svdmark")

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with the capacity code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _fmt_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"


def cmd_keygen(args) -> int:
    img = load_pgm(args.image)
    key = codec.generate_key(img, args.seed, args.gap_e)
    codec.save_key(key, args.out)
    log.info("wrote key with %d blocks to %s", key.n_bits, args.out)
    return EXIT_OK


def cmd_embed(args) -> int:
    img = load_pgm(args.image)
    mark = load_mark(args.mark)
    key = codec.load_key(args.key)
    marked = codec.embed(img, mark, key)
    save_pgm(marked, args.out)
    print(f"PSNR={_fmt_psnr(psnr(img, marked).psnr)} dB")
    if args.figure:
        from .plotting import render_embedding_figure

        render_embedding_figure(img, marked, args.figure)
    return EXIT_OK


def cmd_extract(args) -> int:
    img = load_pgm(args.image)
    key = codec.load_key(args.key)
    found = codec.extract(img, key)
    print(found.to_string())
    if args.reference:
        ref = load_mark(args.reference)
        try:
            print(f"corr={correlation(ref, found):.4f}")
        except DegenerateCorrelation:
            print("corr=degenerate")
    return EXIT_OK


def _attack_spec(args) -> attacks.AttackSpec:
    params = {}
    if args.kind == "jpeg":
        params["quality"] = args.quality
    elif args.kind == "level_reduce":
        params["levels"] = args.levels
    elif args.kind == "salt_pepper":
        params["density"] = args.density
    elif args.kind == "gaussian_noise":
        params["sigma"] = args.sigma
    return attacks.AttackSpec(args.kind, params, args.noise_seed)


def cmd_attack(args) -> int:
    img = load_pgm(args.image)
    out = _attack_spec(args).apply(img)
    save_pgm(out, args.out)
    print(f"PSNR={_fmt_psnr(psnr(img, out).psnr)} dB")
    return EXIT_OK


def cmd_bench(args) -> int:
    img = load_pgm(args.image)
    mark = load_mark(args.mark)
    key = codec.load_key(args.key)
    suite = bench.load_suite(args.suite) if args.suite else bench.default_suite(args.noise_seed)
    name = Path(args.image).stem
    watermarked, rows = bench.run_bench(img, mark, key, suite, name, args.threshold)
    Path(args.out).write_text(bench.rows_to_csv(rows), encoding="ascii")
    print(f"PSNR={_fmt_psnr(psnr(img, watermarked).psnr)} dB")
    for row in rows:
        fields = row.csv_fields()
        print(f"{fields[1]:<18} {fields[2]:<22} corr={fields[4]:<10} detected={fields[5]}")
    if args.figures:
        from .plotting import render_bench_figures

        for path in render_bench_figures(rows, mark, args.figures, args.threshold):
            log.info("wrote %s", path)
    return EXIT_OK


def cmd_psnr(args) -> int:
    rep = psnr(load_pgm(args.original), load_pgm(args.modified))
    print(f"PSNR={_fmt_psnr(rep.psnr)} dB")
    print(f"EQM={rep.eqm:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="svdmark", description="Blind SVD watermarking of grayscale PGM images.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("keygen", help="select key blocks satisfying the gap condition")
    k.add_argument("image")
    k.add_argument("--seed", type=int, default=1)
    k.add_argument("--gap-e", type=float, default=codec.DEFAULT_GAP)
    k.add_argument("--out", required=True)
    k.set_defaults(func=cmd_keygen)

    e = sub.add_parser("embed", help="embed a 64-bit mark")
    e.add_argument("image")
    e.add_argument("mark")
    e.add_argument("key")
    e.add_argument("--out", required=True)
    e.add_argument("--figure", help="also render original/watermarked/difference PNG")
    e.set_defaults(func=cmd_embed)

    x = sub.add_parser("extract", help="blind extraction")
    x.add_argument("image")
    x.add_argument("key")
    x.add_argument("--reference", help="mark file to correlate against")
    x.set_defaults(func=cmd_extract)

    a = sub.add_parser("attack", help="apply a single attack")
    a.add_argument("image")
    a.add_argument("--kind", required=True, choices=sorted(attacks.ATTACKS))
    a.add_argument("--quality", type=int, default=75)
    a.add_argument("--levels", type=int, default=32)
    a.add_argument("--density", type=float, default=0.01)
    a.add_argument("--sigma", type=float, default=3.0)
    a.add_argument("--noise-seed", type=int, default=0)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_attack)

    b = sub.add_parser("bench", help="robustness report over an attack suite")
    b.add_argument("image")
    b.add_argument("mark")
    b.add_argument("key")
    b.add_argument("--suite", help="JSON suite config (default: built-in battery)")
    b.add_argument("--threshold", type=float, default=bench.DEFAULT_THRESHOLD)
    b.add_argument("--noise-seed", type=int, default=0)
    b.add_argument("--out", required=True, help="CSV destination")
    b.add_argument("--figures", help="directory for PNG figures")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("psnr", help="fidelity between two images")
    s.add_argument("original")
    s.add_argument("modified")
    s.set_defaults(func=cmd_psnr)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except codec.CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
