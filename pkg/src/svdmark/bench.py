"""Robustness bench: embed once, attack, extract, tabulate."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .attacks import AttackError, AttackSpec
from .codec import EmbedKey, embed, extract
from .image_io import GrayImage
from .metrics import DegenerateCorrelation, Mark, correlation, psnr

DEFAULT_THRESHOLD = 0.7
CSV_HEADER = ("image", "attack", "params", "psnr_db", "correlation", "detected")


class SuiteError(ValueError):
    pass


def default_suite(noise_seed: int = 0) -> list[AttackSpec]:
    suite = [AttackSpec("none")]
    suite += [AttackSpec("jpeg", {"quality": q}) for q in range(100, 0, -10)]
    suite += [
        AttackSpec("histogram_stretch"),
        AttackSpec("level_reduce", {"levels": 32}),
        AttackSpec("median3"),
        AttackSpec("salt_pepper", {"density": 0.01}, noise_seed),
        AttackSpec("gaussian_noise", {"sigma": 3.0}, noise_seed),
    ]
    return suite


def parse_suite(config: dict[str, Any]) -> list[AttackSpec]:
    """Expand a suite config into attack specs, preserving config order.

    ``{"noise_seed": 0, "attacks": [{"kind": "jpeg", "quality": [90, 50]}, ...]}``;
    list-valued parameters expand into one spec per combination.
    """
    if not isinstance(config, dict) or not isinstance(config.get("attacks"), list):
        raise SuiteError("suite config needs an 'attacks' list")
    default_seed = int(config.get("noise_seed", 0))
    specs = []
    for i, entry in enumerate(config["attacks"]):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise SuiteError(f"attacks[{i}] must be an object with a 'kind'")
        entry = dict(entry)
        kind = entry.pop("kind")
        seed = int(entry.pop("noise_seed", default_seed))
        names = list(entry)
        grids = [v if isinstance(v, list) else [v] for v in entry.values()]
        for combo in itertools.product(*grids):
            try:
                specs.append(AttackSpec(kind, dict(zip(names, combo)), seed))
            except AttackError as exc:
                raise SuiteError(f"attacks[{i}]: {exc}") from None
    return specs


def load_suite(path: str | Path) -> list[AttackSpec]:
    try:
        config = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SuiteError(f"{path}: invalid JSON ({exc})") from None
    return parse_suite(config)


@dataclass(frozen=True)
class BenchReportRow:
    image: str
    attack: AttackSpec
    psnr_db: float
    correlation: float | None  # None when the extracted mark is constant
    detected: bool
    extracted: Mark

    def csv_fields(self) -> list[str]:
        psnr_txt = "inf" if math.isinf(self.psnr_db) else f"{self.psnr_db:.4f}"
        corr_txt = "degenerate" if self.correlation is None else f"{self.correlation:.4f}"
        return [
            self.image,
            self.attack.kind,
            self.attack.describe(),
            psnr_txt,
            corr_txt,
            "true" if self.detected else "false",
        ]


def evaluate(
    watermarked: GrayImage,
    mark: Mark,
    key: EmbedKey,
    spec: AttackSpec,
    image_name: str = "image",
    threshold: float = DEFAULT_THRESHOLD,
) -> BenchReportRow:
    attacked = spec.apply(watermarked)
    found = extract(attacked, key)
    try:
        corr: float | None = correlation(mark, found)
    except DegenerateCorrelation:
        corr = None
    detected = corr is not None and corr >= threshold
    return BenchReportRow(
        image_name, spec, psnr(watermarked, attacked).psnr, corr, detected, found
    )


def run_bench(
    original: GrayImage,
    mark: Mark,
    key: EmbedKey,
    suite: Sequence[AttackSpec] | None = None,
    image_name: str = "image",
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[GrayImage, list[BenchReportRow]]:
    """Embed ``mark`` once, then evaluate every attack in ``suite`` in order."""
    suite = default_suite() if suite is None else list(suite)
    watermarked = embed(original, mark, key)
    rows = [evaluate(watermarked, mark, key, spec, image_name, threshold) for spec in suite]
    return watermarked, rows


def rows_to_csv(rows: Iterable[BenchReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()
