"""Dataset curation: tight crops, class-consistent groups, leakage-free splits.

Input is a JSON-lines annotation file plus an image directory. Output is a
set of one-hot labeled image records, a group-level train/val/test split and
nested training fractions, all deterministic under a seed.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, CurationError

logger = logging.getLogger(__name__)

CLASSES = ("shell", "glaze")

BBox = tuple[int, int, int, int]


@dataclass(frozen=True)
class Annotation:
    """One annotated defect region on one image."""

    image_id: str
    group_id: str
    bbox: BBox
    defect_labels: frozenset[str]

    def validate(self) -> None:
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise CurationError(
                f"degenerate bbox {self.bbox} on image {self.image_id!r}"
            )
        bad = self.defect_labels - set(CLASSES)
        if bad:
            raise CurationError(
                f"unknown defect labels {sorted(bad)} on image {self.image_id!r}"
            )


@dataclass(frozen=True)
class InsulatorGroup:
    """All images of one physical insulator, single class after curation."""

    group_id: str
    image_ids: tuple[str, ...]
    class_label: str


@dataclass(frozen=True)
class ImageRecord:
    """One curated, one-hot labeled crop reference."""

    image_id: str
    group_id: str
    label_vector: tuple[int, int]  # (shell, glaze)
    crop_box: BBox
    source_path: str

    @property
    def class_label(self) -> str:
        return CLASSES[self.label_vector.index(1)]


@dataclass(frozen=True)
class SplitAssignment:
    assignments: Mapping[str, str]  # group_id -> train | val | test
    seed: int
    ratios: tuple[float, float, float]

    def groups(self, split: str) -> list[str]:
        return sorted(g for g, s in self.assignments.items() if s == split)


@dataclass(frozen=True)
class FractionPlan:
    fractions: tuple[float, ...]
    subsets: Mapping[float, tuple[str, ...]]  # fraction -> group ids
    seed: int

    def group_ids(self, fraction: float) -> tuple[str, ...]:
        try:
            return self.subsets[fraction]
        except KeyError:
            raise ConfigError(
                f"fraction {fraction} not in plan {list(self.fractions)}"
            ) from None


def compute_tight_crop(
    annotations: Sequence[Annotation], *, image_id: str | None = None
) -> BBox:
    """Minimum enclosing rectangle over all annotation boxes of one image."""
    if not annotations:
        who = image_id if image_id is not None else "<unknown>"
        raise CurationError(f"no annotations to crop for image {who!r}")
    ids = {a.image_id for a in annotations}
    if len(ids) > 1:
        raise CurationError(f"annotations span multiple images: {sorted(ids)}")
    for a in annotations:
        a.validate()
    x0 = min(a.bbox[0] for a in annotations)
    y0 = min(a.bbox[1] for a in annotations)
    x1 = max(a.bbox[2] for a in annotations)
    y1 = max(a.bbox[3] for a in annotations)
    return (x0, y0, x1, y1)


def curate_groups(
    annotations: Iterable[Annotation],
) -> tuple[list[InsulatorGroup], list[tuple[str, str]]]:
    """Keep single-class groups only.

    Returns (curated groups, dropped) where dropped holds (group_id, reason)
    for every excluded group. Dual-defect groups and groups without any
    labeled image are dropped, never fatal.
    """
    by_group: dict[str, dict[str, set[str]]] = {}
    for a in annotations:
        images = by_group.setdefault(a.group_id, {})
        images.setdefault(a.image_id, set()).update(a.defect_labels)

    curated: list[InsulatorGroup] = []
    dropped: list[tuple[str, str]] = []
    for group_id in sorted(by_group):
        images = by_group[group_id]
        labels = set().union(*images.values()) if images else set()
        if not labels:
            reason = "no labeled images"
            logger.warning("dropping group %s: %s", group_id, reason)
            dropped.append((group_id, reason))
            continue
        if len(labels) > 1:
            reason = f"dual-defect labels {sorted(labels)}"
            logger.info("excluding group %s: %s", group_id, reason)
            dropped.append((group_id, reason))
            continue
        curated.append(
            InsulatorGroup(
                group_id=group_id,
                image_ids=tuple(sorted(images)),
                class_label=labels.pop(),
            )
        )
    if dropped:
        logger.info(
            "curation dropped %d of %d groups", len(dropped), len(by_group)
        )
    return curated, dropped


def _half_up(x: float) -> int:
    return math.floor(x + 0.5)


def group_split(
    groups: Sequence[InsulatorGroup | str],
    ratios: tuple[float, float, float] = (0.7, 0.1, 0.2),
    seed: int = 0,
) -> SplitAssignment:
    """Assign every group to exactly one of train/val/test.

    Counts are the half-up rounding of ratio x group count for val and test;
    the remainder goes to train. Assignment is a seeded permutation of the
    sorted group ids, so the result is deterministic.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must sum to 1.0, got {ratios}")
    ids = sorted(g if isinstance(g, str) else g.group_id for g in groups)
    if len(ids) != len(set(ids)):
        raise ConfigError("duplicate group ids in split input")
    n = len(ids)
    if n < 3:
        raise ConfigError(f"need at least 3 groups to split, got {n}")
    n_val = _half_up(ratios[1] * n)
    n_test = _half_up(ratios[2] * n)
    n_train = n - n_val - n_test
    if n_train < 1:
        raise ConfigError(f"ratios {ratios} leave no training groups for n={n}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    assignments = {g: "train" for g in ids[:n_train]}
    assignments.update({g: "val" for g in ids[n_train : n_train + n_val]})
    assignments.update({g: "test" for g in ids[n_train + n_val :]})
    return SplitAssignment(assignments=assignments, seed=seed, ratios=tuple(ratios))


def fraction_subsets(
    train_groups: Sequence[str],
    fractions: Sequence[float],
    seed: int = 0,
) -> FractionPlan:
    """Cumulative group subsets of the train split.

    Each subset takes the first ceil(fraction x n) ids of one seeded
    permutation, so smaller fractions are strict subsets of larger ones.
    """
    fracs = list(fractions)
    if fracs != sorted(fracs):
        raise ConfigError(f"fractions must be sorted ascending: {fracs}")
    for f in fracs:
        if not (0.0 < f <= 1.0):
            raise ConfigError(f"fraction {f} outside (0, 1]")
    ids = sorted(train_groups)
    rng = random.Random(seed)
    rng.shuffle(ids)
    subsets = {
        f: tuple(ids[: math.ceil(f * len(ids))]) for f in fracs
    }
    return FractionPlan(fractions=tuple(fracs), subsets=subsets, seed=seed)


# ---------------------------------------------------------------------------
# File formats: annotations.jsonl in, records.jsonl / splits.json /
# fractions.json out.

def load_annotations(path: Path) -> list[Annotation]:
    annotations = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            try:
                ann = Annotation(
                    image_id=row["image_id"],
                    group_id=row["group_id"],
                    bbox=tuple(int(v) for v in row["bbox"]),
                    defect_labels=frozenset(row.get("defect_labels", [])),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise CurationError(f"{path}:{lineno}: bad annotation row: {exc}")
            if ann.defect_labels:
                ann.validate()
            else:
                logger.warning("%s:%d: image %s has no defect labels",
                               path, lineno, ann.image_id)
            annotations.append(ann)
    return annotations


def build_records(
    annotations: Sequence[Annotation],
    groups: Sequence[InsulatorGroup],
    images_dir: Path,
) -> list[ImageRecord]:
    """Attach one-hot labels and tight crop boxes to every curated image."""
    by_image: dict[str, list[Annotation]] = {}
    for a in annotations:
        by_image.setdefault(a.image_id, []).append(a)
    records = []
    for group in groups:
        onehot = tuple(int(c == group.class_label) for c in CLASSES)
        for image_id in group.image_ids:
            source = _resolve_image(images_dir, image_id)
            crop = compute_tight_crop(by_image[image_id], image_id=image_id)
            records.append(
                ImageRecord(
                    image_id=image_id,
                    group_id=group.group_id,
                    label_vector=onehot,
                    crop_box=crop,
                    source_path=str(source),
                )
            )
    return records


def _resolve_image(images_dir: Path, image_id: str) -> Path:
    for ext in (".png", ".jpg", ".jpeg", ".bmp"):
        candidate = images_dir / f"{image_id}{ext}"
        if candidate.exists():
            return candidate
    raise CurationError(f"no image file for {image_id!r} under {images_dir}")


def write_records(records: Sequence[ImageRecord], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for r in records:
            fh.write(json.dumps({
                "image_id": r.image_id,
                "group_id": r.group_id,
                "label_vector": list(r.label_vector),
                "crop_box": list(r.crop_box),
                "source_path": r.source_path,
            }) + "\n")


def read_records(path: Path) -> list[ImageRecord]:
    records = []
    with path.open() as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            records.append(ImageRecord(
                image_id=row["image_id"],
                group_id=row["group_id"],
                label_vector=tuple(row["label_vector"]),
                crop_box=tuple(row["crop_box"]),
                source_path=row["source_path"],
            ))
    return records


def write_splits(split: SplitAssignment, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "seed": split.seed,
        "ratios": list(split.ratios),
        "assignments": {g: split.assignments[g] for g in sorted(split.assignments)},
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_splits(path: Path) -> SplitAssignment:
    payload = json.loads(path.read_text())
    return SplitAssignment(
        assignments=payload["assignments"],
        seed=payload["seed"],
        ratios=tuple(payload["ratios"]),
    )


def write_fractions(plan: FractionPlan, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "seed": plan.seed,
        "subsets": [
            {"fraction": f, "group_ids": list(plan.subsets[f])}
            for f in plan.fractions
        ],
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")


def read_fractions(path: Path) -> FractionPlan:
    payload = json.loads(path.read_text())
    subsets = {
        entry["fraction"]: tuple(entry["group_ids"])
        for entry in payload["subsets"]
    }
    return FractionPlan(
        fractions=tuple(sorted(subsets)),
        subsets=subsets,
        seed=payload["seed"],
    )
