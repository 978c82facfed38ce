"""Procedurally rendered toy inspection corpus.

Draws disc-insulator strings on noisy backgrounds with two visually distinct
defect styles: rim chunks missing (shell) and flush discoloration patches
with a light edge (glaze). Used by the offline test and demo paths; real
datasets enter the pipeline through the same annotations.jsonl format.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

PALETTE = {
    "brown": (124, 74, 48),
    "redbrown": (148, 66, 42),
    "gray": (128, 130, 134),
    "white": (214, 212, 204),
    "bluegray": (100, 114, 134),
}


@dataclass
class ToySummary:
    out_dir: Path
    groups: int
    images: int
    dual_defect_groups: int


def _background(rng: random.Random, size: int) -> Image.Image:
    top = tuple(rng.randint(110, 190) for _ in range(3))
    bottom = tuple(rng.randint(60, 150) for _ in range(3))
    col = np.linspace(top, bottom, size).astype(np.float32)
    arr = np.repeat(col[:, None, :], size, axis=1)
    noise = np.random.default_rng(rng.getrandbits(32)).normal(0, 9, arr.shape)
    arr = np.clip(arr + noise, 0, 255).astype(np.uint8)
    return Image.fromarray(arr, "RGB")


def _shade(color: tuple[int, int, int], factor: float) -> tuple[int, int, int]:
    return tuple(int(min(255, max(0, c * factor))) for c in color)


def _draw_string(
    draw: ImageDraw.ImageDraw,
    rng: random.Random,
    cx: int,
    top: int,
    disc_count: int,
    disc_w: int,
    disc_h: int,
    color: tuple[int, int, int],
) -> list[tuple[int, int, int, int]]:
    """Draw a vertical stack of discs; returns each disc's bounding box."""
    pin_w = max(3, disc_w // 7)
    spacing = disc_h + max(2, disc_h // 3)
    bottom = top + spacing * (disc_count - 1) + disc_h
    draw.rectangle(
        (cx - pin_w // 2, top - disc_h // 2, cx + pin_w // 2, bottom),
        fill=_shade(color, 0.45),
    )
    boxes = []
    for i in range(disc_count):
        y0 = top + i * spacing
        box = (cx - disc_w // 2, y0, cx + disc_w // 2, y0 + disc_h)
        draw.ellipse(box, fill=color, outline=_shade(color, 0.6))
        # simple top-light shading
        hl = (box[0] + disc_w // 5, y0 + 1, box[2] - disc_w // 5, y0 + disc_h // 3)
        draw.ellipse(hl, fill=_shade(color, 1.25))
        boxes.append(box)
    return boxes


def _shell_defect(
    img: Image.Image,
    draw: ImageDraw.ImageDraw,
    rng: random.Random,
    disc_box: tuple[int, int, int, int],
    background: Image.Image,
) -> None:
    """Remove a chunk of the disc rim and paint a light fracture edge."""
    x0, y0, x1, y1 = disc_box
    w = x1 - x0
    side = rng.choice((-1, 1))
    rim_x = x1 if side > 0 else x0
    cy = (y0 + y1) // 2 + rng.randint(-2, 2)
    r = rng.randint(max(4, w // 5), max(6, w // 3))
    bite = (rim_x - r, cy - r, rim_x + r, cy + r)
    patch = background.crop(bite)
    mask = Image.new("L", patch.size, 0)
    ImageDraw.Draw(mask).ellipse((0, 0, patch.width - 1, patch.height - 1), fill=255)
    img.paste(patch, bite[:2], mask)
    # fracture surface: clean light porcelain along the cut
    draw.arc(bite, 90 if side > 0 else 270, 270 if side > 0 else 450,
             fill=(235, 232, 224), width=2)


def _glaze_defect(
    draw: ImageDraw.ImageDraw,
    rng: random.Random,
    disc_box: tuple[int, int, int, int],
    base: tuple[int, int, int],
) -> None:
    """Flush discolored patch with a thin light edge inside the disc."""
    x0, y0, x1, y1 = disc_box
    w, h = x1 - x0, y1 - y0
    for _ in range(rng.randint(1, 2)):
        pw = rng.randint(max(6, w // 4), max(8, w // 2))
        ph = rng.randint(max(4, h // 2), max(5, h - 2))
        px = rng.randint(x0 + 2, max(x0 + 3, x1 - pw - 2))
        py = y0 + (h - ph) // 2
        patch = (px, py, px + pw, py + ph)
        matte = _shade((base[0] // 2 + 60, base[1] // 2 + 55, base[2] // 2 + 50),
                       rng.uniform(0.75, 0.95))
        draw.ellipse(patch, fill=matte, outline=(238, 236, 228), width=2)


def _render_image(
    rng: random.Random,
    size: int,
    color: tuple[int, int, int],
    disc_count: int,
    defects: set[str],
) -> tuple[Image.Image, tuple[int, int, int, int]]:
    img = _background(rng, size)
    background = img.copy()
    draw = ImageDraw.Draw(img)
    disc_w = rng.randint(size // 4, size // 3)
    disc_h = max(8, disc_w // 3)
    spacing = disc_h + max(2, disc_h // 3)
    height = spacing * (disc_count - 1) + disc_h
    cx = rng.randint(size // 3, 2 * size // 3)
    top = rng.randint(size // 10, max(size // 8, size - height - size // 10))
    boxes = _draw_string(draw, rng, cx, top, disc_count, disc_w, disc_h, color)

    if "shell" in defects:
        for disc in rng.sample(boxes, k=min(len(boxes), rng.randint(1, 2))):
            _shell_defect(img, draw, rng, disc, background)
    if "glaze" in defects:
        for disc in rng.sample(boxes, k=min(len(boxes), rng.randint(1, 2))):
            _glaze_defect(draw, rng, disc, color)

    brightness = rng.uniform(0.85, 1.15)
    arr = np.asarray(img, dtype=np.float32) * brightness
    img = Image.fromarray(np.clip(arr, 0, 255).astype(np.uint8), "RGB")

    x0 = max(0, cx - disc_w // 2 - rng.randint(2, 8))
    y0 = max(0, top - disc_h // 2 - rng.randint(2, 8))
    x1 = min(size - 1, cx + disc_w // 2 + rng.randint(2, 8))
    y1 = min(size - 1, top + height + rng.randint(2, 8))
    return img, (x0, y0, x1, y1)


def generate_toy_corpus(
    out_dir: Path,
    *,
    groups: int = 200,
    dual_defect_groups: int = 4,
    seed: int = 7,
    image_size: int = 160,
) -> ToySummary:
    """Write images/ and annotations.jsonl for a synthetic two-class corpus.

    Half the single-class groups carry shell-style defects, half glaze-style;
    dual_defect_groups carry both (curation is expected to drop them).
    """
    rng = random.Random(seed)
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    single = groups - dual_defect_groups
    plan = ["shell"] * (single // 2) + ["glaze"] * (single - single // 2)
    plan += ["dual"] * dual_defect_groups
    rng.shuffle(plan)

    rows = []
    image_count = 0
    for gi, kind in enumerate(plan):
        group_id = f"g{gi:04d}"
        defects = {"shell", "glaze"} if kind == "dual" else {kind}
        color = _shade(PALETTE[rng.choice(list(PALETTE))], rng.uniform(0.85, 1.15))
        disc_count = rng.randint(4, 6)
        for vi in range(rng.randint(2, 3)):
            image_id = f"{group_id}-v{vi}"
            img, bbox = _render_image(
                random.Random(rng.getrandbits(32)), image_size, color,
                disc_count, defects,
            )
            img.save(images_dir / f"{image_id}.png")
            image_count += 1
            boxes = [bbox]
            if rng.random() < 0.25:  # occasionally two part-boxes per image
                midy = (bbox[1] + bbox[3]) // 2
                boxes = [
                    (bbox[0], bbox[1], bbox[2], midy + 2),
                    (bbox[0], midy - 2, bbox[2], bbox[3]),
                ]
            for box in boxes:
                rows.append({
                    "image_id": image_id,
                    "group_id": group_id,
                    "bbox": list(box),
                    "defect_labels": sorted(defects),
                })

    with (out_dir / "annotations.jsonl").open("w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")

    return ToySummary(
        out_dir=out_dir,
        groups=groups,
        images=image_count,
        dual_defect_groups=dual_defect_groups,
    )
