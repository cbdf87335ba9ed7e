"""Regenerate the golden preprocessing tensor fixture.

Runs the published reference preprocessing recipe (torchvision transforms:
bicubic shorter-side resize, center crop, scale to [0,1], channel
standardization) once on a deterministic synthetic image and freezes the
result. Run only when the fixture needs regeneration; torchvision is a
dev-time tool here, not a package dependency.
"""

import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]


def deterministic_image(height=300, width=420, seed=123):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    r = (xx * 255 / width).astype(np.uint8)
    g = (yy * 255 / height).astype(np.uint8)
    b = ((xx + yy) % 256).astype(np.uint8)
    img = np.stack([r, g, b], axis=2)
    noise = rng.integers(0, 30, size=img.shape, dtype=np.uint8)
    return np.clip(img.astype(int) + noise, 0, 255).astype(np.uint8)


def main():
    import torch
    from PIL import Image
    from torchvision import transforms

    card = json.loads(
        (ROOT / "src/screencensus/assets/encoder_vit_b32_card.json").read_text()
    )
    image = deterministic_image()
    recipe = transforms.Compose([
        transforms.Resize(card["image_size"],
                          interpolation=transforms.InterpolationMode.BICUBIC),
        transforms.CenterCrop(card["image_size"]),
        transforms.ToTensor(),
        transforms.Normalize(card["mean"], card["std"]),
    ])
    with torch.no_grad():
        expected = recipe(Image.fromarray(image)).numpy()
    out = ROOT / "tests/fixtures/preprocess_golden.npz"
    np.savez_compressed(out, image=image, expected=expected.astype(np.float32),
                        image_size=card["image_size"], mean=card["mean"],
                        std=card["std"])
    print(f"wrote {out}: expected {expected.shape} "
          f"range [{expected.min():.3f}, {expected.max():.3f}]")


if __name__ == "__main__":
    main()
