#!/usr/bin/env python3
"""Write the scikit-learn handwritten digits as IDX files.

Produces train/test image+label files in the canonical IDX layout so the
pipeline's MNIST code path can run at desk scale when the original MNIST
files are not available. Pixels (0..16) are rescaled to 0..255 bytes.

Usage: make_digits_idx.py [out_dir]
"""

import struct
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split


def write_images(path: Path, images: np.ndarray, side: int) -> None:
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), side, side))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path: Path, labels: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main() -> None:
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data/digits")
    out_dir.mkdir(parents=True, exist_ok=True)

    digits = load_digits()
    pixels = np.round(digits.images.reshape(len(digits.target), -1) / 16.0 * 255.0)
    x_train, x_test, y_train, y_test = train_test_split(
        pixels, digits.target, test_size=0.2, random_state=7, stratify=digits.target
    )

    write_images(out_dir / "train-images-idx3-ubyte", x_train, 8)
    write_labels(out_dir / "train-labels-idx1-ubyte", y_train)
    write_images(out_dir / "t10k-images-idx3-ubyte", x_test, 8)
    write_labels(out_dir / "t10k-labels-idx1-ubyte", y_test)
    print(f"wrote {len(y_train)} train / {len(y_test)} test samples to {out_dir}")


if __name__ == "__main__":
    main()
