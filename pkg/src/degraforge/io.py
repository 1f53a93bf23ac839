"""Image file ingestion and persistence.

PNG is the canonical format (always used for outputs, so stored LR images
never pick up a second JPEG pass).  JPEG/BMP inputs are decoded best-effort.
``.npy`` holds float pixels directly and is the lossless interchange used by
the language bindings: (h, w) or (h, w, c) arrays, float in [0, 1] or uint8.
"""

from __future__ import annotations

from pathlib import Path
from typing import List

import numpy as np

from .core import DegraforgeError, PlanarImage, clamp01, float_to_uint8, uint8_to_float

READ_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".npy")


class ImageIOError(DegraforgeError):
    """Raised when an image file cannot be decoded or encoded."""


def _from_array(arr: np.ndarray, path) -> PlanarImage:
    if arr.dtype == np.uint8:
        arr = uint8_to_float(arr)
    elif np.issubdtype(arr.dtype, np.floating):
        arr = clamp01(arr.astype(np.float64))
    else:
        raise ImageIOError(f"{path}: unsupported sample type {arr.dtype} (8-bit or float only)")
    if arr.ndim == 2:
        return PlanarImage.from_interleaved(arr)
    if arr.ndim == 3 and arr.shape[2] in (1, 3):
        if arr.shape[2] == 1:
            return PlanarImage.from_interleaved(arr[:, :, 0])
        return PlanarImage.from_interleaved(arr)
    raise ImageIOError(f"{path}: unsupported array shape {arr.shape}")


def decode_image(path) -> PlanarImage:
    """Decode a PNG/JPEG/BMP/NPY file into a [0,1] float raster."""
    import cv2

    path = Path(path)
    if path.suffix.lower() == ".npy":
        try:
            arr = np.load(path)
        except Exception as exc:
            raise ImageIOError(f"{path}: {exc}") from exc
        return _from_array(arr, path)
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageIOError(f"{path}: not a decodable image")
    if raw.dtype != np.uint8:
        raise ImageIOError(f"{path}: unsupported sample type {raw.dtype} (8-bit only)")
    if raw.ndim == 3 and raw.shape[2] == 4:
        raw = raw[:, :, :3]  # drop alpha
    if raw.ndim == 3 and raw.shape[2] == 3:
        raw = raw[:, :, ::-1]  # BGR -> RGB
    return _from_array(raw, path)


def encode_png(image: PlanarImage, path) -> None:
    """Write an 8-bit PNG (round-half-away-from-zero quantization)."""
    import cv2

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if image.channels == 1:
        u8 = float_to_uint8(image.samples[0])
    else:
        u8 = float_to_uint8(np.moveaxis(image.samples, 0, 2))[:, :, ::-1]  # RGB -> BGR
    if not cv2.imwrite(str(path), u8):
        raise ImageIOError(f"{path}: PNG encoding failed")


def save_npy(image: PlanarImage, path) -> None:
    """Write float64 pixels as (h, w, c) or (h, w); lossless interchange."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = image.to_interleaved() if image.channels == 3 else image.samples[0].copy()
    np.save(path, arr)


def list_images(root) -> List[str]:
    """Sorted posix-style relative paths of every readable image under root."""
    root = Path(root)
    if not root.is_dir():
        raise ImageIOError(f"{root}: not a directory")
    found = [
        p.relative_to(root).as_posix()
        for p in root.rglob("*")
        if p.is_file() and p.suffix.lower() in READ_EXTENSIONS
    ]
    return sorted(found)
