import { PNG } from "pngjs";

import { ShapeError } from "./errors.js";
import { encodeNpy } from "./npy.js";

/**
 * Pixel raster crossing the binding boundary: C-contiguous interleaved
 * (height, width, channels) float64 samples in [0, 1].  JavaScript numbers
 * are 64-bit floats, so Float64Array is the host-native layout; transfers
 * to the CLI go through NPY files and are lossless.
 */
export interface BoundImage {
  readonly height: number;
  readonly width: number;
  readonly channels: 1 | 3;
  readonly layout: "interleaved";
  readonly data: Float64Array;
}

export function boundImage(data: Float64Array, height: number, width: number, channels: number): BoundImage {
  if (!(data instanceof Float64Array)) {
    throw new ShapeError("expected Float64Array samples (interleaved h*w*c float64 in [0,1])");
  }
  if (!Number.isInteger(height) || !Number.isInteger(width) || height < 1 || width < 1) {
    throw new ShapeError(`image dimensions must be positive integers, got ${height}x${width}`);
  }
  if (channels !== 1 && channels !== 3) {
    throw new ShapeError(`channels must be 1 or 3, got ${channels}`);
  }
  if (data.length !== height * width * channels) {
    throw new ShapeError(
      `expected ${height}*${width}*${channels} = ${height * width * channels} samples, got ${data.length}`,
    );
  }
  return { height, width, channels, layout: "interleaved", data };
}

export function imageToNpy(image: BoundImage): Buffer {
  const shape = image.channels === 1 ? [image.height, image.width] : [image.height, image.width, 3];
  return encodeNpy(image.data, shape);
}

/** Decode an 8-bit PNG written by the CLI; grey files come back as 1 channel. */
export function pngToImage(buffer: Buffer): BoundImage {
  const png = PNG.sync.read(buffer); // data is RGBA regardless of source color type
  const pixels = png.width * png.height;
  let grey = true;
  for (let i = 0; i < pixels && grey; i++) {
    grey = png.data[4 * i] === png.data[4 * i + 1] && png.data[4 * i + 1] === png.data[4 * i + 2];
  }
  const channels = grey ? 1 : 3;
  const data = new Float64Array(pixels * channels);
  for (let i = 0; i < pixels; i++) {
    if (grey) {
      data[i] = png.data[4 * i] / 255.0;
    } else {
      data[3 * i] = png.data[4 * i] / 255.0;
      data[3 * i + 1] = png.data[4 * i + 1] / 255.0;
      data[3 * i + 2] = png.data[4 * i + 2] / 255.0;
    }
  }
  return boundImage(data, png.height, png.width, channels);
}
