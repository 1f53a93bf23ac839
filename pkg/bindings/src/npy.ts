/** Minimal NPY v1.0 writer for float64 arrays (the lossless interchange
 *  format the native CLI accepts next to PNG). */

export function encodeNpy(data: Float64Array, shape: number[]): Buffer {
  const count = shape.reduce((a, b) => a * b, 1);
  if (count !== data.length) {
    throw new Error(`shape (${shape.join(", ")}) does not match ${data.length} samples`);
  }
  const shapeText = shape.length === 1 ? `(${shape[0]},)` : `(${shape.join(", ")})`;
  let header = `{'descr': '<f8', 'fortran_order': False, 'shape': ${shapeText}, }`;
  const unpadded = 10 + header.length + 1; // magic+version+len fields, header, newline
  const padding = (64 - (unpadded % 64)) % 64;
  header = header + " ".repeat(padding) + "\n";

  const out = Buffer.alloc(10 + header.length + data.length * 8);
  out.write("\x93NUMPY", 0, "latin1");
  out.writeUInt8(1, 6); // major version
  out.writeUInt8(0, 7); // minor version
  out.writeUInt16LE(header.length, 8);
  out.write(header, 10, "latin1");
  for (let i = 0; i < data.length; i++) {
    out.writeDoubleLE(data[i], 10 + header.length + i * 8);
  }
  return out;
}
