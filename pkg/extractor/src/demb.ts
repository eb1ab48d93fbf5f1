/**
 * Embedding file format shared with the analysis toolkit: magic "DEMB",
 * u16 version = 1, u16 reserved, u32 T, u32 d (all little-endian), then
 * T*d float32 values, frame-major.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

export const DEMB_MAGIC = "DEMB";
export const DEMB_VERSION = 1;
const HEADER_BYTES = 16;

export class DembFormatError extends Error {}

export function writeDemb(path: string, frames: number, dim: number, data: Float32Array): void {
  if (data.length !== frames * dim) {
    throw new DembFormatError(`payload length ${data.length} does not match ${frames}x${dim}`);
  }
  const buf = Buffer.alloc(HEADER_BYTES + frames * dim * 4);
  buf.write(DEMB_MAGIC, 0, "ascii");
  buf.writeUInt16LE(DEMB_VERSION, 4);
  buf.writeUInt16LE(0, 6);
  buf.writeUInt32LE(frames, 8);
  buf.writeUInt32LE(dim, 12);
  for (let i = 0; i < data.length; i++) {
    buf.writeFloatLE(data[i], HEADER_BYTES + i * 4);
  }
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, buf);
}

export function readDemb(path: string): { frames: number; dim: number; data: Float32Array } {
  const buf = readFileSync(path);
  if (buf.length < HEADER_BYTES || buf.toString("ascii", 0, 4) !== DEMB_MAGIC) {
    throw new DembFormatError(`${path}: bad magic`);
  }
  if (buf.readUInt16LE(4) !== DEMB_VERSION) {
    throw new DembFormatError(`${path}: unsupported version ${buf.readUInt16LE(4)}`);
  }
  const frames = buf.readUInt32LE(8);
  const dim = buf.readUInt32LE(12);
  const expected = HEADER_BYTES + frames * dim * 4;
  if (buf.length !== expected) {
    throw new DembFormatError(`${path}: expected ${expected} bytes, got ${buf.length}`);
  }
  const data = new Float32Array(frames * dim);
  for (let i = 0; i < data.length; i++) {
    data[i] = buf.readFloatLE(HEADER_BYTES + i * 4);
  }
  return { frames, dim, data };
}
