/**
 * Minimal WAV reader for word-level clips.
 *
 * Accepts PCM 16/32-bit integer and 32-bit float, any channel count and
 * sample rate; output is mono (channels averaged) at the target rate
 * (linear resampling). Word clips are a few seconds long, so nothing
 * here is optimized for streaming.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

export interface AudioClip {
  samples: Float32Array;
  sampleRate: number;
}

export class AudioFormatError extends Error {}

export function readWav(path: string): AudioClip {
  let buf: Buffer;
  try {
    buf = readFileSync(path);
  } catch (err) {
    throw new AudioFormatError(`cannot read audio file ${path}: ${(err as Error).message}`);
  }
  if (buf.length < 44 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new AudioFormatError(`${path}: not a RIFF/WAVE file`);
  }

  let fmt: { format: number; channels: number; sampleRate: number; bits: number } | null = null;
  let data: Buffer | null = null;
  let offset = 12;
  while (offset + 8 <= buf.length) {
    const id = buf.toString("ascii", offset, offset + 4);
    const size = buf.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (id === "fmt ") {
      fmt = {
        format: buf.readUInt16LE(body),
        channels: buf.readUInt16LE(body + 2),
        sampleRate: buf.readUInt32LE(body + 4),
        bits: buf.readUInt16LE(body + 14),
      };
    } else if (id === "data") {
      data = buf.subarray(body, body + size);
    }
    offset = body + size + (size % 2);
  }
  if (!fmt || !data) {
    throw new AudioFormatError(`${path}: missing fmt or data chunk`);
  }
  if (fmt.channels < 1) {
    throw new AudioFormatError(`${path}: invalid channel count ${fmt.channels}`);
  }

  let decode: (frame: number, ch: number) => number;
  const ch = fmt.channels;
  if (fmt.format === 1 && fmt.bits === 16) {
    decode = (frame, c) => data!.readInt16LE((frame * ch + c) * 2) / 32768;
  } else if (fmt.format === 1 && fmt.bits === 32) {
    decode = (frame, c) => data!.readInt32LE((frame * ch + c) * 4) / 2147483648;
  } else if (fmt.format === 3 && fmt.bits === 32) {
    decode = (frame, c) => data!.readFloatLE((frame * ch + c) * 4);
  } else {
    throw new AudioFormatError(
      `${path}: unsupported encoding (format ${fmt.format}, ${fmt.bits}-bit); use PCM16/PCM32/Float32`
    );
  }

  const frames = Math.floor(data.length / (ch * (fmt.bits / 8)));
  if (frames === 0) {
    throw new AudioFormatError(`${path}: empty audio`);
  }
  const mono = new Float32Array(frames);
  for (let i = 0; i < frames; i++) {
    let acc = 0;
    for (let c = 0; c < ch; c++) acc += decode(i, c);
    mono[i] = acc / ch;
  }
  return { samples: mono, sampleRate: fmt.sampleRate };
}

/** Linear resampling; returns the input untouched when rates already match. */
export function resample(clip: AudioClip, targetRate: number): AudioClip {
  if (clip.sampleRate === targetRate) {
    return clip;
  }
  const ratio = clip.sampleRate / targetRate;
  const outLen = Math.max(1, Math.floor(clip.samples.length / ratio));
  const out = new Float32Array(outLen);
  for (let i = 0; i < outLen; i++) {
    const pos = i * ratio;
    const lo = Math.floor(pos);
    const hi = Math.min(lo + 1, clip.samples.length - 1);
    const frac = pos - lo;
    out[i] = clip.samples[lo] * (1 - frac) + clip.samples[hi] * frac;
  }
  return { samples: out, sampleRate: targetRate };
}

/** Test/demo helper: write a mono or stereo PCM16 WAV. */
export function writeWav(path: string, samples: Float32Array, sampleRate: number, channels = 1): void {
  const frames = Math.floor(samples.length / channels);
  const dataSize = frames * channels * 2;
  const buf = Buffer.alloc(44 + dataSize);
  buf.write("RIFF", 0, "ascii");
  buf.writeUInt32LE(36 + dataSize, 4);
  buf.write("WAVE", 8, "ascii");
  buf.write("fmt ", 12, "ascii");
  buf.writeUInt32LE(16, 16);
  buf.writeUInt16LE(1, 20);
  buf.writeUInt16LE(channels, 22);
  buf.writeUInt32LE(sampleRate, 24);
  buf.writeUInt32LE(sampleRate * channels * 2, 28);
  buf.writeUInt16LE(channels * 2, 32);
  buf.writeUInt16LE(16, 34);
  buf.write("data", 36, "ascii");
  buf.writeUInt32LE(dataSize, 40);
  for (let i = 0; i < frames * channels; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    buf.writeInt16LE(Math.round(v * 32767), 44 + i * 2);
  }
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, buf);
}
