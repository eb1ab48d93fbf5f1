/**
 * Acoustic model: a strided convolutional frame encoder followed by a
 * stack of pre-norm transformer blocks, with the hidden states of every
 * block exposed as extraction layers (1-based).
 *
 * The convolutional geometry follows the standard 16 kHz speech
 * frontend: seven valid convolutions with strides (5,2,2,2,2,2,2) and
 * kernels (10,3,3,3,3,2,2), i.e. one frame per 320 input samples with a
 * 400-sample receptive field. Checkpoints live in a self-describing
 * JSON container with base64 float32 weights; `generateCheckpoint`
 * builds a seeded random one for tests and demos.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";

import { SeededRng } from "./rng.js";
import { addInPlace, conv1d, geluInPlace, layerNorm, linear, selfAttention } from "./nn.js";

export const CHECKPOINT_VERSION = 1;

export interface ConvSpec {
  channels: number;
  kernel: number;
  stride: number;
}

export const DEFAULT_CONV_GEOMETRY: Array<Pick<ConvSpec, "kernel" | "stride">> = [
  { kernel: 10, stride: 5 },
  { kernel: 3, stride: 2 },
  { kernel: 3, stride: 2 },
  { kernel: 3, stride: 2 },
  { kernel: 3, stride: 2 },
  { kernel: 2, stride: 2 },
  { kernel: 2, stride: 2 },
];

export interface CheckpointHeader {
  format_version: number;
  model_id: string;
  sample_rate: number;
  conv: ConvSpec[];
  hidden: number;
  heads: number;
  depth: number;
  ffn: number;
}

export class CheckpointError extends Error {}

export function totalStride(conv: ConvSpec[]): number {
  return conv.reduce((acc, c) => acc * c.stride, 1);
}

export function receptiveField(conv: ConvSpec[]): number {
  let rf = 1;
  let jump = 1;
  for (const c of conv) {
    rf += (c.kernel - 1) * jump;
    jump *= c.stride;
  }
  return rf;
}

/** Frame count the conv stack produces for a given sample count. */
export function expectedFrames(conv: ConvSpec[], samples: number): number {
  let t = samples;
  for (const c of conv) {
    t = Math.floor((t - c.kernel) / c.stride) + 1;
    if (t < 1) {
      throw new CheckpointError(`clip too short: ${samples} samples do not cover the receptive field`);
    }
  }
  return t;
}

interface BlockWeights {
  ln1g: Float32Array;
  ln1b: Float32Array;
  wq: Float32Array;
  bq: Float32Array;
  wk: Float32Array;
  bk: Float32Array;
  wv: Float32Array;
  bv: Float32Array;
  wo: Float32Array;
  bo: Float32Array;
  ln2g: Float32Array;
  ln2b: Float32Array;
  w1: Float32Array;
  b1: Float32Array;
  w2: Float32Array;
  b2: Float32Array;
}

interface ConvWeights {
  w: Float32Array;
  b: Float32Array;
}

export class AcousticModel {
  readonly header: CheckpointHeader;
  private convs: ConvWeights[] = [];
  private blocks: BlockWeights[] = [];
  private lnG: Float32Array[] = []; // per-conv layer norms
  private lnB: Float32Array[] = [];
  private posCache = new Map<number, Float32Array>();

  constructor(header: CheckpointHeader, weights: Float32Array) {
    this.header = header;
    const d = header.hidden;
    if (d % header.heads !== 0) {
      throw new CheckpointError(`hidden width ${d} not divisible by ${header.heads} heads`);
    }
    const last = header.conv[header.conv.length - 1];
    if (last.channels !== d) {
      throw new CheckpointError(`final conv channels ${last.channels} must equal hidden width ${d}`);
    }

    let off = 0;
    const take = (n: number): Float32Array => {
      if (off + n > weights.length) {
        throw new CheckpointError(
          `checkpoint weights truncated: need ${off + n} floats, have ${weights.length}`
        );
      }
      const view = weights.subarray(off, off + n);
      off += n;
      return view;
    };

    let cIn = 1;
    for (const c of header.conv) {
      this.convs.push({ w: take(c.channels * cIn * c.kernel), b: take(c.channels) });
      this.lnG.push(take(c.channels));
      this.lnB.push(take(c.channels));
      cIn = c.channels;
    }
    for (let l = 0; l < header.depth; l++) {
      this.blocks.push({
        ln1g: take(d), ln1b: take(d),
        wq: take(d * d), bq: take(d),
        wk: take(d * d), bk: take(d),
        wv: take(d * d), bv: take(d),
        wo: take(d * d), bo: take(d),
        ln2g: take(d), ln2b: take(d),
        w1: take(header.ffn * d), b1: take(header.ffn),
        w2: take(d * header.ffn), b2: take(d),
      });
    }
    if (off !== weights.length) {
      throw new CheckpointError(`checkpoint has ${weights.length - off} unused weight floats`);
    }
  }

  get depth(): number {
    return this.header.depth;
  }

  /** Sinusoidal positions added once before the transformer stack. */
  private positions(t: number): Float32Array {
    const cached = this.posCache.get(t);
    if (cached) return cached;
    const d = this.header.hidden;
    const out = new Float32Array(t * d);
    for (let i = 0; i < t; i++) {
      for (let j = 0; j < d; j += 2) {
        const angle = i / Math.pow(10000, j / d);
        out[i * d + j] = Math.sin(angle);
        if (j + 1 < d) out[i * d + j + 1] = Math.cos(angle);
      }
    }
    this.posCache.set(t, out);
    return out;
  }

  /**
   * Hidden states after each requested transformer block for one clip.
   * Returns a map layer -> T x d row-major matrix; T is identical for
   * every layer of a clip.
   */
  forward(samples: Float32Array, layers: number[]): { frames: number; hidden: Map<number, Float32Array> } {
    for (const layer of layers) {
      if (!Number.isInteger(layer) || layer < 1 || layer > this.depth) {
        throw new CheckpointError(`layer ${layer} out of range 1..${this.depth} for this checkpoint`);
      }
    }
    // conv frontend, channels-major
    let data: Float32Array = samples;
    let cIn = 1;
    let t = samples.length;
    for (let i = 0; i < this.convs.length; i++) {
      const spec = this.header.conv[i];
      if (t < spec.kernel) {
        throw new CheckpointError(`clip too short after conv ${i}: ${t} < kernel ${spec.kernel}`);
      }
      const res = conv1d(data, cIn, t, this.convs[i].w, this.convs[i].b, spec.channels, spec.kernel, spec.stride);
      t = res.frames;
      // per-frame channel norm + GELU, in frame-major space
      const frameMajor = new Float32Array(spec.channels * t);
      for (let c = 0; c < spec.channels; c++) {
        for (let ti = 0; ti < t; ti++) {
          frameMajor[ti * spec.channels + c] = res.data[c * t + ti];
        }
      }
      const normed = layerNorm(frameMajor, t, spec.channels, this.lnG[i], this.lnB[i]);
      geluInPlace(normed);
      const channelMajor = new Float32Array(spec.channels * t);
      for (let ti = 0; ti < t; ti++) {
        for (let c = 0; c < spec.channels; c++) {
          channelMajor[c * t + ti] = normed[ti * spec.channels + c];
        }
      }
      data = channelMajor;
      cIn = spec.channels;
    }

    const d = this.header.hidden;
    let x = new Float32Array(t * d);
    for (let ti = 0; ti < t; ti++) {
      for (let c = 0; c < d; c++) {
        x[ti * d + c] = data[c * t + ti];
      }
    }
    addInPlace(x, this.positions(t));

    const wanted = new Set(layers);
    const hidden = new Map<number, Float32Array>();
    for (let l = 0; l < this.depth; l++) {
      const b = this.blocks[l];
      const attIn = layerNorm(x, t, d, b.ln1g, b.ln1b);
      const att = selfAttention(attIn, t, d, this.header.heads, b.wq, b.bq, b.wk, b.bk, b.wv, b.bv, b.wo, b.bo);
      addInPlace(x, att);
      const ffnIn = layerNorm(x, t, d, b.ln2g, b.ln2b);
      const mid = linear(ffnIn, t, d, b.w1, b.b1, this.header.ffn);
      geluInPlace(mid);
      const ffn = linear(mid, t, this.header.ffn, b.w2, b.b2, d);
      addInPlace(x, ffn);
      if (wanted.has(l + 1)) {
        hidden.set(l + 1, new Float32Array(x));
      }
      if (hidden.size === wanted.size) {
        break;
      }
    }
    return { frames: t, hidden };
  }
}

// ---------------------------------------------------------------------------
// checkpoint container

function weightCount(header: CheckpointHeader): number {
  let n = 0;
  let cIn = 1;
  for (const c of header.conv) {
    n += c.channels * cIn * c.kernel + c.channels; // conv
    n += 2 * c.channels; // norm
    cIn = c.channels;
  }
  const d = header.hidden;
  n += header.depth * (2 * d + 4 * (d * d + d) + 2 * d + header.ffn * d + header.ffn + d * header.ffn + d);
  return n;
}

export function loadCheckpoint(path: string): AcousticModel {
  let payload: CheckpointHeader & { weights: string };
  try {
    payload = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new CheckpointError(`cannot load checkpoint ${path}: ${(err as Error).message}`);
  }
  if (payload.format_version !== CHECKPOINT_VERSION) {
    throw new CheckpointError(`${path}: unsupported checkpoint version ${payload.format_version}`);
  }
  const raw = Buffer.from(payload.weights, "base64");
  const weights = new Float32Array(raw.buffer, raw.byteOffset, raw.byteLength / 4);
  const { weights: _w, ...header } = payload;
  return new AcousticModel(header, weights);
}

export function saveCheckpoint(path: string, header: CheckpointHeader, weights: Float32Array): void {
  const payload = {
    ...header,
    weights: Buffer.from(weights.buffer, weights.byteOffset, weights.byteLength).toString("base64"),
  };
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, JSON.stringify(payload, null, 2) + "\n", "utf-8");
}

export interface GenerateOptions {
  modelId: string;
  hidden: number;
  heads: number;
  depth: number;
  ffn: number;
  seed: number;
  sampleRate?: number;
}

/** Seeded random checkpoint with the standard conv geometry. */
export function generateCheckpoint(opts: GenerateOptions): { header: CheckpointHeader; weights: Float32Array } {
  const header: CheckpointHeader = {
    format_version: CHECKPOINT_VERSION,
    model_id: opts.modelId,
    sample_rate: opts.sampleRate ?? 16000,
    conv: DEFAULT_CONV_GEOMETRY.map((g) => ({ ...g, channels: opts.hidden })),
    hidden: opts.hidden,
    heads: opts.heads,
    depth: opts.depth,
    ffn: opts.ffn,
  };
  const weights = new Float32Array(weightCount(header));
  const rng = new SeededRng(opts.seed);

  let off = 0;
  const fill = (n: number, scale: number, ones = false) => {
    const view = weights.subarray(off, off + n);
    if (ones) {
      view.fill(1);
    } else if (scale === 0) {
      view.fill(0);
    } else {
      rng.fillNormal(view, scale);
    }
    off += n;
  };

  let cIn = 1;
  for (const c of header.conv) {
    fill(c.channels * cIn * c.kernel, 1 / Math.sqrt(cIn * c.kernel));
    fill(c.channels, 0); // conv bias
    fill(c.channels, 0, true); // norm gamma
    fill(c.channels, 0); // norm beta
    cIn = c.channels;
  }
  const d = header.hidden;
  const ds = 1 / Math.sqrt(d);
  for (let l = 0; l < header.depth; l++) {
    fill(d, 0, true);
    fill(d, 0);
    for (let m = 0; m < 4; m++) {
      fill(d * d, ds);
      fill(d, 0);
    }
    fill(d, 0, true);
    fill(d, 0);
    fill(header.ffn * d, ds);
    fill(header.ffn, 0);
    fill(d * header.ffn, 1 / Math.sqrt(header.ffn));
    fill(d, 0);
  }
  if (off !== weights.length) {
    throw new CheckpointError(`weight layout mismatch: filled ${off} of ${weights.length}`);
  }
  return { header, weights };
}
