/**
 * Plain Float32Array math for the forward pass. Word clips are short
 * and test models are small, so straightforward loops are fast enough
 * and keep the extraction bit-for-bit deterministic.
 */

export function gelu(x: number): number {
  // tanh approximation, matches common transformer stacks
  return 0.5 * x * (1 + Math.tanh(Math.sqrt(2 / Math.PI) * (x + 0.044715 * x * x * x)));
}

export function geluInPlace(a: Float32Array): void {
  for (let i = 0; i < a.length; i++) a[i] = gelu(a[i]);
}

/** Row-wise layer norm over the last dimension of a T x d matrix. */
export function layerNorm(x: Float32Array, t: number, d: number, gamma: Float32Array, beta: Float32Array): Float32Array {
  const out = new Float32Array(t * d);
  for (let i = 0; i < t; i++) {
    const row = i * d;
    let mean = 0;
    for (let j = 0; j < d; j++) mean += x[row + j];
    mean /= d;
    let varsum = 0;
    for (let j = 0; j < d; j++) {
      const c = x[row + j] - mean;
      varsum += c * c;
    }
    const inv = 1 / Math.sqrt(varsum / d + 1e-5);
    for (let j = 0; j < d; j++) {
      out[row + j] = (x[row + j] - mean) * inv * gamma[j] + beta[j];
    }
  }
  return out;
}

/** y = x W^T + b for a T x dIn input and dOut x dIn weight matrix. */
export function linear(
  x: Float32Array,
  t: number,
  dIn: number,
  w: Float32Array,
  b: Float32Array,
  dOut: number
): Float32Array {
  const out = new Float32Array(t * dOut);
  for (let i = 0; i < t; i++) {
    const xRow = i * dIn;
    const oRow = i * dOut;
    for (let o = 0; o < dOut; o++) {
      let acc = b[o];
      const wRow = o * dIn;
      for (let j = 0; j < dIn; j++) {
        acc += x[xRow + j] * w[wRow + j];
      }
      out[oRow + o] = acc;
    }
  }
  return out;
}

export function addInPlace(a: Float32Array, b: Float32Array): void {
  for (let i = 0; i < a.length; i++) a[i] += b[i];
}

/** Valid (no padding) 1-D convolution: cIn x T -> cOut x Tout, channels-major. */
export function conv1d(
  x: Float32Array,
  cIn: number,
  tIn: number,
  w: Float32Array, // cOut x cIn x kernel
  b: Float32Array,
  cOut: number,
  kernel: number,
  stride: number
): { data: Float32Array; frames: number } {
  const tOut = Math.floor((tIn - kernel) / stride) + 1;
  const out = new Float32Array(cOut * tOut);
  for (let o = 0; o < cOut; o++) {
    const wBase = o * cIn * kernel;
    for (let ti = 0; ti < tOut; ti++) {
      const start = ti * stride;
      let acc = b[o];
      for (let c = 0; c < cIn; c++) {
        const xBase = c * tIn + start;
        const wRow = wBase + c * kernel;
        for (let k = 0; k < kernel; k++) {
          acc += x[xBase + k] * w[wRow + k];
        }
      }
      out[o * tOut + ti] = acc;
    }
  }
  return { data: out, frames: tOut };
}

/** Multi-head self-attention over a T x d input (row-major frames). */
export function selfAttention(
  x: Float32Array,
  t: number,
  d: number,
  heads: number,
  wq: Float32Array,
  bq: Float32Array,
  wk: Float32Array,
  bk: Float32Array,
  wv: Float32Array,
  bv: Float32Array,
  wo: Float32Array,
  bo: Float32Array
): Float32Array {
  const q = linear(x, t, d, wq, bq, d);
  const k = linear(x, t, d, wk, bk, d);
  const v = linear(x, t, d, wv, bv, d);
  const hd = d / heads;
  const scale = 1 / Math.sqrt(hd);
  const ctx = new Float32Array(t * d);
  const scores = new Float32Array(t);
  for (let h = 0; h < heads; h++) {
    const off = h * hd;
    for (let i = 0; i < t; i++) {
      let maxScore = -Infinity;
      for (let j = 0; j < t; j++) {
        let acc = 0;
        for (let c = 0; c < hd; c++) {
          acc += q[i * d + off + c] * k[j * d + off + c];
        }
        const s = acc * scale;
        scores[j] = s;
        if (s > maxScore) maxScore = s;
      }
      let z = 0;
      for (let j = 0; j < t; j++) {
        scores[j] = Math.exp(scores[j] - maxScore);
        z += scores[j];
      }
      for (let c = 0; c < hd; c++) {
        let acc = 0;
        for (let j = 0; j < t; j++) {
          acc += scores[j] * v[j * d + off + c];
        }
        ctx[i * d + off + c] = acc / z;
      }
    }
  }
  return linear(ctx, t, d, wo, bo, d);
}
