#!/usr/bin/env node
/**
 * extract:          demb-extract extract --manifest clips.csv --model ck.json --layers 1-24 --out archive/
 * make-checkpoint:  demb-extract make-checkpoint --out ck.json [--model-id tiny] [--hidden 16]
 *                     [--heads 2] [--depth 3] [--ffn 32] [--seed 7]
 */

import { extractArchive, parseLayerSpec, readClipManifest, ManifestError } from "./extract.js";
import { generateCheckpoint, loadCheckpoint, saveCheckpoint, CheckpointError } from "./model.js";
import { AudioFormatError } from "./wav.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new ManifestError(`expected --flag value pairs, got ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) {
    throw new ManifestError(`missing required flag --${name}`);
  }
  return v;
}

function runExtract(flags: Map<string, string>): void {
  const model = loadCheckpoint(need(flags, "model"));
  const clips = readClipManifest(need(flags, "manifest"));
  const layers = parseLayerSpec(need(flags, "layers"));
  const out = need(flags, "out");
  const result = extractArchive(model, clips, layers, out);
  console.log(
    `extracted ${result.files} embedding files (${result.clips} clips x ${layers.length} layers) into ${out}`
  );
}

function runMakeCheckpoint(flags: Map<string, string>): void {
  const out = need(flags, "out");
  const { header, weights } = generateCheckpoint({
    modelId: flags.get("model-id") ?? "tiny",
    hidden: parseInt(flags.get("hidden") ?? "16", 10),
    heads: parseInt(flags.get("heads") ?? "2", 10),
    depth: parseInt(flags.get("depth") ?? "3", 10),
    ffn: parseInt(flags.get("ffn") ?? "32", 10),
    seed: parseInt(flags.get("seed") ?? "7", 10),
  });
  saveCheckpoint(out, header, weights);
  console.log(`wrote ${header.model_id}: hidden=${header.hidden} depth=${header.depth} to ${out}`);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "extract") {
      runExtract(parseFlags(rest));
    } else if (command === "make-checkpoint") {
      runMakeCheckpoint(parseFlags(rest));
    } else {
      console.error("usage: demb-extract extract|make-checkpoint --flag value ...");
      return 2;
    }
    return 0;
  } catch (err) {
    if (err instanceof ManifestError || err instanceof CheckpointError || err instanceof AudioFormatError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`error: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

const invokedDirectly = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
