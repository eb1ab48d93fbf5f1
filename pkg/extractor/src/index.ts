export { AcousticModel, CheckpointError, DEFAULT_CONV_GEOMETRY, expectedFrames, generateCheckpoint, loadCheckpoint, receptiveField, saveCheckpoint, totalStride } from "./model.js";
export { extractArchive, layerPath, parseLayerSpec, readClipManifest, ManifestError } from "./extract.js";
export { readDemb, writeDemb, DembFormatError } from "./demb.js";
export { readWav, resample, writeWav, AudioFormatError } from "./wav.js";
export { SeededRng } from "./rng.js";
export { main } from "./cli.js";
