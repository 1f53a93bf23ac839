/**
 * TypeScript bindings for the degraforge degradation toolkit.
 *
 * Five operations are exposed: runGated, sampleRecipe, practical8, psnr and
 * ssim.  Each drives the native `degraforge` CLI through its public file
 * interfaces: pixel arrays cross as lossless NPY float64 files, configs and
 * recipes cross as JSON text, image outputs come back from the CLI's own
 * PNGs, and metrics from its CSV tables -- so every numeric result is the
 * native implementation's, byte for byte.
 */

import { mkdirSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";

import { runCli } from "./cli.js";
import { CliError, ContractError, ShapeError } from "./errors.js";
import { BoundImage, boundImage, imageToNpy, pngToImage } from "./image.js";

export { BoundImage, boundImage } from "./image.js";
export { CliError, ContractError, ShapeError } from "./errors.js";
export { cliCommand } from "./cli.js";

/** Mirrors the native library version. */
export const VERSION = "0.1.0";

function withTempDir<T>(body: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "degraforge-"));
  try {
    return body(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function checkImageKey(imageKey: string): void {
  if (!imageKey.endsWith(".npy")) {
    throw new ContractError(`image_key must end in .npy (lossless interchange), got ${imageKey}`);
  }
  const parts = imageKey.split("/");
  if (imageKey.startsWith("/") || parts.some((p) => p === "" || p === "." || p === "..")) {
    throw new ContractError(`image_key must be a clean relative path, got ${imageKey}`);
  }
}

function readManifestLines(path: string): string[] {
  return readFileSync(path, "utf8")
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

function manifestLineFor(manifestPath: string, imageKey: string): string {
  for (const line of readManifestLines(manifestPath)) {
    const record = JSON.parse(line) as { image_key?: string; error?: string };
    if (record.image_key === imageKey) {
      if (record.error) {
        throw new CliError(`degradation failed for ${imageKey}: ${record.error}`, 1, record.error);
      }
      return line;
    }
  }
  throw new CliError(`manifest has no record for ${imageKey}`, 1, "");
}

export interface RunGatedResult {
  image: BoundImage;
  /** The recipe as its JSON manifest line. */
  recipe: string;
}

/**
 * Degrade one image with the gated pipeline.
 *
 * Writes the array into a scratch dataset under `imageKey`, runs
 * `degraforge synth --seed`, and returns the CLI's own PNG pixels plus the
 * recipe manifest line, so results are byte-identical to a native run with
 * the same (seed, image_key, config).
 */
export function runGated(
  image: BoundImage,
  configText: string,
  seed: number,
  imageKey: string,
): RunGatedResult {
  boundImage(image.data, image.height, image.width, image.channels);
  checkImageKey(imageKey);
  return withTempDir((dir) => {
    const hrDir = join(dir, "hr");
    const outDir = join(dir, "out");
    const sourcePath = join(hrDir, imageKey);
    mkdirSync(dirname(sourcePath), { recursive: true });
    writeFileSync(sourcePath, imageToNpy(image));
    const configPath = join(dir, "config.json");
    writeFileSync(configPath, configText);
    runCli(["synth", hrDir, outDir, "--config", configPath, "--seed", String(seed), "--workers", "1"]);
    const recipe = manifestLineFor(join(outDir, "manifest.jsonl"), imageKey);
    const lrPath = join(outDir, imageKey.replace(/\.npy$/, ".png"));
    return { image: pngToImage(readFileSync(lrPath)), recipe };
  });
}

/**
 * Resolve the recipe for (config, seed, image_key) without supplying pixels.
 * Gate outcomes and stage parameters depend only on the stream key, so a
 * placeholder image is degraded and only the manifest line is kept.
 */
export function sampleRecipe(configText: string, seed: number, imageKey: string): string {
  checkImageKey(imageKey);
  let scale = 4;
  let kernelSize = 21;
  try {
    const parsed = JSON.parse(configText) as { scale?: number; kernel_size?: number };
    if (typeof parsed.scale === "number") {
      scale = parsed.scale;
    }
    if (typeof parsed.kernel_size === "number") {
      kernelSize = parsed.kernel_size;
    }
  } catch {
    throw new ContractError("config must be JSON text");
  }
  // big enough for the blur support (size <= 2*min_dim + 1) and the scale
  const side = Math.max(8, scale, Math.ceil((kernelSize - 1) / 2));
  const placeholder = boundImage(new Float64Array(side * side), side, side, 1);
  return runGated(placeholder, configText, seed, imageKey).recipe;
}

export interface Practical8Options {
  scale?: number;
  seed?: number;
  classical5?: boolean;
  workers?: number;
}

export interface Practical8Result {
  cases: string[];
  manifestPath: string;
  /** Parsed manifest records (recipes, plus error records if any). */
  records: unknown[];
}

/** Materialize the Practical8 (or classical-5) benchmark into outDir. */
export function practical8(hrDir: string, outDir: string, options: Practical8Options = {}): Practical8Result {
  const args = [
    "practical8", hrDir, outDir,
    "--scale", String(options.scale ?? 4),
    "--seed", String(options.seed ?? 0),
  ];
  if (options.classical5) {
    args.push("--classical5");
  }
  if (options.workers !== undefined) {
    args.push("--workers", String(options.workers));
  }
  const result = runCli(args);
  const caseLine = result.stdout.split("\n").find((line) => line.startsWith("cases: "));
  const cases = caseLine ? caseLine.slice("cases: ".length).trim().split(/\s+/) : [];
  const manifestPath = resolve(outDir, "manifest.jsonl");
  const records = readManifestLines(manifestPath).map((line) => JSON.parse(line) as unknown);
  return { cases, manifestPath, records };
}

export interface MetricOptions {
  /** Border pixels ignored on every side (native default is the scale). */
  borderCrop?: number;
  colorSpace?: "rgb_mean" | "luma_y";
}

export interface MetricResult {
  psnr: number;
  ssim: number;
}

function parseCsvNumber(text: string): number {
  if (text === "inf") {
    return Infinity;
  }
  const value = Number(text);
  if (Number.isNaN(value)) {
    throw new CliError(`unparseable metric value ${text}`, null, "");
  }
  return value;
}

/** PSNR and SSIM of an image pair, computed by the native `eval` command. */
export function metrics(a: BoundImage, b: BoundImage, options: MetricOptions = {}): MetricResult {
  boundImage(a.data, a.height, a.width, a.channels);
  boundImage(b.data, b.height, b.width, b.channels);
  if (a.height !== b.height || a.width !== b.width || a.channels !== b.channels) {
    throw new ShapeError(
      `image dimensions differ: ${a.width}x${a.height}x${a.channels} vs ${b.width}x${b.height}x${b.channels}`,
    );
  }
  return withTempDir((dir) => {
    mkdirSync(join(dir, "sr"), { recursive: true });
    mkdirSync(join(dir, "hr"), { recursive: true });
    writeFileSync(join(dir, "sr", "pair.npy"), imageToNpy(a));
    writeFileSync(join(dir, "hr", "pair.npy"), imageToNpy(b));
    const out = join(dir, "metrics");
    runCli([
      "eval", join(dir, "sr"), join(dir, "hr"),
      "--crop", String(options.borderCrop ?? 0),
      "--color-space", options.colorSpace ?? "rgb_mean",
      "--out", out,
    ]);
    const rows = readFileSync(`${out}.csv`, "utf8").trim().split("\n");
    const row = rows.find((line) => line.startsWith("all,"));
    if (!row) {
      throw new CliError("eval produced no 'all' case row", null, "");
    }
    const fields = row.split(",");
    return { psnr: parseCsvNumber(fields[2]), ssim: parseCsvNumber(fields[3]) };
  });
}

export function psnr(a: BoundImage, b: BoundImage, options: MetricOptions = {}): number {
  return metrics(a, b, options).psnr;
}

export function ssim(a: BoundImage, b: BoundImage, options: MetricOptions = {}): number {
  return metrics(a, b, options).ssim;
}
