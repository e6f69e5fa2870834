/** Shared fixtures: a tiny saved model, image folders, CIFAR batches. */

import { execFileSync, spawnSync } from 'node:child_process';
import { mkdirSync, mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import * as tf from '@tensorflow/tfjs';
import jpeg from 'jpeg-js';
import { PNG } from 'pngjs';
import { saveModelToDir } from '../src/modelio.js';

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Deterministic byte stream so fixtures are stable across runs. */
export function byteStream(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1103515245 + 12345) % 0x80000000;
    return s % 256;
  };
}

/** GAP -> dense(units, relu): accepts 224x224x3, pools to 3, projects. */
export async function buildTinyModel(dir: string, units = 8): Promise<void> {
  const model = tf.sequential();
  model.add(
    tf.layers.globalAveragePooling2d({ inputShape: [224, 224, 3], dataFormat: 'channelsLast' }),
  );
  model.add(tf.layers.dense({ units, activation: 'relu', kernelInitializer: 'glorotUniform' }));
  await saveModelToDir(model, dir);
}

export function writePng(path: string, width: number, height: number, next: () => number): void {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height * 4; i++) {
    png.data[i] = i % 4 === 3 ? 255 : next();
  }
  writeFileSync(path, PNG.sync.write(png));
}

export function writeJpeg(path: string, width: number, height: number, next: () => number): void {
  const data = Buffer.alloc(width * height * 4);
  for (let i = 0; i < data.length; i++) {
    data[i] = i % 4 === 3 ? 255 : next();
  }
  writeFileSync(path, jpeg.encode({ data, width, height }, 90).data);
}

/** Class folders with 5 PNGs each under root/. */
export function buildImageFolder(root: string, labels = ['cats', 'dogs'], perClass = 5): void {
  const next = byteStream(1234);
  for (const label of labels) {
    mkdirSync(join(root, label), { recursive: true });
    for (let i = 0; i < perClass; i++) {
      writePng(join(root, label, `img${i}.png`), 16, 20, next);
    }
  }
}

/** CIFAR-10 style batch file with the given label bytes. */
export function writeCifarBatch(path: string, labelBytes: number[]): void {
  const next = byteStream(99);
  const record = 1 + 32 * 32 * 3;
  const buf = Buffer.alloc(labelBytes.length * record);
  labelBytes.forEach((label, r) => {
    buf[r * record] = label;
    for (let i = 1; i < record; i++) {
      buf[r * record + i] = next();
    }
  });
  writeFileSync(path, buf);
}

export interface LoadedTable {
  rows: number;
  dim: number;
  ids: string[];
  labels: string[];
  digest: string;
}

const PY_LOAD = `
import hashlib, json, sys
from membank import load_features
t = load_features(sys.argv[1])
print(json.dumps({"rows": len(t), "dim": t.dim, "ids": t.ids, "labels": t.labels,
                  "digest": hashlib.sha256(t.values.tobytes()).hexdigest()}))
`;

/** Validate an emitted file with the classifier's own loader. */
export function loadWithPython(path: string): LoadedTable {
  const out = execFileSync('python3', ['-c', PY_LOAD, path], { encoding: 'utf-8' });
  return JSON.parse(out);
}

const CLI_PATH = new URL('../dist/cli.js', import.meta.url).pathname;

export function runCli(args: string[]): { code: number; stdout: string; stderr: string } {
  const res = spawnSync('node', [CLI_PATH, ...args], { encoding: 'utf-8' });
  return { code: res.status ?? -1, stdout: res.stdout, stderr: res.stderr };
}
