/** The pipeline and its CLI: features out, skips, determinism, exit codes. */

import { readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';
import { beforeAll, describe, expect, it } from 'vitest';
import { extract } from '../src/extract.js';
import {
  buildImageFolder,
  buildTinyModel,
  byteStream,
  loadWithPython,
  runCli,
  tempDir,
  writeCifarBatch,
  writeJpeg,
} from './helpers.js';

let modelDir: string;

beforeAll(async () => {
  modelDir = tempDir('model-');
  await buildTinyModel(modelDir, 8);
}, 60_000);

function job(overrides: Record<string, unknown> = {}) {
  return {
    dataset: 'folder' as const,
    datasetPath: '',
    subset: 'all' as const,
    model: 'resnet50' as const,
    modelPath: modelDir,
    outPath: '',
    batchSize: 4,
    ...overrides,
  };
}

describe('extract', () => {
  it('emits one validated row per image', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats', 'dogs'], 5);
    const out = join(tempDir('out-'), 'feats.csv');
    const warnings: string[] = [];
    const summary = await extract(job({ datasetPath: data, outPath: out }), (m) =>
      warnings.push(m),
    );
    expect(summary).toMatchObject({ rows: 10, dim: 8, skipped: 0 });
    const loaded = loadWithPython(out); // zero errors from the classifier's loader
    expect(loaded.rows).toBe(10);
    expect(loaded.dim).toBe(8);
    expect(loaded.labels.slice(0, 5)).toEqual(['cats', 'cats', 'cats', 'cats', 'cats']);
    expect(loaded.ids[0]).toBe('cats/img0.png');
  });

  it('jpeg images and relu outputs stay finite and non-negative', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['mixed'], 2);
    writeJpeg(join(data, 'mixed', 'photo.jpg'), 24, 18, byteStream(7));
    const out = join(tempDir('out-'), 'feats.csv');
    await extract(job({ datasetPath: data, outPath: out }), () => {});
    const text = readFileSync(out, 'utf-8').trim().split('\n');
    expect(text).toHaveLength(4); // header + 3 rows
    for (const line of text.slice(1)) {
      for (const cell of line.split(',').slice(2)) {
        const v = Number(cell);
        expect(Number.isFinite(v)).toBe(true);
        expect(v).toBeGreaterThanOrEqual(0);
      }
    }
  });

  it('skips unreadable images with a warning count', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats', 'dogs'], 5);
    writeFileSync(join(data, 'cats', 'broken.png'), Buffer.from('garbage bytes'));
    const out = join(tempDir('out-'), 'feats.csv');
    const warnings: string[] = [];
    const summary = await extract(job({ datasetPath: data, outPath: out }), (m) =>
      warnings.push(m),
    );
    expect(summary.rows).toBe(10);
    expect(summary.skipped).toBe(1);
    expect(warnings.some((w) => w.includes('broken.png'))).toBe(true);
    expect(loadWithPython(out).rows).toBe(10);
  });

  it('same job twice writes identical bytes', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats'], 4);
    const dir = tempDir('out-');
    const a = join(dir, 'a.csv');
    const b = join(dir, 'b.csv');
    await extract(job({ datasetPath: data, outPath: a }), () => {});
    await extract(job({ datasetPath: data, outPath: b }), () => {});
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it('records the measured dimension for vgg16 instead of assuming', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['x'], 2);
    const out = join(tempDir('out-'), 'feats.csv');
    const summary = await extract(
      job({ datasetPath: data, outPath: out, model: 'vgg16' as const }),
      () => {},
    );
    expect(summary.dim).toBe(8); // whatever the model says, never a hardcoded 256
    expect(readFileSync(out, 'utf-8').split('\n')[0]).toBe(
      'id,label,' + Array.from({ length: 8 }, (_, i) => `f${i}`).join(','),
    );
  });

  it('writes ftb1 when the suffix asks for it', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats'], 3);
    const out = join(tempDir('out-'), 'feats.ftb1');
    await extract(job({ datasetPath: data, outPath: out }), () => {});
    expect(readFileSync(out).subarray(0, 4).toString('ascii')).toBe('FTB1');
    expect(loadWithPython(out).rows).toBe(3);
  });

  it('handles cifar batches end to end', async () => {
    const root = tempDir('cifar-');
    writeCifarBatch(join(root, 'data_batch_1.bin'), [0, 3, 5, 9]);
    writeCifarBatch(join(root, 'test_batch.bin'), [1, 2]);
    const out = join(tempDir('out-'), 'train.csv');
    const summary = await extract(
      job({ dataset: 'cifar10' as const, datasetPath: root, subset: 'train' as const, outPath: out }),
      () => {},
    );
    expect(summary.rows).toBe(4);
    const loaded = loadWithPython(out);
    expect(loaded.labels).toEqual(['airplane', 'cat', 'dog', 'truck']);
  });

  it('aborts when the model cannot be loaded', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats'], 1);
    await expect(
      extract(job({ datasetPath: data, outPath: '/tmp/never.csv', modelPath: '/nonexistent' })),
    ).rejects.toThrow(/cannot load model/);
  });
});

describe('cli', () => {
  it('prints key=value lines and exits 0 on success', async () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats', 'dogs'], 3);
    const out = join(tempDir('out-'), 'feats.csv');
    const res = runCli([
      '--dataset', 'folder', '--model', 'resnet50',
      '--path', data, '--model-path', modelDir, '--out', out,
    ]);
    expect(res.code).toBe(0);
    const lines = res.stdout.trim().split('\n');
    expect(lines).toContain('rows=6');
    expect(lines).toContain('dim=8');
    expect(lines).toContain('skipped=0');
    expect(loadWithPython(out).rows).toBe(6);
  });

  it('rejects bad flags with exit 1 before doing work', () => {
    expect(runCli(['--dataset', 'imagenet', '--model', 'resnet50']).code).toBe(1);
    expect(runCli(['--dataset', 'folder', '--model', 'alexnet']).code).toBe(1);
    expect(runCli(['--dataset', 'folder', '--model', 'resnet50']).code).toBe(1); // paths missing
    const res = runCli([
      '--dataset', 'folder', '--model', 'resnet50',
      '--path', 'x', '--model-path', 'y', '--out', 'z', '--batch-size', '0',
    ]);
    expect(res.code).toBe(1);
  });

  it('reports runtime failures with exit 2', () => {
    const data = tempDir('imgs-');
    buildImageFolder(data, ['cats'], 1);
    const res = runCli([
      '--dataset', 'folder', '--model', 'resnet50',
      '--path', data, '--model-path', '/nonexistent', '--out', '/tmp/never.csv',
    ]);
    expect(res.code).toBe(2);
    expect(res.stderr).toMatch(/cannot load model/);
  });
});
