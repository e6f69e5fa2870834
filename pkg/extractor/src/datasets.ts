/** Enumerate dataset samples: class folders or CIFAR-10 binary batches. */

import { readdirSync, readFileSync, statSync } from 'node:fs';
import { extname, join } from 'node:path';
import { DecodedImage, decodeImageFile, IMAGE_EXTENSIONS } from './imageio.js';
import { DatasetKind, Sample, Subset } from './types.js';

export const CIFAR10_LABELS = [
  'airplane', 'automobile', 'bird', 'cat', 'deer',
  'dog', 'frog', 'horse', 'ship', 'truck',
];

const CIFAR_RECORD = 1 + 32 * 32 * 3;

/** Folder layout: one subdirectory per class, image files inside.
 * Caltech101/Caltech256 ship in exactly this shape. Deterministic order:
 * classes and filenames sorted lexicographically. */
function folderSamples(root: string): Sample[] {
  const classes = readdirSync(root)
    .filter((name) => statSync(join(root, name)).isDirectory())
    .sort();
  if (classes.length === 0) {
    throw new Error(`${root}: no class subdirectories found`);
  }
  const samples: Sample[] = [];
  for (const label of classes) {
    const files = readdirSync(join(root, label))
      .filter((name) => IMAGE_EXTENSIONS.has(extname(name).toLowerCase()))
      .sort();
    for (const file of files) {
      const path = join(root, label, file);
      samples.push({
        id: `${label}/${file}`,
        label,
        read: () => decodeImageFile(path),
      });
    }
  }
  return samples;
}

function cifarImage(record: Uint8Array): DecodedImage {
  // record layout: label byte, then 1024 R, 1024 G, 1024 B bytes, row-major
  const data = new Float32Array(32 * 32 * 3);
  for (let p = 0; p < 1024; p++) {
    data[p * 3] = record[1 + p];
    data[p * 3 + 1] = record[1 + 1024 + p];
    data[p * 3 + 2] = record[1 + 2048 + p];
  }
  return { data, height: 32, width: 32 };
}

function cifarSamples(root: string, subset: Subset): Sample[] {
  const names = readdirSync(root).sort();
  const train = names.filter((n) => /^data_batch_\d+\.bin$/.test(n));
  const test = names.filter((n) => n === 'test_batch.bin');
  const files = subset === 'train' ? train : subset === 'test' ? test : [...train, ...test];
  if (files.length === 0) {
    throw new Error(`${root}: no CIFAR-10 batch files for subset '${subset}'`);
  }
  const samples: Sample[] = [];
  for (const file of files) {
    const raw = readFileSync(join(root, file));
    if (raw.length === 0 || raw.length % CIFAR_RECORD !== 0) {
      throw new Error(`${join(root, file)}: size is not a multiple of ${CIFAR_RECORD} bytes`);
    }
    const count = raw.length / CIFAR_RECORD;
    for (let r = 0; r < count; r++) {
      const record = raw.subarray(r * CIFAR_RECORD, (r + 1) * CIFAR_RECORD);
      const labelByte = record[0];
      if (labelByte >= CIFAR10_LABELS.length) {
        throw new Error(`${join(root, file)}: record ${r} has label byte ${labelByte}`);
      }
      samples.push({
        id: `${file}#${r}`,
        label: CIFAR10_LABELS[labelByte],
        read: () => cifarImage(record),
      });
    }
  }
  return samples;
}

export function enumerateSamples(kind: DatasetKind, root: string, subset: Subset): Sample[] {
  if (kind === 'cifar10') {
    return cifarSamples(root, subset);
  }
  // caltech101 / caltech256 are folder datasets
  return folderSamples(root);
}
