/** The extraction pipeline: dataset -> pretrained CNN -> feature table. */

import * as tf from '@tensorflow/tfjs';
import { enumerateSamples } from './datasets.js';
import { FeatureRow, writeFeatureFile } from './featurefile.js';
import { loadModelFromDir } from './modelio.js';
import { preprocess } from './preprocess.js';
import { ExtractionJob, MODEL_RECIPES, Sample } from './types.js';

export interface ExtractionSummary {
  rows: number;
  dim: number;
  skipped: number;
}

function featureDim(shape: number[]): number {
  // batch axis off, everything else flattened (pool outputs may be 1x1xC)
  return shape.slice(1).reduce((a, b) => a * b, 1);
}

export async function extract(
  job: ExtractionJob,
  warn: (message: string) => void = (m) => process.stderr.write(m + '\n'),
): Promise<ExtractionSummary> {
  const model = await loadModelFromDir(job.modelPath); // load failure aborts
  const samples = enumerateSamples(job.dataset, job.datasetPath, job.subset);

  const rows: FeatureRow[] = [];
  let skipped = 0;
  let dim = -1;
  for (let start = 0; start < samples.length; start += job.batchSize) {
    const batch: Sample[] = [];
    const tensors: tf.Tensor3D[] = [];
    for (const sample of samples.slice(start, start + job.batchSize)) {
      try {
        tensors.push(preprocess(sample.read(), job.model));
        batch.push(sample);
      } catch (err) {
        skipped += 1;
        warn(`skipping ${sample.id}: ${(err as Error).message}`);
      }
    }
    if (batch.length === 0) continue;
    const stacked = tf.stack(tensors);
    tensors.forEach((t) => t.dispose());
    const output = model.predict(stacked) as tf.Tensor;
    stacked.dispose();
    if (dim === -1) {
      dim = featureDim(output.shape);
      const nominal = MODEL_RECIPES[job.model].nominalDim;
      if (nominal !== null && dim !== nominal) {
        warn(`note: ${job.model} produced ${dim}-d features (stock pooling gives ${nominal})`);
      }
    }
    const flat = await output.data();
    output.dispose();
    batch.forEach((sample, b) => {
      const values = new Float64Array(dim);
      for (let i = 0; i < dim; i++) {
        const v = flat[b * dim + i];
        if (!Number.isFinite(v)) {
          throw new Error(`model produced a non-finite value for ${sample.id}`);
        }
        values[i] = v;
      }
      rows.push({ id: sample.id, label: sample.label, values });
    });
  }
  if (rows.length === 0) {
    throw new Error('no readable images: nothing to write');
  }
  writeFeatureFile(job.outPath, dim, rows);
  return { rows: rows.length, dim, skipped };
}
