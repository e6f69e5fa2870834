/** Load/save tfjs models from plain directories without tfjs-node. */

import { mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';
import * as tf from '@tensorflow/tfjs';

type AnyModel = tf.LayersModel | tf.GraphModel;

function joinBuffers(parts: Buffer[]): ArrayBuffer {
  const whole = Buffer.concat(parts);
  return whole.buffer.slice(whole.byteOffset, whole.byteOffset + whole.byteLength);
}

/** Read model.json plus its weight shards into memory and instantiate.
 * Supports both layers-model and graph-model artifacts. */
export async function loadModelFromDir(dir: string): Promise<AnyModel> {
  let manifest: any;
  try {
    manifest = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf-8'));
  } catch (err) {
    throw new Error(`cannot load model from ${dir}: ${(err as Error).message}`);
  }
  const weightSpecs: tf.io.WeightsManifestEntry[] = [];
  const shards: Buffer[] = [];
  for (const group of manifest.weightsManifest ?? []) {
    weightSpecs.push(...group.weights);
    for (const path of group.paths) {
      shards.push(readFileSync(join(dir, path)));
    }
  }
  const artifacts: tf.io.ModelArtifacts = {
    modelTopology: manifest.modelTopology,
    weightSpecs,
    weightData: joinBuffers(shards),
  };
  if (manifest.format === 'graph-model') {
    return tf.loadGraphModel(tf.io.fromMemory(artifacts));
  }
  return tf.loadLayersModel(tf.io.fromMemory(artifacts));
}

/** Counterpart used by the tests to stage a model directory. */
export async function saveModelToDir(model: tf.LayersModel, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = tf.io.CompositeArrayBuffer.join(artifacts.weightData);
      writeFileSync(
        join(dir, 'model.json'),
        JSON.stringify({
          format: 'layers-model',
          modelTopology: artifacts.modelTopology,
          weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
        }),
      );
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(weightData));
      return {
        modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' as const },
      };
    }),
  );
}
