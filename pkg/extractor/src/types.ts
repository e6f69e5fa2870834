/** Shared types and the per-model preprocessing registry. */

export type ModelName = 'resnet50' | 'vgg16';
export type DatasetKind = 'caltech101' | 'caltech256' | 'cifar10' | 'folder';
export type Subset = 'train' | 'test' | 'all';

export interface ExtractionJob {
  /** Dataset root: class folders, or the directory of CIFAR-10 .bin batches. */
  datasetPath: string;
  dataset: DatasetKind;
  /** Which rows of a pre-split dataset to emit (CIFAR-10 only). */
  subset: Subset;
  model: ModelName;
  /** Directory holding a tfjs model.json + weight shards. */
  modelPath: string;
  /** Output feature table; .ftb/.ftb1 suffix selects the binary format. */
  outPath: string;
  batchSize: number;
}

/** One image to run through the network; read() yields RGB float data in
 * [0, 255] row-major HxWx3, or fails for unreadable files. */
export interface Sample {
  id: string;
  label: string;
  read(): { data: Float32Array; height: number; width: number };
}

export interface ModelRecipe {
  inputSize: number;
  /** Feature dimension the stock architecture would produce, to warn on
   * mismatch; the emitted header always records the measured one. */
  nominalDim: number | null;
  normalize: 'unit-meanstd' | 'bgr-meansub';
}

// Input recipes of the stock pretrained networks. Both take 224x224 inputs;
// resnet50 expects [0,1] RGB standardized per channel, vgg16 expects BGR with
// the dataset mean pixel subtracted.
export const MODEL_RECIPES: Record<ModelName, ModelRecipe> = {
  resnet50: { inputSize: 224, nominalDim: 2048, normalize: 'unit-meanstd' },
  vgg16: { inputSize: 224, nominalDim: null, normalize: 'bgr-meansub' },
};

export const RGB_MEAN = [0.485, 0.456, 0.406];
export const RGB_STD = [0.229, 0.224, 0.225];
export const BGR_MEAN_PIXEL = [103.939, 116.779, 123.68];
