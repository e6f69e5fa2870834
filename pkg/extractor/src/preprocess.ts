/** Resize to the network's input size and apply its normalization recipe. */

import * as tf from '@tensorflow/tfjs';
import { BGR_MEAN_PIXEL, MODEL_RECIPES, ModelName, RGB_MEAN, RGB_STD } from './types.js';
import { DecodedImage } from './imageio.js';

/** One image -> [size, size, 3] float tensor, normalized for the model.
 * Images are resized directly (no cropping or augmentation). */
export function preprocess(image: DecodedImage, model: ModelName): tf.Tensor3D {
  const recipe = MODEL_RECIPES[model];
  return tf.tidy(() => {
    let x = tf.tensor3d(image.data, [image.height, image.width, 3]);
    if (image.height !== recipe.inputSize || image.width !== recipe.inputSize) {
      x = tf.image.resizeBilinear(x, [recipe.inputSize, recipe.inputSize], true);
    }
    if (recipe.normalize === 'unit-meanstd') {
      return x.div(255).sub(RGB_MEAN).div(RGB_STD);
    }
    return tf.reverse(x, -1).sub(BGR_MEAN_PIXEL); // RGB -> BGR, mean pixel off
  });
}
