#!/usr/bin/env node
/** extract --dataset {caltech101,caltech256,cifar10,folder} --model {resnet50,vgg16}
 *          --path DIR --model-path DIR --out PATH [--subset train|test|all]
 *          [--batch-size N]
 *
 * Emits the classifier's CSV/FTB1 feature formats (suffix .ftb/.ftb1 picks
 * the binary one). stdout carries key=value lines; warnings go to stderr.
 */

import { parseArgs } from 'node:util';
import { extract } from './extract.js';
import { DatasetKind, ModelName, Subset } from './types.js';

const USAGE =
  'usage: extract --dataset {caltech101,caltech256,cifar10,folder} ' +
  '--model {resnet50,vgg16} --path DIR --model-path DIR --out PATH ' +
  '[--subset train|test|all] [--batch-size N]';

function fail(message: string): never {
  process.stderr.write(message + '\n');
  process.exit(1);
}

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        dataset: { type: 'string' },
        model: { type: 'string' },
        path: { type: 'string' },
        'model-path': { type: 'string' },
        out: { type: 'string' },
        subset: { type: 'string', default: 'all' },
        'batch-size': { type: 'string', default: '16' },
        help: { type: 'boolean', default: false },
      },
    });
  } catch (err) {
    fail(`${(err as Error).message}\n${USAGE}`);
  }
  const args = parsed.values;
  if (args.help) {
    process.stdout.write(USAGE + '\n');
    return 0;
  }
  const datasets = ['caltech101', 'caltech256', 'cifar10', 'folder'];
  const models = ['resnet50', 'vgg16'];
  const subsets = ['train', 'test', 'all'];
  if (!args.dataset || !datasets.includes(args.dataset)) {
    fail(`--dataset must be one of ${datasets.join(', ')}\n${USAGE}`);
  }
  if (!args.model || !models.includes(args.model)) {
    fail(`--model must be one of ${models.join(', ')}\n${USAGE}`);
  }
  if (!subsets.includes(args.subset!)) {
    fail(`--subset must be one of ${subsets.join(', ')}`);
  }
  if (!args.path || !args['model-path'] || !args.out) {
    fail(`--path, --model-path and --out are required\n${USAGE}`);
  }
  const batchSize = Number(args['batch-size']);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    fail(`--batch-size must be a positive integer, got ${args['batch-size']}`);
  }

  try {
    const summary = await extract({
      dataset: args.dataset as DatasetKind,
      datasetPath: args.path!,
      subset: args.subset as Subset,
      model: args.model as ModelName,
      modelPath: args['model-path']!,
      outPath: args.out!,
      batchSize,
    });
    process.stdout.write(`rows=${summary.rows}\n`);
    process.stdout.write(`dim=${summary.dim}\n`);
    process.stdout.write(`skipped=${summary.skipped}\n`);
    process.stdout.write(`out=${args.out}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split('/').pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
