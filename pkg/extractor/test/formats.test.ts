/** Emitted files must load bit-exactly with the classifier's own reader. */

import { join } from 'node:path';
import { describe, expect, it } from 'vitest';
import { writeCsv, writeFtb1, FeatureRow } from '../src/featurefile.js';
import { loadWithPython, tempDir } from './helpers.js';

function trickyRows(): FeatureRow[] {
  return [
    { id: 'plain', label: 'a', values: new Float64Array([1, 2, 3]) },
    {
      id: 'tricky',
      label: 'b',
      values: new Float64Array([0.1 + 0.2, 1e-308, 12345678901234.567]),
    },
    { id: 'edge', label: 'a', values: new Float64Array([-0, 1e21, 1.5e-7]) },
  ];
}

describe('feature file writers', () => {
  it('csv round-trips every float64 bit through the python loader', () => {
    const dir = tempDir('fmt-');
    const csv = join(dir, 't.csv');
    const bin = join(dir, 't.ftb1');
    writeCsv(csv, 3, trickyRows());
    writeFtb1(bin, 3, trickyRows());
    const fromCsv = loadWithPython(csv);
    const fromBin = loadWithPython(bin);
    expect(fromCsv.rows).toBe(3);
    expect(fromCsv.dim).toBe(3);
    expect(fromCsv.ids).toEqual(['plain', 'tricky', 'edge']);
    expect(fromCsv.labels).toEqual(['a', 'b', 'a']);
    // identical sha256 over the raw float64 matrix: the decimal text lost nothing
    expect(fromCsv.digest).toBe(fromBin.digest);
  });

  it('quotes ids and labels containing csv metacharacters', () => {
    const dir = tempDir('fmt-');
    const csv = join(dir, 'q.csv');
    writeCsv(csv, 2, [
      { id: 'comma,id', label: 'quo"te', values: new Float64Array([1, 2]) },
    ]);
    const loaded = loadWithPython(csv);
    expect(loaded.ids).toEqual(['comma,id']);
    expect(loaded.labels).toEqual(['quo"te']);
  });

  it('ftb1 carries unicode ids and labels', () => {
    const dir = tempDir('fmt-');
    const bin = join(dir, 'u.ftb1');
    writeFtb1(bin, 2, [
      { id: 'bild-äöü', label: 'Straße', values: new Float64Array([0.5, -0.5]) },
    ]);
    const loaded = loadWithPython(bin);
    expect(loaded.ids).toEqual(['bild-äöü']);
    expect(loaded.labels).toEqual(['Straße']);
  });
});
