/** Writers for the feature-table formats the classifier consumes.
 *
 * CSV: header id,label,f0..f{D-1}, UTF-8, LF, shortest round-trip floats.
 * FTB1: magic "FTB1", u32 LE dim, u64 LE row count, per row u32-length-
 * prefixed UTF-8 id and label, then the matrix as little-endian float64.
 */

import { writeFileSync } from 'node:fs';

export interface FeatureRow {
  id: string;
  label: string;
  values: Float64Array;
}

function csvField(text: string): string {
  if (/[",\n\r]/.test(text)) {
    return `"${text.replace(/"/g, '""')}"`;
  }
  return text;
}

function csvFloat(v: number): string {
  // String(-0) drops the sign; everything else is shortest round-trip
  return Object.is(v, -0) ? '-0' : String(v);
}

export function writeCsv(path: string, dim: number, rows: FeatureRow[]): void {
  const header = ['id', 'label'];
  for (let i = 0; i < dim; i++) header.push(`f${i}`);
  const lines = [header.join(',')];
  for (const row of rows) {
    const cells = [csvField(row.id), csvField(row.label)];
    for (const v of row.values) cells.push(csvFloat(v));
    lines.push(cells.join(','));
  }
  writeFileSync(path, lines.join('\n') + '\n', 'utf-8');
}

export function writeFtb1(path: string, dim: number, rows: FeatureRow[]): void {
  const parts: Buffer[] = [];
  const head = Buffer.alloc(16);
  head.write('FTB1', 0, 'ascii');
  head.writeUInt32LE(dim, 4);
  head.writeBigUInt64LE(BigInt(rows.length), 8);
  parts.push(head);
  for (const row of rows) {
    for (const text of [row.id, row.label]) {
      const raw = Buffer.from(text, 'utf-8');
      const len = Buffer.alloc(4);
      len.writeUInt32LE(raw.length, 0);
      parts.push(len, raw);
    }
  }
  const matrix = Buffer.alloc(rows.length * dim * 8);
  rows.forEach((row, r) => {
    for (let i = 0; i < dim; i++) {
      matrix.writeDoubleLE(row.values[i], (r * dim + i) * 8);
    }
  });
  parts.push(matrix);
  writeFileSync(path, Buffer.concat(parts));
}

export function writeFeatureFile(path: string, dim: number, rows: FeatureRow[]): void {
  if (path.endsWith('.ftb') || path.endsWith('.ftb1')) {
    writeFtb1(path, dim, rows);
  } else {
    writeCsv(path, dim, rows);
  }
}
