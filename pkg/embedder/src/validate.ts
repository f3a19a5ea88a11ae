// Consumer-side validation of an embedding file, mirroring what the
// pipeline's loader enforces: JSON lines of {id, vector}, one uniform
// dimension (>= 2), every component a finite number, ids unique.

import { readFileSync } from "node:fs";

export interface ValidationSummary {
  records: number;
  dimension: number;
}

export function validateEmbeddingFile(path: string): ValidationSummary {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n");
  const seen = new Set<string>();
  let dimension = 0;
  let records = 0;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let record: { id?: unknown; vector?: unknown };
    try {
      record = JSON.parse(line);
    } catch {
      throw new Error(`line ${i + 1}: invalid JSON`);
    }
    if (typeof record.id !== "string" || !Array.isArray(record.vector)) {
      throw new Error(`line ${i + 1}: embedding record needs id and vector`);
    }
    if (seen.has(record.id)) {
      throw new Error(`line ${i + 1}: duplicate id '${record.id}'`);
    }
    seen.add(record.id);
    if (dimension === 0) {
      dimension = record.vector.length;
      if (dimension < 2) {
        throw new Error(`line ${i + 1}: dimension must be >= 2, got ${dimension}`);
      }
    } else if (record.vector.length !== dimension) {
      throw new Error(
        `line ${i + 1}: record '${record.id}' has dimension ` +
          `${record.vector.length}, expected ${dimension}`,
      );
    }
    for (const x of record.vector) {
      if (typeof x !== "number" || !Number.isFinite(x)) {
        throw new Error(`line ${i + 1}: non-finite component in '${record.id}'`);
      }
    }
    records++;
  }
  if (records === 0) throw new Error(`no embedding records in ${path}`);
  return { records, dimension };
}
