// Core job: corpus file in, embedding file out, one vector per paper
// with text. Output lines are sorted by paper id and numbers are
// serialized with JSON's shortest round-trip form, so two runs with the
// same model and flags are byte-identical.

import { writeFileSync } from "node:fs";

import { readCorpus } from "./corpus.js";
import type { TextEncoder } from "./encoder.js";

export interface EmbedJob {
  corpusPath: string;
  outPath: string;
  modelId: string;
  batchSize: number;
  separator: string;
  device?: string;
}

export interface EmbedReport {
  written: number;
  dimension: number;
  skipped: string[];
  skipReportPath: string;
}

export function paperText(title: string, abstract: string, separator: string): string {
  if (title && abstract) return `${title}${separator}${abstract}`;
  return title || abstract;
}

export async function embedCorpus(
  job: EmbedJob,
  encoder: TextEncoder,
): Promise<EmbedReport> {
  if (job.batchSize < 1) {
    throw new Error(`batch size must be >= 1, got ${job.batchSize}`);
  }
  const papers = readCorpus(job.corpusPath).sort((a, b) =>
    a.id < b.id ? -1 : a.id > b.id ? 1 : 0,
  );

  const skipped: string[] = [];
  const embeddable: { id: string; text: string }[] = [];
  for (const paper of papers) {
    const text = paperText(paper.title, paper.abstract, job.separator);
    if (text.trim().length === 0) {
      skipped.push(paper.id);
    } else {
      embeddable.push({ id: paper.id, text });
    }
  }

  const lines: string[] = [];
  let dimension = 0;
  for (let start = 0; start < embeddable.length; start += job.batchSize) {
    const batch = embeddable.slice(start, start + job.batchSize);
    const vectors = await encoder.encode(batch.map((p) => p.text));
    if (vectors.length !== batch.length) {
      throw new Error(
        `encoder returned ${vectors.length} vectors for a batch of ${batch.length}`,
      );
    }
    for (let k = 0; k < batch.length; k++) {
      const vector = vectors[k];
      if (dimension === 0) dimension = vector.length;
      if (vector.length !== dimension) {
        throw new Error(
          `encoder returned inconsistent dimensions (${vector.length} vs ${dimension})`,
        );
      }
      for (const x of vector) {
        if (!Number.isFinite(x)) {
          throw new Error(`non-finite component in vector for ${batch[k].id}`);
        }
      }
      lines.push(JSON.stringify({ id: batch[k].id, vector }));
    }
  }
  writeFileSync(job.outPath, lines.join("\n") + (lines.length ? "\n" : ""), "utf-8");

  const skipReportPath = `${job.outPath}.skips.json`;
  const skipReport = {
    model: job.modelId,
    separator: job.separator,
    max_length: encoder.maxLength,
    batch_size: job.batchSize,
    skipped: skipped.slice().sort(),
  };
  writeFileSync(skipReportPath, JSON.stringify(skipReport, null, 2) + "\n", "utf-8");

  return {
    written: lines.length,
    dimension: dimension || encoder.hiddenSize,
    skipped,
    skipReportPath,
  };
}
