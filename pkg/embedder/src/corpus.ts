// Reading the citeflow corpus file: JSON lines with paper records
// ({id, year, title, abstract, ...}) and edge records ({src, dst}).
// Edge records are irrelevant for embedding and skipped.

import { readFileSync } from "node:fs";

export interface CorpusPaper {
  id: string;
  title: string;
  abstract: string;
}

export function readCorpus(path: string): CorpusPaper[] {
  const papers: CorpusPaper[] = [];
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let record: Record<string, unknown>;
    try {
      record = JSON.parse(line);
    } catch {
      throw new Error(`corpus line ${i + 1}: invalid JSON`);
    }
    if ("src" in record || "dst" in record) continue;
    if (typeof record.id !== "string" || record.id.length === 0) {
      throw new Error(`corpus line ${i + 1}: paper record without an id`);
    }
    papers.push({
      id: record.id,
      title: typeof record.title === "string" ? record.title : "",
      abstract: typeof record.abstract === "string" ? record.abstract : "",
    });
  }
  return papers;
}
