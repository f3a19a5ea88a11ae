#!/usr/bin/env node
// CLI: embed --corpus F --out F [--model ID] [--batch N]
// plus a validate subcommand for checking any embedding file.

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { embedCorpus } from "./embed.js";
import { DEFAULT_MODEL, loadTransformersEncoder } from "./encoder.js";
import { validateEmbeddingFile } from "./validate.js";

await yargs(hideBin(process.argv))
  .scriptName("citeflow-embed")
  .command(
    ["embed", "$0"],
    "encode a corpus into an embedding file",
    (args) =>
      args
        .option("corpus", { type: "string", demandOption: true, describe: "corpus JSONL file" })
        .option("out", { type: "string", demandOption: true, describe: "embedding file to write" })
        .option("model", { type: "string", default: DEFAULT_MODEL })
        .option("batch", { type: "number", default: 16 })
        .option("separator", { type: "string", default: " " })
        .option("device", {
          choices: ["auto", "cpu", "gpu", "wasm", "webgpu"] as const,
          describe: "inference device hint",
        }),
    async (argv) => {
      const encoder = await loadTransformersEncoder(argv.model, argv.device);
      const result = await embedCorpus(
        {
          corpusPath: argv.corpus,
          outPath: argv.out,
          modelId: argv.model,
          batchSize: argv.batch,
          separator: argv.separator,
          device: argv.device,
        },
        encoder,
      );
      console.log(
        `wrote ${result.written} vectors (dimension ${result.dimension}) to ${argv.out}; ` +
          `${result.skipped.length} paper(s) skipped (${result.skipReportPath})`,
      );
    },
  )
  .command(
    "validate <file>",
    "check an embedding file against the consumer's contract",
    (args) => args.positional("file", { type: "string", demandOption: true }),
    (argv) => {
      const summary = validateEmbeddingFile(argv.file as string);
      console.log(`${summary.records} records, dimension ${summary.dimension}: OK`);
    },
  )
  .strict()
  .demandCommand(1)
  .fail((message, error) => {
    console.error(`error: ${error?.message ?? message}`);
    process.exit(1);
  })
  .parseAsync();
