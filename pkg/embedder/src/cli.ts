#!/usr/bin/env node
import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { EXTRACTOR_KINDS, ExtractorKind } from "./extractors.js";
import { readEmbeddingFile, Role } from "./format.js";
import { ExtractionJob, JOB_DEFAULTS, runExtraction } from "./job.js";

class UsageError extends Error {}

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("repa-embed")
    .usage("$0 <command> [options]")
    .command(
      "extract",
      "embed videos (directories of PNG frames, or single PNG files) into a descriptor set",
      (y) =>
        y
          .option("videos", { type: "array", string: true, demandOption: true, describe: "video paths" })
          .option("out", { type: "string", demandOption: true, describe: "output .emb path" })
          .option("name", { type: "string", demandOption: true, describe: "descriptor set name" })
          .option("role", { type: "string", choices: ["real", "generated"], default: JOB_DEFAULTS.role })
          .option("extractor", { type: "string", choices: EXTRACTOR_KINDS, default: JOB_DEFAULTS.extractor })
          .option("frames", { type: "number", default: JOB_DEFAULTS.framesPerVideo, describe: "frames sampled per video" })
          .option("rows", { type: "number", default: JOB_DEFAULTS.sheetRows, describe: "sheet rows" })
          .option("cols", { type: "number", default: JOB_DEFAULTS.sheetCols, describe: "sheet cols" })
          .option("tile", { type: "number", default: JOB_DEFAULTS.frameSize, describe: "tile / frame size in pixels" })
          .option("weights", { type: "string", describe: "directory with model.json + shards for model-backed extractors" }),
      async (args) => {
        const job: ExtractionJob = {
          videoPaths: args.videos as string[],
          extractor: args.extractor as ExtractorKind,
          framesPerVideo: args.frames,
          sheetRows: args.rows,
          sheetCols: args.cols,
          frameSize: args.tile,
          output: args.out,
          name: args.name,
          role: args.role as Role,
          weightsDir: args.weights,
        };
        const file = await runExtraction(job);
        console.log(`wrote ${file.ids.length} x ${file.vectors[0].length} descriptors (${file.extractor}) to ${args.out}`);
      },
    )
    .command(
      "inspect",
      "verify an embedding file and print its shape and metadata",
      (y) => y.option("file", { type: "string", demandOption: true, describe: ".emb path" }),
      async (args) => {
        const file = readEmbeddingFile(args.file);
        console.log(`name: ${file.name}`);
        console.log(`role: ${file.role}`);
        console.log(`extractor: ${file.extractor}`);
        console.log(`vectors: ${file.vectors.length} x ${file.vectors[0]?.length ?? 0}`);
        console.log(`ids: ${file.ids.join(", ")}`);
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      if (err !== undefined && err !== null) throw err;
      throw new UsageError(msg);
    })
    .exitProcess(false);

  try {
    await parser.parseAsync();
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    const isUsage =
      err instanceof UsageError || err instanceof RangeError || (err as Error).name === "YError";
    return isUsage ? 2 : 3;
  }
  return 0;
}

function isDirectRun(): boolean {
  const entry = process.argv[1];
  if (entry === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(entry)).href;
  } catch {
    return false;
  }
}

if (isDirectRun()) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
