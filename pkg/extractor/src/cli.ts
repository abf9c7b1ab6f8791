#!/usr/bin/env node
/** Command line front end: directory of articles to engine input files. */

import { parseArgs } from "node:util";
import { runExtract } from "./extract.js";

const USAGE = `usage: actor-mention-extractor --input DIR --out DIR --model PATH
                               [--cache PATH] [--offline]

Reads every *.txt article in --input (first line title, rest body) and writes
mentions.jsonl, ne_relations.jsonl, and embeddings.tsv to --out.

  --input DIR    directory of article text files
  --out DIR      output directory, created if missing
  --model PATH   embedding model, word2vec text format
  --cache PATH   relation cache file (read, and written back after fetches)
  --offline      never touch the network; requires --cache
`;

function summarize(report: {
  docs: number;
  sentences: number;
  mentions: number;
  distinctRpTexts: number;
  droppedOversize: { docId: string; text: string }[];
  neSurfaces: string[];
  relationsWritten: number;
  relationMisses: string[];
  embeddingDim: number;
  embeddingRows: number;
  embeddingMisses: string[];
}): string {
  const lines = [
    `docs: ${report.docs}  sentences: ${report.sentences}  mentions: ${report.mentions}`,
    `distinct rps: ${report.distinctRpTexts}  ne surfaces: ${report.neSurfaces.length}`,
    `relations written: ${report.relationsWritten}`,
  ];
  if (report.relationMisses.length) {
    lines.push(`relation misses: ${report.relationMisses.join(", ")}`);
  }
  lines.push(`embedding rows: ${report.embeddingRows} (dim ${report.embeddingDim})`);
  if (report.embeddingMisses.length) {
    lines.push(`embedding misses: ${report.embeddingMisses.join(", ")}`);
  }
  for (const dropped of report.droppedOversize) {
    lines.push(`dropped oversize phrase in ${dropped.docId}: ${dropped.text}`);
  }
  return lines.join("\n");
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        out: { type: "string" },
        model: { type: "string" },
        cache: { type: "string" },
        offline: { type: "boolean", default: false },
        help: { type: "boolean", short: "h", default: false },
      },
    }));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  if (values.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  if (!values.input || !values.out || !values.model) {
    process.stderr.write(`error: --input, --out, and --model are required\n${USAGE}`);
    return 2;
  }

  try {
    const report = await runExtract({
      inputDir: values.input,
      outDir: values.out,
      modelPath: values.model,
      offline: values.offline,
      cachePath: values.cache,
    });
    process.stdout.write(summarize(report) + "\n");
    process.stdout.write(
      `wrote mentions.jsonl, ne_relations.jsonl, embeddings.tsv to ${values.out}\n`,
    );
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

main(process.argv.slice(2)).then((code) => {
  process.exitCode = code;
});
