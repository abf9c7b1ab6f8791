/** End-to-end extraction: article directory in, engine input files out. */

import { mkdirSync, readFileSync, readdirSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";
import { exportRows, loadModel } from "./embeddings.js";
import { extractMentions } from "./mentions.js";
import { gatherSimilar, relationRows, type RelationSource } from "./relations.js";
import type { ArticleSet, ExtractionReport } from "./types.js";

/**
 * Read every *.txt file of a directory as one article. The first line is the
 * title, the rest is the body; only the body is mined. File order (and so
 * doc order) is the sorted filename order.
 */
export function readArticleDir(dir: string): ArticleSet {
  const names = readdirSync(dir).filter((n) => n.endsWith(".txt")).sort();
  if (!names.length) throw new Error(`no .txt articles in ${dir}`);
  const articles = names.map((name) => {
    const raw = readFileSync(join(dir, name), "utf8");
    const cut = raw.indexOf("\n");
    return {
      docId: name.slice(0, -".txt".length),
      title: (cut < 0 ? raw : raw.slice(0, cut)).trim(),
      body: cut < 0 ? "" : raw.slice(cut + 1),
    };
  });
  return { eventId: basename(dir), articles };
}

export interface ExtractOptions {
  inputDir: string;
  outDir: string;
  modelPath: string;
  offline: boolean;
  cachePath?: string;
  /** Overrides the live backend; tests inject fakes here. */
  source?: RelationSource;
}

const jsonl = (records: unknown[]): string =>
  records.length ? records.map((r) => JSON.stringify(r)).join("\n") + "\n" : "";

/** Run the full extraction and write the three engine input files. */
export async function runExtract(opts: ExtractOptions): Promise<ExtractionReport> {
  const set: ArticleSet = readArticleDir(opts.inputDir);
  const { mentions, droppedOversize, sentences } = extractMentions(set);

  const surfaces = new Set<string>();
  for (const mention of mentions) {
    for (const ne of mention.ne_components) surfaces.add(ne.surface);
  }
  const { similar, misses: relationMisses } = await gatherSimilar(surfaces, {
    cachePath: opts.cachePath,
    source: opts.source,
    offline: opts.offline,
  });
  const relations = relationRows(similar, surfaces);

  const model = loadModel(opts.modelPath);
  const rpTexts = [...new Set(mentions.map((m) => m.rp_text))].sort();
  const { lines, misses: embeddingMisses } = exportRows(rpTexts, model);

  mkdirSync(opts.outDir, { recursive: true });
  writeFileSync(join(opts.outDir, "mentions.jsonl"), jsonl(mentions));
  writeFileSync(join(opts.outDir, "ne_relations.jsonl"), jsonl(relations));
  writeFileSync(
    join(opts.outDir, "embeddings.tsv"),
    lines.length ? lines.join("\n") + "\n" : "",
  );

  return {
    docs: set.articles.length,
    sentences,
    mentions: mentions.length,
    distinctRpTexts: rpTexts.length,
    droppedOversize,
    neSurfaces: [...surfaces].sort(),
    relationsWritten: relations.length,
    relationMisses,
    embeddingDim: model.dim,
    embeddingRows: lines.length,
    embeddingMisses,
  };
}
