/**
 * Embedding model loading and vocabulary export.
 *
 * The model is word2vec text format: a "count dim" header, then one row per
 * key. Multi-word keys join tokens with underscores. Vector values are kept
 * as the exact strings from the model file so the exported TSV is verbatim,
 * not a parse-and-reformat roundtrip that invites float drift.
 */

import { readFileSync } from "node:fs";

export interface Model {
  dim: number;
  /** Key to raw value strings, untouched. */
  vectors: Map<string, string[]>;
  /** Longest key length in tokens; bounds the greedy match window. */
  maxKeyTokens: number;
}

export function loadModel(path: string): Model {
  const raw = readFileSync(path, "utf8");
  const lines = raw.split("\n");
  while (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (!lines.length) throw new Error(`${path}: empty model file`);

  const header = /^(\d+)\s+(\d+)$/.exec(lines[0]!.trim());
  if (!header) throw new Error(`${path}: bad header line: ${lines[0]}`);
  const count = Number(header[1]);
  const dim = Number(header[2]);

  const vectors = new Map<string, string[]>();
  let maxKeyTokens = 1;
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.trim().split(/\s+/);
    if (parts.length !== dim + 1) {
      throw new Error(
        `${path}: line ${i + 1}: expected ${dim + 1} fields, got ${parts.length}`,
      );
    }
    const key = parts[0]!;
    vectors.set(key, parts.slice(1));
    const width = key.split("_").length;
    if (width > maxKeyTokens) maxKeyTokens = width;
  }
  if (vectors.size !== count) {
    throw new Error(`${path}: header says ${count} rows, found ${vectors.size}`);
  }
  return { dim, vectors, maxKeyTokens };
}

export interface ExportResult {
  /** TSV rows, sorted by key. */
  lines: string[];
  /** Tokens no key covered, deduplicated and sorted. */
  misses: string[];
}

/**
 * Select the model rows the given phrases need.
 *
 * Each phrase is segmented greedily, longest key first, against the exact
 * keys of the model. Every matched key is exported together with its
 * lowercase companion when the model has one; downstream lemma lookups are
 * lowercase and would otherwise go hungry.
 */
export function exportRows(rpTexts: Iterable<string>, model: Model): ExportResult {
  const picked = new Set<string>();
  const missed = new Set<string>();

  const take = (key: string) => {
    picked.add(key);
    const lower = key.toLowerCase();
    if (lower !== key && model.vectors.has(lower)) picked.add(lower);
  };

  for (const text of rpTexts) {
    const tokens = text.split(" ");
    let i = 0;
    while (i < tokens.length) {
      let matched = 0;
      const cap = Math.min(model.maxKeyTokens, tokens.length - i);
      for (let width = cap; width >= 1; width--) {
        const key = tokens.slice(i, i + width).join("_");
        if (model.vectors.has(key)) {
          take(key);
          matched = width;
          break;
        }
      }
      if (matched === 0) {
        missed.add(tokens[i]!);
        i += 1;
      } else {
        i += matched;
      }
    }
  }

  const lines = [...picked]
    .sort()
    .map((key) => [key, ...model.vectors.get(key)!].join("\t"));
  return { lines, misses: [...missed].sort() };
}
